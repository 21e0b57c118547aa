#include "tpat/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "tpat/errors.hpp"

namespace tpat {

namespace {

std::string trim(const std::string& s) {
    const size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class KvReader {
public:
    explicit KvReader(const KvMap& kv) : kv_(kv) {}

    bool has(const std::string& key) {
        seen_.insert(key);
        return kv_.count(key) > 0;
    }

    std::string str(const std::string& key, const std::string& def) {
        seen_.insert(key);
        auto it = kv_.find(key);
        return it == kv_.end() ? def : it->second;
    }

    float number(const std::string& key, float def) {
        seen_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return def;
        const std::string v = it->second;
        if (v == "inf") return std::numeric_limits<float>::infinity();
        try {
            size_t pos = 0;
            const float f = std::stof(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return f;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': cannot parse number '" + v + "'");
        }
    }

    int integer(const std::string& key, int def) {
        seen_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return def;
        try {
            size_t pos = 0;
            const int i = std::stoi(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(it->second);
            return i;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': cannot parse integer '" + it->second + "'");
        }
    }

    std::uint64_t seed(const std::string& key, std::uint64_t def) {
        seen_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return def;
        try {
            return std::stoull(it->second);
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': cannot parse seed '" + it->second + "'");
        }
    }

    bool flag(const std::string& key, bool def) {
        seen_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return def;
        const std::string& v = it->second;
        if (v == "on" || v == "true" || v == "1") return true;
        if (v == "off" || v == "false" || v == "0") return false;
        throw ConfigError("key '" + key + "': expected on/off, got '" + v + "'");
    }

    void reject_unknown() const {
        for (const auto& [key, value] : kv_)
            if (!seen_.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }

private:
    const KvMap& kv_;
    std::set<std::string> seen_;
};

}  // namespace

KvMap parse_kv_text(const std::string& text, const std::string& origin) {
    KvMap kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

KvMap parse_kv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_kv_text(buf.str(), path);
}

void apply_overrides(KvMap& kv, const std::vector<std::string>& overrides) {
    for (const std::string& o : overrides) {
        const size_t eq = o.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("override '" + o + "' is not key=value");
        kv[trim(o.substr(0, eq))] = trim(o.substr(eq + 1));
    }
}

RunConfig run_config_from(const KvMap& kv) {
    KvReader r(kv);
    RunConfig c;
    c.tracker.alpha = r.number("alpha", c.tracker.alpha);
    c.tracker.theta_d = r.number("theta_d", c.tracker.theta_d);
    c.tracker.theta_s = r.number("theta_s", c.tracker.theta_s);
    c.tracker.update_interval = r.integer("update_interval", c.tracker.update_interval);
    c.tracker.conf_th = r.number("conf_th", c.tracker.conf_th);
    c.tracker.enable_smoothing = r.flag("enable_smoothing", c.tracker.enable_smoothing);
    c.tracker.enable_correction = r.flag("enable_correction", c.tracker.enable_correction);
    c.tracker.check_shrink = r.flag("check_shrink", c.tracker.check_shrink);

    const std::string fusion = r.str("fusion", "attention");
    if (fusion == "attention")
        c.fusion = FusionMode::kAttention;
    else if (fusion == "cross_correlation")
        c.fusion = FusionMode::kCrossCorrelation;
    else
        throw ConfigError("fusion must be attention|cross_correlation, got '" + fusion + "'");

    const std::string combine = r.str("combine", "concat");
    if (combine == "concat")
        c.combine = CombineMode::kConcat;
    else if (combine == "mean")
        c.combine = CombineMode::kMean;
    else if (combine == "sum")
        c.combine = CombineMode::kSum;
    else
        throw ConfigError("combine must be concat|mean|sum, got '" + combine + "'");

    c.template_count = r.integer("template_count", c.template_count);
    c.temporal = r.flag("temporal", c.temporal);
    c.use_mpa = r.flag("mpa", c.use_mpa);
    c.model_seed = r.seed("model_seed", c.model_seed);
    c.search_size = r.integer("search_size", c.search_size);
    c.template_size = r.integer("template_size", c.template_size);
    c.search_factor = r.number("search_factor", c.search_factor);
    c.template_context = r.number("template_context", c.template_context);
    c.gamma = r.number("gamma", c.gamma);
    c.params_path = r.str("params_path", c.params_path);
    r.reject_unknown();
    validate(c);
    return c;
}

SynthConfig synth_config_from(const KvMap& kv) {
    KvReader r(kv);
    SynthConfig c;
    c.frame_w = r.integer("frame_width", c.frame_w);
    c.frame_h = r.integer("frame_height", c.frame_h);
    c.num_frames = r.integer("num_frames", c.num_frames);
    c.target_w = r.number("target_w", c.target_w);
    c.target_h = r.number("target_h", c.target_h);
    c.texture_seed = r.seed("texture_seed", c.texture_seed);
    c.vx = r.number("vx", c.vx);
    c.vy = r.number("vy", c.vy);
    c.jitter_amp = r.number("jitter_amp", c.jitter_amp);
    c.jitter_period = r.number("jitter_period", c.jitter_period);
    c.scale_drift = r.number("scale_drift", c.scale_drift);
    c.distractor_count = r.integer("distractor_count", c.distractor_count);
    c.distractor_similarity = r.number("distractor_similarity", c.distractor_similarity);
    c.noise = r.number("noise", c.noise);
    c.seed = r.seed("seed", c.seed);

    // occlusions = start:end:full|partial[,start:end:...]
    if (r.has("occlusions")) {
        const std::string spec = r.str("occlusions", "");
        std::istringstream is(spec);
        std::string item;
        while (std::getline(is, item, ',')) {
            std::istringstream ls(item);
            std::string s0, s1, kind;
            if (!std::getline(ls, s0, ':') || !std::getline(ls, s1, ':') ||
                !std::getline(ls, kind))
                throw ConfigError("occlusion spec '" + item + "' is not start:end:full|partial");
            OccluderSpec o;
            try {
                o.start = std::stoi(s0);
                o.end = std::stoi(s1);
            } catch (const std::exception&) {
                throw ConfigError("occlusion spec '" + item + "': bad frame numbers");
            }
            if (kind == "full")
                o.full = true;
            else if (kind == "partial")
                o.full = false;
            else
                throw ConfigError("occlusion spec '" + item + "': kind must be full|partial");
            c.occlusions.push_back(o);
        }
    }
    r.reject_unknown();
    validate(c);
    return c;
}

}  // namespace tpat
