#include "tpat/bench.hpp"

#include <sstream>

namespace tpat {

namespace {

constexpr int kModel = 192;

std::uint64_t u(int v) { return static_cast<std::uint64_t>(v); }

std::uint64_t ffn_macs(int nq, int model) {
    return u(nq) * (u(model) * u(4 * model) + u(4 * model) * u(model));
}

std::uint64_t ffn_params(int model) {
    return u(4 * model) * u(model) + u(4 * model) + u(model) * u(4 * model) + u(model);
}

std::uint64_t ln_params(int model) { return 4ull * u(model); }

int ceil_div(int a, int b) { return (a + b - 1) / b; }

struct Builder {
    CostReport report;

    void add(const std::string& component, const std::string& name, std::uint64_t params,
             std::uint64_t macs) {
        report.items.push_back({component, name, params, macs});
    }

    void add_pa(const std::string& component, const std::string& name, int nq, int nk,
                int kv_dim) {
        add(component, name,
            mha_params(kv_dim, kModel) + ffn_params(kModel) + ln_params(kModel),
            mha_macs(nq, nk, kv_dim, kModel) + ffn_macs(nq, kModel));
    }

    void add_mod(const std::string& component, const std::string& name, int h, int w) {
        const int bottleneck = kModel / 4;
        const std::uint64_t params = conv1x1_params(2 * kModel, kModel) +
                                     linear_params(kModel, bottleneck) +
                                     linear_params(bottleneck, kModel) + 1;  // gamma
        const std::uint64_t macs = conv1x1_macs(2 * kModel, kModel, h, w) +
                                   linear_macs(kModel, bottleneck) +
                                   linear_macs(bottleneck, kModel);
        add(component, name, params, macs);
    }
};

}  // namespace

std::uint64_t conv1x1_macs(int cin, int cout, int h, int w) {
    return u(cout) * u(cin) * u(h) * u(w);
}

std::uint64_t conv1x1_params(int cin, int cout) { return u(cout) * u(cin) + u(cout); }

std::uint64_t linear_macs(int in_dim, int out_dim) { return u(out_dim) * u(in_dim); }

std::uint64_t linear_params(int in_dim, int out_dim) {
    return u(out_dim) * u(in_dim) + u(out_dim);
}

std::uint64_t mha_macs(int nq, int nk, int kv_dim, int model_dim) {
    const std::uint64_t projections = u(nq) * u(model_dim) * u(model_dim)      // Wq
                                      + 2ull * u(nk) * u(model_dim) * u(kv_dim)  // Wk, Wv
                                      + u(nq) * u(model_dim) * u(model_dim);     // Wo
    const std::uint64_t products = 2ull * u(nq) * u(nk) * u(model_dim);  // QK^T and AV
    return projections + products;
}

std::uint64_t mha_params(int kv_dim, int model_dim) {
    return 2ull * u(model_dim) * u(model_dim) + 2ull * u(model_dim) * u(kv_dim);
}

std::uint64_t CostReport::total_params() const {
    std::uint64_t s = 0;
    for (const auto& i : items) s += i.params;
    return s;
}

std::uint64_t CostReport::total_macs() const {
    std::uint64_t s = 0;
    for (const auto& i : items) s += i.macs;
    return s;
}

std::uint64_t CostReport::component_params(const std::string& component) const {
    std::uint64_t s = 0;
    for (const auto& i : items)
        if (i.component == component) s += i.params;
    return s;
}

std::uint64_t CostReport::component_macs(const std::string& component) const {
    std::uint64_t s = 0;
    for (const auto& i : items)
        if (i.component == component) s += i.macs;
    return s;
}

CostReport count_costs(const RunConfig& cfg) {
    validate(cfg);
    Builder b;
    const int g1 = cfg.search_size / 8;   // stage-2 grid
    const int g2 = cfg.search_size / 16;  // stage-3 grid
    const int g3 = ceil_div(g2, 2);       // stage-4 grid
    const int nq = g2 * g2;

    b.add("backbone", "stage2.proj", linear_params(3 * 8 * 8, 116),
          u(g1) * u(g1) * linear_macs(3 * 8 * 8, 116));
    b.add("backbone", "stage3.proj", linear_params(116 * 4, 232),
          u(g2) * u(g2) * linear_macs(116 * 4, 232));
    b.add("backbone", "stage4.proj", linear_params(232 * 4, 464),
          u(g3) * u(g3) * linear_macs(232 * 4, 464));

    b.add("tpn", "adapt.p2", conv1x1_params(116, kModel), conv1x1_macs(116, kModel, g1, g1));
    b.add("tpn", "adapt.p3", conv1x1_params(232, kModel), conv1x1_macs(232, kModel, g2, g2));
    b.add("tpn", "adapt.p4", conv1x1_params(464, kModel), conv1x1_macs(464, kModel, g3, g3));

    b.add_pa("tpn", "low.pa", nq, ceil_div(g1, 4) * ceil_div(g1, 4), kModel);
    if (cfg.use_mpa) b.add_mod("tpn", "low.mod", g2, g2);
    b.add_pa("tpn", "mid.pa", nq, ceil_div(g2, 2) * ceil_div(g2, 2), kModel);
    b.add_pa("tpn", "high.pa", nq, g3 * g3, kModel);
    if (cfg.use_mpa) b.add_mod("tpn", "high.mod", g2, g2);
    b.add_pa("tpn", "refine1.pa", nq, ceil_div(g2, 2) * ceil_div(g2, 2), kModel);
    b.add_pa("tpn", "refine2.pa", nq, ceil_div(g2, 2) * ceil_div(g2, 2), kModel);

    const int tz = cfg.template_size / 16;
    if (cfg.fusion == FusionMode::kCrossCorrelation) {
        b.add("fusion", "xcorr", 0, u(kModel) * u(nq) * u(tz) * u(tz));
    } else {
        const int kv_dim =
            cfg.combine == CombineMode::kConcat ? cfg.template_count * kModel : kModel;
        b.add_pa("fusion", "pa", nq, tz * tz, kv_dim);
        if (cfg.use_mpa) b.add_mod("fusion", "mod", g2, g2);
    }

    b.add("head", "cls1", conv1x1_params(kModel, kModel), conv1x1_macs(kModel, kModel, g2, g2));
    b.add("head", "cls2", conv1x1_params(kModel, 1), conv1x1_macs(kModel, 1, g2, g2));
    b.add("head", "reg1", conv1x1_params(kModel, kModel), conv1x1_macs(kModel, kModel, g2, g2));
    b.add("head", "reg2", conv1x1_params(kModel, 4), conv1x1_macs(kModel, 4, g2, g2));
    return b.report;
}

std::string cost_table(const CostReport& report) {
    std::ostringstream os;
    os << "component  item           params        macs\n";
    std::string last;
    for (const auto& i : report.items) {
        char line[128];
        std::snprintf(line, sizeof(line), "%-10s %-14s %10llu %11llu\n", i.component.c_str(),
                      i.name.c_str(), static_cast<unsigned long long>(i.params),
                      static_cast<unsigned long long>(i.macs));
        os << line;
    }
    for (const std::string& c : {"backbone", "tpn", "fusion", "head"}) {
        char line[128];
        std::snprintf(line, sizeof(line), "%-10s %-14s %10llu %11llu\n", c.c_str(), "TOTAL",
                      static_cast<unsigned long long>(report.component_params(c)),
                      static_cast<unsigned long long>(report.component_macs(c)));
        os << line;
    }
    char line[128];
    std::snprintf(line, sizeof(line), "%-10s %-14s %10llu %11llu\n", "all", "TOTAL",
                  static_cast<unsigned long long>(report.total_params()),
                  static_cast<unsigned long long>(report.total_macs()));
    os << line;
    return os.str();
}

}  // namespace tpat
