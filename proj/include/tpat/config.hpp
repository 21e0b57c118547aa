#ifndef TPAT_CONFIG_HPP_
#define TPAT_CONFIG_HPP_

#include <map>
#include <string>
#include <vector>

#include "tpat/pipeline.hpp"
#include "tpat/synth.hpp"

namespace tpat {

// Flat key=value text config. '#' starts a comment; keys are
// case-sensitive; later assignments win.
using KvMap = std::map<std::string, std::string>;

KvMap parse_kv_text(const std::string& text, const std::string& origin);
KvMap parse_kv_file(const std::string& path);

// Applies "key=value" override strings on top of the file values.
void apply_overrides(KvMap& kv, const std::vector<std::string>& overrides);

// Builders throw ConfigError on unknown keys or malformed values.
RunConfig run_config_from(const KvMap& kv);
SynthConfig synth_config_from(const KvMap& kv);

}  // namespace tpat

#endif  // TPAT_CONFIG_HPP_
