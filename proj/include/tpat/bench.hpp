#ifndef TPAT_BENCH_HPP_
#define TPAT_BENCH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "tpat/pipeline.hpp"

namespace tpat {

// Closed-form multiply-accumulate counts; elementwise ops, softmax and
// layer norms are excluded by convention.
std::uint64_t conv1x1_macs(int cin, int cout, int h, int w);
std::uint64_t conv1x1_params(int cin, int cout);
std::uint64_t linear_macs(int in_dim, int out_dim);
std::uint64_t linear_params(int in_dim, int out_dim);

// Projections, logit and value products of one multi-head attention call.
std::uint64_t mha_macs(int nq, int nk, int kv_dim, int model_dim);
std::uint64_t mha_params(int kv_dim, int model_dim);

struct CostItem {
    std::string component;  // backbone | tpn | fusion | head
    std::string name;
    std::uint64_t params = 0;
    std::uint64_t macs = 0;
};

// Per-frame cost of the search path under a run configuration.
struct CostReport {
    std::vector<CostItem> items;

    std::uint64_t total_params() const;
    std::uint64_t total_macs() const;
    std::uint64_t component_params(const std::string& component) const;
    std::uint64_t component_macs(const std::string& component) const;
};

CostReport count_costs(const RunConfig& cfg);

// Human-readable table, one line per item plus component and grand totals.
std::string cost_table(const CostReport& report);

}  // namespace tpat

#endif  // TPAT_BENCH_HPP_
