#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scaling/planner.hpp"
#include "scaling/study_model.hpp"

namespace scaling {

// Synthetic per-cycle cost model:
//   d    = dofs_total / nodes
//   r(d) = rate * d / (d + half_saturation)
//   t    = serial + launch + d / r(d) + comm * log2(nodes)
// Runs whose d exceeds mem_capacity_dofs_per_node come back as oom.
struct PlatformModel {
    std::string name;
    double serial_s_per_cycle = 0.0;
    double rate_dofs_per_s = 1.0;
    double half_saturation_dofs = 0.0;  // 0: saturated at any size
    double comm_s_per_cycle = 0.0;
    double launch_s_per_cycle = 0.0;
    double mem_capacity_dofs_per_node = 1e18;
    double noise_rel = 0.0;  // uniform multiplicative noise in [-noise_rel, +noise_rel]
    std::uint64_t seed = 0;

    bool operator==(const PlatformModel&) const = default;
};

std::vector<FieldIssue> check_model(const PlatformModel& m);
void validate_model(const PlatformModel& m);

double model_time_per_cycle(const PlatformModel& m, std::int64_t nodes, std::int64_t dofs_total);

// SplitMix64 output function (Steele, Lea, Flood 2014).
std::uint64_t splitmix64(std::uint64_t x);
// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view s);

// Deterministic noise multiplier (1 + eps) for one run. The key hash chains
// splitmix64 over seed, fnv1a64(study_id), fnv1a64(platform), nodes,
// dofs_total and repeat_index, in that order; eps uses the top 53 bits.
double noise_factor(const PlatformModel& m, std::string_view study_id, std::string_view platform,
                    std::int64_t nodes, std::int64_t dofs_total, std::int64_t repeat_index);

RunRecord simulate_run(const PlatformModel& m, const RunSpec& spec, std::int64_t repeat_index = 0);

}  // namespace scaling
