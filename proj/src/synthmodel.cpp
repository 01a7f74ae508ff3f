#include "scaling/synthmodel.hpp"

#include <cmath>

#include <fmt/format.h>

namespace scaling {

namespace {

void require_finite_nonneg(std::vector<FieldIssue>& issues, std::string_view field, double v) {
    if (!std::isfinite(v) || v < 0.0) issues.push_back({std::string(field), "must be finite and >= 0"});
}

}  // namespace

std::vector<FieldIssue> check_model(const PlatformModel& m) {
    std::vector<FieldIssue> issues;
    if (m.name.empty()) issues.push_back({"name", "must not be empty"});
    require_finite_nonneg(issues, "serial_s_per_cycle", m.serial_s_per_cycle);
    require_finite_nonneg(issues, "half_saturation_dofs", m.half_saturation_dofs);
    require_finite_nonneg(issues, "comm_s_per_cycle", m.comm_s_per_cycle);
    require_finite_nonneg(issues, "launch_s_per_cycle", m.launch_s_per_cycle);
    if (!std::isfinite(m.rate_dofs_per_s) || m.rate_dofs_per_s <= 0.0) {
        issues.push_back({"rate_dofs_per_s", "must be finite and > 0"});
    }
    if (!std::isfinite(m.mem_capacity_dofs_per_node) || m.mem_capacity_dofs_per_node <= 0.0) {
        issues.push_back({"mem_capacity_dofs_per_node", "must be finite and > 0"});
    }
    if (!std::isfinite(m.noise_rel) || m.noise_rel < 0.0 || m.noise_rel >= 0.5) {
        issues.push_back({"noise_rel", "must be in [0, 0.5)"});
    }
    return issues;
}

void validate_model(const PlatformModel& m) {
    auto issues = check_model(m);
    if (issues.empty()) return;
    std::string msg = fmt::format("invalid platform model '{}':", m.name);
    for (const auto& i : issues) msg += fmt::format(" {}: {};", i.field, i.reason);
    throw Error(ErrorCode::invalid_model, msg);
}

double model_time_per_cycle(const PlatformModel& m, std::int64_t nodes, std::int64_t dofs_total) {
    const double d = static_cast<double>(dofs_total) / static_cast<double>(nodes);
    // d / r(d) with r(d) = rate * d / (d + h) simplifies to (d + h) / rate.
    const double work = (d + m.half_saturation_dofs) / m.rate_dofs_per_s;
    return m.serial_s_per_cycle + m.launch_s_per_cycle + work +
           m.comm_s_per_cycle * std::log2(static_cast<double>(nodes));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double noise_factor(const PlatformModel& m, std::string_view study_id, std::string_view platform,
                    std::int64_t nodes, std::int64_t dofs_total, std::int64_t repeat_index) {
    if (m.noise_rel == 0.0) return 1.0;
    std::uint64_t h = splitmix64(m.seed);
    for (const std::uint64_t part : {fnv1a64(study_id), fnv1a64(platform), static_cast<std::uint64_t>(nodes),
                                     static_cast<std::uint64_t>(dofs_total),
                                     static_cast<std::uint64_t>(repeat_index)}) {
        h = splitmix64(h ^ part);
    }
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0, 1)
    return 1.0 + m.noise_rel * (2.0 * u - 1.0);
}

RunRecord simulate_run(const PlatformModel& m, const RunSpec& spec, std::int64_t repeat_index) {
    RunRecord r;
    r.study_id = spec.study_id;
    r.platform = spec.platform;
    r.variant = spec.expected_series.variant;
    r.problem = spec.expected_series.problem;
    r.nodes = spec.nodes;
    r.cycles = spec.cycles;
    r.dofs_total = spec.dofs_total;
    r.refinement_level = spec.refinement_level;
    r.repeat_index = repeat_index;
    r.metadata["source"] = "synthmodel";
    r.metadata["model"] = m.name;

    if (dofs_per_node(r) > m.mem_capacity_dofs_per_node) {
        r.status = RunStatus::oom;
        return r;
    }
    const double per_cycle = model_time_per_cycle(m, spec.nodes, spec.dofs_total);
    r.wall_time_s = static_cast<double>(spec.cycles) * per_cycle *
                    noise_factor(m, spec.study_id, spec.platform, spec.nodes, spec.dofs_total, repeat_index);
    r.status = RunStatus::ok;
    return r;
}

}  // namespace scaling
