#include "scaling/study_model.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

namespace scaling {

std::string_view to_string(RunStatus s) {
    switch (s) {
        case RunStatus::ok: return "ok";
        case RunStatus::oom: return "oom";
        case RunStatus::failed: return "failed";
    }
    return "failed";
}

std::string_view to_string(Family f) {
    switch (f) {
        case Family::strong: return "strong";
        case Family::weak: return "weak";
        case Family::throughput: return "throughput";
    }
    return "strong";
}

std::string_view to_string(MetricKind k) {
    switch (k) {
        case MetricKind::time_per_cycle_s: return "time_per_cycle_s";
        case MetricKind::speedup: return "speedup";
        case MetricKind::efficiency: return "efficiency";
        case MetricKind::slowdown: return "slowdown";
        case MetricKind::throughput: return "throughput";
    }
    return "time_per_cycle_s";
}

std::optional<RunStatus> parse_status(std::string_view s) {
    if (s == "ok") return RunStatus::ok;
    if (s == "oom") return RunStatus::oom;
    if (s == "failed") return RunStatus::failed;
    return std::nullopt;
}

std::optional<Family> parse_family(std::string_view s) {
    if (s == "strong") return Family::strong;
    if (s == "weak") return Family::weak;
    if (s == "throughput") return Family::throughput;
    return std::nullopt;
}

namespace {

std::string join_issues(const std::vector<FieldIssue>& issues) {
    std::string out;
    for (const auto& i : issues) {
        if (!out.empty()) out += "; ";
        out += i.field + ": " + i.reason;
    }
    return out;
}

}  // namespace

InvalidRecord::InvalidRecord(std::vector<FieldIssue> issues)
    : Error(ErrorCode::invalid_record, "invalid record: " + join_issues(issues)),
      issues_(std::move(issues)) {}

std::vector<FieldIssue> check_record(const RunRecord& r) {
    std::vector<FieldIssue> issues;
    if (r.nodes < 1) issues.push_back({"nodes", "must be >= 1"});
    if (r.cycles < 1) issues.push_back({"cycles", "must be >= 1"});
    if (r.dofs_total < 1) issues.push_back({"dofs_total", "must be >= 1"});
    if (r.ranks_per_node && *r.ranks_per_node < 1) issues.push_back({"ranks_per_node", "must be >= 1"});
    if (r.refinement_level && *r.refinement_level < 0) issues.push_back({"refinement_level", "must be >= 0"});
    if (r.repeat_index < 0) issues.push_back({"repeat_index", "must be >= 0"});
    if (r.wall_time_s && !(std::isfinite(*r.wall_time_s) && *r.wall_time_s > 0.0)) {
        issues.push_back({"wall_time_s", "must be a finite value > 0"});
    }
    if (r.status == RunStatus::ok) {
        if (!r.wall_time_s) issues.push_back({"wall_time_s", "required when status is ok"});
        if (r.nodes >= 1 && r.dofs_total < r.nodes) {
            issues.push_back({"dofs_total", "must be >= nodes when status is ok"});
        }
    }
    return issues;
}

RunRecord validate_record(RunRecord raw) {
    auto issues = check_record(raw);
    if (!issues.empty()) throw InvalidRecord(std::move(issues));
    return raw;
}

double dofs_per_node(const RunRecord& r) {
    return static_cast<double>(r.dofs_total) / static_cast<double>(r.nodes);
}

std::string describe(const SeriesKey& key) {
    std::string out = key.platform;
    if (!key.variant.empty()) out += " (" + key.variant + ")";
    switch (key.family) {
        case Family::strong: out += fmt::format(" strong 2^{} DOF", key.family_param); break;
        case Family::weak: out += fmt::format(" weak 2^{} DOF/node", key.family_param); break;
        case Family::throughput: break;
    }
    return out;
}

int family_bucket(const RunRecord& r, Family family) {
    switch (family) {
        case Family::strong: return static_cast<int>(std::lround(std::log2(static_cast<double>(r.dofs_total))));
        case Family::weak: return static_cast<int>(std::lround(std::log2(dofs_per_node(r))));
        case Family::throughput: return 0;
    }
    return 0;
}

SeriesKey series_key(const RunRecord& r, Family family) {
    return SeriesKey{r.platform, r.variant, r.problem, family, family_bucket(r, family)};
}

std::int64_t series_x(const RunRecord& r, Family family) {
    return family == Family::throughput ? r.dofs_total : r.nodes;
}

bool SeriesPoint::has_ok() const {
    return std::any_of(members.begin(), members.end(),
                       [](const RunRecord& r) { return r.status == RunStatus::ok; });
}

bool SeriesPoint::has_oom() const {
    return std::any_of(members.begin(), members.end(),
                       [](const RunRecord& r) { return r.status == RunStatus::oom; });
}

const SeriesPoint* Series::find(std::int64_t x) const {
    auto it = std::lower_bound(points.begin(), points.end(), x,
                               [](const SeriesPoint& p, std::int64_t v) { return p.x < v; });
    return (it != points.end() && it->x == x) ? &*it : nullptr;
}

Grouping group_series(std::span<const RunRecord> records, Family family) {
    Grouping out;
    std::map<SeriesKey, std::map<std::int64_t, std::vector<RunRecord>>> buckets;
    for (const auto& r : records) {
        if (r.status == RunStatus::failed) {
            out.excluded.push_back(r);
            continue;
        }
        buckets[series_key(r, family)][series_x(r, family)].push_back(r);
    }
    for (auto& [key, by_x] : buckets) {
        Series s{key, {}};
        for (auto& [x, members] : by_x) {
            std::stable_sort(members.begin(), members.end(), [](const RunRecord& a, const RunRecord& b) {
                return std::tie(a.repeat_index, a.study_id) < std::tie(b.repeat_index, b.study_id);
            });
            for (std::size_t i = 1; i < members.size(); ++i) {
                if (members[i].repeat_index == members[i - 1].repeat_index) {
                    throw Error(ErrorCode::duplicate_point,
                                fmt::format("duplicate point in series '{}' at x={} (repeat_index {})",
                                            describe(key), x, members[i].repeat_index));
                }
            }
            s.points.push_back(SeriesPoint{x, std::move(members)});
        }
        out.series.push_back(std::move(s));
    }
    return out;
}

std::optional<double> MetricSequence::at(std::int64_t x) const {
    for (const auto& p : points) {
        if (p.x == x) return p.value;
    }
    return std::nullopt;
}

}  // namespace scaling
