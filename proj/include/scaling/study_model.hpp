#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scaling/error.hpp"

namespace scaling {

enum class RunStatus { ok, oom, failed };
enum class Family { strong, weak, throughput };
enum class MetricKind { time_per_cycle_s, speedup, efficiency, slowdown, throughput };

std::string_view to_string(RunStatus s);
std::string_view to_string(Family f);
std::string_view to_string(MetricKind k);
std::optional<RunStatus> parse_status(std::string_view s);
std::optional<Family> parse_family(std::string_view s);

// One executed (or simulated) run. Times are totals over `cycles`.
struct RunRecord {
    std::string study_id;
    std::string platform;
    std::string variant;
    std::string problem;
    std::int64_t nodes = 1;
    std::optional<std::int64_t> ranks_per_node;  // informational only
    std::int64_t cycles = 1;
    std::optional<double> wall_time_s;
    std::int64_t dofs_total = 1;
    std::optional<std::int64_t> refinement_level;
    RunStatus status = RunStatus::ok;
    std::int64_t repeat_index = 0;
    std::map<std::string, std::string> metadata;

    bool operator==(const RunRecord&) const = default;
};

struct FieldIssue {
    std::string field;
    std::string reason;

    bool operator==(const FieldIssue&) const = default;
};

class InvalidRecord : public Error {
public:
    explicit InvalidRecord(std::vector<FieldIssue> issues);
    [[nodiscard]] const std::vector<FieldIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<FieldIssue> issues_;
};

// All invariant violations of `r`; empty when the record is valid.
std::vector<FieldIssue> check_record(const RunRecord& r);

// Returns `raw` unchanged when valid, otherwise throws InvalidRecord listing
// every violation.
RunRecord validate_record(RunRecord raw);

double dofs_per_node(const RunRecord& r);

// Identifies one plotted curve. For strong families family_param is the
// rounded log2 of dofs_total, for weak families the rounded log2 of
// dofs_per_node, and 0 for throughput.
struct SeriesKey {
    std::string platform;
    std::string variant;
    std::string problem;
    Family family = Family::strong;
    int family_param = 0;

    auto operator<=>(const SeriesKey&) const = default;
};

std::string describe(const SeriesKey& key);

int family_bucket(const RunRecord& r, Family family);
SeriesKey series_key(const RunRecord& r, Family family);
// nodes for strong/weak, dofs_total for throughput.
std::int64_t series_x(const RunRecord& r, Family family);

// All records of one series at one x. More than one member means an
// ensemble of repeats (distinct repeat_index).
struct SeriesPoint {
    std::int64_t x = 0;
    std::vector<RunRecord> members;

    [[nodiscard]] bool has_ok() const;
    [[nodiscard]] bool has_oom() const;
};

struct Series {
    SeriesKey key;
    std::vector<SeriesPoint> points;  // strictly increasing x

    [[nodiscard]] const SeriesPoint* find(std::int64_t x) const;
};

struct Grouping {
    std::vector<Series> series;        // sorted by key
    std::vector<RunRecord> excluded;   // failed records, preserved for reporting
};

// Partitions ok and oom records into series of the given family. Throws
// Error(duplicate_point) when two records collide on (key, x, repeat_index).
Grouping group_series(std::span<const RunRecord> records, Family family);

struct MetricPoint {
    std::int64_t x = 0;
    double value = 0.0;
    MetricKind kind = MetricKind::time_per_cycle_s;
};

// A metric evaluated along one series; baseline_x is the reference point for
// ratio metrics (0 when not applicable).
struct MetricSequence {
    MetricKind kind = MetricKind::time_per_cycle_s;
    std::int64_t baseline_x = 0;
    std::vector<MetricPoint> points;

    [[nodiscard]] std::optional<double> at(std::int64_t x) const;
};

}  // namespace scaling
