#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scaling/study_model.hpp"

namespace scaling {

struct ParseError {
    std::size_t line = 0;  // 1-based
    std::string reason;
};

struct ParseResult {
    std::vector<RunRecord> records;
    std::vector<ParseError> errors;
};

// JSON-lines input; blank lines are skipped, bad lines reported and skipped.
ParseResult parse_records(std::istream& in);
ParseResult parse_records(std::string_view text);
std::string serialize_records(std::span<const RunRecord> records);

// Stable order used after merging several inputs:
// (study_id, platform, variant, problem, nodes, dofs_total, repeat_index).
void sort_records(std::vector<RunRecord>& records);

enum class CompareOp { eq, ne, lt, le, gt, ge };

std::string_view to_string(CompareOp op);

struct FilterClause {
    std::string key;
    CompareOp op = CompareOp::eq;
    std::string value;  // numeric comparison when both sides parse as numbers
};

struct MetadataFilter {
    std::vector<FilterClause> clauses;  // AND
};

// "key op value [and key op value ...]", ops == != < <= > >=. Values may be
// double-quoted to include spaces.
MetadataFilter parse_filter(std::string_view expr);

// Throws Error(type_mismatch) when an ordering op meets a non-numeric side.
bool matches(const RunRecord& r, const MetadataFilter& f);
std::vector<RunRecord> filter_records(std::span<const RunRecord> records, const MetadataFilter& f);

enum class BandStat { minmax, stddev };

std::string_view to_string(BandStat s);
std::optional<BandStat> parse_band_stat(std::string_view s);

struct AggregatedPoint {
    std::int64_t x = 0;
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::int64_t n = 0;
};

// Aggregates time per cycle over the ok members. Members must agree on nodes
// and dofs_total.
AggregatedPoint aggregate_ensemble(std::span<const RunRecord> members, std::int64_t x,
                                   BandStat stat = BandStat::minmax);
std::optional<AggregatedPoint> aggregate_point(const SeriesPoint& p, BandStat stat = BandStat::minmax);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct SeriesMetrics {
    std::vector<MetricSequence> sequences;
};

// Column order: platform, variant, problem, family, family_param, x, status,
// n, time_per_cycle_s, time_lo_s, time_hi_s, then baseline_x when any ratio
// metric is present, then one column per metric kind in enum order. Rows are
// sorted by (platform, x, variant, problem, family_param).
Table to_table(std::span<const Series> series, std::span<const SeriesMetrics> metrics,
               BandStat stat = BandStat::minmax);

// RFC 4180 quoting, CRLF-free (LF line endings).
std::string to_csv(const Table& t);

}  // namespace scaling
