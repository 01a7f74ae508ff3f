#include "scaling/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "scaling/metrics.hpp"
#include "scaling/serialization.hpp"

namespace scaling {

namespace {

bool is_blank(std::string_view line) { return line.find_first_not_of(" \t\r") == std::string_view::npos; }

std::optional<double> parse_number(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::string> field_value(const RunRecord& r, std::string_view key) {
    auto num = [](auto v) { return fmt::format("{}", v); };
    if (key == "study_id") return r.study_id;
    if (key == "platform") return r.platform;
    if (key == "variant") return r.variant;
    if (key == "problem") return r.problem;
    if (key == "nodes") return num(r.nodes);
    if (key == "cycles") return num(r.cycles);
    if (key == "dofs_total") return num(r.dofs_total);
    if (key == "repeat_index") return num(r.repeat_index);
    if (key == "status") return std::string(to_string(r.status));
    if (key == "ranks_per_node") return r.ranks_per_node ? std::optional(num(*r.ranks_per_node)) : std::nullopt;
    if (key == "refinement_level") {
        return r.refinement_level ? std::optional(num(*r.refinement_level)) : std::nullopt;
    }
    if (key == "wall_time_s") return r.wall_time_s ? std::optional(num(*r.wall_time_s)) : std::nullopt;
    auto it = r.metadata.find(std::string(key));
    if (it == r.metadata.end()) return std::nullopt;
    return it->second;
}

template <typename T>
bool compare(const T& lhs, CompareOp op, const T& rhs) {
    switch (op) {
        case CompareOp::eq: return lhs == rhs;
        case CompareOp::ne: return lhs != rhs;
        case CompareOp::lt: return lhs < rhs;
        case CompareOp::le: return lhs <= rhs;
        case CompareOp::gt: return lhs > rhs;
        case CompareOp::ge: return lhs >= rhs;
    }
    return false;
}

std::optional<CompareOp> parse_op(std::string_view s) {
    if (s == "==") return CompareOp::eq;
    if (s == "!=") return CompareOp::ne;
    if (s == "<") return CompareOp::lt;
    if (s == "<=") return CompareOp::le;
    if (s == ">") return CompareOp::gt;
    if (s == ">=") return CompareOp::ge;
    return std::nullopt;
}

struct Token {
    std::string text;
    bool quoted = false;
    bool op = false;
};

bool is_op_char(char c) { return c == '=' || c == '!' || c == '<' || c == '>'; }

std::vector<Token> tokenize(std::string_view expr) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < expr.size()) {
        const char c = expr[i];
        if (c == ' ' || c == '\t') {
            ++i;
        } else if (c == '"') {
            Token t{"", true, false};
            ++i;
            bool closed = false;
            while (i < expr.size()) {
                if (expr[i] == '\\' && i + 1 < expr.size()) {
                    t.text.push_back(expr[i + 1]);
                    i += 2;
                } else if (expr[i] == '"') {
                    closed = true;
                    ++i;
                    break;
                } else {
                    t.text.push_back(expr[i++]);
                }
            }
            if (!closed) throw Error(ErrorCode::parse_error, "filter: unterminated quoted value");
            out.push_back(std::move(t));
        } else if (is_op_char(c)) {
            std::size_t len = (i + 1 < expr.size() && expr[i + 1] == '=') ? 2 : 1;
            out.push_back({std::string(expr.substr(i, len)), false, true});
            i += len;
        } else {
            const auto start = i;
            while (i < expr.size() && expr[i] != ' ' && expr[i] != '\t' && expr[i] != '"' && !is_op_char(expr[i])) {
                ++i;
            }
            out.push_back({std::string(expr.substr(start, i - start)), false, false});
        }
    }
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string fmt_real(double v) { return fmt::format("{}", v); }

}  // namespace

ParseResult parse_records(std::istream& in) {
    ParseResult out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        try {
            out.records.push_back(validate_record(record_from_json(line)));
        } catch (const Error& e) {
            out.errors.push_back({line_no, e.what()});
        }
    }
    if (in.bad()) throw Error(ErrorCode::io_error, "failed to read record stream");
    return out;
}

ParseResult parse_records(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_records(in);
}

std::string serialize_records(std::span<const RunRecord> records) {
    std::string out;
    for (const auto& r : records) {
        out += to_json_line(r);
        out += '\n';
    }
    return out;
}

void sort_records(std::vector<RunRecord>& records) {
    std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.study_id, a.platform, a.variant, a.problem, a.nodes, a.dofs_total, a.repeat_index) <
               std::tie(b.study_id, b.platform, b.variant, b.problem, b.nodes, b.dofs_total, b.repeat_index);
    });
}

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::eq: return "==";
        case CompareOp::ne: return "!=";
        case CompareOp::lt: return "<";
        case CompareOp::le: return "<=";
        case CompareOp::gt: return ">";
        case CompareOp::ge: return ">=";
    }
    return "==";
}

MetadataFilter parse_filter(std::string_view expr) {
    const auto tokens = tokenize(expr);
    MetadataFilter f;
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (i + 2 >= tokens.size()) {
            throw Error(ErrorCode::parse_error, fmt::format("filter: incomplete clause near '{}'", tokens[i].text));
        }
        const auto& key = tokens[i];
        const auto& op = tokens[i + 1];
        const auto& value = tokens[i + 2];
        if (key.op || key.quoted || key.text.empty()) {
            throw Error(ErrorCode::parse_error, fmt::format("filter: expected a key, found '{}'", key.text));
        }
        auto parsed = op.op ? parse_op(op.text) : std::nullopt;
        if (!parsed) {
            throw Error(ErrorCode::parse_error,
                        fmt::format("filter: expected one of == != < <= > >= after '{}', found '{}'", key.text,
                                    op.text));
        }
        if (value.op) throw Error(ErrorCode::parse_error, fmt::format("filter: missing value after '{}'", op.text));
        f.clauses.push_back({key.text, *parsed, value.text});
        i += 3;
        if (i < tokens.size()) {
            if (tokens[i].quoted || tokens[i].text != "and") {
                throw Error(ErrorCode::parse_error,
                            fmt::format("filter: expected 'and' between clauses, found '{}'", tokens[i].text));
            }
            ++i;
            if (i == tokens.size()) throw Error(ErrorCode::parse_error, "filter: dangling 'and'");
        }
    }
    return f;
}

bool matches(const RunRecord& r, const MetadataFilter& f) {
    for (const auto& c : f.clauses) {
        const auto lhs = field_value(r, c.key);
        if (!lhs) return false;
        const auto ln = parse_number(*lhs);
        const auto rn = parse_number(c.value);
        const bool ordering = c.op != CompareOp::eq && c.op != CompareOp::ne;
        bool ok = false;
        if (ln && rn) {
            ok = compare(*ln, c.op, *rn);
        } else if (ordering) {
            throw Error(ErrorCode::type_mismatch,
                        fmt::format("filter: '{} {} {}' needs numeric operands, record has '{}'", c.key,
                                    to_string(c.op), c.value, *lhs));
        } else {
            ok = compare(*lhs, c.op, c.value);
        }
        if (!ok) return false;
    }
    return true;
}

std::vector<RunRecord> filter_records(std::span<const RunRecord> records, const MetadataFilter& f) {
    std::vector<RunRecord> out;
    for (const auto& r : records) {
        if (matches(r, f)) out.push_back(r);
    }
    return out;
}

std::string_view to_string(BandStat s) { return s == BandStat::minmax ? "minmax" : "stddev"; }

std::optional<BandStat> parse_band_stat(std::string_view s) {
    if (s == "minmax") return BandStat::minmax;
    if (s == "stddev") return BandStat::stddev;
    return std::nullopt;
}

AggregatedPoint aggregate_ensemble(std::span<const RunRecord> members, std::int64_t x, BandStat stat) {
    std::vector<double> times;
    const RunRecord* first = nullptr;
    for (const auto& r : members) {
        if (r.status != RunStatus::ok) continue;
        if (first == nullptr) {
            first = &r;
        } else if (r.nodes != first->nodes || r.dofs_total != first->dofs_total) {
            throw Error(ErrorCode::inconsistent_ensemble,
                        fmt::format("ensemble at x={} mixes (nodes {}, dofs {}) with (nodes {}, dofs {})", x,
                                    first->nodes, first->dofs_total, r.nodes, r.dofs_total));
        }
        times.push_back(time_per_cycle(r));
    }
    if (times.empty()) throw Error(ErrorCode::empty_ensemble, fmt::format("no ok runs at x={}", x));
    std::sort(times.begin(), times.end());

    AggregatedPoint p;
    p.x = x;
    p.n = static_cast<std::int64_t>(times.size());
    p.mean = *mean_time_per_cycle(members);
    if (stat == BandStat::minmax || times.size() == 1) {
        p.lo = times.front();
        p.hi = times.back();
        if (times.size() == 1) p.lo = p.hi = p.mean;
        return p;
    }
    double ss = 0.0;
    for (const double t : times) ss += (t - p.mean) * (t - p.mean);
    const double sd = std::sqrt(ss / static_cast<double>(times.size() - 1));
    p.lo = std::max(p.mean - sd, times.front());
    p.hi = p.mean + sd;
    return p;
}

std::optional<AggregatedPoint> aggregate_point(const SeriesPoint& p, BandStat stat) {
    if (!p.has_ok()) return std::nullopt;
    return aggregate_ensemble(p.members, p.x, stat);
}

Table to_table(std::span<const Series> series, std::span<const SeriesMetrics> metrics, BandStat stat) {
    std::set<MetricKind> kinds;
    for (const auto& m : metrics) {
        for (const auto& seq : m.sequences) {
            if (seq.kind != MetricKind::time_per_cycle_s) kinds.insert(seq.kind);
        }
    }
    const bool has_ratio = kinds.count(MetricKind::speedup) || kinds.count(MetricKind::efficiency) ||
                           kinds.count(MetricKind::slowdown);

    Table t;
    t.header = {"platform", "variant", "problem",       "family",    "family_param", "x",
                "status",   "n",       "time_per_cycle_s", "time_lo_s", "time_hi_s"};
    if (has_ratio) t.header.emplace_back("baseline_x");
    for (const auto k : kinds) t.header.emplace_back(to_string(k));

    struct Row {
        const SeriesKey* key;
        std::int64_t x;
        std::vector<std::string> cells;
    };
    std::vector<Row> rows;
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const SeriesMetrics* sm = si < metrics.size() ? &metrics[si] : nullptr;
        std::int64_t baseline = 0;
        if (sm) {
            for (const auto& seq : sm->sequences) {
                if (seq.baseline_x != 0) {
                    baseline = seq.baseline_x;
                    break;
                }
            }
        }
        for (const auto& p : s.points) {
            std::vector<std::string> cells{s.key.platform,
                                           s.key.variant,
                                           s.key.problem,
                                           std::string(to_string(s.key.family)),
                                           std::to_string(s.key.family_param),
                                           std::to_string(p.x)};
            const auto agg = aggregate_point(p, stat);
            if (agg) {
                cells.insert(cells.end(), {"ok", std::to_string(agg->n), fmt_real(agg->mean), fmt_real(agg->lo),
                                           fmt_real(agg->hi)});
            } else {
                cells.insert(cells.end(), {std::string(p.has_oom() ? "oom" : "failed"), "0", "", "", ""});
            }
            if (has_ratio) cells.push_back(baseline != 0 ? std::to_string(baseline) : "");
            for (const auto k : kinds) {
                std::optional<double> v;
                if (sm && agg) {
                    for (const auto& seq : sm->sequences) {
                        if (seq.kind == k) v = seq.at(p.x);
                    }
                }
                cells.push_back(v ? fmt_real(*v) : "");
            }
            rows.push_back({&s.key, p.x, std::move(cells)});
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.key->platform, a.x, a.key->variant, a.key->problem, a.key->family_param) <
               std::tie(b.key->platform, b.x, b.key->variant, b.key->problem, b.key->family_param);
    });
    for (auto& r : rows) t.rows.push_back(std::move(r.cells));
    return t;
}

std::string to_csv(const Table& t) {
    std::string out;
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cells[i]);
        }
        out += '\n';
    };
    emit(t.header);
    for (const auto& r : t.rows) emit(r);
    return out;
}

}  // namespace scaling
