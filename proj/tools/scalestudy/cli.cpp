#include "scalestudy/cli.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "scaling/charts.hpp"
#include "scaling/ingest.hpp"
#include "scaling/metrics.hpp"
#include "scaling/planner.hpp"
#include "scaling/serialization.hpp"
#include "scaling/synthmodel.hpp"

namespace scaling::cli {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, fmt::format("cannot open '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::io_error, fmt::format("failed reading '{}'", path));
    return ss.str();
}

// Writes through a sibling temporary so a failed run never leaves a partial
// file at `path`.
void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::io_error, fmt::format("cannot write '{}'", tmp.string()));
        f << content;
        if (!f) throw Error(ErrorCode::io_error, fmt::format("failed writing '{}'", tmp.string()));
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::io_error, fmt::format("cannot move output into '{}'", path));
    }
}

struct LoadOptions {
    std::vector<std::string> files;
    std::string filter;
    bool strict = false;
};

// Parses every file concurrently, then merges in file order and sorts so the
// result is independent of scheduling.
std::vector<RunRecord> load_records(const LoadOptions& opts, std::ostream& err) {
    std::vector<std::future<ParseResult>> jobs;
    for (const auto& file : opts.files) {
        jobs.push_back(std::async(std::launch::async, [file] {
            std::ifstream in(file, std::ios::binary);
            if (!in) throw Error(ErrorCode::io_error, fmt::format("cannot open '{}'", file));
            return parse_records(in);
        }));
    }
    std::vector<RunRecord> records;
    std::size_t error_count = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto result = jobs[i].get();
        for (const auto& e : result.errors) err << fmt::format("{}:{}: {}\n", opts.files[i], e.line, e.reason);
        error_count += result.errors.size();
        records.insert(records.end(), std::make_move_iterator(result.records.begin()),
                       std::make_move_iterator(result.records.end()));
    }
    if (error_count > 0 && opts.strict) {
        throw Error(ErrorCode::parse_error, fmt::format("{} malformed record line(s) with --strict", error_count));
    }
    if (records.empty()) throw Error(ErrorCode::parse_error, "no valid records in input");
    sort_records(records);
    if (!opts.filter.empty()) {
        records = filter_records(records, parse_filter(opts.filter));
        if (records.empty()) throw Error(ErrorCode::parse_error, "filter selected no records");
    }
    return records;
}

int cmd_plan(const std::string& spec_path, const std::string& out_path, std::ostream& out, std::ostream& err) {
    const auto spec = study_spec_from_json(read_file(spec_path));
    const auto runs = plan(spec);
    std::string body;
    for (const auto& r : runs) body += to_json_line(r) + "\n";
    write_output(out_path, body, out);
    err << fmt::format("planned {} run(s) for study '{}' ({}) across {} platform(s)\n", runs.size(), spec.study_id,
                       to_string(spec.kind), spec.platforms.size());
    return kSuccess;
}

int cmd_simulate(const std::string& plan_path, const std::string& model_path, int repeats,
                 const std::string& out_path, std::ostream& out, std::ostream& err) {
    if (repeats < 1) throw Error(ErrorCode::invalid_spec, "--repeats must be >= 1");
    const auto runs = run_specs_from_json_lines(read_file(plan_path));
    const auto models = models_from_json(read_file(model_path));
    for (const auto& m : models) validate_model(m);
    std::string body;
    std::size_t oom = 0;
    for (const auto& run : runs) {
        auto it = std::find_if(models.begin(), models.end(), [&](const PlatformModel& m) { return m.name == run.platform; });
        if (it == models.end()) {
            throw Error(ErrorCode::invalid_model, fmt::format("no platform model named '{}'", run.platform));
        }
        for (int k = 0; k < repeats; ++k) {
            const auto rec = simulate_run(*it, run, k);
            oom += rec.status == RunStatus::oom ? 1 : 0;
            body += to_json_line(rec) + "\n";
        }
    }
    write_output(out_path, body, out);
    err << fmt::format("simulated {} record(s), {} oom\n", runs.size() * static_cast<std::size_t>(repeats), oom);
    return kSuccess;
}

int cmd_analyze(const LoadOptions& load, const std::string& family_name, const std::string& stat_name,
                double threshold, const std::string& out_path, std::ostream& out, std::ostream& err) {
    const auto family = parse_family(family_name);
    if (!family) throw Error(ErrorCode::invalid_spec, fmt::format("unknown family '{}'", family_name));
    const auto stat = parse_band_stat(stat_name);
    if (!stat) throw Error(ErrorCode::invalid_spec, fmt::format("unknown statistic '{}'", stat_name));

    const auto records = load_records(load, err);
    const auto grouping = group_series(records, *family);
    if (!grouping.excluded.empty()) {
        err << fmt::format("excluded {} failed record(s)\n", grouping.excluded.size());
    }
    std::vector<SeriesMetrics> metrics;
    for (const auto& s : grouping.series) {
        SeriesMetrics m;
        const bool has_ok = std::any_of(s.points.begin(), s.points.end(), [](const auto& p) { return p.has_ok(); });
        if (has_ok) {
            switch (*family) {
                case Family::strong: m.sequences.push_back(strong_speedup(s)); break;
                case Family::weak: {
                    auto w = weak_efficiency(s);
                    m.sequences.push_back(std::move(w.efficiency));
                    m.sequences.push_back(std::move(w.slowdown));
                    break;
                }
                case Family::throughput: {
                    m.sequences.push_back(throughput_curve(s));
                    if (m.sequences.back().points.size() >= 2) {
                        const auto sat = detect_saturation(s, threshold);
                        err << fmt::format("{}: saturation at {} DOF ({} of peak){}\n", describe(s.key), sat.dofs,
                                           sat.fraction_of_peak, sat.saturated ? "" : ", not yet saturated");
                    }
                    break;
                }
            }
        }
        metrics.push_back(std::move(m));
    }
    const auto table = to_table(grouping.series, metrics, *stat);
    write_output(out_path, to_csv(table), out);
    err << fmt::format("{} row(s) from {} series\n", table.rows.size(), grouping.series.size());
    return kSuccess;
}

int cmd_chart(const LoadOptions& load, const std::string& kind_name, const ChartOptions& opts,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
    const auto kind = parse_chart_kind(kind_name);
    if (!kind) throw Error(ErrorCode::invalid_spec, fmt::format("unknown chart kind '{}'", kind_name));
    const auto records = load_records(load, err);
    const auto spec = build_chart(*kind, records, opts);
    write_output(out_path, render_chart(spec), out);
    err << fmt::format("rendered {} chart with {} series\n", to_string(*kind), spec.series.size());
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Plan, simulate, analyze and chart node-to-node scaling studies", "scalestudy"};
    app.require_subcommand(1);

    std::string spec_path, plan_path, model_path, out_path, family = "strong", stat = "minmax", kind = "strong";
    int repeats = 1;
    double threshold = 0.9;
    LoadOptions load;
    ChartOptions chart_opts;
    std::optional<double> ideal;

    auto* plan_cmd = app.add_subcommand("plan", "Expand a study spec into a run plan (JSON lines)");
    plan_cmd->add_option("--spec", spec_path, "Study spec JSON file")->required();
    plan_cmd->add_option("--out", out_path, "Output file (default: stdout)");

    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a run plan with synthetic platform models");
    sim_cmd->add_option("--plan", plan_path, "Run plan JSON-lines file")->required();
    sim_cmd->add_option("--model", model_path, "Platform model JSON file")->required();
    sim_cmd->add_option("--repeats", repeats, "Ensemble size per run")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--out", out_path, "Output file (default: stdout)");

    auto add_load = [&](CLI::App* cmd) {
        cmd->add_option("--records", load.files, "Run-record JSON-lines files")->required();
        cmd->add_option("--filter", load.filter, "Filter, e.g. \"platform == CTS-1 and nodes >= 4\"");
        cmd->add_flag("--strict", load.strict, "Fail on any malformed record line");
        cmd->add_option("--stat", stat, "Ensemble band statistic: minmax or stddev");
        cmd->add_option("--out", out_path, "Output file (default: stdout)");
    };
    auto* analyze_cmd = app.add_subcommand("analyze", "Tabulate scaling metrics as CSV");
    add_load(analyze_cmd);
    analyze_cmd->add_option("--family", family, "strong, weak or throughput");
    analyze_cmd->add_option("--threshold", threshold, "Saturation threshold as a fraction of peak");

    auto* chart_cmd = app.add_subcommand("chart", "Render a scaling chart as SVG");
    add_load(chart_cmd);
    chart_cmd->add_option("--kind", kind, "strong, weak, strong-weak or throughput");
    chart_cmd->add_flag("--annotate", chart_opts.annotate, "Print slowdown beside weak-scaling points");
    chart_cmd->add_option("--ideal", ideal, "Draw an ideal line of this log-log slope per series");
    chart_cmd->add_option("--title", chart_opts.title, "Chart title");
    chart_cmd->add_option("--width", chart_opts.width_px, "Width in pixels")->check(CLI::Range(200, 10000));
    chart_cmd->add_option("--height", chart_opts.height_px, "Height in pixels")->check(CLI::Range(150, 10000));

    std::vector<std::string> argv_tail(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(argv_tail.begin(), argv_tail.end());
    try {
        app.parse(argv_tail);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUserError;
    }

    try {
        if (*plan_cmd) return cmd_plan(spec_path, out_path, out, err);
        if (*sim_cmd) return cmd_simulate(plan_path, model_path, repeats, out_path, out, err);
        const auto band = parse_band_stat(stat);
        if (!band) throw Error(ErrorCode::invalid_spec, fmt::format("unknown statistic '{}'", stat));
        chart_opts.stat = *band;
        chart_opts.ideal_slope = ideal;
        if (*analyze_cmd) return cmd_analyze(load, family, stat, threshold, out_path, out, err);
        if (*chart_cmd) return cmd_chart(load, kind, chart_opts, out_path, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUserError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    }
    return kInternalError;
}

}  // namespace scaling::cli
