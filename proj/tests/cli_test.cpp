#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "scalestudy/cli.hpp"
#include "scaling/ingest.hpp"
#include "scaling/serialization.hpp"
#include "test_support.hpp"

namespace scaling {
namespace {

namespace fs = std::filesystem;
using testing::ok_record;
using testing::svg_elements;

const fs::path kData = SCALING_DATA_DIR;

struct Invocation {
    int code = -1;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "scalestudy");
    std::ostringstream out, err;
    Invocation inv;
    inv.code = cli::run(args, out, err);
    inv.out = out.str();
    inv.err = err.str();
    return inv;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
    std::ofstream(p, std::ios::binary) << s;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) {
        if (!l.empty()) out.push_back(l);
    }
    return out;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("scalestudy_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path path(const std::string& name) const { return dir_ / name; }

    std::string write_records(const std::string& name, const std::vector<RunRecord>& recs) {
        spit(path(name), serialize_records(recs));
        return path(name).string();
    }

    fs::path dir_;
};

TEST_F(CliTest, PlanStrongWritesOneLinePerRun) {
    spit(path("spec.json"), R"({"study_id": "s", "kind": "strong", "platforms": ["CTS-1"], "doublings": 3,
        "base_elements": 1764, "dofs_per_element": 64, "cycles": 10, "command_template": "run -N {nodes}"})");
    const auto inv = invoke({"plan", "--spec", path("spec.json").string(), "--out", path("plan.jsonl").string()});
    ASSERT_EQ(inv.code, 0) << inv.err;
    EXPECT_TRUE(inv.out.empty());
    const auto runs = run_specs_from_json_lines(slurp(path("plan.jsonl")));
    ASSERT_EQ(runs.size(), 4u);
    EXPECT_EQ(runs[3].command, "run -N 8");
    EXPECT_NE(inv.err.find("4 run(s)"), std::string::npos);
}

TEST_F(CliTest, PlanWeakNodesColumn) {
    const auto inv = invoke({"plan", "--spec", (kData / "weak_study.json").string()});
    ASSERT_EQ(inv.code, 0) << inv.err;
    std::vector<std::int64_t> nodes;
    for (const auto& r : run_specs_from_json_lines(inv.out)) {
        if (r.platform == "CTS-1") nodes.push_back(r.nodes);
    }
    EXPECT_EQ(nodes, (std::vector<std::int64_t>{4, 32, 256, 2048}));
}

TEST_F(CliTest, MalformedSpecExitsOneAndWritesNothing) {
    spit(path("bad.json"), R"({"study_id": "s", "kind": "strong", )");
    const auto out = path("plan.jsonl");
    const auto inv = invoke({"plan", "--spec", path("bad.json").string(), "--out", out.string()});
    EXPECT_EQ(inv.code, 1);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_NE(inv.err.find("error:"), std::string::npos);

    spit(path("bad2.json"), R"({"study_id": "s", "kind": "strong", "platforms": [], "cycles": 0})");
    const auto inv2 = invoke({"plan", "--spec", path("bad2.json").string(), "--out", out.string()});
    EXPECT_EQ(inv2.code, 1);
    EXPECT_NE(inv2.err.find("cycles"), std::string::npos) << inv2.err;
    EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, UnknownSubcommandOrFlagIsUserError) {
    EXPECT_EQ(invoke({"frobnicate"}).code, 1);
    EXPECT_EQ(invoke({"plan", "--spec", "x", "--bogus"}).code, 1);
    EXPECT_EQ(invoke({"plan"}).code, 1);
    EXPECT_EQ(invoke({"plan", "--spec", path("missing.json").string()}).code, 1);
}

TEST_F(CliTest, SimulateRepeatsAndDeterminism) {
    spit(path("spec.json"), R"({"study_id": "s", "kind": "strong", "platforms": ["CTS-1"], "doublings": 3,
        "base_elements": 1764, "dofs_per_element": 64, "cycles": 10, "command_template": "run -N {nodes}"})");
    ASSERT_EQ(invoke({"plan", "--spec", path("spec.json").string(), "--out", path("plan.jsonl").string()}).code, 0);
    const auto a = invoke({"simulate", "--plan", path("plan.jsonl").string(), "--model",
                           (kData / "platforms.json").string(), "--repeats", "5"});
    ASSERT_EQ(a.code, 0) << a.err;
    const auto parsed = parse_records(a.out);
    EXPECT_TRUE(parsed.errors.empty());
    ASSERT_EQ(parsed.records.size(), 20u);
    std::set<std::int64_t> repeats;
    for (const auto& r : parsed.records) repeats.insert(r.repeat_index);
    EXPECT_EQ(repeats, (std::set<std::int64_t>{0, 1, 2, 3, 4}));

    const auto b = invoke({"simulate", "--plan", path("plan.jsonl").string(), "--model",
                           (kData / "platforms.json").string(), "--repeats", "5"});
    EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, SimulateLadderPastCapacityEndsInOom) {
    ASSERT_EQ(invoke({"plan", "--spec", (kData / "throughput_study.json").string(), "--out",
                      path("plan.jsonl").string()})
                  .code,
              0);
    const auto inv = invoke({"simulate", "--plan", path("plan.jsonl").string(), "--model",
                             (kData / "platforms.json").string()});
    ASSERT_EQ(inv.code, 0) << inv.err;
    const auto recs = parse_records(inv.out).records;
    std::vector<RunRecord> ats;
    for (const auto& r : recs) {
        if (r.platform == "ATS-2") ats.push_back(r);
    }
    ASSERT_FALSE(ats.empty());
    EXPECT_EQ(ats.back().status, RunStatus::oom);
    EXPECT_EQ(ats.front().status, RunStatus::ok);
    // once oom, always oom further up the ladder
    bool seen_oom = false;
    for (const auto& r : ats) {
        if (r.status == RunStatus::oom) seen_oom = true;
        if (seen_oom) EXPECT_EQ(r.status, RunStatus::oom);
    }
}

TEST_F(CliTest, SimulateUnknownPlatformModel) {
    spit(path("spec.json"), R"({"study_id": "s", "kind": "strong", "platforms": ["Nope"], "cycles": 1})");
    ASSERT_EQ(invoke({"plan", "--spec", path("spec.json").string(), "--out", path("plan.jsonl").string()}).code, 0);
    const auto inv = invoke({"simulate", "--plan", path("plan.jsonl").string(), "--model",
                             (kData / "platforms.json").string(), "--out", path("recs.jsonl").string()});
    EXPECT_EQ(inv.code, 1);
    EXPECT_FALSE(fs::exists(path("recs.jsonl")));
}

std::vector<RunRecord> fifteen_x_fixture() {
    std::vector<RunRecord> recs;
    for (std::int64_t n : {1, 2, 4, 8, 16, 32}) recs.push_back(ok_record("CTS-1", n, 30.0 / n));
    for (std::int64_t n : {1, 2, 4, 8, 16, 32}) recs.push_back(ok_record("Sierra", n, 2.0 / std::sqrt(n)));
    return recs;
}

TEST_F(CliTest, AnalyzeStrongSpeedupColumn) {
    const auto file = write_records("r.jsonl", fifteen_x_fixture());
    const auto inv = invoke({"analyze", "--records", file, "--family", "strong"});
    ASSERT_EQ(inv.code, 0) << inv.err;
    const auto rows = lines(inv.out);
    ASSERT_EQ(rows.size(), 13u);
    EXPECT_NE(rows[0].find("speedup"), std::string::npos);
    EXPECT_EQ(rows[1].substr(0, 6), "CTS-1,");
    EXPECT_EQ(rows[1].substr(rows[1].rfind(',') + 1), "1");
    EXPECT_EQ(rows[6].substr(rows[6].rfind(',') + 1), "32");
}

TEST_F(CliTest, AnalyzeFilter) {
    const auto file = write_records("r.jsonl", fifteen_x_fixture());
    const auto inv = invoke({"analyze", "--records", file, "--filter", "platform == CTS-1 and nodes >= 4"});
    ASSERT_EQ(inv.code, 0) << inv.err;
    const auto rows = lines(inv.out);
    ASSERT_EQ(rows.size(), 5u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i].substr(0, 6), "CTS-1,");

    EXPECT_EQ(invoke({"analyze", "--records", file, "--filter", "platform == Nope"}).code, 1);
    EXPECT_EQ(invoke({"analyze", "--records", file, "--filter", "platform =="}).code, 1);
}

TEST_F(CliTest, AnalyzeWeakSlowdownEndsAt149) {
    std::vector<RunRecord> recs;
    const std::vector<std::pair<std::int64_t, double>> pts{{4, 2.0}, {32, 2.4}, {256, 2.8}, {2048, 2.98}};
    for (auto [n, t] : pts) recs.push_back(ok_record("Astra", n, t, n * 28224));
    const auto file = write_records("w.jsonl", recs);
    const auto inv = invoke({"analyze", "--records", file, "--family", "weak"});
    ASSERT_EQ(inv.code, 0) << inv.err;
    const auto rows = lines(inv.out);
    ASSERT_EQ(rows.size(), 5u);
    const auto last = rows.back().substr(rows.back().rfind(',') + 1);
    EXPECT_NEAR(std::stod(last), 1.49, 0.005);
    EXPECT_EQ(rows[0].substr(rows[0].rfind(',') + 1), "slowdown");
}

TEST_F(CliTest, AnalyzeMergesFilesAndToleratesBadLines) {
    auto recs = fifteen_x_fixture();
    const std::vector<RunRecord> a(recs.begin(), recs.begin() + 6), b(recs.begin() + 6, recs.end());
    const auto fa = write_records("a.jsonl", a);
    spit(path("b.jsonl"), serialize_records(b) + "{not json}\n");
    const auto merged = invoke({"analyze", "--records", fa, path("b.jsonl").string()});
    ASSERT_EQ(merged.code, 0) << merged.err;
    EXPECT_EQ(lines(merged.out).size(), 13u);
    EXPECT_NE(merged.err.find("b.jsonl:7:"), std::string::npos) << merged.err;

    const auto strict = invoke({"analyze", "--records", fa, path("b.jsonl").string(), "--strict", "--out",
                                path("out.csv").string()});
    EXPECT_EQ(strict.code, 1);
    EXPECT_FALSE(fs::exists(path("out.csv")));

    const auto single = write_records("all.jsonl", recs);
    EXPECT_EQ(invoke({"analyze", "--records", single}).out, merged.out);
}

TEST_F(CliTest, ChartWeakAnnotate) {
    std::vector<RunRecord> recs;
    const std::vector<std::pair<std::int64_t, double>> pts{{4, 2.0}, {32, 2.4}, {256, 2.8}, {2048, 2.98}};
    for (auto [n, t] : pts) recs.push_back(ok_record("Astra", n, t, n * 28224));
    const auto file = write_records("w.jsonl", recs);
    const auto inv = invoke({"chart", "--records", file, "--kind", "weak", "--annotate", "--out",
                             path("w.svg").string()});
    ASSERT_EQ(inv.code, 0) << inv.err;
    EXPECT_EQ(svg_elements(slurp(path("w.svg")), "text", "annotation").size(), 4u);
}

TEST_F(CliTest, ChartStrongWeakOnPlannedGrid) {
    ASSERT_EQ(invoke({"plan", "--spec", (kData / "strong_weak_study.json").string(), "--out",
                      path("plan.jsonl").string()})
                  .code,
              0);
    ASSERT_EQ(invoke({"simulate", "--plan", path("plan.jsonl").string(), "--model",
                      (kData / "platforms.json").string(), "--out", path("r.jsonl").string()})
                  .code,
              0);
    const auto inv = invoke({"chart", "--records", path("r.jsonl").string(), "--kind", "strong-weak", "--ideal", "-1"});
    ASSERT_EQ(inv.code, 0) << inv.err;
    std::size_t solid = 0, dashed = 0;
    for (const auto& l : svg_elements(inv.out, "polyline", "series-line")) (l.count("stroke-dasharray") ? dashed : solid)++;
    EXPECT_EQ(solid, 3u);
    EXPECT_GE(dashed, 2u);
}

TEST_F(CliTest, ChartThroughputOomGlyph) {
    ASSERT_EQ(invoke({"plan", "--spec", (kData / "throughput_study.json").string(), "--out",
                      path("plan.jsonl").string()})
                  .code,
              0);
    ASSERT_EQ(invoke({"simulate", "--plan", path("plan.jsonl").string(), "--model",
                      (kData / "platforms.json").string(), "--repeats", "3", "--out", path("r.jsonl").string()})
                  .code,
              0);
    const auto inv = invoke({"chart", "--records", path("r.jsonl").string(), "--kind", "throughput"});
    ASSERT_EQ(inv.code, 0) << inv.err;
    EXPECT_EQ(svg_elements(inv.out, "g", "oom-glyph").size(), 2u);
    EXPECT_EQ(svg_elements(inv.out, "path", "band").size(), 2u);

    const auto csv = invoke({"analyze", "--records", path("r.jsonl").string(), "--family", "throughput"});
    ASSERT_EQ(csv.code, 0) << csv.err;
    EXPECT_NE(csv.err.find("saturation at"), std::string::npos);
}

TEST_F(CliTest, ChartEmptySelectionFails) {
    auto r = ok_record("A", 1, 1.0);
    r.status = RunStatus::failed;
    const auto file = write_records("f.jsonl", {r});
    const auto inv = invoke({"chart", "--records", file, "--out", path("x.svg").string()});
    EXPECT_EQ(inv.code, 1);
    EXPECT_FALSE(fs::exists(path("x.svg")));
    EXPECT_EQ(invoke({"chart", "--records", file, "--kind", "pie"}).code, 1);
}

TEST_F(CliTest, HelpSucceeds) {
    const auto inv = invoke({"--help"});
    EXPECT_EQ(inv.code, 0);
    EXPECT_NE(inv.out.find("simulate"), std::string::npos);
}

}  // namespace
}  // namespace scaling
