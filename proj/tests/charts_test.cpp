#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "scaling/charts.hpp"
#include "test_support.hpp"

namespace scaling {
namespace {

using testing::count_substr;
using testing::ok_record;
using testing::svg_elements;

std::vector<double> tick_values(const std::vector<Tick>& ticks) {
    std::vector<double> out;
    for (const auto& t : ticks) out.push_back(t.value);
    return out;
}

TEST(LogAxis, PowersOfTwoEvenlySpaced) {
    const auto ticks = layout_log_axis(1, 8, 2, 300);
    ASSERT_EQ(ticks.size(), 4u);
    EXPECT_EQ(tick_values(ticks), (std::vector<double>{1, 2, 4, 8}));
    for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(ticks[i].pixel, 100.0 * i);
}

TEST(LogAxis, SingleValueIsBracketed) {
    EXPECT_EQ(tick_values(layout_log_axis(3, 3, 2, 100)), (std::vector<double>{2, 4}));
    EXPECT_EQ(tick_values(layout_log_axis(4, 4, 2, 100)), (std::vector<double>{2, 4, 8}));
}

TEST(LogAxis, NonPositiveRejected) {
    try {
        layout_log_axis(0, 8, 2, 100);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::non_positive_value);
    }
}

TEST(LogAxis, DecadesForThroughput) {
    const auto ticks = layout_log_axis(1e4, 1e8, 10, 400);
    EXPECT_EQ(ticks.size(), 5u);
    for (std::size_t i = 0; i < ticks.size(); ++i) {
        EXPECT_NEAR(ticks[i].value, std::pow(10.0, 4 + i), 1e-6 * ticks[i].value);
        EXPECT_DOUBLE_EQ(ticks[i].pixel, 100.0 * i);
    }
    EXPECT_EQ(tick_values(layout_log_axis(2e4, 3e7, 10, 400)).size(), 5u);
}

TEST(FormatRatio, TwoDecimalsTrimmed) {
    EXPECT_EQ(format_ratio(1.0), "1.0");
    EXPECT_EQ(format_ratio(1.2), "1.2");
    EXPECT_EQ(format_ratio(2.98 / 2.0), "1.49");
    EXPECT_EQ(format_ratio(1.8), "1.8");
    EXPECT_EQ(format_ratio(1.456), "1.46");
    EXPECT_EQ(format_ratio(12.5), "12.5");
}

std::vector<RunRecord> strong_records() {
    std::vector<RunRecord> recs;
    for (std::int64_t n : {1, 2, 4, 8}) recs.push_back(ok_record("CTS-1", n, 16.0 / n * (1 + 0.05 * n)));
    for (std::int64_t n : {1, 2, 4, 8}) recs.push_back(ok_record("Sierra", n, 1.5 / std::sqrt(n)));
    return recs;
}

TEST(RenderChart, StrongTicksAndMarkers) {
    ChartOptions opts;
    opts.ideal_slope = -1.0;
    const auto svg = render_chart(build_chart(ChartKind::strong, strong_records(), opts));
    std::set<std::string> x_ticks;
    for (const auto& t : svg_elements(svg, "text", "tick-label")) {
        if (t.at("data-axis") == "x") x_ticks.insert(t.at("data-value"));
    }
    EXPECT_EQ(x_ticks, (std::set<std::string>{"1", "2", "4", "8"}));
    EXPECT_EQ(svg_elements(svg, "circle", "marker").size(), 8u);
    EXPECT_EQ(svg_elements(svg, "line", "ideal-line").size(), 2u);
    EXPECT_EQ(svg_elements(svg, "g", "legend-entry").size(), 2u);
    EXPECT_NE(svg.find("Number of compute nodes"), std::string::npos);
    EXPECT_NE(svg.find("Time per cycle (s)"), std::string::npos);
}

TEST(RenderChart, IdealLinePassesThroughClosedFormPoint) {
    std::vector<RunRecord> recs;
    for (std::int64_t n : {1, 2, 4, 8}) recs.push_back(ok_record("A", n, n == 1 ? 16.0 : 20.0 / n));
    ChartOptions opts;
    opts.ideal_slope = -1.0;
    const auto svg = render_chart(build_chart(ChartKind::strong, recs, opts));
    const auto line = svg_elements(svg, "line", "ideal-line").at(0);

    // pixel of (8, 2 s) from the rendered axes
    double px8 = NAN, py2 = NAN;
    const auto grid = svg_elements(svg, "line", "gridline");
    double y_lo_px = 0, y_hi_px = 0, y_lo_v = 0, y_hi_v = 0;
    bool first = true;
    for (const auto& g : grid) {
        if (g.at("data-axis") == "x" && g.at("data-value") == "8") px8 = std::stod(g.at("x1"));
        if (g.at("data-axis") == "y") {
            const double v = std::stod(g.at("data-value"));
            const double p = std::stod(g.at("y1"));
            if (first || v < y_lo_v) y_lo_v = v, y_lo_px = p;
            if (first || v > y_hi_v) y_hi_v = v, y_hi_px = p;
            first = false;
        }
    }
    py2 = y_lo_px + (std::log2(2.0) - std::log2(y_lo_v)) / (std::log2(y_hi_v) - std::log2(y_lo_v)) * (y_hi_px - y_lo_px);
    EXPECT_NEAR(std::stod(line.at("x2")), px8, 0.5);
    EXPECT_NEAR(std::stod(line.at("y2")), py2, 0.5);
}

TEST(RenderChart, WeakAnnotations) {
    std::vector<RunRecord> recs;
    const std::vector<std::pair<std::int64_t, double>> pts{{4, 2.0}, {32, 2.4}, {256, 2.8}, {2048, 2.98}};
    for (auto [n, t] : pts) recs.push_back(ok_record("Astra", n, t, n * 28224));
    ChartOptions opts;
    opts.annotate = true;
    const auto svg = render_chart(build_chart(ChartKind::weak, recs, opts));
    std::vector<std::string> labels;
    for (const auto& a : svg_elements(svg, "text", "annotation")) labels.push_back(a.at("data-x"));
    EXPECT_EQ(labels.size(), 4u);
    for (const auto* text : {">1.0<", ">1.2<", ">1.4<", ">1.49<"}) EXPECT_NE(svg.find(text), std::string::npos) << text;

    opts.annotate = false;
    EXPECT_TRUE(svg_elements(render_chart(build_chart(ChartKind::weak, recs, opts)), "text", "annotation").empty());
}

TEST(RenderChart, ThroughputDecadesAndOomGlyph) {
    std::vector<RunRecord> recs;
    for (std::int64_t d = 10'000; d <= 100'000'000; d *= 10) recs.push_back(ok_record("EAS-3", 1, d / 1e6, d, 1));
    auto oom = ok_record("EAS-3", 1, 1.0, 1'000'000'000, 1);
    oom.status = RunStatus::oom;
    oom.wall_time_s.reset();
    recs.push_back(oom);
    const auto svg = render_chart(build_chart(ChartKind::throughput, recs, {}));
    std::vector<double> exps;
    for (const auto& t : svg_elements(svg, "text", "tick-label")) {
        if (t.at("data-axis") == "x") exps.push_back(std::log10(std::stod(t.at("data-value"))));
    }
    ASSERT_EQ(exps.size(), 5u);
    for (std::size_t i = 0; i < exps.size(); ++i) EXPECT_NEAR(exps[i], 4.0 + i, 1e-9);
    const auto glyphs = svg_elements(svg, "g", "oom-glyph");
    ASSERT_EQ(glyphs.size(), 1u);
    EXPECT_EQ(glyphs[0].at("data-x"), "100000000");
    EXPECT_EQ(svg_elements(svg, "circle", "marker").size(), 5u);
    EXPECT_NE(svg.find("Degrees of freedom"), std::string::npos);
}

TEST(RenderChart, StrongWeakSolidAndDashedFamilies) {
    std::vector<RunRecord> recs;
    for (int r = 0; r <= 2; ++r) {
        for (int j = 0; j <= 3; ++j) {
            const std::int64_t n = std::int64_t{1} << j;
            const std::int64_t dofs = 1'000'000LL << (3 * r);
            recs.push_back(ok_record("A", n, static_cast<double>(dofs) / n / 1e6, dofs));
        }
    }
    const auto svg = render_chart(build_chart(ChartKind::strong_weak, recs, {}));
    std::size_t solid = 0, dashed = 0;
    for (const auto& l : svg_elements(svg, "polyline", "series-line")) {
        if (l.count("stroke-dasharray")) {
            EXPECT_EQ(l.at("stroke-dasharray"), "6,4");
            ++dashed;
        } else {
            ++solid;
        }
    }
    EXPECT_EQ(solid, 3u);
    EXPECT_GE(dashed, 1u);
    EXPECT_EQ(svg_elements(svg, "circle", "marker").size(), 12u);
}

TEST(RenderChart, EnsembleBand) {
    std::vector<RunRecord> recs;
    for (std::int64_t n : {1, 2, 4}) {
        for (int k = 0; k < 5; ++k) {
            auto r = ok_record("A", n, (8.0 / n) * (0.9 + 0.05 * k));
            r.repeat_index = k;
            recs.push_back(r);
        }
    }
    const auto svg = render_chart(build_chart(ChartKind::strong, recs, {}));
    EXPECT_EQ(svg_elements(svg, "path", "band").size(), 1u);
    EXPECT_EQ(svg_elements(svg, "circle", "marker").size(), 3u);
}

TEST(RenderChart, Errors) {
    ChartSpec empty;
    try {
        render_chart(empty);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::empty_chart);
    }
    ChartSpec bad;
    bad.series.push_back({"s", {}, {{1, -1, 0, 0, std::nullopt}}, {"#000", ""}});
    try {
        render_chart(bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::non_positive_value);
    }
    auto failed = ok_record("A", 1, 1.0);
    failed.status = RunStatus::failed;
    std::vector<RunRecord> recs{failed};
    EXPECT_THROW(build_chart(ChartKind::strong, recs, {}), Error);
}

TEST(RenderChart, Deterministic) {
    ChartOptions opts;
    opts.ideal_slope = -1.0;
    const auto recs = strong_records();
    EXPECT_EQ(render_chart(build_chart(ChartKind::strong, recs, opts)),
              render_chart(build_chart(ChartKind::strong, recs, opts)));
}

TEST(RenderChart, XmlEscaping) {
    ChartOptions opts;
    opts.title = "a < b & c";
    const auto svg = render_chart(build_chart(ChartKind::strong, strong_records(), opts));
    EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
    EXPECT_EQ(count_substr(svg, "<svg "), 1u);
}

}  // namespace
}  // namespace scaling
