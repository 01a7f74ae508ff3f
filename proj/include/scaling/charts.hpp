#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scaling/ingest.hpp"
#include "scaling/study_model.hpp"

namespace scaling {

enum class ChartKind { strong, weak, strong_weak, throughput };

std::string_view to_string(ChartKind k);
std::optional<ChartKind> parse_chart_kind(std::string_view s);

struct Tick {
    double value = 0.0;
    double pixel = 0.0;
    int exponent = 0;
};

// A logarithmic axis covering [base^min_exp, base^max_exp] over pixel_span
// pixels, pixel 0 at the low end.
struct LogAxis {
    int base = 2;
    int min_exp = 0;
    int max_exp = 1;
    double pixel_span = 1.0;

    [[nodiscard]] double pixel(double value) const;
    [[nodiscard]] std::vector<Tick> ticks() const;
};

LogAxis make_log_axis(double min_v, double max_v, int base, int pixel_span);
std::vector<Tick> layout_log_axis(double min_v, double max_v, int base, int pixel_span);

struct LineStyle {
    std::string color;
    std::string dash;  // empty: solid

    bool operator==(const LineStyle&) const = default;
};

struct ChartPoint {
    double x = 0.0;
    double y = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::optional<double> slowdown;
};

struct ChartSeries {
    std::string label;
    SeriesKey key;
    std::vector<ChartPoint> points;  // ascending x
    LineStyle style;
    bool markers = true;
    bool band = false;
    bool ends_in_oom = false;
};

struct IdealRequest {
    SeriesKey key;
    double slope = -1.0;
};

enum class Annotations { none, inverse_weak_efficiency };

struct ChartSpec {
    ChartKind kind = ChartKind::strong;
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<ChartSeries> series;
    std::vector<IdealRequest> show_ideal;
    Annotations annotations = Annotations::none;
    int width_px = 800;
    int height_px = 560;
};

// Deterministic standalone SVG 1.1 document.
std::string render_chart(const ChartSpec& spec);

// Formats a ratio with at most two decimals, keeping at least one
// ("1.0", "1.2", "1.49").
std::string format_ratio(double v);

const std::vector<std::string>& default_palette();

struct ChartOptions {
    std::string title;
    bool annotate = false;
    std::optional<double> ideal_slope;
    BandStat stat = BandStat::minmax;
    int width_px = 800;
    int height_px = 560;
};

// Groups records for the chart kind and fills styles, labels, bands,
// annotations and OOM markers. Throws Error(empty_chart) when no series has
// an ok point.
ChartSpec build_chart(ChartKind kind, std::span<const RunRecord> records, const ChartOptions& options);

}  // namespace scaling
