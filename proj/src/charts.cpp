#include "scaling/charts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "scaling/metrics.hpp"

namespace scaling {

namespace {

constexpr int kMarginLeft = 90;
constexpr int kMarginRight = 240;
constexpr int kMarginTop = 50;
constexpr int kMarginBottom = 70;
constexpr double kMarkerRadius = 3.5;
constexpr const char* kWeakDash = "6,4";
constexpr const char* kWeakColor = "#7f7f7f";
constexpr const char* kIdealColor = "#444444";

double log_base(double v, int base) { return base == 2 ? std::log2(v) : std::log10(v); }

double snapped_log(double v, int base) {
    const double e = log_base(v, base);
    const double r = std::round(e);
    return std::abs(e - r) < 1e-9 ? r : e;
}

std::string px(double v) { return fmt::format("{:.2f}", v); }

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string tick_label(const Tick& t, int base) {
    if (base == 10) return fmt::format("1e{}", t.exponent);
    if (t.exponent >= 0) return fmt::format("{}", std::int64_t{1} << std::min(t.exponent, 62));
    return fmt::format("{}", std::ldexp(1.0, t.exponent));
}

void require_positive(double v, std::string_view what, const std::string& label) {
    if (!(std::isfinite(v) && v > 0.0)) {
        throw Error(ErrorCode::non_positive_value,
                    fmt::format("series '{}' has a non-positive {} value ({})", label, what, v));
    }
}

struct ResolvedIdeal {
    IdealLine line;
    double x_end;
    std::string color;
};

std::string default_title(ChartKind k) {
    switch (k) {
        case ChartKind::strong: return "Node-to-node strong scaling";
        case ChartKind::weak: return "Node-to-node weak scaling";
        case ChartKind::strong_weak: return "Node-to-node strong and weak scaling";
        case ChartKind::throughput: return "Single-node throughput";
    }
    return "";
}

}  // namespace

std::string_view to_string(ChartKind k) {
    switch (k) {
        case ChartKind::strong: return "strong";
        case ChartKind::weak: return "weak";
        case ChartKind::strong_weak: return "strong-weak";
        case ChartKind::throughput: return "throughput";
    }
    return "strong";
}

std::optional<ChartKind> parse_chart_kind(std::string_view s) {
    if (s == "strong") return ChartKind::strong;
    if (s == "weak") return ChartKind::weak;
    if (s == "strong-weak" || s == "strong_weak") return ChartKind::strong_weak;
    if (s == "throughput") return ChartKind::throughput;
    return std::nullopt;
}

double LogAxis::pixel(double value) const {
    return pixel_span * (log_base(value, base) - min_exp) / static_cast<double>(max_exp - min_exp);
}

std::vector<Tick> LogAxis::ticks() const {
    std::vector<Tick> out;
    for (int k = min_exp; k <= max_exp; ++k) {
        out.push_back({std::pow(static_cast<double>(base), k),
                       pixel_span * static_cast<double>(k - min_exp) / static_cast<double>(max_exp - min_exp), k});
    }
    return out;
}

LogAxis make_log_axis(double min_v, double max_v, int base, int pixel_span) {
    if (!(std::isfinite(min_v) && std::isfinite(max_v) && min_v > 0.0 && max_v > 0.0)) {
        throw Error(ErrorCode::non_positive_value,
                    fmt::format("log axis range [{}, {}] must be positive and finite", min_v, max_v));
    }
    if (min_v > max_v) std::swap(min_v, max_v);
    if (base != 2 && base != 10) throw Error(ErrorCode::out_of_range, "log axis base must be 2 or 10");
    LogAxis axis;
    axis.base = base;
    axis.min_exp = static_cast<int>(std::floor(snapped_log(min_v, base)));
    axis.max_exp = static_cast<int>(std::ceil(snapped_log(max_v, base)));
    if (axis.min_exp == axis.max_exp) {
        --axis.min_exp;
        ++axis.max_exp;
    }
    axis.pixel_span = static_cast<double>(std::max(pixel_span, 1));
    return axis;
}

std::vector<Tick> layout_log_axis(double min_v, double max_v, int base, int pixel_span) {
    return make_log_axis(min_v, max_v, base, pixel_span).ticks();
}

std::string format_ratio(double v) {
    auto s = fmt::format("{:.2f}", v);
    if (s.size() >= 4 && s[s.size() - 1] == '0' && s[s.size() - 3] == '.') s.pop_back();
    return s;
}

const std::vector<std::string>& default_palette() {
    static const std::vector<std::string> colors{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                 "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#393b79"};
    return colors;
}

std::string render_chart(const ChartSpec& spec) {
    const auto non_empty = std::count_if(spec.series.begin(), spec.series.end(),
                                         [](const ChartSeries& s) { return !s.points.empty(); });
    if (non_empty == 0) throw Error(ErrorCode::empty_chart, "chart has no data points");

    const int base = spec.kind == ChartKind::throughput ? 10 : 2;
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = 0.0;
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = 0.0;
    auto extend_y = [&](double y) {
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
    };
    for (const auto& s : spec.series) {
        for (const auto& p : s.points) {
            require_positive(p.x, "x", s.label);
            require_positive(p.y, "y", s.label);
            x_min = std::min(x_min, p.x);
            x_max = std::max(x_max, p.x);
            extend_y(p.y);
            if (s.band) {
                require_positive(p.lo, "band low", s.label);
                require_positive(p.hi, "band high", s.label);
                extend_y(p.lo);
                extend_y(p.hi);
            }
        }
    }

    std::vector<ResolvedIdeal> ideals;
    for (const auto& req : spec.show_ideal) {
        auto it = std::find_if(spec.series.begin(), spec.series.end(),
                               [&](const ChartSeries& s) { return s.key == req.key && !s.points.empty(); });
        if (it == spec.series.end()) continue;
        const auto& first = it->points.front();
        IdealLine line{static_cast<std::int64_t>(first.x), first.y, req.slope};
        const double x_end = it->points.back().x;
        extend_y(line.at(first.x));
        extend_y(line.at(x_end));
        ideals.push_back({line, x_end, it->style.color});
    }

    const int plot_w = std::max(spec.width_px - kMarginLeft - kMarginRight, 1);
    const int plot_h = std::max(spec.height_px - kMarginTop - kMarginBottom, 1);
    const auto x_axis = make_log_axis(x_min, x_max, base, plot_w);
    const auto y_axis = make_log_axis(y_min, y_max, base, plot_h);
    const double left = kMarginLeft;
    const double top = kMarginTop;
    const double bottom = top + plot_h;
    auto to_px = [&](double x) { return left + x_axis.pixel(x); };
    auto to_py = [&](double y) { return bottom - y_axis.pixel(y); };

    std::string out;
    auto emit = [&](std::string_view s) { out += s; };
    emit("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    emit(fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
                     "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\" data-kind=\"{2}\" "
                     "data-x-base=\"{3}\" data-y-base=\"{3}\">\n",
                     spec.width_px, spec.height_px, to_string(spec.kind), base));
    emit(fmt::format("<rect class=\"background\" x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
                     spec.width_px, spec.height_px));
    emit(fmt::format("<text class=\"title\" x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
                     px(left + plot_w / 2.0), px(top / 2.0 + 6.0), xml_escape(spec.title)));

    emit("<g class=\"grid\" stroke=\"#dddddd\" stroke-width=\"1\">\n");
    for (const auto& t : x_axis.ticks()) {
        emit(fmt::format("<line class=\"gridline\" data-axis=\"x\" data-value=\"{}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" "
                         "y2=\"{}\"/>\n",
                         t.value, px(left + t.pixel), px(top), px(left + t.pixel), px(bottom)));
    }
    for (const auto& t : y_axis.ticks()) {
        emit(fmt::format("<line class=\"gridline\" data-axis=\"y\" data-value=\"{}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" "
                         "y2=\"{}\"/>\n",
                         t.value, px(left), px(bottom - t.pixel), px(left + plot_w), px(bottom - t.pixel)));
    }
    emit("</g>\n");

    emit("<g class=\"axes\" stroke=\"#000000\" stroke-width=\"1\">\n");
    emit(fmt::format("<line class=\"axis\" data-axis=\"x\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", px(left),
                     px(bottom), px(left + plot_w), px(bottom)));
    emit(fmt::format("<line class=\"axis\" data-axis=\"y\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", px(left),
                     px(top), px(left), px(bottom)));
    emit("</g>\n<g class=\"tick-labels\" fill=\"#000000\">\n");
    for (const auto& t : x_axis.ticks()) {
        emit(fmt::format("<text class=\"tick-label\" data-axis=\"x\" data-value=\"{}\" x=\"{}\" y=\"{}\" "
                         "text-anchor=\"middle\">{}</text>\n",
                         t.value, px(left + t.pixel), px(bottom + 18.0), tick_label(t, base)));
    }
    for (const auto& t : y_axis.ticks()) {
        emit(fmt::format("<text class=\"tick-label\" data-axis=\"y\" data-value=\"{}\" x=\"{}\" y=\"{}\" "
                         "text-anchor=\"end\">{}</text>\n",
                         t.value, px(left - 8.0), px(bottom - t.pixel + 4.0), tick_label(t, base)));
    }
    emit("</g>\n");
    emit(fmt::format("<text class=\"axis-label\" data-axis=\"x\" x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     px(left + plot_w / 2.0), px(bottom + 48.0), xml_escape(spec.x_label)));
    emit(fmt::format("<text class=\"axis-label\" data-axis=\"y\" x=\"{0}\" y=\"{1}\" text-anchor=\"middle\" "
                     "transform=\"rotate(-90 {0} {1})\">{2}</text>\n",
                     px(24.0), px(top + plot_h / 2.0), xml_escape(spec.y_label)));

    emit("<g class=\"bands\">\n");
    for (const auto& s : spec.series) {
        if (!s.band || s.points.empty()) continue;
        std::string d;
        for (const auto& p : s.points) d += fmt::format("{}{} {} ", d.empty() ? "M" : "L", px(to_px(p.x)), px(to_py(p.hi)));
        for (auto it = s.points.rbegin(); it != s.points.rend(); ++it) {
            d += fmt::format("L{} {} ", px(to_px(it->x)), px(to_py(it->lo)));
        }
        d += "Z";
        emit(fmt::format("<path class=\"band\" data-series=\"{}\" d=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" "
                         "stroke=\"none\"/>\n",
                         xml_escape(s.label), d, s.style.color));
    }
    emit("</g>\n");

    emit("<g class=\"ideal\">\n");
    for (const auto& id : ideals) {
        const double x0 = static_cast<double>(id.line.anchor_x);
        emit(fmt::format("<line class=\"ideal-line\" data-slope=\"{}\" data-anchor-x=\"{}\" data-anchor-y=\"{}\" "
                         "x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1\" "
                         "stroke-dasharray=\"2,3\"/>\n",
                         id.line.slope, id.line.anchor_x, id.line.anchor_y, px(to_px(x0)),
                         px(to_py(id.line.at(x0))), px(to_px(id.x_end)), px(to_py(id.line.at(id.x_end))), kIdealColor));
    }
    emit("</g>\n");

    const bool annotate = spec.annotations == Annotations::inverse_weak_efficiency && spec.kind == ChartKind::weak;
    for (const auto& s : spec.series) {
        if (s.points.empty()) continue;
        emit(fmt::format("<g class=\"series\" data-series=\"{}\" data-family=\"{}\">\n", xml_escape(s.label),
                         to_string(s.key.family)));
        if (s.points.size() >= 2) {
            std::string pts;
            for (const auto& p : s.points) {
                if (!pts.empty()) pts += ' ';
                pts += px(to_px(p.x)) + "," + px(to_py(p.y));
            }
            emit(fmt::format("<polyline class=\"series-line\" points=\"{}\" fill=\"none\" stroke=\"{}\" "
                             "stroke-width=\"2\"{}/>\n",
                             pts, s.style.color,
                             s.style.dash.empty() ? std::string{}
                                                  : fmt::format(" stroke-dasharray=\"{}\"", s.style.dash)));
        }
        if (s.markers) {
            for (const auto& p : s.points) {
                emit(fmt::format("<circle class=\"marker\" data-x=\"{}\" data-y=\"{}\" cx=\"{}\" cy=\"{}\" r=\"{}\" "
                                 "fill=\"{}\"/>\n",
                                 p.x, p.y, px(to_px(p.x)), px(to_py(p.y)), kMarkerRadius, s.style.color));
            }
        }
        if (annotate) {
            const double y0 = s.points.front().y;
            for (const auto& p : s.points) {
                const double slowdown = p.slowdown.value_or(p.y / y0);
                emit(fmt::format("<text class=\"annotation\" data-x=\"{}\" x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n",
                                 p.x, px(to_px(p.x) + 6.0), px(to_py(p.y) - 6.0), s.style.color,
                                 format_ratio(slowdown)));
            }
        }
        if (s.ends_in_oom) {
            const auto& p = s.points.back();
            const double cx = to_px(p.x);
            const double cy = to_py(p.y);
            emit(fmt::format("<g class=\"oom-glyph\" data-x=\"{}\" stroke=\"#d62728\" stroke-width=\"2\">"
                             "<path d=\"M{} {} L{} {} M{} {} L{} {}\"/>"
                             "<text x=\"{}\" y=\"{}\" fill=\"#d62728\" stroke=\"none\">OOM</text></g>\n",
                             p.x, px(cx - 6.0), px(cy - 6.0), px(cx + 6.0), px(cy + 6.0), px(cx - 6.0), px(cy + 6.0),
                             px(cx + 6.0), px(cy - 6.0), px(cx + 9.0), px(cy + 4.0)));
        }
        emit("</g>\n");
    }

    emit("<g class=\"legend\">\n");
    double ly = top + 10.0;
    const double lx = left + plot_w + 20.0;
    for (const auto& s : spec.series) {
        if (s.points.empty()) continue;
        emit(fmt::format("<g class=\"legend-entry\" data-series=\"{}\"><line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" "
                         "stroke=\"{}\" stroke-width=\"2\"{}/><text x=\"{}\" y=\"{}\">{}</text></g>\n",
                         xml_escape(s.label), px(lx), px(ly), px(lx + 24.0), px(ly), s.style.color,
                         s.style.dash.empty() ? std::string{} : fmt::format(" stroke-dasharray=\"{}\"", s.style.dash),
                         px(lx + 30.0), px(ly + 4.0), xml_escape(s.label)));
        ly += 18.0;
    }
    if (!ideals.empty()) {
        emit(fmt::format("<g class=\"legend-ideal\"><line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" "
                         "stroke-dasharray=\"2,3\"/><text x=\"{}\" y=\"{}\">ideal (slope {})</text></g>\n",
                         px(lx), px(ly), px(lx + 24.0), px(ly), kIdealColor, px(lx + 30.0), px(ly + 4.0),
                         ideals.front().line.slope));
    }
    emit("</g>\n</svg>\n");
    return out;
}

ChartSpec build_chart(ChartKind kind, std::span<const RunRecord> records, const ChartOptions& options) {
    ChartSpec spec;
    spec.kind = kind;
    spec.title = options.title.empty() ? default_title(kind) : options.title;
    spec.width_px = options.width_px;
    spec.height_px = options.height_px;
    if (kind == ChartKind::throughput) {
        spec.x_label = "Degrees of freedom";
        spec.y_label = "Throughput (DOF·cycles/s/node)";
    } else {
        spec.x_label = "Number of compute nodes";
        spec.y_label = "Time per cycle (s)";
    }
    if (options.annotate && kind == ChartKind::weak) spec.annotations = Annotations::inverse_weak_efficiency;

    const auto& palette = default_palette();
    auto time_series = [&](const Series& s, LineStyle style, bool with_slowdown) {
        ChartSeries cs;
        cs.label = describe(s.key);
        cs.key = s.key;
        cs.style = std::move(style);
        std::optional<MetricSequence> slowdown;
        if (with_slowdown) slowdown = weak_efficiency(s).slowdown;
        for (const auto& p : s.points) {
            auto agg = aggregate_point(p, options.stat);
            if (!agg) continue;
            ChartPoint cp{static_cast<double>(p.x), agg->mean, agg->lo, agg->hi, std::nullopt};
            if (slowdown) cp.slowdown = slowdown->at(p.x);
            cs.band = cs.band || agg->n > 1;
            cs.points.push_back(cp);
        }
        return cs;
    };

    const Family primary = kind == ChartKind::weak ? Family::weak
                           : kind == ChartKind::throughput ? Family::throughput
                                                           : Family::strong;
    const auto grouping = group_series(records, primary);
    std::size_t color = 0;
    for (const auto& s : grouping.series) {
        ChartSeries cs;
        if (kind == ChartKind::throughput) {
            cs.label = describe(s.key);
            cs.key = s.key;
            cs.style = {palette[color % palette.size()], ""};
            std::int64_t last_ok = 0;
            for (const auto& p : s.points) {
                auto agg = aggregate_point(p, options.stat);
                if (!agg) continue;
                const auto ok = std::find_if(p.members.begin(), p.members.end(),
                                             [](const RunRecord& r) { return r.status == RunStatus::ok; });
                const double dpn = dofs_per_node(*ok);
                cs.points.push_back({static_cast<double>(p.x), *point_throughput(p), dpn / agg->hi, dpn / agg->lo,
                                     std::nullopt});
                cs.band = cs.band || agg->n > 1;
                last_ok = p.x;
            }
            cs.ends_in_oom = std::any_of(s.points.begin(), s.points.end(), [&](const SeriesPoint& p) {
                return !p.has_ok() && p.has_oom() && p.x > last_ok;
            });
        } else {
            cs = time_series(s, {palette[color % palette.size()], ""}, kind == ChartKind::weak);
        }
        if (cs.points.empty()) continue;
        ++color;
        if (options.ideal_slope && kind != ChartKind::throughput) {
            spec.show_ideal.push_back({s.key, *options.ideal_slope});
        }
        spec.series.push_back(std::move(cs));
    }

    if (kind == ChartKind::strong_weak) {
        for (const auto& s : group_series(records, Family::weak).series) {
            auto cs = time_series(s, {kWeakColor, kWeakDash}, false);
            if (cs.points.size() < 2) continue;
            cs.markers = false;
            cs.band = false;
            spec.series.push_back(std::move(cs));
        }
    }
    if (spec.series.empty()) throw Error(ErrorCode::empty_chart, "no series with ok points to chart");
    return spec;
}

}  // namespace scaling
