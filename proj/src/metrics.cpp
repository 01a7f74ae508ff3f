#include "scaling/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace scaling {

namespace {

struct Sample {
    double x;
    double t;
};

std::vector<Sample> ok_samples(const Series& s) {
    std::vector<Sample> out;
    for (const auto& p : s.points) {
        if (auto t = point_time(p)) out.push_back({static_cast<double>(p.x), *t});
    }
    return out;
}

const SeriesPoint& first_ok(const Series& s) {
    for (const auto& p : s.points) {
        if (p.has_ok()) return p;
    }
    throw Error(ErrorCode::empty_series, fmt::format("series '{}' has no ok points", describe(s.key)));
}

double required_time(const Series& s, std::int64_t n) {
    const auto* p = s.find(n);
    if (p == nullptr || !p->has_ok()) {
        throw Error(ErrorCode::missing_point, fmt::format("series '{}' has no ok point at x={}", describe(s.key), n));
    }
    return *point_time(*p);
}

MetricSequence ratio_to_baseline(const Series& s, MetricKind kind, bool invert) {
    const auto& base = first_ok(s);
    const double t0 = *point_time(base);
    MetricSequence out{kind, base.x, {}};
    for (const auto& p : s.points) {
        auto t = point_time(p);
        if (!t) continue;
        const double v = (p.x == base.x) ? 1.0 : (invert ? *t / t0 : t0 / *t);
        out.points.push_back({p.x, v, kind});
    }
    return out;
}

}  // namespace

double time_per_cycle(const RunRecord& r) {
    if (r.status != RunStatus::ok || !r.wall_time_s) {
        throw Error(ErrorCode::not_ok, fmt::format("record on {} at {} nodes has status {}", r.platform, r.nodes,
                                                   to_string(r.status)));
    }
    return *r.wall_time_s / static_cast<double>(r.cycles);
}

double throughput(const RunRecord& r) { return dofs_per_node(r) / time_per_cycle(r); }

std::optional<double> mean_time_per_cycle(std::span<const RunRecord> records) {
    std::vector<double> times;
    for (const auto& r : records) {
        if (r.status == RunStatus::ok) times.push_back(time_per_cycle(r));
    }
    if (times.empty()) return std::nullopt;
    std::sort(times.begin(), times.end());
    const double mean = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
    return std::clamp(mean, times.front(), times.back());
}

std::optional<double> point_time(const SeriesPoint& p) { return mean_time_per_cycle(p.members); }

std::optional<double> point_throughput(const SeriesPoint& p) {
    auto t = point_time(p);
    if (!t) return std::nullopt;
    for (const auto& r : p.members) {
        if (r.status == RunStatus::ok) return dofs_per_node(r) / *t;
    }
    return std::nullopt;
}

MetricSequence time_curve(const Series& s) {
    MetricSequence out{MetricKind::time_per_cycle_s, 0, {}};
    for (const auto& p : s.points) {
        if (auto t = point_time(p)) out.points.push_back({p.x, *t, MetricKind::time_per_cycle_s});
    }
    return out;
}

MetricSequence throughput_curve(const Series& s) {
    MetricSequence out{MetricKind::throughput, 0, {}};
    for (const auto& p : s.points) {
        if (auto v = point_throughput(p)) out.points.push_back({p.x, *v, MetricKind::throughput});
    }
    return out;
}

MetricSequence strong_speedup(const Series& s) { return ratio_to_baseline(s, MetricKind::speedup, false); }

WeakScaling weak_efficiency(const Series& s) {
    return {ratio_to_baseline(s, MetricKind::efficiency, false), ratio_to_baseline(s, MetricKind::slowdown, true)};
}

double cross_platform_speedup_at(const Series& a, const Series& b, std::int64_t n) {
    return required_time(a, n) / required_time(b, n);
}

std::optional<double> interpolate_time(const Series& s, double x) {
    const auto pts = ok_samples(s);
    if (pts.empty() || x < pts.front().x || x > pts.back().x) return std::nullopt;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].x == x) return pts[i].t;
        if (i + 1 < pts.size() && x < pts[i + 1].x) {
            const double frac = (std::log2(x) - std::log2(pts[i].x)) / (std::log2(pts[i + 1].x) - std::log2(pts[i].x));
            return std::exp2(std::log2(pts[i].t) + frac * (std::log2(pts[i + 1].t) - std::log2(pts[i].t)));
        }
    }
    return std::nullopt;
}

double nodes_for_time(const Series& b, double target) {
    const auto pts = ok_samples(b);
    if (pts.empty()) throw Error(ErrorCode::empty_series, fmt::format("series '{}' has no ok points", describe(b.key)));
    const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(),
                                              [](const Sample& l, const Sample& r) { return l.t < r.t; });
    if (!(target >= lo->t && target <= hi->t)) {
        throw Error(ErrorCode::out_of_range,
                    fmt::format("time {} s/cycle is outside the observed range [{}, {}] of series '{}'", target,
                                lo->t, hi->t, describe(b.key)));
    }
    const double ly = std::log2(target);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].t == target) return pts[i].x;
        if (i + 1 == pts.size()) break;
        const double t0 = pts[i].t;
        const double t1 = pts[i + 1].t;
        if ((target - t0) * (target - t1) < 0.0) {
            const double frac = (ly - std::log2(t0)) / (std::log2(t1) - std::log2(t0));
            return std::exp2(std::log2(pts[i].x) + frac * (std::log2(pts[i + 1].x) - std::log2(pts[i].x)));
        }
    }
    // unreachable for a target inside [min, max]
    throw Error(ErrorCode::out_of_range, "no bracketing segment");
}

double node_equivalence(const Series& a, std::int64_t n, const Series& b) {
    return nodes_for_time(b, required_time(a, n));
}

std::vector<CrossoverPoint> find_crossovers(const Series& a, const Series& b) {
    const auto pa = ok_samples(a);
    const auto pb = ok_samples(b);
    std::vector<CrossoverPoint> out;
    if (pa.empty() || pb.empty()) return out;
    const double lo = std::max(pa.front().x, pb.front().x);
    const double hi = std::min(pa.back().x, pb.back().x);
    if (!(lo < hi)) return out;

    std::vector<double> xs;
    for (const auto* pts : {&pa, &pb}) {
        for (const auto& p : *pts) {
            if (p.x >= lo && p.x <= hi) xs.push_back(p.x);
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<double> la(xs.size()), lb(xs.size()), diff(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        la[i] = std::log2(*interpolate_time(a, xs[i]));
        lb[i] = std::log2(*interpolate_time(b, xs[i]));
        diff[i] = la[i] - lb[i];
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (diff[i] == 0.0) {
            out.push_back({xs[i], std::exp2(la[i]), a.key, b.key});
            continue;
        }
        if (i + 1 < xs.size() && diff[i + 1] != 0.0 && (diff[i] < 0.0) != (diff[i + 1] < 0.0)) {
            const double frac = diff[i] / (diff[i] - diff[i + 1]);
            const double lx = std::log2(xs[i]) + frac * (std::log2(xs[i + 1]) - std::log2(xs[i]));
            const double ya = la[i] + frac * (la[i + 1] - la[i]);
            const double yb = lb[i] + frac * (lb[i + 1] - lb[i]);
            out.push_back({std::exp2(lx), std::exp2(0.5 * (ya + yb)), a.key, b.key});
        }
    }
    return out;
}

SaturationPoint detect_saturation(const Series& s, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw Error(ErrorCode::out_of_range, fmt::format("saturation threshold {} must be in (0, 1]", threshold));
    }
    const auto curve = throughput_curve(s);
    if (curve.points.size() < 2) {
        throw Error(ErrorCode::too_few_points,
                    fmt::format("series '{}' needs at least 2 ok points for saturation detection", describe(s.key)));
    }
    const auto& pts = curve.points;
    const double peak =
        std::max_element(pts.begin(), pts.end(), [](const auto& l, const auto& r) { return l.value < r.value; })
            ->value;
    SaturationPoint out;
    for (const auto& p : pts) {
        if (p.value >= threshold * peak) {
            out.dofs = p.x;
            out.throughput = p.value;
            out.fraction_of_peak = p.value / peak;
            break;
        }
    }
    const auto& last = pts.back();
    const auto& prev = pts[pts.size() - 2];
    out.saturated = !(last.value == peak && (last.value - prev.value) > (1.0 - threshold) * peak);
    return out;
}

double IdealLine::at(double x) const {
    return anchor_y * std::pow(x / static_cast<double>(anchor_x), slope);
}

IdealLine ideal_line(const Series& s, double slope) {
    const auto& base = first_ok(s);
    return IdealLine{base.x, *point_time(base), slope};
}

}  // namespace scaling
