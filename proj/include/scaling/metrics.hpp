#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scaling/study_model.hpp"

namespace scaling {

double time_per_cycle(const RunRecord& r);
// dofs per node processed per second of one cycle.
double throughput(const RunRecord& r);

// Mean time per cycle over the ok records, summed in ascending order so the
// result does not depend on input order; nullopt if none are ok.
std::optional<double> mean_time_per_cycle(std::span<const RunRecord> records);
std::optional<double> point_time(const SeriesPoint& p);
// dofs_per_node / point_time for ok points.
std::optional<double> point_throughput(const SeriesPoint& p);

MetricSequence time_curve(const Series& s);
MetricSequence throughput_curve(const Series& s);

// t(x_base) / t(x), baselined at the smallest ok x.
MetricSequence strong_speedup(const Series& s);

struct WeakScaling {
    MetricSequence efficiency;  // t(x_base) / t(x)
    MetricSequence slowdown;    // t(x) / t(x_base)
};
WeakScaling weak_efficiency(const Series& s);

// t_a(n) / t_b(n); above 1 when b is faster at n nodes.
double cross_platform_speedup_at(const Series& a, const Series& b, std::int64_t n);

// Piecewise-linear interpolation in (log2 x, log2 t) over the ok points.
// nullopt outside the sampled range.
std::optional<double> interpolate_time(const Series& s, double x);

// Node count on b matching t_a(n), by log-log interpolation of b. Throws
// Error(out_of_range) instead of extrapolating.
double node_equivalence(const Series& a, std::int64_t n, const Series& b);
double nodes_for_time(const Series& b, double target_time);

struct CrossoverPoint {
    double x = 0.0;
    double y = 0.0;
    SeriesKey series_a;
    SeriesKey series_b;
};

std::vector<CrossoverPoint> find_crossovers(const Series& a, const Series& b);

struct SaturationPoint {
    std::int64_t dofs = 0;
    double throughput = 0.0;
    double fraction_of_peak = 0.0;
    // false when the ladder ends on a still-rising peak
    bool saturated = true;
};

SaturationPoint detect_saturation(const Series& s, double threshold = 0.9);

// y(x) = anchor_y * (x / anchor_x)^slope
struct IdealLine {
    std::int64_t anchor_x = 1;
    double anchor_y = 1.0;
    double slope = -1.0;

    [[nodiscard]] double at(double x) const;
};

IdealLine ideal_line(const Series& s, double slope);

}  // namespace scaling
