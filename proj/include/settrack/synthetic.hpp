#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "settrack/common.hpp"
#include "settrack/series.hpp"

namespace settrack {

enum class Movement { Shift, Converge, Diverge };

inline std::string to_string(Movement m) {
    switch (m) {
        case Movement::Shift: return "Shift";
        case Movement::Converge: return "Converge";
        default: return "Diverge";
    }
}

inline Movement movement_from_string(const std::string& s) {
    if (s == "Shift" || s == "shift") return Movement::Shift;
    if (s == "Converge" || s == "converge") return Movement::Converge;
    if (s == "Diverge" || s == "diverge") return Movement::Diverge;
    throw std::invalid_argument("unknown movement type: " + s);
}

struct SyntheticSpec {
    Movement movement = Movement::Shift;
    int n_steps = 10;
    int n_points = 200;
    double cluster_std = 0.5;
    double direction_angle = 0.0; // Shift: travel direction; Converge/Diverge:
                                  // axis of the two subgroups
    double travel = 4.0;          // total center displacement over the series
    std::uint64_t seed = 0;
    std::string instance_label;   // defaults to the movement name
};

inline void validate(const SyntheticSpec& spec) {
    if (spec.n_steps < 2) throw std::invalid_argument("synthetic: n_steps must be >= 2");
    if (spec.n_points < 2) throw std::invalid_argument("synthetic: n_points must be >= 2");
    if (!(spec.cluster_std > 0.0))
        throw std::invalid_argument("synthetic: cluster_std must be > 0");
    if (!(spec.travel > 0.0)) throw std::invalid_argument("synthetic: travel must be > 0");
}

// Scheduled (noise-free) cluster centers per step: one center for Shift, two
// for Converge/Diverge. Shift travels from -travel/2 to +travel/2 along the
// direction; Converge starts with centers at +-travel/2 and coincides at the
// last step; Diverge is the time reversal of the Converge schedule.
inline std::vector<std::vector<Eigen::Vector2d>> center_schedule(const SyntheticSpec& spec) {
    validate(spec);
    const Eigen::Vector2d u(std::cos(spec.direction_angle), std::sin(spec.direction_angle));
    std::vector<std::vector<Eigen::Vector2d>> sched(spec.n_steps);
    for (int t = 0; t < spec.n_steps; ++t) {
        const double frac = static_cast<double>(t) / (spec.n_steps - 1);
        switch (spec.movement) {
            case Movement::Shift:
                sched[t] = {(-spec.travel / 2.0 + spec.travel * frac) * u};
                break;
            case Movement::Converge: {
                const double sep = (1.0 - frac) * spec.travel / 2.0;
                sched[t] = {sep * u, -sep * u};
                break;
            }
            case Movement::Diverge: {
                const double sep = frac * spec.travel / 2.0;
                sched[t] = {sep * u, -sep * u};
                break;
            }
        }
    }
    return sched;
}

inline VectorSetSeries generate(const SyntheticSpec& spec) {
    const auto sched = center_schedule(spec);
    VectorSetSeries series;
    series.instance_label =
        spec.instance_label.empty() ? to_string(spec.movement) : spec.instance_label;

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.cluster_std);

    for (int t = 0; t < spec.n_steps; ++t) {
        Eigen::MatrixXd pts(spec.n_points, 2);
        long row = 0;
        const auto& centers = sched[t];
        // single cluster, or ceil(N/2) around the first center and the rest
        // around the second
        for (std::size_t c = 0; c < centers.size(); ++c) {
            long count = spec.n_points;
            if (centers.size() == 2)
                count = c == 0 ? (spec.n_points + 1) / 2 : spec.n_points / 2;
            for (long i = 0; i < count; ++i, ++row) {
                pts(row, 0) = centers[c].x() + noise(rng);
                pts(row, 1) = centers[c].y() + noise(rng);
            }
        }
        series.steps.push_back(TimeStep{std::to_string(t + 1), std::move(pts)});
    }
    return series;
}

// The 12-instance suite: {Shift, Converge, Diverge} x 4. Instances rotate
// through the axis angles {0, pi, pi/2, 3pi/2}; the ordering makes the _1/_2
// and _3/_4 pairs move in opposite directions.
inline std::vector<VectorSetSeries> generate_suite(std::uint64_t seed) {
    const double angles[4] = {0.0, M_PI, M_PI / 2.0, 3.0 * M_PI / 2.0};
    const Movement kinds[3] = {Movement::Shift, Movement::Converge, Movement::Diverge};
    std::vector<VectorSetSeries> out;
    out.reserve(12);
    for (Movement m : kinds)
        for (int i = 0; i < 4; ++i) {
            SyntheticSpec spec;
            spec.movement = m;
            spec.direction_angle = angles[i];
            spec.instance_label = to_string(m) + "_" + std::to_string(i + 1);
            spec.seed = derive_seed(seed, spec.instance_label);
            out.push_back(generate(spec));
        }
    return out;
}

} // namespace settrack
