#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "settrack/common.hpp"
#include "settrack/rff.hpp"

namespace settrack {

// log(1/(1+e^-f)), stable on both tails: no overflow for f << 0, no
// cancellation for f >> 0.
inline double log_sigmoid(double f) {
    if (f >= 0.0) return -std::log1p(std::exp(-f));
    return f - std::log1p(std::exp(f));
}

inline double sigmoid(double f) {
    if (f >= 0.0) return 1.0 / (1.0 + std::exp(-f));
    const double e = std::exp(f);
    return e / (1.0 + e);
}

struct FitDiagnostics {
    double acceptance_rate = 0.0;
    long n_iterations = 0;
    long burn_in = 0;
    std::vector<double> objective_trace; // log posterior of the current state,
                                         // one entry per iteration
};

// One time step's density: unnormalized p(x) proportional to sigmoid(phi(x).w).
// offset is the learned scalar standing in for -log Z and the noise constant;
// it calibrates the classifier, not the density shape.
struct DensityFit {
    Eigen::VectorXd weights;
    double offset = 0.0;
    std::string basis_ref;
    FitDiagnostics diagnostics;
};

inline double log_unnormalized_density(const DensityFit& fit, const FeatureBasis& basis,
                                       const Eigen::VectorXd& x) {
    if (fit.weights.size() != basis.k)
        throw std::invalid_argument("log_unnormalized_density: weight length " +
                                    std::to_string(fit.weights.size()) +
                                    " does not match basis k=" + std::to_string(basis.k));
    return log_sigmoid(eval_features(basis, x).dot(fit.weights));
}

struct GridBounds {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

// Bounding box of the points expanded by margin per side (0.25 = 25%).
// A zero-extent axis is padded by 0.5 so the grid stays non-degenerate.
inline GridBounds default_grid_bounds(const Eigen::MatrixXd& points, double margin = 0.25) {
    if (points.rows() < 1 || points.cols() != 2)
        throw std::invalid_argument("default_grid_bounds: need N x 2 points");
    GridBounds gb;
    gb.xmin = points.col(0).minCoeff();
    gb.xmax = points.col(0).maxCoeff();
    gb.ymin = points.col(1).minCoeff();
    gb.ymax = points.col(1).maxCoeff();
    const double mx = gb.xmax > gb.xmin ? margin * (gb.xmax - gb.xmin) : 0.5;
    const double my = gb.ymax > gb.ymin ? margin * (gb.ymax - gb.ymin) : 0.5;
    gb.xmin -= mx;
    gb.xmax += mx;
    gb.ymin -= my;
    gb.ymax += my;
    return gb;
}

// Normalized density on a rectangular grid: sum(values) * cell_area == 1.
struct GridDensity {
    GridBounds bounds;
    int nx = 0, ny = 0;
    Eigen::MatrixXd values; // ny x nx, values(iy, ix), both axes ascending
    double cell_area = 0.0;

    double x_center(int ix) const {
        return bounds.xmin + (ix + 0.5) * (bounds.xmax - bounds.xmin) / nx;
    }
    double y_center(int iy) const {
        return bounds.ymin + (iy + 0.5) * (bounds.ymax - bounds.ymin) / ny;
    }
};

// Evaluate sigmoid(f) at cell centers and normalize by the Riemann sum, which
// realizes the intractable normalizer numerically. Per-cell evaluation is
// pure; the normalizing sum runs in fixed row-major order.
inline GridDensity evaluate_grid(const DensityFit& fit, const FeatureBasis& basis,
                                 const GridBounds& bounds, int nx = 100, int ny = 100) {
    if (!(bounds.xmax > bounds.xmin) || !(bounds.ymax > bounds.ymin))
        throw std::invalid_argument("evaluate_grid: degenerate bounds");
    if (nx < 2 || ny < 2)
        throw std::invalid_argument("evaluate_grid: resolution must be >= 2 per axis");
    if (basis.dim != 2)
        throw std::invalid_argument("evaluate_grid: grid evaluation is 2-D only");
    if (fit.weights.size() != basis.k)
        throw std::invalid_argument("evaluate_grid: weight/basis size mismatch");

    GridDensity g;
    g.bounds = bounds;
    g.nx = nx;
    g.ny = ny;
    const double dx = (bounds.xmax - bounds.xmin) / nx;
    const double dy = (bounds.ymax - bounds.ymin) / ny;
    g.cell_area = dx * dy;

    Eigen::MatrixXd centers(static_cast<long>(nx) * ny, 2);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const long r = static_cast<long>(iy) * nx + ix;
            centers(r, 0) = bounds.xmin + (ix + 0.5) * dx;
            centers(r, 1) = bounds.ymin + (iy + 0.5) * dy;
        }
    Eigen::VectorXd f = design_matrix(basis, centers) * fit.weights;

    g.values.resize(ny, nx);
    double total = 0.0;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const double s = sigmoid(f(static_cast<long>(iy) * nx + ix));
            g.values(iy, ix) = s;
            total += s;
        }
    if (!(total > 0.0) || !std::isfinite(total))
        throw numeric_error("evaluate_grid: density mass is zero or non-finite");
    g.values /= total * g.cell_area;
    return g;
}

// Strict local maxima over 8-neighborhoods at or above threshold_frac * max.
// A flat grid has no strict maxima.
inline int count_modes(const GridDensity& g, double threshold_frac) {
    if (!(threshold_frac > 0.0) || !(threshold_frac < 1.0))
        throw std::invalid_argument("count_modes: threshold_frac must be in (0,1)");
    const double cutoff = threshold_frac * g.values.maxCoeff();
    int n = 0;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const double v = g.values(iy, ix);
            if (v < cutoff) continue;
            bool is_max = true;
            for (int dyi = -1; dyi <= 1 && is_max; ++dyi)
                for (int dxi = -1; dxi <= 1 && is_max; ++dxi) {
                    if (dxi == 0 && dyi == 0) continue;
                    const int jy = iy + dyi, jx = ix + dxi;
                    if (jy < 0 || jy >= g.ny || jx < 0 || jx >= g.nx) continue;
                    if (g.values(jy, jx) >= v) is_max = false;
                }
            if (is_max) ++n;
        }
    return n;
}

// CSV export: header x,y,density, row-major (y outer ascending, x inner).
inline void write_grid_csv(const GridDensity& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << "x,y,density\n";
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix)
            out << format_g17(g.x_center(ix)) << ',' << format_g17(g.y_center(iy)) << ','
                << format_g17(g.values(iy, ix)) << '\n';
    if (!out) throw data_error("write failed: " + path);
}

// 8-bit binary PGM (P5), linearly scaled so the max density maps to 255.
// Top image row is the largest y so the raster reads like a plot.
inline void write_grid_pgm(const GridDensity& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
    const double vmax = g.values.maxCoeff();
    for (int iy = g.ny - 1; iy >= 0; --iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const double v = vmax > 0.0 ? g.values(iy, ix) / vmax : 0.0;
            out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v))));
        }
    if (!out) throw data_error("write failed: " + path);
}

} // namespace settrack
