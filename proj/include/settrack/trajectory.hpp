#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "settrack/common.hpp"
#include "settrack/rff.hpp"

namespace settrack {

// Joint PCA over fitted weight vectors. Holds the complete orthonormal basis
// (all K components) so reconstruction is lossless; callers pick the axes
// they want at projection time.
struct TrajectoryProjection {
    Eigen::VectorXd mean;        // K
    Eigen::MatrixXd components;  // K x K, column j = component j
    Eigen::VectorXd eigenvalues; // K, non-increasing, non-negative
    Eigen::MatrixXd coords;      // n x K, input i projected on every component
};

// Mean-centered covariance eigendecomposition (1/(n-1) normalization).
// Sign convention: each component's largest-|entry| coordinate is positive,
// lowest index winning ties, so repeated runs produce identical axes.
inline TrajectoryProjection fit_pca(const Eigen::MatrixXd& vectors) {
    const long n = vectors.rows();
    const long k = vectors.cols();
    if (n < 2) throw std::invalid_argument("fit_pca: need at least 2 vectors");
    if (k < 1) throw std::invalid_argument("fit_pca: vectors must be non-empty");

    TrajectoryProjection proj;
    proj.mean = vectors.colwise().mean();
    Eigen::MatrixXd centered = vectors.rowwise() - proj.mean.transpose();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw numeric_error("fit_pca: eigendecomposition failed");

    // Eigen returns ascending eigenvalues; flip, clamp tiny negatives.
    proj.eigenvalues.resize(k);
    proj.components.resize(k, k);
    for (long j = 0; j < k; ++j) {
        proj.eigenvalues(j) = std::max(0.0, solver.eigenvalues()(k - 1 - j));
        proj.components.col(j) = solver.eigenvectors().col(k - 1 - j);
    }
    for (long j = 0; j < k; ++j) {
        long best = 0;
        for (long i = 1; i < k; ++i)
            if (std::abs(proj.components(i, j)) > std::abs(proj.components(best, j)))
                best = i;
        if (proj.components(best, j) < 0.0) proj.components.col(j) = -proj.components.col(j);
    }

    proj.coords = centered * proj.components;
    return proj;
}

inline void check_axes(const TrajectoryProjection& proj, const std::vector<int>& axes) {
    for (int a : axes)
        if (a < 0 || a >= proj.components.cols())
            throw std::invalid_argument("component index " + std::to_string(a) +
                                        " out of range [0, " +
                                        std::to_string(proj.components.cols()) + ")");
}

// ((w - mean) . component[axes[i]]) for each requested axis; axes need not be
// consecutive.
inline Eigen::VectorXd project(const TrajectoryProjection& proj, const Eigen::VectorXd& w,
                               const std::vector<int>& axes) {
    if (w.size() != proj.mean.size())
        throw std::invalid_argument("project: vector length mismatch");
    check_axes(proj, axes);
    Eigen::VectorXd out(axes.size());
    for (std::size_t i = 0; i < axes.size(); ++i)
        out(static_cast<long>(i)) = (w - proj.mean).dot(proj.components.col(axes[i]));
    return out;
}

// mean + sum coords[i] * component[axes[i]]; adjoint of project, so
// project(inverse_map(c)) == c.
inline Eigen::VectorXd inverse_map(const TrajectoryProjection& proj,
                                   const Eigen::VectorXd& coords,
                                   const std::vector<int>& axes) {
    if (coords.size() != static_cast<long>(axes.size()))
        throw std::invalid_argument("inverse_map: coords/axes length mismatch");
    check_axes(proj, axes);
    Eigen::VectorXd w = proj.mean;
    for (std::size_t i = 0; i < axes.size(); ++i)
        w += coords(static_cast<long>(i)) * proj.components.col(axes[i]);
    return w;
}

// Eigenvalue fractions; empty when total variance is zero.
inline std::vector<double> explained_variance(const TrajectoryProjection& proj) {
    const double total = proj.eigenvalues.sum();
    if (!(total > 0.0)) return {};
    std::vector<double> out(proj.eigenvalues.size());
    for (long i = 0; i < proj.eigenvalues.size(); ++i) out[i] = proj.eigenvalues(i) / total;
    return out;
}

// Evenly spaced sweep positions along one axis: multiples of `spacing`
// within [lo, hi] (the observed coordinate range).
inline std::vector<double> axis_sweep_positions(double lo, double hi, double spacing) {
    if (!(spacing > 0.0)) throw std::invalid_argument("axis sweep spacing must be > 0");
    if (!(hi >= lo)) throw std::invalid_argument("axis sweep range is empty");
    std::vector<double> out;
    for (double m = std::ceil(lo / spacing); m * spacing <= hi + 1e-12; m += 1.0)
        out.push_back(m * spacing);
    return out;
}

inline void save_projection(const TrajectoryProjection& proj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << "{\n  \"k\": " << proj.mean.size() << ",\n  \"mean\": ";
    detail::write_vector_json(out, proj.mean);
    out << ",\n  \"eigenvalues\": ";
    detail::write_vector_json(out, proj.eigenvalues);
    out << ",\n  \"components\": ";
    // stored row-per-component to read naturally in the file
    detail::write_matrix_json(out, proj.components.transpose(), 2);
    out << ",\n  \"coords\": ";
    detail::write_matrix_json(out, proj.coords, 2);
    out << "\n}\n";
    if (!out) throw data_error("write failed: " + path);
}

inline TrajectoryProjection load_projection(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw data_error("bad projection file " + path + ": " + e.what());
    }
    TrajectoryProjection proj;
    try {
        proj.mean = detail::vector_from_json(j.at("mean"));
        proj.eigenvalues = detail::vector_from_json(j.at("eigenvalues"));
        proj.components = detail::matrix_from_json(j.at("components")).transpose();
        proj.coords = detail::matrix_from_json(j.at("coords"));
    } catch (const nlohmann::json::exception& e) {
        throw data_error("bad projection file " + path + ": " + e.what());
    }
    if (proj.components.rows() != proj.mean.size() ||
        proj.components.cols() != proj.mean.size() ||
        proj.eigenvalues.size() != proj.mean.size())
        throw data_error("inconsistent projection shapes in " + path);
    return proj;
}

} // namespace settrack
