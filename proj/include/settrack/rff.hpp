#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "settrack/common.hpp"

namespace settrack {

// Phase offsets b_k can be drawn on [0, 2*pi) (the construction under which
// E[phi(x).phi(x')] equals the Gaussian kernel) or on [0, 1) for literal
// replication of setups that use unit-interval phases.
enum class PhaseRange { TwoPi, PaperUnit };

inline double phase_upper(PhaseRange r) {
    return r == PhaseRange::TwoPi ? 2.0 * M_PI : 1.0;
}

inline std::string to_string(PhaseRange r) {
    return r == PhaseRange::TwoPi ? "two_pi" : "paper_unit";
}

inline PhaseRange phase_range_from_string(const std::string& s) {
    if (s == "two_pi") return PhaseRange::TwoPi;
    if (s == "paper_unit") return PhaseRange::PaperUnit;
    throw std::invalid_argument("unknown phase_range: " + s);
}

// The shared random feature map phi: R^dim -> R^k,
//   phi_j(x) = sqrt(2/k) * cos(frequencies.row(j) . x + phases(j)),
// approximating the Gaussian kernel exp(-sigma^2 ||x-x'||^2 / 2).
// Immutable after construction; safe to share across concurrent fits.
struct FeatureBasis {
    int dim = 0;
    int k = 0;
    double sigma = 1.0;
    PhaseRange phase_range = PhaseRange::TwoPi;
    std::uint64_t seed = 0;
    Eigen::MatrixXd frequencies;      // k x dim, equals sigma * unit_frequencies
    Eigen::MatrixXd unit_frequencies; // k x dim, N(0,1) draw; kept so sigma
                                      // sweeps reuse one seed draw
    Eigen::VectorXd phases;           // k, in [0, phase_upper)

    double scale() const { return std::sqrt(2.0 / static_cast<double>(k)); }
};

// Stable content identifier used to tie fits to the basis they were made with.
inline std::string basis_id(const FeatureBasis& b) {
    std::uint64_t h = detail::fnv1a64(std::to_string(b.dim) + "/" + std::to_string(b.k) +
                                      "/" + format_g17(b.sigma) + "/" + to_string(b.phase_range) +
                                      "/" + std::to_string(b.seed));
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Draw the basis. Pure function of (dim, k, sigma, phase_range, seed):
// frequencies with sigma=s are exactly s times the sigma=1 draw.
inline FeatureBasis sample_basis(int dim, int k, double sigma, PhaseRange phase_range,
                                 std::uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("sample_basis: dim must be >= 1");
    if (k < 1) throw std::invalid_argument("sample_basis: k must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("sample_basis: sigma must be > 0");

    FeatureBasis b;
    b.dim = dim;
    b.k = k;
    b.sigma = sigma;
    b.phase_range = phase_range;
    b.seed = seed;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    b.unit_frequencies.resize(k, dim);
    for (int j = 0; j < k; ++j)
        for (int d = 0; d < dim; ++d) b.unit_frequencies(j, d) = normal(rng);
    b.frequencies = sigma * b.unit_frequencies;

    std::uniform_real_distribution<double> uniform(0.0, phase_upper(phase_range));
    b.phases.resize(k);
    for (int j = 0; j < k; ++j) b.phases(j) = uniform(rng);
    return b;
}

// Rescale to a new sigma reusing the stored unit-variance draw.
inline FeatureBasis with_sigma(const FeatureBasis& b, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("with_sigma: sigma must be > 0");
    FeatureBasis out = b;
    out.sigma = sigma;
    out.frequencies = sigma * b.unit_frequencies;
    return out;
}

inline Eigen::VectorXd eval_features(const FeatureBasis& b, const Eigen::VectorXd& x) {
    if (x.size() != b.dim)
        throw std::invalid_argument("eval_features: point has length " +
                                    std::to_string(x.size()) + ", basis dim is " +
                                    std::to_string(b.dim));
    return (b.scale() * ((b.frequencies * x + b.phases).array().cos())).matrix();
}

// Row i is eval_features of points.row(i).
inline Eigen::MatrixXd design_matrix(const FeatureBasis& b, const Eigen::MatrixXd& points) {
    if (points.rows() == 0) return Eigen::MatrixXd(0, b.k);
    if (points.cols() != b.dim)
        throw std::invalid_argument("design_matrix: points have " +
                                    std::to_string(points.cols()) + " columns, basis dim is " +
                                    std::to_string(b.dim));
    Eigen::MatrixXd z = points * b.frequencies.transpose();
    z.rowwise() += b.phases.transpose();
    return b.scale() * z.array().cos();
}

// Median pairwise Euclidean distance. Above max_points rows, a deterministic
// splitmix64-shuffled subsample bounds the O(n^2) pair count.
inline double median_pairwise_distance(const Eigen::MatrixXd& points, int max_points = 2048) {
    const long n = points.rows();
    if (n < 2) throw data_error("median_pairwise_distance: need at least 2 points");

    std::vector<long> idx(n);
    for (long i = 0; i < n; ++i) idx[i] = i;
    long m = n;
    if (n > max_points) {
        std::uint64_t state = 0x6d656469616eull; // fixed subsample stream
        for (long i = n - 1; i > 0; --i) {
            state = detail::splitmix64(state);
            std::swap(idx[i], idx[state % static_cast<std::uint64_t>(i + 1)]);
        }
        m = max_points;
    }

    std::vector<double> d2;
    d2.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
    for (long i = 0; i < m; ++i)
        for (long j = i + 1; j < m; ++j)
            d2.push_back((points.row(idx[i]) - points.row(idx[j])).squaredNorm());

    auto mid = d2.begin() + d2.size() / 2;
    std::nth_element(d2.begin(), mid, d2.end());
    double med = std::sqrt(*mid);
    if (d2.size() % 2 == 0) {
        auto lo = std::max_element(d2.begin(), mid);
        med = 0.5 * (med + std::sqrt(*lo));
    }
    return med;
}

// Bandwidth heuristic: sigma = 1 / median pairwise distance, so the kernel
// length-scale matches the data's typical spacing.
inline double median_heuristic_sigma(const Eigen::MatrixXd& points) {
    const double med = median_pairwise_distance(points);
    if (!(med > 0.0)) throw data_error("median heuristic: zero median pairwise distance");
    return 1.0 / med;
}

// --- serialization ----------------------------------------------------------
// Structured text, decimal floats with 17 significant digits.

namespace detail {

inline void write_matrix_json(std::ofstream& out, const Eigen::MatrixXd& m, int indent) {
    const std::string pad(indent, ' ');
    out << "[\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << pad << "  [";
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << (j ? "," : "") << format_g17(m(i, j));
        out << "]" << (i + 1 < m.rows() ? "," : "") << "\n";
    }
    out << pad << "]";
}

inline void write_vector_json(std::ofstream& out, const Eigen::VectorXd& v) {
    out << "[";
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out << (i ? "," : "") << format_g17(v(i));
    out << "]";
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw data_error("expected array of rows");
    Eigen::MatrixXd m(j.size(), j.empty() ? 0 : j[0].size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != m.cols())
            throw data_error("ragged matrix in file");
        for (std::size_t c = 0; c < j[i].size(); ++c)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
    return m;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

} // namespace detail

inline void save_basis(const FeatureBasis& b, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open for writing: " + path);
    out << "{\n";
    out << "  \"dim\": " << b.dim << ",\n";
    out << "  \"k\": " << b.k << ",\n";
    out << "  \"sigma\": " << format_g17(b.sigma) << ",\n";
    out << "  \"phase_range\": \"" << to_string(b.phase_range) << "\",\n";
    out << "  \"seed\": " << b.seed << ",\n";
    out << "  \"frequencies\": ";
    detail::write_matrix_json(out, b.frequencies, 2);
    out << ",\n  \"unit_frequencies\": ";
    detail::write_matrix_json(out, b.unit_frequencies, 2);
    out << ",\n  \"phases\": ";
    detail::write_vector_json(out, b.phases);
    out << "\n}\n";
    if (!out) throw data_error("write failed: " + path);
}

inline FeatureBasis load_basis(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw data_error("bad basis file " + path + ": " + e.what());
    }
    FeatureBasis b;
    try {
        b.dim = j.at("dim").get<int>();
        b.k = j.at("k").get<int>();
        b.sigma = j.at("sigma").get<double>();
        b.phase_range = phase_range_from_string(j.at("phase_range").get<std::string>());
        b.seed = j.at("seed").get<std::uint64_t>();
        b.frequencies = detail::matrix_from_json(j.at("frequencies"));
        b.unit_frequencies = detail::matrix_from_json(j.at("unit_frequencies"));
        b.phases = detail::vector_from_json(j.at("phases"));
    } catch (const nlohmann::json::exception& e) {
        throw data_error("bad basis file " + path + ": " + e.what());
    }
    if (b.frequencies.rows() != b.k || b.frequencies.cols() != b.dim ||
        b.unit_frequencies.rows() != b.k || b.unit_frequencies.cols() != b.dim ||
        b.phases.size() != b.k)
        throw data_error("inconsistent basis shapes in " + path);
    return b;
}

} // namespace settrack
