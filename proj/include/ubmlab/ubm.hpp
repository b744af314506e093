#pragma once

// Brownian motion on U(N): skew-Hermitian Gaussian increments for the metric
// <A, B> = -N Tr(AB), and two integrators for dU = U dX - (1/2) U dt.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ubmlab/errors.hpp"
#include "ubmlab/linalg.hpp"
#include "ubmlab/rng.hpp"

namespace ubmlab {

enum class Scheme { geometric, euler };

inline const char* to_string(Scheme s) { return s == Scheme::geometric ? "geometric" : "euler"; }

inline Scheme scheme_from_string(const std::string& name) {
    if (name == "geometric") return Scheme::geometric;
    if (name == "euler") return Scheme::euler;
    throw ConfigError("unknown scheme '" + name + "' (expected geometric or euler)");
}

/// Stream namespace offset separating the independent copy V from U.
inline constexpr std::uint64_t kVPathOffset = std::uint64_t{1} << 40;

/// Uniform grid {0, h, 2h, ..., t_max} with h = t_max / steps.
class TimeGrid {
public:
    TimeGrid() = default;
    TimeGrid(double t_max, std::size_t steps) : t_max_(t_max), steps_(steps) {
        if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("TimeGrid: t_max must be finite and >= 0");
        if ((steps == 0) != (t_max == 0.0)) throw std::invalid_argument("TimeGrid: zero steps only for t_max = 0");
    }

    /// Grid of step h reaching at least t_max.
    static TimeGrid with_step(double h, double t_max) {
        if (!(h > 0.0)) throw std::invalid_argument("TimeGrid: step must be positive");
        const auto steps = static_cast<std::size_t>(std::ceil(t_max / h - 1e-9));
        return TimeGrid(static_cast<double>(steps) * h, steps);
    }

    double t_max() const { return t_max_; }
    std::size_t steps() const { return steps_; }
    double h() const { return steps_ == 0 ? 0.0 : t_max_ / static_cast<double>(steps_); }
    double node(std::size_t k) const { return static_cast<double>(k) * h(); }

    /// Index k with node(k) == t, or OffGridError.
    std::size_t index_of(double t) const {
        if (steps_ == 0) {
            if (t == 0.0) return 0;
            throw OffGridError("time " + std::to_string(t) + " is not on the empty grid");
        }
        const double x = t / h();
        const double k = std::round(x);
        if (std::abs(x - k) > 1e-7 || k < 0.0 || k > static_cast<double>(steps_)) {
            throw OffGridError("time " + std::to_string(t) + " is not a node of the grid with h = " + std::to_string(h()) +
                               " and t_max = " + std::to_string(t_max_));
        }
        return static_cast<std::size_t>(k);
    }

private:
    double t_max_ = 0.0;
    std::size_t steps_ = 0;
};

/// A simulated trajectory with one matrix per grid node.
struct UnitaryPath {
    std::size_t dim = 0;
    TimeGrid grid;
    std::vector<ComplexMatrix> values;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;

    const ComplexMatrix& at(double t) const { return values.at(grid.index_of(t)); }
};

namespace detail {

/// Fills x with sum_b sqrt(h) g_b b over the orthonormal basis
/// {(E_kl - E_lk)/sqrt(2N), i(E_kl + E_lk)/sqrt(2N) : k < l} u {i E_kk / sqrt(N)}.
template <class Mat>
void fill_skew_increment(Mat& x, std::size_t dim, double h, RngStream& rng) {
    const auto n = static_cast<Eigen::Index>(dim);
    const double diag_scale = std::sqrt(h / static_cast<double>(dim));
    const double off_scale = std::sqrt(h / (2.0 * static_cast<double>(dim)));
    for (Eigen::Index k = 0; k < n; ++k) {
        x(k, k) = Complex(0.0, diag_scale * rng.normal());
        for (Eigen::Index l = k + 1; l < n; ++l) {
            const double re = rng.normal();
            const double im = rng.normal();
            x(k, l) = Complex(off_scale * re, off_scale * im);
            x(l, k) = Complex(-off_scale * re, off_scale * im);
        }
    }
}

template <class Mat>
Mat step_geometric(const Mat& u, std::size_t dim, double h, RngStream& rng) {
    Mat x(u.rows(), u.cols());
    fill_skew_increment(x, dim, h, rng);
    return u * expm(x);
}

template <class Mat>
Mat step_euler(const Mat& u, std::size_t dim, double h, RngStream& rng) {
    Mat x(u.rows(), u.cols());
    fill_skew_increment(x, dim, h, rng);
    const Mat update = u + u * x - (h / 2.0) * u;
    return polar_unitary(update);
}

template <class Mat>
Mat step(const Mat& u, std::size_t dim, double h, Scheme scheme, RngStream& rng) {
    return scheme == Scheme::geometric ? step_geometric(u, dim, h, rng) : step_euler(u, dim, h, rng);
}

template <int Dim>
void simulate_snapshots_fixed(std::size_t dim, double h, Scheme scheme, std::uint64_t seed, std::uint64_t path_index,
                              std::span<const std::size_t> record_steps, std::vector<ComplexMatrix>& out) {
    using Mat = Eigen::Matrix<Complex, Dim, Dim>;
    const auto n = static_cast<Eigen::Index>(dim);
    Mat u = Mat::Identity(n, n);
    std::size_t current = 0;
    out.clear();
    out.reserve(record_steps.size());
    for (std::size_t target : record_steps) {
        for (; current < target; ++current) {
            RngStream rng(seed, path_index, current);
            u = step(u, dim, h, scheme, rng);
        }
        out.emplace_back(u);
    }
}

}  // namespace detail

inline ComplexMatrix sample_skew_increment(std::size_t dim, double h, RngStream& rng) {
    if (!(h >= 0.0)) throw std::invalid_argument("sample_skew_increment: h must be non-negative");
    ComplexMatrix x(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    detail::fill_skew_increment(x, dim, h, rng);
    return x;
}

/// U exp(X), X = sample_skew_increment(N, h, rng).
inline ComplexMatrix step_geometric(const ComplexMatrix& u, double h, RngStream& rng) {
    return detail::step_geometric(u, static_cast<std::size_t>(u.rows()), h, rng);
}

/// Polar factor of U + U X - (h/2) U. Throws StepFailure on a singular update.
inline ComplexMatrix step_euler(const ComplexMatrix& u, double h, RngStream& rng) {
    return detail::step_euler(u, static_cast<std::size_t>(u.rows()), h, rng);
}

/// Values of one path at the given step indices (sorted, non-decreasing).
/// Step k draws its increment from RngStream(seed, path_index, k).
inline std::vector<ComplexMatrix> simulate_snapshots(std::size_t dim, double h, Scheme scheme, std::uint64_t seed,
                                                     std::uint64_t path_index, std::span<const std::size_t> record_steps) {
    if (!std::is_sorted(record_steps.begin(), record_steps.end())) {
        throw std::invalid_argument("simulate_snapshots: record steps must be sorted");
    }
    std::vector<ComplexMatrix> out;
    switch (dim) {
        case 2: detail::simulate_snapshots_fixed<2>(dim, h, scheme, seed, path_index, record_steps, out); break;
        case 3: detail::simulate_snapshots_fixed<3>(dim, h, scheme, seed, path_index, record_steps, out); break;
        case 4: detail::simulate_snapshots_fixed<4>(dim, h, scheme, seed, path_index, record_steps, out); break;
        default: detail::simulate_snapshots_fixed<Eigen::Dynamic>(dim, h, scheme, seed, path_index, record_steps, out); break;
    }
    return out;
}

inline UnitaryPath simulate_path(std::size_t dim, const TimeGrid& grid, Scheme scheme, std::uint64_t master_seed,
                                 std::uint64_t path_index) {
    if (dim == 0) throw std::invalid_argument("simulate_path: N must be positive");
    std::vector<std::size_t> all(grid.steps() + 1);
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    UnitaryPath path{dim, grid, {}, master_seed, path_index};
    path.values = simulate_snapshots(dim, grid.h(), scheme, master_seed, path_index, all);
    return path;
}

}  // namespace ubmlab
