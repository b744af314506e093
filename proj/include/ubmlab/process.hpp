#pragma once

// The unitary process A = R U S U^*, the bridge B_s = V_{2(t-s)} A_s and the
// Hermitian Jacobi matrix P U Q U^* P.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ubmlab/errors.hpp"
#include "ubmlab/linalg.hpp"
#include "ubmlab/rng.hpp"
#include "ubmlab/symmetry.hpp"
#include "ubmlab/ubm.hpp"

namespace ubmlab {

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of diag(R) moved into Q.
inline ComplexMatrix haar_unitary(std::size_t dim, RngStream& rng) {
    const auto n = static_cast<Eigen::Index>(dim);
    ComplexMatrix z(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) z(i, j) = Complex(rng.normal(), rng.normal()) / std::sqrt(2.0);
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < n; ++k) {
        const Complex d = r(k, k);
        const double mag = std::abs(d);
        if (mag > 0.0) q.col(k) *= d / mag;
    }
    return q;
}

/// Fixture recipe: plus counts for R and S, and an optional Haar rotation of S.
struct FixtureSpec {
    std::size_t dim = 4;
    std::size_t r_plus = 4;
    std::size_t s_plus = 4;
    bool rotate = false;
    std::uint64_t rotation_seed = 0;
};

/// Counter used for the rotation stream, disjoint from path streams.
inline constexpr std::uint64_t kFixtureStream = std::uint64_t{1} << 50;

/// R = diag(+-1); S = diag(+-1), conjugated by a Haar unitary when rotate is set.
inline SymmetryPair make_fixture(const FixtureSpec& spec) {
    ComplexMatrix r = make_symmetry(spec.dim, spec.r_plus);
    std::optional<ComplexMatrix> w;
    if (spec.rotate) {
        RngStream rng(spec.rotation_seed, kFixtureStream, 0);
        w = haar_unitary(spec.dim, rng);
    }
    return SymmetryPair(std::move(r), make_symmetry(spec.dim, spec.s_plus, w));
}

/// R U S U^*
inline ComplexMatrix evaluate_A(const SymmetryPair& pair, const ComplexMatrix& u) {
    return pair.r() * u * pair.s() * u.adjoint();
}

/// Quadrature layout for the bridge on [0, t].
struct BridgeConfig {
    double t = 0.0;
    std::vector<double> s_grid;

    /// `nodes` equally spaced points including both endpoints.
    static BridgeConfig uniform(double t, std::size_t nodes) {
        if (nodes < 2) throw std::invalid_argument("BridgeConfig: need at least two nodes");
        BridgeConfig cfg{t, {}};
        for (std::size_t k = 0; k < nodes; ++k) {
            cfg.s_grid.push_back(t * static_cast<double>(k) / static_cast<double>(nodes - 1));
        }
        return cfg;
    }

    /// Throws OffGridError unless every s and 2(t - s) is a node of `grid`.
    void validate(const TimeGrid& grid) const {
        if (s_grid.size() < 2 || s_grid.front() != 0.0 || std::abs(s_grid.back() - t) > 1e-12) {
            throw std::invalid_argument("BridgeConfig: s_grid must run from 0 to t");
        }
        for (double s : s_grid) {
            grid.index_of(s);
            grid.index_of(2.0 * (t - s));
        }
    }
};

/// V_{2(t-s)} A_s
inline ComplexMatrix evaluate_bridge(const SymmetryPair& pair, const UnitaryPath& u_path, const UnitaryPath& v_path, double s,
                                     double t) {
    if (!(s >= 0.0 && s <= t)) throw std::invalid_argument("evaluate_bridge: need 0 <= s <= t");
    const ComplexMatrix& u = u_path.at(s);
    const ComplexMatrix& v = v_path.at(2.0 * (t - s));
    return v * evaluate_A(pair, u);
}

/// P U Q U^* P with P = (I + R)/2, Q = (I + S)/2.
inline ComplexMatrix jacobi_matrix(const SymmetryPair& pair, const ComplexMatrix& u) {
    const ComplexMatrix id = identity(pair.dim());
    const ComplexMatrix p = 0.5 * (id + pair.r());
    const ComplexMatrix q = 0.5 * (id + pair.s());
    return p * u * q * u.adjoint() * p;
}

}  // namespace ubmlab
