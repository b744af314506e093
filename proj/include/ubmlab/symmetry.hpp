#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "ubmlab/errors.hpp"
#include "ubmlab/linalg.hpp"

namespace ubmlab {

/// W diag(+1 x plus_count, -1 x (N - plus_count)) W^*, with W = I when absent.
inline ComplexMatrix make_symmetry(std::size_t dim, std::size_t plus_count,
                                   const std::optional<ComplexMatrix>& conjugator = std::nullopt) {
    if (dim == 0) throw std::invalid_argument("make_symmetry: N must be positive");
    if (plus_count > dim) {
        throw std::invalid_argument("make_symmetry: plus_count " + std::to_string(plus_count) + " exceeds N = " +
                                    std::to_string(dim));
    }
    ComplexMatrix d = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) d(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = k < plus_count ? 1.0 : -1.0;
    if (!conjugator) return d;
    const auto& w = *conjugator;
    if (w.rows() != d.rows() || !is_unitary(w, 1e-10)) {
        throw std::invalid_argument("make_symmetry: conjugator must be an N x N unitary");
    }
    ComplexMatrix r = w * d * w.adjoint();
    // Restore exact self-adjointness lost to rounding.
    return (0.5 * (r + r.adjoint())).eval();
}

/// The pair (R, S) with alpha = tr R, beta = tr S, xi = tr(RS) (normalized traces).
class SymmetryPair {
public:
    SymmetryPair(ComplexMatrix r, ComplexMatrix s) : r_(std::move(r)), s_(std::move(s)) {
        if (r_.rows() != s_.rows() || r_.rows() == 0) throw std::invalid_argument("SymmetryPair: R and S must be N x N");
        if (!is_symmetry(r_, 1e-12 * static_cast<double>(r_.rows()))) throw std::invalid_argument("SymmetryPair: R is not a self-adjoint symmetry");
        if (!is_symmetry(s_, 1e-12 * static_cast<double>(s_.rows()))) throw std::invalid_argument("SymmetryPair: S is not a self-adjoint symmetry");
        rs_ = r_ * s_;
        alpha_ = normalized_trace(r_).real();
        beta_ = normalized_trace(s_).real();
        xi_ = normalized_trace(rs_).real();
    }

    std::size_t dim() const { return static_cast<std::size_t>(r_.rows()); }
    const ComplexMatrix& r() const { return r_; }
    const ComplexMatrix& s() const { return s_; }
    const ComplexMatrix& rs() const { return rs_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double xi() const { return xi_; }

private:
    ComplexMatrix r_;
    ComplexMatrix s_;
    ComplexMatrix rs_;
    double alpha_ = 0.0;
    double beta_ = 0.0;
    double xi_ = 0.0;
};

}  // namespace ubmlab
