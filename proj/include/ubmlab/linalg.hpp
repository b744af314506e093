#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>

#include <Eigen/Dense>

#include "ubmlab/errors.hpp"

namespace ubmlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

inline ComplexMatrix identity(std::size_t dim) {
    return ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

/// Tr(M) / rows(M).
template <class Derived>
auto normalized_trace(const Eigen::MatrixBase<Derived>& m) {
    return m.trace() / static_cast<double>(m.rows());
}

template <class A, class B>
double frobenius_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return (a - b).norm();
}

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (!std::isfinite(std::abs(m(i, j)))) return false;
        }
    }
    return true;
}

/// ||M M^* - I||_F
template <class Derived>
double unitarity_defect(const Eigen::MatrixBase<Derived>& m) {
    using Plain = typename Derived::PlainObject;
    return (m * m.adjoint() - Plain::Identity(m.rows(), m.cols())).norm();
}

template <class Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& m, double tol) {
    return m.rows() == m.cols() && unitarity_defect(m) <= tol;
}

template <class Derived>
bool is_skew_hermitian(const Eigen::MatrixBase<Derived>& m, double tol) {
    return m.rows() == m.cols() && (m + m.adjoint()).norm() <= tol;
}

/// Self-adjoint and squares to the identity.
template <class Derived>
bool is_symmetry(const Eigen::MatrixBase<Derived>& m, double tol) {
    using Plain = typename Derived::PlainObject;
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).norm() <= tol &&
           (m * m - Plain::Identity(m.rows(), m.cols())).norm() <= tol;
}

/// Upper bound on the 1-norm that avoids complex moduli: max column sum of
/// |Re| + |Im|, at most sqrt(2) times the true 1-norm.
template <class Derived>
double one_norm_bound(const Eigen::MatrixBase<Derived>& a) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        double col = 0.0;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const auto z = Complex(a(i, j));
            col += std::abs(z.real()) + std::abs(z.imag());
        }
        best = std::max(best, col);
    }
    return best;
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
///
/// The argument is scaled by 2^-s until its 1-norm bound theta is at most 1/2.
/// The Taylor degree K <= 18 is the smallest with theta^{K+1}/(K+1)! below
/// half the unit roundoff, so the truncation error is under rounding level
/// before squaring.
template <class Derived>
typename Derived::PlainObject expm(const Eigen::MatrixBase<Derived>& a) {
    using Plain = typename Derived::PlainObject;
    constexpr int kMaxDegree = 18;
    constexpr double kTheta = 0.5;
    const double eps = std::numeric_limits<double>::epsilon();

    const double norm = one_norm_bound(a);
    int squarings = 0;
    if (norm > kTheta) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta)));
    const double theta = norm / std::ldexp(1.0, squarings);

    int degree = 0;
    double remainder = 1.0;
    while (degree < kMaxDegree) {
        remainder *= theta / static_cast<double>(degree + 1);
        if (remainder <= 0.5 * eps) break;
        ++degree;
    }

    const Plain scaled = a / std::ldexp(1.0, squarings);
    // Horner: I + B(I + B/2(I + B/3(...))).
    Plain result = Plain::Identity(a.rows(), a.cols());
    for (int k = degree; k >= 1; --k) {
        result = (scaled * result / static_cast<double>(k)).eval();
        result.diagonal().array() += 1.0;
    }
    for (int i = 0; i < squarings; ++i) result = (result * result).eval();
    return result;
}

/// Unitary polar factor W Z^* of M = W diag(s) Z^*.
/// Throws StepFailure when M is numerically rank deficient.
template <class Derived>
typename Derived::PlainObject polar_unitary(const Eigen::MatrixBase<Derived>& m) {
    using Plain = typename Derived::PlainObject;
    Eigen::JacobiSVD<Plain> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.maxCoeff();
    const double smin = s.minCoeff();
    if (!(smax > 0.0) || smin < 1e-8 * smax) {
        throw StepFailure("polar factorization: update is numerically rank deficient");
    }
    return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace ubmlab
