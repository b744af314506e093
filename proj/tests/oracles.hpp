#pragma once

// Brute-force reference implementations used only by the tests. They share
// no code with the library beyond the matrix type.

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

/// Digits (i_1, ..., i_n) of a row-major mixed-radix index, i_1 most significant.
inline std::vector<std::size_t> digits(std::size_t index, std::size_t dim, std::size_t n) {
    std::vector<std::size_t> d(n);
    for (std::size_t k = n; k-- > 0;) {
        d[k] = index % dim;
        index /= dim;
    }
    return d;
}

inline std::size_t encode(const std::vector<std::size_t>& d, std::size_t dim) {
    std::size_t index = 0;
    for (std::size_t v : d) index = index * dim + v;
    return index;
}

/// (M_1 (x) ... (x) M_n) entry by entry: product of M_k[i_k, j_k].
inline Matrix kron_entries(const std::vector<Matrix>& mats) {
    const std::size_t n = mats.size();
    const auto dim = static_cast<std::size_t>(mats[0].rows());
    const std::size_t rows = ipow(dim, n);
    Matrix out(rows, rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto ri = digits(r, dim, n);
        for (std::size_t c = 0; c < rows; ++c) {
            const auto ci = digits(c, dim, n);
            Complex p = 1.0;
            for (std::size_t k = 0; k < n; ++k) p *= mats[k](ri[k], ci[k]);
            out(r, c) = p;
        }
    }
    return out;
}

/// [sigma] e_{i_1} (x) ... (x) e_{i_n} = e_{j_1} (x) ... with j_{sigma(m)} = i_m,
/// i.e. factor m moves to position sigma(m). `one_line[m]` = sigma(m).
inline Matrix permutation_matrix(const std::vector<std::size_t>& one_line, std::size_t dim) {
    const std::size_t n = one_line.size();
    const std::size_t rows = ipow(dim, n);
    Matrix out = Matrix::Zero(rows, rows);
    for (std::size_t c = 0; c < rows; ++c) {
        const auto in = digits(c, dim, n);
        std::vector<std::size_t> moved(n);
        for (std::size_t m = 0; m < n; ++m) moved[one_line[m]] = in[m];
        out(encode(moved, dim), c) = 1.0;
    }
    return out;
}

/// Sum_{k,l} E_kl M E_lk by explicit matrix units.
inline Matrix unit_sandwich(const Matrix& m) {
    const auto n = m.rows();
    Matrix out = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index l = 0; l < n; ++l) {
            Matrix ekl = Matrix::Zero(n, n);
            Matrix elk = Matrix::Zero(n, n);
            ekl(k, l) = 1.0;
            elk(l, k) = 1.0;
            out += ekl * m * elk;
        }
    }
    return out;
}

inline Matrix random_matrix(std::size_t dim, std::mt19937_64& gen) {
    std::normal_distribution<double> g;
    Matrix m(dim, dim);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = Complex(g(gen), g(gen));
    }
    return m;
}

/// Taylor series of exp(A) summed until terms vanish; for small-norm A only.
inline Matrix exp_series(const Matrix& a) {
    Matrix term = Matrix::Identity(a.rows(), a.cols());
    Matrix sum = term;
    for (int k = 1; k < 200; ++k) {
        term = (term * a / static_cast<double>(k)).eval();
        sum += term;
        if (term.norm() < 1e-300) break;
    }
    return sum;
}

/// Literal transcription of the moment-ODE constant term.
inline double parity_constant(std::size_t n, double alpha, double beta) {
    const double nn = static_cast<double>(n);
    if (n % 2 == 1) return nn * nn * alpha * beta;
    return nn * nn / 2.0 * (alpha * alpha + beta * beta);
}

}  // namespace oracle
