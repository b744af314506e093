#pragma once

// Tensor powers of N x N matrices and the symmetric-group action on tensor
// factors. Basis vectors of (C^N)^{(x)n} are indexed in row-major mixed radix:
// the multi-index (i_1, ..., i_n) maps to i_1 N^{n-1} + ... + i_n, so the
// first factor is the most significant digit. Kronecker products follow the
// same convention.

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ubmlab/errors.hpp"
#include "ubmlab/linalg.hpp"
#include "ubmlab/permutation.hpp"

namespace ubmlab {

/// Cap on the number of rows of materialized tensor operators.
struct TensorBudget {
    std::size_t max_rows = 4096;
};

/// N^n, or BudgetExceeded when it passes the cap.
inline std::size_t tensor_dim(std::size_t dim, std::size_t order, TensorBudget budget = {}) {
    if (dim == 0 || order == 0) throw std::invalid_argument("tensor_dim: N and n must be positive");
    std::size_t rows = 1;
    for (std::size_t k = 0; k < order; ++k) {
        if (rows > budget.max_rows / dim) {
            throw BudgetExceeded("tensor dimension " + std::to_string(dim) + "^" + std::to_string(order) +
                                 " exceeds the cap of " + std::to_string(budget.max_rows) + " rows");
        }
        rows *= dim;
    }
    if (rows > budget.max_rows) {
        throw BudgetExceeded("tensor dimension exceeds the cap of " + std::to_string(budget.max_rows) + " rows");
    }
    return rows;
}

template <class A, class B>
ComplexMatrix kronecker(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = Complex(a(i, j)) * b.template cast<Complex>();
        }
    }
    return out;
}

/// M_1 (x) M_2 (x) ... (x) M_n
inline ComplexMatrix kronecker_all(std::span<const ComplexMatrix> mats, TensorBudget budget = {}) {
    if (mats.empty()) throw std::invalid_argument("kronecker_all: empty factor list");
    tensor_dim(static_cast<std::size_t>(mats[0].rows()), mats.size(), budget);
    ComplexMatrix out = mats[0];
    for (std::size_t k = 1; k < mats.size(); ++k) out = kronecker(out, mats[k]);
    return out;
}

inline ComplexMatrix tensor_power(const ComplexMatrix& m, std::size_t order, TensorBudget budget = {}) {
    if (order == 0) throw std::invalid_argument("tensor_power: n must be at least 1");
    tensor_dim(static_cast<std::size_t>(m.rows()), order, budget);
    ComplexMatrix out = m;
    for (std::size_t k = 1; k < order; ++k) out = kronecker(out, m);
    return out;
}

/// Index of the basis vector [s](e_{i_1} (x) ... (x) e_{i_n}): the digit at
/// position s(m) of the image is the digit at position m of the source.
inline std::size_t permuted_index(const Permutation& s, std::size_t dim, std::size_t index) {
    const std::size_t n = s.size();
    std::vector<std::size_t> digits(n);
    for (std::size_t m = n; m-- > 0;) {
        digits[m] = index % dim;
        index /= dim;
    }
    std::vector<std::size_t> image(n);
    for (std::size_t m = 0; m < n; ++m) image[s(m)] = digits[m];
    std::size_t out = 0;
    for (std::size_t m = 0; m < n; ++m) out = out * dim + image[m];
    return out;
}

/// Dense 0/1 matrix of [s] acting on (C^N)^{(x)n}.
inline ComplexMatrix permutation_operator(const Permutation& s, std::size_t dim, TensorBudget budget = {}) {
    const std::size_t rows = tensor_dim(dim, s.size(), budget);
    ComplexMatrix p = ComplexMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < rows; ++i) p(static_cast<Eigen::Index>(permuted_index(s, dim, i)), static_cast<Eigen::Index>(i)) = 1.0;
    return p;
}

/// [s] * X without materializing [s]; X has N^n rows and any column count.
inline ComplexMatrix apply_permutation_left(const Permutation& s, std::size_t dim, const ComplexMatrix& x) {
    ComplexMatrix out(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out.row(static_cast<Eigen::Index>(permuted_index(s, dim, static_cast<std::size_t>(i)))) = x.row(i);
    }
    return out;
}

/// X * [s] without materializing [s]; X has N^n columns.
inline ComplexMatrix apply_permutation_right(const ComplexMatrix& x, const Permutation& s, std::size_t dim) {
    ComplexMatrix out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        out.col(j) = x.col(static_cast<Eigen::Index>(permuted_index(s, dim, static_cast<std::size_t>(j))));
    }
    return out;
}

/// Tr([s](M_1 (x) ... (x) M_n)) as the product over cycles (c_0 ... c_{l-1})
/// of Tr(M_{c_{l-1}} ... M_{c_0}).
inline Complex trace_cycle_product(const Permutation& s, std::span<const ComplexMatrix> mats) {
    if (mats.size() != s.size()) {
        throw std::invalid_argument("trace_cycle_product: expected " + std::to_string(s.size()) + " matrices, got " +
                                    std::to_string(mats.size()));
    }
    const Eigen::Index dim = mats[0].rows();
    for (const auto& m : mats) {
        if (m.rows() != dim || m.cols() != dim) throw std::invalid_argument("trace_cycle_product: matrix size mismatch");
    }
    Complex result = 1.0;
    for (const auto& cycle : s.cycles()) {
        ComplexMatrix prod = mats[cycle.back()];
        for (std::size_t k = cycle.size() - 1; k-- > 0;) prod = prod * mats[cycle[k]];
        result *= prod.trace();
    }
    return result;
}

/// sum_{k,l} E_{k,l} M E_{l,k}, summed term by term.
inline ComplexMatrix matrix_unit_contraction(const ComplexMatrix& m) {
    const Eigen::Index dim = m.rows();
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix ekl = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix elk = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        for (Eigen::Index l = 0; l < dim; ++l) {
            ekl(k, l) = 1.0;
            elk(l, k) = 1.0;
            out += ekl * m * elk;
            ekl(k, l) = 0.0;
            elk(l, k) = 0.0;
        }
    }
    return out;
}

/// sum_{i<j} [(i j)] on (C^N)^{(x)n}.
inline ComplexMatrix transposition_sum(std::size_t order, std::size_t dim, TensorBudget budget = {}) {
    if (order < 2) throw std::invalid_argument("transposition_sum: n must be at least 2");
    const std::size_t rows = tensor_dim(dim, order, budget);
    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < order; ++i) {
        for (std::size_t j = i + 1; j < order; ++j) {
            const auto s = Permutation::transposition(order, i, j);
            for (std::size_t r = 0; r < rows; ++r) {
                out(static_cast<Eigen::Index>(permuted_index(s, dim, r)), static_cast<Eigen::Index>(r)) += 1.0;
            }
        }
    }
    return out;
}

/// (M)_i = I^{(x) i} (x) M (x) I^{(x) n-i-1}, slot i counted from 0.
inline ComplexMatrix embed_at(const ComplexMatrix& m, std::size_t slot, std::size_t order, TensorBudget budget = {}) {
    if (slot >= order) throw std::invalid_argument("embed_at: slot out of range");
    const std::size_t dim = static_cast<std::size_t>(m.rows());
    tensor_dim(dim, order, budget);
    std::vector<ComplexMatrix> factors(order, identity(dim));
    factors[slot] = m;
    return kronecker_all(factors, budget);
}

/// (M (x) D)_{i,j}: M in slot i, D in slot j, identities elsewhere (i < j).
inline ComplexMatrix embed_pair(const ComplexMatrix& m, const ComplexMatrix& d, std::size_t i, std::size_t j,
                                std::size_t order, TensorBudget budget = {}) {
    if (!(i < j && j < order)) throw std::invalid_argument("embed_pair: need i < j < n");
    const std::size_t dim = static_cast<std::size_t>(m.rows());
    tensor_dim(dim, order, budget);
    std::vector<ComplexMatrix> factors(order, identity(dim));
    factors[i] = m;
    factors[j] = d;
    return kronecker_all(factors, budget);
}

}  // namespace ubmlab
