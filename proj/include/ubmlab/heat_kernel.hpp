#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "ubmlab/errors.hpp"
#include "ubmlab/linalg.hpp"
#include "ubmlab/symmetry.hpp"
#include "ubmlab/tensor.hpp"

namespace ubmlab {

/// E[(U_t)^{(x)n}] for the unitary Brownian motion on U(N).
struct HeatKernelTensor {
    std::size_t order = 1;
    std::size_t dim = 1;
    double t = 0.0;
    ComplexMatrix value;
};

/// e^{-nt/2} exp(-(t/N) sum_{i<j} [(i j)]).
inline HeatKernelTensor expected_tensor_power_ubm(std::size_t order, std::size_t dim, double t, TensorBudget budget = {}) {
    if (!(t >= 0.0)) throw std::invalid_argument("expected_tensor_power_ubm: t must be non-negative");
    const std::size_t rows = tensor_dim(dim, order, budget);
    HeatKernelTensor out{order, dim, t, {}};
    const double decay = std::exp(-static_cast<double>(order) * t / 2.0);
    if (order == 1) {
        out.value = decay * identity(rows);
        return out;
    }
    const ComplexMatrix generator = (-t / static_cast<double>(dim)) * transposition_sum(order, dim, budget);
    out.value = decay * expm(generator);
    return out;
}

/// Drift of (U_t)^{(x)n}: -(n/2) I - (1/N) sum_{i<j} [(i j)].
inline ComplexMatrix tensor_power_generator(std::size_t order, std::size_t dim, TensorBudget budget = {}) {
    const std::size_t rows = tensor_dim(dim, order, budget);
    ComplexMatrix g = (-static_cast<double>(order) / 2.0) * identity(rows);
    if (order >= 2) g -= transposition_sum(order, dim, budget) / static_cast<double>(dim);
    return g;
}

/// E tr(U_t^n) from the explicit alternating binomial sum, valid for n <= N.
///
/// Terms are formed in log space with explicit signs and accumulated in long
/// double; the alternating sum still cancels, so relative accuracy degrades
/// as n grows and t shrinks.
inline double biane_moment(std::size_t order, std::size_t dim, double t) {
    if (order == 0) throw DomainError("biane_moment: n must be at least 1");
    if (order > dim) {
        throw DomainError("biane_moment: formula holds for n <= N (got n = " + std::to_string(order) +
                          ", N = " + std::to_string(dim) + ")");
    }
    if (!(t >= 0.0)) throw DomainError("biane_moment: t must be non-negative");
    using LD = long double;
    const auto log_binom = [](LD a, LD b) { return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1); };
    const LD n = static_cast<LD>(order);
    const LD big_n = static_cast<LD>(dim);
    const LD tt = static_cast<LD>(t);
    LD sum = 0;
    for (std::size_t k = 0; k < order; ++k) {
        const LD kk = static_cast<LD>(k);
        const LD log_mag = log_binom(big_n + n - 1 - kk, n) + log_binom(n - 1, kk) -
                           tt * (n * n - (2 * kk + 1) * n) / (2 * big_n);
        const LD term = std::exp(log_mag);
        sum += (k % 2 == 0) ? term : -term;
    }
    return static_cast<double>(std::exp(-n * tt / 2) * sum / big_n);
}

/// E tr((M U_t)^n) for a fixed N x N matrix M, read off the tensor heat
/// kernel: Tr((M U)^n) = Tr([c] (M U)^{(x)n}) for the full cycle c.
inline Complex expected_trace_power_twisted(const ComplexMatrix& m, std::size_t order, double t, TensorBudget budget = {}) {
    if (order == 0) throw std::invalid_argument("expected_trace_power_twisted: n must be at least 1");
    const auto dim = static_cast<std::size_t>(m.rows());
    const ComplexMatrix kernel = expected_tensor_power_ubm(order, dim, t, budget).value;
    const ComplexMatrix twisted = tensor_power(m, order, budget) * kernel;
    const ComplexMatrix cycled = apply_permutation_left(Permutation::full_cycle(order), dim, twisted);
    return cycled.trace() / static_cast<double>(dim);
}

/// nu_n(t) = E tr((RS U_t)^n).
inline Complex nu_moment(const SymmetryPair& pair, std::size_t order, double t, TensorBudget budget = {}) {
    return expected_trace_power_twisted(pair.rs(), order, t, budget);
}

/// F_1(t) = e^{-t}(xi - alpha beta) + alpha beta.
inline double f1_closed_form(const SymmetryPair& pair, double t) {
    const double ab = pair.alpha() * pair.beta();
    return std::exp(-t) * (pair.xi() - ab) + ab;
}

/// E[A_t] = beta R + e^{-t}(RS - beta R), the solution of dE[A]/dt = beta R - E[A].
inline ComplexMatrix expected_A_closed_form(const ComplexMatrix& r, const ComplexMatrix& s, double t) {
    const double tol = 1e-10 * static_cast<double>(r.rows());
    if (!is_symmetry(r, tol) || !is_symmetry(s, tol) || r.rows() != s.rows()) {
        throw std::invalid_argument("expected_A_closed_form: R and S must be N x N symmetries");
    }
    const double beta = normalized_trace(s).real();
    const ComplexMatrix limit = beta * r;
    return limit + std::exp(-t) * (r * s - limit);
}

}  // namespace ubmlab
