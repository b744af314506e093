#pragma once

// Two-sided checks of the moment identities for A_t = R U_t S U_t^*. Every
// check evaluates both sides on the same simulated paths and judges the
// per-path difference, so its standard error reflects the common random
// numbers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ubmlab/errors.hpp"
#include "ubmlab/estimate.hpp"
#include "ubmlab/heat_kernel.hpp"
#include "ubmlab/mc.hpp"
#include "ubmlab/tensor.hpp"

namespace ubmlab {

struct Verdict {
    std::string name;
    Complex lhs{};
    Complex rhs{};
    double lhs_se = 0.0;
    double rhs_se = 0.0;
    /// |mean(lhs - rhs)|; for composite verdicts the worst residual/tolerance ratio.
    double residual = 0.0;
    /// Standard error of the per-path difference (larger component).
    double combined_se = 0.0;
    double bias_allowance = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double runtime_s = 0.0;
    std::size_t samples = 0;
    bool retried = false;
    std::vector<Verdict> parts;
};

/// Number of standard errors a residual may reach.
inline constexpr double kSigmaThreshold = 3.0;

/// Rounding allowance: residuals of exact identities evaluated in floating point.
inline double rounding_allowance(Complex lhs, Complex rhs) { return 1e-12 * (1.0 + std::abs(lhs) + std::abs(rhs)); }

/// Verdict on mean(lhs_m - rhs_m) over paired per-path samples.
inline Verdict paired_verdict(std::string name, std::span<const Complex> lhs, std::span<const Complex> rhs,
                              double bias_allowance = 0.0) {
    if (lhs.size() != rhs.size()) throw std::invalid_argument("paired_verdict: sample count mismatch");
    std::vector<Complex> diff(lhs.size());
    for (std::size_t m = 0; m < lhs.size(); ++m) diff[m] = lhs[m] - rhs[m];
    const Estimate l = estimate_from_samples(lhs);
    const Estimate r = estimate_from_samples(rhs);
    const Estimate d = estimate_from_samples(diff);
    Verdict v;
    v.name = std::move(name);
    v.lhs = l.mean;
    v.rhs = r.mean;
    v.lhs_se = l.se();
    v.rhs_se = r.se();
    v.residual = std::abs(d.mean);
    v.combined_se = d.se();
    v.bias_allowance = bias_allowance;
    v.tolerance = kSigmaThreshold * v.combined_se + bias_allowance + rounding_allowance(l.mean, r.mean);
    v.pass = v.residual <= v.tolerance;
    v.samples = lhs.size();
    return v;
}

/// Verdict against a deterministic right-hand side.
inline Verdict verdict_vs_value(std::string name, std::span<const Complex> lhs, Complex value, double bias_allowance = 0.0) {
    const std::vector<Complex> rhs(lhs.size(), value);
    return paired_verdict(std::move(name), lhs, rhs, bias_allowance);
}

/// Verdict that passes iff every part passes. Its residual is the largest
/// residual/tolerance ratio among the parts, against a tolerance of 1.
inline Verdict composite_verdict(std::string name, std::vector<Verdict> parts) {
    Verdict v;
    v.name = std::move(name);
    v.tolerance = 1.0;
    v.pass = true;
    double worst = -1.0;
    for (const auto& p : parts) {
        const double ratio = p.tolerance > 0.0 ? p.residual / p.tolerance
                                               : (p.residual > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        if (ratio > worst) {
            worst = ratio;
            v.lhs = p.lhs;
            v.rhs = p.rhs;
            v.lhs_se = p.lhs_se;
            v.rhs_se = p.rhs_se;
            v.combined_se = p.combined_se;
            v.bias_allowance = p.bias_allowance;
        }
        v.pass = v.pass && p.pass;
        v.samples = std::max(v.samples, p.samples);
    }
    v.residual = std::max(worst, 0.0);
    v.pass = v.pass && v.residual <= v.tolerance;
    v.parts = std::move(parts);
    return v;
}

namespace detail {

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::string fmt_num(double x) {
    std::string s = std::to_string(x);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

inline double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    double c = 1.0;
    for (std::size_t j = 1; j <= k; ++j) c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
    return std::round(c);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Moment ODE for F_n(t) = E tr(A_t^n)
// ---------------------------------------------------------------------------

/// Negative-control hook for the parity-dependent constant.
enum class ParityHook { none, swapped };

/// n^2 alpha beta for odd n, (n^2/2)(alpha^2 + beta^2) for even n.
inline double theorem1_constant(std::size_t n, double alpha, double beta, ParityHook hook = ParityHook::none) {
    const double nn = static_cast<double>(n);
    bool odd = n % 2 == 1;
    if (hook == ParityHook::swapped) odd = !odd;
    return odd ? nn * nn * alpha * beta : nn * nn / 2.0 * (alpha * alpha + beta * beta);
}

/// Pathwise right-hand side: -n tr(A^n) - n sum_p tr(A^p) tr(A^{n-p}) + constant.
inline Complex theorem1_rhs_sample(const SymmetryPair& pair, const ComplexMatrix& a, std::size_t n,
                                   ParityHook hook = ParityHook::none) {
    const auto pw = functional::powers(a, n);
    std::vector<Complex> traces(n + 1);
    for (std::size_t j = 0; j <= n; ++j) traces[j] = functional::tr(pw[j]);
    Complex mixed{};
    for (std::size_t p = 1; p < n; ++p) mixed += traces[p] * traces[n - p];
    const double nn = static_cast<double>(n);
    return -nn * traces[n] - nn * mixed + theorem1_constant(n, pair.alpha(), pair.beta(), hook);
}

/// -n F_n(t) - n sum_p E[tr(A^p) tr(A^{n-p})] + constant, with standard error.
inline Estimate theorem1_rhs(std::size_t n, double t, const McConfig& cfg, ParityHook hook = ParityHook::none) {
    if (n == 0) throw std::invalid_argument("theorem1_rhs: n must be at least 1");
    const auto pair = cfg.pair();
    SnapshotPlan plan(cfg.grid);
    plan.need_u(t);
    plan.finalize();
    const auto table = run_paths(cfg, plan, 1, [&](const PathPair& pp, std::span<Complex> row) {
        row[0] = theorem1_rhs_sample(pair, evaluate_A(pair, pp.U(t)), n, hook);
    });
    return table.estimate(0);
}

/// Central difference (F_n(t+h) - F_n(t-h))/(2h) against the ODE right-hand
/// side at t, on shared paths. Bias allowance |F_n(t)| h^2.
inline Verdict check_theorem1_residual(std::size_t n, double t, double h_fd, const McConfig& cfg,
                                       ParityHook hook = ParityHook::none) {
    detail::Stopwatch clock;
    if (n == 0) throw std::invalid_argument("check_theorem1_residual: n must be at least 1");
    if (h_fd < 10.0 * cfg.grid.h() * (1.0 - 1e-9)) {
        throw std::invalid_argument("check_theorem1_residual: h_fd must be at least 10 grid steps");
    }
    if (t - h_fd < -1e-12) throw std::invalid_argument("check_theorem1_residual: need t >= h_fd");
    const auto pair = cfg.pair();
    SnapshotPlan plan(cfg.grid);
    plan.need_u(t - h_fd);
    plan.need_u(t);
    plan.need_u(t + h_fd);
    plan.finalize();
    // Columns: finite difference, rhs, tr(A_t^n).
    const auto table = run_paths(cfg, plan, 3, [&](const PathPair& pp, std::span<Complex> row) {
        const Complex up = functional::trace_power(evaluate_A(pair, pp.U(t + h_fd)), n);
        const Complex down = functional::trace_power(evaluate_A(pair, pp.U(t - h_fd)), n);
        const ComplexMatrix a = evaluate_A(pair, pp.U(t));
        row[0] = (up - down) / (2.0 * h_fd);
        row[1] = theorem1_rhs_sample(pair, a, n, hook);
        row[2] = functional::trace_power(a, n);
    });
    const double f = std::abs(table.estimate(2).mean);
    Verdict v = paired_verdict("theorem1_residual(n=" + std::to_string(n) + ",t=" + detail::fmt_num(t) + ")",
                               table.column(0), table.column(1), f * h_fd * h_fd);
    v.runtime_s = clock.seconds();
    return v;
}

// ---------------------------------------------------------------------------
// Binomial relation with the Hermitian Jacobi matrix
// ---------------------------------------------------------------------------

/// C(2k,k)/2^{2k+1} + (alpha+beta)/4 + 4^{-k} sum_{n=1}^k C(2k,k-n) tr(A^n), per path.
inline Complex binom_rhs_sample(const SymmetryPair& pair, const ComplexMatrix& a, std::size_t k) {
    const double four_k = std::ldexp(1.0, 2 * static_cast<int>(k));
    Complex out = detail::binomial(2 * k, k) / (2.0 * four_k) + (pair.alpha() + pair.beta()) / 4.0;
    const auto pw = functional::powers(a, k);
    for (std::size_t n = 1; n <= k; ++n) out += detail::binomial(2 * k, k - n) / four_k * functional::tr(pw[n]);
    return out;
}

inline Verdict check_binom(std::size_t k, double t, const McConfig& cfg) {
    detail::Stopwatch clock;
    if (k == 0) throw std::invalid_argument("check_binom: k must be at least 1");
    const auto pair = cfg.pair();
    SnapshotPlan plan(cfg.grid);
    plan.need_u(t);
    plan.finalize();
    const auto table = run_paths(cfg, plan, 2, [&](const PathPair& pp, std::span<Complex> row) {
        const ComplexMatrix& u = pp.U(t);
        row[0] = functional::trace_power(jacobi_matrix(pair, u), k);
        row[1] = binom_rhs_sample(pair, evaluate_A(pair, u), k);
    });
    Verdict v = paired_verdict("binom(k=" + std::to_string(k) + ",t=" + detail::fmt_num(t) + ")", table.column(0),
                               table.column(1));
    v.runtime_s = clock.seconds();
    return v;
}

// ---------------------------------------------------------------------------
// Tensor heat kernel and the tensor ODE for G_n(t) = E[A_t^{(x)n}]
// ---------------------------------------------------------------------------

namespace detail {

/// Entrywise verdict: each entry of mean(lhs_m - rhs_m) against 3 entrywise
/// standard errors plus `bias`. Samples are stored as row-major flattened
/// matrices, one row per path.
inline Verdict entrywise_verdict(std::string name, const SampleTable& lhs, const SampleTable& rhs, double bias) {
    std::vector<Verdict> parts;
    parts.reserve(lhs.width());
    for (std::size_t c = 0; c < lhs.width(); ++c) {
        parts.push_back(paired_verdict(name + "[" + std::to_string(c) + "]", lhs.column(c), rhs.column(c), bias));
    }
    Verdict v = composite_verdict(std::move(name), std::move(parts));
    // Keep reports compact: retain only failing entries.
    std::vector<Verdict> failing;
    for (auto& p : v.parts) {
        if (!p.pass) failing.push_back(std::move(p));
    }
    v.parts = std::move(failing);
    return v;
}

inline void store_flat(const ComplexMatrix& m, std::span<Complex> row) {
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) row[k++] = m(i, j);
    }
}

}  // namespace detail

/// MC mean of U_t^{(x)n} against the heat-kernel exponential, entry by entry.
inline Verdict check_heat_kernel_mc(std::size_t n, double t, const McConfig& cfg, TensorBudget budget = {}) {
    detail::Stopwatch clock;
    const std::size_t rows = tensor_dim(cfg.dim(), n, budget);
    const ComplexMatrix exact = expected_tensor_power_ubm(n, cfg.dim(), t, budget).value;
    SnapshotPlan plan(cfg.grid);
    plan.need_u(t);
    plan.finalize();
    const std::size_t width = rows * rows;
    const auto lhs = run_paths(cfg, plan, width, [&](const PathPair& pp, std::span<Complex> row) {
        detail::store_flat(tensor_power(pp.U(t), n, budget), row);
    });
    SampleTable rhs(cfg.paths, width);
    for (std::size_t m = 0; m < cfg.paths; ++m) detail::store_flat(exact, rhs.row(m));
    Verdict v = detail::entrywise_verdict("heat_kernel_mc(n=" + std::to_string(n) + ",N=" + std::to_string(cfg.dim()) +
                                              ",t=" + detail::fmt_num(t) + ")",
                                          lhs, rhs, 0.0);
    v.runtime_s = clock.seconds();
    return v;
}

/// The three groups of the tensor ODE right-hand side at one path, plus the
/// two (k,l)-sums separately. All are already multiplied by A^{(x)n} on the left.
struct TensorOdeTerms {
    ComplexMatrix a_tensor;   ///< A^{(x)n}
    ComplexMatrix drift;      ///< -A^{(x)n}[n + (2/N) sum_{i<j} (ij)]
    ComplexMatrix beta_term;  ///< beta A^{(x)n} sum_i (U S U^*)_i
    ComplexMatrix sum_one;    ///< (1/N) A^{(x)n} sum_{i<j,k,l} (U S E_kl S U^* (x) U E_lk U^*)_{ij}
    ComplexMatrix sum_two;    ///< (1/N) A^{(x)n} sum_{i<j,k,l} (U E_kl U^* (x) U S E_lk S U^*)_{ij}

    ComplexMatrix rhs() const { return drift + beta_term + sum_one + sum_two; }
};

/// Right-hand side pieces by direct summation over slots and matrix units.
inline TensorOdeTerms tensor_ode_terms(const SymmetryPair& pair, const ComplexMatrix& u, std::size_t n,
                                       const ComplexMatrix& transpositions, TensorBudget budget = {}) {
    const std::size_t dim = pair.dim();
    const double nd = static_cast<double>(dim);
    const ComplexMatrix a = evaluate_A(pair, u);
    TensorOdeTerms out;
    out.a_tensor = tensor_power(a, n, budget);
    const auto rows = out.a_tensor.rows();
    out.drift = -out.a_tensor * (static_cast<double>(n) * ComplexMatrix::Identity(rows, rows) + (2.0 / nd) * transpositions);

    const ComplexMatrix w = u * pair.s() * u.adjoint();
    ComplexMatrix slot_sum = ComplexMatrix::Zero(rows, rows);
    for (std::size_t i = 0; i < n; ++i) slot_sum += embed_at(w, i, n, budget);
    out.beta_term = pair.beta() * out.a_tensor * slot_sum;

    ComplexMatrix first = ComplexMatrix::Zero(rows, rows);
    ComplexMatrix second = ComplexMatrix::Zero(rows, rows);
    ComplexMatrix unit = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    ComplexMatrix unit_t = unit;
    const ComplexMatrix& s = pair.s();
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(dim); ++k) {
        for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(dim); ++l) {
            unit(k, l) = 1.0;
            unit_t(l, k) = 1.0;
            const ComplexMatrix x1 = u * s * unit * s * u.adjoint();
            const ComplexMatrix y1 = u * unit_t * u.adjoint();
            const ComplexMatrix x2 = u * unit * u.adjoint();
            const ComplexMatrix y2 = u * s * unit_t * s * u.adjoint();
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    first += embed_pair(x1, y1, i, j, n, budget);
                    second += embed_pair(x2, y2, i, j, n, budget);
                }
            }
            unit(k, l) = 0.0;
            unit_t(l, k) = 0.0;
        }
    }
    out.sum_one = (1.0 / nd) * out.a_tensor * first;
    out.sum_two = (1.0 / nd) * out.a_tensor * second;
    return out;
}

/// Entrywise central difference of G_n against the expected right-hand side,
/// with an h_fd^2 bias allowance. When S is diagonal a second part compares
/// the two (k,l)-sums.
inline Verdict check_tensor_ode(std::size_t n, std::size_t dim, double t, double h_fd, const McConfig& cfg,
                                TensorBudget budget = {}) {
    detail::Stopwatch clock;
    if (dim != cfg.dim()) throw std::invalid_argument("check_tensor_ode: N does not match the configuration");
    if (n < 2) throw std::invalid_argument("check_tensor_ode: n must be at least 2");
    if (h_fd < 10.0 * cfg.grid.h() * (1.0 - 1e-9)) throw std::invalid_argument("check_tensor_ode: h_fd must be at least 10 grid steps");
    if (t - h_fd < -1e-12) throw std::invalid_argument("check_tensor_ode: need t >= h_fd");
    const std::size_t rows = tensor_dim(dim, n, budget);
    const auto pair = cfg.pair();
    const ComplexMatrix transpositions = transposition_sum(n, dim, budget);
    SnapshotPlan plan(cfg.grid);
    plan.need_u(t - h_fd);
    plan.need_u(t);
    plan.need_u(t + h_fd);
    plan.finalize();
    const std::size_t width = rows * rows;
    // Row layout: [finite difference | rhs | sum_one | sum_two].
    const auto table = run_paths(cfg, plan, 4 * width, [&](const PathPair& pp, std::span<Complex> row) {
        const ComplexMatrix up = tensor_power(evaluate_A(pair, pp.U(t + h_fd)), n, budget);
        const ComplexMatrix down = tensor_power(evaluate_A(pair, pp.U(t - h_fd)), n, budget);
        const auto terms = tensor_ode_terms(pair, pp.U(t), n, transpositions, budget);
        detail::store_flat((up - down) / (2.0 * h_fd), row.subspan(0, width));
        detail::store_flat(terms.rhs(), row.subspan(width, width));
        detail::store_flat(terms.sum_one, row.subspan(2 * width, width));
        detail::store_flat(terms.sum_two, row.subspan(3 * width, width));
    });
    auto block = [&](std::size_t b) {
        SampleTable out(cfg.paths, width);
        for (std::size_t m = 0; m < cfg.paths; ++m) {
            const auto src = table.row(m).subspan(b * width, width);
            std::copy(src.begin(), src.end(), out.row(m).begin());
        }
        return out;
    };
    const std::string tag = "(n=" + std::to_string(n) + ",N=" + std::to_string(dim) + ",t=" + detail::fmt_num(t) + ")";
    std::vector<Verdict> parts;
    parts.push_back(detail::entrywise_verdict("tensor_ode" + tag, block(0), block(1), h_fd * h_fd));
    const ComplexMatrix& s = pair.s();
    const bool diagonal = (s - ComplexMatrix(s.diagonal().asDiagonal())).norm() <= 1e-12;
    if (diagonal) parts.push_back(detail::entrywise_verdict("tensor_ode_sums_coincide" + tag, block(2), block(3), 0.0));
    Verdict v = composite_verdict("tensor_ode" + tag, std::move(parts));
    v.runtime_s = clock.seconds();
    return v;
}

// ---------------------------------------------------------------------------
// Bridge representation of F_n, its differential form, and the Tr R = 0 case
// ---------------------------------------------------------------------------

/// All three bridge verdicts from one set of paths.
struct BridgeStudy {
    Verdict theorem2;
    Verdict h_identity;
    /// Present only for fixtures with tr R = 0.
    std::optional<Verdict> trzero;
};

namespace detail {

inline std::vector<double> trapezoid_weights(const std::vector<double>& nodes) {
    std::vector<double> w(nodes.size(), 0.0);
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        const double half = 0.5 * (nodes[k + 1] - nodes[k]);
        w[k] += half;
        w[k + 1] += half;
    }
    return w;
}

/// (t/12) max |second difference| of node means: the composite trapezoid
/// error estimate for equally spaced nodes.
inline double quadrature_allowance(const std::vector<Complex>& node_means, double t) {
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < node_means.size(); ++k) {
        worst = std::max(worst, std::abs(node_means[k + 1] - 2.0 * node_means[k] + node_means[k - 1]));
    }
    return t / 12.0 * worst;
}

}  // namespace detail

/// Simulates U on the quadrature nodes and V on 2(t - s), then judges:
///  - theorem2: F_n(t) against nu_n(2t) + n beta int E tr(B^{n-1} V R) ds
///              + n sum_i int E[tr(B^{n-i-1} V R) tr(B^{i-1} V R)] ds;
///  - h_identity: H_n(0) = nu_n(2t), H_n(t) = F_n(t), and central differences
///              of H_n at interior nodes against the same integrand;
///  - trzero (tr R = 0 only): E tr(B^{j-1} V R) = 0 at every node and j <= n,
///              and F_n(t) - nu_n(2t) = n sum_i int Cov ds.
///
/// The bridge representation is written with normalized traces, so its
/// prefactors n/N and n/N^2 on unnormalized traces become n beta and n.
inline BridgeStudy run_bridge_study(std::size_t n, double t, const McConfig& cfg, const BridgeConfig& quad) {
    detail::Stopwatch clock;
    if (n < 2) throw std::invalid_argument("bridge checks need n >= 2");
    if (std::abs(quad.t - t) > 1e-12) throw std::invalid_argument("bridge checks: quadrature horizon differs from t");
    quad.validate(cfg.grid);
    const auto pair = cfg.pair();
    const auto& nodes = quad.s_grid;
    const std::size_t k_nodes = nodes.size();
    SnapshotPlan plan(cfg.grid);
    for (double s : nodes) {
        plan.need_u(s);
        plan.need_v(2.0 * (t - s));
    }
    plan.finalize();

    // Row layout:
    //   0: tr(A_t^n)          1: tr((RS V_{2t})^n)
    //   2 + k:                 integrand g_k = n beta c_n + n sum_i c_{n-i} c_i at node k
    //   2 + K + k:             H_n(s_k) = tr(B_{s_k}^n)
    //   2 + 2K + k*n + (j-1):  c_j(s_k) = tr(B^{j-1} V R), j = 1..n
    const std::size_t base_g = 2;
    const std::size_t base_h = base_g + k_nodes;
    const std::size_t base_c = base_h + k_nodes;
    const std::size_t width = base_c + k_nodes * n;
    const double nn = static_cast<double>(n);
    const auto table = run_paths(cfg, plan, width, [&](const PathPair& pp, std::span<Complex> row) {
        row[0] = functional::trace_power(evaluate_A(pair, pp.U(t)), n);
        row[1] = functional::nu(pair, pp.V(2.0 * t), n);
        for (std::size_t k = 0; k < k_nodes; ++k) {
            const double s = nodes[k];
            const ComplexMatrix& v = pp.V(2.0 * (t - s));
            const auto b = functional::powers(v * evaluate_A(pair, pp.U(s)), n);
            const auto c = functional::bridge_r_traces(b, v, pair.r(), n);
            Complex products{};
            for (std::size_t i = 1; i < n; ++i) products += c[n - i - 1] * c[i - 1];
            row[base_g + k] = nn * pair.beta() * c[n - 1] + nn * products;
            row[base_h + k] = functional::tr(b[n]);
            for (std::size_t j = 0; j < n; ++j) row[base_c + k * n + j] = c[j];
        }
    });
    const std::size_t paths = table.paths();
    const auto weights = detail::trapezoid_weights(nodes);
    const std::string tag = "(n=" + std::to_string(n) + ",N=" + std::to_string(cfg.dim()) + ",t=" + detail::fmt_num(t) + ")";

    std::vector<Complex> g_means(k_nodes);
    for (std::size_t k = 0; k < k_nodes; ++k) g_means[k] = table.estimate(base_g + k).mean;
    const double quad_bias = detail::quadrature_allowance(g_means, t);

    BridgeStudy out;
    {
        std::vector<Complex> lhs = table.column(0);
        std::vector<Complex> rhs(paths);
        for (std::size_t m = 0; m < paths; ++m) {
            Complex r = table(m, 1);
            for (std::size_t k = 0; k < k_nodes; ++k) r += weights[k] * table(m, base_g + k);
            rhs[m] = r;
        }
        out.theorem2 = paired_verdict("theorem2" + tag, lhs, rhs, quad_bias);
    }
    {
        std::vector<Verdict> parts;
        parts.push_back(paired_verdict("H_at_0_equals_nu" + tag, table.column(base_h), table.column(1)));
        parts.push_back(paired_verdict("H_at_t_equals_F" + tag, table.column(base_h + k_nodes - 1), table.column(0)));
        for (std::size_t k = 1; k + 1 < k_nodes; ++k) {
            const double ds = nodes[k + 1] - nodes[k - 1];
            std::vector<Complex> fd(paths);
            for (std::size_t m = 0; m < paths; ++m) fd[m] = (table(m, base_h + k + 1) - table(m, base_h + k - 1)) / ds;
            const double half = 0.5 * ds;
            const double bias = std::abs(table.estimate(base_h + k).mean) * half * half;
            parts.push_back(paired_verdict("dH_ds(s=" + detail::fmt_num(nodes[k]) + ")" + tag, fd, table.column(base_g + k), bias));
        }
        out.h_identity = composite_verdict("H_identity" + tag, std::move(parts));
    }
    if (std::abs(pair.alpha()) <= 1e-12) {
        std::vector<Verdict> parts;
        for (std::size_t k = 0; k < k_nodes; ++k) {
            for (std::size_t j = 1; j <= n; ++j) {
                parts.push_back(verdict_vs_value("first_moment(j=" + std::to_string(j) + ",s=" + detail::fmt_num(nodes[k]) + ")" + tag,
                                                 table.column(base_c + k * n + j - 1), Complex{}));
            }
        }
        // Covariance form: per-path influence values (X - mean X)(Y - mean Y).
        const double bessel = static_cast<double>(paths) / static_cast<double>(paths - 1);
        std::vector<Complex> lhs(paths);
        std::vector<Complex> rhs(paths, Complex{});
        std::vector<Complex> cov_means(k_nodes, Complex{});
        for (std::size_t m = 0; m < paths; ++m) lhs[m] = table(m, 0) - table(m, 1);
        for (std::size_t k = 0; k < k_nodes; ++k) {
            for (std::size_t i = 1; i < n; ++i) {
                const std::size_t cx = base_c + k * n + (n - i - 1);
                const std::size_t cy = base_c + k * n + (i - 1);
                const Complex mx = table.estimate(cx).mean;
                const Complex my = table.estimate(cy).mean;
                for (std::size_t m = 0; m < paths; ++m) {
                    const Complex cov = bessel * (table(m, cx) - mx) * (table(m, cy) - my);
                    rhs[m] += nn * weights[k] * cov;
                    cov_means[k] += nn * cov / static_cast<double>(paths);
                }
            }
        }
        parts.push_back(paired_verdict("covariance_form" + tag, lhs, rhs, detail::quadrature_allowance(cov_means, t)));
        out.trzero = composite_verdict("trzero_covariance" + tag, std::move(parts));
    }
    const double elapsed = clock.seconds();
    out.theorem2.runtime_s = elapsed;
    out.h_identity.runtime_s = elapsed;
    if (out.trzero) out.trzero->runtime_s = elapsed;
    return out;
}

inline Verdict check_theorem2(std::size_t n, double t, const McConfig& cfg, const BridgeConfig& quad) {
    return run_bridge_study(n, t, cfg, quad).theorem2;
}

inline Verdict check_H_identity(std::size_t n, double t, const McConfig& cfg, const BridgeConfig& quad) {
    return run_bridge_study(n, t, cfg, quad).h_identity;
}

/// Requires tr R = 0; throws MisuseError otherwise.
inline Verdict check_trzero_covariance(std::size_t n, double t, const McConfig& cfg, const BridgeConfig& quad) {
    if (std::abs(cfg.pair().alpha()) > 1e-12) throw MisuseError("check_trzero_covariance: fixture must have tr R = 0");
    return *run_bridge_study(n, t, cfg, quad).trzero;
}

// ---------------------------------------------------------------------------
// Closed-form first moment and simulator calibration
// ---------------------------------------------------------------------------

/// estimate_F(1, t) against e^{-t}(xi - alpha beta) + alpha beta.
inline Verdict check_f1_closed_form(double t, const McConfig& cfg) {
    detail::Stopwatch clock;
    const auto pair = cfg.pair();
    SnapshotPlan plan(cfg.grid);
    plan.need_u(t);
    plan.finalize();
    const auto table = run_paths(cfg, plan, 1, [&](const PathPair& pp, std::span<Complex> row) {
        row[0] = functional::tr(evaluate_A(pair, pp.U(t)));
    });
    Verdict v = verdict_vs_value("f1_closed_form(t=" + detail::fmt_num(t) + ")", table.column(0), f1_closed_form(pair, t));
    v.runtime_s = clock.seconds();
    return v;
}

/// E tr(U_t^n) against the explicit Biane sum.
inline Verdict check_biane_mc(std::size_t n, double t, const McConfig& cfg) {
    detail::Stopwatch clock;
    SnapshotPlan plan(cfg.grid);
    plan.need_u(t);
    plan.finalize();
    const auto table = run_paths(cfg, plan, 1, [&](const PathPair& pp, std::span<Complex> row) {
        row[0] = functional::trace_power(pp.U(t), n);
    });
    Verdict v = verdict_vs_value("biane_mc(n=" + std::to_string(n) + ",N=" + std::to_string(cfg.dim()) + ",t=" +
                                     detail::fmt_num(t) + ")",
                                 table.column(0), biane_moment(n, cfg.dim(), t));
    v.runtime_s = clock.seconds();
    return v;
}

/// Largest unitarity defect over every stored matrix of `paths` full paths.
inline double max_unitarity_defect(const McConfig& cfg, std::size_t paths) {
    double worst = 0.0;
    for (std::size_t m = 0; m < paths; ++m) {
        const auto path = simulate_path(cfg.dim(), cfg.grid, cfg.scheme, cfg.master_seed, m);
        for (const auto& u : path.values) worst = std::max(worst, unitarity_defect(u));
    }
    return worst;
}

/// E tr(U_t^n) under two independently seeded configurations (usually the two
/// schemes), judged against 3 combined standard errors sqrt(se_a^2 + se_b^2).
inline Verdict check_scheme_agreement(std::size_t n, double t, const McConfig& a, const McConfig& b) {
    detail::Stopwatch clock;
    const Estimate ea = estimate_mu(n, t, a);
    const Estimate eb = estimate_mu(n, t, b);
    Verdict v;
    v.name = std::string("scheme_agreement(") + to_string(a.scheme) + " vs " + to_string(b.scheme) + ",n=" + std::to_string(n) +
             ",t=" + detail::fmt_num(t) + ")";
    v.lhs = ea.mean;
    v.rhs = eb.mean;
    v.lhs_se = ea.se();
    v.rhs_se = eb.se();
    v.residual = std::abs(ea.mean - eb.mean);
    v.combined_se = std::hypot(ea.se(), eb.se());
    v.tolerance = kSigmaThreshold * v.combined_se + rounding_allowance(ea.mean, eb.mean);
    v.pass = v.residual <= v.tolerance;
    v.samples = ea.samples;
    v.runtime_s = clock.seconds();
    return v;
}

}  // namespace ubmlab
