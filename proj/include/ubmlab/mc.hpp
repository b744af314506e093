#pragma once

// Monte Carlo over paired (U, V) paths. Path m of U uses stream index m; the
// independent copy V uses m + kVPathOffset under the same master seed, so any
// set of functionals evaluated in one run shares common random numbers.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "ubmlab/errors.hpp"
#include "ubmlab/estimate.hpp"
#include "ubmlab/linalg.hpp"
#include "ubmlab/process.hpp"
#include "ubmlab/ubm.hpp"

namespace ubmlab {

struct McConfig {
    std::size_t paths = 20000;
    TimeGrid grid = TimeGrid(1.0, 1000);
    Scheme scheme = Scheme::geometric;
    std::uint64_t master_seed = 1;
    FixtureSpec fixture;
    /// Worker threads; 0 means std::thread::hardware_concurrency().
    unsigned threads = 1;

    std::size_t dim() const { return fixture.dim; }
    SymmetryPair pair() const { return make_fixture(fixture); }
};

/// Grid nodes to record on the U path and on the V path.
class SnapshotPlan {
public:
    explicit SnapshotPlan(TimeGrid grid) : grid_(grid) {}

    const TimeGrid& grid() const { return grid_; }
    void need_u(double t) { u_[grid_.index_of(t)] = 0; }
    void need_v(double t) { v_[grid_.index_of(t)] = 0; }
    bool has_v() const { return !v_.empty(); }

    std::vector<std::size_t> u_steps() const { return keys(u_); }
    std::vector<std::size_t> v_steps() const { return keys(v_); }

    std::size_t u_slot(double t) const { return slot(u_, t, "U"); }
    std::size_t v_slot(double t) const { return slot(v_, t, "V"); }

    /// Fixes slot numbers; call after all need_* calls.
    void finalize() {
        std::size_t k = 0;
        for (auto& [step, pos] : u_) pos = k++;
        k = 0;
        for (auto& [step, pos] : v_) pos = k++;
    }

private:
    static std::vector<std::size_t> keys(const std::map<std::size_t, std::size_t>& m) {
        std::vector<std::size_t> out;
        out.reserve(m.size());
        for (const auto& kv : m) out.push_back(kv.first);
        return out;
    }
    std::size_t slot(const std::map<std::size_t, std::size_t>& m, double t, const char* which) const {
        const auto it = m.find(grid_.index_of(t));
        if (it == m.end()) throw std::logic_error(std::string("SnapshotPlan: time not requested on ") + which);
        return it->second;
    }

    TimeGrid grid_;
    std::map<std::size_t, std::size_t> u_;
    std::map<std::size_t, std::size_t> v_;
};

/// Recorded values of one (U, V) path pair.
struct PathPair {
    const SnapshotPlan* plan = nullptr;
    std::uint64_t path_index = 0;
    std::vector<ComplexMatrix> u;
    std::vector<ComplexMatrix> v;

    const ComplexMatrix& U(double t) const { return u[plan->u_slot(t)]; }
    const ComplexMatrix& V(double t) const { return v[plan->v_slot(t)]; }
};

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs fn(path_pair, row) for every path and collects the rows. Rows depend
/// only on (config, path index), never on the thread layout.
template <class Fn>
SampleTable run_paths(const McConfig& cfg, const SnapshotPlan& plan, std::size_t width, Fn&& fn) {
    if (cfg.paths < 2) throw ConfigError("Monte Carlo needs at least two paths");
    SampleTable table(cfg.paths, width);
    const auto u_steps = plan.u_steps();
    const auto v_steps = plan.v_steps();
    const double h = plan.grid().h();
    const std::size_t dim = cfg.dim();

    auto work = [&](std::size_t begin, std::size_t end) {
        PathPair pp;
        pp.plan = &plan;
        for (std::size_t m = begin; m < end; ++m) {
            pp.path_index = m;
            pp.u = simulate_snapshots(dim, h, cfg.scheme, cfg.master_seed, m, u_steps);
            if (!v_steps.empty()) pp.v = simulate_snapshots(dim, h, cfg.scheme, cfg.master_seed, m + kVPathOffset, v_steps);
            fn(static_cast<const PathPair&>(pp), table.row(m));
        }
    };

    const unsigned threads = std::min<std::size_t>(resolve_threads(cfg.threads), cfg.paths);
    if (threads <= 1) {
        work(0, cfg.paths);
        return table;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (cfg.paths + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t begin = std::min(cfg.paths, w * chunk);
            const std::size_t end = std::min(cfg.paths, begin + chunk);
            pool.emplace_back([&, w, begin, end] {
                try {
                    work(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return table;
}

// Pathwise functionals. All traces are normalized: tr = Tr / N.
namespace functional {

/// M^0, M^1, ..., M^k
inline std::vector<ComplexMatrix> powers(const ComplexMatrix& m, std::size_t k) {
    std::vector<ComplexMatrix> out;
    out.reserve(k + 1);
    out.push_back(identity(static_cast<std::size_t>(m.rows())));
    for (std::size_t j = 1; j <= k; ++j) out.push_back(out.back() * m);
    return out;
}

inline Complex tr(const ComplexMatrix& m) { return normalized_trace(m); }

inline Complex trace_power(const ComplexMatrix& m, std::size_t n) { return tr(powers(m, n).back()); }

/// tr((RS U)^n)
inline Complex nu(const SymmetryPair& pair, const ComplexMatrix& u, std::size_t n) {
    return trace_power(pair.rs() * u, n);
}

/// tr(B^{j-1} V R) for j = 1..n from precomputed powers of B.
inline std::vector<Complex> bridge_r_traces(const std::vector<ComplexMatrix>& b_powers, const ComplexMatrix& v,
                                            const ComplexMatrix& r, std::size_t n) {
    const ComplexMatrix vr = v * r;
    std::vector<Complex> out(n);
    for (std::size_t j = 1; j <= n; ++j) out[j - 1] = tr(b_powers[j - 1] * vr);
    return out;
}

}  // namespace functional

/// Which simulated process a U-type functional reads.
enum class Source { u, v };

namespace detail {

inline SnapshotPlan single_time_plan(const McConfig& cfg, double t, Source src) {
    SnapshotPlan plan(cfg.grid);
    if (src == Source::u) {
        plan.need_u(t);
    } else {
        plan.need_u(0.0);
        plan.need_v(t);
    }
    plan.finalize();
    return plan;
}

inline const ComplexMatrix& pick(const PathPair& pp, double t, Source src) { return src == Source::u ? pp.U(t) : pp.V(t); }

}  // namespace detail

/// E tr(A_t^n)
inline Estimate estimate_F(std::size_t n, double t, const McConfig& cfg) {
    if (n == 0) throw std::invalid_argument("estimate_F: n must be at least 1");
    const auto pair = cfg.pair();
    const auto plan = detail::single_time_plan(cfg, t, Source::u);
    const auto table = run_paths(cfg, plan, 1, [&](const PathPair& pp, std::span<Complex> row) {
        row[0] = functional::trace_power(evaluate_A(pair, pp.U(t)), n);
    });
    return table.estimate(0);
}

/// E[tr(A_t^p) tr(A_t^q)]
inline Estimate estimate_mixed(std::size_t p, std::size_t q, double t, const McConfig& cfg) {
    if (p == 0 || q == 0) throw std::invalid_argument("estimate_mixed: p, q must be at least 1");
    const auto pair = cfg.pair();
    const auto plan = detail::single_time_plan(cfg, t, Source::u);
    const auto table = run_paths(cfg, plan, 1, [&](const PathPair& pp, std::span<Complex> row) {
        const auto pw = functional::powers(evaluate_A(pair, pp.U(t)), std::max(p, q));
        row[0] = functional::tr(pw[p]) * functional::tr(pw[q]);
    });
    return table.estimate(0);
}

/// E tr((RS U_t)^n), read from U (default) or from the independent copy V.
inline Estimate estimate_nu(std::size_t n, double t, const McConfig& cfg, Source src = Source::u) {
    if (n == 0) throw std::invalid_argument("estimate_nu: n must be at least 1");
    const auto pair = cfg.pair();
    const auto plan = detail::single_time_plan(cfg, t, src);
    const auto table = run_paths(cfg, plan, 1, [&](const PathPair& pp, std::span<Complex> row) {
        row[0] = functional::nu(pair, detail::pick(pp, t, src), n);
    });
    return table.estimate(0);
}

/// E tr(U_t^n)
inline Estimate estimate_mu(std::size_t n, double t, const McConfig& cfg) {
    if (n == 0) throw std::invalid_argument("estimate_mu: n must be at least 1");
    const auto plan = detail::single_time_plan(cfg, t, Source::u);
    const auto table = run_paths(cfg, plan, 1, [&](const PathPair& pp, std::span<Complex> row) {
        row[0] = functional::trace_power(pp.U(t), n);
    });
    return table.estimate(0);
}

namespace detail {

inline SnapshotPlan bridge_plan(const McConfig& cfg, double s, double t) {
    if (!(s >= 0.0 && s <= t)) throw std::invalid_argument("bridge estimators: need 0 <= s <= t");
    SnapshotPlan plan(cfg.grid);
    plan.need_u(s);
    plan.need_v(2.0 * (t - s));
    plan.finalize();
    return plan;
}

}  // namespace detail

/// E tr(B_s^n), B_s = V_{2(t-s)} A_s
inline Estimate estimate_H(std::size_t n, double s, double t, const McConfig& cfg) {
    if (n == 0) throw std::invalid_argument("estimate_H: n must be at least 1");
    const auto pair = cfg.pair();
    const auto plan = detail::bridge_plan(cfg, s, t);
    const auto table = run_paths(cfg, plan, 1, [&](const PathPair& pp, std::span<Complex> row) {
        row[0] = functional::trace_power(pp.V(2.0 * (t - s)) * evaluate_A(pair, pp.U(s)), n);
    });
    return table.estimate(0);
}

struct BridgeTerms {
    /// E tr(B_s^{n-1} V R)
    Estimate first;
    /// E[tr(B_s^{n-i-1} V R) tr(B_s^{i-1} V R)] for i = 1..n-1
    std::vector<Estimate> products;
};

/// Integrand pieces of the bridge representation of F_n, as normalized traces.
inline BridgeTerms estimate_bridge_terms(std::size_t n, double s, double t, const McConfig& cfg) {
    if (n < 2) throw std::invalid_argument("estimate_bridge_terms: n must be at least 2");
    const auto pair = cfg.pair();
    const auto plan = detail::bridge_plan(cfg, s, t);
    const auto table = run_paths(cfg, plan, n, [&](const PathPair& pp, std::span<Complex> row) {
        const ComplexMatrix& v = pp.V(2.0 * (t - s));
        const auto b = functional::powers(v * evaluate_A(pair, pp.U(s)), n);
        const auto c = functional::bridge_r_traces(b, v, pair.r(), n);
        row[0] = c[n - 1];
        for (std::size_t i = 1; i < n; ++i) row[i] = c[n - i - 1] * c[i - 1];
    });
    BridgeTerms out;
    out.first = table.estimate(0);
    for (std::size_t i = 1; i < n; ++i) out.products.push_back(table.estimate(i));
    return out;
}

/// E tr((P U_t Q U_t^* P)^k)
inline Estimate estimate_jacobi_moment(std::size_t k, double t, const McConfig& cfg) {
    if (k == 0) throw std::invalid_argument("estimate_jacobi_moment: k must be at least 1");
    const auto pair = cfg.pair();
    const auto plan = detail::single_time_plan(cfg, t, Source::u);
    const auto table = run_paths(cfg, plan, 1, [&](const PathPair& pp, std::span<Complex> row) {
        row[0] = functional::trace_power(jacobi_matrix(pair, pp.U(t)), k);
    });
    return table.estimate(0);
}

}  // namespace ubmlab
