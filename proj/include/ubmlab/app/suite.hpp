#pragma once

// Suite orchestration behind the `simulate`, `verify` and `table` commands.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ubmlab/app/config.hpp"
#include "ubmlab/app/report.hpp"
#include "ubmlab/heat_kernel.hpp"
#include "ubmlab/verify.hpp"

namespace ubmlab::app {

inline constexpr const char* kOutputDirEnv = "UBMLAB_OUTPUT_DIR";

/// Output directory: the environment override if set, else the config value.
inline std::filesystem::path output_dir(const SuiteConfig& suite) {
    if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
    return suite.output_dir;
}

/// Latest simulated time a check reads.
inline double horizon_for(const CheckSpec& spec) {
    if (spec.kind == "theorem1" || spec.kind == "tensor_ode") return spec.t + spec.h_fd;
    if (spec.kind == "theorem2" || spec.kind == "h_identity" || spec.kind == "trzero_covariance") return 2.0 * spec.t;
    return spec.t;
}

/// Bridge studies already run in this suite, keyed by everything they depend on.
class BridgeCache {
public:
    const BridgeStudy& get(std::size_t n, double t, std::size_t nodes, const McConfig& cfg) {
        const auto key = std::make_tuple(n, t, nodes, cfg.paths, cfg.grid.steps(), cfg.grid.t_max(), static_cast<int>(cfg.scheme),
                                         cfg.master_seed, cfg.fixture.dim, cfg.fixture.r_plus, cfg.fixture.s_plus,
                                         cfg.fixture.rotate, cfg.fixture.rotation_seed);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(key, run_bridge_study(n, t, cfg, BridgeConfig::uniform(t, nodes))).first;
        return it->second;
    }

private:
    using Key = std::tuple<std::size_t, double, std::size_t, std::size_t, std::size_t, double, int, std::uint64_t, std::size_t,
                           std::size_t, std::size_t, bool, std::uint64_t>;
    std::map<Key, BridgeStudy> cache_;
};

/// Runs one configured check with `path_scale` times the configured paths.
inline Verdict run_check(const SuiteConfig& suite, const CheckSpec& spec, std::size_t path_scale, BridgeCache& bridges) {
    McConfig cfg = mc_config_for(suite, &spec, horizon_for(spec));
    cfg.paths *= path_scale;
    const auto& kind = spec.kind;
    if (kind == "f1_closed_form") return check_f1_closed_form(spec.t, cfg);
    if (kind == "biane_mc") return check_biane_mc(spec.n, spec.t, cfg);
    if (kind == "heat_kernel_mc") return check_heat_kernel_mc(spec.n, spec.t, cfg);
    if (kind == "theorem1") {
        const ParityHook hook = spec.parity_hook == "swapped" ? ParityHook::swapped : ParityHook::none;
        return check_theorem1_residual(spec.n, spec.t, spec.h_fd, cfg, hook);
    }
    if (kind == "binom") return check_binom(spec.k, spec.t, cfg);
    if (kind == "tensor_ode") return check_tensor_ode(spec.n, cfg.dim(), spec.t, spec.h_fd, cfg);
    if (kind == "scheme_agreement") {
        McConfig geometric = cfg;
        geometric.scheme = Scheme::geometric;
        McConfig euler = cfg;
        euler.scheme = Scheme::euler;
        euler.master_seed = cfg.master_seed + 1;
        return check_scheme_agreement(spec.n, spec.t, geometric, euler);
    }
    if (kind == "theorem2") return bridges.get(spec.n, spec.t, spec.nodes, cfg).theorem2;
    if (kind == "h_identity") return bridges.get(spec.n, spec.t, spec.nodes, cfg).h_identity;
    if (kind == "trzero_covariance") {
        if (std::abs(cfg.pair().alpha()) > 1e-12) throw MisuseError("trzero_covariance needs a fixture with tr R = 0");
        return *bridges.get(spec.n, spec.t, spec.nodes, cfg).trzero;
    }
    throw ConfigError("unknown check kind '" + kind + "'");
}

/// Factor applied to the path count when a failing check is rerun.
inline constexpr std::size_t kRetryPathScale = 4;

/// Runs one check under the retry policy: a failing check is rerun once with
/// 4x the paths and the second verdict is final.
inline CheckRecord run_with_retry(const SuiteConfig& suite, const CheckSpec& spec, BridgeCache& bridges) {
    CheckRecord rec;
    rec.spec = spec;
    rec.verdict = run_check(suite, spec, 1, bridges);
    if (!rec.verdict.pass) {
        rec.first_attempt = rec.verdict;
        rec.verdict = run_check(suite, spec, kRetryPathScale, bridges);
        rec.verdict.retried = true;
    }
    return rec;
}

/// Runs every configured check under the retry policy. Precondition
/// violations surface as ConfigError naming the check.
inline RunReport run_suite(const SuiteConfig& suite) {
    RunReport report;
    report.config = suite;
    report.timestamp = utc_timestamp();
    BridgeCache bridges;
    for (std::size_t i = 0; i < suite.checks.size(); ++i) {
        const auto& spec = suite.checks[i];
        CheckRecord rec;
        try {
            rec = run_with_retry(suite, spec, bridges);
        } catch (const StepFailure&) {
            throw;
        } catch (const std::logic_error& e) {
            throw ConfigError("checks[" + std::to_string(i) + "] (" + spec.kind + "): " + e.what());
        } catch (const BudgetExceeded& e) {
            throw ConfigError("checks[" + std::to_string(i) + "] (" + spec.kind + "): " + e.what());
        }
        report.pass = report.pass && rec.verdict.pass;
        report.records.push_back(std::move(rec));
    }
    return report;
}

/// Runs the suite and writes report.json and timing.json to the output directory.
inline RunReport cmd_verify(const SuiteConfig& suite) {
    RunReport report = run_suite(suite);
    const auto dir = output_dir(suite);
    write_text_file(dir / "report.json", report_json(report).dump(2) + "\n");
    write_text_file(dir / "timing.json", timing_json(report).dump(2) + "\n");
    return report;
}

/// Monte Carlo moments for every requested (quantity, n, t). All rows of one
/// quantity share the same paths.
inline std::vector<MomentRow> simulate_moments(const SuiteConfig& suite) {
    std::vector<MomentRow> rows;
    const auto& req = suite.simulate;
    if (req.n.empty() || req.t.empty()) return rows;
    const double horizon = *std::max_element(req.t.begin(), req.t.end());
    const McConfig cfg = mc_config_for(suite, nullptr, horizon);
    const auto pair = cfg.pair();
    const std::size_t max_n = *std::max_element(req.n.begin(), req.n.end());
    SnapshotPlan plan(cfg.grid);
    for (double t : req.t) plan.need_u(t);
    plan.finalize();
    for (const auto& quantity : req.quantities) {
        const std::size_t width = req.n.size() * req.t.size();
        const auto table = run_paths(cfg, plan, width, [&](const PathPair& pp, std::span<Complex> row) {
            for (std::size_t ti = 0; ti < req.t.size(); ++ti) {
                const ComplexMatrix& u = pp.U(req.t[ti]);
                ComplexMatrix base;
                if (quantity == "F") {
                    base = evaluate_A(pair, u);
                } else if (quantity == "nu") {
                    base = pair.rs() * u;
                } else {
                    base = u;
                }
                const auto pw = functional::powers(base, max_n);
                for (std::size_t ni = 0; ni < req.n.size(); ++ni) row[ni * req.t.size() + ti] = functional::tr(pw[req.n[ni]]);
            }
        });
        for (std::size_t ni = 0; ni < req.n.size(); ++ni) {
            for (std::size_t ti = 0; ti < req.t.size(); ++ti) {
                const Estimate e = table.estimate(ni * req.t.size() + ti);
                rows.push_back(MomentRow{quantity, req.n[ni], cfg.dim(), req.t[ti], e.mean.real(), e.mean.imag(), e.se(), cfg.paths,
                                         cfg.master_seed});
            }
        }
    }
    return rows;
}

/// Writes <output_dir>/moments.csv and returns its path.
inline std::filesystem::path cmd_simulate(const SuiteConfig& suite) {
    const auto path = output_dir(suite) / "moments.csv";
    write_text_file(path, moment_csv(simulate_moments(suite)));
    return path;
}

/// Closed-form value of a moment where one is available.
inline std::optional<Complex> analytic_moment(const SuiteConfig& suite, const std::string& quantity, std::size_t n, std::size_t dim,
                                              double t) {
    try {
        if (quantity == "mu") {
            if (n <= dim) return Complex(biane_moment(n, dim, t), 0.0);
            return expected_trace_power_twisted(identity(dim), n, t);
        }
        if (suite.fixture.r_plus > dim || suite.fixture.s_plus > dim) return std::nullopt;
        const auto pair = make_fixture(FixtureSpec{dim, suite.fixture.r_plus, suite.fixture.s_plus, suite.fixture.rotate,
                                                   suite.fixture.rotation_seed});
        if (quantity == "F") {
            if (n == 1) return Complex(f1_closed_form(pair, t), 0.0);
            return std::nullopt;
        }
        if (quantity == "nu") return nu_moment(pair, n, t);
    } catch (const BudgetExceeded&) {
        return std::nullopt;
    }
    return std::nullopt;
}

inline constexpr const char* kTableHeader = "kind,quantity,n,N,t,mean_re,mean_im,se,M,seed,analytic_re,analytic_im";

/// Merged long-format table: every input row (kind=mc) with its closed-form
/// value, followed by closed-form curves sampled densely (kind=analytic).
inline std::string comparison_table(const SuiteConfig& suite, const std::vector<std::string>& inputs) {
    std::vector<MomentRow> rows;
    for (const auto& path : inputs) {
        auto part = read_moment_csv(path);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    std::ostringstream out;
    out << kTableHeader << "\n";
    auto analytic_cells = [](const std::optional<Complex>& a) {
        return a ? format_double(a->real()) + "," + format_double(a->imag()) : std::string(",");
    };
    std::map<std::tuple<std::string, std::size_t, std::size_t>, double> curves;
    for (const auto& r : rows) {
        out << "mc," << r.quantity << "," << r.n << "," << r.dim << "," << format_double(r.t) << "," << format_double(r.mean_re) << ","
            << format_double(r.mean_im) << "," << format_double(r.se) << "," << r.paths << "," << r.seed << ","
            << analytic_cells(analytic_moment(suite, r.quantity, r.n, r.dim, r.t)) << "\n";
        auto& t_end = curves[{r.quantity, r.n, r.dim}];
        t_end = std::max(t_end, r.t);
    }
    const std::size_t points = suite.table.dense_points;
    for (const auto& [key, t_end] : curves) {
        const auto& [quantity, n, dim] = key;
        if (!analytic_moment(suite, quantity, n, dim, 0.0)) continue;
        for (std::size_t p = 0; p < points; ++p) {
            const double t = t_end * static_cast<double>(p) / static_cast<double>(points - 1);
            out << "analytic," << quantity << "," << n << "," << dim << "," << format_double(t) << ",,,,,,"
                << analytic_cells(analytic_moment(suite, quantity, n, dim, t)) << "\n";
        }
    }
    return out.str();
}

/// Writes <output_dir>/table.csv from the configured inputs (default:
/// <output_dir>/moments.csv) and returns its path.
inline std::filesystem::path cmd_table(const SuiteConfig& suite) {
    const auto dir = output_dir(suite);
    std::vector<std::string> inputs = suite.table.inputs;
    if (inputs.empty()) inputs.push_back((dir / "moments.csv").string());
    const auto path = dir / "table.csv";
    write_text_file(path, comparison_table(suite, inputs));
    return path;
}

}  // namespace ubmlab::app
