// ubmlab: simulate moment tables, verify moment identities, and build
// plot-ready comparison tables.
//
//   ubmlab simulate CONFIG [--seed S] [--paths M] [--threads T]
//   ubmlab verify   CONFIG [--seed S] [--paths M] [--threads T]
//   ubmlab table    CONFIG
//
// Exit codes: 0 success / suite passed, 1 a verification failed, 2 invalid
// configuration or input.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ubmlab/app/suite.hpp"

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<unsigned> threads;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--seed", o.seed, "Override master_seed");
    cmd->add_option("--paths", o.paths, "Override M for the suite and every check")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores); results do not depend on it");
}

ubmlab::app::SuiteConfig load(const std::string& path, const Overrides& o) {
    auto cfg = ubmlab::app::load_config(path);
    if (o.seed) cfg.master_seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;
    if (o.paths) {
        cfg.M = *o.paths;
        for (auto& check : cfg.checks) check.M.reset();
    }
    ubmlab::app::validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unitary Brownian motion moment laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ubmlab::app::kCodeVersion);

    std::string config_path;
    Overrides overrides;

    auto* simulate = app.add_subcommand("simulate", "Write Monte Carlo moment estimates to <output_dir>/moments.csv");
    simulate->add_option("config", config_path, "Configuration file (JSON)")->required();
    add_overrides(simulate, overrides);

    auto* verify = app.add_subcommand("verify", "Run the configured checks; write report.json and timing.json");
    verify->add_option("config", config_path, "Configuration file (JSON)")->required();
    add_overrides(verify, overrides);

    auto* table = app.add_subcommand("table", "Merge moment CSVs with closed-form curves into <output_dir>/table.csv");
    table->add_option("config", config_path, "Configuration file (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) {
            const auto cfg = load(config_path, overrides);
            std::cout << "wrote " << ubmlab::app::cmd_simulate(cfg).string() << "\n";
            return 0;
        }
        if (verify->parsed()) {
            const auto cfg = load(config_path, overrides);
            const auto report = ubmlab::app::cmd_verify(cfg);
            std::cout << ubmlab::app::summary_text(report);
            std::cout << "wrote " << (ubmlab::app::output_dir(cfg) / "report.json").string() << "\n";
            return report.pass ? 0 : 1;
        }
        const auto cfg = load(config_path, {});
        std::cout << "wrote " << ubmlab::app::cmd_table(cfg).string() << "\n";
        return 0;
    } catch (const ubmlab::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
    } catch (const ubmlab::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return 2;
}
