#include "peakwidths/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    peakwidths::RunConfig cfg;
    CLI::App app{"Widths of weighted Sobolev classes on peak domains: exponents, Hardy constants, partitions, "
                 "ball widths and decay experiments"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.add_option("--config", cfg.configPath, "JSON parameter document");
    app.add_option("--out", cfg.outDir, "Output directory")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Base RNG seed")->capture_default_str();
    app.add_option("--tol", cfg.tol, "Relative quadrature tolerance")->capture_default_str();

    app.add_subcommand("exponent", "Predicted width exponent for the config");

    auto add_hardy = [&cfg](CLI::App* sub) {
        sub->add_option("--window", cfg.window, "tau_minus tau_plus")->expected(2);
        sub->add_option("--lambda", cfg.lambda, "Vanishing-ball ratio")->capture_default_str();
        sub->add_option("--oracle-grid", cfg.oracleGrid, "Grid size of the discretized operator cross-check");
        sub->add_flag("--sweep", cfg.sweep, "Asymptotic A check over tau in [2^-16, 2^-2]");
    };
    auto add_partition = [&cfg](CLI::App* sub) {
        sub->add_option("--N", cfg.N, "Scale index, n = 2^{N d}")->capture_default_str();
        sub->add_option("--depth", cfg.depth, "Levels of the z_k sequence")->capture_default_str();
        sub->add_option("--c-hat", cfg.cHat, "Gap constant of the multiplicity check")->capture_default_str();
    };
    auto add_balls = [&cfg](CLI::App* sub) {
        sub->add_option("--nu", cfg.nu, "Ambient dimension")->capture_default_str();
        sub->add_option("--n", cfg.n, "Width index")->capture_default_str();
        sub->add_option("--p", cfg.bp, "Ball exponent")->capture_default_str();
        sub->add_option("--q", cfg.bq, "Target norm exponent")->capture_default_str();
        sub->add_option("--kind", cfg.kind, "kolmogorov or gelfand")->capture_default_str();
        sub->add_option("--restarts", cfg.restarts, "Random restarts")->capture_default_str();
    };
    auto add_decay = [&cfg](CLI::App* sub) {
        sub->add_option("--nmin", cfg.nmin, "Smallest n")->capture_default_str();
        sub->add_option("--nmax", cfg.nmax, "Largest n")->capture_default_str();
        sub->add_option("--probes", cfg.probes, "Number of smooth probes (0-3)")->capture_default_str();
    };
    add_hardy(app.add_subcommand("hardy", "Embedding constants A0, A1 of the window"));
    add_partition(app.add_subcommand("partition", "Multiscale grid and multiplicity certificate"));
    add_balls(app.add_subcommand("ballwidths", "Kolmogorov or Gelfand widths of finite-dimensional balls"));
    add_decay(app.add_subcommand("decay", "Error decay of the piecewise polynomial scheme"));
    CLI::App* all = app.add_subcommand("all", "Every stage that applies to the config");
    add_hardy(all);
    add_partition(all);
    add_balls(all);
    add_decay(all);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : peakwidths::kExitInvalid;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    return peakwidths::run(cfg, std::cerr);
}
