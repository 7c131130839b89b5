// bec1d: ground states, approximations and dynamics of the effective 1D
// Gross-Pitaevskii model with harmonic trapping.
//
// bec1d <mode> [--config file.json] [overrides...]
//
// Modes: ground, sweep, variational, tf, evolve, verify, figure.
// Precedence: built-in defaults < config file < command-line flags.
// Exit codes: 0 ok, 1 computation failure, 2 config error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "bec1d/bec1d.hpp"

namespace {

struct Cli {
    std::string config_path;
    std::optional<double> lambda, c_omega;
    std::optional<double> grid_L;
    std::optional<long> grid_n;
    std::optional<std::string> out, format;
    std::optional<double> dt, tol_residual;
    std::optional<long> max_iters;
    // sweep
    std::optional<double> lambda_min, lambda_max, step;
    // evolve
    std::optional<double> t_final, dt_evolve, delta;
    std::optional<long> record_every, mode_index;
    bool renormalize = false;
    // figure
    std::string which = "fig1";
};

void add_common(CLI::App* cmd, Cli& cli) {
    cmd->add_option("--config", cli.config_path, "JSON config file");
    cmd->add_option("--lambda", cli.lambda, "interaction strength");
    cmd->add_option("--c-omega", cli.c_omega, "transverse coupling");
    cmd->add_option("--grid-L", cli.grid_L, "half-width of the grid");
    cmd->add_option("--grid-n", cli.grid_n, "number of grid nodes (odd)");
    cmd->add_option("--out", cli.out, "output path");
    cmd->add_option("--format", cli.format, "csv or json");
    cmd->add_option("--dt", cli.dt, "gradient-flow time step");
    cmd->add_option("--tol-residual", cli.tol_residual, "solver residual tolerance");
    cmd->add_option("--max-iters", cli.max_iters, "solver iteration cap");
}

bec1d::RunConfig assemble(const Cli& cli, bec1d::RunMode mode) {
    bec1d::RunConfig cfg;
    if (!cli.config_path.empty()) cfg = bec1d::load_config_file(cli.config_path);
    cfg.mode = mode;
    if (cli.lambda) cfg.model.lambda = *cli.lambda;
    if (cli.c_omega) cfg.model.c_omega = *cli.c_omega;
    if (cli.grid_L || cli.grid_n) {
        const double L = cli.grid_L.value_or(cfg.grid.L);
        const long n = cli.grid_n.value_or(cfg.grid.n);
        try {
            cfg.grid = bec1d::Grid(L, static_cast<int>(n));
        } catch (const std::invalid_argument& e) {
            throw bec1d::ConfigError("grid", e.what());
        }
    }
    if (cli.out) cfg.output_path = *cli.out;
    if (cli.format) {
        if (*cli.format == "csv") {
            cfg.format = bec1d::OutputFormat::csv;
        } else if (*cli.format == "json") {
            cfg.format = bec1d::OutputFormat::json;
        } else {
            throw bec1d::ConfigError("output.format", "expected 'csv' or 'json'");
        }
    }
    if (cli.dt) cfg.solver.dt = *cli.dt;
    if (cli.tol_residual) cfg.solver.tol_residual = *cli.tol_residual;
    if (cli.max_iters) cfg.solver.max_iters = *cli.max_iters;
    if (cli.lambda_min) cfg.sweep.lambda_min = *cli.lambda_min;
    if (cli.lambda_max) {
        cfg.sweep.lambda_max = *cli.lambda_max;
        cfg.verify.lambda_max = *cli.lambda_max;
    }
    if (cli.step) {
        cfg.sweep.step = *cli.step;
        cfg.verify.step = *cli.step;
    }
    if (cli.t_final) cfg.evolve.t_final = *cli.t_final;
    if (cli.dt_evolve) cfg.evolve.dt = *cli.dt_evolve;
    if (cli.delta) cfg.evolve.delta = *cli.delta;
    if (cli.record_every) cfg.evolve.record_every = *cli.record_every;
    if (cli.mode_index) cfg.evolve.mode_index = static_cast<int>(*cli.mode_index);
    if (cli.renormalize) cfg.evolve.renormalize = true;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D Gross-Pitaevskii ground states, approximations and dynamics"};
    app.require_subcommand(1);
    Cli cli;

    CLI::App* ground = app.add_subcommand("ground", "solve one ground state");
    CLI::App* sweep = app.add_subcommand("sweep", "warm-started lambda sweep");
    CLI::App* variational = app.add_subcommand("variational", "Gaussian trial approximation");
    CLI::App* tf = app.add_subcommand("tf", "Thomas-Fermi chemical potentials");
    CLI::App* evolve = app.add_subcommand("evolve", "propagate a perturbed ground state");
    CLI::App* verify = app.add_subcommand("verify", "run the cross-method invariant suite");
    CLI::App* figure = app.add_subcommand("figure", "emit standard curve data");
    for (CLI::App* cmd : {ground, sweep, variational, tf, evolve, verify, figure})
        add_common(cmd, cli);
    for (CLI::App* cmd : {sweep, verify}) {
        cmd->add_option("--lambda-min", cli.lambda_min, "sweep start");
        cmd->add_option("--lambda-max", cli.lambda_max, "sweep end");
        cmd->add_option("--step", cli.step, "sweep step");
    }
    evolve->add_option("--t-final", cli.t_final, "propagation horizon");
    evolve->add_option("--dt-evolve", cli.dt_evolve, "propagation time step");
    evolve->add_option("--delta", cli.delta, "perturbation size in the X-norm");
    evolve->add_option("--record-every", cli.record_every, "steps between records");
    evolve->add_option("--mode-index", cli.mode_index, "Hermite perturbation mode");
    evolve->add_flag("--renormalize", cli.renormalize, "renormalize perturbed data");
    figure->add_option("--which", cli.which, "fig1, fig2 or fig3");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (figure->parsed()) {
            const bec1d::FigureKind kind = bec1d::parse_figure_kind(cli.which);
            const double c_omega = cli.c_omega.value_or(1.0);
            const std::string path = cli.out.value_or(cli.which + ".csv");
            std::ofstream os(path);
            if (!os) throw bec1d::ConfigError("output.path", "cannot open '" + path + "'");
            bec1d::emit_figure_data(kind, c_omega, os);
            std::cout << "figure data written to " << path << "\n";
            return 0;
        }
        bec1d::RunMode mode = bec1d::RunMode::ground;
        if (ground->parsed()) mode = bec1d::RunMode::ground;
        if (sweep->parsed()) mode = bec1d::RunMode::sweep;
        if (variational->parsed()) mode = bec1d::RunMode::variational;
        if (tf->parsed()) mode = bec1d::RunMode::tf;
        if (evolve->parsed()) mode = bec1d::RunMode::evolve;
        if (verify->parsed()) mode = bec1d::RunMode::verify;
        const bec1d::RunConfig cfg = assemble(cli, mode);
        return bec1d::run(cfg);
    } catch (const bec1d::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
