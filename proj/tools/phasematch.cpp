// phasematch command-line tool.
//
//   phasematch trace --n 5 --steps 4 --mode optimized --format table
//   phasematch sweep --n 10 --points 1000 --out sweep_n10.csv
//   phasematch cutoff --n 4 --format json
//   phasematch critical-points
//   phasematch equivalence --n 12 --seed 7
//
// Flags override values from --config FILE (key=value lines), which
// override built-in defaults.

#include "phasematch/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace phasematch;

    CLI::App app{"Optimal phase pairs for the generalized Grover iterate"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "key=value file with defaults for any flag");

    std::string command;
    unsigned n = 0;
    int steps = 0;
    std::string mode;
    std::string format = "csv";
    ExperimentSpec spec;

    app.add_option("command", command, "trace | sweep | cutoff | critical-points | equivalence")->required();
    auto* n_opt = app.add_option("--n", n, "qubit count (N = 2^n)");
    auto* steps_opt = app.add_option("--steps", steps, "iterations (trace) or sequence length (equivalence)");
    auto* mode_opt = app.add_option("--mode", mode, "classical | optimized");
    app.add_option("--points", spec.num_points, "alpha grid size for sweep/cutoff")->capture_default_str();
    app.add_option("--out", spec.output_path, "output file (default stdout)");
    app.add_option("--format", format, "csv | json | table")->capture_default_str();
    app.add_option("--seed", spec.seed, "random seed")->capture_default_str();
    app.add_option("--grid", spec.grid, "coarse grid points per axis")->capture_default_str();
    app.add_option("--restarts", spec.restarts, "random refinement starts")->capture_default_str();
    app.add_option("--cases", spec.cases, "random phase sequences per n (equivalence)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        spec.command = parse_command(command);
        if (n_opt->count() > 0) spec.n = n;
        if (steps_opt->count() > 0) spec.steps = steps;
        if (mode_opt->count() > 0) spec.mode = parse_mode(mode);
        spec.format = parse_format(format);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
    return run_experiment(spec, std::cout, std::cerr);
}
