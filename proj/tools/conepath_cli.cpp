// conepath run <scenario-file> [--out DIR] [--seed N] [--step H] [--tol-scale S]
// conepath export <artifact-dir>
//
// Exit codes: 0 all gates pass, 1 tolerance failure or missing artifacts,
// 2 parse or admissibility error.

#include "conepath/runner.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

int run(const std::string& file, const std::string& out, std::optional<std::uint64_t> seed, std::optional<double> step,
        double tol_scale) {
    using namespace conepath;
    Scenario sc;
    try {
        sc = parse_scenario_file(file);
    } catch (const ParseError& e) {
        std::cerr << file << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    RunOptions opts;
    opts.out_dir = out.empty() ? (std::filesystem::path(default_output_root()) / sc.name).string() : out;
    opts.seed = seed;
    opts.step = step;
    opts.tol_scale = tol_scale;

    RunResult r;
    try {
        r = run_scenario(sc, opts, std::cout);
    } catch (const DomainError& e) {
        std::cerr << sc.name << ": " << e.what() << '\n';
        return 2;
    }
    std::cout << "artifacts in " << opts.out_dir << ":";
    for (const auto& a : r.artifacts) std::cout << ' ' << a;
    std::cout << '\n';
    if (!r.pass()) {
        std::cerr << "failing checks:\n";
        for (const auto& c : r.checks)
            if (c.asserted && !c.pass) {
                std::cerr << "  " << c.task << '.' << c.name << " = " << c.value << " (need " << c.relation << ' '
                          << c.bound << ')';
                if (!c.note.empty()) std::cerr << ": " << c.note;
                std::cerr << '\n';
            }
    }
    return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Positive paths of contactomorphisms and globally hyperbolic cone structures"};
    app.require_subcommand(1);

    std::string scenario, out;
    std::optional<std::uint64_t> seed;
    std::optional<double> step;
    double tol_scale = 1.0;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its artifacts");
    run_cmd->add_option("scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", out, "Output directory (default: $CONEPATH_OUT/<name>)");
    run_cmd->add_option("--seed", seed, "Override the scenario seed");
    run_cmd->add_option("--step", step, "Override the integrator step")->check(CLI::PositiveNumber);
    run_cmd->add_option("--tol-scale", tol_scale, "Scale every tolerance gate")->check(CLI::PositiveNumber);

    std::string artifacts;
    auto* export_cmd = app.add_subcommand("export", "Write plot-ready CSVs from an artifact directory");
    export_cmd->add_option("artifact-dir", artifacts, "Directory written by 'run'")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (*run_cmd) return run(scenario, out, seed, step, tol_scale);
    try {
        for (const auto& f : conepath::export_plotdata(artifacts)) std::cout << f << '\n';
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    return 0;
}
