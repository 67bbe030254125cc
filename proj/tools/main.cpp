#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "stirap/errors.hpp"
#include "stirap/scenarios.hpp"

namespace {

stirap::Json load_config(const std::string& arg) {
    namespace fs = std::filesystem;
    if (fs::exists(arg)) {
        std::ifstream in(arg);
        stirap::Json config;
        try {
            in >> config;
        } catch (const std::exception& e) {
            throw stirap::ConfigError("cannot parse " + arg + ": " + e.what());
        }
        return config;
    }
    return stirap::Json{{"preset", arg}};
}

void print_result(const stirap::ScenarioResult& r) {
    std::cout << r.name << '\n';
    if (r.fidelity)
        std::cout << "  fidelity         " << *r.fidelity << "  (squared "
                  << (*r.fidelity) * (*r.fidelity) << ")\n";
    for (const auto& [label, p] : r.final_populations)
        std::cout << "  final |" << label << "|^2 = " << p << '\n';
    for (const auto& b : r.branches) {
        std::cout << "  branch " << b.outcome << ": p = " << b.probability;
        if (b.fidelity)
            std::cout << ", fidelity = " << *b.fidelity;
        std::cout << '\n';
    }
    for (const auto& f : r.files)
        std::cout << "  wrote " << f << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adiabatic cavity state transfer and preparation simulator"};
    app.require_subcommand(1);

    std::string target, out_dir;
    double tol = 0.0;
    int samples = 0, workers = 0;
    unsigned long long seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "output directory (default $CAVITY_STIRAP_OUT or .)");
        cmd->add_option("--tol", tol, "integrator tolerance override");
        cmd->add_option("--samples", samples, "trajectory sample count override");
        cmd->add_option("--workers", workers, "worker thread count");
        cmd->add_option("--seed", seed, "sample one measurement outcome (cat scenarios)")
            ->each([&](const std::string&) { seed_set = true; });
    };

    auto* run = app.add_subcommand("run", "run a preset or a JSON config");
    run->add_option("scenario", target, "preset name or config path")->required();
    add_common(run);

    auto* sweep = app.add_subcommand("sweep", "run a one-axis parameter sweep");
    sweep->add_option("config", target, "preset name or config path with a sweep section")
        ->required();
    add_common(sweep);

    auto* list = app.add_subcommand("list", "list the preset catalog");

    CLI11_PARSE(app, argc, argv);

    stirap::RunOptions opts;
    opts.out_dir = out_dir;
    opts.tolerance = tol;
    opts.samples = samples;
    opts.workers = workers;
    if (seed_set)
        opts.seed = seed;

    try {
        if (list->parsed()) {
            for (const auto& p : stirap::preset_catalog()) {
                std::cout << p.name << "\n    " << p.description << "\n    parameters: "
                          << p.parameters.dump() << "\n";
            }
            return 0;
        }
        if (run->parsed()) {
            print_result(stirap::run_scenario(load_config(target), opts));
            return 0;
        }
        if (sweep->parsed()) {
            stirap::Json config = load_config(target);
            if (!config.contains("sweep")) {
                // allow `sweep star_w_sweep_G`: expand catalog sweep entries
                for (const auto& p : stirap::preset_catalog())
                    if (p.name == target && p.parameters.contains("sweep"))
                        config = p.parameters;
            }
            const auto result = stirap::run_sweep(config, opts);
            std::cout << result.name << '\n';
            for (const auto& pt : result.points)
                std::cout << "  " << result.axis << " = " << pt.value
                          << "  fidelity = " << pt.fidelity << '\n';
            for (const auto& f : result.files)
                std::cout << "  wrote " << f << '\n';
            return 0;
        }
    } catch (const stirap::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const stirap::TruncationError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const stirap::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
