/**
 * @file deltasmile_main.cpp
 * @brief Command-line front end: deltasmile <command> --config FILE [--out FILE].
 *
 * Exit codes: 0 success, 2 config/usage error, 3 numeric or domain failure,
 * 4 validate-command mismatch (table still written).
 */

#include "deltasmile/cli.hpp"
#include "deltasmile/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <set>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"deltasmile: half-plane heat-kernel smile toolkit"};

    std::string command;
    std::string config_path;
    std::string out_path;
    long long seed = -1;
    int order = -1;

    app.add_option("command", command,
                   "one of: feller geodesic kernel digital smile validate")
        ->required();
    app.add_option("--config", config_path, "path to the run config file")
        ->required();
    app.add_option("--out", out_path, "output file (overrides output.path)");
    app.add_option("--seed", seed, "Monte Carlo seed (overrides numerics.seed)");
    app.add_option("--order", order,
                   "expansion order 0 or 1 (overrides task.order)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    static const std::set<std::string> known = {"feller", "geodesic", "kernel",
                                                "digital", "smile", "validate"};
    if (known.count(command) == 0) {
        std::cerr << "error: unknown command '" << command
                  << "' (expected feller, geodesic, kernel, digital, smile, "
                     "or validate)\n";
        return 2;
    }

    try {
        deltasmile::cli::RunConfig cfg =
            deltasmile::cli::parse_config(config_path);
        cfg.command = command;
        if (!out_path.empty()) cfg.out_path = out_path;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (order >= 0) {
            if (order > 1) {
                std::cerr << "error: --order must be 0 or 1, got " << order
                          << "\n";
                return 2;
            }
            cfg.order = order;
        }
        return deltasmile::cli::run(cfg, std::cout);
    } catch (const deltasmile::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const deltasmile::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
