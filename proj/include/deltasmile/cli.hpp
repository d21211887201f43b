/**
 * @file cli.hpp
 * @brief Batch front end: config parsing, command dispatch, CSV/JSON tables.
 *
 * Commands
 *   feller    boundary classification rows over a delta list
 *   geodesic  half-plane geodesic path samples (t, x, y, vx, vy)
 *   kernel    heat-kernel values between the spot image and strike images
 *   digital   digital density P over a strike x maturity grid
 *   smile     local and implied volatility curves over a delta list
 *   validate  Monte Carlo cross-check of the implied-vol pipeline
 *
 * The config is a line-based "section.key = value" file; '#' starts a
 * comment, lists are comma-separated, and unknown keys are rejected. Output
 * is CSV (UTF-8, LF, '.' decimal, %.17g) or a JSON array mirroring the same
 * field names. Identical config and seed produce byte-identical files.
 */
#pragma once

#include "deltasmile/errors.hpp"
#include "deltasmile/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace deltasmile::cli {

/// Fully parsed run request.
struct RunConfig {
    // model block
    model::ModelParams params{};
    double f0 = 1.0;
    double sigma0 = 0.2;

    // task block
    std::string command;              ///< set from the command line
    std::vector<double> taus{0.25};   ///< task.tau (single value or list)
    std::vector<double> strikes;      ///< task.strikes
    std::vector<double> deltas;       ///< task.deltas; empty = model delta
    std::vector<double> vols;         ///< task.vols (kernel ordinates)
    int order = 0;                    ///< task.order, 0 or 1
    std::size_t samples = 50;         ///< task.samples (geodesic rows)
    double x0 = 0.0;                  ///< task.x0 (geodesic start, image plane)
    double y0 = 1.0;                  ///< task.y0
    double angle = 1.5707963267948966;///< task.angle (radians from +x axis)
    double length = 1.0;              ///< task.length (proper time)
    double vol_tol = 0.005;           ///< task.vol_tol (validate band floor)

    // numerics block
    double epsilon = 1e-9;            ///< numerics.epsilon (reserved knob)
    std::size_t mc_paths = 100000;    ///< numerics.mc_paths
    std::size_t mc_steps = 250;       ///< numerics.mc_steps
    std::uint64_t seed = 1;           ///< numerics.seed
    double vol_floor = 0.0;           ///< numerics.vol_floor
    bool antithetic = true;           ///< numerics.antithetic

    // output block
    std::string format = "csv";       ///< output.format: csv | json
    std::string out_path;             ///< output.path; empty = stdout
};

/// One table cell: a number or a label.
using Cell = std::variant<double, std::string>;

/// Column-ordered result table shared by the CSV and JSON writers.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/**
 * @brief Parse a config file.
 * @throws ConfigError on unreadable files, malformed lines, unknown keys,
 *         or unparseable values (message names the offender).
 */
RunConfig parse_config(const std::string& path);

/// Parse one "section.key" assignment into the config (exposed for tests).
void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value);

/// Build the result table for the configured command (no I/O).
Table run_command(const RunConfig& cfg);

/// Serialize a table (CSV with LF endings or a JSON array of objects).
std::string render_table(const Table& table, const std::string& format);

/**
 * @brief Parse-free entry point: validate, compute, and write the output.
 *
 * Returns 0 on success and 4 when the validate command finds mismatches
 * (the table is still written). Config problems throw ConfigError; numeric
 * failures propagate as the corresponding error types.
 */
int run(const RunConfig& cfg, std::ostream& log);

} // namespace deltasmile::cli
