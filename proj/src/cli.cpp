/**
 * @file cli.cpp
 * @brief Config parsing, command dispatch, and table serialization.
 */

#include "deltasmile/cli.hpp"

#include "deltasmile/geometry.hpp"
#include "deltasmile/kernel.hpp"
#include "deltasmile/oracle.hpp"
#include "deltasmile/pricing.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace deltasmile::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("config: value of '" + key + "' is not a number: '" +
                          value + "'");
    }
    if (used != value.size())
        throw ConfigError("config: trailing characters in value of '" + key +
                          "': '" + value + "'");
    return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("config: empty element in list '" + key + "'");
        out.push_back(parse_double(key, item));
    }
    if (out.empty())
        throw ConfigError("config: list '" + key + "' has no elements");
    return out;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    const double d = parse_double(key, value);
    if (!(d >= 0.0) || d != std::floor(d))
        throw ConfigError("config: '" + key + "' must be a non-negative "
                          "integer, got '" + value + "'");
    return static_cast<std::size_t>(d);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config: '" + key + "' must be true/false/0/1, got '" +
                      value + "'");
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void require_strikes(const RunConfig& cfg) {
    if (cfg.strikes.empty())
        throw ConfigError("config: command '" + cfg.command +
                          "' needs a non-empty task.strikes list");
    for (double K : cfg.strikes)
        if (!(K > 0.0))
            throw ConfigError("config: strikes must be > 0, got " +
                              format_number(K));
}

void require_taus(const RunConfig& cfg) {
    if (cfg.taus.empty())
        throw ConfigError("config: command '" + cfg.command +
                          "' needs a non-empty task.tau list");
    for (double t : cfg.taus)
        if (!(t > 0.0))
            throw ConfigError("config: maturities must be > 0, got " +
                              format_number(t));
}

Table feller_table(const RunConfig& cfg) {
    Table table;
    table.columns = {"delta", "lambda", "mu",      "nu",
                     "ratio", "verdict", "numeric_consistent"};
    std::vector<double> deltas =
        cfg.deltas.empty() ? std::vector<double>{cfg.params.delta} : cfg.deltas;
    for (double delta : deltas) {
        const auto report = model::feller_numeric_check(
            delta, cfg.params.lambda_raw, cfg.params.mu_raw, cfg.params.nu);
        const double ratio = 2.0 * cfg.params.lambda_raw * cfg.params.mu_raw /
                             (cfg.params.nu * cfg.params.nu);
        table.rows.push_back({delta, cfg.params.lambda_raw, cfg.params.mu_raw,
                              cfg.params.nu, ratio,
                              std::string(model::to_string(report.analytic.verdict)),
                              std::string(report.consistent ? "yes" : "no")});
    }
    return table;
}

Table geodesic_table(const RunConfig& cfg) {
    if (cfg.samples < 2)
        throw ConfigError("config: task.samples must be >= 2, got " +
                          std::to_string(cfg.samples));
    if (!(cfg.y0 > 0.0))
        throw ConfigError("config: task.y0 must be > 0, got " +
                          format_number(cfg.y0));
    const double delta = cfg.params.delta;
    geometry::GeodesicState start;
    start.point = {cfg.x0, cfg.y0, geometry::Frame::DeltaSpace};
    const double speed = std::pow(cfg.y0, delta); // unit metric speed
    start.vx = speed * std::cos(cfg.angle);
    start.vy = speed * std::sin(cfg.angle);
    geometry::StepControl control;
    control.sample_dt = cfg.length / static_cast<double>(cfg.samples - 1);
    const auto path = geometry::geodesic_integrate(delta, start, cfg.length, control);
    Table table;
    table.columns = {"t", "x", "y", "vx", "vy"};
    for (const auto& sample : path.samples)
        table.rows.push_back({sample.t, sample.state.point.x,
                              sample.state.point.y, sample.state.vx,
                              sample.state.vy});
    return table;
}

Table kernel_table(const RunConfig& cfg) {
    require_strikes(cfg);
    require_taus(cfg);
    const auto spec = kernel::IsometrySpec::from_model(cfg.params);
    const auto eff = kernel::effective_params(cfg.params);
    const auto source = kernel::phi_forward(
        spec, {cfg.f0, cfg.sigma0 / cfg.params.nu, geometry::Frame::ModelSpace});
    const kernel::DriftField field{spec, eff.lambda, eff.mu};
    const double k1 = kernel::k1_origin(cfg.params.delta, field.at(source));
    std::vector<double> vols = cfg.vols;
    if (vols.empty())
        vols = {0.5 * cfg.sigma0, cfg.sigma0, 2.0 * cfg.sigma0};
    Table table;
    table.columns = {"tau", "K", "Sigma", "d", "W", "K1_0", "density"};
    for (double tau : cfg.taus) {
        const double s = eff.s_scale * tau;
        for (double K : cfg.strikes) {
            for (double vol : vols) {
                const auto target = kernel::phi_forward(
                    spec, {K, vol / cfg.params.nu, geometry::Frame::ModelSpace});
                const auto terms = kernel::kernel_terms(spec, eff.lambda, eff.mu,
                                                        source, target, s);
                const double density = kernel::heat_kernel_density(
                    spec, source, target, s, cfg.order, eff.lambda, eff.mu);
                table.rows.push_back(
                    {tau, K, vol, terms.d, terms.w, k1, density});
            }
        }
    }
    return table;
}

Table digital_table(const RunConfig& cfg) {
    require_strikes(cfg);
    require_taus(cfg);
    Table table;
    table.columns = {"tau", "K",         "P",      "M",
                     "d",   "W",         "sigma_min", "i_delta",
                     "feller_ok"};
    for (double tau : cfg.taus) {
        for (double K : cfg.strikes) {
            const auto detail = pricing::digital_density_detail(
                cfg.params, tau, cfg.f0, cfg.sigma0, K);
            const double p = cfg.order == 0 ? detail.p0 : detail.p1;
            const double m = cfg.order == 0 ? detail.m0 : detail.m1;
            table.rows.push_back({tau, K, p, m, detail.d, detail.w,
                                  detail.sigma_min, detail.i_delta,
                                  static_cast<double>(detail.feller_ok)});
        }
    }
    return table;
}

Table smile_table(const RunConfig& cfg) {
    require_strikes(cfg);
    require_taus(cfg);
    const double tau = cfg.taus.front();
    const std::string label =
        cfg.order == 0 ? "order-0" : "order-1 (constructed)";
    std::vector<double> deltas =
        cfg.deltas.empty() ? std::vector<double>{cfg.params.delta} : cfg.deltas;
    Table table;
    table.columns = {"delta", "K",       "sigma_K", "sigma_B",
                     "f_av",  "i_delta", "status",  "order_label"};
    for (double delta : deltas) {
        model::ModelParams params = cfg.params;
        params.delta = delta;
        params.validate();
        const auto curve = pricing::smile_curve(params, tau, cfg.f0, cfg.sigma0,
                                                cfg.strikes, cfg.order);
        for (const auto& pt : curve)
            table.rows.push_back({delta, pt.strike, pt.sigma_local,
                                  pt.sigma_implied, pt.f_average, pt.i_delta,
                                  std::string(pt.ok ? "ok" : pt.error), label});
    }
    return table;
}

Table validate_table(const RunConfig& cfg, bool& mismatch) {
    require_strikes(cfg);
    require_taus(cfg);
    const double tau = cfg.taus.front();
    oracle::SimConfig sim;
    sim.n_paths = cfg.mc_paths;
    sim.n_steps = cfg.mc_steps;
    sim.seed = cfg.seed;
    sim.vol_floor = cfg.vol_floor;
    sim.antithetic = cfg.antithetic;
    const auto samples =
        oracle::simulate(cfg.params, tau, cfg.f0, cfg.sigma0, sim);
    Table table;
    table.columns = {"K", "sigma_B_mc", "sigma_B", "diff", "tol", "status"};
    mismatch = false;
    for (double K : cfg.strikes) {
        double model_vol = std::nan("");
        double mc_vol = std::nan("");
        double diff = std::nan("");
        double tol = cfg.vol_tol;
        std::string status;
        try {
            model_vol = pricing::implied_vol(cfg.params, tau, cfg.f0,
                                             cfg.sigma0, K, cfg.order);
            const auto est = oracle::mc_implied_vol(samples, K, tau, cfg.f0);
            mc_vol = est.sigma;
            diff = std::abs(mc_vol - model_vol);
            tol = std::max(cfg.vol_tol,
                           1.5 * (est.sigma_hi - est.sigma_lo));
            status = diff <= tol ? "pass" : "fail";
        } catch (const Error& err) {
            status = std::string("error: ") + err.what();
        }
        if (status != "pass") mismatch = true;
        table.rows.push_back({K, mc_vol, model_vol, diff, tol, status});
    }
    return table;
}

} // namespace

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot read '" + path + "'");
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not a 'key = value' assignment: '" + line +
                              "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " has an empty key or value");
        apply_config_entry(cfg, key, value);
    }
    return cfg;
}

void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value) {
    if (key == "model.delta") cfg.params.delta = parse_double(key, value);
    else if (key == "model.beta") cfg.params.beta = parse_double(key, value);
    else if (key == "model.nu") cfg.params.nu = parse_double(key, value);
    else if (key == "model.rho") cfg.params.rho = parse_double(key, value);
    else if (key == "model.lambda") cfg.params.lambda_raw = parse_double(key, value);
    else if (key == "model.mu") cfg.params.mu_raw = parse_double(key, value);
    else if (key == "model.f0") cfg.f0 = parse_double(key, value);
    else if (key == "model.sigma0") cfg.sigma0 = parse_double(key, value);
    else if (key == "task.command") cfg.command = value;
    else if (key == "task.tau") cfg.taus = parse_list(key, value);
    else if (key == "task.strikes") cfg.strikes = parse_list(key, value);
    else if (key == "task.deltas") cfg.deltas = parse_list(key, value);
    else if (key == "task.vols") cfg.vols = parse_list(key, value);
    else if (key == "task.order") {
        const double order = parse_double(key, value);
        if (order != 0.0 && order != 1.0)
            throw ConfigError("config: task.order must be 0 or 1, got '" +
                              value + "'");
        cfg.order = static_cast<int>(order);
    } else if (key == "task.samples") cfg.samples = parse_count(key, value);
    else if (key == "task.x0") cfg.x0 = parse_double(key, value);
    else if (key == "task.y0") cfg.y0 = parse_double(key, value);
    else if (key == "task.angle") cfg.angle = parse_double(key, value);
    else if (key == "task.length") cfg.length = parse_double(key, value);
    else if (key == "task.vol_tol") cfg.vol_tol = parse_double(key, value);
    else if (key == "numerics.epsilon") cfg.epsilon = parse_double(key, value);
    else if (key == "numerics.mc_paths") cfg.mc_paths = parse_count(key, value);
    else if (key == "numerics.mc_steps") cfg.mc_steps = parse_count(key, value);
    else if (key == "numerics.seed")
        cfg.seed = static_cast<std::uint64_t>(parse_count(key, value));
    else if (key == "numerics.vol_floor") cfg.vol_floor = parse_double(key, value);
    else if (key == "numerics.antithetic") cfg.antithetic = parse_bool(key, value);
    else if (key == "output.format") {
        if (value != "csv" && value != "json")
            throw ConfigError("config: output.format must be csv or json, got '" +
                              value + "'");
        cfg.format = value;
    } else if (key == "output.path") cfg.out_path = value;
    else throw ConfigError("config: unknown key '" + key + "'");
}

Table run_command(const RunConfig& cfg) {
    bool mismatch = false;
    if (cfg.command == "feller") return feller_table(cfg);
    if (cfg.command == "geodesic") return geodesic_table(cfg);
    if (cfg.command == "kernel") return kernel_table(cfg);
    if (cfg.command == "digital") return digital_table(cfg);
    if (cfg.command == "smile") return smile_table(cfg);
    if (cfg.command == "validate") return validate_table(cfg, mismatch);
    throw ConfigError("config: unknown command '" + cfg.command + "'");
}

std::string render_table(const Table& table, const std::string& format) {
    if (format == "csv") {
        std::string out;
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out += ',';
            out += table.columns[c];
        }
        out += '\n';
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out += ',';
                if (const double* num = std::get_if<double>(&row[c]))
                    out += format_number(*num);
                else
                    out += std::get<std::string>(row[c]);
            }
            out += '\n';
        }
        return out;
    }
    if (format == "json") {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            nlohmann::ordered_json obj;
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (const double* num = std::get_if<double>(&row[c]))
                    obj[table.columns[c]] = *num;
                else
                    obj[table.columns[c]] = std::get<std::string>(row[c]);
            }
            rows.push_back(std::move(obj));
        }
        return rows.dump(2) + "\n";
    }
    throw ConfigError("config: output.format must be csv or json, got '" +
                      format + "'");
}

int run(const RunConfig& cfg, std::ostream& log) {
    if (cfg.command.empty())
        throw ConfigError("config: no command given");
    // feller classifies exponents outside the pricing range and geodesic only
    // needs the half-plane geometry, so only the pricing commands get the
    // full model-parameter domain check up front
    if (cfg.command == "kernel" || cfg.command == "digital" ||
        cfg.command == "smile" || cfg.command == "validate")
        cfg.params.validate();

    bool mismatch = false;
    Table table;
    if (cfg.command == "validate")
        table = validate_table(cfg, mismatch);
    else
        table = run_command(cfg);

    const std::string rendered = render_table(table, cfg.format);
    if (cfg.out_path.empty()) {
        log << rendered;
    } else {
        std::ofstream out(cfg.out_path, std::ios::binary);
        if (!out)
            throw ConfigError("config: cannot write '" + cfg.out_path + "'");
        out << rendered;
        if (!out)
            throw NumericalFailure("output: short write to '" + cfg.out_path +
                                   "'");
        log << cfg.command << ": wrote " << table.rows.size() << " rows to "
            << cfg.out_path << "\n";
    }
    return mismatch ? 4 : 0;
}

} // namespace deltasmile::cli
