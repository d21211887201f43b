#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deltasmile/cli.hpp"
#include "deltasmile/errors.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

using deltasmile::ConfigError;
namespace cli = deltasmile::cli;

namespace {

const std::filesystem::path kWorkDir = "/tmp/deltasmile_cli_test";

std::string write_file(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(kWorkDir);
    const auto path = (kWorkDir / name).string();
    std::ofstream out(path, std::ios::binary);
    REQUIRE(static_cast<bool>(out));
    out << content;
    return path;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Path of the installed binary: baked in by the build, with an environment
/// override for running the test outside it.
std::string cli_path() {
    const char* env = std::getenv("DSM_CLI_PATH");
    if (env != nullptr) return env;
#ifdef DSM_CLI_PATH
    return DSM_CLI_PATH;
#else
    REQUIRE_MESSAGE(false, "DSM_CLI_PATH must point at the binary");
    return "";
#endif
}

/// Run the binary, returning its exit code; stdout/stderr go to files.
int run_cli(const std::string& args) {
    std::filesystem::create_directories(kWorkDir);
    const std::string cmd = cli_path() + " " + args + " > " +
                            (kWorkDir / "stdout.txt").string() + " 2> " +
                            (kWorkDir / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

std::string last_stdout() { return read_file((kWorkDir / "stdout.txt").string()); }
std::string last_stderr() { return read_file((kWorkDir / "stderr.txt").string()); }

const char* kClassicModel =
    "model.delta = 1.0\n"
    "model.beta = 0.5\n"
    "model.nu = 0.3\n"
    "model.rho = -0.3\n"
    "model.f0 = 1.0\n"
    "model.sigma0 = 0.2\n";

} // namespace

TEST_CASE("config entries parse into the right fields") {
    cli::RunConfig cfg;
    cli::apply_config_entry(cfg, "model.delta", "0.75");
    cli::apply_config_entry(cfg, "model.nu", "0.4");
    cli::apply_config_entry(cfg, "task.strikes", "0.9, 1.0,1.1");
    cli::apply_config_entry(cfg, "task.order", "1");
    cli::apply_config_entry(cfg, "numerics.mc_paths", "5000");
    cli::apply_config_entry(cfg, "numerics.antithetic", "false");
    cli::apply_config_entry(cfg, "output.format", "json");
    CHECK(cfg.params.delta == 0.75);
    CHECK(cfg.params.nu == 0.4);
    REQUIRE(cfg.strikes.size() == 3);
    CHECK(cfg.strikes[1] == 1.0);
    CHECK(cfg.order == 1);
    CHECK(cfg.mc_paths == 5000);
    CHECK_FALSE(cfg.antithetic);
    CHECK(cfg.format == "json");
}

TEST_CASE("config rejects unknown keys and malformed values") {
    cli::RunConfig cfg;
    CHECK_THROWS_AS(cli::apply_config_entry(cfg, "model.gamma", "1"), ConfigError);
    CHECK_THROWS_AS(cli::apply_config_entry(cfg, "model.nu", "abc"), ConfigError);
    CHECK_THROWS_AS(cli::apply_config_entry(cfg, "model.nu", "0.3x"), ConfigError);
    CHECK_THROWS_AS(cli::apply_config_entry(cfg, "task.order", "2"), ConfigError);
    CHECK_THROWS_AS(cli::apply_config_entry(cfg, "task.strikes", "1.0,,2.0"),
                    ConfigError);
    CHECK_THROWS_AS(cli::apply_config_entry(cfg, "numerics.antithetic", "maybe"),
                    ConfigError);
    CHECK_THROWS_AS(cli::apply_config_entry(cfg, "numerics.mc_paths", "-5"),
                    ConfigError);
    CHECK_THROWS_AS(cli::apply_config_entry(cfg, "output.format", "xml"),
                    ConfigError);
}

TEST_CASE("config files support comments, blank lines, and spacing") {
    const auto path = write_file("parse.conf",
                                 "# header comment\n"
                                 "\n"
                                 "model.delta = 0.8   # trailing comment\n"
                                 "  task.tau=0.5,1.0  \n");
    const auto cfg = cli::parse_config(path);
    CHECK(cfg.params.delta == 0.8);
    REQUIRE(cfg.taus.size() == 2);
    CHECK(cfg.taus[0] == 0.5);
    CHECK(cfg.taus[1] == 1.0);

    const auto bad = write_file("parse_bad.conf", "model.delta 0.8\n");
    CHECK_THROWS_AS(cli::parse_config(bad), ConfigError);
    CHECK_THROWS_AS(cli::parse_config((kWorkDir / "missing.conf").string()),
                    ConfigError);
}

TEST_CASE("table rendering: CSV layout and JSON mirror") {
    cli::Table table;
    table.columns = {"K", "status"};
    table.rows.push_back({0.5, std::string("ok")});
    table.rows.push_back({1.25, std::string("fail")});

    const std::string csv = cli::render_table(table, "csv");
    CHECK(csv == "K,status\n0.5,ok\n1.25,fail\n");

    const auto parsed = nlohmann::json::parse(cli::render_table(table, "json"));
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0]["K"] == 0.5);
    CHECK(parsed[0]["status"] == "ok");
    CHECK(parsed[1]["K"] == 1.25);

    CHECK_THROWS_AS(cli::render_table(table, "yaml"), ConfigError);
}

TEST_CASE("run_command rejects unknown commands and missing grids") {
    cli::RunConfig cfg;
    cfg.command = "frobnicate";
    CHECK_THROWS_AS(cli::run_command(cfg), ConfigError);

    cfg.command = "digital";
    cfg.params.nu = 0.3;
    CHECK_THROWS_AS(cli::run_command(cfg), ConfigError);  // no strikes

    cfg.strikes = {1.0};
    cfg.taus.clear();
    CHECK_THROWS_AS(cli::run_command(cfg), ConfigError);  // no maturities
}

TEST_CASE("binary: digital runs are byte-identical and exit 0") {
    const auto conf = write_file("digital.conf",
                                 std::string(kClassicModel) +
                                     "task.tau = 0.1, 0.25\n"
                                     "task.strikes = 0.8, 0.9, 1.0, 1.1, 1.25\n");
    const auto out1 = (kWorkDir / "digital1.csv").string();
    const auto out2 = (kWorkDir / "digital2.csv").string();
    CHECK(run_cli("digital --config " + conf + " --out " + out1) == 0);
    CHECK(run_cli("digital --config " + conf + " --out " + out2) == 0);
    const std::string first = read_file(out1);
    CHECK(first == read_file(out2));
    CHECK(first.substr(0, first.find('\n')) ==
          "tau,K,P,M,d,W,sigma_min,i_delta,feller_ok");
    CHECK(first.find("\r") == std::string::npos);
}

TEST_CASE("binary: unknown config key exits 2 without writing output") {
    const auto conf = write_file("unknown_key.conf",
                                 std::string(kClassicModel) +
                                     "task.strikes = 1.0\n"
                                     "task.window = 3\n");
    const auto out = (kWorkDir / "never.csv").string();
    std::filesystem::remove(out);
    CHECK(run_cli("digital --config " + conf + " --out " + out) == 2);
    CHECK_FALSE(std::filesystem::exists(out));
    CHECK(last_stderr().find("task.window") != std::string::npos);
}

TEST_CASE("binary: missing strike grid exits 2 without writing output") {
    const auto conf = write_file("nostrikes.conf", kClassicModel);
    const auto out = (kWorkDir / "never2.csv").string();
    std::filesystem::remove(out);
    CHECK(run_cli("digital --config " + conf + " --out " + out) == 2);
    CHECK_FALSE(std::filesystem::exists(out));
    CHECK(run_cli("smile --config " + conf) == 2);
    CHECK(run_cli("validate --config " + conf) == 2);
}

TEST_CASE("binary: usage errors exit 2") {
    CHECK(run_cli("transmogrify --config /tmp/nonexistent.conf") == 2);
    CHECK(run_cli("digital") == 2);  // --config is required
    const auto conf = write_file("order.conf",
                                 std::string(kClassicModel) +
                                     "task.strikes = 1.0\n");
    CHECK(run_cli("digital --config " + conf + " --order 7") == 2);
}

TEST_CASE("binary: smile table is ordered in delta when sigma0 > 1") {
    // Sigma_min^delta grows with delta when the volatility level exceeds 1,
    // so the implied-vol columns of successive delta blocks must be ordered.
    const auto conf = write_file("smile_order.conf",
                                 "model.beta = 0.5\n"
                                 "model.nu = 0.2\n"
                                 "model.rho = 0.0\n"
                                 "model.sigma0 = 1.3\n"
                                 "task.tau = 0.1\n"
                                 "task.strikes = 0.98, 1.0, 1.02\n"
                                 "task.deltas = 0.5, 0.6, 0.7\n");
    const auto out = (kWorkDir / "smile_order.csv").string();
    REQUIRE(run_cli("smile --config " + conf + " --out " + out) == 0);

    std::ifstream in(out);
    std::string line;
    std::getline(in, line);  // header
    CHECK(line == "delta,K,sigma_K,sigma_B,f_av,i_delta,status,order_label");
    struct Row { double delta, K, sigma_b; };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 8);
        CHECK(cells[6] == "ok");
        CHECK(cells[7] == "order-0");
        rows.push_back({std::stod(cells[0]), std::stod(cells[1]),
                        std::stod(cells[3])});
    }
    REQUIRE(rows.size() == 9);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(rows[k].sigma_b < rows[k + 3].sigma_b);
        CHECK(rows[k + 3].sigma_b < rows[k + 6].sigma_b);
        CHECK(rows[k].K == rows[k + 3].K);
    }
}

TEST_CASE("binary: feller sweep covers mixed verdicts") {
    const auto conf = write_file("feller.conf",
                                 "model.nu = 0.3\n"
                                 "model.lambda = 0.5\n"
                                 "model.mu = 0.05\n"
                                 "task.deltas = 0.4, 0.5, 0.75, 1.0, 1.5\n");
    const auto out = (kWorkDir / "feller.csv").string();
    REQUIRE(run_cli("feller --config " + conf + " --out " + out) == 0);
    const std::string csv = read_file(out);
    CHECK(csv.find("ExplosionPossible") != std::string::npos);
    CHECK(csv.find("NoExplosionRecurrent") != std::string::npos);
    // 2 lambda' mu' / nu^2 = 0.5555... puts delta = 1/2 in the explosive case
    CHECK(csv.find("0.5555555555") != std::string::npos);
}

TEST_CASE("binary: JSON output parses and mirrors the CSV columns") {
    const auto conf = write_file("json.conf",
                                 std::string(kClassicModel) +
                                     "task.strikes = 0.9, 1.1\n"
                                     "output.format = json\n");
    const auto out = (kWorkDir / "digital.json").string();
    REQUIRE(run_cli("digital --config " + conf + " --out " + out) == 0);
    const auto parsed = nlohmann::json::parse(read_file(out));
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 2);
    for (const auto& row : parsed) {
        CHECK(row.contains("tau"));
        CHECK(row.contains("K"));
        CHECK(row.contains("P"));
        CHECK(row["P"].is_number());
        CHECK(row["P"].get<double>() > 0.0);
    }
}

TEST_CASE("binary: validate passes near the money and flags dead strikes") {
    const auto conf = write_file("validate.conf",
                                 std::string(kClassicModel) +
                                     "task.tau = 0.1\n"
                                     "task.strikes = 0.95, 1.0, 1.05\n"
                                     "task.vol_tol = 0.02\n"
                                     "numerics.mc_paths = 20000\n"
                                     "numerics.mc_steps = 50\n"
                                     "numerics.seed = 7\n");
    CHECK(run_cli("validate --config " + conf) == 0);
    const std::string table = last_stdout();
    CHECK(table.find("pass") != std::string::npos);
    CHECK(table.find("fail") == std::string::npos);

    // a strike 17 standard deviations out has zero Monte Carlo payoff mass:
    // no implied vol exists there and the run must report the mismatch
    const auto dead = write_file("validate_dead.conf",
                                 std::string(kClassicModel) +
                                     "task.tau = 0.1\n"
                                     "task.strikes = 1.0, 3.0\n"
                                     "numerics.mc_paths = 20000\n"
                                     "numerics.mc_steps = 50\n"
                                     "numerics.seed = 7\n");
    const auto out = (kWorkDir / "validate_dead.csv").string();
    CHECK(run_cli("validate --config " + dead + " --out " + out) == 4);
    const std::string csv = read_file(out);
    CHECK(csv.find("pass") != std::string::npos);
    CHECK(csv.find("error") != std::string::npos);
}

TEST_CASE("binary: seed override changes the validate table deterministically") {
    const auto conf = write_file("seed.conf",
                                 std::string(kClassicModel) +
                                     "task.tau = 0.1\n"
                                     "task.strikes = 1.0\n"
                                     "numerics.mc_paths = 4000\n"
                                     "numerics.mc_steps = 25\n");
    const auto out1 = (kWorkDir / "seed1.csv").string();
    const auto out2 = (kWorkDir / "seed2.csv").string();
    const auto out3 = (kWorkDir / "seed3.csv").string();
    REQUIRE(run_cli("validate --config " + conf + " --seed 11 --out " + out1) == 0);
    REQUIRE(run_cli("validate --config " + conf + " --seed 11 --out " + out2) == 0);
    REQUIRE(run_cli("validate --config " + conf + " --seed 12 --out " + out3) == 0);
    CHECK(read_file(out1) == read_file(out2));
    CHECK(read_file(out1) != read_file(out3));
}

TEST_CASE("binary: geodesic sample count and unit-speed start") {
    const auto conf = write_file("geodesic.conf",
                                 "model.delta = 0.5\n"
                                 "task.y0 = 2.0\n"
                                 "task.angle = 0.7853981633974483\n"
                                 "task.length = 1.0\n"
                                 "task.samples = 11\n");
    const auto out = (kWorkDir / "geodesic.csv").string();
    REQUIRE(run_cli("geodesic --config " + conf + " --out " + out) == 0);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x,y,vx,vy");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    REQUIRE(rows.size() == 11);
    CHECK(rows.front()[0] == 0.0);
    CHECK(rows.back()[0] == doctest::Approx(1.0).epsilon(1e-9));
    // unit metric speed at the start: (vx^2+vy^2)/y^{2 delta} = 1
    const double y0 = rows.front()[2];
    const double v2 = rows.front()[3] * rows.front()[3] +
                      rows.front()[4] * rows.front()[4];
    CHECK(v2 / y0 == doctest::Approx(1.0).epsilon(1e-12));  // delta = 1/2
}
