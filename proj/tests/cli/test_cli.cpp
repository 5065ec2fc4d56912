#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "metasir/cli/commands.hpp"
#include "metasir/errors.hpp"
#include "metasir/moments.hpp"

using namespace metasir;
using namespace metasir::cli;

namespace {

namespace fs = std::filesystem;

Scenario reference_scenario(double b2 = 1.0, double alpha = 4.0)
{
    Scenario s;
    s.network = NetworkConfig::reference();
    s.network.tier2.bias = b2;
    s.network.tier1.path_loss_exponent = s.network.tier2.path_loss_exponent = alpha;
    return s;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream cell_stream(line);
        std::string cell;
        while (std::getline(cell_stream, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("metasir_cli_test_" + std::to_string(std::rand())))
    {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run_tool(const std::string& args)
{
    const std::string cmd = std::string(METASIR_TOOL) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

const char* kReferenceConfig = R"({
  "tier1": {"power_w": 50, "bias": 1, "alpha": 4, "density_per_km2": 2},
  "tier2": {"power_w": 5, "bias": 1, "alpha": 4, "density_per_km2": 70},
  "theta_d_db": 0, "theta_2_db": 0
})";

} // namespace

TEST_CASE("range and sweep parsing")
{
    const auto grid = parse_range("0.05:0.05:0.95", SweepVariable::X).values();
    REQUIRE(grid.size() == 19);
    CHECK(grid.front() == 0.05);
    CHECK(grid.back() == doctest::Approx(0.95));

    const SweepSpec s = parse_sweep("theta_db=-20:0.5:20");
    CHECK(s.variable == SweepVariable::ThetaDb);
    CHECK(s.steps == 81);
    CHECK(parse_sweep("lambda2=10:10:100").values().back() == doctest::Approx(100.0));
    CHECK(parse_sweep("bias2=1:1:3").variable == SweepVariable::Bias2);

    CHECK_THROWS_AS(parse_range("1:0:2", SweepVariable::X), ConfigError);
    CHECK_THROWS_AS(parse_range("2:1:1", SweepVariable::X), ConfigError);
    CHECK_THROWS_AS(parse_range("0:5:1", SweepVariable::X), ConfigError);
    CHECK_THROWS_AS(parse_range("0:1", SweepVariable::X), ConfigError);
    CHECK_THROWS_AS(parse_sweep("speed=1:1:3"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("1:1:3"), ConfigError);
}

TEST_CASE("number lists and formatting")
{
    CHECK(parse_number_list("-10,0,10") == std::vector<double>{-10.0, 0.0, 10.0});
    CHECK_THROWS_AS(parse_number_list("1,,2"), ConfigError);
    CHECK_THROWS_AS(parse_number_list("1,x"), ConfigError);
    CHECK(format_number(0.25) == "0.25");
    CHECK(format_number(-10.0) == "-10");
    CHECK(format_number(1.0 / 3.0) == "0.3333333333");
}

TEST_CASE("meta-curve CSV: header, row count and ordering")
{
    MetaCurveRequest r;
    r.scenario = reference_scenario();
    r.theta_db = {-10.0, 0.0, 10.0};
    r.xs = parse_range("0.05:0.05:0.95", SweepVariable::X).values();
    r.methods = {CurveMethod::GilPelaez, CurveMethod::Beta, CurveMethod::Empirical};
    r.n_realizations = 200;
    const auto rows = parse_csv(meta_curve_csv(r));
    REQUIRE(rows.size() == 1 + 3 * 19 * 3);
    CHECK(rows[0] == std::vector<std::string>{"theta_db", "x", "method", "ccdf"});
    CHECK(rows[1] == std::vector<std::string>{"-10", "0.05", "gil-pelaez", rows[1][3]});
    CHECK(rows[2][2] == "beta");
    CHECK(rows[3][2] == "empirical");
    CHECK(rows[4][1] == "0.1");
    CHECK(rows.back()[0] == "10");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double v = std::stod(rows[i][3]);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("coverage-variance CSV")
{
    CoverageVarianceRequest r{reference_scenario(), parse_sweep("theta_db=-40:1:20").values()};
    const auto rows = parse_csv(coverage_variance_csv(r));
    REQUIRE(rows.size() == 62);
    CHECK(rows[0] == std::vector<std::string>{"theta_db", "m1_total", "variance"});
    CHECK(std::stod(rows[1][1]) > 0.99);
    CHECK(std::stod(rows[1][2]) < 1e-3);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][2]) >= 0.0);
    }

    std::vector<std::vector<std::vector<std::string>>> overlays;
    for (double b2 : {1.0, 10.0, 30.0}) {
        overlays.push_back(parse_csv(coverage_variance_csv({reference_scenario(b2), r.theta_db})));
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(overlays[0][i][1]) > std::stod(overlays[1][i][1]));
        CHECK(std::stod(overlays[1][i][1]) > std::stod(overlays[2][i][1]));
    }
}

TEST_CASE("local-delay CSV")
{
    LocalDelayRequest r{reference_scenario(10.0), parse_sweep("lambda2=10:10:100").values(), {3.0, 4.0}, -10.0};
    const auto rows = parse_csv(local_delay_csv(r));
    REQUIRE(rows.size() == 21);
    CHECK(rows[0] == std::vector<std::string>{"lambda2", "alpha", "delay"});
    for (std::size_t i = 1; i <= 10; ++i) {
        CHECK(rows[i][1] == "3");
        CHECK(rows[i + 10][1] == "4");
        CHECK(std::stod(rows[i][2]) >= std::stod(rows[i + 10][2]));
        if (i > 1) {
            CHECK(std::stod(rows[i][2]) >= std::stod(rows[i - 1][2]));
            CHECK(std::stod(rows[i + 10][2]) >= std::stod(rows[i + 9][2]));
        }
    }

    LocalDelayRequest divergent{reference_scenario(), {10.0, 70.0}, {4.0}, 0.0};
    const auto divergent_rows = parse_csv(local_delay_csv(divergent));
    REQUIRE(divergent_rows.size() == 3);
    CHECK(divergent_rows[1][2] == "inf");
    CHECK(divergent_rows[2][2] == "inf");

    Scenario silent = reference_scenario();
    silent.network.theta_d = silent.network.theta_2 = 0.0;
    LocalDelayRequest unit{silent, {10.0, 50.0}, {}, std::nullopt};
    const auto unit_rows = parse_csv(local_delay_csv(unit));
    CHECK(unit_rows[1][2] == "1");
    CHECK(unit_rows[2][2] == "1");
}

TEST_CASE("simulate: byte-identical reruns and summary contents")
{
    SimulateRequest r{reference_scenario(), 1000, 7, parse_range("0.05:0.05:0.95", SweepVariable::X).values(), nullptr};
    const SimulateOutput a = simulate(r);
    const SimulateOutput b = simulate(r);
    CHECK(a.csv == b.csv);
    CHECK(a.summary.dump() == b.summary.dump());
    CHECK(parse_csv(a.csv).size() == 20);

    const auto& s = a.summary;
    const double f2 = s.at("association_frequency").at("tier2").get<double>();
    CHECK(std::abs(f2 - 0.917) < 0.03);
    CHECK(s.at("analytic_moments").at("1").get<double>() == doctest::Approx(0.3764).epsilon(1e-4));
    CHECK(s.at("empirical_moments").at("1").contains("standard_error"));
    CHECK(s.at("z_scores").at("1").is_number());
    CHECK(s.at("analytic_moments").at("-1") == "inf");
}

TEST_CASE("command-line process behaviour")
{
    TempDir dir;
    const fs::path config = dir.path / "ref.json";
    std::ofstream(config) << kReferenceConfig;
    const fs::path broken = dir.path / "broken.json";
    std::ofstream(broken) << "{ not json";

    const fs::path out = dir.path / "curve.csv";
    CHECK(run_tool("meta-curve --config " + broken.string() + " --out " + out.string()) == kExitUsage);
    CHECK_FALSE(fs::exists(out));

    CHECK(run_tool("coverage-variance --config " + (dir.path / "missing.json").string() + " --out " + out.string()) ==
          kExitUsage);
    CHECK_FALSE(fs::exists(out));

    CHECK(run_tool("meta-curve --config " + config.string() + " --method spline --out " + out.string()) ==
          kExitUsage);
    CHECK(run_tool("meta-curve --config " + config.string() + " --x-grid 0.5:0.1:0.2 --out " + out.string()) ==
          kExitUsage);
    CHECK(run_tool("frobnicate") == kExitUsage);
    CHECK_FALSE(fs::exists(out));

    CHECK(run_tool("meta-curve --config " + config.string() + " --method beta --theta-db=-10,0,10 --out " +
                   out.string()) == kExitOk);
    const auto rows = parse_csv(read_file(out));
    CHECK(rows.size() == 1 + 3 * 19);

    const fs::path sim1 = dir.path / "sim1.csv";
    const fs::path sim2 = dir.path / "sim2.csv";
    CHECK(run_tool("simulate --config " + config.string() + " --n 1000 --seed 3 --out " + sim1.string()) == kExitOk);
    CHECK(run_tool("simulate --config " + config.string() + " --n 1000 --seed 3 --out " + sim2.string()) == kExitOk);
    CHECK(read_file(sim1) == read_file(sim2));
    CHECK(read_file(dir.path / "sim1.summary.json") == read_file(dir.path / "sim2.summary.json"));

    const fs::path delay = dir.path / "delay.csv";
    CHECK(run_tool("local-delay --config " + config.string() + " --alpha 4 --out " + delay.string()) == kExitOk);
    CHECK(read_file(delay).find("inf") != std::string::npos);
}
