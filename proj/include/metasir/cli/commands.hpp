#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "metasir/config_io.hpp"
#include "metasir/meta_distribution.hpp"

namespace metasir::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;   // bad flags, unreadable or invalid config
inline constexpr int kExitNumeric = 3; // quadrature or simulation failure

enum class SweepVariable { ThetaDb, Lambda2, Bias2, X };

std::string_view to_string(SweepVariable v);

/// Inclusive arithmetic grid, written start:step:stop on the command line.
struct SweepSpec {
    SweepVariable variable = SweepVariable::X;
    double start = 0.0;
    double stop = 0.0;
    std::size_t steps = 0;

    std::vector<double> values() const;
};

/// "start:step:stop" -> grid. Throws ConfigError unless step > 0, start < stop
/// and the grid has at least two points.
SweepSpec parse_range(std::string_view text, SweepVariable variable);

/// "var=start:step:stop" with var in {theta_db, lambda2, bias2, x}.
SweepSpec parse_sweep(std::string_view text);

/// Comma-separated list of numbers.
std::vector<double> parse_number_list(std::string_view text);

/// Shortest round-trippable-enough rendering used in every CSV cell.
std::string format_number(double v);

struct MetaCurveRequest {
    Scenario scenario;
    std::vector<double> theta_db;
    std::vector<double> xs;
    std::vector<CurveMethod> methods;
    std::size_t n_realizations = 10000; // empirical method only
    std::uint64_t seed = 1;
};

/// CSV "theta_db,x,method,ccdf"; rows ordered by theta (as given), x, method.
/// Both thresholds are set to each theta.
std::string meta_curve_csv(const MetaCurveRequest& request);

struct CoverageVarianceRequest {
    Scenario scenario;
    std::vector<double> theta_db;
};

/// CSV "theta_db,m1_total,variance".
std::string coverage_variance_csv(const CoverageVarianceRequest& request);

struct LocalDelayRequest {
    Scenario scenario;
    std::vector<double> lambda2;
    std::vector<double> alphas;           // sets alpha_1 = alpha_2; empty keeps the config
    std::optional<double> theta_db;       // sets both thresholds; empty keeps the config
};

/// CSV "lambda2,alpha,delay"; divergent delays are written as `inf`.
/// Rows ordered by alpha, then lambda2.
std::string local_delay_csv(const LocalDelayRequest& request);

struct SimulateRequest {
    Scenario scenario;
    std::size_t n_realizations = 10000;
    std::uint64_t seed = 1;
    std::vector<double> xs;
    std::ostream* dump = nullptr;
};

struct SimulateOutput {
    std::string csv; // same columns as meta_curve_csv, method = empirical
    nlohmann::json summary;
};

SimulateOutput simulate(const SimulateRequest& request);

/// Writes through a temporary sibling and renames, so a failed command never
/// leaves a partial file behind.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

/// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv);

} // namespace metasir::cli
