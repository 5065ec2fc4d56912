#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "metasir/meta_distribution.hpp"
#include "metasir/network_model.hpp"
#include "metasir/rng.hpp"

namespace metasir {

struct Point {
    double x;
    double y;
};

/// Square [-half_width, half_width]^2 (km) centred on the typical device.
struct SimWindow {
    double half_width = 10.0;

    double area() const noexcept { return 4.0 * half_width * half_width; }
};

/// 15 / sqrt(min density) km, but never below 10 km.
SimWindow default_window(const NetworkConfig& config);

/// Homogeneous PPP on the window: Poisson(density * area) points, i.i.d. uniform.
std::vector<Point> sample_ppp(double density, const SimWindow& window, Xoshiro256pp& rng);

/// Appends a PPP restricted to the square frame inner < max(|x|, |y|) <= outer.
void sample_ppp_frame(double density, double inner_half_width, double outer_half_width, Xoshiro256pp& rng,
                      std::vector<Point>& out);

struct Association {
    Tier tier;
    std::size_t serving_index; // into the winning tier's point set
    double serving_distance;
};

/// Biased max-received-power association on distances only: tier 1 wins iff
/// P1 B1 d1^{-alpha1} >= P2 B2 d2^{-alpha2} for the nearest node of each tier.
/// Throws SimulationError if either tier is empty.
Association associate_device(Point device, std::span<const Point> macro, std::span<const Point> relays,
                             const NetworkConfig& config);

/// Conditional success probability prod_i 1 / (1 + theta (d / r_i)^alpha)
/// under Rayleigh fading, given the serving distance and interferer distances.
double csp_link(double serving_distance, std::span<const double> interferer_distances, double theta, double alpha);

struct Realization {
    std::vector<Point> tier1_points;
    std::vector<Point> tier2_points;
    Tier associated_tier = Tier::Macro;
    std::size_t serving_index = 0;
    std::optional<std::size_t> first_hop_mbs_index; // MBS feeding the serving relay
    std::optional<double> csp_direct;
    std::optional<double> csp_first_hop;
    std::optional<double> csp_second_hop;
    double csp_total = 0.0;
};

struct SimulationOptions {
    SimWindow window;
    std::size_t n_realizations = 10000;
    std::uint64_t master_seed = 1;
    /// Points inside [-core, core]^2 are drawn from their own substream, the
    /// rest of the window from another. Runs that differ only in window size
    /// then share every point of the common core. Defaults to default_window().
    std::optional<double> core_half_width;
    std::vector<double> ccdf_grid; // defaults to 0.05, 0.10, ..., 0.95
    unsigned threads = 0;          // 0 = hardware concurrency
    int resample_budget = 100;
    std::ostream* dump = nullptr;  // JSON-lines realization dump; forces one thread
};

/// Options with the default window for this config.
SimulationOptions default_options(const NetworkConfig& config);

struct MomentEstimate {
    double b;
    double estimate;
    double standard_error;
};

struct SimulationStats {
    std::size_t n = 0;
    MetaCurve empirical_ccdf;
    std::vector<MomentEstimate> empirical_moments; // b = 1, 2 and, when stable, -1
    bool negative_moment_unstable = false;
    std::array<double, 2> association_frequency{}; // [tier1, tier2]
    std::vector<double> csp_total;                 // per realization, index order

    /// Throws std::out_of_range if b was not estimated.
    const MomentEstimate& moment(double b) const;
};

/// One realization: sample both tiers (resampling empty tiers), associate the
/// device at the origin, and evaluate the per-hop CSPs. A relay-served device
/// gets the second-hop CSP over the relay field and the first-hop CSP at the
/// serving relay's location toward its nearest MBS over the MBS field.
Realization sample_realization(const NetworkConfig& config, const SimulationOptions& options, std::uint64_t index);

/// Runs options.n_realizations independent realizations. Results depend only
/// on (config, options minus threads); thread count does not change any output.
SimulationStats run_simulation(const NetworkConfig& config, const SimulationOptions& options);

/// F(x) = #{csp > x} / n at each x.
MetaCurve empirical_ccdf(std::span<const double> csp, std::span<const double> xs);

/// One JSON object per line: points in km, CSP fields (null when absent).
void write_realization_json(std::ostream& out, const Realization& r, std::uint64_t index);

} // namespace metasir
