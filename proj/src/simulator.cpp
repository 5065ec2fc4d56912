#include "metasir/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "metasir/errors.hpp"

namespace metasir {

namespace {

/// q^{alpha/2} for squared-distance ratios q, with shortcuts for the common exponents.
class RatioPower {
public:
    explicit RatioPower(double alpha) : half_alpha_(0.5 * alpha)
    {
        if (half_alpha_ == 2.0) {
            kind_ = Kind::Square;
        }
        else if (half_alpha_ == 1.5) {
            kind_ = Kind::ThreeHalves;
        }
        else if (half_alpha_ == 2.5) {
            kind_ = Kind::FiveHalves;
        }
        else if (half_alpha_ == 3.0) {
            kind_ = Kind::Cube;
        }
    }

    double operator()(double q) const
    {
        switch (kind_) {
        case Kind::Square:
            return q * q;
        case Kind::ThreeHalves:
            return q * std::sqrt(q);
        case Kind::FiveHalves:
            return q * q * std::sqrt(q);
        case Kind::Cube:
            return q * q * q;
        case Kind::General:
            break;
        }
        return std::pow(q, half_alpha_);
    }

private:
    enum class Kind { Square, ThreeHalves, FiveHalves, Cube, General };
    double half_alpha_;
    Kind kind_ = Kind::General;
};

double squared_distance(Point a, Point b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// Accumulates prod (1 + theta q_i^{alpha/2}) without overflow.
class DenominatorProduct {
public:
    void multiply(double factor)
    {
        product_ *= factor;
        if (product_ > 1e200) {
            log_sum_ += std::log(product_);
            product_ = 1.0;
        }
    }

    double reciprocal() const { return std::exp(-(log_sum_ + std::log(product_))); }

private:
    double product_ = 1.0;
    double log_sum_ = 0.0;
};

/// CSP at `receiver` served by field[serving] (squared distance serving_d2),
/// with every other point of the field interfering.
double csp_over_field(Point receiver, std::span<const Point> field, std::size_t serving, double serving_d2,
                      double theta, double alpha)
{
    if (theta == 0.0) {
        return 1.0;
    }
    const RatioPower power(alpha);
    DenominatorProduct denom;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (i == serving) {
            continue;
        }
        const double q = serving_d2 / squared_distance(receiver, field[i]);
        denom.multiply(1.0 + theta * power(q));
    }
    return denom.reciprocal();
}

struct Nearest {
    std::size_t index;
    double d2;
};

Nearest nearest_point(Point receiver, std::span<const Point> field)
{
    Nearest best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double d2 = squared_distance(receiver, field[i]);
        if (d2 < best.d2) {
            best = {i, d2};
        }
    }
    return best;
}

void append_uniform_square(double half_width, std::size_t count, Xoshiro256pp& rng, std::vector<Point>& out)
{
    const double width = 2.0 * half_width;
    for (std::size_t i = 0; i < count; ++i) {
        const double x = rng.uniform() * width - half_width;
        const double y = rng.uniform() * width - half_width;
        out.push_back({x, y});
    }
}

std::size_t poisson_count(double mean, Xoshiro256pp& rng)
{
    if (mean <= 0.0) {
        return 0;
    }
    std::poisson_distribution<long long> dist(mean);
    return static_cast<std::size_t>(dist(rng));
}

// Substream lanes per attempt: [tier1 core, tier1 frame, tier2 core, tier2 frame].
constexpr std::uint64_t kLanesPerAttempt = 4;

void sample_tier(double density, double window_half, double core_half, std::uint64_t seed, std::uint64_t index,
                 std::uint64_t lane, std::vector<Point>& out)
{
    out.clear();
    const double inner = std::min(core_half, window_half);
    Xoshiro256pp core_rng = substream(seed, index, lane);
    const SimWindow core{inner};
    append_uniform_square(inner, poisson_count(density * core.area(), core_rng), core_rng, out);
    if (window_half > inner) {
        Xoshiro256pp frame_rng = substream(seed, index, lane + 1);
        sample_ppp_frame(density, inner, window_half, frame_rng, out);
    }
}

void fill_realization(const NetworkConfig& config, const SimulationOptions& options, double core_half,
                      std::uint64_t index, Realization& r)
{
    const double h = options.window.half_width;
    int attempt = 0;
    for (;; ++attempt) {
        if (attempt >= options.resample_budget) {
            throw SimulationError("realization " + std::to_string(index) + ": a tier stayed empty after " +
                                  std::to_string(options.resample_budget) + " attempts");
        }
        const std::uint64_t base = static_cast<std::uint64_t>(attempt) * kLanesPerAttempt;
        sample_tier(config.tier1.density, h, core_half, options.master_seed, index, base + 0, r.tier1_points);
        sample_tier(config.tier2.density, h, core_half, options.master_seed, index, base + 2, r.tier2_points);
        if (!r.tier1_points.empty() && !r.tier2_points.empty()) {
            break;
        }
    }

    const Point device{0.0, 0.0};
    const Association a = associate_device(device, r.tier1_points, r.tier2_points, config);
    r.associated_tier = a.tier;
    r.serving_index = a.serving_index;
    r.first_hop_mbs_index.reset();
    r.csp_direct.reset();
    r.csp_first_hop.reset();
    r.csp_second_hop.reset();

    const double d2 = a.serving_distance * a.serving_distance;
    if (a.tier == Tier::Macro) {
        r.csp_direct = csp_over_field(device, r.tier1_points, a.serving_index, d2, config.theta_d,
                                      config.tier1.path_loss_exponent);
        r.csp_total = *r.csp_direct;
        return;
    }

    r.csp_second_hop = csp_over_field(device, r.tier2_points, a.serving_index, d2, config.theta_d,
                                      config.tier2.path_loss_exponent);
    const Point relay = r.tier2_points[a.serving_index];
    // All MBSs transmit with the same power, so max received power means nearest.
    const Nearest feeder = nearest_point(relay, r.tier1_points);
    r.first_hop_mbs_index = feeder.index;
    r.csp_first_hop = csp_over_field(relay, r.tier1_points, feeder.index, feeder.d2, config.theta_2,
                                     config.tier1.path_loss_exponent);
    r.csp_total = *r.csp_first_hop * *r.csp_second_hop;
}

/// Neumaier-compensated sum.
class CompensatedSum {
public:
    void add(double v)
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            compensation_ += (sum_ - t) + v;
        }
        else {
            compensation_ += (v - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

template <class Transform>
MomentEstimate estimate_moment(double b, std::span<const double> values, Transform f)
{
    const double n = static_cast<double>(values.size());
    CompensatedSum sum;
    for (double v : values) {
        sum.add(f(v));
    }
    const double mean = sum.value() / n;
    CompensatedSum squares;
    for (double v : values) {
        const double dev = f(v) - mean;
        squares.add(dev * dev);
    }
    const double variance = values.size() > 1 ? squares.value() / (n - 1.0) : 0.0;
    return {b, mean, std::sqrt(variance / n)};
}

std::vector<double> default_grid()
{
    std::vector<double> xs;
    for (int i = 1; i <= 19; ++i) {
        xs.push_back(0.05 * i);
    }
    return xs;
}

} // namespace

SimWindow default_window(const NetworkConfig& config)
{
    const double min_density = std::min(config.tier1.density, config.tier2.density);
    return SimWindow{std::max(10.0, 15.0 / std::sqrt(min_density))};
}

std::vector<Point> sample_ppp(double density, const SimWindow& window, Xoshiro256pp& rng)
{
    if (!(density > 0.0) || !std::isfinite(density)) {
        throw DomainError("sample_ppp: density must be positive");
    }
    if (!(window.half_width > 0.0)) {
        throw DomainError("sample_ppp: window half width must be positive");
    }
    std::vector<Point> points;
    const std::size_t count = poisson_count(density * window.area(), rng);
    points.reserve(count);
    append_uniform_square(window.half_width, count, rng, points);
    return points;
}

void sample_ppp_frame(double density, double inner_half_width, double outer_half_width, Xoshiro256pp& rng,
                      std::vector<Point>& out)
{
    if (!(outer_half_width > inner_half_width) || !(inner_half_width >= 0.0)) {
        throw DomainError("sample_ppp_frame: need 0 <= inner < outer");
    }
    const double frame_area = 4.0 * (outer_half_width * outer_half_width - inner_half_width * inner_half_width);
    const std::size_t count = poisson_count(density * frame_area, rng);
    const double width = 2.0 * outer_half_width;
    std::size_t accepted = 0;
    while (accepted < count) {
        const double x = rng.uniform() * width - outer_half_width;
        const double y = rng.uniform() * width - outer_half_width;
        if (std::max(std::abs(x), std::abs(y)) > inner_half_width) {
            out.push_back({x, y});
            ++accepted;
        }
    }
}

Association associate_device(Point device, std::span<const Point> macro, std::span<const Point> relays,
                             const NetworkConfig& config)
{
    if (macro.empty() || relays.empty()) {
        throw SimulationError("associate_device: both tiers need at least one node");
    }
    const Nearest m = nearest_point(device, macro);
    const Nearest r = nearest_point(device, relays);
    // Compare log biased received powers; distances enter squared.
    const double macro_power = std::log(config.tier1.power * config.tier1.bias) -
                               0.5 * config.tier1.path_loss_exponent * std::log(m.d2);
    const double relay_power = std::log(config.tier2.power * config.tier2.bias) -
                               0.5 * config.tier2.path_loss_exponent * std::log(r.d2);
    if (macro_power >= relay_power) {
        return {Tier::Macro, m.index, std::sqrt(m.d2)};
    }
    return {Tier::Relay, r.index, std::sqrt(r.d2)};
}

double csp_link(double serving_distance, std::span<const double> interferer_distances, double theta, double alpha)
{
    if (!(serving_distance > 0.0)) {
        throw DomainError("csp_link: serving distance must be positive");
    }
    if (!(theta >= 0.0) || !(alpha > 2.0)) {
        throw DomainError("csp_link: need theta >= 0 and alpha > 2");
    }
    if (theta == 0.0) {
        return 1.0;
    }
    DenominatorProduct denom;
    for (double r : interferer_distances) {
        if (!(r > 0.0)) {
            throw DomainError("csp_link: interferer distances must be positive");
        }
        denom.multiply(1.0 + theta * std::pow(serving_distance / r, alpha));
    }
    return denom.reciprocal();
}

SimulationOptions default_options(const NetworkConfig& config)
{
    SimulationOptions o;
    o.window = default_window(config);
    return o;
}

const MomentEstimate& SimulationStats::moment(double b) const
{
    for (const auto& m : empirical_moments) {
        if (m.b == b) {
            return m;
        }
    }
    throw std::out_of_range("moment b=" + std::to_string(b) + " was not estimated");
}

Realization sample_realization(const NetworkConfig& config, const SimulationOptions& options, std::uint64_t index)
{
    config.validate();
    Realization r;
    fill_realization(config, options, options.core_half_width.value_or(default_window(config).half_width), index, r);
    return r;
}

SimulationStats run_simulation(const NetworkConfig& config, const SimulationOptions& options)
{
    config.validate();
    if (options.n_realizations < 1) {
        throw DomainError("run_simulation: need at least one realization");
    }
    if (!(options.window.half_width > 0.0)) {
        throw DomainError("run_simulation: window half width must be positive");
    }
    const std::size_t n = options.n_realizations;
    const double core_half = options.core_half_width.value_or(default_window(config).half_width);

    std::vector<double> csp(n);
    std::vector<unsigned char> tier(n);

    if (options.dump != nullptr) {
        Realization r;
        for (std::size_t i = 0; i < n; ++i) {
            fill_realization(config, options, core_half, i, r);
            csp[i] = r.csp_total;
            tier[i] = static_cast<unsigned char>(index_of(r.associated_tier));
            write_realization_json(*options.dump, r, i);
        }
    }
    else {
        unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
        threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
        constexpr std::size_t kChunk = 64;
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::atomic<bool> failed{false};

        auto worker = [&](std::exception_ptr& slot) {
            try {
                Realization r;
                for (;;) {
                    const std::size_t start = next.fetch_add(kChunk);
                    if (start >= n || failed.load()) {
                        return;
                    }
                    const std::size_t stop = std::min(n, start + kChunk);
                    for (std::size_t i = start; i < stop; ++i) {
                        fill_realization(config, options, core_half, i, r);
                        csp[i] = r.csp_total;
                        tier[i] = static_cast<unsigned char>(index_of(r.associated_tier));
                    }
                }
            }
            catch (...) {
                slot = std::current_exception();
                failed.store(true);
            }
        };

        std::vector<std::exception_ptr> errors(threads);
        if (threads == 1) {
            worker(errors[0]);
        }
        else {
            std::vector<std::thread> pool;
            pool.reserve(threads);
            for (unsigned t = 0; t < threads; ++t) {
                pool.emplace_back(worker, std::ref(errors[t]));
            }
            for (auto& th : pool) {
                th.join();
            }
        }
        for (auto& e : errors) {
            if (e) {
                failure = e;
                break;
            }
        }
        if (failure) {
            std::rethrow_exception(failure);
        }
    }

    SimulationStats stats;
    stats.n = n;
    const auto relay_count = static_cast<double>(std::count(tier.begin(), tier.end(), 2));
    stats.association_frequency = {1.0 - relay_count / static_cast<double>(n), relay_count / static_cast<double>(n)};

    stats.empirical_moments.push_back(estimate_moment(1.0, csp, [](double v) { return v; }));
    stats.empirical_moments.push_back(estimate_moment(2.0, csp, [](double v) { return v * v; }));
    const double min_csp = *std::min_element(csp.begin(), csp.end());
    if (min_csp > 1e-9) {
        stats.empirical_moments.push_back(estimate_moment(-1.0, csp, [](double v) { return 1.0 / v; }));
    }
    else {
        stats.negative_moment_unstable = true;
    }

    const std::vector<double> grid = options.ccdf_grid.empty() ? default_grid() : options.ccdf_grid;
    stats.empirical_ccdf = empirical_ccdf(csp, grid);
    stats.csp_total = std::move(csp);
    return stats;
}

MetaCurve empirical_ccdf(std::span<const double> csp, std::span<const double> xs)
{
    if (csp.empty()) {
        throw DomainError("empirical_ccdf: empty sample");
    }
    std::vector<double> sorted(csp.begin(), csp.end());
    std::sort(sorted.begin(), sorted.end());
    MetaCurve curve;
    curve.method = CurveMethod::Empirical;
    curve.points.reserve(xs.size());
    const double n = static_cast<double>(sorted.size());
    for (double x : xs) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
        curve.points.push_back({x, static_cast<double>(above) / n});
    }
    return curve;
}

void write_realization_json(std::ostream& out, const Realization& r, std::uint64_t index)
{
    auto points = [](const std::vector<Point>& ps) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : ps) {
            arr.push_back({p.x, p.y});
        }
        return arr;
    };
    auto optional = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };

    nlohmann::json j;
    j["index"] = index;
    j["associated_tier"] = index_of(r.associated_tier);
    j["serving_index"] = r.serving_index;
    j["first_hop_mbs_index"] =
        r.first_hop_mbs_index ? nlohmann::json(*r.first_hop_mbs_index) : nlohmann::json(nullptr);
    j["csp_direct"] = optional(r.csp_direct);
    j["csp_first_hop"] = optional(r.csp_first_hop);
    j["csp_second_hop"] = optional(r.csp_second_hop);
    j["csp_total"] = r.csp_total;
    j["tier1_points"] = points(r.tier1_points);
    j["tier2_points"] = points(r.tier2_points);
    out << j.dump() << '\n';
}

} // namespace metasir
