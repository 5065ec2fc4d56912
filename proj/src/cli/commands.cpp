#include "metasir/cli/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "metasir/errors.hpp"
#include "metasir/moments.hpp"
#include "metasir/simulator.hpp"

namespace metasir::cli {

namespace {

double parse_number(std::string_view text)
{
    const std::string s(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    }
    catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) {
        throw ConfigError("not a finite number: '" + s + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t begin = 0;
    for (;;) {
        const std::size_t end = text.find(sep, begin);
        parts.push_back(text.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
        if (end == std::string_view::npos) {
            return parts;
        }
        begin = end + 1;
    }
}

NetworkConfig with_thresholds_db(NetworkConfig c, double theta_db)
{
    c.theta_d = db_to_linear(theta_db);
    c.theta_2 = c.theta_d;
    return c;
}

SimWindow window_for(const Scenario& s)
{
    return s.window_half_width_km ? SimWindow{*s.window_half_width_km} : default_window(s.network);
}

void require_complete(const MetaCurve& curve, double theta_db)
{
    if (curve.complete()) {
        return;
    }
    const auto& f = curve.failures.front();
    throw QuadratureError(std::string(to_string(curve.method)) + " failed at theta_db=" + format_number(theta_db) +
                              ", x=" + format_number(f.x) + ": " + f.message,
                          0.0, 0.0);
}

nlohmann::json moment_json(const MomentValue& m)
{
    return m.is_divergent() ? nlohmann::json("inf") : nlohmann::json(m.real());
}

void print_warnings(const NetworkConfig& c)
{
    for (const auto& w : c.validate()) {
        std::cerr << "warning: " << w << '\n';
    }
}

} // namespace

std::string_view to_string(SweepVariable v)
{
    switch (v) {
    case SweepVariable::ThetaDb:
        return "theta_db";
    case SweepVariable::Lambda2:
        return "lambda2";
    case SweepVariable::Bias2:
        return "bias2";
    case SweepVariable::X:
        return "x";
    }
    return "unknown";
}

std::vector<double> SweepSpec::values() const
{
    std::vector<double> out;
    out.reserve(steps);
    const double step = (stop - start) / static_cast<double>(steps - 1);
    for (std::size_t i = 0; i < steps; ++i) {
        out.push_back(i + 1 == steps ? stop : start + step * static_cast<double>(i));
    }
    return out;
}

SweepSpec parse_range(std::string_view text, SweepVariable variable)
{
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
        throw ConfigError("range must be start:step:stop, got '" + std::string(text) + "'");
    }
    const double start = parse_number(parts[0]);
    const double step = parse_number(parts[1]);
    const double stop = parse_number(parts[2]);
    if (!(step > 0.0) || !(start < stop)) {
        throw ConfigError("range needs step > 0 and start < stop");
    }
    const double count = std::floor((stop - start) / step + 1e-9);
    const auto steps = static_cast<std::size_t>(count) + 1;
    if (steps < 2) {
        throw ConfigError("range must contain at least two points");
    }
    // The last point is start + (steps - 1) * step, which may fall short of stop.
    return SweepSpec{variable, start, start + step * count, steps};
}

SweepSpec parse_sweep(std::string_view text)
{
    const std::size_t eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("sweep must be var=start:step:stop");
    }
    const std::string_view name = text.substr(0, eq);
    SweepVariable v;
    if (name == "theta_db") {
        v = SweepVariable::ThetaDb;
    }
    else if (name == "lambda2") {
        v = SweepVariable::Lambda2;
    }
    else if (name == "bias2") {
        v = SweepVariable::Bias2;
    }
    else if (name == "x") {
        v = SweepVariable::X;
    }
    else {
        throw ConfigError("unknown sweep variable '" + std::string(name) + "'");
    }
    return parse_range(text.substr(eq + 1), v);
}

std::vector<double> parse_number_list(std::string_view text)
{
    std::vector<double> out;
    for (auto part : split(text, ',')) {
        out.push_back(parse_number(part));
    }
    return out;
}

std::string format_number(double v)
{
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string meta_curve_csv(const MetaCurveRequest& request)
{
    std::ostringstream out;
    out << "theta_db,x,method,ccdf\n";
    for (double theta_db : request.theta_db) {
        const NetworkConfig c = with_thresholds_db(request.scenario.network, theta_db);
        std::vector<MetaCurve> curves;
        for (CurveMethod m : request.methods) {
            if (m == CurveMethod::Empirical) {
                SimulationOptions o = default_options(c);
                o.window = window_for(request.scenario);
                o.n_realizations = request.n_realizations;
                o.master_seed = request.seed;
                o.ccdf_grid = request.xs;
                curves.push_back(run_simulation(c, o).empirical_ccdf);
            }
            else {
                curves.push_back(meta_curve(c, request.xs, m));
            }
            require_complete(curves.back(), theta_db);
        }
        for (std::size_t i = 0; i < request.xs.size(); ++i) {
            for (const auto& curve : curves) {
                out << format_number(theta_db) << ',' << format_number(request.xs[i]) << ','
                    << to_string(curve.method) << ',' << format_number(curve.points[i].ccdf) << '\n';
            }
        }
    }
    return out.str();
}

std::string coverage_variance_csv(const CoverageVarianceRequest& request)
{
    std::ostringstream out;
    out << "theta_db,m1_total,variance\n";
    for (double theta_db : request.theta_db) {
        const NetworkConfig c = with_thresholds_db(request.scenario.network, theta_db);
        out << format_number(theta_db) << ',' << format_number(coverage_probability(c)) << ','
            << format_number(csp_variance(c)) << '\n';
    }
    return out.str();
}

std::string local_delay_csv(const LocalDelayRequest& request)
{
    NetworkConfig base = request.scenario.network;
    if (request.theta_db) {
        base = with_thresholds_db(base, *request.theta_db);
    }
    std::vector<double> alphas = request.alphas;
    if (alphas.empty()) {
        alphas.push_back(base.tier1.path_loss_exponent);
    }

    std::ostringstream out;
    out << "lambda2,alpha,delay\n";
    for (double alpha : alphas) {
        NetworkConfig c = base;
        if (!request.alphas.empty()) {
            c.tier1.path_loss_exponent = alpha;
            c.tier2.path_loss_exponent = alpha;
        }
        for (double lambda2 : request.lambda2) {
            c.tier2.density = lambda2;
            const MomentValue delay = mean_local_delay(c);
            out << format_number(lambda2) << ',' << format_number(alpha) << ','
                << (delay.is_divergent() ? std::string("inf") : format_number(delay.real())) << '\n';
        }
    }
    return out.str();
}

SimulateOutput simulate(const SimulateRequest& request)
{
    const NetworkConfig& c = request.scenario.network;
    SimulationOptions o = default_options(c);
    o.window = window_for(request.scenario);
    o.n_realizations = request.n_realizations;
    o.master_seed = request.seed;
    o.ccdf_grid = request.xs;
    o.dump = request.dump;
    const SimulationStats stats = run_simulation(c, o);

    SimulateOutput result;
    const double theta_db = linear_to_db(c.theta_d);
    std::ostringstream csv;
    csv << "theta_db,x,method,ccdf\n";
    for (const auto& p : stats.empirical_ccdf.points) {
        csv << format_number(theta_db) << ',' << format_number(p.x) << ",empirical," << format_number(p.ccdf) << '\n';
    }
    result.csv = csv.str();

    nlohmann::json s;
    s["n"] = stats.n;
    s["seed"] = request.seed;
    s["window_half_width_km"] = o.window.half_width;
    s["theta_d_db"] = theta_db;
    s["theta_2_db"] = linear_to_db(c.theta_2);
    s["association_frequency"] = {{"tier1", stats.association_frequency[0]},
                                  {"tier2", stats.association_frequency[1]}};
    const double a2 = association_probability(c, Tier::Relay);
    s["association_probability"] = {{"tier1", association_probability(c, Tier::Macro)}, {"tier2", a2}};
    const double n = static_cast<double>(stats.n);
    const double assoc_se = std::sqrt(a2 * (1.0 - a2) / n);
    s["association_z_score"] = assoc_se > 0.0 ? (stats.association_frequency[1] - a2) / assoc_se : 0.0;

    nlohmann::json empirical = nlohmann::json::object();
    nlohmann::json analytic = nlohmann::json::object();
    nlohmann::json z = nlohmann::json::object();
    for (double b : {1.0, 2.0, -1.0}) {
        const std::string key = format_number(b);
        const MomentValue m = moment_total(b, c);
        analytic[key] = moment_json(m);
        const auto it = std::find_if(stats.empirical_moments.begin(), stats.empirical_moments.end(),
                                     [b](const MomentEstimate& e) { return e.b == b; });
        if (it == stats.empirical_moments.end()) {
            empirical[key] = nullptr;
            z[key] = nullptr;
            continue;
        }
        empirical[key] = {{"estimate", it->estimate}, {"standard_error", it->standard_error}};
        if (m.is_divergent() || it->standard_error == 0.0) {
            z[key] = nullptr;
        }
        else {
            z[key] = (it->estimate - m.real()) / it->standard_error;
        }
    }
    s["empirical_moments"] = empirical;
    s["analytic_moments"] = analytic;
    s["z_scores"] = z;
    s["negative_moment_unstable"] = stats.negative_moment_unstable;
    s["warnings"] = c.validate();
    result.summary = s;
    return result;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ConfigError("cannot write " + tmp.string());
        }
        out << content;
        if (!out) {
            throw ConfigError("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

namespace {

void emit(const std::string& out_path, const std::string& content)
{
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
    }
    else {
        write_file_atomically(out_path, content);
    }
}

std::vector<double> x_grid_or_default(const std::string& text)
{
    return parse_range(text.empty() ? "0.05:0.05:0.95" : text, SweepVariable::X).values();
}

std::vector<CurveMethod> parse_methods(const std::string& text)
{
    if (text == "all") {
        return {CurveMethod::GilPelaez, CurveMethod::Beta, CurveMethod::Empirical};
    }
    try {
        return {parse_curve_method(text)};
    }
    catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

} // namespace

int run(int argc, char** argv)
{
    CLI::App app{"Meta distribution of downlink SIR in two-tier relay networks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string theta_list;
    std::string x_grid;
    std::string sweep_text;
    std::string method = "all";
    std::string alpha_list;
    std::string summary_path;
    std::string dump_path;
    std::size_t n = 10000;
    std::uint64_t seed = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Scenario JSON file")->required();
        sub->add_option("--out", out_path, "Output CSV path (stdout if omitted)");
    };

    auto* meta = app.add_subcommand("meta-curve", "Meta distribution curves (theta_db,x,method,ccdf)");
    add_common(meta);
    meta->add_option("--theta-db", theta_list, "Comma-separated thresholds in dB (default: config theta_d)");
    meta->add_option("--x-grid", x_grid, "Reliability grid start:step:stop (default 0.05:0.05:0.95)");
    meta->add_option("--method", method, "gil-pelaez | beta | empirical | all");
    meta->add_option("--n", n, "Realizations for the empirical method");
    meta->add_option("--seed", seed, "Master seed for the empirical method");

    auto* cov = app.add_subcommand("coverage-variance", "Coverage probability and CSP variance over theta");
    add_common(cov);
    cov->add_option("--sweep", sweep_text, "theta_db=start:step:stop (default -20:0.5:20)");
    cov->add_option("--theta-db", theta_list, "Explicit comma-separated thresholds in dB");

    auto* delay = app.add_subcommand("local-delay", "Mean local delay over relay density");
    add_common(delay);
    delay->add_option("--sweep", sweep_text, "lambda2=start:step:stop (default 10:10:100)");
    delay->add_option("--alpha", alpha_list, "Comma-separated path-loss exponents applied to both tiers");
    delay->add_option("--theta-db", theta_list, "Threshold in dB applied to both hops");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo validation run");
    add_common(sim);
    sim->add_option("--n", n, "Number of realizations");
    sim->add_option("--seed", seed, "Master seed");
    sim->add_option("--x-grid", x_grid, "Reliability grid start:step:stop (default 0.05:0.05:0.95)");
    sim->add_option("--summary", summary_path, "Summary JSON path (default: <out stem>.summary.json)");
    sim->add_option("--dump", dump_path, "JSON-lines realization dump");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const Scenario scenario = load_scenario(config_path);
        print_warnings(scenario.network);

        if (meta->parsed()) {
            MetaCurveRequest r{scenario, {}, x_grid_or_default(x_grid), parse_methods(method), n, seed};
            r.theta_db = theta_list.empty() ? std::vector<double>{linear_to_db(scenario.network.theta_d)}
                                            : parse_number_list(theta_list);
            emit(out_path, meta_curve_csv(r));
        }
        else if (cov->parsed()) {
            CoverageVarianceRequest r{scenario, {}};
            if (!theta_list.empty()) {
                r.theta_db = parse_number_list(theta_list);
            }
            else {
                const SweepSpec spec = parse_sweep(sweep_text.empty() ? "theta_db=-20:0.5:20" : sweep_text);
                if (spec.variable != SweepVariable::ThetaDb) {
                    throw ConfigError("coverage-variance sweeps theta_db only");
                }
                r.theta_db = spec.values();
            }
            emit(out_path, coverage_variance_csv(r));
        }
        else if (delay->parsed()) {
            const SweepSpec spec = parse_sweep(sweep_text.empty() ? "lambda2=10:10:100" : sweep_text);
            if (spec.variable != SweepVariable::Lambda2) {
                throw ConfigError("local-delay sweeps lambda2 only");
            }
            LocalDelayRequest r{scenario, spec.values(), {}, std::nullopt};
            if (!alpha_list.empty()) {
                r.alphas = parse_number_list(alpha_list);
            }
            if (!theta_list.empty()) {
                const auto thetas = parse_number_list(theta_list);
                if (thetas.size() != 1) {
                    throw ConfigError("local-delay takes a single --theta-db");
                }
                r.theta_db = thetas.front();
            }
            emit(out_path, local_delay_csv(r));
        }
        else if (sim->parsed()) {
            if (n < 1) {
                throw ConfigError("--n must be at least 1");
            }
            std::ofstream dump_stream;
            SimulateRequest r{scenario, n, seed, x_grid_or_default(x_grid), nullptr};
            if (!dump_path.empty()) {
                dump_stream.open(dump_path, std::ios::binary | std::ios::trunc);
                if (!dump_stream) {
                    throw ConfigError("cannot write " + dump_path);
                }
                r.dump = &dump_stream;
            }
            const SimulateOutput result = simulate(r);
            const std::string summary = result.summary.dump(2) + "\n";
            if (out_path.empty() || out_path == "-") {
                std::cout << result.csv;
                if (summary_path.empty()) {
                    std::cerr << summary;
                }
            }
            else {
                std::filesystem::path summary_file = summary_path;
                if (summary_file.empty()) {
                    summary_file = std::filesystem::path(out_path).replace_extension(".summary.json");
                }
                write_file_atomically(out_path, result.csv);
                write_file_atomically(summary_file, summary);
            }
            if (!summary_path.empty() && (out_path.empty() || out_path == "-")) {
                write_file_atomically(summary_path, summary);
            }
        }
        return kExitOk;
    }
    catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

} // namespace metasir::cli
