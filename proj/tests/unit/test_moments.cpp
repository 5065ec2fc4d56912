#include <doctest.h>

#include <cmath>
#include <numbers>

#include "metasir/errors.hpp"
#include "metasir/moments.hpp"
#include "support/oracles.hpp"

using namespace metasir;

namespace {

NetworkConfig with_theta(double theta)
{
    NetworkConfig c = NetworkConfig::reference();
    c.theta_d = c.theta_2 = theta;
    return c;
}

NetworkConfig grid_config(double theta, double alpha, double b2)
{
    NetworkConfig c = with_theta(theta);
    c.tier1.path_loss_exponent = c.tier2.path_loss_exponent = alpha;
    c.tier2.bias = b2;
    return c;
}

// lambda_21 (P_21 B_21)^{1/2} and lambda_12 (P_12 B_12)^{1/2} for the default scenario
const double kRelayTerm = std::sqrt(10.0) / 35.0;
const double kMacroTerm = 35.0 / std::sqrt(10.0);

} // namespace

TEST_CASE("tier moment examples")
{
    const NetworkConfig c = with_theta(1.0);
    CHECK(moment_tier(0.0, c, Tier::Relay).real() == doctest::Approx(association_probability(c, Tier::Relay)));

    const double m12 = moment_tier(1.0, c, Tier::Relay).real();
    CHECK(std::abs(m12 - 1.0 / (kRelayTerm + oracle::hyp2f1_b1_alpha4(1.0))) < 1e-9);
    CHECK(m12 == doctest::Approx(0.53312).epsilon(1e-5));

    const NetworkConfig low = with_theta(0.1);
    const double inverse = moment_tier(-1.0, low, Tier::Relay).real();
    CHECK(std::abs(inverse - 1.0 / (kRelayTerm + 0.9)) < 1e-10);
    CHECK(inverse == doctest::Approx(1.00974).epsilon(1e-5));
}

TEST_CASE("first-hop moment examples")
{
    CHECK(moment_first_hop(0.0, with_theta(1.0)).real() == 1.0);
    CHECK(std::abs(moment_first_hop(1.0, with_theta(1.0)).real() - 1.0 / (1.0 + std::numbers::pi / 4.0)) < 1e-9);
    CHECK(std::abs(moment_first_hop(-1.0, with_theta(0.1)).real() - 1.0 / 0.9) < 1e-10);
    CHECK(moment_first_hop(-1.0, with_theta(1.0)).is_divergent());
}

TEST_CASE("dual-hop and total moment examples")
{
    const NetworkConfig c = with_theta(1.0);
    CHECK(moment_dual_hop(0.0, c).real() == doctest::Approx(association_probability(c, Tier::Relay)));
    const double dual = moment_dual_hop(1.0, c).real();
    const double hand_dual = 1.0 / oracle::hyp2f1_b1_alpha4(1.0) / (kRelayTerm + oracle::hyp2f1_b1_alpha4(1.0));
    CHECK(std::abs(dual - hand_dual) < 1e-9);
    CHECK(dual == doctest::Approx(0.29860).epsilon(1e-4));

    const double total = moment_total(1.0, c).real();
    const double hand_total = hand_dual + 1.0 / (kMacroTerm + oracle::hyp2f1_b1_alpha4(1.0));
    CHECK(std::abs(total - hand_total) < 1e-9);
    CHECK(total == doctest::Approx(0.37640).epsilon(1e-4));

    const NetworkConfig zero = with_theta(0.0);
    CHECK(moment_dual_hop(1.0, zero).real() == doctest::Approx(association_probability(zero, Tier::Relay)));
    CHECK(moment_total(1.0, zero).real() == doctest::Approx(1.0));
}

TEST_CASE("complex tier moments against the v-form oracle")
{
    NetworkConfig c = with_theta(2.0);
    c.theta_2 = 0.5;
    c.tier1.path_loss_exponent = 3.0;
    for (Complex b : {Complex(0.0, 3.0), Complex(1.0, -0.5), Complex(0.5, 40.0)}) {
        const Complex f1 = oracle::hyp2f1_v_form(b, 3.0, 2.0);
        const Complex f2 = oracle::hyp2f1_v_form(b, 4.0, 2.0);
        const Complex ffh = oracle::hyp2f1_v_form(b, 3.0, 0.5);
        const Complex expected =
            1.0 / (competing_tier_term(c, Tier::Macro) + f1) + 1.0 / ffh / (competing_tier_term(c, Tier::Relay) + f2);
        CHECK(std::abs(moment_total(b, c).value() - expected) < 1e-9);
    }
}

TEST_CASE("order-zero total moment is one")
{
    for (double theta : {0.1, 1.0, 10.0}) {
        for (double alpha : {3.0, 4.0, 5.0}) {
            for (double b2 : {1.0, 10.0, 30.0}) {
                CHECK(std::abs(moment_total(0.0, grid_config(theta, alpha, b2)).real() - 1.0) < 1e-10);
            }
        }
    }
}

TEST_CASE("moments of a [0,1] variable: bounded, non-increasing in b, Jensen chain")
{
    for (double theta : {0.1, 1.0, 10.0}) {
        for (double alpha : {3.0, 4.0}) {
            for (double b2 : {1.0, 10.0, 30.0}) {
                const NetworkConfig c = grid_config(theta, alpha, b2);
                double previous = 1.0;
                for (double b : {0.5, 1.0, 2.0, 3.0}) {
                    const double m = moment_total(b, c).real();
                    CHECK(m >= 0.0);
                    CHECK(m <= previous + 1e-12);
                    previous = m;
                }
                const double m1 = moment_total(1.0, c).real();
                const double m2 = moment_total(2.0, c).real();
                CHECK(m1 * m1 <= m2 + 1e-10);
                CHECK(m2 <= m1 + 1e-10);
                CHECK(m1 <= 1.0);
            }
        }
    }
}

TEST_CASE("conjugate symmetry of the total moment")
{
    const NetworkConfig c = with_theta(1.0);
    for (Complex b : {Complex(0.0, 0.7), Complex(1.0, 5.0), Complex(-0.3, 120.0)}) {
        const Complex up = moment_total(b, c).value();
        const Complex down = moment_total(std::conj(b), c).value();
        CHECK(std::abs(down - std::conj(up)) < 1e-13);
    }
}

TEST_CASE("moments are non-increasing in each threshold")
{
    for (double b : {0.5, 1.0, 2.0}) {
        double prev_d = 1.0;
        double prev_2 = 1.0;
        for (double theta : {0.0, 0.05, 0.3, 1.0, 4.0, 20.0}) {
            NetworkConfig c = with_theta(1.0);
            c.theta_d = theta;
            const double by_d = moment_total(b, c).real();
            c = with_theta(1.0);
            c.theta_2 = theta;
            const double by_2 = moment_total(b, c).real();
            CHECK(by_d <= prev_d + 1e-12);
            CHECK(by_2 <= prev_2 + 1e-12);
            prev_d = by_d;
            prev_2 = by_2;
        }
    }
}

TEST_CASE("coverage probability")
{
    CHECK(coverage_probability(with_theta(1e-8)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(coverage_probability(with_theta(1.0)) == doctest::Approx(0.3764).epsilon(1e-4));
    CHECK(coverage_probability(with_theta(1.0)) == moment_total(1.0, with_theta(1.0)).real());

    const double b1 = coverage_probability(grid_config(1.0, 4.0, 1.0));
    const double b10 = coverage_probability(grid_config(1.0, 4.0, 10.0));
    const double b30 = coverage_probability(grid_config(1.0, 4.0, 30.0));
    CHECK(b10 < b1);
    CHECK(b30 < b10);
}

TEST_CASE("CSP variance limits")
{
    CHECK(csp_variance(with_theta(0.0)) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(csp_variance(with_theta(1e6)) < 1e-3);
    for (double theta : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        CHECK(csp_variance(with_theta(theta)) >= 0.0);
    }
}

TEST_CASE("mean local delay")
{
    CHECK(mean_local_delay(with_theta(0.0)).real() == doctest::Approx(1.0));

    const double expected = (1.0 / 0.9) * (1.0 / (kRelayTerm + 0.9)) + 1.0 / (kMacroTerm + 0.9);
    const double delay = mean_local_delay(with_theta(0.1)).real();
    CHECK(std::abs(delay - expected) < 1e-10);
    CHECK(delay == doctest::Approx(1.2055).epsilon(1e-4));

    for (double theta : {1.0, 1.5, 10.0}) {
        CHECK(mean_local_delay(with_theta(theta)).is_divergent());
    }
    for (double theta : {0.01, 0.2, 0.6, 0.99}) {
        const MomentValue d = mean_local_delay(with_theta(theta));
        REQUIRE_FALSE(d.is_divergent());
        CHECK(d.real() >= 1.0);
    }
}

TEST_CASE("divergence is confined to real negative orders")
{
    const NetworkConfig c = with_theta(5.0);
    CHECK(moment_total(-1.0, c).is_divergent());
    CHECK_FALSE(moment_total(Complex(-1.0, 0.5), c).is_divergent());
    CHECK_FALSE(moment_total(1.0, c).is_divergent());
    CHECK_THROWS_AS(moment_total(-1.0, c).value(), DivergentMomentError);
    CHECK_THROWS_AS(moment_total(-1.0, c).real(), DivergentMomentError);
}

TEST_CASE("bias loss and delay growth")
{
    for (double theta_db = -20.0; theta_db <= 20.0; theta_db += 2.5) {
        const double theta = db_to_linear(theta_db);
        const double b1 = coverage_probability(grid_config(theta, 4.0, 1.0));
        const double b10 = coverage_probability(grid_config(theta, 4.0, 10.0));
        const double b30 = coverage_probability(grid_config(theta, 4.0, 30.0));
        CHECK(b1 > b10);
        CHECK(b10 > b30);
    }

    double prev3 = 0.0;
    double prev4 = 0.0;
    for (double lambda2 = 10.0; lambda2 <= 100.0; lambda2 += 10.0) {
        NetworkConfig c3 = grid_config(0.1, 3.0, 10.0);
        NetworkConfig c4 = grid_config(0.1, 4.0, 10.0);
        c3.tier2.density = c4.tier2.density = lambda2;
        const double d3 = mean_local_delay(c3).real();
        const double d4 = mean_local_delay(c4).real();
        CHECK(d3 >= prev3);
        CHECK(d4 >= prev4);
        CHECK(d3 >= d4);
        prev3 = d3;
        prev4 = d4;
    }
}

TEST_CASE("invalid configs are rejected")
{
    NetworkConfig c = with_theta(1.0);
    c.tier1.path_loss_exponent = 1.9;
    CHECK_THROWS_AS(moment_total(1.0, c), DomainError);
}
