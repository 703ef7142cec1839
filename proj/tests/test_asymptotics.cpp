#include "pcond/asymptotics.hpp"
#include "pcond/specfun.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace pcond;
using namespace pcond::asymptotics;

namespace {
const double K_2_2_half = 0.75 * std::sqrt(3.0) / (2.0 * std::numbers::pi);
}

TEST_CASE("theta_flat examples")
{
    CHECK(theta_flat(0.01, 2.0, 1.0) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(theta_flat(0.02, 3.0, 4.0) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(theta_flat(0.006, 1.5, 0.7) == doctest::Approx(2.0 * theta_flat(0.003, 1.5, 0.7)).epsilon(1e-14));
    CHECK_THROWS_AS(theta_flat(0.01, 1.0, 1.0), std::domain_error);
}

TEST_CASE("theta_gamma examples")
{
    CHECK(theta_gamma(1e-3, 2.0, 0.5, 2) == doctest::Approx(0.1).epsilon(1e-13));
    CHECK(theta_gamma(std::exp(-8.0), 5.0 / 3.0, 0.5, 2) == doctest::Approx(std::pow(8.0, -1.5)).epsilon(1e-12));
    CHECK(theta_gamma(std::exp(-8.0), 5.0 / 3.0, 0.5, 2) == doctest::Approx(0.0441942).epsilon(1e-6));
    CHECK_THROWS_AS(theta_gamma(1e-3, 1.6, 0.5, 2), std::domain_error);
    CHECK_THROWS_AS(theta_gamma(1e-3, 1.2, 0.5, 2), std::domain_error);
}

TEST_CASE("k_const examples")
{
    CHECK(std::abs(k_const(2, 2.0, 0.5) - K_2_2_half) < 1e-12);
    CHECK(std::abs(k_const(2, 2.0, 0.5) - 0.2067483357) < 1e-9);
    CHECK(std::abs(k_const(2, 5.0 / 3.0, 0.5) - 0.75) < 1e-12);
    CHECK(std::abs(k_const(2, 3.0, 1.0) - 2.0 / std::numbers::pi) < 1e-12);
    CHECK_THROWS_AS(k_const(2, 1.5, 0.5), std::domain_error);
}

TEST_CASE("K vanishes at the critical exponent from above")
{
    double prev = k_const(2, 5.0 / 3.0 + 1e-1, 0.5);
    for (int k = 2; k <= 8; ++k) {
        const double cur = k_const(2, 5.0 / 3.0 + std::pow(10.0, -k), 0.5);
        CHECK(cur < prev);
        CHECK(cur > 0.0);
        prev = cur;
    }
    CHECK(prev < 1e-6);
    // Continuity on the supercritical side.
    for (double p : {1.8, 2.0, 2.5, 4.0})
        CHECK(std::abs(k_const(2, p + 1e-9, 0.5) - k_const(2, p, 0.5)) < 1e-7);
}

TEST_CASE("k0_angular examples")
{
    auto one = [](double) { return 1.0; };
    CHECK(std::abs(k0_angular(one, 2, 2.0, 0.5) - K_2_2_half) < 1e-9);
    auto two = [](double) { return 2.0; };
    CHECK(std::abs(k0_angular(two, 2, 2.0, 0.5) - K_2_2_half * std::pow(2.0, 2.0 / 3.0)) < 1e-9);
    CHECK(k0_angular(two, 2, 2.0, 0.5) == doctest::Approx(0.328190).epsilon(1e-5));
    auto mixed = [](double th) { return th < 1.0 ? 1.0 : 2.0; };
    const double expect = 2.0 / (1.0 / K_2_2_half + 1.0 / (K_2_2_half * std::pow(2.0, 2.0 / 3.0)));
    CHECK(std::abs(k0_angular(mixed, 2, 2.0, 0.5) - expect) < 1e-9);
}

TEST_CASE("k0_angular with constant amplitude scales like a0^{(n-1)/(1+gamma)}")
{
    for (double a0 : {0.5, 1.0, 2.0, 5.0}) {
        auto a = [a0](double) { return a0; };
        for (double p : {2.0, 3.0}) {
            const double k = k_const(2, p, 0.5) * std::pow(a0, 1.0 / 1.5);
            CHECK(k0_angular(a, 2, p, 0.5) == doctest::Approx(k).epsilon(1e-8));
        }
        // n = 3 uses the circle of directions.
        const double k3 = k_const(3, 3.0, 0.5) * std::pow(a0, 2.0 / 1.5);
        CHECK(k0_angular(a, 3, 3.0, 0.5) == doctest::Approx(k3).epsilon(1e-8));
    }
}

TEST_CASE("k0_angular critical branch")
{
    auto one = [](double) { return 1.0; };
    CHECK(k0_angular(one, 2, 5.0 / 3.0, 0.5) == doctest::Approx(0.75).epsilon(1e-6));
    auto mixed = [](double th) { return th < 1.0 ? 1.0 : 2.0; };
    // Closed-form limit: sum of a^{-1/(1+gamma)} / (1+gamma).
    const double inv = (1.0 + std::pow(2.0, -2.0 / 3.0)) / 1.5;
    CHECK(k0_angular(mixed, 2, 5.0 / 3.0, 0.5) == doctest::Approx(1.0 / inv).epsilon(1e-6));
}

TEST_CASE("blowup_exponent table")
{
    auto r = blowup_exponent(2, 2.0, 0.5, Regularity::C1gamma);
    CHECK(r.power == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(r.log_power == 0.0);
    CHECK(!r.bounded);
    r = blowup_exponent(2, 1.3, 0.5, Regularity::C1gamma);
    CHECK(r.power == 1.0);
    CHECK(r.log_power == 0.0);
    r = blowup_exponent(2, 5.0 / 3.0, 0.5, Regularity::C1gamma);
    CHECK(r.power == 1.0);
    CHECK(r.log_power == doctest::Approx(1.5).epsilon(1e-12));
    r = blowup_exponent(2, 2.0, 0.0, Regularity::C2);
    CHECK(r.power == doctest::Approx(0.5).epsilon(1e-14));
    r = blowup_exponent(2, 1.5, 0.0, Regularity::C2);
    CHECK(r.power == 1.0);
    CHECK(r.log_power == doctest::Approx(2.0));
    r = blowup_exponent(3, 2.5, 0.3, Regularity::flat);
    CHECK(r.bounded);
    CHECK(r.power == 0.0);
    CHECK(r.log_power == 0.0);
}

TEST_CASE("regime classification is a partition")
{
    for (int n : {2, 3}) {
        for (double g = 0.05; g < 1.0; g += 0.1) {
            for (double p = 1.05; p < 4.0; p += 0.037) {
                const Regime r = classify(n, p, g);
                const double pc = critical_p(n, g);
                const int count = (p < pc && !is_critical(n, p, g)) + is_critical(n, p, g) +
                                  (p > pc && !is_critical(n, p, g));
                REQUIRE(count == 1);
                REQUIRE((r == Regime::gamma_subcritical) == (p < pc && !is_critical(n, p, g)));
            }
            REQUIRE(classify(n, critical_p(n, g), g) == Regime::gamma_critical);
        }
    }
}

TEST_CASE("C1gamma column at gamma = 1 matches the C2 column")
{
    for (int n : {2, 3}) {
        for (double p : {2.1, 2.5, 3.0, 5.0}) {
            const auto a = blowup_exponent(n, p, 1.0, Regularity::C1gamma);
            const auto b = blowup_exponent(n, p, 0.3, Regularity::C2);
            CHECK(a.power == doctest::Approx(b.power).epsilon(1e-14));
            CHECK(a.power == doctest::Approx((n - 1) / (2.0 * (p - 1.0))).epsilon(1e-14));
        }
    }
}

TEST_CASE("u_diff_limit_flat")
{
    CHECK(u_diff_limit_flat(0.0, 2.5) == 0.0);
    CHECK(u_diff_limit_flat(-1.0, 2.0) == -1.0);
    CHECK(u_diff_limit_flat(8.0, 3.0) == doctest::Approx(2.8284271).epsilon(1e-8));
    double prev = -1e300;
    for (double f = -5.0; f <= 5.0; f += 0.25) {
        for (double p : {1.5, 2.0, 3.0})
            CHECK(u_diff_limit_flat(-f, p) == -u_diff_limit_flat(f, p));
        const double v = u_diff_limit_flat(f, 1.5);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("u_diff_bounds_gamma")
{
    auto z = u_diff_bounds_gamma(0.0, 2, 2.0, 0.5, 2.0);
    CHECK(z.first == 0.0);
    CHECK(z.second == 0.0);
    auto b = u_diff_bounds_gamma(1.0, 2, 2.0, 0.5, 1.0);
    CHECK(b.first == doctest::Approx(0.2067483).epsilon(1e-6));
    CHECK(b.second == doctest::Approx(b.first).epsilon(1e-14));
    b = u_diff_bounds_gamma(1.0, 2, 2.0, 0.5, 2.0);
    CHECK(b.first == doctest::Approx(0.130239).epsilon(1e-5));
    CHECK(b.second == doctest::Approx(0.328190).epsilon(1e-5));
    auto m = u_diff_bounds_gamma(-1.0, 2, 2.0, 0.5, 2.0);
    CHECK(m.first == doctest::Approx(-b.second));
    CHECK(m.second == doctest::Approx(-b.first));
    CHECK_THROWS_AS(u_diff_bounds_gamma(1.0, 2, 1.5, 0.5, 2.0), std::domain_error);
}

TEST_CASE("u_diff_limit_gamma scales with a0")
{
    const double base = u_diff_limit_gamma(1.0, 2, 2.0, 0.5, 1.0);
    CHECK(base == doctest::Approx(K_2_2_half));
    for (double p : {2.0, 3.0}) {
        const double r = u_diff_limit_gamma(0.7, 2, p, 0.5, 2.0) / u_diff_limit_gamma(0.7, 2, p, 0.5, 1.0);
        CHECK(r == doctest::Approx(std::pow(2.0, 1.0 / (1.5 * (p - 1.0)))).epsilon(1e-12));
    }
}

TEST_CASE("predicted flat gradient")
{
    const geometry::FlatProfile prof{0.5, 1.0, 1.0};
    for (double eps : {1e-2, 1e-3, 1e-5}) {
        for (double p : {1.5, 2.0, 3.0}) {
            const Vec2 g = predicted_gradient_flat(0.2, eps, p, 0.8, prof);
            CHECK(g.x == 0.0);
            CHECK(g.y == doctest::Approx(std::pow(0.8, 1.0 / (p - 1.0)) / std::pow(1.0, 1.0 / (p - 1.0))).epsilon(1e-12));
        }
    }
    const Vec2 z = predicted_gradient_flat(0.7, 1e-3, 2.0, 0.0, prof);
    CHECK(z.x == 0.0);
    CHECK(z.y == 0.0);
    // Outside Sigma' the field decays like eps / delta.
    const Vec2 g = predicted_gradient_flat(0.7, 1e-2, 2.0, 1.0, prof);
    CHECK(g.y == doctest::Approx(1e-2 / 0.05).epsilon(1e-12));
    CHECK_THROWS_AS(predicted_gradient_flat(1.5, 1e-2, 2.0, 1.0, prof), std::domain_error);
    CHECK(gradient_envelope_flat(0.0, 1e-2, 2.0, prof, 0.5) == doctest::Approx(1e-2 / std::pow(1e-2, 0.75)));
}

TEST_CASE("predicted cusp centre envelope")
{
    auto z = predicted_gradient_gamma_center(1e-3, 2, 2.0, 0.5, 0.0);
    CHECK(z.first == 0.0);
    CHECK(z.second == 0.0);
    const auto a = predicted_gradient_gamma_center(2e-4, 2, 2.0, 0.5, 1.3, 1.5, 3.0);
    const auto b = predicted_gradient_gamma_center(1e-4, 2, 2.0, 0.5, 1.3, 1.5, 3.0);
    const double alpha = blowup_exponent(2, 2.0, 0.5, Regularity::C1gamma).power;
    CHECK(b.first / a.first == doctest::Approx(std::pow(2.0, alpha)).epsilon(1e-12));
    CHECK(b.second / a.second == doctest::Approx(std::pow(2.0, alpha)).epsilon(1e-12));
    // Theta / eps = eps^{-2/3} at (n, p, gamma) = (2, 2, 0.5).
    const double eps = 3e-4;
    CHECK(theta_gamma(eps, 2.0, 0.5, 2) / eps == doctest::Approx(std::pow(eps, -2.0 / 3.0)).epsilon(1e-12));
}
