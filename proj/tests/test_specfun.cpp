#include "pcond/specfun.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace pcond;
using namespace pcond::specfun;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
} // namespace

TEST_CASE("gamma_fn reproduces classical values")
{
    CHECK(rel(gamma_fn(1.0), 1.0) < 1e-14);
    CHECK(rel(gamma_fn(0.5), 1.7724538509055160) < 1e-14);
    CHECK(rel(gamma_fn(4.0), 6.0) < 1e-14);
}

TEST_CASE("gamma_fn rejects non-positive arguments")
{
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-1.5), std::domain_error);
    CHECK_THROWS_AS(beta_fn(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(beta_fn(1.0, -2.0), std::domain_error);
}

TEST_CASE("gamma_fn agrees with the C library on [1e-3, 50]")
{
    double worst = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double z = 1e-3 * std::pow(5e4, i / 2000.0);
        worst = std::max(worst, rel(gamma_fn(z), std::tgamma(z)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("gamma recurrence holds for random arguments")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.1, 30.0);
    for (int i = 0; i < 1000; ++i) {
        const double z = dist(rng);
        REQUIRE(rel(gamma_fn(z + 1.0), z * gamma_fn(z)) < 1e-11);
    }
}

TEST_CASE("lgamma_fn matches log of gamma_fn")
{
    for (double z : {0.01, 0.3, 1.7, 12.5, 60.0})
        CHECK(std::abs(lgamma_fn(z) - std::lgamma(z)) < 1e-12 * (1.0 + std::abs(std::lgamma(z))));
}

TEST_CASE("beta_fn examples")
{
    CHECK(rel(beta_fn(1.0, 1.0), 1.0) < 1e-12);
    CHECK(rel(beta_fn(0.5, 0.5), std::numbers::pi) < 1e-12);
    CHECK(rel(beta_fn(2.0 / 3.0, 1.0 / 3.0), 3.6275987284684357) < 1e-11);
}

TEST_CASE("beta_fn is symmetric and matches its integral representation")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(0.2, 5.0);
    for (int i = 0; i < 100; ++i) {
        const double a = dist(rng);
        const double b = dist(rng);
        REQUIRE(beta_fn(a, b) == beta_fn(b, a));
        auto f = [a, b](double s) { return std::pow(s, a - 1.0) / std::pow(1.0 + s, a + b); };
        const double q = integrate_1d(f, 0.0, infinity, 1e-11);
        REQUIRE(rel(q, beta_fn(a, b)) < 1e-8);
    }
}

TEST_CASE("integrate_1d examples")
{
    CHECK(std::abs(integrate_1d([](double s) { return s * s; }, 0.0, 1.0, 1e-12) - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(integrate_1d([](double s) { return 1.0 / (1.0 + s * s); }, 0.0, infinity, 1e-10) -
                   1.5707963267948966) < 1e-9);
    const double b = integrate_1d([](double s) { return std::pow(s, -1.0 / 3.0) / (1.0 + s); }, 0.0,
                                  infinity, 1e-9);
    CHECK(rel(b, beta_fn(2.0 / 3.0, 1.0 / 3.0)) < 1e-8);
}

TEST_CASE("integrate_1d handles reversed and empty ranges")
{
    auto f = [](double s) { return std::exp(s); };
    CHECK(integrate_1d(f, 1.0, 1.0, 1e-10) == 0.0);
    CHECK(std::abs(integrate_1d(f, 1.0, 0.0, 1e-12) + (std::exp(1.0) - 1.0)) < 1e-12);
    CHECK(std::abs(integrate_1d(f, -2.0, -1.0, 1e-12) - (std::exp(-1.0) - std::exp(-2.0))) < 1e-12);
}

TEST_CASE("integrate_1d reports non-convergence")
{
    // 1/s is not integrable at the origin.
    CHECK_THROWS_AS(integrate_1d([](double s) { return 1.0 / s; }, 0.0, 1.0, 1e-12), NonConvergence);
}

TEST_CASE("integrate_1d is deterministic")
{
    auto f = [](double s) { return std::sqrt(s) * std::cos(7.0 * s); };
    const auto a = integrate_adaptive(f, 0.0, 3.0, 1e-11);
    const auto b = integrate_adaptive(f, 0.0, 3.0, 1e-11);
    CHECK(a.value == b.value);
    CHECK(a.panels == b.panels);
}

TEST_CASE("halving the tolerance never increases the error")
{
    struct Case {
        std::function<double(double)> f;
        double lo, hi, exact;
    };
    const std::vector<Case> cases = {
        {[](double s) { return std::pow(s, -1.0 / 3.0); }, 0.0, 1.0, 1.5},
        {[](double s) { return std::exp(-s); }, 0.0, infinity, 1.0},
        {[](double s) { return 1.0 / (1.0 + s * s); }, 0.0, infinity, std::numbers::pi / 2},
        {[](double s) { return std::log(s); }, 0.0, 1.0, -1.0},
    };
    for (const auto& c : cases) {
        double prev = infinity;
        for (double tol = 1e-3; tol > 1e-13; tol *= 0.5) {
            const double err = std::abs(integrate_1d(c.f, c.lo, c.hi, tol) - c.exact);
            CHECK(err <= prev + 4e-16 * std::abs(c.exact));
            prev = err;
        }
    }
}

TEST_CASE("quadrature rules are normalized")
{
    for (int n : {1, 2, 5, 10, 20, 40}) {
        const auto rule = gauss_legendre(n);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            sum += rule.weights[i];
            CHECK(rule.nodes[i] > -1.0);
            CHECK(rule.nodes[i] < 1.0);
        }
        CHECK(std::abs(sum - 2.0) < 1e-13);
        CHECK(rule.kind == RuleKind::fixed_gauss);
    }
    const auto gk = gauss_kronrod15();
    double sum = 0.0;
    for (double w : gk.weights)
        sum += w;
    CHECK(std::abs(sum - 2.0) < 1e-13);
    CHECK(gk.kind == RuleKind::adaptive_bisection);
}

TEST_CASE("gauss_legendre integrates polynomials exactly")
{
    const auto rule = gauss_legendre(6);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * std::pow(rule.nodes[i], 10);
    CHECK(std::abs(acc - 2.0 / 11.0) < 1e-14);
}
