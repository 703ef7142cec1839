#include "pcond/asymptotics.hpp"

#include "pcond/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace pcond::asymptotics {

namespace {

constexpr double pi = std::numbers::pi;

void require_p(double p)
{
    if (!(p > 1.0) || !std::isfinite(p))
        throw std::domain_error("p must be a finite number greater than 1");
}

void require_gamma(double gamma, bool allow_one = false)
{
    const bool ok = allow_one ? (gamma > 0.0 && gamma <= 1.0) : (gamma > 0.0 && gamma < 1.0);
    if (!ok)
        throw std::domain_error("gamma must lie in (0, 1)");
}

void require_n(int n)
{
    if (n < 2)
        throw std::domain_error("dimension n must be at least 2");
}

double signed_root(double value, double p)
{
    if (value == 0.0)
        return 0.0;
    const double mag = std::pow(std::abs(value), 1.0 / (p - 1.0));
    return value < 0.0 ? -mag : mag;
}

// Integral of a(theta)^{-(n-1)/(1+gamma)} over S^{n-2} (n = 2: two points).
double angular_weight(const std::function<double(double)>& a_fn, int n, double gamma)
{
    const double e = -(n - 1) / (1.0 + gamma);
    auto w = [&](double th) {
        const double a = a_fn(th);
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::domain_error("k0_angular: amplitude must be positive");
        return std::pow(a, e);
    };
    if (n == 2)
        return w(0.0) + w(pi);
    if (n == 3) {
        // Trapezoid rule, spectrally accurate for periodic integrands.
        constexpr int m = 512;
        double acc = 0.0;
        for (int k = 0; k < m; ++k)
            acc += w(2.0 * pi * k / m);
        return acc * 2.0 * pi / m;
    }
    throw std::domain_error("k0_angular: only n = 2 and n = 3 are supported");
}

} // namespace

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::flat:
        return "flat";
    case Regime::gamma_subcritical:
        return "gamma_subcritical";
    case Regime::gamma_critical:
        return "gamma_critical";
    case Regime::gamma_supercritical:
        return "gamma_supercritical";
    }
    return "unknown";
}

std::string to_string(Regularity r)
{
    switch (r) {
    case Regularity::C2:
        return "C2";
    case Regularity::C1gamma:
        return "C1gamma";
    case Regularity::flat:
        return "flat";
    }
    return "unknown";
}

Regularity regularity_from_string(const std::string& s)
{
    if (s == "C2" || s == "c2")
        return Regularity::C2;
    if (s == "C1gamma" || s == "c1gamma")
        return Regularity::C1gamma;
    if (s == "flat")
        return Regularity::flat;
    throw std::invalid_argument("unknown regularity '" + s + "'");
}

double critical_p(int n, double gamma) { return (n + gamma) / (1.0 + gamma); }

bool is_critical(int n, double p, double gamma)
{
    const double pc = critical_p(n, gamma);
    return std::abs(p - pc) <= 1e-12 * pc;
}

Regime classify(int n, double p, double gamma)
{
    require_n(n);
    require_p(p);
    require_gamma(gamma, true);
    if (is_critical(n, p, gamma))
        return Regime::gamma_critical;
    return p < critical_p(n, gamma) ? Regime::gamma_subcritical : Regime::gamma_supercritical;
}

double theta_flat(double eps, double p, double sigma_area)
{
    require_p(p);
    if (!(eps > 0.0))
        throw std::domain_error("theta_flat: eps must be positive");
    if (!(sigma_area > 0.0))
        throw std::domain_error("theta_flat: sigma_area must be positive");
    return eps / std::pow(sigma_area, 1.0 / (p - 1.0));
}

double theta_gamma(double eps, double p, double gamma, int n)
{
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("theta_gamma: eps must lie in (0, 1)");
    switch (classify(n, p, gamma)) {
    case Regime::gamma_critical:
        return std::pow(std::abs(std::log(eps)), -1.0 / (p - 1.0));
    case Regime::gamma_supercritical:
        return std::pow(eps, 1.0 - (n - 1) / ((1.0 + gamma) * (p - 1.0)));
    default:
        throw std::domain_error("theta_gamma: undefined below the critical exponent");
    }
}

double k_const(int n, double p, double gamma)
{
    const Regime r = classify(n, p, gamma);
    const double h = 0.5 * (n - 1);
    const double lead = (1.0 + gamma) / (2.0 * std::pow(pi, h)) * specfun::gamma_fn(h);
    if (r == Regime::gamma_critical)
        return lead;
    if (r != Regime::gamma_supercritical)
        throw std::domain_error("k_const: undefined below the critical exponent");
    return lead * specfun::gamma_fn(p - 1.0) /
           (specfun::gamma_fn((n - 1) / (1.0 + gamma)) * specfun::gamma_fn(p - critical_p(n, gamma)));
}

double k0_angular(const std::function<double(double)>& a_fn, int n, double p, double gamma,
                  double quad_tol)
{
    const Regime r = classify(n, p, gamma);
    if (r == Regime::gamma_subcritical)
        throw std::domain_error("k0_angular: undefined below the critical exponent");
    require_gamma(gamma);
    const double weight = angular_weight(a_fn, n, gamma);

    if (r == Regime::gamma_supercritical) {
        // The amplitude scales out of each ray: s -> a^{-1/(1+gamma)} s.
        auto f = [n, p, gamma](double s) {
            return std::pow(s, n - 2) * std::pow(1.0 + std::pow(s, 1.0 + gamma), 1.0 - p);
        };
        const double radial = specfun::integrate_1d(f, 0.0, specfun::infinity, quad_tol);
        return 1.0 / (weight * radial);
    }

    // Critical: |ln eps|-normalized integral at decreasing eps, extrapolated
    // linearly in 1/|ln eps|.
    auto normalized = [&](double eps) {
        double total = 0.0;
        auto ray = [&](double a) {
            auto f = [=](double s) {
                return std::pow(s, n - 2) * std::pow(eps + a * std::pow(s, 1.0 + gamma), 1.0 - p);
            };
            return specfun::integrate_1d(f, 0.0, 1.0, quad_tol);
        };
        if (n == 2) {
            total = ray(a_fn(0.0)) + ray(a_fn(pi));
        } else {
            constexpr int m = 64;
            for (int k = 0; k < m; ++k)
                total += ray(a_fn(2.0 * pi * k / m));
            total *= 2.0 * pi / m;
        }
        return total / std::abs(std::log(eps));
    };
    const std::vector<double> eps_list = {1e-8, 1e-16, 1e-32};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double e : eps_list) {
        const double x = 1.0 / std::abs(std::log(e));
        const double y = normalized(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(eps_list.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double limit = (sy - slope * sx) / m;
    return 1.0 / limit;
}

RateDescriptor blowup_exponent(int n, double p, double gamma, Regularity regularity)
{
    require_n(n);
    require_p(p);
    if (regularity == Regularity::flat)
        return {0.0, 0.0, true};
    double g = 1.0;
    if (regularity == Regularity::C1gamma) {
        require_gamma(gamma, true);
        g = gamma;
    }
    const double pc = critical_p(n, g);
    if (std::abs(p - pc) <= 1e-12 * pc)
        return {1.0, 1.0 / (p - 1.0), false};
    if (p < pc)
        return {1.0, 0.0, false};
    return {(n - 1) / ((1.0 + g) * (p - 1.0)), 0.0, false};
}

double u_diff_limit_flat(double flux, double p)
{
    require_p(p);
    return signed_root(flux, p);
}

std::pair<double, double> u_diff_bounds_gamma(double flux, int n, double p, double gamma, double c0)
{
    if (!(c0 >= 1.0))
        throw std::domain_error("u_diff_bounds_gamma: c0 must be at least 1");
    const double k = k_const(n, p, gamma);
    const double e = (n - 1) / (1.0 + gamma);
    const double lo = std::pow(std::pow(c0, -e) * k * std::abs(flux), 1.0 / (p - 1.0));
    const double hi = std::pow(std::pow(c0, e) * k * std::abs(flux), 1.0 / (p - 1.0));
    if (flux < 0.0)
        return {-hi, -lo};
    return {lo, hi};
}

double u_diff_limit_gamma(double flux, int n, double p, double gamma, double a0)
{
    if (!(a0 > 0.0))
        throw std::domain_error("u_diff_limit_gamma: a0 must be positive");
    const double k = k_const(n, p, gamma);
    return signed_root(k * std::pow(a0, (n - 1) / (1.0 + gamma)) * flux, p);
}

Vec2 predicted_gradient_flat(double xp, double eps, double p, double flux,
                             const geometry::FlatProfile& profile)
{
    const double delta = geometry::gap(profile, eps, xp);
    const double theta = theta_flat(eps, p, profile.sigma_area());
    return {0.0, theta / delta * signed_root(flux, p)};
}

double gradient_envelope_flat(double xp, double eps, double p, const geometry::FlatProfile& profile,
                              double beta)
{
    const double delta = geometry::gap(profile, eps, xp);
    return theta_flat(eps, p, profile.sigma_area()) / std::pow(delta, 1.0 - 0.5 * beta);
}

std::pair<double, double> predicted_gradient_gamma_center(double eps, int n, double p, double gamma,
                                                          double flux, double big_c0, double big_c)
{
    const double theta = theta_gamma(eps, p, gamma, n);
    const double lead = std::pow(k_const(n, p, gamma) * std::abs(flux), 1.0 / (p - 1.0)) * theta / eps;
    return {lead / (2.0 * big_c0), big_c * lead};
}

Prediction predict_flat(double eps, double p, double flux, const geometry::FlatProfile& profile)
{
    Prediction out;
    out.regime = Regime::flat;
    out.theta = theta_flat(eps, p, profile.sigma_area());
    out.u_diff_limit = u_diff_limit_flat(flux, p);
    return out;
}

Prediction predict_gamma(double eps, int n, double p, double gamma, double flux, double a0)
{
    Prediction out;
    out.regime = classify(n, p, gamma);
    if (out.regime == Regime::gamma_subcritical) {
        // No normalization is defined; only the regime is meaningful.
        return out;
    }
    out.theta = theta_gamma(eps, p, gamma, n);
    out.k_const = k_const(n, p, gamma) * std::pow(a0, (n - 1) / (1.0 + gamma));
    out.u_diff_limit = u_diff_limit_gamma(flux, n, p, gamma, a0);
    return out;
}

} // namespace pcond::asymptotics
