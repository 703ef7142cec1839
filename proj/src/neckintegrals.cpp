#include "pcond/neckintegrals.hpp"

#include "pcond/asymptotics.hpp"
#include "pcond/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace pcond::neckintegrals {

namespace {

// Integral over [0, r] of a peak of width `scale` at the origin, split at
// geometric breakpoints scale * 10^k.
double integrate_peak(const std::function<double(double)>& f, double r, double scale, double tol)
{
    double total = 0.0;
    double lo = 0.0;
    double hi = std::min(scale, r);
    while (lo < r) {
        total += specfun::integrate_1d(f, lo, hi, tol);
        lo = hi;
        hi = std::min(10.0 * hi, r);
    }
    return total;
}

} // namespace

double neck_integral_flat(const geometry::FlatProfile& profile, double eps, double p, double r,
                          double tol)
{
    profile.validate();
    if (!(p > 1.0))
        throw std::domain_error("neck_integral_flat: p must exceed 1");
    if (!(eps > 0.0))
        throw std::domain_error("neck_integral_flat: eps must be positive");
    if (!(r >= 0.0 && r < profile.patch_radius - profile.sigma_half_width))
        throw std::domain_error("neck_integral_flat: r must lie in [0, patch_radius - w)");
    if (r == 0.0)
        return 1.0;
    // Theta^{p-1} |Sigma'| / eps^{p-1} = 1; the flanks carry the rest.
    const double q = profile.curvature_coeff;
    auto f = [=](double s) { return std::pow(1.0 + q * s * s / eps, 1.0 - p); };
    const double flank = integrate_peak(f, r, std::sqrt(eps / q), tol);
    return 1.0 + 2.0 * flank / profile.sigma_area();
}

double neck_integral_gamma(const geometry::PowerProfile& profile, double eps, double p, double r,
                           double tol, int n)
{
    profile.validate();
    if (!(r > 0.0 && r <= profile.patch_radius))
        throw std::domain_error("neck_integral_gamma: r must lie in (0, patch_radius]");
    const double g = profile.gamma;
    const double theta = asymptotics::theta_gamma(eps, p, g, n);
    const double tp = std::pow(theta, p - 1.0);

    auto ray = [&](double a) {
        auto f = [=](double s) {
            return std::pow(s, n - 2) * tp * std::pow(eps + a * std::pow(s, 1.0 + g), 1.0 - p);
        };
        return integrate_peak(f, r, std::pow(eps / a, 1.0 / (1.0 + g)), tol);
    };
    if (n == 2)
        return ray(profile.amp_plus) + ray(profile.amp_minus);
    if (n == 3)
        return std::numbers::pi * (ray(profile.amp_plus) + ray(profile.amp_minus));
    throw std::domain_error("neck_integral_gamma: only n = 2 and n = 3 are supported");
}

// ---------------------------------------------------------------------------

namespace {

using Samples = std::vector<std::pair<double, double>>;

// Least squares fit of y = L + c * phi(eps); returns (L, c).
std::pair<double, double> fit_linear(const Samples& pts, const std::function<double(double)>& phi)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [e, v] : pts) {
        const double x = phi(e);
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
    }
    const double m = static_cast<double>(pts.size());
    const double det = m * sxx - sx * sx;
    if (!(std::abs(det) > 0.0))
        throw ExtrapolationError("extrapolation: degenerate sample abscissae");
    const double c = (m * sxy - sx * sy) / det;
    return {(sy - c * sx) / m, c};
}

double inv_log(double e) { return 1.0 / std::abs(std::log(e)); }

// Solves (e1^s - e2^s) / (e2^s - e3^s) = ratio for s > 0 by bisection.
double solve_sigma(double e1, double e2, double e3, double ratio)
{
    auto g = [&](double s) {
        return (std::pow(e1, s) - std::pow(e2, s)) / (std::pow(e2, s) - std::pow(e3, s));
    };
    double lo = 1e-10;
    double hi = 1.0;
    while (g(hi) < ratio) {
        hi *= 2.0;
        if (hi > 64.0)
            return hi;
    }
    if (g(lo) > ratio)
        return 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < ratio ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

Ansatz flat_ansatz(double p)
{
    if (!(p > 1.0))
        throw std::domain_error("flat_ansatz: p must exceed 1");
    if (std::abs(p - 1.5) < 1e-12)
        return Ansatz::power_with_log(0.5);
    return Ansatz::known_power(std::min(0.5, p - 1.0));
}

LimitEstimate extrapolate(const Samples& values, const Ansatz& ansatz)
{
    if (values.size() < 3)
        throw ExtrapolationError("extrapolation needs at least three samples");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i].first > 0.0) || !std::isfinite(values[i].second))
            throw ExtrapolationError("extrapolation: invalid sample");
        if (i > 0 && !(values[i].first < values[i - 1].first))
            throw ExtrapolationError("extrapolation: eps must be strictly decreasing");
    }
    const Samples last(values.end() - 3, values.end());
    const auto [e1, v1] = last[0];
    const auto [e2, v2] = last[1];
    const auto [e3, v3] = last[2];

    switch (ansatz.kind) {
    case Ansatz::Kind::power: {
        const double s = ansatz.sigma;
        if (!(s > 0.0))
            throw ExtrapolationError("extrapolation: sigma must be positive");
        const auto [L, c] = fit_linear(last, [s](double e) { return std::pow(e, s); });
        return {L, s, "power"};
    }
    case Ansatz::Kind::inverse_log: {
        const auto [L, c] = fit_linear(last, inv_log);
        return {L, 0.0, "inverse_log"};
    }
    case Ansatz::Kind::power_log: {
        const double s = ansatz.sigma;
        if (!(s > 0.0))
            throw ExtrapolationError("extrapolation: sigma must be positive");
        // Exact solve of v = L + e^s (a + b ln e) through the three points.
        std::array<std::array<double, 4>, 3> m{};
        for (int i = 0; i < 3; ++i) {
            const double e = last[i].first;
            const double es = std::pow(e, s);
            m[i] = {1.0, es, es * std::log(e), last[i].second};
        }
        for (int col = 0; col < 3; ++col) {
            int piv = col;
            for (int r = col + 1; r < 3; ++r)
                if (std::abs(m[r][col]) > std::abs(m[piv][col]))
                    piv = r;
            std::swap(m[col], m[piv]);
            if (m[col][col] == 0.0)
                throw ExtrapolationError("extrapolation: singular power-log system");
            for (int r = col + 1; r < 3; ++r) {
                const double f = m[r][col] / m[col][col];
                for (int k = col; k < 4; ++k)
                    m[r][k] -= f * m[col][k];
            }
        }
        std::array<double, 3> x{};
        for (int r = 2; r >= 0; --r) {
            double acc = m[r][3];
            for (int k = r + 1; k < 3; ++k)
                acc -= m[r][k] * x[k];
            x[r] = acc / m[r][r];
        }
        return {x[0], s, "power_log"};
    }
    case Ansatz::Kind::fitted_power:
        break;
    }

    const double d1 = v1 - v2;
    const double d2 = v2 - v3;
    const double scale = std::max({std::abs(v1), std::abs(v2), std::abs(v3), 1e-300});
    if (std::abs(d2) <= 1e-15 * scale) {
        if (std::abs(d1) <= 1e-15 * scale)
            return {v3, 0.0, "constant"};
        return {v3, std::numeric_limits<double>::infinity(), "power"};
    }
    const double ratio = d1 / d2;
    double sigma = 0.0;
    if (ratio > 0.0 && std::isfinite(ratio))
        sigma = solve_sigma(e1, e2, e3, ratio);
    if (sigma > 0.0) {
        const double c = d2 / (std::pow(e2, sigma) - std::pow(e3, sigma));
        return {v3 - c * std::pow(e3, sigma), sigma, "power"};
    }

    // Logarithmically converging sequences.
    const auto [L, c] = fit_linear(last, inv_log);
    double resid = 0.0;
    for (const auto& [e, v] : last)
        resid = std::max(resid, std::abs(L + c * inv_log(e) - v));
    const double spread = std::max(std::abs(d1), std::abs(d2));
    if (resid <= 1e-3 * spread)
        return {L, 0.0, "inverse_log"};
    throw ExtrapolationError("extrapolation: fitted exponent is not positive (sequence does not converge)");
}

} // namespace pcond::neckintegrals
