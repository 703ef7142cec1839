#pragma once

#include "pcond/geometry.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pcond::neckintegrals {

class ExtrapolationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Integral of (Theta(eps;p) / delta)^{p-1} over {d(x') < r}, n = 2.
double neck_integral_flat(const geometry::FlatProfile& profile, double eps, double p, double r,
                          double tol = 1e-12);

/// Integral of (Theta(eps;p,gamma) / delta)^{p-1} over {|x'| < r}. In the
/// critical regime Theta^{p-1} = 1/|ln eps|. n = 3 uses polar coordinates,
/// with amp_plus on the half-plane x1 >= 0 and amp_minus on the other half.
double neck_integral_gamma(const geometry::PowerProfile& profile, double eps, double p, double r,
                           double tol = 1e-12, int n = 2);

/// Model used to push a sequence value(eps) to eps -> 0.
struct Ansatz {
    enum class Kind {
        fitted_power, // L + c eps^sigma, sigma fitted from the last three points
        power,        // L + c eps^sigma, sigma given
        inverse_log,  // L + c / |ln eps|
        power_log     // L + eps^sigma (a + b ln eps), sigma given
    };
    Kind kind = Kind::fitted_power;
    double sigma = 0.0;

    static Ansatz fitted() { return {}; }
    static Ansatz known_power(double s) { return {Kind::power, s}; }
    static Ansatz log_inverse() { return {Kind::inverse_log, 0.0}; }
    static Ansatz power_with_log(double s) { return {Kind::power_log, s}; }
};

/// Leading correction of the flat neck integral in eps: eps^{p-1} for
/// p < 3/2, sqrt(eps) ln eps at p = 3/2, sqrt(eps) above.
Ansatz flat_ansatz(double p);

struct LimitEstimate {
    double limit = 0.0;
    double sigma = 0.0;  // fitted or given exponent; 0 for the log model
    std::string model;   // "power", "inverse_log", "power_log", "constant"
};

/// Extrapolates (eps, value) samples with strictly decreasing eps to eps -> 0.
/// The default fits sigma from the last three points and falls back to the
/// 1/|ln eps| model when that fit yields sigma <= 0 but the log model matches
/// the samples. Throws ExtrapolationError for non-convergent sequences.
LimitEstimate extrapolate(const std::vector<std::pair<double, double>>& values,
                          const Ansatz& ansatz = {});

inline double limit_extrapolate(const std::vector<std::pair<double, double>>& values,
                                const Ansatz& ansatz = {})
{
    return extrapolate(values, ansatz).limit;
}

} // namespace pcond::neckintegrals
