#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcond {

/// Raised by the numerical kernels when an adaptive budget is exhausted.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace specfun {

enum class RuleKind { fixed_gauss, adaptive_bisection };

/// Abscissae and weights on the reference interval [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    RuleKind kind = RuleKind::fixed_gauss;
};

/// n-point Gauss-Legendre rule, n >= 1.
QuadratureRule gauss_legendre(int n);

/// The 15-point Kronrod extension used by the adaptive integrator.
QuadratureRule gauss_kronrod15();

double gamma_fn(double z);
double lgamma_fn(double z);
double beta_fn(double a, double b);

inline constexpr double infinity = std::numeric_limits<double>::infinity();

struct IntegrationResult {
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
};

/// Adaptive 7/15 Gauss-Kronrod quadrature with global bisection.
///
/// `hi` may be +infinity; the tail [A, inf) with A = max(lo, 1) is mapped to
/// (0, 1/A] through s = 1/t, so the caller must supply an integrand decaying
/// faster than s^-1. Stops when the summed panel error is below
/// tol * (1 + |result|). Throws NonConvergence past 2^20 panels.
IntegrationResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                     double tol);

inline double integrate_1d(const std::function<double(double)>& f, double lo, double hi,
                           double tol)
{
    return integrate_adaptive(f, lo, hi, tol).value;
}

} // namespace specfun
} // namespace pcond
