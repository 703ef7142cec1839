#pragma once

#include "pcond/geometry.hpp"
#include "pcond/vec2.hpp"

#include <functional>
#include <string>
#include <utility>

namespace pcond::asymptotics {

enum class Regime { flat, gamma_subcritical, gamma_critical, gamma_supercritical };
enum class Regularity { C2, C1gamma, flat };

std::string to_string(Regime r);
std::string to_string(Regularity r);
Regularity regularity_from_string(const std::string& s);

/// Blow-up rate eps^{-power} |ln eps|^{-log_power}.
struct RateDescriptor {
    double power = 0.0;
    double log_power = 0.0;
    bool bounded = false;
};

struct Prediction {
    double theta = 0.0;
    double k_const = 0.0;
    double u_diff_limit = 0.0;
    Regime regime = Regime::flat;
};

/// (n + gamma) / (1 + gamma), the borderline exponent of the cusp regime.
double critical_p(int n, double gamma);

/// True when p equals the critical exponent up to a relative 1e-12.
bool is_critical(int n, double p, double gamma);

Regime classify(int n, double p, double gamma);

double theta_flat(double eps, double p, double sigma_area);
double theta_gamma(double eps, double p, double gamma, int n);

/// Gamma-function constant K; gamma = 1 is accepted for cross-checks.
double k_const(int n, double p, double gamma);

/// K0 for an angle-dependent amplitude a(theta). For n = 2 the amplitude is
/// sampled at theta = 0 (x' > 0) and theta = pi (x' < 0); for n = 3 theta
/// runs over the unit circle.
double k0_angular(const std::function<double(double)>& a_fn, int n, double p, double gamma,
                  double quad_tol = 1e-11);

RateDescriptor blowup_exponent(int n, double p, double gamma, Regularity regularity);

double u_diff_limit_flat(double flux, double p);

/// Bracket of Theorem-style bounds on (U1 - U2) / Theta in the cusp case.
std::pair<double, double> u_diff_bounds_gamma(double flux, int n, double p, double gamma, double c0);

/// Exact limit of (U1 - U2) / Theta for a constant amplitude a0.
double u_diff_limit_gamma(double flux, int n, double p, double gamma, double a0);

/// Leading-order neck field (0, Theta / delta * sgn(F) |F|^{1/(p-1)}).
Vec2 predicted_gradient_flat(double xp, double eps, double p, double flux,
                             const geometry::FlatProfile& profile);

/// Shape Theta / delta^{1 - beta/2} of the correction envelope.
double gradient_envelope_flat(double xp, double eps, double p, const geometry::FlatProfile& profile,
                              double beta = 0.5);

/// Two-sided envelope of |Du| at the neck centre, with the unknown constants
/// big_c0 (lower) and big_c (upper) supplied by the caller.
std::pair<double, double> predicted_gradient_gamma_center(double eps, int n, double p, double gamma,
                                                          double flux, double big_c0 = 1.0,
                                                          double big_c = 1.0);

Prediction predict_flat(double eps, double p, double flux, const geometry::FlatProfile& profile);
Prediction predict_gamma(double eps, int n, double p, double gamma, double flux, double a0);

} // namespace pcond::asymptotics
