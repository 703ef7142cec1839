#pragma once

#include "pcond/geometry.hpp"
#include "pcond/solver.hpp"

#include <json.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcond::harness {

struct SweepRecord {
    double eps = 0.0;
    double U1 = 0.0;
    double U2 = 0.0;
    double theta = 0.0;
    /// |Du| at the mid-gap point above x' = 0.
    double grad_center = 0.0;
    /// Flux into inclusion 2 through its boundary within |x'| < R/4.
    double flux_mid = 0.0;
    std::size_t mesh_size = 0; // triangles
    double runtime_s = 0.0;
};

struct SweepParams {
    solver::SolveParams solve;
    /// Worker threads; each solves one eps at a time.
    int workers = 1;
};

/// Thrown when a solve in the sweep does not converge. Carries the rows
/// that did converge, sorted like a full result.
class PartialResultsError : public std::runtime_error {
public:
    PartialResultsError(const std::string& what, std::vector<SweepRecord> completed)
        : std::runtime_error(what), completed_(std::move(completed))
    {
    }
    const std::vector<SweepRecord>& completed() const { return completed_; }

private:
    std::vector<SweepRecord> completed_;
};

class DegenerateFitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Normalization used for the theta column: theta_flat for flat profiles,
/// theta_gamma (n = 2) for power profiles.
double theta_for(const geometry::DomainSpec& family, double eps, double p);

/// Free-coupling solve per eps on generate(spec, h_far, neck_fraction).
/// eps_list must be strictly decreasing.
std::vector<SweepRecord> sweep(const geometry::DomainSpec& family, const std::vector<double>& eps_list,
                               const SweepParams& params);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
};

/// Least squares of ln y against ln x.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

enum class Quantity { grad_center, u_diff_over_theta };

Quantity quantity_from_string(const std::string& s);
std::string to_string(Quantity q);

struct RateFit {
    double slope = 0.0;
    double r2 = 1.0;
    int points = 0;
    /// Leading (largest-eps) rows left out of the fit.
    int dropped = 0;
};

/// Slope of ln y against ln eps. When r2 < min_r2 the largest-eps row is
/// dropped once, provided three rows remain.
inline constexpr double min_r2 = 0.995;
RateFit fit_rate(const std::vector<SweepRecord>& records, Quantity y);

struct TheoremReport {
    std::string theorem;
    double p = 0.0;
    double gamma = 0.0; // cusp only
    double a0 = 0.0;    // cusp only
    double flux = 0.0;
    std::vector<double> eps;
    std::vector<double> ratio; // (U1 - U2) / theta
    double extrapolated = 0.0;
    std::string extrapolation_model;
    double predicted = 0.0;
    double relative_gap = 0.0;
    /// Theorem-style bracket of the limit (cusp only).
    double lower_bound = 0.0;
    double upper_bound = 0.0;
};

/// Limit of (U1 - U2) / theta_flat against sgn(F)|F|^{1/(p-1)}.
TheoremReport report_theorem_3_4(const std::vector<SweepRecord>& records, double p, double flux);

/// Limit of (U1 - U2) / theta_gamma against the constant-amplitude formula.
TheoremReport report_theorem_4_3(const std::vector<SweepRecord>& records, const geometry::PowerProfile& profile,
                                 double p, double flux);

/// Sweeps the flat family, solves the touching problem for the flux, reports.
TheoremReport check_theorem_3_4(const geometry::DomainSpec& family, const std::vector<double>& eps_list,
                                const SweepParams& params, std::vector<SweepRecord>* records = nullptr);

/// Same for a constant-amplitude cusp with supercritical or critical p.
TheoremReport check_theorem_4_3(const geometry::DomainSpec& family, const std::vector<double>& eps_list,
                                const SweepParams& params, std::vector<SweepRecord>* records = nullptr);

nlohmann::json to_json(const TheoremReport& r);
nlohmann::json to_json(const RateFit& r);

inline constexpr const char* csv_header = "eps,U1,U2,theta,grad_center,flux_mid,mesh_size,runtime_s";

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_csv(std::istream& in);
void save_csv(const std::string& path, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> load_csv(const std::string& path);

/// Geometric schedule 1e-2, 3e-3, 1e-3, ... down to `smallest`.
std::vector<double> default_eps_schedule(double smallest = 1e-4);

} // namespace pcond::harness
