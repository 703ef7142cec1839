#pragma once

#include "pcond/geometry.hpp"
#include "pcond/mesh.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcond::solver {

/// How the inclusion constants enter the admissible space.
enum class Coupling {
    free,       // U1 and U2 are independent unknowns
    tied,       // one shared unknown constant
    prescribed, // U1 and U2 fixed by the caller
};

std::string to_string(Coupling c);
Coupling coupling_from_string(const std::string& s);

struct Problem {
    std::shared_ptr<const mesh::Mesh> mesh;
    double p = 2.0;
    /// Per-vertex boundary values; only outer vertices are read.
    std::vector<double> phi;
    /// Final regularization. Zero selects tol times the gradient scale of phi.
    double reg_eta = 0.0;
    double tol = 1e-8;
    Coupling coupling = Coupling::free;
    double U1_value = 0.0; // used with Coupling::prescribed
    double U2_value = 0.0;
    int max_newton = 400;
    /// Prints one line per Newton step to stderr.
    bool verbose = false;

    /// phi sampled from spec.dirichlet on the outer vertices.
    static Problem from_spec(const geometry::DomainSpec& spec, std::shared_ptr<const mesh::Mesh> mesh,
                             double p, Coupling coupling);
};

struct Solution {
    std::shared_ptr<const mesh::Mesh> mesh;
    double p = 2.0;
    std::vector<double> u;
    double U1 = 0.0;
    double U2 = 0.0;
    /// Discrete integral of |Du|^p (no regularization).
    double energy = 0.0;
    double flux1 = 0.0;
    double flux2 = 0.0;
    double flux_outer = 0.0;
    /// Sum of the magnitudes of the per-vertex boundary fluxes; the scale
    /// against which conservation is measured.
    double flux_scale = 0.0;
    int iterations = 0;
    bool converged = false;
    double final_eta = 0.0;
    double residual = 0.0;
    double reference_residual = 0.0;
    /// Regularized energy after every accepted Newton step, per eta stage.
    std::vector<std::vector<double>> energy_history;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Solution solve(const Problem& problem);

enum class Which { inclusion1, inclusion2, outer };

double flux(const Solution& s, Which which);

/// -(1/p) times the sum of the unconstrained energy gradient over the
/// vertices selected by `pick` (regularization of the final stage).
double flux_over(const Solution& s, const std::function<bool(std::size_t vertex)>& pick);

/// Gradient of the containing triangle; area-weighted average of the
/// triangles sharing the point when it lies on an edge or vertex.
/// Throws std::domain_error outside the mesh.
Vec2 gradient_at(const Solution& s, Vec2 point);

/// Discrete regularized energy sum_T |T| (eta^2 + |Du_T|^2)^{p/2}.
double energy(const mesh::Mesh& m, double p, double eta, const std::vector<double>& u);

/// Derivative of `energy` with respect to every vertex value.
std::vector<double> energy_gradient(const mesh::Mesh& m, double p, double eta, const std::vector<double>& u);

/// Mesh and solver controls shared by the experiment drivers.
struct SolveParams {
    double p = 2.0;
    double tol = 1e-8;
    double h_far = 0.5;
    double neck_fraction = 0.25;
    int max_newton = 400;
};

/// Relative spread below which a flux sequence counts as converged.
inline constexpr double flat_sequence_tol = 1e-2;

/// Flux of the touching-limit problem through the boundary of inclusion 1.
/// Flat profiles: one tied solve on the merged-hole mesh (eps_list unused).
/// Power profiles: tied solves at each eps (>= 3, decreasing), extrapolated;
/// when the last three agree within flat_sequence_tol the smallest-eps
/// value is returned as is.
double limit_flux_estimate(const geometry::DomainSpec& family, const std::vector<double>& eps_list,
                           const SolveParams& params);

} // namespace pcond::solver
