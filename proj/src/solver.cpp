#include "pcond/solver.hpp"

#include "pcond/neckintegrals.hpp"
#include "pcond/predicates.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numeric>

namespace pcond::solver {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct Element {
    std::array<int, 3> v;
    double area;
    std::array<Vec2, 3> grad; // gradients of the hat functions
};

std::vector<Element> elements(const mesh::Mesh& m)
{
    std::vector<Element> out;
    out.reserve(m.triangles.size());
    for (const auto& t : m.triangles) {
        Element e;
        e.v = t;
        const Vec2 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
        const double twice = cross(b - a, c - a);
        if (!(twice > 0.0))
            throw SolverError("solver: mesh has a degenerate or inverted triangle");
        e.area = 0.5 * twice;
        const std::array<Vec2, 3> p{a, b, c};
        for (int i = 0; i < 3; ++i) {
            const Vec2 pj = p[(i + 1) % 3];
            const Vec2 pk = p[(i + 2) % 3];
            e.grad[i] = {(pj.y - pk.y) / twice, (pk.x - pj.x) / twice};
        }
        out.push_back(e);
    }
    return out;
}

Vec2 element_gradient(const Element& e, const std::vector<double>& u)
{
    // Difference form: exact zero for constant fields.
    const double u0 = u[e.v[0]];
    return (u[e.v[1]] - u0) * e.grad[1] + (u[e.v[2]] - u0) * e.grad[2];
}

double energy_impl(const std::vector<Element>& els, double p, double eta, const std::vector<double>& u)
{
    double s = 0.0;
    for (const auto& e : els) {
        const Vec2 g = element_gradient(e, u);
        s += e.area * std::pow(eta * eta + dot(g, g), 0.5 * p);
    }
    return s;
}

void gradient_impl(const std::vector<Element>& els, double p, double eta, const std::vector<double>& u,
                   std::vector<double>& out)
{
    out.assign(u.size(), 0.0);
    for (const auto& e : els) {
        const Vec2 g = element_gradient(e, u);
        const double s = eta * eta + dot(g, g);
        if (s == 0.0)
            continue;
        const double w = p == 2.0 ? 2.0 * e.area : e.area * p * std::pow(s, 0.5 * p - 1.0);
        for (int i = 0; i < 3; ++i)
            out[e.v[i]] += w * dot(g, e.grad[i]);
    }
}

// Degrees of freedom after condensing the inclusion constants.
class System {
public:
    System(const Problem& pb, std::vector<Element> els) : pb_(pb), els_(std::move(els))
    {
        const auto& m = *pb.mesh;
        const std::size_t nv = m.num_vertices();
        dof_.assign(nv, -1);
        fixed_.assign(nv, 0.0);
        int n = 0;
        bool has1 = false, has2 = false;
        for (std::size_t v = 0; v < nv; ++v) {
            const int c = m.vertex_class[v];
            if (c == mesh::free_vertex)
                dof_[v] = n++;
            has1 = has1 || c == mesh::inclusion1;
            has2 = has2 || c == mesh::inclusion2;
        }
        int d1 = -1, d2 = -1;
        switch (pb.coupling) {
        case Coupling::free:
            if (has1)
                d1 = n++;
            if (has2)
                d2 = n++;
            break;
        case Coupling::tied:
            if (has1 || has2)
                d1 = d2 = n++;
            break;
        case Coupling::prescribed:
            break;
        }
        for (std::size_t v = 0; v < nv; ++v) {
            switch (m.vertex_class[v]) {
            case mesh::inclusion1:
                dof_[v] = d1;
                fixed_[v] = pb.U1_value;
                break;
            case mesh::inclusion2:
                dof_[v] = d2;
                fixed_[v] = pb.U2_value;
                break;
            case mesh::outer:
                fixed_[v] = pb.phi[v];
                break;
            default:
                break;
            }
        }
        ndof_ = n;
        build_pattern();
    }

    int ndof() const { return ndof_; }

    std::vector<double> expand(const Vec& x) const
    {
        std::vector<double> u(fixed_);
        for (std::size_t v = 0; v < u.size(); ++v)
            if (dof_[v] >= 0)
                u[v] = x[dof_[v]];
        return u;
    }

    double energy(double p, double eta, const Vec& x) const { return energy_impl(els_, p, eta, expand(x)); }

    // E(x + alpha d) - E(x), summed element by element without cancellation.
    double energy_change(double p, double eta, const Vec& x, const Vec& d, double alpha) const
    {
        const std::vector<double> u = expand(x);
        std::vector<double> du(u.size(), 0.0);
        for (std::size_t v = 0; v < u.size(); ++v)
            if (dof_[v] >= 0)
                du[v] = alpha * d[dof_[v]];
        double sum = 0.0, comp = 0.0;
        for (const auto& e : els_) {
            const Vec2 g = element_gradient(e, u);
            const Vec2 dg = element_gradient(e, du);
            const double s0 = eta * eta + dot(g, g);
            const double ds = 2.0 * dot(g, dg) + dot(dg, dg);
            double term;
            if (p == 2.0)
                term = e.area * ds;
            else if (s0 > 0.0)
                term = e.area * std::pow(s0, 0.5 * p) * std::expm1(0.5 * p * std::log1p(ds / s0));
            else
                term = e.area * std::pow(ds, 0.5 * p);
            // Neumaier summation.
            const double t = sum + term;
            comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
            sum = t;
        }
        return sum + comp;
    }

    Vec gradient(double p, double eta, const Vec& x) const
    {
        std::vector<double> g;
        gradient_impl(els_, p, eta, expand(x), g);
        Vec r = Vec::Zero(ndof_);
        for (std::size_t v = 0; v < g.size(); ++v)
            if (dof_[v] >= 0)
                r[dof_[v]] += g[v];
        return r;
    }

    const SpMat& hessian(double p, double eta, const Vec& x)
    {
        const std::vector<double> u = expand(x);
        double* val = H_.valuePtr();
        std::fill(val, val + H_.nonZeros(), 0.0);
        for (std::size_t k = 0; k < els_.size(); ++k) {
            const Element& e = els_[k];
            const Vec2 g = element_gradient(e, u);
            const double s = eta * eta + dot(g, g);
            const double w1 = p == 2.0 ? 2.0 * e.area : e.area * p * std::pow(s, 0.5 * p - 1.0);
            const double w2 = p == 2.0 ? 0.0 : e.area * p * (p - 2.0) * std::pow(s, 0.5 * p - 2.0);
            std::array<double, 3> gd;
            for (int i = 0; i < 3; ++i)
                gd[i] = dot(g, e.grad[i]);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const long pos = pos_[9 * k + 3 * i + j];
                    if (pos >= 0)
                        val[pos] += w1 * dot(e.grad[i], e.grad[j]) + w2 * gd[i] * gd[j];
                }
        }
        return H_;
    }

    Vec initial_guess() const
    {
        double mean = 0.0;
        int count = 0;
        for (std::size_t v = 0; v < dof_.size(); ++v)
            if (pb_.mesh->vertex_class[v] == mesh::outer) {
                mean += fixed_[v];
                ++count;
            }
        if (count > 0)
            mean /= count;
        return Vec::Constant(ndof_, mean);
    }

    const std::vector<Element>& elements() const { return els_; }

private:
    const Problem& pb_;
    std::vector<Element> els_;
    std::vector<int> dof_;
    std::vector<double> fixed_;
    int ndof_ = 0;
    SpMat H_;
    std::vector<long> pos_;

    void build_pattern()
    {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(9 * els_.size());
        for (const auto& e : els_)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const int a = dof_[e.v[i]], b = dof_[e.v[j]];
                    if (a >= 0 && b >= 0)
                        trip.emplace_back(a, b, 0.0);
                }
        H_.resize(ndof_, ndof_);
        H_.setFromTriplets(trip.begin(), trip.end());
        H_.makeCompressed();
        pos_.assign(9 * els_.size(), -1);
        const int* outer = H_.outerIndexPtr();
        const int* inner = H_.innerIndexPtr();
        for (std::size_t k = 0; k < els_.size(); ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const int r = dof_[els_[k].v[i]], c = dof_[els_[k].v[j]];
                    if (r < 0 || c < 0)
                        continue;
                    const int* lo = inner + outer[c];
                    const int* hi = inner + outer[c + 1];
                    pos_[9 * k + 3 * i + j] = std::lower_bound(lo, hi, r) - inner;
                }
    }
};

void check_problem(const Problem& pb)
{
    if (!pb.mesh)
        throw std::invalid_argument("solve: problem has no mesh");
    if (!(pb.p > 1.0) || !std::isfinite(pb.p))
        throw std::invalid_argument("solve: p must exceed 1");
    if (!(pb.tol > 0.0))
        throw std::invalid_argument("solve: tol must be positive");
    if (!(pb.reg_eta >= 0.0))
        throw std::invalid_argument("solve: reg_eta must be non-negative");
    const auto& m = *pb.mesh;
    if (pb.phi.size() != m.num_vertices())
        throw std::invalid_argument("solve: phi must have one value per vertex");
    for (std::size_t v = 0; v < m.num_vertices(); ++v)
        if (m.vertex_class[v] == mesh::outer && !std::isfinite(pb.phi[v]))
            throw std::invalid_argument("solve: phi undefined on an outer vertex");
}

} // namespace

std::string to_string(Coupling c)
{
    switch (c) {
    case Coupling::free:
        return "free";
    case Coupling::tied:
        return "tied";
    case Coupling::prescribed:
        return "prescribed";
    }
    return "unknown";
}

Coupling coupling_from_string(const std::string& s)
{
    if (s == "free")
        return Coupling::free;
    if (s == "tied")
        return Coupling::tied;
    if (s == "prescribed")
        return Coupling::prescribed;
    throw std::invalid_argument("unknown coupling '" + s + "'");
}

Problem Problem::from_spec(const geometry::DomainSpec& spec, std::shared_ptr<const mesh::Mesh> mesh,
                           double p, Coupling coupling)
{
    Problem pb;
    pb.p = p;
    pb.coupling = coupling;
    pb.phi.assign(mesh->num_vertices(), 0.0);
    for (std::size_t v = 0; v < mesh->num_vertices(); ++v)
        if (mesh->vertex_class[v] == mesh::outer)
            pb.phi[v] = spec.phi_at(mesh->vertices[v]);
    pb.mesh = std::move(mesh);
    return pb;
}

double energy(const mesh::Mesh& m, double p, double eta, const std::vector<double>& u)
{
    return energy_impl(elements(m), p, eta, u);
}

std::vector<double> energy_gradient(const mesh::Mesh& m, double p, double eta, const std::vector<double>& u)
{
    std::vector<double> g;
    gradient_impl(elements(m), p, eta, u, g);
    return g;
}

Solution solve(const Problem& pb)
{
    check_problem(pb);
    const auto& m = *pb.mesh;
    System sys(pb, elements(m));

    // Gradient scale of the boundary data.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double reach = 0.0;
    for (std::size_t v = 0; v < m.num_vertices(); ++v) {
        if (m.vertex_class[v] != mesh::outer)
            continue;
        lo = std::min(lo, pb.phi[v]);
        hi = std::max(hi, pb.phi[v]);
        reach = std::max(reach, norm(m.vertices[v]));
    }
    if (pb.coupling == Coupling::prescribed) {
        for (double U : {pb.U1_value, pb.U2_value}) {
            lo = std::min(lo, U);
            hi = std::max(hi, U);
        }
    }
    if (!(reach > 0.0)) {
        for (const Vec2& x : m.vertices)
            reach = std::max(reach, norm(x));
    }
    const double scale = std::isfinite(hi - lo) && reach > 0.0 ? (hi - lo) / reach : 0.0;

    Solution sol;
    sol.mesh = pb.mesh;
    sol.p = pb.p;
    const double eta_final = pb.reg_eta > 0.0 ? pb.reg_eta : pb.tol * scale;
    sol.final_eta = eta_final;

    Vec x = sys.initial_guess();
    const double r_ref = sys.ndof() > 0 ? sys.gradient(pb.p, eta_final, x).norm() : 0.0;
    sol.reference_residual = r_ref;

    Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
    bool analyzed = false;
    auto newton_direction = [&](double p, double eta, const Vec& r) -> Vec {
        const SpMat& H = sys.hessian(p, eta, x);
        if (!analyzed) {
            ldlt.analyzePattern(H);
            analyzed = true;
        }
        ldlt.factorize(H);
        if (ldlt.info() != Eigen::Success)
            throw SolverError("solve: singular linearization");
        Vec d = ldlt.solve(-r);
        // One step of iterative refinement.
        const Vec defect = -r - H * d;
        d += ldlt.solve(defect);
        if (!d.allFinite())
            throw SolverError("solve: singular linearization");
        return d;
    };

    if (sys.ndof() > 0 && r_ref > 0.0 && scale > 0.0) {
        // Start from the p = 2 minimizer (one exact Newton step).
        {
            const Vec r = sys.gradient(2.0, 0.0, x);
            x += newton_direction(2.0, 0.0, r);
        }
        std::vector<double> etas;
        for (double eta = scale; eta > eta_final * (1.0 + 1e-12); eta *= 0.1)
            etas.push_back(eta);
        etas.push_back(eta_final);

        bool budget_left = true;
        double rn = 0.0;
        for (std::size_t st = 0; st < etas.size() && budget_left; ++st) {
            const double eta = etas[st];
            const bool last = st + 1 == etas.size();
            std::vector<double> history;
            Vec r = sys.gradient(pb.p, eta, x);
            rn = r.norm();
            double E = sys.energy(pb.p, eta, x);
            history.push_back(E);
            const double target = last ? pb.tol * r_ref : std::max(pb.tol * r_ref, 1e-3 * rn);
            int polish = 0;
            while (true) {
                const bool met = rn <= target;
                if (met && (!last || polish >= 3))
                    break;
                if (sol.iterations >= pb.max_newton) {
                    budget_left = false;
                    break;
                }
                const Vec d = newton_direction(pb.p, eta, r);
                const double slope = r.dot(d);
                double alpha = 1.0;
                bool accepted = false;
                Vec xn;
                double dE = 0.0;
                for (int ls = 0; ls < 60; ++ls) {
                    dE = sys.energy_change(pb.p, eta, x, d, alpha);
                    if (dE <= 1e-4 * alpha * slope) {
                        accepted = true;
                    } else if (dE <= 0.0) {
                        // Rounding-level decrease: accept if the residual drops.
                        accepted = sys.gradient(pb.p, eta, x + alpha * d).norm() < rn;
                    }
                    if (accepted)
                        break;
                    alpha *= 0.5;
                }
                if (accepted)
                    xn = x + alpha * d;
                const double En = E + dE;
                ++sol.iterations;
                if (!accepted)
                    break;
                const double before = rn;
                if (pb.verbose)
                    std::fprintf(stderr, "eta %.3e  step %d  alpha %.3e  energy %.15e  residual %.3e\n", eta,
                                 sol.iterations, alpha, En, before);
                x = xn;
                E = En;
                history.push_back(En);
                r = sys.gradient(pb.p, eta, x);
                rn = r.norm();
                if (met) {
                    ++polish;
                    if (!(rn < 0.1 * before))
                        break;
                }
            }
            sol.energy_history.push_back(std::move(history));
        }
        sol.residual = rn;
        sol.converged = budget_left && rn <= pb.tol * r_ref;
    } else {
        sol.converged = true;
        if (sys.ndof() > 0 && scale == 0.0)
            x = Vec::Constant(sys.ndof(), std::isfinite(lo) ? lo : 0.0);
    }

    sol.u = sys.expand(x);
    const auto& els = sys.elements();
    sol.energy = energy_impl(els, pb.p, 0.0, sol.u);

    std::vector<double> g;
    gradient_impl(els, pb.p, eta_final, sol.u, g);
    double f1 = 0, f2 = 0, fo = 0, fs = 0;
    bool has1 = false, has2 = false;
    for (std::size_t v = 0; v < g.size(); ++v) {
        const int c = m.vertex_class[v];
        if (c == mesh::inclusion1) {
            f1 += g[v];
            has1 = true;
        } else if (c == mesh::inclusion2) {
            f2 += g[v];
            has2 = true;
        } else if (c == mesh::outer) {
            fo += g[v];
        }
        if (c != mesh::free_vertex)
            fs += std::abs(g[v]);
    }
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (m.vertex_class[v] == mesh::inclusion1)
            sol.U1 = sol.u[v];
        if (m.vertex_class[v] == mesh::inclusion2)
            sol.U2 = sol.u[v];
    }
    if (!has1)
        sol.U1 = pb.coupling == Coupling::tied ? sol.U2 : pb.U1_value;
    if (!has2)
        sol.U2 = pb.coupling == Coupling::tied ? sol.U1 : pb.U2_value;
    sol.flux1 = -f1 / pb.p;
    sol.flux2 = -f2 / pb.p;
    sol.flux_outer = -fo / pb.p;
    sol.flux_scale = fs / pb.p;
    return sol;
}

double flux(const Solution& s, Which which)
{
    switch (which) {
    case Which::inclusion1:
        return s.flux1;
    case Which::inclusion2:
        return s.flux2;
    case Which::outer:
        return s.flux_outer;
    }
    return 0.0;
}

double flux_over(const Solution& s, const std::function<bool(std::size_t)>& pick)
{
    const auto g = energy_gradient(*s.mesh, s.p, s.final_eta, s.u);
    double f = 0.0;
    for (std::size_t v = 0; v < g.size(); ++v)
        if (pick(v))
            f += g[v];
    return -f / s.p;
}

Vec2 gradient_at(const Solution& s, Vec2 point)
{
    const auto& m = *s.mesh;
    Vec2 acc{};
    double wsum = 0.0;
    for (const auto& t : m.triangles) {
        const Vec2 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
        if (point.x < std::min({a.x, b.x, c.x}) || point.x > std::max({a.x, b.x, c.x}) ||
            point.y < std::min({a.y, b.y, c.y}) || point.y > std::max({a.y, b.y, c.y}))
            continue;
        if (predicates::orient2d(a, b, point) < 0.0 || predicates::orient2d(b, c, point) < 0.0 ||
            predicates::orient2d(c, a, point) < 0.0)
            continue;
        const double twice = cross(b - a, c - a);
        const Vec2 gb{(c.y - a.y) / twice, (a.x - c.x) / twice};
        const Vec2 gc{(a.y - b.y) / twice, (b.x - a.x) / twice};
        const Vec2 g = (s.u[t[1]] - s.u[t[0]]) * gb + (s.u[t[2]] - s.u[t[0]]) * gc;
        acc = acc + 0.5 * twice * g;
        wsum += 0.5 * twice;
    }
    if (!(wsum > 0.0))
        throw std::domain_error("gradient_at: point outside the mesh");
    return (1.0 / wsum) * acc;
}

double limit_flux_estimate(const geometry::DomainSpec& family, const std::vector<double>& eps_list,
                           const SolveParams& params)
{
    auto tied_flux = [&](double eps) {
        geometry::DomainSpec spec = family;
        spec.epsilon = eps;
        auto m = std::make_shared<const mesh::Mesh>(mesh::generate(spec, params.h_far, params.neck_fraction));
        Problem pb = Problem::from_spec(spec, m, params.p, Coupling::tied);
        pb.tol = params.tol;
        pb.max_newton = params.max_newton;
        const Solution sol = solve(pb);
        if (!sol.converged)
            throw SolverError("limit_flux_estimate: tied solve did not converge");
        return sol.flux1;
    };
    if (std::holds_alternative<geometry::FlatProfile>(family.profile))
        return tied_flux(0.0);
    if (eps_list.size() < 3)
        throw std::invalid_argument("limit_flux_estimate: need at least three eps values");
    std::vector<std::pair<double, double>> samples;
    for (double eps : eps_list)
        samples.emplace_back(eps, tied_flux(eps));
    // A sequence that is flat to within the discretization error has nothing
    // left to extrapolate; fitting its noise is unstable.
    double lo = samples.back().second, hi = lo;
    for (std::size_t i = samples.size() - 3; i < samples.size(); ++i) {
        lo = std::min(lo, samples[i].second);
        hi = std::max(hi, samples[i].second);
    }
    if (hi - lo <= flat_sequence_tol * std::abs(samples.back().second))
        return samples.back().second;
    return neckintegrals::limit_extrapolate(samples);
}

} // namespace pcond::solver
