#include "pcond/asymptotics.hpp"
#include "pcond/harness.hpp"
#include "pcond/mesh.hpp"
#include "pcond/neckintegrals.hpp"
#include "pcond/solver.hpp"
#include "pcond/spec_json.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

using namespace pcond;
using nlohmann::json;

namespace {

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write " + path);
    f << text;
}

// JSON numbers cannot hold inf/nan; those are written as strings.
json number(double v)
{
    if (std::isfinite(v))
        return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

geometry::DomainSpec default_spec(const std::string& kind, double eps)
{
    if (kind == "flat")
        return geometry::DomainSpec::with_profile(geometry::FlatProfile{}, eps);
    if (kind == "power")
        return geometry::DomainSpec::with_profile(geometry::PowerProfile{}, eps);
    throw std::invalid_argument("unknown profile kind '" + kind + "' (flat or power)");
}

struct SpecArgs {
    std::string path;
    std::string kind = "flat";
    std::optional<double> eps;

    void attach(CLI::App* app)
    {
        app->add_option("--spec", path, "DomainSpec JSON file");
        app->add_option("--profile", kind, "Default spec when --spec is absent: flat or power")
            ->check(CLI::IsMember({"flat", "power"}));
        app->add_option("--eps", eps, "Override the spec's epsilon");
    }

    geometry::DomainSpec get() const
    {
        geometry::DomainSpec s = path.empty() ? default_spec(kind, 1e-2) : geometry::load_spec(path);
        if (eps)
            s.epsilon = *eps;
        s.validate();
        return s;
    }
};

struct MeshArgs {
    double h_far = 0.5;
    double neck_fraction = 0.25;

    void attach(CLI::App* app)
    {
        app->add_option("--h-far", h_far, "Edge length away from the neck");
        app->add_option("--neck-fraction", neck_fraction, "Edge length in the neck as a fraction of the gap");
    }
};

json solution_json(const solver::Solution& s, const geometry::DomainSpec& spec)
{
    json j;
    j["U1"] = s.U1;
    j["U2"] = s.U2;
    j["energy"] = s.energy;
    j["flux1"] = s.flux1;
    j["flux2"] = s.flux2;
    j["flux_outer"] = s.flux_outer;
    j["iterations"] = s.iterations;
    j["converged"] = s.converged;
    j["final_eta"] = s.final_eta;
    j["residual"] = s.residual;
    j["reference_residual"] = s.reference_residual;
    j["p"] = s.p;
    j["eps"] = spec.epsilon;
    j["vertices"] = s.mesh->num_vertices();
    j["triangles"] = s.mesh->num_triangles();
    try {
        const Vec2 g = solver::gradient_at(s, geometry::neck_centre(spec));
        j["grad_center"] = {g.x, g.y};
    } catch (const std::domain_error&) {
        // eps = 0: the neck centre lies on the merged hole.
    }
    return j;
}

std::vector<double> eps_or_default(const std::vector<double>& eps, double smallest)
{
    return eps.empty() ? harness::default_eps_schedule(smallest) : eps;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Perfect-conductivity p-Laplacian toolkit: asymptotic constants, neck integrals, FEM sweeps"};
    app.require_subcommand(1);

    // theta
    auto* theta = app.add_subcommand("theta", "Normalization factor Theta");
    double t_eps = 0.0, t_p = 2.0, t_gamma = 0.5;
    std::optional<double> t_sigma;
    int t_n = 2;
    theta->add_option("--eps", t_eps, "Gap")->required();
    theta->add_option("--p", t_p, "Exponent p")->required();
    theta->add_option("--sigma-area", t_sigma, "|Sigma'| (flat profile)");
    theta->add_option("--gamma", t_gamma, "Cusp exponent gamma (when --sigma-area is absent)");
    theta->add_option("--n", t_n, "Dimension");
    theta->callback([&] {
        json j{{"eps", t_eps}, {"p", t_p}};
        if (t_sigma) {
            j["sigma_area"] = *t_sigma;
            j["value"] = asymptotics::theta_flat(t_eps, t_p, *t_sigma);
        } else {
            j["gamma"] = t_gamma;
            j["n"] = t_n;
            j["regime"] = asymptotics::to_string(asymptotics::classify(t_n, t_p, t_gamma));
            j["value"] = asymptotics::theta_gamma(t_eps, t_p, t_gamma, t_n);
        }
        emit(j);
    });

    // kconst
    auto* kconst = app.add_subcommand("kconst", "Gamma-function constant K (or K0 for a constant amplitude)");
    int k_n = 2;
    double k_p = 2.0, k_gamma = 0.5;
    std::optional<double> k_a0;
    kconst->add_option("--n", k_n, "Dimension");
    kconst->add_option("--p", k_p, "Exponent p")->required();
    kconst->add_option("--gamma", k_gamma, "Cusp exponent gamma");
    kconst->add_option("--a0", k_a0, "Constant amplitude; reports K0 = K a0^{(n-1)/(1+gamma)}");
    kconst->callback([&] {
        json j{{"n", k_n}, {"p", k_p}, {"gamma", k_gamma}};
        j["regime"] = asymptotics::to_string(asymptotics::classify(k_n, k_p, k_gamma));
        if (k_a0) {
            const double a = *k_a0;
            j["a0"] = a;
            j["value"] = asymptotics::k0_angular([a](double) { return a; }, k_n, k_p, k_gamma);
        } else {
            j["value"] = asymptotics::k_const(k_n, k_p, k_gamma);
        }
        emit(j);
    });

    // rate
    auto* rate = app.add_subcommand("rate", "Blow-up rate eps^{-power} |ln eps|^{-log_power}");
    int r_n = 2;
    double r_p = 2.0, r_gamma = 0.5;
    std::string r_reg = "C1gamma";
    rate->add_option("--n", r_n, "Dimension");
    rate->add_option("--p", r_p, "Exponent p")->required();
    rate->add_option("--gamma", r_gamma, "Cusp exponent gamma");
    rate->add_option("--regularity", r_reg, "C2, C1gamma or flat");
    rate->callback([&] {
        const auto reg = asymptotics::regularity_from_string(r_reg);
        const auto d = asymptotics::blowup_exponent(r_n, r_p, r_gamma, reg);
        emit({{"n", r_n},
              {"p", r_p},
              {"gamma", r_gamma},
              {"regularity", asymptotics::to_string(reg)},
              {"value", {{"power", d.power}, {"log_power", d.log_power}, {"bounded", d.bounded}}}});
    });

    // lemma-integral
    auto* lemma = app.add_subcommand("lemma-integral", "Neck integrals along an eps list, as CSV");
    SpecArgs l_spec;
    double l_p = 2.0, l_r = 0.3;
    int l_n = 2;
    std::vector<double> l_eps;
    l_spec.attach(lemma);
    lemma->add_option("--p", l_p, "Exponent p")->required();
    lemma->add_option("--eps-list", l_eps, "Decreasing eps values")->delimiter(',')->required();
    lemma->add_option("--r", l_r, "Radius of the integration region");
    lemma->add_option("--n", l_n, "Dimension (cusp profiles only)");
    lemma->callback([&] {
        const auto spec = l_spec.get();
        const bool flat = std::holds_alternative<geometry::FlatProfile>(spec.profile);
        neckintegrals::Ansatz ansatz;
        if (flat)
            ansatz = neckintegrals::flat_ansatz(l_p);
        else if (asymptotics::is_critical(l_n, l_p, std::get<geometry::PowerProfile>(spec.profile).gamma))
            ansatz = neckintegrals::Ansatz::log_inverse();
        std::vector<std::pair<double, double>> samples;
        std::printf("eps,value,extrapolated\n");
        for (double e : l_eps) {
            const double v = flat ? neckintegrals::neck_integral_flat(std::get<geometry::FlatProfile>(spec.profile), e, l_p, l_r)
                                  : neckintegrals::neck_integral_gamma(std::get<geometry::PowerProfile>(spec.profile), e,
                                                                       l_p, l_r, 1e-12, l_n);
            samples.emplace_back(e, v);
            if (samples.size() >= 3)
                std::printf("%.17g,%.17g,%.17g\n", e, v, neckintegrals::limit_extrapolate(samples, ansatz));
            else
                std::printf("%.17g,%.17g,\n", e, v);
        }
    });

    // spec
    auto* specc = app.add_subcommand("spec", "Print a default DomainSpec as JSON");
    std::string s_kind = "flat";
    double s_eps = 1e-2;
    specc->add_option("--profile", s_kind, "flat or power")->check(CLI::IsMember({"flat", "power"}));
    specc->add_option("--eps", s_eps, "Gap");
    specc->callback([&] { emit(geometry::to_json(default_spec(s_kind, s_eps))); });

    // mesh
    auto* meshc = app.add_subcommand("mesh", "Generate the graded mesh of a spec");
    SpecArgs m_spec;
    MeshArgs m_mesh;
    std::string m_out;
    m_spec.attach(meshc);
    m_mesh.attach(meshc);
    meshc->add_option("--out", m_out, "Mesh text file")->required();
    meshc->callback([&] {
        const auto spec = m_spec.get();
        const auto m = mesh::generate(spec, m_mesh.h_far, m_mesh.neck_fraction);
        mesh::save_mesh(m_out, m);
        emit({{"vertices", m.num_vertices()},
              {"triangles", m.num_triangles()},
              {"min_angle_deg", mesh::min_angle_deg(m)},
              {"area", mesh::total_area(m)}});
    });

    // solve
    auto* solvec = app.add_subcommand("solve", "Solve the constrained p-Dirichlet problem");
    SpecArgs v_spec;
    MeshArgs v_mesh;
    double v_p = 2.0, v_tol = 1e-8, v_eta = 0.0;
    bool v_tied = false, v_verbose = false;
    std::string v_out, v_field, v_mesh_in;
    v_spec.attach(solvec);
    v_mesh.attach(solvec);
    solvec->add_option("--p", v_p, "Exponent p")->required();
    solvec->add_flag("--tied", v_tied, "One shared constant for both inclusions");
    solvec->add_option("--tol", v_tol, "Relative Newton residual tolerance");
    solvec->add_option("--reg-eta", v_eta, "Final regularization (0 = automatic)");
    solvec->add_option("--mesh", v_mesh_in, "Read the mesh instead of generating it");
    solvec->add_option("--out", v_out, "Solution JSON (stdout when absent)");
    solvec->add_option("--field", v_field, "Per-vertex dump: mesh text format with u as a fourth column");
    solvec->add_flag("--verbose", v_verbose, "Log Newton steps to stderr");
    solvec->callback([&] {
        const auto spec = v_spec.get();
        auto m = std::make_shared<const mesh::Mesh>(v_mesh_in.empty()
                                                        ? mesh::generate(spec, v_mesh.h_far, v_mesh.neck_fraction)
                                                        : mesh::load_mesh(v_mesh_in));
        auto pb = solver::Problem::from_spec(spec, m, v_p, v_tied ? solver::Coupling::tied : solver::Coupling::free);
        pb.tol = v_tol;
        pb.reg_eta = v_eta;
        pb.verbose = v_verbose;
        const auto s = solver::solve(pb);
        json j = solution_json(s, spec);
        j["coupling"] = solver::to_string(pb.coupling);
        if (v_out.empty())
            emit(j);
        else
            write_text(v_out, j.dump(2) + "\n");
        if (!v_field.empty())
            mesh::save_mesh(v_field, *m, &s.u);
        if (!s.converged)
            throw std::runtime_error("solve did not converge");
    });

    // sweep
    auto* sweepc = app.add_subcommand("sweep", "Free-coupling solves over an eps list, as CSV");
    SpecArgs w_spec;
    MeshArgs w_mesh;
    double w_p = 2.0, w_tol = 1e-8;
    int w_jobs = 1;
    std::vector<double> w_eps;
    std::string w_out;
    w_spec.attach(sweepc);
    w_mesh.attach(sweepc);
    sweepc->add_option("--p", w_p, "Exponent p")->required();
    sweepc->add_option("--tol", w_tol, "Relative Newton residual tolerance");
    sweepc->add_option("--eps-list", w_eps, "Decreasing eps values (default 1e-2 ... 1e-4)")->delimiter(',');
    sweepc->add_option("--jobs", w_jobs, "Parallel solves");
    sweepc->add_option("--out", w_out, "CSV file (stdout when absent)");
    sweepc->callback([&] {
        const auto spec = w_spec.get();
        harness::SweepParams sp;
        sp.solve = {w_p, w_tol, w_mesh.h_far, w_mesh.neck_fraction};
        sp.workers = w_jobs;
        auto write = [&](const std::vector<harness::SweepRecord>& recs) {
            if (w_out.empty())
                harness::write_csv(std::cout, recs);
            else
                harness::save_csv(w_out, recs);
        };
        try {
            write(harness::sweep(spec, eps_or_default(w_eps, 1e-4), sp));
        } catch (const harness::PartialResultsError& e) {
            write(e.completed());
            throw;
        }
    });

    // fit-rate
    auto* fitc = app.add_subcommand("fit-rate", "Log-log slope of a sweep column against eps");
    std::string f_in, f_y = "grad_center";
    fitc->add_option("--in", f_in, "Sweep CSV")->required();
    fitc->add_option("--y", f_y, "grad_center or U_diff_over_theta");
    fitc->callback([&] {
        const auto q = harness::quantity_from_string(f_y);
        json j = harness::to_json(harness::fit_rate(harness::load_csv(f_in), q));
        j["y"] = harness::to_string(q);
        emit(j);
    });

    // check-3-4 / check-4-3
    struct CheckArgs {
        SpecArgs spec;
        MeshArgs mesh;
        double p = 2.0, tol = 1e-8;
        int jobs = 1;
        std::vector<double> eps;
        std::string records_in, records_out;
        std::optional<double> flux;
    };
    CheckArgs c34, c43;
    auto attach_check = [](CLI::App* sub, CheckArgs& a) {
        a.spec.attach(sub);
        a.mesh.attach(sub);
        sub->add_option("--p", a.p, "Exponent p")->required();
        sub->add_option("--tol", a.tol, "Relative Newton residual tolerance");
        sub->add_option("--eps-list", a.eps, "Decreasing eps values (default 1e-2 ... 1e-4)")->delimiter(',');
        sub->add_option("--jobs", a.jobs, "Parallel solves");
        sub->add_option("--records", a.records_in, "Reuse a sweep CSV instead of solving");
        sub->add_option("--flux", a.flux, "Touching-limit flux (skips its computation)");
        sub->add_option("--csv", a.records_out, "Also write the sweep records");
    };
    auto* c34c = app.add_subcommand("check-3-4", "Flat profile: limit of (U1 - U2) / Theta against the flux");
    auto* c43c = app.add_subcommand("check-4-3", "Constant-amplitude cusp: limit of (U1 - U2) / Theta");
    attach_check(c34c, c34);
    attach_check(c43c, c43);
    auto run_check = [](CheckArgs& a, bool flat) {
        const auto spec = a.spec.get();
        harness::SweepParams sp;
        sp.solve = {a.p, a.tol, a.mesh.h_far, a.mesh.neck_fraction};
        sp.workers = a.jobs;
        const auto eps = eps_or_default(a.eps, 1e-4);
        const auto recs = a.records_in.empty() ? harness::sweep(spec, eps, sp) : harness::load_csv(a.records_in);
        const double flux = a.flux ? *a.flux : solver::limit_flux_estimate(spec, eps, sp.solve);
        harness::TheoremReport rep;
        if (flat) {
            if (!std::holds_alternative<geometry::FlatProfile>(spec.profile))
                throw std::invalid_argument("check-3-4 needs a flat profile");
            rep = harness::report_theorem_3_4(recs, a.p, flux);
        } else {
            const auto* pw = std::get_if<geometry::PowerProfile>(&spec.profile);
            if (!pw)
                throw std::invalid_argument("check-4-3 needs a power profile");
            rep = harness::report_theorem_4_3(recs, *pw, a.p, flux);
        }
        if (!a.records_out.empty())
            harness::save_csv(a.records_out, recs);
        json j = harness::to_json(rep);
        j["relative_gap"] = number(rep.relative_gap);
        emit(j);
    };
    c34c->callback([&] { run_check(c34, true); });
    c43c->callback([&] { run_check(c43, false); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const harness::PartialResultsError& e) {
        std::cerr << "error: " << e.what() << " (" << e.completed().size() << " rows written)\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
