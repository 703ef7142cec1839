#include "pcond/harness.hpp"

#include "pcond/asymptotics.hpp"
#include "pcond/mesh.hpp"
#include "pcond/neckintegrals.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

namespace pcond::harness {

namespace {

using geometry::FlatProfile;
using geometry::PowerProfile;

void check_decreasing(const std::vector<double>& eps_list)
{
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0))
            throw std::invalid_argument("sweep: eps values must be positive");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw std::invalid_argument("sweep: eps_list must be strictly decreasing");
    }
}

std::optional<SweepRecord> run_one(const geometry::DomainSpec& family, double eps, const SweepParams& params)
{
    const auto t0 = std::chrono::steady_clock::now();
    geometry::DomainSpec spec = family;
    spec.epsilon = eps;
    spec.validate();
    const auto& sp = params.solve;
    auto m = std::make_shared<const mesh::Mesh>(mesh::generate(spec, sp.h_far, sp.neck_fraction));
    solver::Problem pb = solver::Problem::from_spec(spec, m, sp.p, solver::Coupling::free);
    pb.tol = sp.tol;
    pb.max_newton = sp.max_newton;
    const solver::Solution sol = solver::solve(pb);
    if (!sol.converged)
        return std::nullopt;

    SweepRecord r;
    r.eps = eps;
    r.U1 = sol.U1;
    r.U2 = sol.U2;
    r.theta = theta_for(family, eps, sp.p);
    r.grad_center = norm(solver::gradient_at(sol, geometry::neck_centre(spec)));
    const double quarter = 0.25 * geometry::patch_radius(spec.profile);
    r.flux_mid = solver::flux_over(sol, [&](std::size_t v) {
        return m->vertex_class[v] == mesh::inclusion2 && std::abs(m->vertices[v].x) < quarter;
    });
    r.mesh_size = m->num_triangles();
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<std::pair<double, double>> ratio_samples(const std::vector<SweepRecord>& records)
{
    std::vector<std::pair<double, double>> s;
    for (const auto& r : records)
        s.emplace_back(r.eps, (r.U1 - r.U2) / r.theta);
    return s;
}

double relative_gap(double value, double reference)
{
    if (reference == 0.0)
        return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(value - reference) / std::abs(reference);
}

void fill_ratio(TheoremReport& rep, const std::vector<SweepRecord>& records, const neckintegrals::Ansatz& ansatz)
{
    if (records.size() < 3)
        throw std::invalid_argument("theorem check: need at least three sweep records");
    const auto samples = ratio_samples(records);
    for (const auto& [e, v] : samples) {
        rep.eps.push_back(e);
        rep.ratio.push_back(v);
    }
    const auto est = neckintegrals::extrapolate(samples, ansatz);
    rep.extrapolated = est.limit;
    rep.extrapolation_model = est.model;
    if (est.sigma > 0.0 && std::isfinite(est.sigma)) {
        char buf[48];
        std::snprintf(buf, sizeof buf, " sigma=%.6g", est.sigma);
        rep.extrapolation_model += buf;
    }
}

} // namespace

double theta_for(const geometry::DomainSpec& family, double eps, double p)
{
    if (const auto* f = std::get_if<FlatProfile>(&family.profile))
        return asymptotics::theta_flat(eps, p, f->sigma_area());
    const auto& pw = std::get<PowerProfile>(family.profile);
    // Below the critical exponent U1 - U2 itself has a finite limit.
    if (asymptotics::classify(2, p, pw.gamma) == asymptotics::Regime::gamma_subcritical)
        return 1.0;
    return asymptotics::theta_gamma(eps, p, pw.gamma, 2);
}

std::vector<SweepRecord> sweep(const geometry::DomainSpec& family, const std::vector<double>& eps_list,
                               const SweepParams& params)
{
    check_decreasing(eps_list);
    const std::size_t n = eps_list.size();
    if (n == 0)
        return {};

    std::vector<std::optional<SweepRecord>> rows(n);
    std::vector<char> failed(n, 0);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};

    auto work = [&] {
        while (!stop) {
            const std::size_t i = next++;
            if (i >= n)
                return;
            try {
                rows[i] = run_one(family, eps_list[i], params);
                if (!rows[i]) {
                    failed[i] = 1;
                    stop = true;
                }
            } catch (...) {
                errors[i] = std::current_exception();
                stop = true;
            }
        }
    };

    const int workers = std::clamp(params.workers, 1, static_cast<int>(n));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }

    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    std::vector<SweepRecord> out;
    for (const auto& r : rows)
        if (r)
            out.push_back(*r);
    for (std::size_t i = 0; i < n; ++i) {
        if (failed[i]) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "sweep: solve at eps = %g did not converge", eps_list[i]);
            throw PartialResultsError(buf, std::move(out));
        }
    }
    return out;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_loglog: need at least two (x, y) pairs");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_loglog: values must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 1e-28 * std::max(1.0, mx * mx)))
        throw DegenerateFitError("fit_loglog: x has zero variance");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    // A perfect fit with constant y is reported as r2 = 1.
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

Quantity quantity_from_string(const std::string& s)
{
    if (s == "grad_center")
        return Quantity::grad_center;
    if (s == "U_diff_over_theta" || s == "u_diff_over_theta")
        return Quantity::u_diff_over_theta;
    throw std::invalid_argument("unknown quantity '" + s + "'");
}

std::string to_string(Quantity q) { return q == Quantity::grad_center ? "grad_center" : "U_diff_over_theta"; }

RateFit fit_rate(const std::vector<SweepRecord>& records, Quantity y)
{
    if (records.size() < 3)
        throw std::invalid_argument("fit_rate: need at least three records");
    std::vector<double> xs, ys;
    for (const auto& r : records) {
        xs.push_back(r.eps);
        ys.push_back(y == Quantity::grad_center ? r.grad_center : (r.U1 - r.U2) / r.theta);
    }
    LineFit f = fit_loglog(xs, ys);
    RateFit out{f.slope, f.r2, static_cast<int>(xs.size()), 0};
    if (f.r2 < min_r2 && xs.size() > 3) {
        const auto largest = std::max_element(xs.begin(), xs.end()) - xs.begin();
        xs.erase(xs.begin() + largest);
        ys.erase(ys.begin() + largest);
        f = fit_loglog(xs, ys);
        out = {f.slope, f.r2, static_cast<int>(xs.size()), 1};
    }
    return out;
}

TheoremReport report_theorem_3_4(const std::vector<SweepRecord>& records, double p, double flux)
{
    TheoremReport rep;
    rep.theorem = "3.4";
    rep.p = p;
    rep.flux = flux;
    fill_ratio(rep, records, neckintegrals::flat_ansatz(p));
    rep.predicted = asymptotics::u_diff_limit_flat(flux, p);
    rep.lower_bound = rep.upper_bound = rep.predicted;
    rep.relative_gap = relative_gap(rep.extrapolated, rep.predicted);
    return rep;
}

TheoremReport report_theorem_4_3(const std::vector<SweepRecord>& records, const PowerProfile& profile, double p,
                                 double flux)
{
    if (!profile.constant_amp())
        throw std::invalid_argument("check_theorem_4_3: the amplitude must be constant");
    const auto regime = asymptotics::classify(2, p, profile.gamma);
    if (regime == asymptotics::Regime::gamma_subcritical)
        throw std::invalid_argument("check_theorem_4_3: p must be critical or supercritical");
    TheoremReport rep;
    rep.theorem = "4.3";
    rep.p = p;
    rep.gamma = profile.gamma;
    rep.a0 = profile.amp_plus;
    rep.flux = flux;
    const auto ansatz = regime == asymptotics::Regime::gamma_critical
                            ? neckintegrals::Ansatz::log_inverse()
                            : neckintegrals::Ansatz::known_power((p - 1.0) - 1.0 / (1.0 + profile.gamma));
    fill_ratio(rep, records, ansatz);
    rep.predicted = asymptotics::u_diff_limit_gamma(flux, 2, p, profile.gamma, profile.amp_plus);
    const auto [lo, hi] = asymptotics::u_diff_bounds_gamma(flux, 2, p, profile.gamma, profile.c0);
    rep.lower_bound = lo;
    rep.upper_bound = hi;
    rep.relative_gap = relative_gap(rep.extrapolated, rep.predicted);
    return rep;
}

TheoremReport check_theorem_3_4(const geometry::DomainSpec& family, const std::vector<double>& eps_list,
                                const SweepParams& params, std::vector<SweepRecord>* records)
{
    if (!std::holds_alternative<FlatProfile>(family.profile))
        throw std::invalid_argument("check_theorem_3_4: needs a flat profile");
    auto recs = sweep(family, eps_list, params);
    const double flux = solver::limit_flux_estimate(family, {}, params.solve);
    auto rep = report_theorem_3_4(recs, params.solve.p, flux);
    if (records)
        *records = std::move(recs);
    return rep;
}

TheoremReport check_theorem_4_3(const geometry::DomainSpec& family, const std::vector<double>& eps_list,
                                const SweepParams& params, std::vector<SweepRecord>* records)
{
    const auto* pw = std::get_if<PowerProfile>(&family.profile);
    if (!pw)
        throw std::invalid_argument("check_theorem_4_3: needs a power profile");
    if (!pw->constant_amp())
        throw std::invalid_argument("check_theorem_4_3: the amplitude must be constant");
    auto recs = sweep(family, eps_list, params);
    const double flux = solver::limit_flux_estimate(family, eps_list, params.solve);
    auto rep = report_theorem_4_3(recs, *pw, params.solve.p, flux);
    if (records)
        *records = std::move(recs);
    return rep;
}

nlohmann::json to_json(const TheoremReport& r)
{
    nlohmann::json j;
    j["theorem"] = r.theorem;
    j["p"] = r.p;
    if (r.theorem == "4.3") {
        j["gamma"] = r.gamma;
        j["a0"] = r.a0;
        j["lower_bound"] = r.lower_bound;
        j["upper_bound"] = r.upper_bound;
    }
    j["flux"] = r.flux;
    j["eps"] = r.eps;
    j["ratio"] = r.ratio;
    j["extrapolated"] = r.extrapolated;
    j["extrapolation_model"] = r.extrapolation_model;
    j["predicted"] = r.predicted;
    j["relative_gap"] = r.relative_gap;
    return j;
}

nlohmann::json to_json(const RateFit& r)
{
    return {{"slope", r.slope}, {"r2", r.r2}, {"points", r.points}, {"dropped", r.dropped}};
}

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records)
{
    out << csv_header << '\n';
    char buf[512];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%.17g\n", r.eps, r.U1, r.U2, r.theta,
                      r.grad_center, r.flux_mid, r.mesh_size, r.runtime_s);
        out << buf;
    }
}

std::vector<SweepRecord> read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("read_csv: empty input");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != csv_header)
        throw std::runtime_error("read_csv: unexpected header '" + line + "'");
    std::vector<SweepRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 8)
            throw std::runtime_error("read_csv: line " + std::to_string(lineno) + " does not have 8 columns");
        try {
            SweepRecord r;
            r.eps = std::stod(cells[0]);
            r.U1 = std::stod(cells[1]);
            r.U2 = std::stod(cells[2]);
            r.theta = std::stod(cells[3]);
            r.grad_center = std::stod(cells[4]);
            r.flux_mid = std::stod(cells[5]);
            r.mesh_size = std::stoull(cells[6]);
            r.runtime_s = std::stod(cells[7]);
            out.push_back(r);
        } catch (const std::logic_error&) {
            throw std::runtime_error("read_csv: bad number on line " + std::to_string(lineno));
        }
    }
    return out;
}

void save_csv(const std::string& path, const std::vector<SweepRecord>& records)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write " + path);
    write_csv(f, records);
}

std::vector<SweepRecord> load_csv(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot read " + path);
    return read_csv(f);
}

std::vector<double> default_eps_schedule(double smallest)
{
    std::vector<double> out;
    for (int k = 2;; ++k) {
        const double a = std::pow(10.0, -k);
        if (a < smallest * (1.0 - 1e-12))
            break;
        out.push_back(a);
        const double b = 3.0 * std::pow(10.0, -(k + 1));
        if (b < smallest * (1.0 - 1e-12))
            break;
        out.push_back(b);
    }
    return out;
}

} // namespace pcond::harness
