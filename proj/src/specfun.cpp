#include "pcond/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>

namespace pcond::specfun {

namespace {

// Lanczos approximation, g = 7, n = 9.
constexpr double lanczos_g = 7.0;
constexpr std::array<double, 9> lanczos_coef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double zm1)
{
    double acc = lanczos_coef[0];
    for (std::size_t i = 1; i < lanczos_coef.size(); ++i)
        acc += lanczos_coef[i] / (zm1 + static_cast<double>(i));
    return acc;
}

void require_positive(double z, const char* what)
{
    if (!(z > 0.0) || !std::isfinite(z))
        throw std::domain_error(std::string(what) + ": argument must be a finite positive number");
}

// Kronrod nodes, symmetric; index 7 is the centre. Odd indices are the
// 7-point Gauss nodes.
constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    long order; // creation order, breaks ties deterministically
    bool tail = false;

    bool operator<(const Panel& o) const
    {
        if (error != o.error)
            return error < o.error;
        return order > o.order;
    }
};

Panel gk15(const std::function<double(double)>& f, double a, double b, long order)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * wgk[7];
    double gauss = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kron += wgk[j] * (f1 + f2);
        if (j % 2 == 1)
            gauss += wg[j / 2] * (f1 + f2);
    }
    kron *= h;
    gauss *= h;
    if (!std::isfinite(kron) || !std::isfinite(gauss))
        throw NonConvergence("integrate_1d: integrand is not finite on a panel");
    return {a, b, kron, std::abs(kron - gauss), order};
}

} // namespace

double gamma_fn(double z)
{
    require_positive(z, "gamma_fn");
    if (z < 0.5) {
        // Reflection keeps the Lanczos sum in its accurate range.
        return std::numbers::pi / (std::sin(std::numbers::pi * z) * gamma_fn(1.0 - z));
    }
    if (z > 170.0)
        return std::exp(lgamma_fn(z));
    const double zm1 = z - 1.0;
    const double t = zm1 + lanczos_g + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, zm1 + 0.5) * std::exp(-t) *
           lanczos_sum(zm1);
}

double lgamma_fn(double z)
{
    require_positive(z, "lgamma_fn");
    if (z < 0.5)
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * z)) - lgamma_fn(1.0 - z);
    const double zm1 = z - 1.0;
    const double t = zm1 + lanczos_g + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (zm1 + 0.5) * std::log(t) - t +
           std::log(lanczos_sum(zm1));
}

double beta_fn(double a, double b)
{
    require_positive(a, "beta_fn");
    require_positive(b, "beta_fn");
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    if (lo + hi < 160.0)
        return gamma_fn(lo) * (gamma_fn(hi) / gamma_fn(lo + hi));
    return std::exp(lgamma_fn(lo) + lgamma_fn(hi) - lgamma_fn(lo + hi));
}

QuadratureRule gauss_legendre(int n)
{
    if (n < 1)
        throw std::domain_error("gauss_legendre: n must be positive");
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    if (n == 1) {
        rule.weights[0] = 2.0;
        return rule;
    }
    // Returns (P_n(x), P_n'(x)).
    auto legendre = [n](double x) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
    };
    for (int i = 0; i < n / 2 + n % 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [pn, dpn] = legendre(x);
            const double dx = pn / dpn;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        const double dpn = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dpn * dpn);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

QuadratureRule gauss_kronrod15()
{
    QuadratureRule rule;
    rule.kind = RuleKind::adaptive_bisection;
    for (int j = 0; j < 7; ++j) {
        rule.nodes.push_back(-xgk[j]);
        rule.weights.push_back(wgk[j]);
    }
    rule.nodes.push_back(0.0);
    rule.weights.push_back(wgk[7]);
    for (int j = 6; j >= 0; --j) {
        rule.nodes.push_back(xgk[j]);
        rule.weights.push_back(wgk[j]);
    }
    return rule;
}

IntegrationResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                     double tol)
{
    if (!(tol > 0.0))
        throw std::domain_error("integrate_1d: tol must be positive");
    if (std::isnan(lo) || std::isnan(hi) || std::isinf(lo))
        throw std::domain_error("integrate_1d: invalid limits");
    if (lo == hi)
        return {};
    if (hi < lo) {
        auto r = integrate_adaptive(f, hi, lo, tol);
        r.value = -r.value;
        return r;
    }

    constexpr long max_panels = 1L << 20;
    std::priority_queue<Panel> queue;
    long order = 0;
    double total = 0.0;
    double total_err = 0.0;

    std::function<double(double)> tail;
    if (std::isinf(hi)) {
        const double cut = std::max(lo, 1.0);
        tail = [&f](double t) { return f(1.0 / t) / (t * t); };
        if (cut > lo) {
            Panel p = gk15(f, lo, cut, order++);
            total += p.value;
            total_err += p.error;
            queue.push(p);
        }
        Panel p = gk15(tail, 0.0, 1.0 / cut, order++);
        p.tail = true;
        total += p.value;
        total_err += p.error;
        queue.push(p);
    } else {
        Panel p = gk15(f, lo, hi, order++);
        total = p.value;
        total_err = p.error;
        queue.push(p);
    }

    long panels = static_cast<long>(queue.size());
    while (total_err > tol * (1.0 + std::abs(total))) {
        if (panels >= max_panels)
            throw NonConvergence("integrate_1d: adaptive subdivision budget exhausted");
        Panel worst = queue.top();
        queue.pop();
        const bool is_tail = worst.tail;
        const double a = worst.a;
        const double b = worst.b;
        const double mid = 0.5 * (a + b);
        if (!(mid > a && mid < b)) {
            // Cannot bisect further in double precision.
            throw NonConvergence("integrate_1d: panel width underflow");
        }
        const auto& g = is_tail ? tail : f;
        Panel left = gk15(g, a, mid, order++);
        Panel right = gk15(g, mid, b, order++);
        left.tail = right.tail = is_tail;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++panels;
    }

    // Re-sum from the panels to shed accumulated update round-off.
    double value = 0.0;
    double err = 0.0;
    std::vector<Panel> all;
    all.reserve(queue.size());
    while (!queue.empty()) {
        all.push_back(queue.top());
        queue.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.order < y.order; });
    for (const auto& p : all) {
        value += p.value;
        err += p.error;
    }
    return {value, err, static_cast<int>(panels)};
}

} // namespace pcond::specfun
