#include "pcond/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace pcond::geometry {

namespace {

constexpr double pi = std::numbers::pi;

[[noreturn]] void bad(const std::string& msg) { throw std::domain_error(msg); }

double excess_flat(const FlatProfile& f, double xp)
{
    const double d = dist_to_flat(f, xp);
    return f.curvature_coeff * d * d;
}

double excess_power(const PowerProfile& pw, double xp)
{
    return pw.amp(xp) * std::pow(std::abs(xp), 1.0 + pw.gamma);
}

} // namespace

void FlatProfile::validate() const
{
    if (!(sigma_half_width > 0.0))
        bad("FlatProfile: sigma_half_width must be positive");
    if (!(curvature_coeff > 0.0))
        bad("FlatProfile: curvature_coeff must be positive");
    if (!(patch_radius > sigma_half_width))
        bad("FlatProfile: patch_radius must exceed sigma_half_width");
}

void PowerProfile::validate() const
{
    if (!(gamma > 0.0 && gamma < 1.0))
        bad("PowerProfile: gamma must lie in (0, 1)");
    if (!(c0 > 1.0))
        bad("PowerProfile: c0 must exceed 1");
    for (double a : {amp_plus, amp_minus}) {
        if (!(a >= 1.0 / c0 && a <= c0))
            bad("PowerProfile: amplitude outside [1/c0, c0]");
    }
    if (!(patch_radius > 0.0))
        bad("PowerProfile: patch_radius must be positive");
}

double patch_radius(const Profile& profile)
{
    return std::visit([](const auto& p) { return p.patch_radius; }, profile);
}

void validate(const Profile& profile)
{
    std::visit([](const auto& p) { p.validate(); }, profile);
}

double gap_excess(const Profile& profile, double xp)
{
    if (const auto* f = std::get_if<FlatProfile>(&profile))
        return excess_flat(*f, xp);
    return excess_power(std::get<PowerProfile>(profile), xp);
}

double gap_excess_slope(const Profile& profile, double xp)
{
    if (const auto* f = std::get_if<FlatProfile>(&profile)) {
        const double d = dist_to_flat(*f, xp);
        return 2.0 * f->curvature_coeff * d * (xp < 0.0 ? -1.0 : 1.0);
    }
    const auto& pw = std::get<PowerProfile>(profile);
    const double mag = pw.amp(xp) * (1.0 + pw.gamma) * std::pow(std::abs(xp), pw.gamma);
    return xp < 0.0 ? -mag : mag;
}

double gap(const Profile& profile, double eps, double xp)
{
    const double r = patch_radius(profile);
    if (!(std::abs(xp) <= r))
        bad("gap: x' = " + std::to_string(xp) + " lies outside the patch");
    return eps + gap_excess(profile, xp);
}

double dist_to_flat(const FlatProfile& profile, double xp)
{
    return std::max(std::abs(xp) - profile.sigma_half_width, 0.0);
}

// ---------------------------------------------------------------------------

double TrigPolynomial::operator()(double theta) const
{
    double acc = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const double kt = static_cast<double>(k) * theta;
        acc += coeffs[k][0] * std::cos(kt) + coeffs[k][1] * std::sin(kt);
    }
    return acc;
}

double TrigPolynomial::sup_bound() const
{
    double s = 0.0;
    for (const auto& c : coeffs)
        s += std::hypot(c[0], c[1]);
    return s;
}

bool TrigPolynomial::is_constant() const
{
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        if (coeffs[k][0] != 0.0 || coeffs[k][1] != 0.0)
            return false;
    return true;
}

TrigPolynomial TrigPolynomial::scaled(double s) const
{
    TrigPolynomial out = *this;
    for (auto& c : out.coeffs) {
        c[0] *= s;
        c[1] *= s;
    }
    return out;
}

DomainSpec DomainSpec::with_profile(const Profile& profile, double eps)
{
    DomainSpec spec;
    spec.profile = profile;
    spec.epsilon = eps;
    const double r = patch_radius(profile);
    spec.outer_radius = 4.0 * r;
    spec.cap_radius = 0.25 * r;
    return spec;
}

double DomainSpec::phi_at(Vec2 p) const { return dirichlet(std::atan2(p.y, p.x)); }

void DomainSpec::validate() const
{
    geometry::validate(profile);
    const double r = patch_radius(profile);
    if (!(epsilon >= 0.0) || epsilon > 0.1 * r)
        bad("DomainSpec: epsilon must lie in [0, 0.1 * patch_radius]");
    if (epsilon == 0.0 && !std::holds_alternative<FlatProfile>(profile))
        bad("DomainSpec: epsilon = 0 is only supported for flat profiles");
    if (!(cap_radius > 0.0))
        bad("DomainSpec: cap_radius must be positive");
    if (!(split >= 0.0 && split <= 1.0))
        bad("DomainSpec: split must lie in [0, 1]");
    if (dirichlet.coeffs.empty() || dirichlet.coeffs.size() > 5)
        bad("DomainSpec: dirichlet needs between 1 and 5 coefficient pairs");
    for (const auto& c : dirichlet.coeffs)
        if (!std::isfinite(c[0]) || !std::isfinite(c[1]))
            bad("DomainSpec: non-finite dirichlet coefficient");
    if (!(outer_radius > 0.0))
        bad("DomainSpec: outer radius must be positive");

    // Clearance between the inclusions and the outer circle.
    const auto shape = make_shape(*this);
    double reach = 0.0;
    for (const auto& loop : shape->loops) {
        for (const auto& piece : loop) {
            if (piece.tag == tag_outer)
                continue;
            for (int i = 0; i <= 256; ++i)
                reach = std::max(reach, norm(piece.at(i / 256.0)));
        }
    }
    if (!(outer_radius - reach > 0.25 * outer_radius))
        bad("DomainSpec: inclusions come closer than L/4 to the outer boundary");
}

// ---------------------------------------------------------------------------

double Loop::signed_area() const
{
    double a = 0.0;
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i)
        a += cross(points[i], points[(i + 1) % n]);
    return 0.5 * a;
}

void Loop::reverse()
{
    const std::size_t n = points.size();
    if (n < 2)
        return;
    std::vector<int> tags(n);
    for (std::size_t j = 0; j < n; ++j)
        tags[j] = edge_tags[(2 * n - 2 - j) % n];
    std::reverse(points.begin(), points.end());
    std::reverse(vertex_tags.begin(), vertex_tags.end());
    edge_tags = std::move(tags);
}

bool inside_loop(const Loop& loop, Vec2 p)
{
    int winding = 0;
    const std::size_t n = loop.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = loop.points[i];
        const Vec2 b = loop.points[(i + 1) % n];
        const double side = cross(b - a, p - a);
        if (a.y <= p.y) {
            if (b.y > p.y && side > 0.0)
                ++winding;
        } else if (b.y <= p.y && side < 0.0) {
            --winding;
        }
    }
    return winding != 0;
}

// ---------------------------------------------------------------------------

Vec2 BoundaryShape::Piece::at(double s) const
{
    switch (kind) {
    case Kind::graph: {
        const double x = x0 + s * (x1 - x0);
        return {x, fn(x)};
    }
    case Kind::arc: {
        const double th = th0 + s * (th1 - th0);
        return {centre.x + radius * std::cos(th), centre.y + radius * std::sin(th)};
    }
    case Kind::segment:
        return a + s * (b - a);
    }
    return {};
}

Vec2 BoundaryShape::Piece::project(Vec2 p) const
{
    switch (kind) {
    case Kind::segment: {
        const Vec2 ab = b - a;
        const double len2 = dot(ab, ab);
        double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
        return a + std::clamp(t, 0.0, 1.0) * ab;
    }
    case Kind::arc: {
        const double lo = std::min(th0, th1);
        const double hi = std::max(th0, th1);
        double th = std::atan2(p.y - centre.y, p.x - centre.x);
        // Bring th next to the arc's range before clamping.
        const double mid = 0.5 * (lo + hi);
        th += 2.0 * pi * std::round((mid - th) / (2.0 * pi));
        if (th < lo || th > hi) {
            const Vec2 e0 = at(0.0);
            const Vec2 e1 = at(1.0);
            return distance(p, e0) <= distance(p, e1) ? e0 : e1;
        }
        return {centre.x + radius * std::cos(th), centre.y + radius * std::sin(th)};
    }
    case Kind::graph: {
        const double lo = std::min(x0, x1);
        const double hi = std::max(x0, x1);
        const double xc = std::clamp(p.x, lo, hi);
        // The closest point lies within this horizontal window of xc.
        const double reach = std::abs(p.y - fn(xc)) + std::abs(p.x - xc);
        double a0 = std::max(lo, xc - reach);
        double b0 = std::min(hi, xc + reach);
        auto d2 = [&](double x) {
            const double dy = fn(x) - p.y;
            return (x - p.x) * (x - p.x) + dy * dy;
        };
        // Coarse scan then golden section around the best sample.
        constexpr int scan = 32;
        double best_x = xc;
        double best = d2(xc);
        const double step = (b0 - a0) / scan;
        for (int i = 0; i <= scan; ++i) {
            const double x = a0 + i * step;
            const double v = d2(x);
            if (v < best) {
                best = v;
                best_x = x;
            }
        }
        double l = std::max(a0, best_x - step);
        double r = std::min(b0, best_x + step);
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double m1 = r - g * (r - l);
        double m2 = l + g * (r - l);
        double f1 = d2(m1);
        double f2 = d2(m2);
        for (int it = 0; it < 80 && r - l > 1e-15 * (1.0 + std::abs(l)); ++it) {
            if (f1 < f2) {
                r = m2;
                m2 = m1;
                f2 = f1;
                m1 = r - g * (r - l);
                f1 = d2(m1);
            } else {
                l = m1;
                m1 = m2;
                f1 = f2;
                m2 = l + g * (r - l);
                f2 = d2(m2);
            }
        }
        const double xm = 0.5 * (l + r);
        if (d2(xm) < best)
            best_x = xm;
        return {best_x, fn(best_x)};
    }
    }
    return p;
}

Vec2 BoundaryShape::project(int tag, Vec2 p) const
{
    Vec2 best = p;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& loop : loops) {
        for (const auto& piece : loop) {
            if (piece.tag != tag)
                continue;
            const Vec2 q = piece.project(p);
            const double d = distance(p, q);
            if (d < best_d) {
                best_d = d;
                best = q;
            }
        }
    }
    return best;
}

double BoundaryShape::distance_to(int tag, Vec2 p) const
{
    return distance(p, project(tag, p));
}

// ---------------------------------------------------------------------------

namespace {

using Piece = BoundaryShape::Piece;

Piece make_graph(std::function<double(double)> fn, double x0, double x1, int tag)
{
    Piece pc;
    pc.kind = Piece::Kind::graph;
    pc.fn = std::move(fn);
    pc.x0 = x0;
    pc.x1 = x1;
    pc.tag = tag;
    return pc;
}

Piece make_arc(Vec2 c, double r, double th0, double th1, int tag)
{
    Piece pc;
    pc.kind = Piece::Kind::arc;
    pc.centre = c;
    pc.radius = r;
    pc.th0 = th0;
    pc.th1 = th1;
    pc.tag = tag;
    return pc;
}

Piece make_segment(Vec2 a, Vec2 b, int tag)
{
    Piece pc;
    pc.kind = Piece::Kind::segment;
    pc.a = a;
    pc.b = b;
    pc.tag = tag;
    return pc;
}

Piece reflected(const Piece& pc)
{
    Piece out = pc;
    switch (pc.kind) {
    case Piece::Kind::graph: {
        auto f = pc.fn;
        out.fn = [f](double x) { return -f(x); };
        break;
    }
    case Piece::Kind::arc:
        out.centre.y = -pc.centre.y;
        out.th0 = -pc.th0;
        out.th1 = -pc.th1;
        break;
    case Piece::Kind::segment:
        out.a.y = -pc.a.y;
        out.b.y = -pc.b.y;
        break;
    }
    return out;
}

Piece reversed(const Piece& pc)
{
    Piece out = pc;
    std::swap(out.x0, out.x1);
    std::swap(out.th0, out.th1);
    std::swap(out.a, out.b);
    return out;
}

std::vector<Piece> reversed(const std::vector<Piece>& pieces)
{
    std::vector<Piece> out;
    out.reserve(pieces.size());
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it)
        out.push_back(reversed(*it));
    return out;
}

// Pieces of an inclusion lying above the graph y = lift + g(x), |x| <= R,
// traversed counterclockwise starting at the graph. With cut >= 0 the graph
// part |x| < cut is left out; the list then starts at x = cut and ends at
// x = -cut.
std::vector<Piece> upper_inclusion(const std::function<double(double)>& g,
                                   const std::function<double(double)>& slope, double lift,
                                   double R, double rcap, double cut, int tag)
{
    auto y = [g, lift](double x) { return lift + g(x); };
    std::vector<Piece> out;

    const Vec2 pr{R, y(R)};
    const Vec2 pl{-R, y(-R)};
    const double sr = slope(R);
    const double sl = slope(-R);
    const double nr = std::sqrt(1.0 + sr * sr);
    const double nl = std::sqrt(1.0 + sl * sl);
    const Vec2 cr = pr + rcap * Vec2{-sr / nr, 1.0 / nr};
    const Vec2 cl = pl + rcap * Vec2{-sl / nl, 1.0 / nl};
    const double top = std::max(cr.y, cl.y);
    const double xr = cr.x + rcap;
    const double xl = cl.x - rcap;
    const Vec2 ctop{0.5 * (xr + xl), top};
    const double rtop = 0.5 * (xr - xl);

    if (cut < 0.0)
        out.push_back(make_graph(y, -R, R, tag));
    else
        out.push_back(make_graph(y, cut, R, tag));

    const double thr = std::atan2(pr.y - cr.y, pr.x - cr.x);
    out.push_back(make_arc(cr, rcap, thr, 0.0, tag));
    if (top > cr.y)
        out.push_back(make_segment({xr, cr.y}, {xr, top}, tag));
    out.push_back(make_arc(ctop, rtop, 0.0, pi, tag));
    if (top > cl.y)
        out.push_back(make_segment({xl, top}, {xl, cl.y}, tag));
    double thl = std::atan2(pl.y - cl.y, pl.x - cl.x);
    if (thl < pi)
        thl += 2.0 * pi;
    out.push_back(make_arc(cl, rcap, pi, thl, tag));

    if (cut >= 0.0)
        out.push_back(make_graph(y, -R, -cut, tag));
    return out;
}

} // namespace

std::shared_ptr<const BoundaryShape> make_shape(const DomainSpec& spec, double merge_cut)
{
    const double R = patch_radius(spec.profile);
    const Profile prof = spec.profile;
    const double t = spec.split;
    const double e = spec.epsilon;

    auto g1 = [prof, t](double x) { return t * gap_excess(prof, x); };
    auto s1 = [prof, t](double x) { return t * gap_excess_slope(prof, x); };
    auto g2 = [prof, t](double x) { return (1.0 - t) * gap_excess(prof, x); };
    auto s2 = [prof, t](double x) { return (1.0 - t) * gap_excess_slope(prof, x); };

    auto shape = std::make_shared<BoundaryShape>();
    shape->loops.push_back({make_arc({0.0, 0.0}, spec.outer_radius, 0.0, 2.0 * pi, tag_outer)});

    const bool merged = e == 0.0;
    if (!merged) {
        shape->loops.push_back(upper_inclusion(g1, s1, 0.5 * e, R, spec.cap_radius, -1.0, tag_inclusion1));
        std::vector<Piece> lower;
        for (const auto& pc : upper_inclusion(g2, s2, 0.5 * e, R, spec.cap_radius, -1.0, tag_inclusion2))
            lower.push_back(reflected(pc));
        shape->loops.push_back(std::move(lower));
        return shape;
    }

    const auto* flat = std::get_if<FlatProfile>(&prof);
    if (flat == nullptr)
        throw GeometryError("make_shape: touching inclusions need a flat profile");
    const double xc = flat->sigma_half_width + std::sqrt(merge_cut / flat->curvature_coeff);
    if (!(xc < R))
        throw GeometryError("make_shape: merge cut lies outside the patch");

    auto up = upper_inclusion(g1, s1, 0.0, R, spec.cap_radius, xc, tag_inclusion1);
    std::vector<Piece> low_cw;
    for (const auto& pc : upper_inclusion(g2, s2, 0.0, R, spec.cap_radius, xc, tag_inclusion2))
        low_cw.push_back(reflected(pc));
    auto low = reversed(low_cw);

    std::vector<Piece> hole = up;
    const double yu_l = g1(-xc), yl_l = -g2(-xc);
    const double yu_r = g1(xc), yl_r = -g2(xc);
    if (yu_l > 0.0)
        hole.push_back(make_segment({-xc, yu_l}, {-xc, 0.0}, tag_inclusion1));
    if (yl_l < 0.0)
        hole.push_back(make_segment({-xc, 0.0}, {-xc, yl_l}, tag_inclusion2));
    hole.insert(hole.end(), low.begin(), low.end());
    if (yl_r < 0.0)
        hole.push_back(make_segment({xc, yl_r}, {xc, 0.0}, tag_inclusion2));
    if (yu_r > 0.0)
        hole.push_back(make_segment({xc, 0.0}, {xc, yu_r}, tag_inclusion1));
    shape->loops.push_back(std::move(hole));
    return shape;
}

// ---------------------------------------------------------------------------

namespace {

double chord_deviation(const Piece& pc, double s0, double s1, Vec2 a, Vec2 b)
{
    if (pc.kind == Piece::Kind::segment)
        return 0.0;
    if (pc.kind == Piece::Kind::arc)
        return pc.radius * (1.0 - std::cos(0.5 * std::abs(pc.th1 - pc.th0) * (s1 - s0)));
    double dev = 0.0;
    for (double f : {0.25, 0.5, 0.75})
        dev = std::max(dev, segment_distance(pc.at(s0 + f * (s1 - s0)), a, b));
    return dev;
}

void refine_interval(const Piece& pc, double s0, double s1, const SamplingOptions& opts,
                     bool check_deviation, std::vector<double>& out, int depth)
{
    const Vec2 a = pc.at(s0);
    const Vec2 b = pc.at(s1);
    const double sm = 0.5 * (s0 + s1);
    bool split = false;
    if (check_deviation) {
        double tol = opts.arc_tol;
        if (opts.local_tol)
            tol = std::min(tol, opts.local_tol(pc.at(sm)));
        split = chord_deviation(pc, s0, s1, a, b) > tol;
    }
    if (!split && opts.spacing) {
        const double len = distance(a, b);
        const double h = std::min({opts.spacing(a), opts.spacing(b), opts.spacing(pc.at(sm))});
        split = len > h;
    }
    if (split && depth < 60 && sm > s0 && sm < s1) {
        refine_interval(pc, s0, sm, opts, check_deviation, out, depth + 1);
        out.push_back(sm);
        refine_interval(pc, sm, s1, opts, check_deviation, out, depth + 1);
    }
}

// Parameter values in [0, 1) of the vertices placed on one piece.
std::vector<double> sample_piece(const Piece& pc, const SamplingOptions& opts)
{
    std::vector<double> knots;
    if (pc.kind == Piece::Kind::arc) {
        // Full steps of the exact angle giving chord deviation arc_tol, with
        // the remainder split evenly between both ends.
        const double span = std::abs(pc.th1 - pc.th0);
        const double ratio = std::min(opts.arc_tol / pc.radius, 1.0);
        const double step = 2.0 * std::acos(1.0 - ratio);
        const double full = std::floor(span / step);
        std::vector<double> coarse{0.0};
        if (full >= 1.0 && step < span) {
            const double rem = 0.5 * (span - full * step);
            if (rem > 1e-12 * span)
                coarse.push_back(rem / span);
            for (int k = 1; k < static_cast<int>(full); ++k)
                coarse.push_back((rem + k * step) / span);
            if (rem > 1e-12 * span)
                coarse.push_back((rem + full * step) / span);
        } else if (span > 0.0) {
            coarse.push_back(0.5);
        }
        coarse.push_back(1.0);
        for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
            knots.push_back(coarse[i]);
            refine_interval(pc, coarse[i], coarse[i + 1], opts, false, knots, 0);
        }
        return knots;
    }
    knots.push_back(0.0);
    // Graphs start from a few even panels so that features are not skipped.
    const int start = pc.kind == Piece::Kind::graph ? 8 : 1;
    for (int i = 0; i < start; ++i) {
        const double a = static_cast<double>(i) / start;
        const double b = static_cast<double>(i + 1) / start;
        if (i > 0)
            knots.push_back(a);
        refine_interval(pc, a, b, opts, pc.kind == Piece::Kind::graph, knots, 0);
    }
    return knots;
}

} // namespace

std::vector<Loop> sample_shape(const BoundaryShape& shape, const SamplingOptions& opts)
{
    if (!(opts.arc_tol > 0.0))
        throw std::domain_error("sample_shape: arc_tol must be positive");
    std::vector<Loop> loops;
    for (const auto& pieces : shape.loops) {
        Loop loop;
        for (const auto& pc : pieces) {
            for (double s : sample_piece(pc, opts)) {
                loop.points.push_back(pc.at(s));
                loop.vertex_tags.push_back(pc.tag);
                loop.edge_tags.push_back(pc.tag);
            }
        }
        const std::size_t n = loop.points.size();
        // Vertices joining the two halves of a merged hole follow their side.
        for (std::size_t i = 0; i < n; ++i) {
            const int in = loop.edge_tags[(i + n - 1) % n];
            const int outt = loop.edge_tags[i];
            if (in != outt && in != tag_outer && outt != tag_outer)
                loop.vertex_tags[i] = loop.points[i].y >= 0.0 ? tag_inclusion1 : tag_inclusion2;
        }
        const bool outer = !pieces.empty() && pieces.front().tag == tag_outer;
        const double area = loop.signed_area();
        if ((outer && area < 0.0) || (!outer && area > 0.0))
            loop.reverse();
        loops.push_back(std::move(loop));
    }
    return loops;
}

namespace {

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
    auto orient = [](Vec2 p, Vec2 q, Vec2 r) { return cross(q - p, r - p); };
    const double o1 = orient(a, b, c);
    const double o2 = orient(a, b, d);
    const double o3 = orient(c, d, a);
    const double o4 = orient(c, d, b);
    if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
        return true;
    auto on_seg = [](Vec2 p, Vec2 q, Vec2 r) {
        return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
               r.y <= std::max(p.y, q.y);
    };
    return (o1 == 0 && on_seg(a, b, c)) || (o2 == 0 && on_seg(a, b, d)) ||
           (o3 == 0 && on_seg(c, d, a)) || (o4 == 0 && on_seg(c, d, b));
}

} // namespace

void check_simple(const std::vector<Loop>& loops)
{
    struct Edge {
        Vec2 a, b;
        double xmin, xmax;
        std::size_t loop, idx, n;
    };
    std::vector<Edge> edges;
    for (std::size_t l = 0; l < loops.size(); ++l) {
        const auto& pts = loops[l].points;
        const std::size_t n = pts.size();
        if (n < 3)
            throw GeometryError("boundary loop with fewer than three vertices");
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = pts[i];
            const Vec2 b = pts[(i + 1) % n];
            if (a == b)
                throw GeometryError("boundary loop with a repeated vertex");
            edges.push_back({a, b, std::min(a.x, b.x), std::max(a.x, b.x), l, i, n});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& u, const Edge& v) {
        return u.xmin != v.xmin ? u.xmin < v.xmin : (u.loop != v.loop ? u.loop < v.loop : u.idx < v.idx);
    });
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        const double ylo = std::min(e.a.y, e.b.y);
        const double yhi = std::max(e.a.y, e.b.y);
        for (std::size_t j = i + 1; j < edges.size() && edges[j].xmin <= e.xmax; ++j) {
            const Edge& f = edges[j];
            if (std::max(f.a.y, f.b.y) < ylo || std::min(f.a.y, f.b.y) > yhi)
                continue;
            if (e.loop == f.loop) {
                const std::size_t d = e.idx > f.idx ? e.idx - f.idx : f.idx - e.idx;
                if (d == 1 || d == e.n - 1)
                    continue; // neighbours share an endpoint
            }
            if (segments_cross(e.a, e.b, f.a, f.b)) {
                throw GeometryError(e.loop == f.loop ? "boundary polyline self-intersects"
                                                     : "boundary polylines intersect each other");
            }
        }
    }
}

BoundaryCurves boundary_curves(const DomainSpec& spec, double arc_tol)
{
    if (!(arc_tol > 0.0))
        throw std::domain_error("boundary_curves: arc_tol must be positive");
    spec.validate();
    if (spec.epsilon == 0.0)
        throw GeometryError("boundary_curves: touching inclusions form a single hole");
    const auto shape = make_shape(spec);
    const double R = patch_radius(spec.profile);
    SamplingOptions opts;
    opts.arc_tol = arc_tol;
    opts.spacing = [&spec, R, arc_tol](Vec2 p) {
        if (std::abs(p.x) > R)
            return std::numeric_limits<double>::infinity();
        const double d = gap(spec.profile, spec.epsilon, p.x);
        if (std::abs(p.y) > d)
            return std::numeric_limits<double>::infinity();
        return std::min(arc_tol, 0.25 * d);
    };
    auto loops = sample_shape(*shape, opts);
    check_simple(loops);
    BoundaryCurves out;
    out.outer = std::move(loops[0]);
    out.inclusion1 = std::move(loops[1]);
    out.inclusion2 = std::move(loops[2]);
    return out;
}

} // namespace pcond::geometry
