#include "pcond/geometry.hpp"
#include "pcond/spec_json.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

using namespace pcond;
using namespace pcond::geometry;

namespace {

DomainSpec flat_spec(double eps)
{
    return DomainSpec::with_profile(FlatProfile{0.5, 1.0, 1.0}, eps);
}

DomainSpec power_spec(double eps, double a = 1.0)
{
    return DomainSpec::with_profile(PowerProfile{0.5, a, a, 2.0, 1.0}, eps);
}

// y of the polyline edge crossing the vertical line at x, among edges whose
// endpoints have |y| below ymax.
double polyline_y_at(const Loop& loop, double x, double ymax)
{
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = loop.points[i];
        const Vec2 b = loop.points[(i + 1) % n];
        if (std::abs(a.y) > ymax || std::abs(b.y) > ymax)
            continue;
        if ((a.x - x) * (b.x - x) <= 0.0 && a.x != b.x)
            return a.y + (x - a.x) / (b.x - a.x) * (b.y - a.y);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

// Max over dense samples of the exact curves of the distance to the polyline.
double hausdorff(const BoundaryShape& shape, const std::vector<Loop>& loops)
{
    const double cell = 0.05;
    std::map<std::pair<long, long>, std::vector<std::pair<Vec2, Vec2>>> grid;
    for (const auto& loop : loops) {
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const Vec2 a = loop.points[i];
            const Vec2 b = loop.points[(i + 1) % loop.size()];
            const long x0 = std::lround(std::floor(std::min(a.x, b.x) / cell));
            const long x1 = std::lround(std::floor(std::max(a.x, b.x) / cell));
            const long y0 = std::lround(std::floor(std::min(a.y, b.y) / cell));
            const long y1 = std::lround(std::floor(std::max(a.y, b.y) / cell));
            for (long ix = x0; ix <= x1; ++ix)
                for (long iy = y0; iy <= y1; ++iy)
                    grid[{ix, iy}].push_back({a, b});
        }
    }
    double worst = 0.0;
    for (const auto& pieces : shape.loops) {
        for (const auto& pc : pieces) {
            constexpr int m = 20000;
            for (int k = 0; k <= m; ++k) {
                const Vec2 p = pc.at(static_cast<double>(k) / m);
                const long ix = std::lround(std::floor(p.x / cell));
                const long iy = std::lround(std::floor(p.y / cell));
                double best = std::numeric_limits<double>::infinity();
                for (long dx = -1; dx <= 1; ++dx) {
                    for (long dy = -1; dy <= 1; ++dy) {
                        auto it = grid.find({ix + dx, iy + dy});
                        if (it == grid.end())
                            continue;
                        for (const auto& [a, b] : it->second)
                            best = std::min(best, segment_distance(p, a, b));
                    }
                }
                worst = std::max(worst, best);
            }
        }
    }
    return worst;
}

} // namespace

TEST_CASE("gap examples")
{
    const FlatProfile flat{0.5, 1.0, 1.0};
    CHECK(gap(flat, 0.01, 0.3) == 0.01);
    CHECK(std::abs(gap(flat, 0.01, 0.7) - 0.05) < 1e-15);
    const PowerProfile cusp{0.5, 1.0, 1.0, 2.0, 1.0};
    CHECK(std::abs(gap(cusp, 0.001, 0.04) - 0.009) < 1e-15);
}

TEST_CASE("gap rejects points outside the patch")
{
    const FlatProfile flat{0.5, 1.0, 1.0};
    CHECK_THROWS_AS(gap(flat, 0.01, 1.2), std::domain_error);
    CHECK_THROWS_AS(gap(PowerProfile{}, 0.01, -1.0001), std::domain_error);
}

TEST_CASE("dist_to_flat examples")
{
    const FlatProfile flat{0.5, 1.0, 1.0};
    CHECK(dist_to_flat(flat, 0.2) == 0.0);
    CHECK(dist_to_flat(flat, 0.5) == 0.0);
    CHECK(std::abs(dist_to_flat(flat, -1.3) - 0.8) < 1e-15);
}

TEST_CASE("gap properties on the patch")
{
    const FlatProfile flat{0.4, 2.5, 1.0};
    const PowerProfile cusp{0.3, 1.5, 0.7, 2.0, 1.0};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> xd(-1.0, 1.0);
    std::uniform_real_distribution<double> ed(1e-5, 0.1);
    for (int i = 0; i < 500; ++i) {
        const double x = xd(rng);
        const double e = ed(rng);
        REQUIRE(gap(flat, e, x) >= e);
        REQUIRE(gap(cusp, e, x) >= e);
        const double d = dist_to_flat(flat, x);
        REQUIRE(gap(flat, e, x) - e == doctest::Approx(flat.curvature_coeff * d * d).epsilon(1e-12));
        if (std::abs(x) < flat.sigma_half_width)
            REQUIRE(gap(flat, e, x) == e);
    }
    CHECK(gap(cusp, 0.02, 0.0) == 0.02);
}

TEST_CASE("profile validation")
{
    CHECK_THROWS_AS(FlatProfile({0.0, 1.0, 1.0}).validate(), std::domain_error);
    CHECK_THROWS_AS(FlatProfile({0.5, 1.0, 0.4}).validate(), std::domain_error);
    CHECK_THROWS_AS(PowerProfile({1.0, 1.0, 1.0, 2.0, 1.0}).validate(), std::domain_error);
    CHECK_THROWS_AS(PowerProfile({0.5, 3.0, 3.0, 2.0, 1.0}).validate(), std::domain_error);
    CHECK_NOTHROW(PowerProfile({0.5, 2.0, 0.5, 2.0, 1.0}).validate());
}

TEST_CASE("domain spec validation")
{
    CHECK_NOTHROW(flat_spec(0.01).validate());
    CHECK_NOTHROW(flat_spec(0.0).validate());
    CHECK_THROWS_AS(power_spec(0.0).validate(), std::domain_error);
    auto s = flat_spec(0.01);
    s.outer_radius = 1.8;
    CHECK_THROWS_AS(s.validate(), std::domain_error);
    s = flat_spec(0.2);
    CHECK_THROWS_AS(s.validate(), std::domain_error);
    s = flat_spec(0.01);
    s.split = 1.5;
    CHECK_THROWS_AS(s.validate(), std::domain_error);
}

TEST_CASE("trig polynomial boundary data")
{
    TrigPolynomial phi;
    CHECK(phi(std::numbers::pi / 2) == doctest::Approx(1.0));
    CHECK(phi(0.0) == doctest::Approx(0.0));
    CHECK(!phi.is_constant());
    TrigPolynomial c{{{0.7, 0.0}}};
    CHECK(c.is_constant());
    CHECK(c(1.234) == 0.7);
    CHECK(phi.scaled(-2.0)(std::numbers::pi / 2) == doctest::Approx(-2.0));
}

TEST_CASE("flat curves keep the central gap")
{
    const auto spec = flat_spec(0.1);
    const auto curves = boundary_curves(spec, 0.01);
    for (double x : {-0.45, -0.2, 0.0, 0.13, 0.4}) {
        const double y1 = polyline_y_at(curves.inclusion1, x, 0.2);
        const double y2 = polyline_y_at(curves.inclusion2, x, 0.2);
        CHECK(std::abs((y1 - y2) - 0.1) < 1e-12);
    }
}

TEST_CASE("cusp inclusion is translated by half the gap")
{
    const auto curves = boundary_curves(power_spec(0.01), 0.01);
    Vec2 low{0.0, std::numeric_limits<double>::infinity()};
    for (const auto& p : curves.inclusion1.points)
        if (p.y < low.y)
            low = p;
    CHECK(low.x == 0.0);
    CHECK(std::abs(low.y - 0.005) < 1e-15);
}

TEST_CASE("curve orientation, simplicity and winding")
{
    for (const auto& spec : {flat_spec(0.01), power_spec(0.003), flat_spec(1e-4)}) {
        const auto c = boundary_curves(spec, 0.02);
        CHECK(c.outer.signed_area() > 0.0);
        CHECK(c.inclusion1.signed_area() < 0.0);
        CHECK(c.inclusion2.signed_area() < 0.0);
        CHECK_NOTHROW(check_simple({c.outer, c.inclusion1, c.inclusion2}));
        const Vec2 mid = neck_centre(spec);
        CHECK(!inside_loop(c.inclusion1, mid));
        CHECK(!inside_loop(c.inclusion2, mid));
        CHECK(inside_loop(c.outer, mid));
        CHECK(inside_loop(c.inclusion1, {0.0, spec.epsilon / 2 + 0.05}));
        CHECK(inside_loop(c.inclusion2, {0.0, -spec.epsilon / 2 - 0.05}));
        for (int t : c.inclusion1.edge_tags)
            CHECK(t == tag_inclusion1);
        for (int t : c.outer.vertex_tags)
            CHECK(t == tag_outer);
    }
}

TEST_CASE("neck spacing follows the gap")
{
    const auto spec = power_spec(1e-3);
    const double tol = 0.02;
    const auto c = boundary_curves(spec, tol);
    const Loop& l = c.inclusion1;
    for (std::size_t i = 0; i < l.size(); ++i) {
        const Vec2 a = l.points[i];
        const Vec2 b = l.points[(i + 1) % l.size()];
        if (std::abs(a.x) > 1.0 || std::abs(b.x) > 1.0 || a.y > 0.5 || b.y > 0.5)
            continue;
        const double d = std::min(gap(spec.profile, spec.epsilon, a.x), gap(spec.profile, spec.epsilon, b.x));
        REQUIRE(distance(a, b) <= std::min(tol, 0.25 * d) * (1.0 + 1e-12));
    }
}

TEST_CASE("symmetric split mirrors the inclusions")
{
    const auto c = boundary_curves(power_spec(0.01), 0.01);
    REQUIRE(c.inclusion1.size() == c.inclusion2.size());
    // Every inclusion-1 vertex reflected lies on inclusion 2.
    std::vector<Vec2> q = c.inclusion2.points;
    auto key = [](Vec2 a, Vec2 b) { return a.x != b.x ? a.x < b.x : a.y < b.y; };
    std::sort(q.begin(), q.end(), key);
    for (const auto& p : c.inclusion1.points)
        CHECK(std::binary_search(q.begin(), q.end(), Vec2{p.x, -p.y}, key));
}

TEST_CASE("asymmetric split keeps a simple configuration")
{
    for (double t : {0.0, 1.0}) {
        auto spec = flat_spec(1e-3);
        spec.split = t;
        CHECK_NOTHROW(boundary_curves(spec, 0.01));
    }
    auto spec = DomainSpec::with_profile(PowerProfile{0.5, 2.0, 0.6, 2.0, 1.0}, 1e-3);
    spec.split = 0.2;
    CHECK_NOTHROW(boundary_curves(spec, 0.01));
}

TEST_CASE("halving arc_tol halves the distance to the exact curves")
{
    for (const auto& spec : {flat_spec(0.01), power_spec(0.01)}) {
        const auto shape = make_shape(spec);
        double prev = 0.0;
        for (double tol : {0.02, 0.01, 0.005}) {
            const auto c = boundary_curves(spec, tol);
            const double h = hausdorff(*shape, {c.outer, c.inclusion1, c.inclusion2});
            CHECK(h <= tol * (1.0 + 1e-9));
            if (prev > 0.0)
                CHECK(h <= 0.5 * prev * (1.0 + 1e-4));
            prev = h;
        }
    }
}

TEST_CASE("touching inclusions merge into one hole")
{
    const auto spec = flat_spec(0.0);
    const auto shape = make_shape(spec);
    REQUIRE(shape->loops.size() == 2);
    SamplingOptions opts;
    opts.arc_tol = 0.01;
    const auto loops = sample_shape(*shape, opts);
    CHECK_NOTHROW(check_simple(loops));
    CHECK(loops[1].signed_area() < 0.0);
    bool has1 = false, has2 = false;
    for (std::size_t i = 0; i < loops[1].size(); ++i) {
        const int t = loops[1].vertex_tags[i];
        has1 |= t == tag_inclusion1;
        has2 |= t == tag_inclusion2;
        if (t == tag_inclusion1)
            CHECK(loops[1].points[i].y >= 0.0);
        else
            CHECK(loops[1].points[i].y < 0.0);
    }
    CHECK(has1);
    CHECK(has2);
    CHECK_THROWS_AS(boundary_curves(spec, 0.01), GeometryError);
}

TEST_CASE("projection onto the exact boundary")
{
    const auto spec = power_spec(0.01);
    const auto shape = make_shape(spec);
    const Vec2 q = shape->project(tag_inclusion1, {0.3, 0.05});
    CHECK(std::abs(q.y - (0.005 + 0.5 * std::pow(0.3, 1.5))) < 0.02);
    CHECK(shape->distance_to(tag_inclusion1, q) < 1e-12);
    const Vec2 o = shape->project(tag_outer, {1.0, 1.0});
    CHECK(std::abs(norm(o) - 4.0) < 1e-12);
    // Points on the graph project to themselves.
    const Vec2 g{0.2, 0.005 + 0.5 * std::pow(0.2, 1.5)};
    CHECK(distance(shape->project(tag_inclusion1, g), g) < 1e-9);
}

TEST_CASE("domain spec JSON round trip")
{
    auto spec = DomainSpec::with_profile(PowerProfile{0.4, 1.5, 0.8, 2.0, 1.0}, 0.002);
    spec.split = 0.3;
    spec.dirichlet.coeffs = {{0.1, 0.0}, {0.5, 1.0}, {0.0, -0.25}};
    const auto back = spec_from_json(to_json(spec));
    const auto& p = std::get<PowerProfile>(back.profile);
    CHECK(p.gamma == 0.4);
    CHECK(p.amp_plus == 1.5);
    CHECK(p.amp_minus == 0.8);
    CHECK(back.epsilon == 0.002);
    CHECK(back.split == 0.3);
    CHECK(back.outer_radius == spec.outer_radius);
    CHECK(back.dirichlet.coeffs == spec.dirichlet.coeffs);

    const auto doc = nlohmann::json::parse(R"({"profile":{"kind":"flat","params":{"sigma_half_width":0.3}},
                                               "epsilon":0.001})");
    const auto f = spec_from_json(doc);
    CHECK(std::get<FlatProfile>(f.profile).sigma_half_width == 0.3);
    CHECK(f.outer_radius == 4.0);
    CHECK_THROWS(spec_from_json(nlohmann::json::parse(R"({"profile":{"kind":"oval"}})")));
}
