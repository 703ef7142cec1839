#include "pcond/predicates.hpp"

#include <cmath>
#include <vector>

namespace pcond::predicates {

namespace {

constexpr double machine_eps = 1.1102230246251565e-16; // 2^-53
constexpr double orient_bound = (3.0 + 16.0 * machine_eps) * machine_eps;
constexpr double incircle_bound = (10.0 + 96.0 * machine_eps) * machine_eps;

using Expansion = std::vector<double>;

inline void two_sum(double a, double b, double& x, double& y)
{
    x = a + b;
    const double bv = x - a;
    const double av = x - bv;
    y = (a - av) + (b - bv);
}

inline void two_product(double a, double b, double& x, double& y)
{
    x = a * b;
    y = std::fma(a, b, -x);
}

// Sum of two nonoverlapping expansions, zero components dropped.
Expansion add(const Expansion& e, const Expansion& f)
{
    Expansion h = e;
    for (double b : f) {
        Expansion next;
        next.reserve(h.size() + 1);
        double q = b;
        for (double a : h) {
            double s, err;
            two_sum(q, a, s, err);
            if (err != 0.0)
                next.push_back(err);
            q = s;
        }
        if (q != 0.0)
            next.push_back(q);
        h = std::move(next);
    }
    return h;
}

Expansion scale(const Expansion& e, double b)
{
    Expansion h;
    for (double a : e) {
        double p, perr;
        two_product(a, b, p, perr);
        h = add(h, Expansion{perr, p});
    }
    return h;
}

Expansion mul(const Expansion& e, const Expansion& f)
{
    Expansion h;
    for (double b : f)
        h = add(h, scale(e, b));
    return h;
}

Expansion neg(Expansion e)
{
    for (double& x : e)
        x = -x;
    return e;
}

Expansion diff(double a, double b)
{
    double x, y;
    two_sum(a, -b, x, y);
    Expansion e;
    if (y != 0.0)
        e.push_back(y);
    if (x != 0.0)
        e.push_back(x);
    return e;
}

double sign_of(const Expansion& e)
{
    for (auto it = e.rbegin(); it != e.rend(); ++it)
        if (*it != 0.0)
            return *it;
    return 0.0;
}

double orient_exact(Vec2 a, Vec2 b, Vec2 c)
{
    const Expansion acx = diff(a.x, c.x), bcx = diff(b.x, c.x);
    const Expansion acy = diff(a.y, c.y), bcy = diff(b.y, c.y);
    return sign_of(add(mul(acx, bcy), neg(mul(acy, bcx))));
}

double incircle_exact(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
    const Expansion adx = diff(a.x, d.x), ady = diff(a.y, d.y);
    const Expansion bdx = diff(b.x, d.x), bdy = diff(b.y, d.y);
    const Expansion cdx = diff(c.x, d.x), cdy = diff(c.y, d.y);
    const Expansion alift = add(mul(adx, adx), mul(ady, ady));
    const Expansion blift = add(mul(bdx, bdx), mul(bdy, bdy));
    const Expansion clift = add(mul(cdx, cdx), mul(cdy, cdy));
    const Expansion bc = add(mul(bdx, cdy), neg(mul(bdy, cdx)));
    const Expansion ca = add(mul(cdx, ady), neg(mul(cdy, adx)));
    const Expansion ab = add(mul(adx, bdy), neg(mul(ady, bdx)));
    return sign_of(add(add(mul(alift, bc), mul(blift, ca)), mul(clift, ab)));
}

} // namespace

double orient2d(Vec2 a, Vec2 b, Vec2 c)
{
    const double left = (a.x - c.x) * (b.y - c.y);
    const double right = (a.y - c.y) * (b.x - c.x);
    const double det = left - right;
    const double sum = std::abs(left) + std::abs(right);
    if (std::abs(det) > orient_bound * sum)
        return det;
    return orient_exact(a, b, c);
}

double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                             (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                             (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    if (std::abs(det) > incircle_bound * permanent)
        return det;
    return incircle_exact(a, b, c, d);
}

} // namespace pcond::predicates
