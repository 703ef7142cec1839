#include "pcond/mesh.hpp"

#include "pcond/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace pcond::mesh {

using predicates::incircle;
using predicates::orient2d;

namespace {

constexpr int next3(int i) { return i == 2 ? 0 : i + 1; }
constexpr int prev3(int i) { return i == 0 ? 2 : i - 1; }

std::uint64_t edge_key(int a, int b)
{
    if (a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> nb{-1, -1, -1};  // neighbour across the edge opposite v[i]
    std::array<int, 3> tag{-1, -1, -1}; // segment tag of that edge, -1 if unconstrained
    bool alive = true;
    bool inside = false;
};

struct CavityEdge {
    int x, y;     // edge seen counterclockwise from the new point
    int outer;    // triangle across, or -1
    int tag;      // constraint tag, or -1
    bool inside;  // side flag of the cavity triangle owning the edge
};

enum class WalkResult { found, crossed };

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, int order)
{
    const std::uint32_t n = 1u << order;
    std::uint64_t d = 0;
    for (std::uint32_t s = n / 2; s > 0; s /= 2) {
        const std::uint32_t rx = (x & s) ? 1 : 0;
        const std::uint32_t ry = (y & s) ? 1 : 0;
        d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
        if (ry == 0) {
            if (rx == 1) {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::swap(x, y);
        }
    }
    return d;
}

std::vector<int> insertion_order(const std::vector<Vec2>& p, double xmin, double ymin, double size)
{
    constexpr int order = 16;
    const double cells = static_cast<double>((1u << order) - 1);
    struct Key {
        int round;
        std::uint64_t h;
        int i;
    };
    std::vector<Key> keys(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto gx = static_cast<std::uint32_t>((p[i].x - xmin) / size * cells);
        const auto gy = static_cast<std::uint32_t>((p[i].y - ymin) / size * cells);
        const std::uint64_t r = splitmix(i) | (1ULL << 40);
        keys[i] = {-__builtin_ctzll(r), hilbert_index(gx, gy, order), static_cast<int>(i)};
    }
    std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
        if (a.round != b.round)
            return a.round < b.round;
        return a.h != b.h ? a.h < b.h : a.i < b.i;
    });
    std::vector<int> out;
    out.reserve(p.size());
    for (const auto& k : keys)
        out.push_back(k.i);
    return out;
}

class Triangulator {
public:
    std::vector<Vec2> pts;
    std::vector<int> cls;
    std::vector<Tri> tris;

    explicit Triangulator(const Pslg& g, RefineOptions opts) : opts_(std::move(opts))
    {
        if (g.points.size() != g.point_class.size())
            throw MeshError("triangulate: point_class size mismatch");
        if (g.points.size() < 3)
            throw MeshError("triangulate: need at least three points");
        double xmin = g.points[0].x, xmax = xmin, ymin = g.points[0].y, ymax = ymin;
        for (const Vec2& p : g.points) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                throw MeshError("triangulate: non-finite point");
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        scale_ = std::max(xmax - xmin, ymax - ymin);
        if (!(scale_ > 0.0))
            throw MeshError("triangulate: degenerate point set");
        const double cx = 0.5 * (xmin + xmax);
        const double cy = 0.5 * (ymin + ymax);
        const double m = 20.0 * scale_;
        pts = {{cx - m, cy - m}, {cx + m, cy - m}, {cx, cy + m}};
        cls = {-1, -1, -1};
        vtri_ = {0, 0, 0};
        Tri t;
        t.v = {0, 1, 2};
        tris.push_back(t);

        // Points go in with their input numbers, in biased randomized rounds
        // sorted along a Hilbert curve.
        for (std::size_t i = 0; i < g.points.size(); ++i) {
            pts.push_back(g.points[i]);
            cls.push_back(g.point_class[i]);
            vtri_.push_back(-1);
        }
        for (int i : insertion_order(g.points, xmin, ymin, scale_))
            insert_existing(i + 3);
        for (const auto& s : g.segments) {
            if (s.a < 0 || s.b < 0 || s.a >= static_cast<int>(g.points.size()) ||
                s.b >= static_cast<int>(g.points.size()) || s.a == s.b)
                throw MeshError("triangulate: invalid segment");
            recover(s.a + 3, s.b + 3, s.tag);
        }
        mark_inside();
    }

    void refine()
    {
        for (int t = 0; t < static_cast<int>(tris.size()); ++t)
            if (tris[t].alive && tris[t].inside)
                inspect(t);
        while (true) {
            if (!segq_.empty()) {
                const auto [a, b, force] = segq_.front();
                segq_.pop_front();
                int t, j;
                if (!find_edge(a, b, t, j) || tris[t].tag[j] < 0)
                    continue;
                if (force || encroached(t, j))
                    split_segment(t, j);
                continue;
            }
            if (!badq_.empty()) {
                const auto entry = badq_.front();
                badq_.pop_front();
                const Tri& tr = tris[entry.t];
                if (!tr.alive || tr.v != entry.v || !is_bad(entry.t))
                    continue;
                refine_triangle(entry.t);
                continue;
            }
            break;
        }
    }

    Mesh output() const
    {
        Mesh out;
        std::vector<int> map(pts.size(), -1);
        std::vector<int> order;
        for (const Tri& t : tris)
            if (t.alive && t.inside)
                for (int v : t.v)
                    map[v] = 1;
        int n = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (map[i] < 0)
                continue;
            map[i] = n++;
            out.vertices.push_back(pts[i]);
            out.vertex_class.push_back(cls[i]);
        }
        for (std::size_t ti = 0; ti < tris.size(); ++ti) {
            const Tri& t = tris[ti];
            if (!(t.alive && t.inside))
                continue;
            out.triangles.push_back({map[t.v[0]], map[t.v[1]], map[t.v[2]]});
            for (int j = 0; j < 3; ++j) {
                const int nb = t.nb[j];
                if (nb >= 0 && tris[nb].inside)
                    continue;
                out.boundary_edges.push_back(
                    {map[t.v[next3(j)]], map[t.v[prev3(j)]], t.tag[j] >= 0 ? t.tag[j] : 0});
            }
        }
        return out;
    }

private:
    struct SegItem {
        int a, b;
        bool force;
    };
    struct BadItem {
        int t;
        std::array<int, 3> v;
    };

    RefineOptions opts_;
    double scale_ = 1.0;
    std::vector<int> vtri_;
    std::vector<int> free_;
    std::vector<unsigned> in_cav_, excluded_;
    unsigned gen_ = 0;
    int last_ = 0;
    std::deque<SegItem> segq_;
    std::deque<BadItem> badq_;
    std::vector<int> created_;

    Vec2 P(int v) const { return pts[v]; }

    int new_tri(int a, int b, int c)
    {
        int id;
        if (!free_.empty()) {
            id = free_.back();
            free_.pop_back();
            tris[id] = Tri{};
        } else {
            id = static_cast<int>(tris.size());
            tris.emplace_back();
        }
        tris[id].v = {a, b, c};
        vtri_[a] = vtri_[b] = vtri_[c] = id;
        return id;
    }

    int add_vertex(Vec2 p, int c)
    {
        if (pts.size() >= opts_.max_vertices + 3)
            throw MeshError("triangulate: vertex budget exhausted");
        pts.push_back(p);
        cls.push_back(c);
        vtri_.push_back(-1);
        return static_cast<int>(pts.size()) - 1;
    }

    int index_of(const Tri& t, int v) const
    {
        for (int i = 0; i < 3; ++i)
            if (t.v[i] == v)
                return i;
        return -1;
    }

    bool find_edge(int a, int b, int& t_out, int& j_out) const
    {
        const int t0 = vtri_[a];
        if (t0 < 0)
            return false;
        // Counterclockwise around a, then clockwise if the star is open.
        for (int dir = 0; dir < 2; ++dir) {
            int t = t0;
            do {
                const Tri& tr = tris[t];
                const int k = index_of(tr, a);
                if (tr.v[next3(k)] == b) {
                    t_out = t;
                    j_out = prev3(k);
                    return true;
                }
                if (tr.v[prev3(k)] == b) {
                    t_out = t;
                    j_out = next3(k);
                    return true;
                }
                t = dir == 0 ? tr.nb[next3(k)] : tr.nb[prev3(k)];
            } while (t >= 0 && t != t0);
            if (t == t0)
                return false;
        }
        return false;
    }

    int locate(Vec2 p, int start) const
    {
        int t = start >= 0 && tris[start].alive ? start : last_;
        if (!tris[t].alive) {
            t = 0;
            while (!tris[t].alive)
                ++t;
        }
        const std::size_t cap = 4 * tris.size() + 100;
        for (std::size_t step = 0; step < cap; ++step) {
            const Tri& tr = tris[t];
            int next = -1;
            for (int j = 0; j < 3; ++j) {
                if (orient2d(P(tr.v[next3(j)]), P(tr.v[prev3(j)]), p) < 0.0) {
                    next = tr.nb[j];
                    break;
                }
            }
            if (next < 0)
                return t;
            t = next;
        }
        for (int u = 0; u < static_cast<int>(tris.size()); ++u) {
            const Tri& tr = tris[u];
            if (!tr.alive)
                continue;
            if (orient2d(P(tr.v[0]), P(tr.v[1]), p) >= 0.0 && orient2d(P(tr.v[1]), P(tr.v[2]), p) >= 0.0 &&
                orient2d(P(tr.v[2]), P(tr.v[0]), p) >= 0.0)
                return u;
        }
        throw MeshError("triangulate: point location failed");
    }

    bool in_circle(int t, Vec2 p) const
    {
        const Tri& tr = tris[t];
        return incircle(P(tr.v[0]), P(tr.v[1]), P(tr.v[2]), p) > 0.0;
    }

    // Bowyer-Watson cavity of p seeded at t0 (and t1 across edge j0 of t0
    // when p splits that edge). Constrained edges block the search and the
    // cavity is trimmed until it is star-shaped from p.
    bool cavity(Vec2 p, int t0, int j0, std::vector<int>& cav, std::vector<CavityEdge>& bnd)
    {
        const int t1 = j0 >= 0 ? tris[t0].nb[j0] : -1;
        if (in_cav_.size() < tris.size()) {
            in_cav_.resize(tris.size(), 0);
            excluded_.resize(tris.size(), 0);
        }
        ++gen_;
        const unsigned ex = gen_;
        auto is_split = [&](int t, int j) {
            return j0 >= 0 && ((t == t0 && j == j0) || (t == t1 && tris[t].nb[j] == t0));
        };
        while (true) {
            ++gen_;
            const unsigned g = gen_;
            cav.clear();
            bnd.clear();
            cav.push_back(t0);
            in_cav_[t0] = g;
            if (t1 >= 0) {
                cav.push_back(t1);
                in_cav_[t1] = g;
            }
            for (std::size_t k = 0; k < cav.size(); ++k) {
                const int t = cav[k];
                for (int j = 0; j < 3; ++j) {
                    const int n = tris[t].nb[j];
                    if (n < 0 || in_cav_[n] == g || excluded_[n] == ex)
                        continue;
                    if (tris[t].tag[j] >= 0 && !is_split(t, j))
                        continue;
                    if (in_circle(n, p)) {
                        in_cav_[n] = g;
                        cav.push_back(n);
                    }
                }
            }
            bool trimmed = false;
            for (int t : cav) {
                const Tri& tr = tris[t];
                for (int j = 0; j < 3; ++j) {
                    const int n = tr.nb[j];
                    const bool constrained = tr.tag[j] >= 0 && !is_split(t, j);
                    if (n >= 0 && in_cav_[n] == g && !constrained)
                        continue;
                    const int x = tr.v[next3(j)];
                    const int y = tr.v[prev3(j)];
                    if (!(orient2d(p, P(x), P(y)) > 0.0)) {
                        if (t == t0 || t == t1)
                            return false;
                        excluded_[t] = ex;
                        trimmed = true;
                        break;
                    }
                    bnd.push_back({x, y, n, tr.tag[j], tr.inside});
                }
            }
            if (!trimmed)
                return true;
        }
    }

    void commit(int v, const std::vector<int>& cav, const std::vector<CavityEdge>& bnd,
                int split_a = -1, int split_b = -1, int split_tag = -1)
    {
        for (int t : cav) {
            tris[t].alive = false;
            free_.push_back(t);
        }
        // Reuse slots in a fixed order.
        std::sort(free_.begin(), free_.end(), std::greater<>());
        created_.clear();
        std::vector<std::pair<int, int>> start_of;
        start_of.reserve(bnd.size());
        for (const auto& e : bnd) {
            const int nt = new_tri(v, e.x, e.y);
            Tri& tr = tris[nt];
            tr.nb[0] = e.outer;
            tr.tag[0] = e.tag;
            tr.inside = e.inside;
            if (e.outer >= 0) {
                Tri& o = tris[e.outer];
                for (int j = 0; j < 3; ++j)
                    if (o.v[next3(j)] == e.y && o.v[prev3(j)] == e.x)
                        o.nb[j] = nt;
            }
            if (split_tag >= 0) {
                if (e.x == split_a || e.x == split_b)
                    tr.tag[2] = split_tag;
                if (e.y == split_a || e.y == split_b)
                    tr.tag[1] = split_tag;
            }
            start_of.emplace_back(e.x, nt);
            created_.push_back(nt);
        }
        std::sort(start_of.begin(), start_of.end());
        for (int nt : created_) {
            const int y = tris[nt].v[2];
            const auto it = std::lower_bound(start_of.begin(), start_of.end(), std::make_pair(y, -1));
            if (it == start_of.end() || it->first != y)
                throw MeshError("triangulate: cavity boundary is not closed");
            tris[nt].nb[1] = it->second;
            tris[it->second].nb[2] = nt;
        }
        last_ = created_.front();
    }

    void insert_free(Vec2 p, int c)
    {
        insert_existing(add_vertex(p, c));
    }

    void insert_existing(int v)
    {
        const Vec2 p = pts[v];
        const int t = locate(p, last_);
        for (int v : tris[t].v)
            if (pts[v] == p)
                throw MeshError("triangulate: duplicate input point");
        std::vector<int> cav;
        std::vector<CavityEdge> bnd;
        if (!cavity(p, t, -1, cav, bnd)) {
            // p on an edge of t: seed with both triangles.
            const Tri& tr = tris[t];
            int j0 = -1;
            for (int j = 0; j < 3; ++j)
                if (orient2d(P(tr.v[next3(j)]), P(tr.v[prev3(j)]), p) == 0.0)
                    j0 = j;
            if (j0 < 0 || tr.tag[j0] >= 0 || !cavity(p, t, j0, cav, bnd))
                throw MeshError("triangulate: cannot insert point");
        }
        commit(v, cav, bnd);
    }

    void set_tag(int t, int j, int tag)
    {
        tris[t].tag[j] = tag;
        const int n = tris[t].nb[j];
        if (n < 0)
            return;
        const int a = tris[t].v[next3(j)];
        const int b = tris[t].v[prev3(j)];
        Tri& o = tris[n];
        for (int k = 0; k < 3; ++k)
            if (o.v[next3(k)] == b && o.v[prev3(k)] == a)
                o.tag[k] = tag;
    }

    void recover(int a, int b, int tag)
    {
        std::vector<std::pair<int, int>> stack{{a, b}};
        while (!stack.empty()) {
            const auto [u, w] = stack.back();
            stack.pop_back();
            int t, j;
            if (find_edge(u, w, t, j)) {
                set_tag(t, j, tag);
                continue;
            }
            const Vec2 pu = P(u), pw = P(w);
            if (distance(pu, pw) < 1e-13 * scale_)
                throw MeshError("triangulate: segments intersect or overlap");
            const Vec2 m = 0.5 * (pu + pw);
            const int before = static_cast<int>(pts.size());
            insert_free(m, tag);
            stack.push_back({before, w});
            stack.push_back({u, before});
        }
    }

    void mark_inside()
    {
        std::vector<int> depth(tris.size(), -1);
        std::deque<int> q;
        int start = vtri_[0];
        depth[start] = 0;
        q.push_back(start);
        while (!q.empty()) {
            const int t = q.front();
            q.pop_front();
            for (int j = 0; j < 3; ++j) {
                const int n = tris[t].nb[j];
                if (n < 0)
                    continue;
                const int d = depth[t] + (tris[t].tag[j] >= 0 ? 1 : 0);
                if (depth[n] >= 0 && depth[n] <= d)
                    continue;
                depth[n] = d;
                if (d == depth[t])
                    q.push_front(n);
                else
                    q.push_back(n);
            }
        }
        for (std::size_t t = 0; t < tris.size(); ++t)
            if (tris[t].alive)
                tris[t].inside = depth[t] % 2 == 1;
    }

    bool encroached(int t, int j) const
    {
        // Check the apexes of the adjacent triangles inside the domain.
        const Tri& tr = tris[t];
        const Vec2 a = P(tr.v[next3(j)]);
        const Vec2 b = P(tr.v[prev3(j)]);
        auto apex_in = [&](int u, int k) {
            const Vec2 v = P(tris[u].v[k]);
            return dot(a - v, b - v) < 0.0;
        };
        if (tr.inside && apex_in(t, j))
            return true;
        const int n = tr.nb[j];
        if (n >= 0 && tris[n].inside) {
            const Tri& o = tris[n];
            for (int k = 0; k < 3; ++k)
                if (o.v[k] != tr.v[next3(j)] && o.v[k] != tr.v[prev3(j)])
                    return apex_in(n, k);
        }
        return false;
    }

    bool is_bad(int t) const
    {
        const Tri& tr = tris[t];
        const Vec2 a = P(tr.v[0]), b = P(tr.v[1]), c = P(tr.v[2]);
        const double l[3] = {distance(b, c), distance(c, a), distance(a, b)};
        const double area2 = cross(b - a, c - a);
        const double lmax = std::max({l[0], l[1], l[2]});
        const double lmin = std::min({l[0], l[1], l[2]});
        const double others = l[0] * l[1] * l[2] / lmin;
        const double sin_min = area2 / others;
        if (sin_min < std::sin(opts_.min_angle_deg * std::numbers::pi / 180.0))
            return true;
        if (opts_.size) {
            const double h = opts_.size((1.0 / 3.0) * (a + b + c));
            if (lmax > h)
                return true;
        }
        return false;
    }

    void inspect(int t)
    {
        const Tri& tr = tris[t];
        for (int j = 0; j < 3; ++j) {
            if (tr.tag[j] < 0)
                continue;
            const Vec2 a = P(tr.v[next3(j)]);
            const Vec2 b = P(tr.v[prev3(j)]);
            const Vec2 v = P(tr.v[j]);
            if (dot(a - v, b - v) < 0.0)
                segq_.push_back({tr.v[next3(j)], tr.v[prev3(j)], false});
        }
        if (is_bad(t))
            badq_.push_back({t, tr.v});
    }

    void inspect_created()
    {
        const std::vector<int> made = created_;
        for (int t : made)
            if (tris[t].inside)
                inspect(t);
    }

    void split_segment(int t, int j)
    {
        const Tri& tr = tris[t];
        const int a = tr.v[next3(j)];
        const int b = tr.v[prev3(j)];
        const int tag = tr.tag[j];
        const Vec2 m = 0.5 * (P(a) + P(b));
        if (distance(P(a), P(b)) < 1e-12 * scale_)
            throw MeshError("triangulate: segment split underflow");
        std::vector<int> cav;
        std::vector<CavityEdge> bnd;
        if (!cavity(m, t, j, cav, bnd))
            throw MeshError("triangulate: cannot split segment");
        commit(add_vertex(m, tag), cav, bnd, a, b, tag);
        inspect_created();
    }

    // Straight walk from the centroid of `from` towards c.
    WalkResult walk(int from, Vec2 c, int& t_out, int& j_out) const
    {
        const Tri& t0 = tris[from];
        const Vec2 s = (1.0 / 3.0) * (P(t0.v[0]) + P(t0.v[1]) + P(t0.v[2]));
        int t = from;
        const std::size_t cap = tris.size() + 10;
        for (std::size_t step = 0; step < cap; ++step) {
            const Tri& tr = tris[t];
            int exit = -1;
            int fallback = -1;
            for (int j = 0; j < 3; ++j) {
                const Vec2 x = P(tr.v[next3(j)]);
                const Vec2 y = P(tr.v[prev3(j)]);
                if (!(orient2d(x, y, c) < 0.0))
                    continue;
                if (fallback < 0)
                    fallback = j;
                if (orient2d(s, c, x) <= 0.0 && orient2d(s, c, y) >= 0.0) {
                    exit = j;
                    break;
                }
            }
            if (exit < 0)
                exit = fallback;
            if (exit < 0) {
                t_out = t;
                return WalkResult::found;
            }
            if (tr.tag[exit] >= 0 || tr.nb[exit] < 0) {
                t_out = t;
                j_out = exit;
                return WalkResult::crossed;
            }
            t = tr.nb[exit];
        }
        throw MeshError("triangulate: walk did not terminate");
    }

    void refine_triangle(int t)
    {
        const Tri& tr = tris[t];
        const Vec2 a = P(tr.v[0]);
        const Vec2 b = P(tr.v[1]) - a;
        const Vec2 c = P(tr.v[2]) - a;
        const double d = 2.0 * cross(b, c);
        const double bb = dot(b, b), cc = dot(c, c);
        const Vec2 cc_pt = a + Vec2{(c.y * bb - b.y * cc) / d, (b.x * cc - c.x * bb) / d};
        if (!std::isfinite(cc_pt.x) || !std::isfinite(cc_pt.y))
            return;
        const BadItem again{t, tr.v};

        int tc = -1, jc = -1;
        if (walk(t, cc_pt, tc, jc) == WalkResult::crossed) {
            const Tri& o = tris[tc];
            segq_.push_back({o.v[next3(jc)], o.v[prev3(jc)], true});
            badq_.push_back(again);
            return;
        }
        const Tri& loc = tris[tc];
        for (int j = 0; j < 3; ++j) {
            if (P(loc.v[j]) == cc_pt)
                return;
            if (loc.tag[j] >= 0 && orient2d(P(loc.v[next3(j)]), P(loc.v[prev3(j)]), cc_pt) == 0.0) {
                segq_.push_back({loc.v[next3(j)], loc.v[prev3(j)], true});
                badq_.push_back(again);
                return;
            }
        }
        std::vector<int> cav;
        std::vector<CavityEdge> bnd;
        if (!cavity(cc_pt, tc, -1, cav, bnd))
            return;
        bool enc = false;
        for (const auto& e : bnd) {
            if (e.tag < 0)
                continue;
            if (dot(P(e.x) - cc_pt, P(e.y) - cc_pt) < 0.0) {
                segq_.push_back({e.x, e.y, true});
                enc = true;
            }
        }
        if (enc) {
            badq_.push_back(again);
            return;
        }
        commit(add_vertex(cc_pt, free_vertex), cav, bnd);
        inspect_created();
    }
};

double angle_at(Vec2 v, Vec2 a, Vec2 b)
{
    const Vec2 u = a - v;
    const Vec2 w = b - v;
    return std::atan2(std::abs(cross(u, w)), dot(u, w));
}

} // namespace

Pslg pslg_from_loops(const std::vector<geometry::Loop>& loops)
{
    Pslg g;
    for (const auto& loop : loops) {
        const int base = static_cast<int>(g.points.size());
        const int n = static_cast<int>(loop.size());
        for (int i = 0; i < n; ++i) {
            g.points.push_back(loop.points[i]);
            g.point_class.push_back(loop.vertex_tags[i]);
            g.segments.push_back({base + i, base + (i + 1) % n, loop.edge_tags[i]});
        }
    }
    return g;
}

Mesh triangulate(const Pslg& pslg, const RefineOptions& opts)
{
    if (!(opts.min_angle_deg >= 0.0 && opts.min_angle_deg < 34.0))
        throw MeshError("triangulate: min_angle_deg must lie in [0, 34)");
    Triangulator tri(pslg, opts);
    tri.refine();
    Mesh m = tri.output();
    if (m.triangles.empty())
        throw MeshError("triangulate: empty domain");
    return m;
}

std::function<double(Vec2)> neck_size_field(const geometry::DomainSpec& spec, double h_far,
                                            double neck_fraction)
{
    const double R = geometry::patch_radius(spec.profile);
    const double eps = spec.epsilon;
    const double floor_gap = eps > 0.0 ? 0.0 : merge_cut_gap;
    const geometry::Profile prof = spec.profile;
    const double t = spec.split;
    return [=](Vec2 p) {
        const double xc = std::clamp(p.x, -R, R);
        const double g = geometry::gap_excess(prof, xc);
        const double delta = std::max(eps + g, floor_gap);
        const double top = 0.5 * eps + t * g;
        const double bottom = -0.5 * eps - (1.0 - t) * g;
        const double dy = std::max({0.0, p.y - top, bottom - p.y});
        const double dx = std::max(0.0, std::abs(p.x) - R);
        return std::min(h_far, neck_fraction * delta + 0.5 * (dx + dy));
    };
}

std::vector<geometry::Loop> generate_loops(const geometry::DomainSpec& spec, double h_far,
                                           double neck_fraction)
{
    spec.validate();
    if (!(h_far > 0.0) || !std::isfinite(h_far))
        throw MeshError("generate: h_far must be positive");
    if (!(neck_fraction > 0.0 && neck_fraction <= 0.5))
        throw MeshError("generate: neck_fraction must lie in (0, 1/2]");
    const double R = geometry::patch_radius(spec.profile);
    if (spec.epsilon > 0.0 && spec.epsilon < min_relative_eps * R)
        throw MeshError("generate: eps is below the supported range");
    const auto shape = geometry::make_shape(spec, merge_cut_gap);
    geometry::SamplingOptions so;
    so.arc_tol = h_far / 40.0;
    so.spacing = neck_size_field(spec, h_far, neck_fraction);
    const double local = neck_fraction * std::max(spec.epsilon, spec.epsilon > 0.0 ? 0.0 : merge_cut_gap) / 8.0;
    so.local_tol = [R, local](Vec2 p) {
        return std::abs(p.x) <= R ? local : std::numeric_limits<double>::infinity();
    };
    auto loops = geometry::sample_shape(*shape, so);
    geometry::check_simple(loops);
    return loops;
}

Mesh generate(const geometry::DomainSpec& spec, double h_far, double neck_fraction)
{
    const auto loops = generate_loops(spec, h_far, neck_fraction);
    RefineOptions ro;
    ro.size = neck_size_field(spec, h_far, neck_fraction);
    Mesh m = triangulate(pslg_from_loops(loops), ro);
    m.shape = geometry::make_shape(spec, merge_cut_gap);
    return m;
}

std::vector<std::array<int, 2>> edges(const Mesh& mesh)
{
    std::vector<std::array<int, 2>> out;
    out.reserve(3 * mesh.triangles.size());
    for (const auto& t : mesh.triangles)
        for (int j = 0; j < 3; ++j) {
            const int a = t[next3(j)];
            const int b = t[prev3(j)];
            out.push_back({std::min(a, b), std::max(a, b)});
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Mesh refine_uniform(const Mesh& mesh)
{
    Mesh out;
    out.vertices = mesh.vertices;
    out.vertex_class = mesh.vertex_class;
    out.shape = mesh.shape;

    std::unordered_map<std::uint64_t, int> btag;
    for (const auto& e : mesh.boundary_edges)
        btag[edge_key(e.a, e.b)] = e.tag;

    std::unordered_map<std::uint64_t, int> mid;
    mid.reserve(3 * mesh.triangles.size());
    auto midpoint = [&](int a, int b) {
        const auto key = edge_key(a, b);
        const auto it = mid.find(key);
        if (it != mid.end())
            return it->second;
        Vec2 p = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
        int c = free_vertex;
        const auto bt = btag.find(key);
        if (bt != btag.end()) {
            c = bt->second;
            if (mesh.shape && c != free_vertex)
                p = mesh.shape->project(c, p);
        }
        const int id = static_cast<int>(out.vertices.size());
        out.vertices.push_back(p);
        out.vertex_class.push_back(c);
        mid.emplace(key, id);
        return id;
    };
    for (const auto& t : mesh.triangles) {
        const int a = t[0], b = t[1], c = t[2];
        const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
        out.triangles.push_back({a, ab, ca});
        out.triangles.push_back({ab, b, bc});
        out.triangles.push_back({ca, bc, c});
        out.triangles.push_back({ab, bc, ca});
    }
    for (const auto& e : mesh.boundary_edges) {
        const int m = mid.at(edge_key(e.a, e.b));
        out.boundary_edges.push_back({e.a, m, e.tag});
        out.boundary_edges.push_back({m, e.b, e.tag});
    }
    return out;
}

std::size_t snap_boundary(Mesh& mesh)
{
    if (!mesh.shape)
        return 0;
    std::vector<int> tag(mesh.num_vertices(), -1);
    for (const auto& e : mesh.boundary_edges) {
        if (e.tag == free_vertex)
            continue;
        tag[e.a] = tag[e.a] < 0 ? e.tag : tag[e.a];
        tag[e.b] = tag[e.b] < 0 ? e.tag : tag[e.b];
    }
    std::vector<std::vector<int>> incident(mesh.num_vertices());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        for (int v : mesh.triangles[t])
            incident[v].push_back(static_cast<int>(t));
    std::size_t moved = 0;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        if (tag[v] < 0)
            continue;
        const Vec2 old = mesh.vertices[v];
        const Vec2 p = mesh.shape->project(tag[v], old);
        if (p == old)
            continue;
        mesh.vertices[v] = p;
        bool ok = true;
        for (int t : incident[v])
            ok = ok && triangle_area(mesh, t) > 0.0;
        if (ok)
            ++moved;
        else
            mesh.vertices[v] = old;
    }
    return moved;
}

double triangle_area(const Mesh& mesh, std::size_t t)
{
    const auto& tr = mesh.triangles[t];
    const Vec2 a = mesh.vertices[tr[0]];
    return 0.5 * cross(mesh.vertices[tr[1]] - a, mesh.vertices[tr[2]] - a);
}

double total_area(const Mesh& mesh)
{
    double s = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        s += triangle_area(mesh, t);
    return s;
}

double min_angle_deg(const Mesh& mesh)
{
    double m = std::numbers::pi;
    for (const auto& t : mesh.triangles) {
        for (int j = 0; j < 3; ++j) {
            const Vec2 v = mesh.vertices[t[j]];
            m = std::min(m, angle_at(v, mesh.vertices[t[next3(j)]], mesh.vertices[t[prev3(j)]]));
        }
    }
    return m * 180.0 / std::numbers::pi;
}

void rebuild_boundary_edges(Mesh& mesh)
{
    std::unordered_map<std::uint64_t, int> count;
    count.reserve(3 * mesh.triangles.size());
    for (const auto& t : mesh.triangles)
        for (int j = 0; j < 3; ++j)
            ++count[edge_key(t[next3(j)], t[prev3(j)])];
    mesh.boundary_edges.clear();
    for (const auto& t : mesh.triangles)
        for (int j = 0; j < 3; ++j) {
            const int a = t[next3(j)];
            const int b = t[prev3(j)];
            if (count[edge_key(a, b)] == 1)
                mesh.boundary_edges.push_back(
                    {a, b, std::max(mesh.vertex_class[a], mesh.vertex_class[b])});
        }
}

void validate(const Mesh& mesh)
{
    const int nv = static_cast<int>(mesh.vertices.size());
    if (mesh.vertex_class.size() != mesh.vertices.size())
        throw MeshError("mesh: vertex_class size mismatch");
    for (int c : mesh.vertex_class)
        if (c < free_vertex || c > outer)
            throw MeshError("mesh: invalid vertex class");
    std::unordered_map<std::uint64_t, int> directed;
    std::unordered_map<std::uint64_t, int> count;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        for (int v : tr)
            if (v < 0 || v >= nv)
                throw MeshError("mesh: triangle index out of range");
        if (!(triangle_area(mesh, t) > 0.0))
            throw MeshError("mesh: triangle with non-positive area");
        for (int j = 0; j < 3; ++j) {
            const int a = tr[next3(j)], b = tr[prev3(j)];
            const std::uint64_t dkey =
                (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
            if (++directed[dkey] > 1)
                throw MeshError("mesh: inconsistent triangle orientation");
            if (++count[edge_key(a, b)] > 2)
                throw MeshError("mesh: non-manifold edge");
        }
    }
    std::vector<char> used(mesh.vertices.size(), 0);
    for (const auto& tr : mesh.triangles)
        for (int v : tr)
            used[v] = 1;
    if (std::find(used.begin(), used.end(), 0) != used.end())
        throw MeshError("mesh: unreferenced vertex");
    std::size_t nb = 0;
    for (const auto& [k, c] : count)
        if (c == 1)
            ++nb;
    if (nb != mesh.boundary_edges.size())
        throw MeshError("mesh: boundary edge list does not match the triangles");
    for (const auto& e : mesh.boundary_edges) {
        const auto it = count.find(edge_key(e.a, e.b));
        if (it == count.end() || it->second != 1)
            throw MeshError("mesh: listed boundary edge is not on the boundary");
        if (e.tag != free_vertex && (mesh.vertex_class[e.a] == free_vertex || mesh.vertex_class[e.b] == free_vertex))
            throw MeshError("mesh: tagged boundary edge with an untagged endpoint");
    }
}

void write_mesh(std::ostream& out, const Mesh& mesh, const std::vector<double>* field)
{
    if (field && field->size() != mesh.vertices.size())
        throw MeshError("write_mesh: field size mismatch");
    char buf[128];
    out << mesh.vertices.size() << ' ' << mesh.triangles.size() << '\n';
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec2 p = mesh.vertices[i];
        if (field)
            std::snprintf(buf, sizeof buf, "%.17g %.17g %d %.17g\n", p.x, p.y, mesh.vertex_class[i], (*field)[i]);
        else
            std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", p.x, p.y, mesh.vertex_class[i]);
        out << buf;
    }
    for (const auto& t : mesh.triangles)
        out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

Mesh read_mesh(std::istream& in, std::vector<double>* field)
{
    Mesh m;
    std::string line;
    std::size_t nv = 0, nt = 0;
    if (!std::getline(in, line))
        throw MeshError("read_mesh: missing header");
    {
        std::istringstream hs(line);
        if (!(hs >> nv >> nt))
            throw MeshError("read_mesh: malformed header");
    }
    m.vertices.resize(nv);
    m.vertex_class.resize(nv);
    if (field)
        field->assign(nv, 0.0);
    for (std::size_t i = 0; i < nv; ++i) {
        if (!std::getline(in, line))
            throw MeshError("read_mesh: truncated vertex block");
        std::istringstream ls(line);
        double x, y;
        int c;
        if (!(ls >> x >> y >> c))
            throw MeshError("read_mesh: malformed vertex line");
        m.vertices[i] = {x, y};
        m.vertex_class[i] = c;
        double u;
        if (ls >> u) {
            if (field)
                (*field)[i] = u;
        }
    }
    m.triangles.resize(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        if (!std::getline(in, line))
            throw MeshError("read_mesh: truncated triangle block");
        std::istringstream ls(line);
        if (!(ls >> m.triangles[i][0] >> m.triangles[i][1] >> m.triangles[i][2]))
            throw MeshError("read_mesh: malformed triangle line");
    }
    rebuild_boundary_edges(m);
    validate(m);
    return m;
}

void save_mesh(const std::string& path, const Mesh& mesh, const std::vector<double>* field)
{
    std::ofstream f(path);
    if (!f)
        throw MeshError("cannot write " + path);
    write_mesh(f, mesh, field);
}

Mesh load_mesh(const std::string& path, std::vector<double>* field)
{
    std::ifstream f(path);
    if (!f)
        throw MeshError("cannot read " + path);
    return read_mesh(f, field);
}

} // namespace pcond::mesh
