#pragma once

#include "pcond/vec2.hpp"

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <variant>
#include <vector>

namespace pcond::geometry {

/// Neck with a flat common segment (-w, w) of the two touching inclusions.
/// Outside it the gap grows like q * dist(x', flat)^2.
struct FlatProfile {
    double sigma_half_width = 0.5;
    double curvature_coeff = 1.0;
    double patch_radius = 1.0;

    void validate() const;
    /// |Sigma'| in n = 2.
    double sigma_area() const { return 2.0 * sigma_half_width; }
};

/// C^{1,gamma} cusp: gap - eps = a(sign x') |x'|^{1+gamma}.
struct PowerProfile {
    double gamma = 0.5;
    double amp_plus = 1.0;  // a for x' > 0
    double amp_minus = 1.0; // a for x' < 0
    double c0 = 2.0;        // declared bound 1/c0 <= a <= c0
    double patch_radius = 1.0;

    void validate() const;
    double amp(double xp) const { return xp >= 0.0 ? amp_plus : amp_minus; }
    bool constant_amp() const { return amp_plus == amp_minus; }
};

using Profile = std::variant<FlatProfile, PowerProfile>;

double patch_radius(const Profile& profile);
void validate(const Profile& profile);

/// h1 - h2 at xp; no patch check.
double gap_excess(const Profile& profile, double xp);
/// d/dxp of gap_excess.
double gap_excess_slope(const Profile& profile, double xp);

/// delta(x') = eps + h1(x') - h2(x'). Throws std::domain_error outside the patch.
double gap(const Profile& profile, double eps, double xp);

double dist_to_flat(const FlatProfile& profile, double xp);

/// Dirichlet data phi(theta) = sum_k a_k cos(k theta) + b_k sin(k theta), k <= 4.
struct TrigPolynomial {
    std::vector<std::array<double, 2>> coeffs{{0.0, 0.0}, {0.0, 1.0}};

    double operator()(double theta) const;
    /// Upper bound on max |phi| (sum of coefficient magnitudes).
    double sup_bound() const;
    bool is_constant() const;
    TrigPolynomial scaled(double s) const;
};

struct DomainSpec {
    Profile profile = FlatProfile{};
    double epsilon = 0.01;
    double outer_radius = 4.0;  // L
    double cap_radius = 0.25;   // R_cap of the closing arcs
    double split = 0.5;         // h1 = split * (gap - eps)
    TrigPolynomial dirichlet;

    /// Defaults tied to the profile: L = 4R, R_cap = R/4.
    static DomainSpec with_profile(const Profile& profile, double eps);

    /// Checks parameters. eps == 0 is accepted only for flat profiles
    /// (the touching limit problem).
    void validate() const;

    double h1(double xp) const { return split * gap_excess(profile, xp); }
    double h2(double xp) const { return -(1.0 - split) * gap_excess(profile, xp); }
    double phi_at(Vec2 p) const;
};

/// Closed boundary loop; edge i joins points[i] and points[(i+1) % n].
struct Loop {
    std::vector<Vec2> points;
    std::vector<int> vertex_tags;
    std::vector<int> edge_tags;

    std::size_t size() const { return points.size(); }
    void reverse();

    double signed_area() const;
};

/// Boundary tags shared with the mesh vertex classes.
enum BoundaryTag : int { tag_natural = 0, tag_inclusion1 = 1, tag_inclusion2 = 2, tag_outer = 3 };

struct BoundaryCurves {
    Loop inclusion1; // clockwise
    Loop inclusion2; // clockwise
    Loop outer;      // counterclockwise
};

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact boundary description used for sampling and re-projection.
class BoundaryShape {
public:
    struct Piece {
        enum class Kind { graph, arc, segment } kind = Kind::segment;
        int tag = 0;
        // graph: x in [x0, x1], y = fn(x)
        double x0 = 0.0, x1 = 0.0;
        std::function<double(double)> fn;
        // arc: centre, radius, angle range (th0 -> th1, either direction)
        Vec2 centre;
        double radius = 0.0, th0 = 0.0, th1 = 0.0;
        // segment
        Vec2 a, b;

        Vec2 at(double s) const;
        Vec2 project(Vec2 p) const;
    };

    /// Pieces grouped per closed loop, in traversal order.
    std::vector<std::vector<Piece>> loops;

    /// Nearest point on the pieces carrying `tag`; identity when none match.
    Vec2 project(int tag, Vec2 p) const;
    /// Distance from p to the exact pieces carrying `tag`.
    double distance_to(int tag, Vec2 p) const;
};

struct SamplingOptions {
    double arc_tol = 0.01;
    /// Upper bound on vertex spacing at a point; null means no bound.
    std::function<double(Vec2)> spacing;
    /// Chord deviation bound for graph pieces at a point, applied on top of
    /// arc_tol; null means arc_tol alone.
    std::function<double(Vec2)> local_tol;
};

/// Exact shapes of the domain boundary. For eps == 0 with a flat profile the
/// two inclusions merge across Sigma' into one hole; the zero-width wedges at
/// the ends of Sigma' are cut where the gap equals `merge_cut`.
std::shared_ptr<const BoundaryShape> make_shape(const DomainSpec& spec, double merge_cut = 1e-3);

/// Samples every loop of the shape into polylines, oriented counterclockwise
/// for the outer boundary and clockwise for holes.
std::vector<Loop> sample_shape(const BoundaryShape& shape, const SamplingOptions& opts);

/// Polylines with chord deviation <= arc_tol and spacing inside the neck
/// patch <= min(arc_tol, delta(x')/4). Throws GeometryError on intersections.
BoundaryCurves boundary_curves(const DomainSpec& spec, double arc_tol);

/// Throws GeometryError if any two edges of the loops cross.
void check_simple(const std::vector<Loop>& loops);

/// Mid-gap point (0, (h1(0) + h2(0)) / 2) of the neck.
inline Vec2 neck_centre(const DomainSpec& spec) { return {0.0, 0.5 * (spec.h1(0.0) + spec.h2(0.0))}; }

/// Winding-number point-in-loop test.
bool inside_loop(const Loop& loop, Vec2 p);

} // namespace pcond::geometry
