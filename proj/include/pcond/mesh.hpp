#pragma once

#include "pcond/geometry.hpp"
#include "pcond/vec2.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcond::mesh {

/// Per-vertex tag; the values match geometry::BoundaryTag.
enum VertexClass : int { free_vertex = 0, inclusion1 = 1, inclusion2 = 2, outer = 3 };

struct BoundaryEdge {
    int a = 0;
    int b = 0;
    int tag = 0;
};

/// Conforming triangulation of the region between the outer boundary and
/// the holes. Triangles are counterclockwise.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> vertex_class;
    std::vector<BoundaryEdge> boundary_edges;
    /// Exact boundary used to re-project new boundary vertices; may be null.
    std::shared_ptr<const geometry::BoundaryShape> shape;

    std::size_t num_vertices() const { return vertices.size(); }
    std::size_t num_triangles() const { return triangles.size(); }
};

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Planar straight-line graph: points, constrained segments and their tags.
struct Pslg {
    struct Segment {
        int a = 0;
        int b = 0;
        int tag = 0;
    };
    std::vector<Vec2> points;
    std::vector<int> point_class;
    std::vector<Segment> segments;
};

/// Builds a PSLG from closed loops; vertex and edge tags are kept.
Pslg pslg_from_loops(const std::vector<geometry::Loop>& loops);

struct RefineOptions {
    double min_angle_deg = 20.5;
    /// Target edge length at a point; null means no size bound.
    std::function<double(Vec2)> size;
    std::size_t max_vertices = 3'000'000;
};

/// Constrained Delaunay triangulation of the PSLG, refined by Delaunay
/// refinement until every triangle meets the angle bound and the size field.
/// Regions enclosed by an even number of segment loops are discarded.
Mesh triangulate(const Pslg& pslg, const RefineOptions& opts);

/// Gap at which the zero-width wedges of a touching flat pair are cut off.
inline constexpr double merge_cut_gap = 1e-3;
/// Smallest supported eps relative to the patch radius.
inline constexpr double min_relative_eps = 1e-5;

/// Boundary polylines used by generate, in the order outer, holes.
std::vector<geometry::Loop> generate_loops(const geometry::DomainSpec& spec, double h_far,
                                           double neck_fraction);

/// Graded mesh of the domain of `spec`: target edge length
/// min(h_far, neck_fraction * delta(x')) in the neck, growing away from it.
/// eps = 0 with a flat profile meshes the merged hole.
Mesh generate(const geometry::DomainSpec& spec, double h_far, double neck_fraction);

/// Size field used by generate.
std::function<double(Vec2)> neck_size_field(const geometry::DomainSpec& spec, double h_far,
                                            double neck_fraction);

/// Splits every triangle into four. Boundary midpoints are moved onto the
/// exact curves when the mesh carries a shape.
Mesh refine_uniform(const Mesh& mesh);

/// Moves the vertices of tagged boundary edges onto the exact curves of
/// mesh.shape. A vertex keeps its place when moving it would invert a
/// triangle. Returns the number of vertices moved.
std::size_t snap_boundary(Mesh& mesh);

/// Undirected edges (i < j), sorted.
std::vector<std::array<int, 2>> edges(const Mesh& mesh);

double triangle_area(const Mesh& mesh, std::size_t t);
double total_area(const Mesh& mesh);
double min_angle_deg(const Mesh& mesh);

/// Recomputes boundary_edges from the triangles; an edge's tag is the
/// common class of its endpoints, or the class of either non-free endpoint.
void rebuild_boundary_edges(Mesh& mesh);

/// Consistency checks: positive areas, conformity, tags. Throws MeshError.
void validate(const Mesh& mesh);

/// Text format: "V T", V lines "x y class [u]", T lines "i j k".
void write_mesh(std::ostream& out, const Mesh& mesh, const std::vector<double>* field = nullptr);
Mesh read_mesh(std::istream& in, std::vector<double>* field = nullptr);
void save_mesh(const std::string& path, const Mesh& mesh, const std::vector<double>* field = nullptr);
Mesh load_mesh(const std::string& path, std::vector<double>* field = nullptr);

} // namespace pcond::mesh
