#pragma once

// Combinatorial realization of marked sets as separatrix skeletons of
// Morse-Smale fields in a disc whose boundary flow points inward, and of
// non-synchronized pairs on the sphere (disc, model annulus, disc).
//
// A skeleton is a planar graph given by a rotation system: every vertex lists
// its incident half-edges counterclockwise. Faces are the orbits of
// h -> next(twin(h)).

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "parabolica/annulus.hpp"
#include "parabolica/circle.hpp"

namespace parabolica::realization {

enum class VertexKind { Saddle, Attractor, Repeller, BoundaryMark };
enum class EdgeKind { IncomingSeparatrix, OutgoingSeparatrix, BoundaryArc };

std::string to_string(VertexKind k);
std::string to_string(EdgeKind k);

struct Vertex {
    std::size_t id = 0;
    VertexKind kind = VertexKind::Saddle;
    std::optional<std::array<double, 2>> position;
    /// Boundary marks only: coordinate on the circle and position in the ccw order.
    double coordinate = 0.0;
    std::size_t boundary_index = 0;
};

/// Oriented along the flow for separatrices and counterclockwise for boundary arcs.
struct Edge {
    std::size_t id = 0;
    EdgeKind kind = EdgeKind::BoundaryArc;
    std::size_t from = 0;
    std::size_t to = 0;
};

/// End `side` of an edge: 0 at `from`, 1 at `to`.
struct HalfEdge {
    std::size_t edge = 0;
    int side = 0;
    friend bool operator==(const HalfEdge&, const HalfEdge&) = default;
};

struct SkeletonGraph {
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    /// Counterclockwise half-edges around each vertex.
    std::vector<std::vector<HalfEdge>> rotation;
    /// Faces inside the disc as edge cycles; the face outside the boundary is omitted.
    std::vector<std::vector<std::size_t>> faces;
    /// The field points out of the disc: attractors read as repellers and vice versa.
    bool time_reversed = false;

    std::size_t count(VertexKind k) const;
    std::size_t count(EdgeKind k) const;
    std::size_t vertex_of(const HalfEdge& h) const;
};

/// Face cycles of the rotation system (all faces, the outer one included).
std::vector<std::vector<HalfEdge>> trace_faces(const SkeletonGraph& g);

/// Fills g.faces from the rotation system.
void compute_faces(SkeletonGraph& g);

/// Construction: one saddle per 2-class on a chord between its points,
/// one attractor per region cut out by the chords, and for every 1-class a
/// saddle fed by the mark and by a repeller, both of its unstable
/// separatrices running to the region's attractor.
SkeletonGraph realize_disc(const circle::MarkedSet& set);

struct Check {
    std::string name;
    bool pass = true;
    std::vector<std::string> counterexamples;
};

struct ValidationReport {
    std::vector<Check> checks;
    bool ok() const;
    const Check* find(const std::string& name) const;
};

/// Checks: saddle_degree, mark_degree, euler, attractor_per_face,
/// attractor_per_region, nesting.
ValidationReport validate_skeleton(const SkeletonGraph& g);

/// Boundary marks grouped by the saddle their separatrix enters.
/// Throws ImproperSet when a mark lies on no separatrix or the grouping is not proper.
circle::MarkedSet read_back(const SkeletonGraph& g);

/// Same points in the same order and the same classes.
bool same_marked_set(const circle::MarkedSet& a, const circle::MarkedSet& b, double tolerance = 1e-12);

struct SphereRealization {
    SkeletonGraph disc_plus;
    SkeletonGraph disc_minus;
    annulus::LoopAngles annulus;
};

/// Throws SynchronizedInput.
SphereRealization realize_sphere(const circle::CharacteristicPair& pair);

/// Deterministic SVG: boundary circle, chords, separatrices and vertex markers.
std::string render_svg(const SkeletonGraph& g);
std::string render_svg(const SphereRealization& s);

/// Throws IOError.
void write_text_file(const std::string& path, const std::string& content);

} // namespace parabolica::realization
