#include "parabolica/realization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "parabolica/error.hpp"

namespace parabolica::realization {

std::string to_string(VertexKind k) {
    switch (k) {
    case VertexKind::Saddle: return "saddle";
    case VertexKind::Attractor: return "attractor";
    case VertexKind::Repeller: return "repeller";
    case VertexKind::BoundaryMark: return "boundary_mark";
    }
    return "unknown";
}

std::string to_string(EdgeKind k) {
    switch (k) {
    case EdgeKind::IncomingSeparatrix: return "incoming_separatrix";
    case EdgeKind::OutgoingSeparatrix: return "outgoing_separatrix";
    case EdgeKind::BoundaryArc: return "boundary_arc";
    }
    return "unknown";
}

std::size_t SkeletonGraph::count(VertexKind k) const {
    return static_cast<std::size_t>(std::count_if(vertices.begin(), vertices.end(), [k](const auto& v) { return v.kind == k; }));
}

std::size_t SkeletonGraph::count(EdgeKind k) const {
    return static_cast<std::size_t>(std::count_if(edges.begin(), edges.end(), [k](const auto& e) { return e.kind == k; }));
}

std::size_t SkeletonGraph::vertex_of(const HalfEdge& h) const {
    const Edge& e = edges.at(h.edge);
    return h.side == 0 ? e.from : e.to;
}

namespace {

HalfEdge twin(const HalfEdge& h) { return {h.edge, 1 - h.side}; }

std::size_t half_index(const HalfEdge& h) { return 2 * h.edge + static_cast<std::size_t>(h.side); }

// Position of every half-edge inside its vertex's rotation; nullopt when the
// rotation is not a permutation of the half-edges.
std::optional<std::vector<std::pair<std::size_t, std::size_t>>> rotation_slots(const SkeletonGraph& g) {
    std::vector<std::pair<std::size_t, std::size_t>> slot(2 * g.edges.size(), {SIZE_MAX, 0});
    if (g.rotation.size() != g.vertices.size()) {
        return std::nullopt;
    }
    for (std::size_t v = 0; v < g.rotation.size(); ++v) {
        for (std::size_t i = 0; i < g.rotation[v].size(); ++i) {
            const HalfEdge& h = g.rotation[v][i];
            if (h.edge >= g.edges.size() || g.vertex_of(h) != v || slot[half_index(h)].first != SIZE_MAX) {
                return std::nullopt;
            }
            slot[half_index(h)] = {v, i};
        }
    }
    for (const auto& s : slot) {
        if (s.first == SIZE_MAX) {
            return std::nullopt;
        }
    }
    return slot;
}

// Face orbits of a rotation system restricted to edges with keep[e].
std::vector<std::vector<HalfEdge>> trace(const SkeletonGraph& g, const std::vector<bool>& keep) {
    auto slots = rotation_slots(g);
    if (!slots) {
        throw Error(Errc::InvariantViolation, "rotation system is not a permutation of the half-edges");
    }
    auto next_at_vertex = [&](const HalfEdge& h) {
        auto [v, i] = (*slots)[half_index(h)];
        const auto& rot = g.rotation[v];
        for (std::size_t step = 1; step <= rot.size(); ++step) {
            const HalfEdge& c = rot[(i + step) % rot.size()];
            if (keep[c.edge]) {
                return c;
            }
        }
        return h;
    };
    std::vector<bool> used(2 * g.edges.size(), false);
    std::vector<std::vector<HalfEdge>> faces;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (!keep[e]) {
            continue;
        }
        for (int side = 0; side < 2; ++side) {
            HalfEdge start{e, side};
            if (used[half_index(start)]) {
                continue;
            }
            std::vector<HalfEdge> face;
            HalfEdge h = start;
            do {
                used[half_index(h)] = true;
                face.push_back(h);
                h = next_at_vertex(twin(h));
            } while (!(h == start));
            faces.push_back(std::move(face));
        }
    }
    return faces;
}

std::vector<bool> all_edges(const SkeletonGraph& g) { return std::vector<bool>(g.edges.size(), true); }

// Index of the face that runs along the outside of the boundary, if any.
std::optional<std::size_t> outer_face(const SkeletonGraph& g, const std::vector<std::vector<HalfEdge>>& faces) {
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (g.edges[e].kind == EdgeKind::BoundaryArc) {
            for (std::size_t f = 0; f < faces.size(); ++f) {
                for (const auto& h : faces[f]) {
                    if (h.edge == e && h.side == 0) {
                        return f;
                    }
                }
            }
        }
    }
    return std::nullopt;
}

bool is_chord_saddle_edge(const SkeletonGraph& g, const Edge& e, const std::vector<std::size_t>& mark_inputs) {
    return e.kind == EdgeKind::IncomingSeparatrix && g.vertices[e.from].kind == VertexKind::BoundaryMark &&
           g.vertices[e.to].kind == VertexKind::Saddle && mark_inputs[e.to] == 2;
}

std::vector<std::size_t> mark_inputs_per_vertex(const SkeletonGraph& g) {
    std::vector<std::size_t> n(g.vertices.size(), 0);
    for (const auto& e : g.edges) {
        if (e.kind == EdgeKind::IncomingSeparatrix && g.vertices[e.from].kind == VertexKind::BoundaryMark) {
            ++n[e.to];
        }
    }
    return n;
}

bool chords_cross(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    if (a > b) std::swap(a, b);
    if (c > d) std::swap(c, d);
    return (a < c && c < b && b < d) || (c < a && a < d && d < b);
}

class Builder {
public:
    explicit Builder(const circle::MarkedSet& set) : set_(set) {}

    SkeletonGraph build() {
        const std::size_t s = set_.size();
        partner_.assign(s, SIZE_MAX);
        for (const auto& block : set_.classes()) {
            if (block.size() == 2) {
                partner_[block[0]] = block[1];
                partner_[block[1]] = block[0];
            }
        }
        for (std::size_t i = 0; i < s; ++i) {
            double v = set_.points()[i].value();
            std::size_t id = add_vertex(VertexKind::BoundaryMark, unit(v));
            g_.vertices[id].coordinate = v;
            g_.vertices[id].boundary_index = i;
        }
        std::vector<std::size_t> arcs;
        for (std::size_t i = 0; i < s; ++i) {
            arcs.push_back(add_edge(EdgeKind::BoundaryArc, i, (i + 1) % s));
        }
        separatrix_.assign(s, SIZE_MAX);
        region(0, s, SIZE_MAX, root_hint());
        for (std::size_t i = 0; i < s; ++i) {
            // ccw at a mark: along the boundary forward, into the disc, back along the boundary
            g_.rotation[i] = {{arcs[i], 0}, {separatrix_[i], 0}, {arcs[(i + s - 1) % s], 1}};
        }
        compute_faces(g_);
        return std::move(g_);
    }

private:
    using Point = std::array<double, 2>;

    static Point unit(double turn) {
        double a = 2.0 * std::numbers::pi * turn;
        return {std::cos(a), std::sin(a)};
    }

    Point mark_pos(std::size_t i) const { return unit(set_.points()[i].value()); }

    std::size_t add_vertex(VertexKind kind, std::optional<Point> pos) {
        std::size_t id = g_.vertices.size();
        g_.vertices.push_back({id, kind, pos, 0.0, 0});
        g_.rotation.emplace_back();
        return id;
    }

    std::size_t add_edge(EdgeKind kind, std::size_t from, std::size_t to) {
        std::size_t id = g_.edges.size();
        g_.edges.push_back({id, kind, from, to});
        return id;
    }

    Point root_hint() const {
        // keep the root attractor off the top-level chords
        for (std::size_t i = 0; i < set_.size(); ++i) {
            std::size_t j = partner_[i];
            if (j != SIZE_MAX && j > i) {
                Point a = mark_pos(i), b = mark_pos(j);
                Point mid{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
                if (std::hypot(mid[0], mid[1]) < 0.15) {
                    Point arc = unit(0.5 * (set_.points()[i].value() + set_.points()[j].value()));
                    return {-0.5 * arc[0], -0.5 * arc[1]};
                }
            }
        }
        return {0.0, 0.0};
    }

    // Region bounded by the boundary between positions [lo, hi) and, unless
    // own == SIZE_MAX, by the chord of saddle `own`. Returns its attractor.
    std::size_t region(std::size_t lo, std::size_t hi, std::size_t own, Point hint) {
        std::size_t attractor = add_vertex(VertexKind::Attractor, hint);
        std::vector<HalfEdge> around;
        for (std::size_t i = lo; i < hi;) {
            std::size_t j = partner_[i];
            if (j != SIZE_MAX && j > i) {
                std::size_t saddle = add_vertex(VertexKind::Saddle, midpoint(i, j));
                std::size_t in_p = add_edge(EdgeKind::IncomingSeparatrix, i, saddle);
                std::size_t in_q = add_edge(EdgeKind::IncomingSeparatrix, j, saddle);
                separatrix_[i] = in_p;
                separatrix_[j] = in_q;
                std::size_t child = region(i + 1, j, saddle, inner_hint(i, j));
                std::size_t out_own = own_edge_.at(saddle);
                std::size_t out_parent = add_edge(EdgeKind::OutgoingSeparatrix, saddle, attractor);
                g_.rotation[saddle] = {{in_p, 1}, {out_own, 0}, {in_q, 1}, {out_parent, 0}};
                (void)child;
                around.push_back({out_parent, 1});
                i = j + 1;
            } else {
                gadget(i, attractor, around);
                ++i;
            }
        }
        if (own != SIZE_MAX) {
            std::size_t out_own = add_edge(EdgeKind::OutgoingSeparatrix, own, attractor);
            own_edge_[own] = out_own;
            around.push_back({out_own, 1});
        }
        g_.rotation[attractor] = around;
        return attractor;
    }

    void gadget(std::size_t mark, std::size_t attractor, std::vector<HalfEdge>& around) {
        Point m = mark_pos(mark);
        std::size_t saddle = add_vertex(VertexKind::Saddle, Point{0.86 * m[0], 0.86 * m[1]});
        std::size_t repeller = add_vertex(VertexKind::Repeller, Point{0.7 * m[0], 0.7 * m[1]});
        std::size_t in_mark = add_edge(EdgeKind::IncomingSeparatrix, mark, saddle);
        std::size_t in_rep = add_edge(EdgeKind::IncomingSeparatrix, repeller, saddle);
        // out_cw leaves on the clockwise side of the mark, out_ccw on the other
        std::size_t out_cw = add_edge(EdgeKind::OutgoingSeparatrix, saddle, attractor);
        std::size_t out_ccw = add_edge(EdgeKind::OutgoingSeparatrix, saddle, attractor);
        separatrix_[mark] = in_mark;
        g_.rotation[saddle] = {{in_mark, 1}, {out_ccw, 0}, {in_rep, 1}, {out_cw, 0}};
        g_.rotation[repeller] = {{in_rep, 0}};
        around.push_back({out_cw, 1});
        around.push_back({out_ccw, 1});
    }

    Point midpoint(std::size_t i, std::size_t j) const {
        Point a = mark_pos(i), b = mark_pos(j);
        return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    }

    Point inner_hint(std::size_t i, std::size_t j) const {
        Point c = midpoint(i, j);
        Point arc = unit(0.5 * (set_.points()[i].value() + set_.points()[j].value()));
        return {0.5 * (c[0] + arc[0]), 0.5 * (c[1] + arc[1])};
    }

    const circle::MarkedSet& set_;
    SkeletonGraph g_;
    std::vector<std::size_t> partner_;
    std::vector<std::size_t> separatrix_;
    std::map<std::size_t, std::size_t> own_edge_;
};

Check check(const std::string& name) { return Check{name, true, {}}; }

void fail(Check& c, const std::string& why) {
    c.pass = false;
    c.counterexamples.push_back(why);
}

std::string vname(const SkeletonGraph& g, std::size_t v) {
    return to_string(g.vertices[v].kind) + " " + std::to_string(v);
}

} // namespace

std::vector<std::vector<HalfEdge>> trace_faces(const SkeletonGraph& g) { return trace(g, all_edges(g)); }

void compute_faces(SkeletonGraph& g) {
    g.faces.clear();
    if (g.edges.empty()) {
        g.faces.emplace_back();
        return;
    }
    auto faces = trace_faces(g);
    auto outer = outer_face(g, faces);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        if (outer && *outer == f) {
            continue;
        }
        std::vector<std::size_t> cycle;
        for (const auto& h : faces[f]) {
            cycle.push_back(h.edge);
        }
        g.faces.push_back(std::move(cycle));
    }
}

SkeletonGraph realize_disc(const circle::MarkedSet& set) { return Builder(set).build(); }

bool ValidationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const Check* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

ValidationReport validate_skeleton(const SkeletonGraph& g) {
    ValidationReport report;
    const std::size_t V = g.vertices.size();
    const std::size_t E = g.edges.size();
    for (const auto& e : g.edges) {
        if (e.from >= V || e.to >= V) {
            Check c = check("structure");
            fail(c, "edge " + std::to_string(e.id) + " has an endpoint outside the vertex list");
            report.checks.push_back(c);
            return report;
        }
    }

    Check saddle = check("saddle_degree");
    std::vector<std::size_t> in(V, 0), out(V, 0), other(V, 0);
    for (const auto& e : g.edges) {
        if (e.kind == EdgeKind::IncomingSeparatrix) {
            ++in[e.to];
            ++other[e.from];
        } else if (e.kind == EdgeKind::OutgoingSeparatrix) {
            ++out[e.from];
            ++other[e.to];
        } else {
            ++other[e.from];
            ++other[e.to];
        }
    }
    for (std::size_t v = 0; v < V; ++v) {
        if (g.vertices[v].kind == VertexKind::Saddle && (in[v] != 2 || out[v] != 2 || other[v] != 0)) {
            fail(saddle, vname(g, v) + " has " + std::to_string(in[v]) + " incoming and " + std::to_string(out[v]) +
                             " outgoing separatrices, " + std::to_string(other[v]) + " other edges");
        }
    }
    report.checks.push_back(saddle);

    Check marks = check("mark_degree");
    for (std::size_t v = 0; v < V; ++v) {
        if (g.vertices[v].kind != VertexKind::BoundaryMark) {
            continue;
        }
        std::size_t separatrices = 0;
        for (const auto& e : g.edges) {
            if (e.kind != EdgeKind::BoundaryArc && (e.from == v || e.to == v)) {
                ++separatrices;
            }
        }
        if (separatrices != 1) {
            fail(marks, vname(g, v) + " lies on " + std::to_string(separatrices) + " separatrices");
        }
    }
    report.checks.push_back(marks);

    Check euler = check("euler");
    std::vector<std::vector<HalfEdge>> faces;
    const bool rotation_ok = rotation_slots(g).has_value();
    if (!rotation_ok) {
        fail(euler, "rotation system does not list every half-edge exactly once at its vertex");
    } else {
        faces = E == 0 ? std::vector<std::vector<HalfEdge>>{{}} : trace_faces(g);
        std::vector<std::size_t> parent(V);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<std::size_t(std::size_t)> root = [&](std::size_t x) {
            return parent[x] == x ? x : parent[x] = root(parent[x]);
        };
        for (const auto& e : g.edges) {
            parent[root(e.from)] = root(e.to);
        }
        std::size_t components = 0;
        for (std::size_t v = 0; v < V; ++v) {
            components += root(v) == v;
        }
        long chi = static_cast<long>(V) - static_cast<long>(E) + static_cast<long>(faces.size());
        if (components != 1) {
            fail(euler, std::to_string(components) + " connected components");
        }
        if (chi != 2) {
            fail(euler, "V - E + F = " + std::to_string(V) + " - " + std::to_string(E) + " + " +
                            std::to_string(faces.size()) + " = " + std::to_string(chi));
        }
    }
    report.checks.push_back(euler);

    Check per_face = check("attractor_per_face");
    Check per_region = check("attractor_per_region");
    if (!rotation_ok) {
        fail(per_face, "no faces without a rotation system");
        fail(per_region, "no regions without a rotation system");
    } else {
        auto outer = E == 0 ? std::nullopt : outer_face(g, faces);
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (outer && *outer == f) {
                continue;
            }
            std::set<std::size_t> attractors;
            if (E == 0) {
                for (std::size_t v = 0; v < V; ++v) {
                    if (g.vertices[v].kind == VertexKind::Attractor) attractors.insert(v);
                }
            }
            for (const auto& h : faces[f]) {
                std::size_t v = g.vertex_of(h);
                if (g.vertices[v].kind == VertexKind::Attractor) {
                    attractors.insert(v);
                }
            }
            if (attractors.size() != 1) {
                fail(per_face, "face " + std::to_string(f) + " meets " + std::to_string(attractors.size()) + " attractors");
            }
        }

        // regions cut out by the boundary and the chords through saddles
        const auto mark_inputs = mark_inputs_per_vertex(g);
        std::vector<bool> keep(E, false);
        std::vector<bool> in_sub(V, false);
        for (const auto& e : g.edges) {
            if (e.kind == EdgeKind::BoundaryArc || is_chord_saddle_edge(g, e, mark_inputs)) {
                keep[e.id] = true;
                in_sub[e.from] = in_sub[e.to] = true;
            }
        }
        auto regions = trace(g, keep);
        std::vector<long> face_of_half(2 * E, -1);
        for (std::size_t f = 0; f < regions.size(); ++f) {
            for (const auto& h : regions[f]) face_of_half[half_index(h)] = static_cast<long>(f);
        }
        std::optional<std::size_t> outer_region = outer_face(g, regions);
        std::vector<long> label(V, -1);
        const long only = regions.empty() ? 0 : -1;
        std::vector<std::size_t> queue;
        for (std::size_t v = 0; v < V; ++v) {
            if (in_sub[v]) {
                continue;
            }
            if (only == 0) {
                label[v] = 0;
            }
        }
        // seed labels from the corners where off-chord edges leave the chord graph
        for (std::size_t u = 0; u < V && only != 0; ++u) {
            if (!in_sub[u]) continue;
            const auto& rot = g.rotation[u];
            for (std::size_t i = 0; i < rot.size(); ++i) {
                if (keep[rot[i].edge]) continue;
                HalfEdge next = rot[i];
                for (std::size_t step = 1; step <= rot.size(); ++step) {
                    const HalfEdge& c = rot[(i + step) % rot.size()];
                    if (keep[c.edge]) {
                        next = c;
                        break;
                    }
                }
                long region_id = face_of_half[half_index(next)];
                std::size_t w = g.vertex_of(twin(rot[i]));
                if (in_sub[w]) {
                    continue;
                }
                if (label[w] == -1) {
                    label[w] = region_id;
                    queue.push_back(w);
                } else if (label[w] != region_id) {
                    fail(per_region, vname(g, w) + " touches regions " + std::to_string(label[w]) + " and " +
                                         std::to_string(region_id));
                }
            }
        }
        while (!queue.empty()) {
            std::size_t v = queue.back();
            queue.pop_back();
            for (const auto& h : g.rotation[v]) {
                std::size_t w = g.vertex_of(twin(h));
                if (in_sub[w]) continue;
                if (label[w] == -1) {
                    label[w] = label[v];
                    queue.push_back(w);
                } else if (label[w] != label[v]) {
                    fail(per_region, vname(g, w) + " touches regions " + std::to_string(label[w]) + " and " +
                                         std::to_string(label[v]));
                }
            }
        }
        std::map<long, std::size_t> attractors_in;
        for (std::size_t v = 0; v < V; ++v) {
            if (g.vertices[v].kind != VertexKind::Attractor) continue;
            if (label[v] < 0) {
                fail(per_region, vname(g, v) + " lies in no region");
            } else {
                ++attractors_in[label[v]];
            }
        }
        const std::size_t region_count = regions.empty() ? 1 : regions.size();
        for (std::size_t r = 0; r < region_count; ++r) {
            if (outer_region && *outer_region == r) {
                if (attractors_in.count(static_cast<long>(r))) {
                    fail(per_region, "an attractor lies outside the disc");
                }
                continue;
            }
            std::size_t n = attractors_in.count(static_cast<long>(r)) ? attractors_in[static_cast<long>(r)] : 0;
            if (n != 1) {
                fail(per_region, "region " + std::to_string(r) + " holds " + std::to_string(n) + " attractors");
            }
        }
    }
    report.checks.push_back(per_face);
    report.checks.push_back(per_region);

    Check nesting = check("nesting");
    std::map<std::size_t, std::vector<std::size_t>> ends;
    for (const auto& e : g.edges) {
        if (e.kind == EdgeKind::IncomingSeparatrix && g.vertices[e.from].kind == VertexKind::BoundaryMark) {
            ends[e.to].push_back(g.vertices[e.from].boundary_index);
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> chords;
    for (const auto& [s, idx] : ends) {
        if (idx.size() == 2) chords.emplace_back(idx[0], idx[1]);
    }
    for (std::size_t i = 0; i < chords.size(); ++i) {
        for (std::size_t j = i + 1; j < chords.size(); ++j) {
            if (chords_cross(chords[i].first, chords[i].second, chords[j].first, chords[j].second)) {
                fail(nesting, "chords {" + std::to_string(chords[i].first) + "," + std::to_string(chords[i].second) +
                                  "} and {" + std::to_string(chords[j].first) + "," +
                                  std::to_string(chords[j].second) + "} cross");
            }
        }
    }
    report.checks.push_back(nesting);
    return report;
}

circle::MarkedSet read_back(const SkeletonGraph& g) {
    std::vector<const Vertex*> marks;
    for (const auto& v : g.vertices) {
        if (v.kind == VertexKind::BoundaryMark) marks.push_back(&v);
    }
    std::sort(marks.begin(), marks.end(), [](auto* a, auto* b) { return a->boundary_index < b->boundary_index; });
    std::map<std::size_t, std::size_t> position;
    for (std::size_t i = 0; i < marks.size(); ++i) position[marks[i]->id] = i;

    std::map<std::size_t, std::vector<std::size_t>> by_saddle;
    std::vector<int> seen(marks.size(), 0);
    for (const auto& e : g.edges) {
        if (e.kind == EdgeKind::IncomingSeparatrix && position.count(e.from) &&
            g.vertices.at(e.to).kind == VertexKind::Saddle) {
            std::size_t p = position[e.from];
            by_saddle[e.to].push_back(p);
            ++seen[p];
        }
    }
    for (std::size_t i = 0; i < marks.size(); ++i) {
        if (seen[i] != 1) {
            throw Error(Errc::ImproperSet, "mark " + std::to_string(i) + " lies on " + std::to_string(seen[i]) +
                                               " separatrices");
        }
    }
    std::vector<double> points;
    for (auto* m : marks) points.push_back(m->coordinate);
    circle::Partition classes;
    for (auto& [s, block] : by_saddle) {
        std::sort(block.begin(), block.end());
        classes.push_back(block);
    }
    try {
        return circle::validate_marked_set(std::span<const double>(points), classes);
    } catch (const Error& e) {
        throw Error(Errc::ImproperSet, std::string("skeleton does not read back to a proper set: ") + e.what());
    }
}

bool same_marked_set(const circle::MarkedSet& a, const circle::MarkedSet& b, double tolerance) {
    if (a.size() != b.size() || a.classes() != b.classes()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (circle::circle_distance(a.points()[i], b.points()[i]) > tolerance) {
            return false;
        }
    }
    return true;
}

SphereRealization realize_sphere(const circle::CharacteristicPair& pair) {
    if (!circle::is_non_synchronized(pair).non_synchronized) {
        throw Error(Errc::SynchronizedInput, "realization needs a non-synchronized pair");
    }
    SphereRealization s;
    s.disc_minus = realize_disc(pair.minus);
    s.disc_plus = realize_disc(pair.plus);
    s.disc_plus.time_reversed = true;
    s.annulus = annulus::loop_angles(pair);
    return s;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", std::abs(v) < 5e-4 ? 0.0 : v);
    return buf;
}

// Draws one disc of radius r centred at (cx, cy).
void draw_disc(std::ostringstream& out, const SkeletonGraph& g, double cx, double cy, double r, const std::string& title) {
    auto X = [&](double x) { return num(cx + r * x); };
    auto Y = [&](double y) { return num(cy - r * y); };
    out << "<g>\n";
    out << "<text x=\"" << num(cx) << "\" y=\"" << num(cy - r - 12) << "\" text-anchor=\"middle\" font-size=\"12\">"
        << title << (g.time_reversed ? " (time reversed)" : "") << "</text>\n";
    out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
        << "\" fill=\"none\" stroke=\"#888\"/>\n";
    std::map<std::pair<std::size_t, std::size_t>, int> total, seen;
    for (const auto& e : g.edges) ++total[{e.from, e.to}];
    for (const auto& e : g.edges) {
        if (e.kind == EdgeKind::BoundaryArc) continue;
        const auto& a = g.vertices[e.from].position;
        const auto& b = g.vertices[e.to].position;
        if (!a || !b) continue;
        int k = seen[{e.from, e.to}]++;
        std::string style = e.kind == EdgeKind::IncomingSeparatrix ? "stroke=\"#1f5fbf\""
                                                                   : "stroke=\"#bf3f1f\" stroke-dasharray=\"4 2\"";
        // parallel edges bow out to alternating sides
        double bend = total[{e.from, e.to}] == 1 ? 0.0 : (k % 2 ? -0.3 : 0.3);
        double mx = 0.5 * ((*a)[0] + (*b)[0]) - bend * ((*b)[1] - (*a)[1]);
        double my = 0.5 * ((*a)[1] + (*b)[1]) + bend * ((*b)[0] - (*a)[0]);
        out << "<path d=\"M " << X((*a)[0]) << " " << Y((*a)[1]) << " Q " << X(mx) << " " << Y(my) << " "
            << X((*b)[0]) << " " << Y((*b)[1]) << "\" fill=\"none\" " << style << "/>\n";
    }
    for (const auto& v : g.vertices) {
        if (!v.position) continue;
        std::string x = X((*v.position)[0]), y = Y((*v.position)[1]);
        VertexKind kind = v.kind;
        if (g.time_reversed && kind == VertexKind::Attractor) kind = VertexKind::Repeller;
        else if (g.time_reversed && kind == VertexKind::Repeller) kind = VertexKind::Attractor;
        switch (kind) {
        case VertexKind::BoundaryMark:
            out << "<circle class=\"mark\" cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"#000\"/>\n";
            break;
        case VertexKind::Saddle:
            out << "<circle class=\"saddle\" cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\"#1f5fbf\"/>\n";
            break;
        case VertexKind::Attractor:
            out << "<text class=\"attractor\" x=\"" << x << "\" y=\"" << y
                << "\" text-anchor=\"middle\" dominant-baseline=\"central\" font-size=\"14\">&#9733;</text>\n";
            break;
        case VertexKind::Repeller:
            out << "<circle class=\"repeller\" cx=\"" << x << "\" cy=\"" << y
                << "\" r=\"4\" fill=\"#fff\" stroke=\"#000\"/>\n";
            break;
        }
    }
    out << "</g>\n";
}

std::string header(double w, double h) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) +
           "\" height=\"" + num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n";
}

} // namespace

std::string render_svg(const SkeletonGraph& g) {
    std::ostringstream out;
    out << header(260, 260);
    draw_disc(out, g, 130, 140, 100, "disc");
    out << "</svg>\n";
    return out.str();
}

std::string render_svg(const SphereRealization& s) {
    std::ostringstream out;
    out << header(520, 290);
    draw_disc(out, s.disc_minus, 130, 150, 100, "D-");
    draw_disc(out, s.disc_plus, 390, 150, 100, "D+");
    out << "<text x=\"260\" y=\"280\" text-anchor=\"middle\" font-size=\"11\">annulus: C- angles";
    for (double a : s.annulus.minus) out << " " << num(a);
    out << "; C+ angles";
    for (double a : s.annulus.plus) out << " " << num(a);
    out << "</text>\n</svg>\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error(Errc::IOError, "cannot open " + path + " for writing");
    }
    f << content;
    if (!f) {
        throw Error(Errc::IOError, "write to " + path + " failed");
    }
}

} // namespace parabolica::realization
