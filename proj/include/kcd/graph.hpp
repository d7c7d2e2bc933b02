#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kcd {

inline constexpr int kMaxVertices = 64;

enum class Mark : std::uint8_t { Tail, Arrow, Circle };

const char* mark_name(Mark m);

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vertex subsets as bitmasks; graphs are capped at kMaxVertices.
using VertexSet = std::uint64_t;

inline bool vs_contains(VertexSet s, int v) { return (s >> v) & 1u; }
inline VertexSet vs_single(int v) { return VertexSet{1} << v; }
inline int vs_size(VertexSet s) { return std::popcount(s); }
inline VertexSet vs_all(int n) { return n >= 64 ? ~VertexSet{0} : (VertexSet{1} << n) - 1; }

// Range over the members of a VertexSet in ascending order.
class VertexRange {
public:
    class iterator {
    public:
        explicit iterator(VertexSet rest) : rest_(rest) {}
        int operator*() const { return std::countr_zero(rest_); }
        iterator& operator++() {
            rest_ &= rest_ - 1;
            return *this;
        }
        bool operator!=(const iterator& o) const { return rest_ != o.rest_; }

    private:
        VertexSet rest_;
    };

    explicit VertexRange(VertexSet s) : set_(s) {}
    iterator begin() const { return iterator(set_); }
    iterator end() const { return iterator(0); }

private:
    VertexSet set_;
};

inline VertexRange members(VertexSet s) { return VertexRange(s); }
std::vector<int> to_vector(VertexSet s);

class VertexTable {
public:
    VertexTable() = default;
    explicit VertexTable(std::vector<std::string> names);

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int v) const { return names_.at(static_cast<size_t>(v)); }
    const std::vector<std::string>& names() const { return names_; }
    std::optional<int> find(std::string_view name) const;
    int require(std::string_view name) const;

    friend bool operator==(const VertexTable&, const VertexTable&) = default;

private:
    std::vector<std::string> names_;
};

std::vector<std::string> default_names(int n);

class Dag {
public:
    explicit Dag(std::vector<std::string> names);
    explicit Dag(int n) : Dag(default_names(n)) {}

    int vertex_count() const { return vertices_.size(); }
    const VertexTable& vertices() const { return vertices_; }

    // Adds parent -> child. Rejects self loops and edges that already exist
    // in either direction. Acyclicity is checked separately.
    void add_edge(int parent, int child);
    bool has_edge(int parent, int child) const { return vs_contains(children_[static_cast<size_t>(parent)], child); }
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }
    bool arrow_at(int v, int other) const { return has_edge(other, v); }

    VertexSet parents(int v) const { return parents_[static_cast<size_t>(v)]; }
    VertexSet children(int v) const { return children_[static_cast<size_t>(v)]; }
    VertexSet adjacency(int v) const { return parents_[static_cast<size_t>(v)] | children_[static_cast<size_t>(v)]; }

    int edge_count() const { return edge_count_; }
    std::vector<std::pair<int, int>> edges() const;

    bool is_acyclic() const;
    // Topological order; throws GraphError on a cycle.
    std::vector<int> topological_order() const;

    friend bool operator==(const Dag&, const Dag&) = default;

private:
    void check_vertex(int v) const;

    VertexTable vertices_;
    std::vector<VertexSet> parents_;
    std::vector<VertexSet> children_;
    int edge_count_ = 0;
};

// Mixed graph over directed and bidirected edges; tail-tail edges are rejected.
class MixedGraph {
public:
    explicit MixedGraph(std::vector<std::string> names);
    explicit MixedGraph(int n) : MixedGraph(default_names(n)) {}
    static MixedGraph from_dag(const Dag& d);

    int vertex_count() const { return vertices_.size(); }
    const VertexTable& vertices() const { return vertices_; }

    void add_directed(int from, int to);
    void add_bidirected(int a, int b);
    void remove_edge(int a, int b);

    bool adjacent(int a, int b) const { return vs_contains(adj_[static_cast<size_t>(a)], b); }
    // Mark at v's end of the edge between v and other; edge must exist.
    Mark mark_at(int v, int other) const;
    bool arrow_at(int v, int other) const {
        return vs_contains(parents_[static_cast<size_t>(v)] | spouses_[static_cast<size_t>(v)], other);
    }

    VertexSet adjacency(int v) const { return adj_[static_cast<size_t>(v)]; }
    VertexSet directed_parents(int v) const { return parents_[static_cast<size_t>(v)]; }
    VertexSet directed_children(int v) const { return children_[static_cast<size_t>(v)]; }
    VertexSet spouses(int v) const { return spouses_[static_cast<size_t>(v)]; }

    bool has_directed(int from, int to) const { return vs_contains(children_[static_cast<size_t>(from)], to); }
    bool has_bidirected(int a, int b) const { return vs_contains(spouses_[static_cast<size_t>(a)], b); }

    int edge_count() const { return edge_count_; }
    int bidirected_count() const;

    friend bool operator==(const MixedGraph&, const MixedGraph&) = default;

private:
    void check_pair(int a, int b) const;

    VertexTable vertices_;
    std::vector<VertexSet> adj_;
    std::vector<VertexSet> parents_;
    std::vector<VertexSet> children_;
    std::vector<VertexSet> spouses_;
    int edge_count_ = 0;
};

struct PmgEdge {
    int a = 0;
    int b = 0;
    Mark at_a = Mark::Circle;
    Mark at_b = Mark::Circle;

    friend bool operator==(const PmgEdge&, const PmgEdge&) = default;
};

// Partial mixed graph: any combination of tail/arrow/circle endpoint marks.
class Pmg {
public:
    explicit Pmg(std::vector<std::string> names);
    explicit Pmg(int n) : Pmg(default_names(n)) {}
    static Pmg complete_circles(std::vector<std::string> names);
    static Pmg from_dag(const Dag& d);
    static Pmg from_mixed(const MixedGraph& g);

    int vertex_count() const { return vertices_.size(); }
    const VertexTable& vertices() const { return vertices_; }

    void add_edge(int a, int b, Mark at_a, Mark at_b);
    void remove_edge(int a, int b);
    void set_mark(int v, int other, Mark m);

    bool adjacent(int a, int b) const { return vs_contains(adj_[static_cast<size_t>(a)], b); }
    Mark mark_at(int v, int other) const;
    bool arrow_at(int v, int other) const { return adjacent(v, other) && mark_at(v, other) == Mark::Arrow; }

    VertexSet adjacency(int v) const { return adj_[static_cast<size_t>(v)]; }
    int edge_count() const { return edge_count_; }
    std::vector<PmgEdge> edges() const;  // canonical order: a < b, sorted by (a, b)

    // True if every edge is directed or bidirected (no circle, no tail-tail).
    bool is_mixed() const;
    MixedGraph to_mixed() const;
    // True if the graph is a DAG drawn with tail/arrow marks.
    bool is_dag() const;
    Dag to_dag() const;

    friend bool operator==(const Pmg&, const Pmg&) = default;

private:
    void check_pair(int a, int b) const;
    std::uint8_t& slot(int v, int other) {
        return marks_[static_cast<size_t>(v) * static_cast<size_t>(vertices_.size()) + static_cast<size_t>(other)];
    }
    std::uint8_t slot(int v, int other) const {
        return marks_[static_cast<size_t>(v) * static_cast<size_t>(vertices_.size()) + static_cast<size_t>(other)];
    }

    VertexTable vertices_;
    std::vector<VertexSet> adj_;
    std::vector<std::uint8_t> marks_;  // mark at v's end of edge {v, other}, or 255 when non-adjacent
    int edge_count_ = 0;
};

// Directed-ancestor queries. An(x) excludes x itself; callers that need the
// reflexive closure add the vertex explicitly.
VertexSet ancestors(const Dag& g, int x);
VertexSet ancestors(const MixedGraph& g, int x);
VertexSet descendants(const Dag& g, int x);
VertexSet descendants(const MixedGraph& g, int x);

template <typename G>
VertexSet ancestors_of_set(const G& g, VertexSet s) {
    VertexSet out = 0;
    for (int v : members(s)) out |= ancestors(g, v);
    return out;
}

struct ColliderTriple {
    int a = 0;  // endpoint, a < b
    int c = 0;  // collider
    int b = 0;

    auto operator<=>(const ColliderTriple&) const = default;
};

template <typename G>
std::vector<std::pair<int, int>> skeleton(const G& g) {
    std::vector<std::pair<int, int>> out;
    const int n = g.vertex_count();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (g.adjacent(a, b)) out.emplace_back(a, b);
    return out;
}

// Triples (a, c, b) with a < b, a and b non-adjacent, and arrowheads at c on
// both incident edges.
template <typename G>
std::vector<ColliderTriple> unshielded_colliders(const G& g) {
    std::vector<ColliderTriple> out;
    const int n = g.vertex_count();
    for (int c = 0; c < n; ++c) {
        for (int a = 0; a < n; ++a) {
            if (a == c || !g.adjacent(a, c) || !g.arrow_at(c, a)) continue;
            for (int b = a + 1; b < n; ++b) {
                if (b == c || !g.adjacent(b, c) || !g.arrow_at(c, b)) continue;
                if (g.adjacent(a, b)) continue;
                out.push_back({a, c, b});
            }
        }
    }
    return out;
}

// No directed cycle and no bidirected edge between a vertex and one of its
// ancestors or descendants.
bool is_ancestral(const MixedGraph& g);

// Partial-mixed-graph informativeness order: a is a subset of b when both
// share a skeleton and every tail or arrowhead of b appears identically in a
// (equivalently, every circle of a is a circle of b).
bool pmg_subset_of(const Pmg& a, const Pmg& b);

}  // namespace kcd
