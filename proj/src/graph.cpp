#include "kcd/graph.hpp"

#include <algorithm>
#include <unordered_set>

namespace kcd {

const char* mark_name(Mark m) {
    switch (m) {
        case Mark::Tail: return "tail";
        case Mark::Arrow: return "arrow";
        case Mark::Circle: return "circle";
    }
    return "?";
}

std::vector<int> to_vector(VertexSet s) {
    std::vector<int> out;
    out.reserve(static_cast<size_t>(vs_size(s)));
    for (int v : members(s)) out.push_back(v);
    return out;
}

VertexTable::VertexTable(std::vector<std::string> names) : names_(std::move(names)) {
    if (static_cast<int>(names_.size()) > kMaxVertices)
        throw LimitError("graph exceeds the " + std::to_string(kMaxVertices) + "-vertex limit");
    std::unordered_set<std::string_view> seen;
    for (const auto& n : names_) {
        if (n.empty()) throw GraphError("empty vertex name");
        if (!seen.insert(n).second) throw GraphError("duplicate vertex name: " + n);
    }
}

std::optional<int> VertexTable::find(std::string_view name) const {
    for (size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return std::nullopt;
}

int VertexTable::require(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw GraphError("unknown vertex name: " + std::string(name));
}

std::vector<std::string> default_names(int n) {
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
    return names;
}

Dag::Dag(std::vector<std::string> names)
    : vertices_(std::move(names)),
      parents_(static_cast<size_t>(vertices_.size()), 0),
      children_(static_cast<size_t>(vertices_.size()), 0) {}

void Dag::check_vertex(int v) const {
    if (v < 0 || v >= vertex_count()) throw GraphError("vertex index out of range");
}

void Dag::add_edge(int parent, int child) {
    check_vertex(parent);
    check_vertex(child);
    if (parent == child) throw GraphError("self loop at " + vertices_.name(parent));
    if (adjacent(parent, child))
        throw GraphError("duplicate edge between " + vertices_.name(parent) + " and " + vertices_.name(child));
    children_[static_cast<size_t>(parent)] |= vs_single(child);
    parents_[static_cast<size_t>(child)] |= vs_single(parent);
    ++edge_count_;
}

std::vector<std::pair<int, int>> Dag::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<size_t>(edge_count_));
    for (int p = 0; p < vertex_count(); ++p)
        for (int c : members(children(p))) out.emplace_back(p, c);
    return out;
}

std::vector<int> Dag::topological_order() const {
    const int n = vertex_count();
    std::vector<int> indeg(static_cast<size_t>(n));
    std::vector<int> order;
    order.reserve(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) indeg[static_cast<size_t>(v)] = vs_size(parents(v));
    std::vector<int> queue;
    for (int v = 0; v < n; ++v)
        if (indeg[static_cast<size_t>(v)] == 0) queue.push_back(v);
    while (!queue.empty()) {
        int v = queue.back();
        queue.pop_back();
        order.push_back(v);
        for (int c : members(children(v)))
            if (--indeg[static_cast<size_t>(c)] == 0) queue.push_back(c);
    }
    if (static_cast<int>(order.size()) != n) throw GraphError("graph has a directed cycle");
    return order;
}

bool Dag::is_acyclic() const {
    try {
        topological_order();
        return true;
    } catch (const GraphError&) {
        return false;
    }
}

MixedGraph::MixedGraph(std::vector<std::string> names)
    : vertices_(std::move(names)),
      adj_(static_cast<size_t>(vertices_.size()), 0),
      parents_(static_cast<size_t>(vertices_.size()), 0),
      children_(static_cast<size_t>(vertices_.size()), 0),
      spouses_(static_cast<size_t>(vertices_.size()), 0) {}

MixedGraph MixedGraph::from_dag(const Dag& d) {
    MixedGraph g(d.vertices().names());
    for (auto [p, c] : d.edges()) g.add_directed(p, c);
    return g;
}

void MixedGraph::check_pair(int a, int b) const {
    if (a < 0 || a >= vertex_count() || b < 0 || b >= vertex_count())
        throw GraphError("vertex index out of range");
    if (a == b) throw GraphError("self loop at " + vertices_.name(a));
}

void MixedGraph::add_directed(int from, int to) {
    check_pair(from, to);
    if (adjacent(from, to))
        throw GraphError("duplicate edge between " + vertices_.name(from) + " and " + vertices_.name(to));
    adj_[static_cast<size_t>(from)] |= vs_single(to);
    adj_[static_cast<size_t>(to)] |= vs_single(from);
    children_[static_cast<size_t>(from)] |= vs_single(to);
    parents_[static_cast<size_t>(to)] |= vs_single(from);
    ++edge_count_;
}

void MixedGraph::add_bidirected(int a, int b) {
    check_pair(a, b);
    if (adjacent(a, b))
        throw GraphError("duplicate edge between " + vertices_.name(a) + " and " + vertices_.name(b));
    adj_[static_cast<size_t>(a)] |= vs_single(b);
    adj_[static_cast<size_t>(b)] |= vs_single(a);
    spouses_[static_cast<size_t>(a)] |= vs_single(b);
    spouses_[static_cast<size_t>(b)] |= vs_single(a);
    ++edge_count_;
}

void MixedGraph::remove_edge(int a, int b) {
    check_pair(a, b);
    if (!adjacent(a, b)) throw GraphError("no edge between " + vertices_.name(a) + " and " + vertices_.name(b));
    adj_[static_cast<size_t>(a)] &= ~vs_single(b);
    adj_[static_cast<size_t>(b)] &= ~vs_single(a);
    children_[static_cast<size_t>(a)] &= ~vs_single(b);
    children_[static_cast<size_t>(b)] &= ~vs_single(a);
    parents_[static_cast<size_t>(a)] &= ~vs_single(b);
    parents_[static_cast<size_t>(b)] &= ~vs_single(a);
    spouses_[static_cast<size_t>(a)] &= ~vs_single(b);
    spouses_[static_cast<size_t>(b)] &= ~vs_single(a);
    --edge_count_;
}

Mark MixedGraph::mark_at(int v, int other) const {
    check_pair(v, other);
    if (vs_contains(parents_[static_cast<size_t>(v)], other) || vs_contains(spouses_[static_cast<size_t>(v)], other))
        return Mark::Arrow;
    if (vs_contains(children_[static_cast<size_t>(v)], other)) return Mark::Tail;
    throw GraphError("no edge between " + vertices_.name(v) + " and " + vertices_.name(other));
}

int MixedGraph::bidirected_count() const {
    int total = 0;
    for (int v = 0; v < vertex_count(); ++v) total += vs_size(spouses(v));
    return total / 2;
}

Pmg::Pmg(std::vector<std::string> names)
    : vertices_(std::move(names)),
      adj_(static_cast<size_t>(vertices_.size()), 0),
      marks_(static_cast<size_t>(vertices_.size()) * static_cast<size_t>(vertices_.size()), 255) {}

Pmg Pmg::complete_circles(std::vector<std::string> names) {
    Pmg g(std::move(names));
    for (int a = 0; a < g.vertex_count(); ++a)
        for (int b = a + 1; b < g.vertex_count(); ++b) g.add_edge(a, b, Mark::Circle, Mark::Circle);
    return g;
}

Pmg Pmg::from_dag(const Dag& d) {
    Pmg g(d.vertices().names());
    for (auto [p, c] : d.edges()) g.add_edge(p, c, Mark::Tail, Mark::Arrow);
    return g;
}

Pmg Pmg::from_mixed(const MixedGraph& m) {
    Pmg g(m.vertices().names());
    for (int a = 0; a < m.vertex_count(); ++a)
        for (int b : members(m.adjacency(a)))
            if (a < b) g.add_edge(a, b, m.mark_at(a, b), m.mark_at(b, a));
    return g;
}

void Pmg::check_pair(int a, int b) const {
    if (a < 0 || a >= vertex_count() || b < 0 || b >= vertex_count())
        throw GraphError("vertex index out of range");
    if (a == b) throw GraphError("self loop at " + vertices_.name(a));
}

void Pmg::add_edge(int a, int b, Mark at_a, Mark at_b) {
    check_pair(a, b);
    if (adjacent(a, b))
        throw GraphError("duplicate edge between " + vertices_.name(a) + " and " + vertices_.name(b));
    adj_[static_cast<size_t>(a)] |= vs_single(b);
    adj_[static_cast<size_t>(b)] |= vs_single(a);
    slot(a, b) = static_cast<std::uint8_t>(at_a);
    slot(b, a) = static_cast<std::uint8_t>(at_b);
    ++edge_count_;
}

void Pmg::remove_edge(int a, int b) {
    check_pair(a, b);
    if (!adjacent(a, b)) throw GraphError("no edge between " + vertices_.name(a) + " and " + vertices_.name(b));
    adj_[static_cast<size_t>(a)] &= ~vs_single(b);
    adj_[static_cast<size_t>(b)] &= ~vs_single(a);
    slot(a, b) = 255;
    slot(b, a) = 255;
    --edge_count_;
}

void Pmg::set_mark(int v, int other, Mark m) {
    check_pair(v, other);
    if (!adjacent(v, other)) throw GraphError("no edge between " + vertices_.name(v) + " and " + vertices_.name(other));
    slot(v, other) = static_cast<std::uint8_t>(m);
}

Mark Pmg::mark_at(int v, int other) const {
    check_pair(v, other);
    std::uint8_t m = slot(v, other);
    if (m == 255) throw GraphError("no edge between " + vertices_.name(v) + " and " + vertices_.name(other));
    return static_cast<Mark>(m);
}

std::vector<PmgEdge> Pmg::edges() const {
    std::vector<PmgEdge> out;
    out.reserve(static_cast<size_t>(edge_count_));
    for (int a = 0; a < vertex_count(); ++a)
        for (int b : members(adjacency(a)))
            if (a < b) out.push_back({a, b, mark_at(a, b), mark_at(b, a)});
    return out;
}

bool Pmg::is_mixed() const {
    for (const auto& e : edges()) {
        if (e.at_a == Mark::Circle || e.at_b == Mark::Circle) return false;
        if (e.at_a == Mark::Tail && e.at_b == Mark::Tail) return false;
    }
    return true;
}

MixedGraph Pmg::to_mixed() const {
    MixedGraph g(vertices_.names());
    for (const auto& e : edges()) {
        if (e.at_a == Mark::Tail && e.at_b == Mark::Arrow)
            g.add_directed(e.a, e.b);
        else if (e.at_a == Mark::Arrow && e.at_b == Mark::Tail)
            g.add_directed(e.b, e.a);
        else if (e.at_a == Mark::Arrow && e.at_b == Mark::Arrow)
            g.add_bidirected(e.a, e.b);
        else
            throw GraphError("edge between " + vertices_.name(e.a) + " and " + vertices_.name(e.b) +
                             " is not directed or bidirected");
    }
    return g;
}

bool Pmg::is_dag() const {
    for (const auto& e : edges()) {
        bool directed = (e.at_a == Mark::Tail && e.at_b == Mark::Arrow) ||
                        (e.at_a == Mark::Arrow && e.at_b == Mark::Tail);
        if (!directed) return false;
    }
    return to_dag().is_acyclic();
}

Dag Pmg::to_dag() const {
    Dag d(vertices_.names());
    for (const auto& e : edges()) {
        if (e.at_a == Mark::Tail && e.at_b == Mark::Arrow)
            d.add_edge(e.a, e.b);
        else if (e.at_a == Mark::Arrow && e.at_b == Mark::Tail)
            d.add_edge(e.b, e.a);
        else
            throw GraphError("edge between " + vertices_.name(e.a) + " and " + vertices_.name(e.b) +
                             " is not directed");
    }
    return d;
}

namespace {

VertexSet directed_parents_of(const Dag& g, int v) { return g.parents(v); }
VertexSet directed_parents_of(const MixedGraph& g, int v) { return g.directed_parents(v); }
VertexSet directed_children_of(const Dag& g, int v) { return g.children(v); }
VertexSet directed_children_of(const MixedGraph& g, int v) { return g.directed_children(v); }

// Everything reachable from x by walking edges upward (may include x itself
// when a directed cycle passes through it).
template <typename G>
VertexSet ancestor_closure(const G& g, int x) {
    if (x < 0 || x >= g.vertex_count()) throw GraphError("vertex index out of range");
    VertexSet seen = 0;
    VertexSet frontier = directed_parents_of(g, x);
    while (frontier) {
        seen |= frontier;
        VertexSet next = 0;
        for (int v : members(frontier)) next |= directed_parents_of(g, v);
        frontier = next & ~seen;
    }
    return seen;
}

template <typename G>
VertexSet descendant_closure(const G& g, int x) {
    if (x < 0 || x >= g.vertex_count()) throw GraphError("vertex index out of range");
    VertexSet seen = 0;
    VertexSet frontier = directed_children_of(g, x);
    while (frontier) {
        seen |= frontier;
        VertexSet next = 0;
        for (int v : members(frontier)) next |= directed_children_of(g, v);
        frontier = next & ~seen;
    }
    return seen;
}

}  // namespace

VertexSet ancestors(const Dag& g, int x) { return ancestor_closure(g, x) & ~vs_single(x); }
VertexSet ancestors(const MixedGraph& g, int x) { return ancestor_closure(g, x) & ~vs_single(x); }
VertexSet descendants(const Dag& g, int x) { return descendant_closure(g, x) & ~vs_single(x); }
VertexSet descendants(const MixedGraph& g, int x) { return descendant_closure(g, x) & ~vs_single(x); }

bool is_ancestral(const MixedGraph& g) {
    const int n = g.vertex_count();
    for (int v = 0; v < n; ++v) {
        VertexSet closure = ancestor_closure(g, v);
        if (vs_contains(closure, v)) return false;  // directed cycle through v
        if (closure & g.spouses(v)) return false;   // almost directed cycle
    }
    return true;
}

bool pmg_subset_of(const Pmg& a, const Pmg& b) {
    if (a.vertices() != b.vertices()) return false;
    if (skeleton(a) != skeleton(b)) return false;
    for (const auto& e : b.edges()) {
        if (e.at_a != Mark::Circle && a.mark_at(e.a, e.b) != e.at_a) return false;
        if (e.at_b != Mark::Circle && a.mark_at(e.b, e.a) != e.at_b) return false;
    }
    return true;
}

}  // namespace kcd
