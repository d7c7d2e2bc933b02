#include "kcd/closure.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace kcd {

KClosure construct_k_closure(const Dag& d, ConditioningBound bound) {
    if (!d.is_acyclic()) throw GraphError("input graph has a directed cycle");
    const int n = d.vertex_count();
    ConditioningBound eff{bound.effective(n)};

    std::vector<VertexSet> anc(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) anc[static_cast<size_t>(v)] = ancestors(d, v);

    MixedGraph out = MixedGraph::from_dag(d);
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (d.adjacent(a, b)) continue;
            if (find_sepset_upto_k(d, a, b, eff)) continue;  // separable: stays non-adjacent
            if (vs_contains(anc[static_cast<size_t>(b)], a))
                out.add_directed(a, b);
            else if (vs_contains(anc[static_cast<size_t>(a)], b))
                out.add_directed(b, a);
            else
                out.add_bidirected(a, b);
        }
    }
    return KClosure{std::move(out), eff};
}

std::string ClosureValidation::describe(const VertexTable& names) const {
    switch (defect) {
        case ClosureDefect::None:
            return "Valid";
        case ClosureDefect::NotAncestral: {
            if (a >= 0 && b >= 0)
                return "NotAncestral(" + names.name(a) + "<->" + names.name(b) + " with directed path)";
            return a >= 0 ? "NotAncestral(cycle through " + names.name(a) + ")" : "NotAncestral";
        }
        case ClosureDefect::NotMaximal:
            return "NotMaximal(" + names.name(a) + "," + names.name(b) + ")";
        case ClosureDefect::BidirectedSeparable: {
            std::ostringstream out;
            out << "BidirectedSeparable(" << names.name(a) << "," << names.name(b) << "; {";
            bool first = true;
            for (int v : members(witness)) {
                if (!first) out << ",";
                out << names.name(v);
                first = false;
            }
            out << "})";
            return out.str();
        }
    }
    return "Valid";
}

namespace {

// First ancestral defect with a witness: a vertex on a directed cycle, or a
// bidirected pair connected by a directed path.
std::optional<ClosureValidation> find_ancestral_defect(const MixedGraph& g) {
    const int n = g.vertex_count();
    for (int v = 0; v < n; ++v) {
        VertexSet seen = 0;
        VertexSet frontier = g.directed_parents(v);
        while (frontier) {
            seen |= frontier;
            VertexSet next = 0;
            for (int u : members(frontier)) next |= g.directed_parents(u);
            frontier = next & ~seen;
        }
        if (vs_contains(seen, v)) return ClosureValidation{false, ClosureDefect::NotAncestral, v, -1, 0};
        VertexSet bad = g.spouses(v) & seen;
        if (bad) {
            int s = std::countr_zero(bad);
            return ClosureValidation{false, ClosureDefect::NotAncestral, s, v, 0};
        }
    }
    return std::nullopt;
}

// True if some conditioning set of any size separates a and b.
bool separable_any(const MixedGraph& g, int a, int b) {
    const int n = g.vertex_count();
    std::vector<int> candidates;
    for (int v = 0; v < n; ++v)
        if (v != a && v != b) candidates.push_back(v);
    bool found = false;
    for_each_subset_upto(candidates, n - 2, [&](VertexSet cond) {
        if (is_separated(g, SepQuery{a, b, cond})) {
            found = true;
            return true;
        }
        return false;
    });
    return found;
}

}  // namespace

ClosureValidation validate_k_closure(const MixedGraph& g, ConditioningBound bound) {
    const int n = g.vertex_count();
    ConditioningBound eff{bound.effective(n)};

    if (auto defect = find_ancestral_defect(g)) return *defect;

    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (!g.adjacent(a, b) && !separable_any(g, a, b))
                return ClosureValidation{false, ClosureDefect::NotMaximal, a, b, 0};

    for (int a = 0; a < n; ++a) {
        for (int b : members(g.spouses(a))) {
            if (b < a) continue;
            MixedGraph pruned = g;
            pruned.remove_edge(a, b);
            if (auto witness = find_sepset_upto_k(pruned, a, b, eff))
                return ClosureValidation{false, ClosureDefect::BidirectedSeparable, a, b, *witness};
        }
    }
    return ClosureValidation{};
}

bool is_valid_k_closure(const MixedGraph& g, ConditioningBound bound) {
    return validate_k_closure(g, bound).valid;
}

bool is_maximal(const MixedGraph& g) {
    for (int a = 0; a < g.vertex_count(); ++a)
        for (int b = a + 1; b < g.vertex_count(); ++b)
            if (!g.adjacent(a, b) && !separable_any(g, a, b)) return false;
    return true;
}

namespace detail {

// Compares the far-node collider status across every path that is
// discriminating in both graphs: chains are walked backwards from u, every
// chain member a parent of v and a collider in both graphs, and a path
// completes when a vertex non-adjacent to v attaches with an arrowhead at the
// chain head. Returns false on the first status mismatch.
bool discriminating_paths_agree(const MixedGraph& m1, const MixedGraph& m2) {
    const int n = m1.vertex_count();
    auto arrows_both = [&](int at, int other) { return m1.arrow_at(at, other) && m2.arrow_at(at, other); };
    auto parent_both = [&](int p, int c) { return m1.has_directed(p, c) && m2.has_directed(p, c); };

    for (int v = 0; v < n; ++v) {
        for (int y : members(m1.adjacency(v))) {
            // chain members must be parents of v and colliders in both graphs
            for (int u : members(m1.adjacency(y))) {
                if (u == v || !parent_both(u, v)) continue;
                if (!arrows_both(u, y)) continue;  // u's collider side toward y
                // DFS over chains ending at u
                std::vector<std::pair<int, VertexSet>> stack;
                stack.emplace_back(u, vs_single(u) | vs_single(y) | vs_single(v));
                bool mismatch = false;
                while (!stack.empty() && !mismatch) {
                    auto [head, on_path] = stack.back();
                    stack.pop_back();
                    for (int x : members(m1.adjacency(head) & ~on_path)) {
                        if (!arrows_both(head, x)) continue;  // arrowhead at head from x's side
                        if (!m1.adjacent(x, v)) {
                            // discriminating in both; compare y's status
                            bool c1 = m1.arrow_at(y, u) && m1.arrow_at(y, v);
                            bool c2 = m2.arrow_at(y, u) && m2.arrow_at(y, v);
                            if (c1 != c2) mismatch = true;
                        } else if (parent_both(x, v) && arrows_both(x, head)) {
                            stack.emplace_back(x, on_path | vs_single(x));
                        }
                    }
                }
                if (mismatch) return false;
            }
        }
    }
    return true;
}

}  // namespace detail

bool mag_markov_equivalent(const MixedGraph& m1, const MixedGraph& m2) {
    if (m1.vertices() != m2.vertices()) throw GraphError("vertex sets differ");
    if (!is_ancestral(m1) || !is_ancestral(m2)) throw GraphError("inputs must be ancestral");
    if (!is_maximal(m1) || !is_maximal(m2)) throw GraphError("inputs must be maximal");

    if (skeleton(m1) != skeleton(m2)) return false;
    if (unshielded_colliders(m1) != unshielded_colliders(m2)) return false;
    return detail::discriminating_paths_agree(m1, m2);
}

bool kclosure_equivalent(const KClosure& k1, const KClosure& k2) {
    if (k1.graph.vertices() != k2.graph.vertices()) throw GraphError("vertex sets differ");
    if (k1.bound.k != k2.bound.k) throw GraphError("conditioning bounds differ");
    return skeleton(k1.graph) == skeleton(k2.graph) &&
           unshielded_colliders(k1.graph) == unshielded_colliders(k2.graph);
}

bool k_markov_equivalent(const Dag& d1, const Dag& d2, ConditioningBound bound) {
    if (d1.vertices() != d2.vertices()) throw GraphError("vertex sets differ");
    return kclosure_equivalent(construct_k_closure(d1, bound), construct_k_closure(d2, bound));
}

bool k_markov_equivalent_direct(const Dag& d1, const Dag& d2, ConditioningBound bound, SepQuery* witness) {
    if (d1.vertices() != d2.vertices()) throw GraphError("vertex sets differ");
    const int n = d1.vertex_count();
    ConditioningBound eff{bound.effective(n)};
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            std::vector<int> candidates;
            for (int v = 0; v < n; ++v)
                if (v != a && v != b) candidates.push_back(v);
            bool differ = for_each_subset_upto(candidates, eff.k, [&](VertexSet cond) {
                SepQuery q{a, b, cond};
                if (is_separated(d1, q) != is_separated(d2, q)) {
                    if (witness) *witness = q;
                    return true;
                }
                return false;
            });
            if (differ) return false;
        }
    }
    return true;
}

bool markov_equivalent(const Dag& d1, const Dag& d2) {
    if (d1.vertices() != d2.vertices()) throw GraphError("vertex sets differ");
    return skeleton(d1) == skeleton(d2) && unshielded_colliders(d1) == unshielded_colliders(d2);
}

}  // namespace kcd
