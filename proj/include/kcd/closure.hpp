#pragma once

#include <optional>
#include <string>

#include "kcd/graph.hpp"
#include "kcd/separation.hpp"

namespace kcd {

struct KClosure {
    MixedGraph graph;
    ConditioningBound bound;

    friend bool operator==(const KClosure&, const KClosure&) = default;
};

// Adds an edge between every non-adjacent pair of d that no conditioning set
// of size <= k separates: a -> b when a is an ancestor of b, b -> a when the
// reverse holds, a <-> b otherwise. Edges of d are preserved verbatim.
KClosure construct_k_closure(const Dag& d, ConditioningBound bound);

enum class ClosureDefect { None, NotAncestral, NotMaximal, BidirectedSeparable };

struct ClosureValidation {
    bool valid = true;
    ClosureDefect defect = ClosureDefect::None;
    int a = -1;
    int b = -1;
    VertexSet witness = 0;

    // e.g. "BidirectedSeparable(c,d; {u1,u2})"
    std::string describe(const VertexTable& names) const;
};

// Checks the three closure-graph conditions in order: ancestral, maximal
// (every non-adjacent pair separable by some set), and, per bidirected edge,
// non-separability at bound k once that edge is removed.
ClosureValidation validate_k_closure(const MixedGraph& g, ConditioningBound bound);
bool is_valid_k_closure(const MixedGraph& g, ConditioningBound bound);

// Every non-adjacent pair separable by some conditioning set (brute force
// over all subsets; desk-scale graphs only).
bool is_maximal(const MixedGraph& g);

// Markov equivalence of maximal ancestral graphs: same skeleton, same
// unshielded colliders, and matching collider status at the far node of every
// path that is discriminating in both graphs. Throws on non-ancestral or
// non-maximal input.
bool mag_markov_equivalent(const MixedGraph& m1, const MixedGraph& m2);

namespace detail {
// The third equivalence condition alone, assuming equal skeletons.
bool discriminating_paths_agree(const MixedGraph& m1, const MixedGraph& m2);
}  // namespace detail

// For closure graphs the discriminating-path condition is redundant, so
// equivalence reduces to skeleton + unshielded colliders. Bounds must match.
bool kclosure_equivalent(const KClosure& k1, const KClosure& k2);

// Equivalence of DAGs on every d-separation statement with |cond| <= k,
// decided through closure graphs. Vertex tables must match.
bool k_markov_equivalent(const Dag& d1, const Dag& d2, ConditioningBound bound);

// The definitional check: exhaustively compares every degree-k statement.
// When a mismatch exists and witness != nullptr, the first one (pair-major,
// then subset order) is stored.
bool k_markov_equivalent_direct(const Dag& d1, const Dag& d2, ConditioningBound bound,
                                SepQuery* witness = nullptr);

// Classical Markov equivalence of DAGs: same skeleton and unshielded colliders.
bool markov_equivalent(const Dag& d1, const Dag& d2);

}  // namespace kcd
