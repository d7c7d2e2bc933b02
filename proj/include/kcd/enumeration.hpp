#pragma once

#include <functional>

#include "kcd/closure.hpp"
#include "kcd/graph.hpp"

namespace kcd {

inline constexpr int kDefaultEnumerationCap = 5;
inline constexpr int kHardEnumerationCap = 6;

// Every labeled DAG on n vertices, each exactly once (counts: 1, 3, 25, 543,
// 29281 for n = 1..5). Throws LimitError above min(cap, hard cap).
void enumerate_dags(int n, const std::function<void(const Dag&)>& fn, int cap = kDefaultEnumerationCap);
std::vector<Dag> enumerate_dags(int n, int cap = kDefaultEnumerationCap);

// Edge types observed for one vertex pair (a, b) with a < b across the
// members of an equivalence class.
struct EdgeTypeSet {
    bool right = false;  // a -> b
    bool left = false;   // a <- b
    bool bi = false;     // a <-> b

    bool empty() const { return !right && !left && !bi; }
};

// The closure-class union table. Unlike the mark-wise PAG union, {->, <-}
// yields the undirected (tail-tail) edge. Throws GraphError on an empty set.
std::pair<Mark, Mark> edge_union(const EdgeTypeSet& s);

// Mark-wise union used for partial ancestral graphs: an endpoint keeps a mark
// shared by every member and turns circle otherwise.
std::pair<Mark, Mark> pag_edge_union(const EdgeTypeSet& s);

struct EssentialOracleOptions {
    int cap = kDefaultEnumerationCap;
    // Filter the class by the definitional degree-k comparison instead of
    // closure signatures (slow; for cross-validation).
    bool direct_filter = false;
};

// The edge union of the closures of every DAG k-Markov equivalent to d,
// computed by exhaustive enumeration.
Pmg k_essential_oracle(const Dag& d, ConditioningBound bound, const EssentialOracleOptions& opts = {});

struct PagOracleOptions {
    int max_edges = 10;  // 3^|E| orientation sweep budget
};

// The mark-wise union of every maximal ancestral graph Markov equivalent to
// m, computed by sweeping the 3^|E| orientations of m's skeleton.
Pmg pag_oracle(const MixedGraph& m, const PagOracleOptions& opts = {});

// Classical essential graph (CPDAG) by enumeration: union of all DAGs with
// the same skeleton and unshielded colliders as d.
Pmg essential_graph_oracle(const Dag& d, int cap = kDefaultEnumerationCap);

}  // namespace kcd
