#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kcd/graph.hpp"

namespace kcd {

struct SepQuery {
    int a = 0;
    int b = 0;
    VertexSet cond = 0;
};

struct ConditioningBound {
    int k = 0;

    // Every subset of V \ {a,b} is admissible beyond n-2.
    int effective(int n) const {
        int cap = n - 2;
        if (cap < 0) cap = 0;
        return k < cap ? k : cap;
    }
};

// AllSubsets is the semantics used by closure construction and k-covered
// queries (the definitions quantify over all of V \ {a,b}); NeighborSubsets
// is the PC-stable style data-mode heuristic.
enum class SearchScope { AllSubsets, NeighborSubsets };

// d-separation on DAGs and m-separation on mixed graphs, via reachability
// over (vertex, arrived-with-arrowhead) states. A conditioning vertex counts
// as an ancestor of the conditioning set.
bool is_separated(const Dag& g, const SepQuery& q);
bool is_separated(const MixedGraph& g, const SepQuery& q);

// First separating set of size <= k in search order (cardinality 0..k, then
// lexicographic by vertex index), or nullopt when the pair is covered at this
// bound. Candidates come from V \ {a,b}.
std::optional<VertexSet> find_sepset_upto_k(const Dag& g, int a, int b, ConditioningBound bound);
std::optional<VertexSet> find_sepset_upto_k(const MixedGraph& g, int a, int b, ConditioningBound bound);

// Adjacent pairs are always covered.
bool is_k_covered(const Dag& g, int a, int b, ConditioningBound bound);
bool is_k_covered(const MixedGraph& g, int a, int b, ConditioningBound bound);

// Lexicographic subset walk used by every sepset search: emits subsets of
// `candidates` of size card 0, 1, ..., max_card, each cardinality in
// lexicographic order; stops early when fn returns true.
bool for_each_subset_upto(const std::vector<int>& candidates, int max_card,
                          const std::function<bool(VertexSet)>& fn);

class SepsetTable {
public:
    SepsetTable() = default;
    SepsetTable(int n, ConditioningBound bound);

    void record_separated(int a, int b, VertexSet sepset);
    void record_covered(int a, int b);

    bool has_entry(int a, int b) const;
    bool covered(int a, int b) const;
    // Separating set for a pair recorded as separated.
    VertexSet sepset(int a, int b) const;
    ConditioningBound bound() const { return bound_; }

private:
    enum class State : std::uint8_t { Unset, Covered, Separated };
    struct Entry {
        State state = State::Unset;
        VertexSet set = 0;
    };
    size_t pair_index(int a, int b) const;

    int n_ = 0;
    ConditioningBound bound_;
    std::vector<Entry> entries_;
};

}  // namespace kcd
