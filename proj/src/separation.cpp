#include "kcd/separation.hpp"

#include <functional>

namespace kcd {

namespace {

template <typename G>
void check_query(const G& g, const SepQuery& q) {
    const int n = g.vertex_count();
    if (q.a < 0 || q.a >= n || q.b < 0 || q.b >= n) throw GraphError("query vertex out of range");
    if (q.a == q.b) throw GraphError("query endpoints must differ");
    if (vs_contains(q.cond, q.a) || vs_contains(q.cond, q.b))
        throw GraphError("conditioning set must exclude the query endpoints");
    if (q.cond & ~vs_all(n)) throw GraphError("conditioning set out of range");
}

// Shared m-connection reachability. States are (vertex, arrived-with-arrow);
// a vertex v with previous-edge arrowhead and next-edge arrowhead is a
// collider and passes only when it is in the reflexive ancestor closure of
// the conditioning set; a non-collider passes only when it is outside it.
template <typename G>
bool separated_impl(const G& g, const SepQuery& q) {
    check_query(g, q);
    const int n = g.vertex_count();

    VertexSet cond_anc = q.cond | ancestors_of_set(g, q.cond);

    // reached[v] bit 0: arrived with tail at v, bit 1: arrived with arrow.
    std::vector<std::uint8_t> reached(static_cast<size_t>(n), 0);
    std::vector<std::pair<int, bool>> stack;
    for (int w : members(g.adjacency(q.a))) {
        bool in_arrow = g.arrow_at(w, q.a);
        std::uint8_t bit = in_arrow ? 2 : 1;
        if (reached[static_cast<size_t>(w)] & bit) continue;
        reached[static_cast<size_t>(w)] |= bit;
        stack.emplace_back(w, in_arrow);
    }
    while (!stack.empty()) {
        auto [v, in_arrow] = stack.back();
        stack.pop_back();
        if (v == q.b) return false;
        for (int w : members(g.adjacency(v))) {
            bool collider = in_arrow && g.arrow_at(v, w);
            bool passable = collider ? vs_contains(cond_anc, v) : !vs_contains(q.cond, v);
            if (!passable) continue;
            bool next_arrow = g.arrow_at(w, v);
            std::uint8_t bit = next_arrow ? 2 : 1;
            if (reached[static_cast<size_t>(w)] & bit) continue;
            reached[static_cast<size_t>(w)] |= bit;
            stack.emplace_back(w, next_arrow);
        }
    }
    return true;
}

template <typename G>
std::optional<VertexSet> find_sepset_impl(const G& g, int a, int b, ConditioningBound bound) {
    if (a == b) throw GraphError("query endpoints must differ");
    const int n = g.vertex_count();
    if (a < 0 || a >= n || b < 0 || b >= n) throw GraphError("query vertex out of range");
    std::vector<int> candidates;
    for (int v = 0; v < n; ++v)
        if (v != a && v != b) candidates.push_back(v);
    std::optional<VertexSet> found;
    for_each_subset_upto(candidates, bound.effective(n), [&](VertexSet cond) {
        if (is_separated(g, SepQuery{a, b, cond})) {
            found = cond;
            return true;
        }
        return false;
    });
    return found;
}

}  // namespace

bool is_separated(const Dag& g, const SepQuery& q) { return separated_impl(g, q); }
bool is_separated(const MixedGraph& g, const SepQuery& q) { return separated_impl(g, q); }

bool for_each_subset_upto(const std::vector<int>& candidates, int max_card,
                          const std::function<bool(VertexSet)>& fn) {
    const int m = static_cast<int>(candidates.size());
    if (max_card > m) max_card = m;
    for (int card = 0; card <= max_card; ++card) {
        std::vector<int> idx(static_cast<size_t>(card));
        for (int i = 0; i < card; ++i) idx[static_cast<size_t>(i)] = i;
        while (true) {
            VertexSet s = 0;
            for (int i : idx) s |= vs_single(candidates[static_cast<size_t>(i)]);
            if (fn(s)) return true;
            // next combination in lexicographic order
            int pos = card - 1;
            while (pos >= 0 && idx[static_cast<size_t>(pos)] == m - card + pos) --pos;
            if (pos < 0) break;
            ++idx[static_cast<size_t>(pos)];
            for (int i = pos + 1; i < card; ++i) idx[static_cast<size_t>(i)] = idx[static_cast<size_t>(i - 1)] + 1;
        }
    }
    return false;
}

std::optional<VertexSet> find_sepset_upto_k(const Dag& g, int a, int b, ConditioningBound bound) {
    return find_sepset_impl(g, a, b, bound);
}
std::optional<VertexSet> find_sepset_upto_k(const MixedGraph& g, int a, int b, ConditioningBound bound) {
    return find_sepset_impl(g, a, b, bound);
}

bool is_k_covered(const Dag& g, int a, int b, ConditioningBound bound) {
    if (g.adjacent(a, b)) return true;
    return !find_sepset_upto_k(g, a, b, bound).has_value();
}
bool is_k_covered(const MixedGraph& g, int a, int b, ConditioningBound bound) {
    if (g.adjacent(a, b)) return true;
    return !find_sepset_upto_k(g, a, b, bound).has_value();
}

SepsetTable::SepsetTable(int n, ConditioningBound bound)
    : n_(n), bound_(bound), entries_(static_cast<size_t>(n) * static_cast<size_t>(n > 0 ? n - 1 : 0) / 2) {}

size_t SepsetTable::pair_index(int a, int b) const {
    if (a > b) std::swap(a, b);
    if (a < 0 || b >= n_ || a == b) throw GraphError("pair out of range");
    // index of (a, b) with a < b in row-major upper triangle
    return static_cast<size_t>(a) * static_cast<size_t>(n_) - static_cast<size_t>(a) * (static_cast<size_t>(a) + 1) / 2 +
           static_cast<size_t>(b - a - 1);
}

void SepsetTable::record_separated(int a, int b, VertexSet sepset) {
    if (vs_size(sepset) > bound_.k) throw GraphError("separating set exceeds the table bound");
    entries_[pair_index(a, b)] = {State::Separated, sepset};
}

void SepsetTable::record_covered(int a, int b) { entries_[pair_index(a, b)] = {State::Covered, 0}; }

bool SepsetTable::has_entry(int a, int b) const { return entries_[pair_index(a, b)].state != State::Unset; }

bool SepsetTable::covered(int a, int b) const {
    const Entry& e = entries_[pair_index(a, b)];
    if (e.state == State::Unset) throw GraphError("no sepset entry for pair");
    return e.state == State::Covered;
}

VertexSet SepsetTable::sepset(int a, int b) const {
    const Entry& e = entries_[pair_index(a, b)];
    if (e.state != State::Separated) throw GraphError("pair has no recorded separating set");
    return e.set;
}

}  // namespace kcd
