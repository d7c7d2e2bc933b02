#include "kcd/enumeration.hpp"

#include <map>
#include <mutex>

namespace kcd {

namespace {

void check_cap(int n, int cap) {
    int limit = std::min(cap, kHardEnumerationCap);
    if (n < 1) throw GraphError("vertex count must be positive");
    if (n > limit)
        throw LimitError("enumeration over " + std::to_string(n) + " vertices exceeds the cap of " +
                         std::to_string(limit));
}

struct PairList {
    std::vector<std::pair<int, int>> pairs;
    explicit PairList(int n) {
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    }
};

// Recursive assignment of {none, a->b, b->a} per pair with incremental
// reachability pruning; desc[v] holds everything reachable from v, v included.
void enumerate_rec(int n, const PairList& pl, size_t t, std::vector<VertexSet>& desc,
                   std::vector<std::pair<int, int>>& edges, const std::function<void(const Dag&)>& fn) {
    if (t == pl.pairs.size()) {
        Dag d(n);
        for (auto [p, c] : edges) d.add_edge(p, c);
        fn(d);
        return;
    }
    auto [a, b] = pl.pairs[t];
    enumerate_rec(n, pl, t + 1, desc, edges, fn);
    for (int dir = 0; dir < 2; ++dir) {
        int from = dir == 0 ? a : b;
        int to = dir == 0 ? b : a;
        if (vs_contains(desc[static_cast<size_t>(to)], from)) continue;  // would close a cycle
        std::vector<VertexSet> saved = desc;
        for (int v = 0; v < n; ++v)
            if (vs_contains(desc[static_cast<size_t>(v)], from))
                desc[static_cast<size_t>(v)] |= desc[static_cast<size_t>(to)];
        edges.emplace_back(from, to);
        enumerate_rec(n, pl, t + 1, desc, edges, fn);
        edges.pop_back();
        desc = std::move(saved);
    }
}

struct ClosureRecord {
    MixedGraph graph;
    std::vector<std::pair<int, int>> skel;
    std::vector<ColliderTriple> colliders;
};

// Census closures are cached per (n, k); the oracles scan them repeatedly.
const std::vector<ClosureRecord>& census_closures(int n, int k) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<ClosureRecord>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({n, k});
    if (it != cache.end()) return it->second;
    std::vector<ClosureRecord> records;
    enumerate_dags(
        n,
        [&](const Dag& d) {
            KClosure c = construct_k_closure(d, ConditioningBound{k});
            records.push_back(
                {c.graph, skeleton(c.graph), unshielded_colliders(c.graph)});
        },
        kHardEnumerationCap);
    return cache.emplace(std::make_pair(n, k), std::move(records)).first->second;
}

}  // namespace

void enumerate_dags(int n, const std::function<void(const Dag&)>& fn, int cap) {
    check_cap(n, cap);
    PairList pl(n);
    std::vector<VertexSet> desc(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) desc[static_cast<size_t>(v)] = vs_single(v);
    std::vector<std::pair<int, int>> edges;
    enumerate_rec(n, pl, 0, desc, edges, fn);
}

std::vector<Dag> enumerate_dags(int n, int cap) {
    std::vector<Dag> out;
    enumerate_dags(n, [&](const Dag& d) { out.push_back(d); }, cap);
    return out;
}

std::pair<Mark, Mark> edge_union(const EdgeTypeSet& s) {
    if (s.empty()) throw GraphError("edge union of an empty type set");
    if (s.right && s.left && s.bi) return {Mark::Circle, Mark::Circle};
    if (s.right && s.left) return {Mark::Tail, Mark::Tail};
    if (s.right && s.bi) return {Mark::Circle, Mark::Arrow};
    if (s.left && s.bi) return {Mark::Arrow, Mark::Circle};
    if (s.right) return {Mark::Tail, Mark::Arrow};
    if (s.left) return {Mark::Arrow, Mark::Tail};
    return {Mark::Arrow, Mark::Arrow};
}

std::pair<Mark, Mark> pag_edge_union(const EdgeTypeSet& s) {
    if (s.empty()) throw GraphError("edge union of an empty type set");
    // marks at a across members: right => tail, left => arrow, bi => arrow
    auto unify = [](bool tail, bool arrow) {
        if (tail && arrow) return Mark::Circle;
        return tail ? Mark::Tail : Mark::Arrow;
    };
    Mark at_a = unify(s.right, s.left || s.bi);
    Mark at_b = unify(s.left, s.right || s.bi);
    return {at_a, at_b};
}

namespace {

EdgeTypeSet observe_edge(EdgeTypeSet acc, const MixedGraph& g, int a, int b) {
    if (g.has_directed(a, b))
        acc.right = true;
    else if (g.has_directed(b, a))
        acc.left = true;
    else
        acc.bi = true;
    return acc;
}

}  // namespace

Pmg k_essential_oracle(const Dag& d, ConditioningBound bound, const EssentialOracleOptions& opts) {
    const int n = d.vertex_count();
    check_cap(n, opts.cap);
    ConditioningBound eff{bound.effective(n)};

    KClosure target = construct_k_closure(d, eff);
    auto target_skel = skeleton(target.graph);
    auto target_colliders = unshielded_colliders(target.graph);

    std::vector<EdgeTypeSet> acc(target_skel.size());
    bool any_member = false;

    if (opts.direct_filter) {
        enumerate_dags(
            n,
            [&](const Dag& cand) {
                if (!k_markov_equivalent_direct(d, cand, eff)) return;
                KClosure c = construct_k_closure(cand, eff);
                if (skeleton(c.graph) != target_skel)
                    throw GraphError("equivalence-class member with a different closure skeleton");
                for (size_t i = 0; i < target_skel.size(); ++i)
                    acc[i] = observe_edge(acc[i], c.graph, target_skel[i].first, target_skel[i].second);
                any_member = true;
            },
            opts.cap);
    } else {
        for (const auto& rec : census_closures(n, eff.k)) {
            if (rec.skel != target_skel || rec.colliders != target_colliders) continue;
            for (size_t i = 0; i < target_skel.size(); ++i)
                acc[i] = observe_edge(acc[i], rec.graph, target_skel[i].first, target_skel[i].second);
            any_member = true;
        }
    }
    if (!any_member) throw GraphError("equivalence class is empty");  // unreachable: d is a member

    Pmg out(d.vertices().names());
    for (size_t i = 0; i < target_skel.size(); ++i) {
        auto [at_a, at_b] = edge_union(acc[i]);
        out.add_edge(target_skel[i].first, target_skel[i].second, at_a, at_b);
    }
    return out;
}

Pmg pag_oracle(const MixedGraph& m, const PagOracleOptions& opts) {
    if (!is_ancestral(m)) throw GraphError("input must be ancestral");
    if (!is_maximal(m)) throw GraphError("input must be maximal");
    auto skel = skeleton(m);
    if (static_cast<int>(skel.size()) > opts.max_edges)
        throw LimitError("skeleton has " + std::to_string(skel.size()) +
                         " edges, above the orientation sweep budget of " + std::to_string(opts.max_edges));

    auto target_colliders = unshielded_colliders(m);

    std::vector<EdgeTypeSet> acc(skel.size());
    bool any_member = false;

    std::vector<int> assign(skel.size(), 0);
    while (true) {
        MixedGraph g(m.vertices().names());
        for (size_t i = 0; i < skel.size(); ++i) {
            auto [a, b] = skel[i];
            if (assign[i] == 0)
                g.add_directed(a, b);
            else if (assign[i] == 1)
                g.add_directed(b, a);
            else
                g.add_bidirected(a, b);
        }
        bool keep = is_ancestral(g) && unshielded_colliders(g) == target_colliders &&
                    detail::discriminating_paths_agree(g, m) && is_maximal(g);
        if (keep) {
            for (size_t i = 0; i < skel.size(); ++i) acc[i] = observe_edge(acc[i], g, skel[i].first, skel[i].second);
            any_member = true;
        }
        // next assignment
        size_t pos = 0;
        while (pos < assign.size() && assign[pos] == 2) assign[pos++] = 0;
        if (pos == assign.size()) break;
        ++assign[pos];
    }
    if (!any_member) throw GraphError("equivalence class is empty");  // unreachable: m is a member

    Pmg out(m.vertices().names());
    for (size_t i = 0; i < skel.size(); ++i) {
        auto [at_a, at_b] = pag_edge_union(acc[i]);
        out.add_edge(skel[i].first, skel[i].second, at_a, at_b);
    }
    return out;
}

Pmg essential_graph_oracle(const Dag& d, int cap) {
    const int n = d.vertex_count();
    check_cap(n, cap);
    auto target_skel = skeleton(d);
    auto target_colliders = unshielded_colliders(d);

    std::vector<EdgeTypeSet> acc(target_skel.size());
    enumerate_dags(
        n,
        [&](const Dag& cand) {
            if (skeleton(cand) != target_skel || unshielded_colliders(cand) != target_colliders) return;
            for (size_t i = 0; i < target_skel.size(); ++i) {
                auto [a, b] = target_skel[i];
                if (cand.has_edge(a, b))
                    acc[i].right = true;
                else
                    acc[i].left = true;
            }
        },
        cap);

    Pmg out(d.vertices().names());
    for (size_t i = 0; i < target_skel.size(); ++i) {
        auto [at_a, at_b] = edge_union(acc[i]);
        out.add_edge(target_skel[i].first, target_skel[i].second, at_a, at_b);
    }
    return out;
}

}  // namespace kcd
