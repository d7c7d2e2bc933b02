#include "kcd/kpc.hpp"

#include <algorithm>

namespace kcd {

namespace {

bool circle_at(const Pmg& g, int v, int other) { return g.mark_at(v, other) == Mark::Circle; }
bool tail_at(const Pmg& g, int v, int other) { return g.mark_at(v, other) == Mark::Tail; }
bool directed(const Pmg& g, int from, int to) {
    return g.adjacent(from, to) && tail_at(g, from, to) && g.arrow_at(to, from);
}

struct Orientation {
    const char* rule;
    int at;
    int other;
    Mark mark;
    std::vector<int> witness;
    bool overwrite = false;
};

}  // namespace

LearnerState::LearnerState(Pmg graph, SepsetTable sepsets, ConditioningBound bound, KpcOptions opts)
    : graph_(std::move(graph)), sepsets_(std::move(sepsets)), bound_(bound), opts_(opts) {}

bool LearnerState::orient(const char* rule, int at, int other, Mark mark, std::vector<int> witness,
                          bool allow_overwrite) {
    Mark cur = graph_.mark_at(at, other);
    if (cur == mark) return false;
    if (cur != Mark::Circle) {
        ++conflicts_;
        if (!(allow_overwrite && opts_.collider_conflict == ColliderConflict::Overwrite)) return false;
    }
    graph_.set_mark(at, other, mark);
    if (opts_.record_trace) trace_.push_back(RuleEvent{rule, at, other, mark, std::move(witness)});
    return true;
}

void orient_unshielded_colliders(LearnerState& state) {
    const Pmg& g = state.graph();
    const int n = g.vertex_count();
    std::vector<Orientation> ops;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (g.adjacent(a, b)) continue;
            if (!state.sepsets().has_entry(a, b) || state.sepsets().covered(a, b)) continue;
            VertexSet sep = state.sepsets().sepset(a, b);
            for (int c : members(g.adjacency(a) & g.adjacency(b))) {
                if (vs_contains(sep, c)) continue;
                ops.push_back({"UC", c, a, Mark::Arrow, {a, c, b}, true});
                ops.push_back({"UC", c, b, Mark::Arrow, {a, c, b}, true});
            }
        }
    }
    for (auto& op : ops) state.orient(op.rule, op.at, op.other, op.mark, std::move(op.witness), op.overwrite);
}

namespace {

std::vector<Orientation> scan_r1(const Pmg& g) {
    std::vector<Orientation> ops;
    const int n = g.vertex_count();
    for (int b = 0; b < n; ++b) {
        for (int c : members(g.adjacency(b))) {
            if (!circle_at(g, b, c)) continue;
            for (int a : members(g.adjacency(b))) {
                if (a == c || g.adjacent(a, c)) continue;
                if (!g.arrow_at(b, a)) continue;
                ops.push_back({"R1", b, c, Mark::Tail, {a, b, c}});
                ops.push_back({"R1", c, b, Mark::Arrow, {a, b, c}});
                break;
            }
        }
    }
    return ops;
}

std::vector<Orientation> scan_r2(const Pmg& g) {
    std::vector<Orientation> ops;
    const int n = g.vertex_count();
    for (int a = 0; a < n; ++a) {
        for (int c : members(g.adjacency(a))) {
            if (!circle_at(g, c, a)) continue;
            for (int b : members(g.adjacency(a) & g.adjacency(c))) {
                bool chain1 = directed(g, a, b) && g.arrow_at(c, b);
                bool chain2 = g.arrow_at(b, a) && directed(g, b, c);
                if (chain1 || chain2) {
                    ops.push_back({"R2", c, a, Mark::Arrow, {a, b, c}});
                    break;
                }
            }
        }
    }
    return ops;
}

std::vector<Orientation> scan_r3(const Pmg& g) {
    std::vector<Orientation> ops;
    const int n = g.vertex_count();
    for (int d = 0; d < n; ++d) {
        for (int b : members(g.adjacency(d))) {
            if (!circle_at(g, b, d)) continue;
            bool done = false;
            for (int a : members(g.adjacency(d) & g.adjacency(b))) {
                if (done) break;
                if (!circle_at(g, d, a) || !g.arrow_at(b, a)) continue;
                for (int c : members(g.adjacency(d) & g.adjacency(b))) {
                    if (c == a || g.adjacent(a, c)) continue;
                    if (!circle_at(g, d, c) || !g.arrow_at(b, c)) continue;
                    ops.push_back({"R3", b, d, Mark::Arrow, {a, d, c, b}});
                    done = true;
                    break;
                }
            }
        }
    }
    return ops;
}

// Discriminating-path rule. For every path <t, .., α, β, γ> whose interior
// vertices are colliders and parents of γ, with t and γ non-adjacent and a
// circle at β on the β-γ edge: β inside the recorded separating set of
// (t, γ) orients β -> γ; otherwise the triple closes as α <-> β <-> γ.
bool apply_r4(LearnerState& state) {
    const Pmg& g = state.graph();
    const int n = g.vertex_count();
    struct Match {
        int t, alpha, beta, gamma;
    };
    std::vector<Match> matches;
    for (int gamma = 0; gamma < n; ++gamma) {
        for (int beta : members(g.adjacency(gamma))) {
            if (!circle_at(g, beta, gamma)) continue;
            bool found = false;
            for (int alpha : members(g.adjacency(beta))) {
                if (found) break;
                if (alpha == gamma || !directed(g, alpha, gamma)) continue;
                if (!g.arrow_at(alpha, beta)) continue;
                std::vector<std::pair<int, VertexSet>> stack;
                stack.emplace_back(alpha, vs_single(alpha) | vs_single(beta) | vs_single(gamma));
                while (!stack.empty() && !found) {
                    auto [head, on_path] = stack.back();
                    stack.pop_back();
                    for (int x : members(g.adjacency(head) & ~on_path)) {
                        if (!g.arrow_at(head, x)) continue;
                        if (!g.adjacent(x, gamma)) {
                            matches.push_back({x, alpha, beta, gamma});
                            found = true;
                            break;
                        }
                        if (directed(g, x, gamma) && g.arrow_at(x, head)) stack.emplace_back(x, on_path | vs_single(x));
                    }
                }
            }
        }
    }
    bool changed = false;
    for (const auto& m : matches) {
        if (!state.sepsets().has_entry(m.t, m.gamma) || state.sepsets().covered(m.t, m.gamma)) continue;
        std::vector<int> witness{m.t, m.alpha, m.beta, m.gamma};
        if (vs_contains(state.sepsets().sepset(m.t, m.gamma), m.beta)) {
            bool applied = state.orient("R4", m.beta, m.gamma, Mark::Tail, witness);
            applied = state.orient("R4", m.gamma, m.beta, Mark::Arrow, witness) || applied;
            changed = changed || applied;
        } else {
            bool applied = state.orient("R4", m.alpha, m.beta, Mark::Arrow, witness);
            applied = state.orient("R4", m.beta, m.alpha, Mark::Arrow, witness) || applied;
            applied = state.orient("R4", m.beta, m.gamma, Mark::Arrow, witness) || applied;
            applied = state.orient("R4", m.gamma, m.beta, Mark::Arrow, witness) || applied;
            if (applied) state.count_r4_collider_branch();
            changed = changed || applied;
        }
    }
    return changed;
}

std::vector<Orientation> scan_r8(const Pmg& g) {
    std::vector<Orientation> ops;
    const int n = g.vertex_count();
    for (int a = 0; a < n; ++a) {
        for (int c : members(g.adjacency(a))) {
            if (!(circle_at(g, a, c) && g.arrow_at(c, a))) continue;  // a o-> c
            for (int b : members(g.adjacency(a) & g.adjacency(c))) {
                if (directed(g, a, b) && directed(g, b, c)) {
                    ops.push_back({"R8", a, c, Mark::Tail, {a, b, c}});
                    break;
                }
            }
        }
    }
    return ops;
}

// Uncovered potentially directed path from a to target whose second vertex is
// `first`; every edge lacks an arrowhead at its near end and consecutive
// triple endpoints are non-adjacent.
bool uncovered_pd_path(const Pmg& g, int a, int first, int target) {
    if (first == target) return true;
    struct Item {
        int prev, cur;
        VertexSet visited;
    };
    std::vector<Item> stack{{a, first, vs_single(a) | vs_single(first)}};
    while (!stack.empty()) {
        auto [prev, cur, visited] = stack.back();
        stack.pop_back();
        for (int w : members(g.adjacency(cur) & ~visited)) {
            if (g.mark_at(cur, w) == Mark::Arrow) continue;  // not potentially directed
            if (g.adjacent(prev, w)) continue;               // covered triple
            if (w == target) return true;
            stack.push_back({cur, w, visited | vs_single(w)});
        }
    }
    return false;
}

std::vector<Orientation> scan_r9(const Pmg& g) {
    std::vector<Orientation> ops;
    const int n = g.vertex_count();
    for (int a = 0; a < n; ++a) {
        for (int c : members(g.adjacency(a))) {
            if (!(circle_at(g, a, c) && g.arrow_at(c, a))) continue;  // a o-> c
            bool found = false;
            for (int b : members(g.adjacency(a))) {
                if (b == c || g.adjacent(b, c)) continue;
                if (g.mark_at(a, b) == Mark::Arrow) continue;
                if (uncovered_pd_path(g, a, b, c)) {
                    ops.push_back({"R9", a, c, Mark::Tail, {a, b, c}});
                    found = true;
                    break;
                }
            }
            (void)found;
        }
    }
    return ops;
}

std::vector<Orientation> scan_r10(const Pmg& g) {
    std::vector<Orientation> ops;
    const int n = g.vertex_count();
    for (int a = 0; a < n; ++a) {
        for (int c : members(g.adjacency(a))) {
            if (!(circle_at(g, a, c) && g.arrow_at(c, a))) continue;  // a o-> c
            // directed parents of c other than via a
            std::vector<int> parents;
            for (int u : members(g.adjacency(c)))
                if (u != a && directed(g, u, c)) parents.push_back(u);
            if (parents.size() < 2) continue;
            bool done = false;
            for (int x : members(g.adjacency(a))) {
                if (done) break;
                if (x == c || g.mark_at(a, x) == Mark::Arrow) continue;
                for (int y : members(g.adjacency(a))) {
                    if (done) break;
                    if (y == c || y == x || g.adjacent(x, y)) continue;
                    if (g.mark_at(a, y) == Mark::Arrow) continue;
                    bool x_reaches = false, y_reaches = false;
                    int x_target = -1, y_target = -1;
                    for (int d : parents) {
                        if (!x_reaches && uncovered_pd_path(g, a, x, d)) {
                            x_reaches = true;
                            x_target = d;
                        }
                        if (!y_reaches && uncovered_pd_path(g, a, y, d)) {
                            y_reaches = true;
                            y_target = d;
                        }
                    }
                    if (!x_reaches || !y_reaches) continue;
                    // need two distinct parent targets
                    if (x_target == y_target) {
                        bool distinct = false;
                        for (int d : parents) {
                            if (d != x_target && uncovered_pd_path(g, a, y, d)) {
                                y_target = d;
                                distinct = true;
                                break;
                            }
                            if (d != y_target && uncovered_pd_path(g, a, x, d)) {
                                x_target = d;
                                distinct = true;
                                break;
                            }
                        }
                        if (!distinct) continue;
                    }
                    ops.push_back({"R10", a, c, Mark::Tail, {a, x, y, c}});
                    done = true;
                }
            }
        }
    }
    return ops;
}

bool apply_batch(LearnerState& state, const std::vector<Orientation>& ops) {
    bool changed = false;
    for (const auto& op : ops)
        changed = state.orient(op.rule, op.at, op.other, op.mark, op.witness, op.overwrite) || changed;
    return changed;
}

bool run_r1_r4(LearnerState& state) {
    bool any = false;
    while (true) {
        bool changed = apply_batch(state, scan_r1(state.graph()));
        changed = apply_batch(state, scan_r2(state.graph())) || changed;
        changed = apply_batch(state, scan_r3(state.graph())) || changed;
        changed = apply_r4(state) || changed;
        if (!changed) break;
        any = true;
    }
    return any;
}

}  // namespace

void fci_orient(LearnerState& state) {
    run_r1_r4(state);
    while (true) {
        bool changed = apply_batch(state, scan_r8(state.graph()));
        changed = apply_batch(state, scan_r9(state.graph())) || changed;
        changed = apply_batch(state, scan_r10(state.graph())) || changed;
        if (!changed) break;
        run_r1_r4(state);
    }
}

bool apply_fci_rule(LearnerState& state, FciRule rule) {
    switch (rule) {
        case FciRule::R1: return apply_batch(state, scan_r1(state.graph()));
        case FciRule::R2: return apply_batch(state, scan_r2(state.graph()));
        case FciRule::R3: return apply_batch(state, scan_r3(state.graph()));
        case FciRule::R4: return apply_r4(state);
        case FciRule::R8: return apply_batch(state, scan_r8(state.graph()));
        case FciRule::R9: return apply_batch(state, scan_r9(state.graph()));
        case FciRule::R10: return apply_batch(state, scan_r10(state.graph()));
    }
    return false;
}

void apply_r11_r12(LearnerState& state) {
    const Pmg snapshot = state.graph();
    const int n = snapshot.vertex_count();
    std::vector<Orientation> ops;
    for (int a = 0; a < n; ++a) {
        bool incoming = false;
        for (int u : members(snapshot.adjacency(a)))
            if (snapshot.mark_at(a, u) == Mark::Arrow) incoming = true;
        if (incoming) continue;

        VertexSet b_set = 0, c_set = 0;
        for (int u : members(snapshot.adjacency(a))) {
            if (!circle_at(snapshot, a, u)) continue;
            if (snapshot.arrow_at(u, a))
                b_set |= vs_single(u);
            else if (circle_at(snapshot, u, a))
                c_set |= vs_single(u);
        }
        for (int b : members(b_set)) {
            bool clear = true;
            for (int c : members(c_set))
                if (snapshot.adjacent(b, c)) clear = false;
            if (clear) ops.push_back({"R11", a, b, Mark::Tail, {a, b}});
        }
        for (int c : members(c_set)) {
            bool clear = true;
            for (int other : members(c_set & ~vs_single(c)))
                if (snapshot.adjacent(c, other)) clear = false;
            if (clear) {
                ops.push_back({"R12", a, c, Mark::Tail, {a, c}});
                ops.push_back({"R12", c, a, Mark::Tail, {a, c}});
            }
        }
    }
    apply_batch(state, ops);
}

bool has_discriminating_circle(const Pmg& g) {
    const int n = g.vertex_count();
    for (int v = 0; v < n; ++v) {
        for (int y : members(g.adjacency(v))) {
            for (int u : members(g.adjacency(y))) {
                if (u == v || !directed(g, u, v)) continue;
                if (!g.arrow_at(u, y)) continue;
                std::vector<std::pair<int, VertexSet>> stack;
                stack.emplace_back(u, vs_single(u) | vs_single(y) | vs_single(v));
                while (!stack.empty()) {
                    auto [head, on_path] = stack.back();
                    stack.pop_back();
                    for (int x : members(g.adjacency(head) & ~on_path)) {
                        if (!g.arrow_at(head, x)) continue;
                        if (!g.adjacent(x, v)) {
                            if (circle_at(g, y, v)) return true;
                        } else if (directed(g, x, v) && g.arrow_at(x, head)) {
                            stack.emplace_back(x, on_path | vs_single(x));
                        }
                    }
                }
            }
        }
    }
    return false;
}

namespace {

// Sepset search plus edge removal (the learner's first two steps), shared by
// both scopes. Queries go through `independent`.
template <typename TestFn>
std::pair<Pmg, SepsetTable> learn_skeleton(const std::vector<std::string>& names, ConditioningBound eff,
                                           SearchScope scope, TestFn&& independent) {
    const int n = static_cast<int>(names.size());
    Pmg K = Pmg::complete_circles(names);
    SepsetTable sepsets(n, eff);

    if (scope == SearchScope::AllSubsets) {
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                std::vector<int> candidates;
                for (int v = 0; v < n; ++v)
                    if (v != a && v != b) candidates.push_back(v);
                std::optional<VertexSet> found;
                for_each_subset_upto(candidates, eff.k, [&](VertexSet cond) {
                    if (independent(a, b, cond)) {
                        found = cond;
                        return true;
                    }
                    return false;
                });
                if (found) {
                    sepsets.record_separated(a, b, *found);
                    K.remove_edge(a, b);
                } else {
                    sepsets.record_covered(a, b);
                }
            }
        }
        return {std::move(K), std::move(sepsets)};
    }

    // PC-stable style: level-wise over snapshots of the shrinking adjacency.
    for (int level = 0; level <= eff.k; ++level) {
        std::vector<VertexSet> snapshot(static_cast<size_t>(n));
        for (int v = 0; v < n; ++v) snapshot[static_cast<size_t>(v)] = K.adjacency(v);
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                if (!K.adjacent(a, b)) continue;
                std::optional<VertexSet> found;
                for (int side = 0; side < 2 && !found; ++side) {
                    int x = side == 0 ? a : b;
                    int y = side == 0 ? b : a;
                    std::vector<int> candidates = to_vector(snapshot[static_cast<size_t>(x)] & ~vs_single(y));
                    if (static_cast<int>(candidates.size()) < level) continue;
                    std::vector<int> idx(static_cast<size_t>(level));
                    for (int i = 0; i < level; ++i) idx[static_cast<size_t>(i)] = i;
                    const int m = static_cast<int>(candidates.size());
                    while (true) {
                        VertexSet s = 0;
                        for (int i : idx) s |= vs_single(candidates[static_cast<size_t>(i)]);
                        if (independent(a, b, s)) {
                            found = s;
                            break;
                        }
                        int pos = level - 1;
                        while (pos >= 0 && idx[static_cast<size_t>(pos)] == m - level + pos) --pos;
                        if (pos < 0) break;
                        ++idx[static_cast<size_t>(pos)];
                        for (int i = pos + 1; i < level; ++i)
                            idx[static_cast<size_t>(i)] = idx[static_cast<size_t>(i - 1)] + 1;
                    }
                }
                if (found) {
                    sepsets.record_separated(a, b, *found);
                    K.remove_edge(a, b);
                }
            }
        }
    }
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (!sepsets.has_entry(a, b)) sepsets.record_covered(a, b);
    return {std::move(K), std::move(sepsets)};
}

}  // namespace

LearnerResult kpc_learn(CiTester& tester, ConditioningBound bound, const KpcOptions& opts) {
    const int n = tester.variable_count();
    ConditioningBound eff{bound.effective(n)};
    LearnerStats stats;

    auto independent = [&](int a, int b, VertexSet cond) {
        ++stats.ci_queries;
        stats.max_cond_size = std::max(stats.max_cond_size, vs_size(cond));
        return tester.test(a, b, cond).independent;
    };

    auto [K, sepsets] = learn_skeleton(tester.variable_names(), eff, opts.scope, independent);
    Pmg after_skeleton = K;

    LearnerState state(std::move(K), std::move(sepsets), eff, opts);
    orient_unshielded_colliders(state);
    fci_orient(state);
    if (opts.verify_no_discriminating_circle && has_discriminating_circle(state.graph()))
        throw std::logic_error("discriminating path with a circle mark survived the FCI stage");

    if (opts.step5 == Step5Mode::SinglePass) {
        apply_r11_r12(state);
    } else if (opts.step5 == Step5Mode::Fixpoint) {
        while (true) {
            Pmg before = state.graph();
            apply_r11_r12(state);
            if (state.graph() == before) break;
        }
    }

    stats.conflicts = state.conflicts();
    stats.r4_collider_branch = state.r4_collider_branch();
    return LearnerResult{state.graph(), std::move(after_skeleton), state.sepsets(), state.trace(), stats};
}

namespace {

bool undirected(const Pmg& g, int a, int b) {
    return g.adjacent(a, b) && tail_at(g, a, b) && tail_at(g, b, a);
}

// Orient x -> y if the edge is still undirected; a standing opposite
// orientation counts as a conflict and wins.
bool pc_orient(Pmg& g, long& conflicts, int x, int y) {
    if (directed(g, x, y)) return false;
    if (!undirected(g, x, y)) {
        ++conflicts;
        return false;
    }
    g.set_mark(x, y, Mark::Tail);
    g.set_mark(y, x, Mark::Arrow);
    return true;
}

}  // namespace

void meek_closure(Pmg& g) {
    const int n = g.vertex_count();
    long ignored = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int a = 0; a < n; ++a) {
            for (int b : members(g.adjacency(a))) {
                if (!undirected(g, a, b)) continue;
                bool orient = false;
                // rule 1: z -> a, z and b non-adjacent
                for (int z : members(g.adjacency(a)))
                    if (directed(g, z, a) && z != b && !g.adjacent(z, b)) orient = true;
                // rule 2: a -> z -> b
                if (!orient)
                    for (int z : members(g.adjacency(a) & g.adjacency(b)))
                        if (directed(g, a, z) && directed(g, z, b)) orient = true;
                // rule 3: a - c -> b, a - d -> b with c, d non-adjacent
                if (!orient) {
                    auto common = g.adjacency(a) & g.adjacency(b);
                    for (int c : members(common)) {
                        if (orient) break;
                        if (!undirected(g, a, c) || !directed(g, c, b)) continue;
                        for (int d : members(common)) {
                            if (d == c || g.adjacent(c, d)) continue;
                            if (undirected(g, a, d) && directed(g, d, b)) {
                                orient = true;
                                break;
                            }
                        }
                    }
                }
                // rule 4: a - c, c -> d, d -> b, c and b non-adjacent, a and d adjacent
                if (!orient) {
                    for (int d : members(g.adjacency(a) & g.adjacency(b))) {
                        if (orient) break;
                        if (!directed(g, d, b)) continue;
                        for (int c : members(g.adjacency(a) & g.adjacency(d))) {
                            if (c == b || g.adjacent(c, b)) continue;
                            if (undirected(g, a, c) && directed(g, c, d)) {
                                orient = true;
                                break;
                            }
                        }
                    }
                }
                if (orient) changed = pc_orient(g, ignored, a, b) || changed;
            }
        }
    }
}

Pmg cpdag_of(const Dag& d) {
    Pmg g(d.vertices().names());
    for (auto [a, b] : skeleton(d)) g.add_edge(a, b, Mark::Tail, Mark::Tail);
    long conflicts = 0;
    for (const auto& t : unshielded_colliders(d)) {
        pc_orient(g, conflicts, t.a, t.c);
        pc_orient(g, conflicts, t.b, t.c);
    }
    meek_closure(g);
    return g;
}

LearnerResult pc_stable_learn(CiTester& tester, const PcOptions& opts) {
    const int n = tester.variable_count();
    LearnerStats stats;
    auto independent = [&](int a, int b, VertexSet cond) {
        ++stats.ci_queries;
        stats.max_cond_size = std::max(stats.max_cond_size, vs_size(cond));
        return tester.test(a, b, cond).independent;
    };

    Pmg K(tester.variable_names());
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) K.add_edge(a, b, Mark::Tail, Mark::Tail);
    SepsetTable sepsets(n, ConditioningBound{n >= 2 ? n - 2 : 0});

    int level = 0;
    while (true) {
        if (opts.max_cond_size >= 0 && level > opts.max_cond_size) break;
        std::vector<VertexSet> snapshot(static_cast<size_t>(n));
        bool any_candidate = false;
        for (int v = 0; v < n; ++v) snapshot[static_cast<size_t>(v)] = K.adjacency(v);
        for (int a = 0; a < n && !any_candidate; ++a)
            for (int b : members(snapshot[static_cast<size_t>(a)]))
                if (vs_size(snapshot[static_cast<size_t>(a)] & ~vs_single(b)) >= level) {
                    any_candidate = true;
                    break;
                }
        if (!any_candidate) break;

        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                if (!K.adjacent(a, b)) continue;
                std::optional<VertexSet> found;
                for (int side = 0; side < 2 && !found; ++side) {
                    int x = side == 0 ? a : b;
                    int y = side == 0 ? b : a;
                    std::vector<int> candidates = to_vector(snapshot[static_cast<size_t>(x)] & ~vs_single(y));
                    const int m = static_cast<int>(candidates.size());
                    if (m < level) continue;
                    std::vector<int> idx(static_cast<size_t>(level));
                    for (int i = 0; i < level; ++i) idx[static_cast<size_t>(i)] = i;
                    while (true) {
                        VertexSet s = 0;
                        for (int i : idx) s |= vs_single(candidates[static_cast<size_t>(i)]);
                        if (independent(a, b, s)) {
                            found = s;
                            break;
                        }
                        int pos = level - 1;
                        while (pos >= 0 && idx[static_cast<size_t>(pos)] == m - level + pos) --pos;
                        if (pos < 0) break;
                        ++idx[static_cast<size_t>(pos)];
                        for (int i = pos + 1; i < level; ++i)
                            idx[static_cast<size_t>(i)] = idx[static_cast<size_t>(i - 1)] + 1;
                    }
                }
                if (found) {
                    sepsets.record_separated(a, b, *found);
                    K.remove_edge(a, b);
                }
            }
        }
        ++level;
    }

    Pmg after_skeleton = K;

    // v-structures
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (K.adjacent(a, b) || !sepsets.has_entry(a, b)) continue;
            VertexSet sep = sepsets.sepset(a, b);
            for (int c : members(K.adjacency(a) & K.adjacency(b))) {
                if (vs_contains(sep, c)) continue;
                pc_orient(K, stats.conflicts, a, c);
                pc_orient(K, stats.conflicts, b, c);
            }
        }
    }
    meek_closure(K);

    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (!sepsets.has_entry(a, b)) sepsets.record_covered(a, b);

    return LearnerResult{std::move(K), std::move(after_skeleton), std::move(sepsets), {}, stats};
}

}  // namespace kcd
