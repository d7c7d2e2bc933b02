#include <doctest.h>

#include "kcd/enumeration.hpp"
#include "kcd/kpc.hpp"
#include "support/builders.hpp"
#include "support/random_graphs.hpp"

using namespace kcd;
using namespace kcd::testing;

namespace {

Pmg learn_oracle(const Dag& truth, int k, KpcOptions opts = {}) {
    OracleCiTester tester(truth);
    opts.verify_no_discriminating_circle = true;
    return kpc_learn(tester, ConditioningBound{k}, opts).graph;
}

void check_edge(const Pmg& g, const char* a, const char* b, Mark at_a, Mark at_b) {
    const auto& t = g.vertices();
    int ia = t.require(a), ib = t.require(b);
    REQUIRE(g.adjacent(ia, ib));
    CHECK(g.mark_at(ia, ib) == at_a);
    CHECK(g.mark_at(ib, ia) == at_b);
}

}  // namespace

TEST_CASE("oracle run on the staged chain recovers all tails but one") {
    Pmg K = learn_oracle(staged_chain(), 0);
    CHECK(K.edge_count() == 6);
    check_edge(K, "a", "b", Mark::Tail, Mark::Arrow);
    check_edge(K, "u", "b", Mark::Tail, Mark::Arrow);
    check_edge(K, "v", "c", Mark::Tail, Mark::Arrow);
    check_edge(K, "a", "c", Mark::Tail, Mark::Arrow);
    check_edge(K, "u", "c", Mark::Tail, Mark::Arrow);
    check_edge(K, "b", "c", Mark::Circle, Mark::Arrow);
}

TEST_CASE("before the tail rules the staged chain is exactly the pag") {
    KpcOptions opts;
    opts.step5 = Step5Mode::Off;
    Pmg K = learn_oracle(staged_chain(), 0, opts);
    Pmg pag = pag_oracle(construct_k_closure(staged_chain(), ConditioningBound{0}).graph);
    CHECK(K == pag);
    for (const auto& e : K.edges()) {
        int head = e.at_b == Mark::Arrow ? e.b : e.a;
        CHECK(K.mark_at(head, head == e.b ? e.a : e.b) == Mark::Arrow);
    }
}

TEST_CASE("oracle run on the small chain keeps the undirected pair") {
    Pmg K = learn_oracle(small_chain_extra_parent(), 0);
    CHECK(K.edge_count() == 4);
    check_edge(K, "a", "b", Mark::Tail, Mark::Tail);     // tail rule on the circle pair
    check_edge(K, "a", "c", Mark::Circle, Mark::Arrow);  // stays open to a <-> c
    check_edge(K, "b", "c", Mark::Circle, Mark::Arrow);
    check_edge(K, "e", "c", Mark::Tail, Mark::Arrow);    // tail rule, no circle neighbors
}

TEST_CASE("oracle run on the twin-collider chain returns its closure") {
    Dag d = twin_collider_chain();
    Pmg K = learn_oracle(d, 0);
    CHECK(K == Pmg::from_mixed(construct_k_closure(d, ConditioningBound{0}).graph));
    check_edge(K, "c", "e", Mark::Arrow, Mark::Arrow);
}

TEST_CASE("unshielded collider orientation on the pruned twin-collider skeleton") {
    Dag d = twin_collider_chain();
    OracleCiTester tester(d);
    LearnerResult result = kpc_learn(tester, ConditioningBound{1});
    // at bound 1 the c-e pair separates on {d}; only two colliders remain
    const auto& t = result.graph.vertices();
    CHECK_FALSE(result.graph.adjacent(t.require("c"), t.require("e")));
    auto colliders = unshielded_colliders(result.graph);
    REQUIRE(colliders.size() == 2);
    CHECK(colliders[0] == ColliderTriple{t.require("a"), t.require("c"), t.require("d")});
    CHECK(colliders[1] == ColliderTriple{t.require("d"), t.require("e"), t.require("b")});
}

TEST_CASE("oracle run on the diamond leaves the incompleteness circle") {
    Pmg K = learn_oracle(diamond(), 1);
    CHECK(K.edge_count() == 5);
    check_edge(K, "d", "c", Mark::Tail, Mark::Tail);
    check_edge(K, "a", "d", Mark::Tail, Mark::Tail);
    check_edge(K, "a", "b", Mark::Circle, Mark::Arrow);
    check_edge(K, "c", "b", Mark::Circle, Mark::Arrow);
    check_edge(K, "d", "b", Mark::Circle, Mark::Arrow);

    // the enumeration oracle proves the d-b tail is invariant, so the learner
    // is sound but not complete here
    Pmg essential = k_essential_oracle(diamond(), ConditioningBound{1});
    const auto& t = essential.vertices();
    CHECK(essential.mark_at(t.require("d"), t.require("b")) == Mark::Tail);
    CHECK(essential.mark_at(t.require("b"), t.require("d")) == Mark::Arrow);
    CHECK(pmg_subset_of(essential, K));
}

TEST_CASE("first rule orients into an arrow-tail chain") {
    // a *-> b o-o c with a, c non-adjacent becomes a *-> b -> c
    Pmg g(std::vector<std::string>{"a", "b", "c"});
    g.add_edge(0, 1, Mark::Circle, Mark::Arrow);
    g.add_edge(1, 2, Mark::Circle, Mark::Circle);
    SepsetTable sepsets(3, ConditioningBound{0});
    LearnerState state(g, sepsets, ConditioningBound{0}, KpcOptions{});
    CHECK(apply_fci_rule(state, FciRule::R1));
    CHECK(state.graph().mark_at(1, 2) == Mark::Tail);
    CHECK(state.graph().mark_at(2, 1) == Mark::Arrow);
    CHECK_FALSE(apply_fci_rule(state, FciRule::R1));
}

TEST_CASE("second rule closes a directed chain onto the circle edge") {
    // a -> b, b *-> c, a *-o c: arrowhead lands at c
    Pmg g(std::vector<std::string>{"a", "b", "c"});
    g.add_edge(0, 1, Mark::Tail, Mark::Arrow);
    g.add_edge(1, 2, Mark::Circle, Mark::Arrow);
    g.add_edge(0, 2, Mark::Circle, Mark::Circle);
    SepsetTable sepsets(3, ConditioningBound{0});
    LearnerState state(g, sepsets, ConditioningBound{0}, KpcOptions{});
    CHECK(apply_fci_rule(state, FciRule::R2));
    CHECK(state.graph().mark_at(2, 0) == Mark::Arrow);
    CHECK(state.graph().mark_at(0, 2) == Mark::Circle);
}

TEST_CASE("third rule fires on the double-collider pattern") {
    // a *-> b <-* c, a *-o d o-* c, d *-o b, a and c non-adjacent
    Pmg g(std::vector<std::string>{"a", "b", "c", "d"});
    g.add_edge(0, 1, Mark::Circle, Mark::Arrow);
    g.add_edge(2, 1, Mark::Circle, Mark::Arrow);
    g.add_edge(0, 3, Mark::Circle, Mark::Circle);
    g.add_edge(2, 3, Mark::Circle, Mark::Circle);
    g.add_edge(3, 1, Mark::Circle, Mark::Circle);
    SepsetTable sepsets(4, ConditioningBound{0});
    LearnerState state(g, sepsets, ConditioningBound{0}, KpcOptions{});
    CHECK(apply_fci_rule(state, FciRule::R3));
    CHECK(state.graph().mark_at(1, 3) == Mark::Arrow);
}

TEST_CASE("eighth rule turns the circle source of a shielded chain into a tail") {
    Pmg g(std::vector<std::string>{"a", "b", "c"});
    g.add_edge(0, 1, Mark::Tail, Mark::Arrow);
    g.add_edge(1, 2, Mark::Tail, Mark::Arrow);
    g.add_edge(0, 2, Mark::Circle, Mark::Arrow);
    SepsetTable sepsets(3, ConditioningBound{0});
    LearnerState state(g, sepsets, ConditioningBound{0}, KpcOptions{});
    CHECK(apply_fci_rule(state, FciRule::R8));
    CHECK(state.graph().mark_at(0, 2) == Mark::Tail);
}

TEST_CASE("ninth rule uses an uncovered potentially directed detour") {
    // a o-> c plus a detour a o-o b o-o d o-o c with b, c non-adjacent
    Pmg g(std::vector<std::string>{"a", "b", "d", "c"});
    g.add_edge(0, 3, Mark::Circle, Mark::Arrow);   // a o-> c
    g.add_edge(0, 1, Mark::Circle, Mark::Circle);  // a o-o b
    g.add_edge(1, 2, Mark::Circle, Mark::Circle);  // b o-o d
    g.add_edge(2, 3, Mark::Circle, Mark::Circle);  // d o-o c
    SepsetTable sepsets(4, ConditioningBound{0});
    LearnerState state(g, sepsets, ConditioningBound{0}, KpcOptions{});
    CHECK(apply_fci_rule(state, FciRule::R9));
    CHECK(state.graph().mark_at(0, 3) == Mark::Tail);
}

TEST_CASE("tenth rule joins two parent-bound detours") {
    // b -> c <- d, a o-> c, single-edge detours a o-o b and a o-o d with
    // b, d non-adjacent
    Pmg g(std::vector<std::string>{"a", "b", "d", "c"});
    g.add_edge(0, 3, Mark::Circle, Mark::Arrow);
    g.add_edge(1, 3, Mark::Tail, Mark::Arrow);
    g.add_edge(2, 3, Mark::Tail, Mark::Arrow);
    g.add_edge(0, 1, Mark::Circle, Mark::Circle);
    g.add_edge(0, 2, Mark::Circle, Mark::Circle);
    SepsetTable sepsets(4, ConditioningBound{0});
    LearnerState state(g, sepsets, ConditioningBound{0}, KpcOptions{});
    CHECK(apply_fci_rule(state, FciRule::R10));
    CHECK(state.graph().mark_at(0, 3) == Mark::Tail);
}

TEST_CASE("discriminating-path colliders fall to colliders plus the first two rules") {
    // closure with u <-> y <-> v, u -> v, a -> u and a, v separable by {u}:
    // <a, u, y, v> is a discriminating path whose far node y is a collider,
    // and its arrowheads must arrive from unshielded colliders plus the first
    // two rules alone
    Dag d = make_dag({"a", "u", "y", "v", "p1", "p2", "r1", "r2"},
                     {{"a", "u"},
                      {"u", "v"},
                      {"p1", "u"},
                      {"p1", "y"},
                      {"p2", "u"},
                      {"p2", "y"},
                      {"r1", "y"},
                      {"r1", "v"},
                      {"r2", "y"},
                      {"r2", "v"}});
    const int n = d.vertex_count();
    const int k = 1;
    const auto& t = d.vertices();
    int u = t.require("u"), y = t.require("y"), v = t.require("v"), a = t.require("a");

    MixedGraph closure = construct_k_closure(d, ConditioningBound{k}).graph;
    REQUIRE(closure.has_bidirected(u, y));
    REQUIRE(closure.has_bidirected(y, v));
    REQUIRE(closure.has_directed(u, v));
    REQUIRE(closure.has_directed(a, u));
    REQUIRE_FALSE(closure.adjacent(a, v));

    OracleCiTester tester(d);
    auto independent = [&](int x1, int x2, VertexSet cond) { return tester.test(x1, x2, cond).independent; };
    // the first two learner stages by hand, then R1/R2 only
    Pmg K = Pmg::complete_circles(d.vertices().names());
    SepsetTable sepsets(n, ConditioningBound{k});
    for (int x1 = 0; x1 < n; ++x1)
        for (int x2 = x1 + 1; x2 < n; ++x2) {
            std::vector<int> cands;
            for (int w = 0; w < n; ++w)
                if (w != x1 && w != x2) cands.push_back(w);
            std::optional<VertexSet> hit;
            for_each_subset_upto(cands, k, [&](VertexSet cond) {
                if (independent(x1, x2, cond)) {
                    hit = cond;
                    return true;
                }
                return false;
            });
            if (hit) {
                sepsets.record_separated(x1, x2, *hit);
                K.remove_edge(x1, x2);
            } else {
                sepsets.record_covered(x1, x2);
            }
        }
    LearnerState state(K, sepsets, ConditioningBound{k}, KpcOptions{});
    orient_unshielded_colliders(state);
    while (apply_fci_rule(state, FciRule::R1) || apply_fci_rule(state, FciRule::R2)) {
    }
    CHECK(state.graph().mark_at(y, u) == Mark::Arrow);
    CHECK(state.graph().mark_at(y, v) == Mark::Arrow);

    // the full run never needs the discriminating collider branch
    OracleCiTester tester2(d);
    LearnerResult full = kpc_learn(tester2, ConditioningBound{k});
    CHECK(full.stats.r4_collider_branch == 0);
    CHECK(full.graph.mark_at(y, u) == Mark::Arrow);
    CHECK(full.graph.mark_at(y, v) == Mark::Arrow);
}

TEST_CASE("closures on five vertices admit no collider-ended discriminating path") {
    // negative certification for the bespoke instance above: the pattern
    // needs more room than five vertices
    for (int k = 0; k <= 2; ++k) {
        long hits = 0;
        enumerate_dags(5, [&](const Dag& d) {
            MixedGraph closure = construct_k_closure(d, ConditioningBound{k}).graph;
            for (int v = 0; v < 5; ++v)
                for (int y : members(closure.adjacency(v)))
                    for (int u : members(closure.adjacency(y))) {
                        if (u == v || !closure.has_directed(u, v)) continue;
                        if (!closure.arrow_at(u, y)) continue;
                        if (!(closure.arrow_at(y, u) && closure.arrow_at(y, v))) continue;
                        for (int x : members(closure.adjacency(u))) {
                            if (x == v || x == y || closure.adjacent(x, v)) continue;
                            if (closure.arrow_at(u, x)) ++hits;
                        }
                    }
        });
        CHECK(hits == 0);
    }
}

TEST_CASE("the discriminating sepset branch orients tails the other rules miss") {
    // x1 is a collider-parent between x3 and x2, so <x3, x1, x0, x2> is a
    // discriminating path; x0 sits in the recorded separating set of (x3, x2)
    // and the rule pins the tail at x0 that completes the pag
    Dag d = make_dag({"x0", "x1", "x2", "x3", "x4"},
                     {{"x0", "x1"}, {"x0", "x2"}, {"x1", "x2"}, {"x3", "x1"}, {"x3", "x4"}});
    OracleCiTester tester(d);
    KpcOptions opts;
    opts.step5 = Step5Mode::Off;
    opts.verify_no_discriminating_circle = true;
    LearnerResult result = kpc_learn(tester, ConditioningBound{2}, opts);
    const auto& t = result.graph.vertices();
    CHECK(result.graph.mark_at(t.require("x0"), t.require("x2")) == Mark::Tail);
    CHECK(result.graph.mark_at(t.require("x2"), t.require("x0")) == Mark::Arrow);
    CHECK(result.graph == pag_oracle(construct_k_closure(d, ConditioningBound{2}).graph));
    // with a ground-truth tester the collider branch never fires
    CHECK(result.stats.r4_collider_branch == 0);
}

TEST_CASE("oracle runs never take the discriminating collider branch") {
    Rng rng(246);
    for (int trial = 0; trial < 40; ++trial) {
        int n = rng.uniform_int(4, 6);
        int k = rng.uniform_int(0, 2);
        Dag d = random_dag_for_tests(n, rng, 0.5);
        OracleCiTester tester(d);
        LearnerResult result = kpc_learn(tester, ConditioningBound{k});
        CHECK(result.stats.r4_collider_branch == 0);
    }
}

TEST_CASE("tail rules skip vertices with incoming arrowheads") {
    // w -> a makes a ineligible, so a o-> b stays
    Pmg g(std::vector<std::string>{"w", "a", "b"});
    g.add_edge(0, 1, Mark::Tail, Mark::Arrow);
    g.add_edge(1, 2, Mark::Circle, Mark::Arrow);
    SepsetTable sepsets(3, ConditioningBound{0});
    LearnerState state(g, sepsets, ConditioningBound{0}, KpcOptions{});
    apply_r11_r12(state);
    CHECK(state.graph().mark_at(1, 2) == Mark::Circle);
}

TEST_CASE("learner output sits between the essential graph and the pag") {
    Rng rng(888);
    for (int trial = 0; trial < 30; ++trial) {
        int n = rng.uniform_int(3, 5);
        int k = rng.uniform_int(0, 2);
        Dag d = random_dag_for_tests(n, rng);
        Pmg K = learn_oracle(d, k);
        Pmg essential = k_essential_oracle(d, ConditioningBound{k});
        Pmg pag = pag_oracle(construct_k_closure(d, ConditioningBound{k}).graph);
        CHECK(pmg_subset_of(essential, K));
        CHECK(pmg_subset_of(K, pag));
    }
}

TEST_CASE("without the tail rules the learner equals the pag exactly") {
    Rng rng(414);
    for (int trial = 0; trial < 30; ++trial) {
        int n = rng.uniform_int(3, 5);
        int k = rng.uniform_int(0, 2);
        Dag d = random_dag_for_tests(n, rng);
        KpcOptions opts;
        opts.step5 = Step5Mode::Off;
        Pmg K = learn_oracle(d, k, opts);
        CHECK(K == pag_oracle(construct_k_closure(d, ConditioningBound{k}).graph));
    }
}

TEST_CASE("fixpoint tail rules stay inside the sandwich") {
    Rng rng(515);
    for (int trial = 0; trial < 15; ++trial) {
        int n = rng.uniform_int(3, 5);
        int k = rng.uniform_int(0, 2);
        Dag d = random_dag_for_tests(n, rng);
        KpcOptions fixpoint;
        fixpoint.step5 = Step5Mode::Fixpoint;
        Pmg K = learn_oracle(d, k, fixpoint);
        Pmg single = learn_oracle(d, k);
        Pmg essential = k_essential_oracle(d, ConditioningBound{k});
        CHECK(pmg_subset_of(essential, K));
        CHECK(pmg_subset_of(K, single));
    }
}

TEST_CASE("no conditioning query exceeds the bound and the budget holds") {
    Rng rng(616);
    Dag d = random_dag_for_tests(10, rng, 0.3);
    OracleCiTester oracle(d);
    CountingCiTester counting(oracle);
    kpc_learn(counting, ConditioningBound{2});
    CHECK(counting.max_cond_size() <= 2);
    // sum over pairs of C(8,0) + C(8,1) + C(8,2)
    long budget = 45L * (1 + 8 + 28);
    CHECK(counting.queries() <= budget);
}

TEST_CASE("replaying the trace reproduces the learned graph") {
    Rng rng(717);
    for (int trial = 0; trial < 10; ++trial) {
        Dag d = random_dag_for_tests(5, rng);
        OracleCiTester tester(d);
        KpcOptions opts;
        opts.record_trace = true;
        LearnerResult result = kpc_learn(tester, ConditioningBound{1}, opts);
        Pmg replay = result.after_skeleton;
        for (const auto& ev : result.trace) {
            CHECK(replay.mark_at(ev.at, ev.other) == Mark::Circle);  // only circles ever change
            replay.set_mark(ev.at, ev.other, ev.mark);
        }
        CHECK(replay == result.graph);

        OracleCiTester tester2(d);
        LearnerResult again = kpc_learn(tester2, ConditioningBound{1}, opts);
        CHECK(again.trace == result.trace);
        CHECK(again.graph == result.graph);
    }
}

TEST_CASE("pc-stable with an oracle recovers the essential graph") {
    Dag d = chain_with_common_parent();
    OracleCiTester tester(d);
    LearnerResult result = pc_stable_learn(tester);
    CHECK(result.graph == essential_graph_oracle(d));
    CHECK(result.graph == cpdag_of(d));
}

TEST_CASE("pc-stable on all-independent verdicts returns the empty graph") {
    Dag empty(std::vector<std::string>{"a", "b", "c", "d"});
    OracleCiTester tester(empty);
    LearnerResult result = pc_stable_learn(tester);
    CHECK(result.graph.edge_count() == 0);
}

TEST_CASE("full-bound learner adjacencies match pc-stable on random dags") {
    Rng rng(818);
    for (int trial = 0; trial < 20; ++trial) {
        int n = rng.uniform_int(3, 6);
        Dag d = random_dag_for_tests(n, rng);
        OracleCiTester t1(d), t2(d);
        Pmg kpc = kpc_learn(t1, ConditioningBound{n - 2}).graph;
        Pmg pc = pc_stable_learn(t2).graph;
        CHECK(skeleton(kpc) == skeleton(pc));
    }
}

TEST_CASE("pc-stable essential graphs agree with enumeration on random dags") {
    Rng rng(919);
    for (int trial = 0; trial < 15; ++trial) {
        Dag d = random_dag_for_tests(4, rng);
        OracleCiTester tester(d);
        CHECK(pc_stable_learn(tester).graph == essential_graph_oracle(d));
    }
}

TEST_CASE("neighbor-scoped search matches the all-subsets scope under the oracle") {
    Rng rng(212);
    for (int trial = 0; trial < 20; ++trial) {
        int n = rng.uniform_int(3, 6);
        int k = rng.uniform_int(0, 2);
        Dag d = random_dag_for_tests(n, rng);
        OracleCiTester t1(d), t2(d);
        KpcOptions neighbors;
        neighbors.scope = SearchScope::NeighborSubsets;
        Pmg via_all = kpc_learn(t1, ConditioningBound{k}).graph;
        Pmg via_neighbors = kpc_learn(t2, ConditioningBound{k}, neighbors).graph;
        CHECK(skeleton(via_all) == skeleton(via_neighbors));
    }
}
