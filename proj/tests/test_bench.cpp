#include <doctest.h>

#include <sstream>

#include "kcd/bench.hpp"
#include "kcd/kpc.hpp"
#include "support/builders.hpp"

using namespace kcd;
using namespace kcd::testing;

TEST_CASE("random dags respect the edge budget and the seed") {
    Rng rng(1);
    double total = 0;
    for (int i = 0; i < 300; ++i) {
        Dag d = random_dag(10, 15, rng);
        CHECK(d.is_acyclic());
        CHECK(d.edge_count() <= 15);
        total += d.edge_count();
    }
    // expected edge count is tuned to the budget
    CHECK(total / 300 > 9.0);
    CHECK(total / 300 <= 15.0);

    Rng r1(42), r2(42);
    CHECK(random_dag(8, 10, r1) == random_dag(8, 10, r2));

    Rng r3(7);
    CHECK(random_dag(6, 0, r3).edge_count() == 0);
    CHECK_THROWS_AS(random_dag(4, 7, r3), GraphError);
}

TEST_CASE("cpt rows are simplex points") {
    Rng rng(3);
    Dag d = random_dag(5, 6, rng);
    BayesNet bn = random_bayesnet(d, 3, rng);
    for (int v = 0; v < 5; ++v) {
        size_t expected_rows = 1;
        for (int p : members(d.parents(v))) {
            (void)p;
            expected_rows *= 3;
        }
        CHECK(bn.cpt[static_cast<size_t>(v)].size() == expected_rows);
        for (const auto& row : bn.cpt[static_cast<size_t>(v)]) {
            double sum = 0;
            for (double x : row) {
                CHECK(x >= 0.0);
                sum += x;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("deterministic cpts force deterministic columns") {
    Dag root(std::vector<std::string>{"a"});
    BayesNet always_one{root, {2}, {{{0.0, 1.0}}}};
    Rng rng(5);
    Dataset d = sample_discrete(always_one, 50, rng);
    for (int v : d.icols[0]) CHECK(v == 1);

    Dag pair_dag(std::vector<std::string>{"a", "b"});
    pair_dag.add_edge(0, 1);
    BayesNet copy{pair_dag, {2, 2}, {{{0.5, 0.5}}, {{1.0, 0.0}, {0.0, 1.0}}}};
    Rng rng2(6);
    Dataset d2 = sample_discrete(copy, 200, rng2);
    CHECK(d2.icols[0] == d2.icols[1]);
}

TEST_CASE("sampled chain data carries the right conditional independences") {
    Dag chain = make_dag({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
    Rng rng(11);
    BayesNet bn = random_bayesnet(chain, 2, rng);
    Dataset data = sample_discrete(bn, 50000, rng);
    GSquaredCiTester tester(data);
    CHECK_FALSE(tester.test(0, 1, 0).independent);           // a and b dependent
    CHECK(tester.test(0, 2, vs_single(1)).independent);      // a and c independent given b
}

TEST_CASE("linear sampling is deterministic and respects the chain structure") {
    Dag chain = make_dag({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
    Rng r1(13), r2(13);
    LinearScm s1 = random_linear_scm(chain, -3, 3, r1);
    LinearScm s2 = random_linear_scm(chain, -3, 3, r2);
    CHECK(s1.coef == s2.coef);
    Dataset d1 = sample_linear(s1, 500, r1);
    Dataset d2 = sample_linear(s2, 500, r2);
    CHECK(d1.cols == d2.cols);
}

TEST_CASE("a perfect prediction scores one across the board") {
    Dag d = staged_chain();
    ScoreReport r = score(Pmg::from_dag(d), d, ScoreReference::TrueDag);
    CHECK(r.arrowhead_f1() == 1.0);
    CHECK(r.tail_f1() == 1.0);
    CHECK(r.skeleton_f1() == 1.0);
}

TEST_CASE("an empty prediction scores zero skeleton against a non-empty truth") {
    Dag d = staged_chain();
    Pmg empty(d.vertices().names());
    ScoreReport r = score(empty, d, ScoreReference::TrueDag);
    CHECK(r.skeleton_f1() == 0.0);
    CHECK(r.arrowhead_f1() == 0.0);
}

TEST_CASE("learner output on the staged chain scores the hand-counted report") {
    // learned graph: a->b, u->b, v->c, a->c, u->c, b o-> c against the truth
    // dag {a->b, b->c, u->b, v->c}
    Dag truth = staged_chain();
    OracleCiTester tester(truth);
    Pmg learned = kpc_learn(tester, ConditioningBound{0}).graph;
    ScoreReport r = score(learned, truth, ScoreReference::TrueDag);
    // skeleton: 4 shared pairs, 2 extra, 0 missing
    CHECK(r.skeleton.tp == 4);
    CHECK(r.skeleton.fp == 2);
    CHECK(r.skeleton.fn == 0);
    // arrowheads: b (from a), c (from b), b (from u), c (from v) are hits;
    // the closure edges a->c and u->c predict arrowheads the dag lacks
    CHECK(r.arrowhead.tp == 4);
    CHECK(r.arrowhead.fp == 2);
    CHECK(r.arrowhead.fn == 0);
    // tails: a, u, v sides are hits; a and u on the closure edges are false;
    // the circle at b misses the true tail of b->c
    CHECK(r.tail.tp == 3);
    CHECK(r.tail.fp == 2);
    CHECK(r.tail.fn == 1);
    CHECK(r.skeleton_f1() == doctest::Approx(0.8));
    CHECK(r.arrowhead_f1() == doctest::Approx(0.8));
    CHECK(r.tail_f1() == doctest::Approx(2.0 * 3 / (2.0 * 3 + 2 + 1)));
}

TEST_CASE("essential-graph reference treats reversible edges as tails") {
    Dag chain = make_dag({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}});
    // the essential graph of a chain is fully undirected
    Pmg pred(chain.vertices().names());
    pred.add_edge(0, 1, Mark::Tail, Mark::Tail);
    pred.add_edge(1, 2, Mark::Tail, Mark::Tail);
    ScoreReport r = score(pred, chain, ScoreReference::EssentialGraph);
    CHECK(r.tail_f1() == 1.0);
    CHECK(r.arrowhead_f1() == 1.0);  // zero arrowheads on both sides
    CHECK(r.skeleton_f1() == 1.0);
}

TEST_CASE("config parsing covers the keys and rejects bad values") {
    ExperimentConfig cfg = parse_experiment_config(
        "# comment\n"
        "n = 6\n"
        "max_edges = 7\n"
        "states = 3\n"
        "model = cpt\n"
        "N = 50, 100\n"
        "k = 0,1\n"
        "learners = kpc, pc-stable\n"
        "repetitions = 4\n"
        "datasets = 2\n"
        "seed = 99\n"
        "alpha = 0.01\n"
        "reference = dag\n");
    CHECK(cfg.n == 6);
    CHECK(cfg.sample_sizes == std::vector<int>{50, 100});
    CHECK(cfg.ks == std::vector<int>{0, 1});
    CHECK(cfg.reference == ScoreReference::TrueDag);
    CHECK(cfg.alpha == doctest::Approx(0.01));

    CHECK_THROWS_AS(parse_experiment_config("nonsense\n"), GraphError);
    CHECK_THROWS_AS(parse_experiment_config("model = guess\n"), GraphError);
    CHECK_THROWS_AS(parse_experiment_config("n = 1\n"), GraphError);
    CHECK_THROWS_AS(parse_experiment_config("learners = magic\n"), GraphError);
}

TEST_CASE("experiment emits one row per instance, dataset, learner, and size") {
    ExperimentConfig cfg;
    cfg.n = 5;
    cfg.max_edges = 5;
    cfg.repetitions = 2;
    cfg.datasets = 2;
    cfg.sample_sizes = {40, 60};
    cfg.ks = {0, 1};
    cfg.learners = {"kpc", "pc-stable"};
    cfg.seed = 31337;

    std::ostringstream out;
    run_experiment(cfg, out);
    std::istringstream lines(out.str());
    std::string line;
    int rows = 0;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "instance,dataset,learner,k,N,arrowhead_f1,tail_f1,skeleton_f1,errors");
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    // 2 instances x 2 datasets x 2 sizes x (2 kpc configs + pc-stable)
    CHECK(rows == 2 * 2 * 2 * 3);

    std::ostringstream again;
    run_experiment(cfg, again);
    CHECK(again.str() == out.str());
}

TEST_CASE("zero repetitions yield only the header") {
    ExperimentConfig cfg;
    cfg.n = 4;
    cfg.max_edges = 3;
    cfg.repetitions = 0;
    std::ostringstream out;
    run_experiment(cfg, out);
    CHECK(out.str() == "instance,dataset,learner,k,N,arrowhead_f1,tail_f1,skeleton_f1,errors\n");
}

TEST_CASE("threaded runs produce the serial output") {
    ExperimentConfig cfg;
    cfg.n = 5;
    cfg.max_edges = 5;
    cfg.repetitions = 3;
    cfg.datasets = 1;
    cfg.sample_sizes = {30};
    cfg.ks = {1};
    cfg.seed = 2718;

    std::ostringstream serial, threaded;
    run_experiment(cfg, serial, 1);
    run_experiment(cfg, threaded, 3);
    CHECK(serial.str() == threaded.str());
}
