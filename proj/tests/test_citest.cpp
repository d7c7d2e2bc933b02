#include <doctest.h>

#include <cmath>

#include "kcd/citest.hpp"
#include "kcd/mathutil.hpp"
#include "kcd/rng.hpp"
#include "support/builders.hpp"

using namespace kcd;
using namespace kcd::testing;

namespace {

Dataset two_by_two(int n00, int n01, int n10, int n11) {
    Dataset d;
    d.names = {"a", "b"};
    d.kind = Dataset::Kind::Discrete;
    d.cardinality = {2, 2};
    d.icols.resize(2);
    auto push = [&](int a, int b, int count) {
        for (int i = 0; i < count; ++i) {
            d.icols[0].push_back(a);
            d.icols[1].push_back(b);
        }
    };
    push(0, 0, n00);
    push(0, 1, n01);
    push(1, 0, n10);
    push(1, 1, n11);
    d.rows = n00 + n01 + n10 + n11;
    return d;
}

}  // namespace

TEST_CASE("oracle verdicts mirror separation in the truth graph") {
    OracleCiTester tester(chain_with_common_parent());
    const auto& t = tester.truth().vertices();
    int a = t.require("a"), b = t.require("b"), c = t.require("c"), d = t.require("d");

    CHECK_FALSE(tester.test(a, b, vs_single(c)).independent);
    CiVerdict joint = tester.test(a, b, vs_single(c) | vs_single(d));
    CHECK(joint.independent);
    CHECK(joint.p_value == 1.0);
    // symmetric and repeatable
    CHECK(tester.test(b, a, vs_single(c)).independent == tester.test(a, b, vs_single(c)).independent);
    CHECK_THROWS_AS(tester.test(a, a, 0), CiError);
    CHECK_THROWS_AS(tester.test(a, b, vs_single(a)), CiError);
}

TEST_CASE("likelihood-ratio statistic matches the hand-computed table") {
    GSquaredCiTester tester(two_by_two(30, 10, 10, 50));
    CiVerdict v = tester.test(0, 1, 0);
    CHECK(v.statistic == doctest::Approx(35.54817676839005).epsilon(1e-12));
    CHECK(v.p_value == doctest::Approx(2.4881983020932095e-9).epsilon(1e-6));
    CHECK_FALSE(v.independent);
    CHECK_FALSE(v.degenerate);
}

TEST_CASE("a perfectly balanced table accepts independence") {
    GSquaredCiTester tester(two_by_two(25, 25, 25, 25));
    CiVerdict v = tester.test(0, 1, 0);
    CHECK(v.statistic == doctest::Approx(0.0));
    CHECK(v.p_value == doctest::Approx(1.0));
    CHECK(v.independent);
}

TEST_CASE("constant columns are independent by convention") {
    Dataset d;
    d.names = {"a", "b"};
    d.kind = Dataset::Kind::Discrete;
    d.cardinality = {2, 1};
    d.icols = {{0, 1, 0, 1}, {0, 0, 0, 0}};
    d.rows = 4;
    GSquaredCiTester tester(d);
    CiVerdict v = tester.test(0, 1, 0);
    CHECK(v.independent);
    CHECK(v.degenerate);
    CHECK(tester.degenerate_count() == 1);
}

TEST_CASE("empty conditioning strata are dropped from the dof") {
    // c takes codes 0 and 2 only; the declared cardinality is 3, so one
    // stratum is structurally empty and dof = (2-1)(2-1)*2.
    Dataset d;
    d.names = {"a", "b", "c"};
    d.kind = Dataset::Kind::Discrete;
    d.cardinality = {2, 2, 3};
    d.icols.resize(3);
    Rng rng(2024);
    for (int i = 0; i < 400; ++i) {
        int c = rng.bernoulli(0.5) ? 0 : 2;
        int a = rng.bernoulli(0.5) ? 1 : 0;
        int b = rng.bernoulli(0.3) ? 1 - a : a;
        d.icols[0].push_back(a);
        d.icols[1].push_back(b);
        d.icols[2].push_back(c);
    }
    d.rows = 400;
    GSquaredCiTester tester(d);
    CiVerdict v = tester.test(0, 1, vs_single(2));
    CHECK_FALSE(v.degenerate);
    CHECK(v.p_value == doctest::Approx(chi_square_upper_tail(v.statistic, 2.0)).epsilon(1e-12));
}

TEST_CASE("the expected-cell floor can disqualify every stratum") {
    CiTestConfig cfg;
    cfg.min_cell_expectation = 1000.0;
    GSquaredCiTester tester(two_by_two(30, 10, 10, 50), cfg);
    CiVerdict v = tester.test(0, 1, 0);
    CHECK(v.independent);
    CHECK(v.degenerate);
}

TEST_CASE("sampled dependence is detected and destroyed by shuffling") {
    Rng rng(99);
    Dataset dep;
    dep.names = {"a", "b"};
    dep.kind = Dataset::Kind::Discrete;
    dep.cardinality = {2, 2};
    dep.icols.resize(2);
    dep.rows = 10000;
    for (int i = 0; i < dep.rows; ++i) {
        int a = rng.bernoulli(0.5) ? 1 : 0;
        int b = rng.bernoulli(0.1) ? 1 - a : a;
        dep.icols[0].push_back(a);
        dep.icols[1].push_back(b);
    }
    GSquaredCiTester strong(dep);
    CHECK_FALSE(strong.test(0, 1, 0).independent);

    Dataset shuffled = dep;
    rng.shuffle(shuffled.icols[1]);
    GSquaredCiTester broken(shuffled);
    CHECK(broken.test(0, 1, 0).independent);
}

TEST_CASE("chi-square tail is monotone in the statistic and hits textbook points") {
    CHECK(chi_square_upper_tail(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi_square_upper_tail(5.991464547107979, 2) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi_square_upper_tail(7.814727903251179, 3) == doctest::Approx(0.05).epsilon(1e-9));
    double prev = 1.0;
    for (double x = 0.0; x < 30.0; x += 0.5) {
        double p = chi_square_upper_tail(x, 4);
        CHECK(p <= prev + 1e-15);
        prev = p;
    }
}

TEST_CASE("partial correlation matches the frozen example") {
    Dataset d;
    d.names = {"x", "y", "z"};
    d.kind = Dataset::Kind::Continuous;
    d.cols = {{0.10, -0.50, 1.10, 0.40, -1.30, 0.90, -0.20, 0.70},
              {1.20, 0.30, -0.70, 0.90, 0.20, -1.10, 0.60, -0.40},
              {-0.30, 0.80, 0.40, -1.20, 0.70, 0.10, -0.90, 1.00}};
    d.rows = 8;
    FisherZCiTester tester(d);

    CiVerdict marginal = tester.test(0, 1, 0);
    CHECK(marginal.statistic == doctest::Approx(-1.2291186017496247).epsilon(1e-12));
    CHECK(marginal.p_value == doctest::Approx(0.21902734172443522).epsilon(1e-12));
    CHECK(marginal.independent);

    CiVerdict partial = tester.test(0, 1, vs_single(2));
    CHECK(partial.statistic == doctest::Approx(-1.6269257319883572).epsilon(1e-12));
    CHECK(partial.p_value == doctest::Approx(0.1037528721355859).epsilon(1e-12));
    CHECK(partial.independent);
}

TEST_CASE("a duplicated regressor makes the correlation matrix singular") {
    Dataset d;
    d.names = {"x", "y", "x2"};
    d.kind = Dataset::Kind::Continuous;
    d.cols = {{0.1, 0.7, -0.4, 1.3, -0.8}, {0.9, -0.2, 0.5, -1.1, 0.3}, {0.1, 0.7, -0.4, 1.3, -0.8}};
    d.rows = 5;
    FisherZCiTester tester(d);
    CHECK_THROWS_AS(tester.test(0, 1, vs_single(2)), CiError);
}

TEST_CASE("constant continuous columns degrade to independence") {
    Dataset d;
    d.names = {"x", "y"};
    d.kind = Dataset::Kind::Continuous;
    d.cols = {{1.5, 1.5, 1.5, 1.5}, {0.2, -0.3, 0.8, 0.1}};
    d.rows = 4;
    FisherZCiTester tester(d);
    CHECK(tester.test(0, 1, 0).degenerate);
    CHECK(tester.degenerate_count() == 1);
}

TEST_CASE("rejection rate under the null stays near the significance level") {
    // x -> a, x -> b with no a-b edge: a and b are independent given x
    const int resamples = 1000;
    const int rows = 100;
    Rng master(4242);
    int rejections = 0;
    for (int r = 0; r < resamples; ++r) {
        Rng rng = master.substream(static_cast<std::uint64_t>(r));
        Dataset d;
        d.names = {"x", "a", "b"};
        d.kind = Dataset::Kind::Continuous;
        d.cols.assign(3, {});
        d.rows = rows;
        for (int i = 0; i < rows; ++i) {
            double x = rng.normal();
            d.cols[0].push_back(x);
            d.cols[1].push_back(1.4 * x + rng.normal());
            d.cols[2].push_back(-0.8 * x + rng.normal());
        }
        FisherZCiTester tester(d);
        if (!tester.test(1, 2, vs_single(0)).independent) ++rejections;
    }
    double rate = static_cast<double>(rejections) / resamples;
    double se3 = 3.0 * std::sqrt(0.05 * 0.95 / resamples);
    CHECK(std::fabs(rate - 0.05) <= se3);
}

TEST_CASE("alpha must be a proper probability") {
    CiTestConfig cfg;
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(GSquaredCiTester(two_by_two(1, 1, 1, 1), cfg), CiError);
}

TEST_CASE("backends insist on the matching dataset kind") {
    Dataset cont;
    cont.names = {"x"};
    cont.kind = Dataset::Kind::Continuous;
    cont.cols = {{0.5}};
    cont.rows = 1;
    CHECK_THROWS_AS(GSquaredCiTester{cont}, CiError);

    Dataset disc = two_by_two(1, 1, 1, 1);
    CHECK_THROWS_AS(FisherZCiTester{disc}, CiError);
}

TEST_CASE("csv io infers the kind and round trips") {
    Dataset d = read_csv("a,b\n0,1\n1,0\n1,1\n");
    CHECK(d.kind == Dataset::Kind::Discrete);
    CHECK(d.rows == 3);
    CHECK(d.cardinality == std::vector<int>{2, 2});

    Dataset c = read_csv("x,y\n0.5,1.25\n-0.75,2\n");
    CHECK(c.kind == Dataset::Kind::Continuous);
    CHECK(c.cols[0][1] == doctest::Approx(-0.75));

    Dataset round = read_csv(format_csv(d));
    CHECK(round.icols == d.icols);

    CHECK_THROWS_AS(read_csv(""), CiError);
    CHECK_THROWS_AS(read_csv("a,b\n1\n"), CiError);
    CHECK_THROWS_AS(read_csv("a,b\n1,2,3\n"), CiError);
    CHECK_THROWS_AS(read_csv("a,b\n1,oops\n"), CiError);
}
