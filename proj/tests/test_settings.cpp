#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "outer_lp/settings.hpp"

using namespace olp;

namespace {
bool close(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }
}  // namespace

TEST_CASE("one-point three-measure setting collapses to the value") {
    auto st = make_three_measures(1, 9);
    Evaluator ev(st.space);
    CHECK(close(ev.norm({0.7}, 2, SizeExpr::outer(3, 4)).value, 0.7));
}

TEST_CASE("three measures against the oracle") {
    for (unsigned seed = 1; seed <= 5; ++seed) {
        auto st = make_three_measures(5, seed);
        auto o = oracle::tabulate(st.space);
        Evaluator ev(st.space);
        std::vector<double> f{0.5, 2, 0, 1, 3};
        CHECK(close(ev.norm(f, 2, SizeExpr::outer(3, 2)).value, oracle::double_norm(o, f, 2, 3, 2)));
    }
}

TEST_CASE("cartesian measures") {
    auto unit = make_cartesian({1, 1, 1}, {{Rat(1)}, {Rat(1)}, {Rat(1)}}, 0);
    CHECK(unit.space.omega[0] == Rat(1));
    auto st = make_cartesian({2, 2, 2}, {}, 4);
    auto mu = build_measure_table(st.space, Which::mu);
    auto nu = build_measure_table(st.space, Which::nu);
    CartesianShape sh{2, 2, 2};
    std::vector<Rat> w3{st.space.mu_gen[0].weight, st.space.mu_gen[1].weight};
    for (int z = 0; z < 2; ++z) {
        Mask slab = 0;
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i) slab |= bit(sh.index(i, j, z));
        CHECK(mu.value(slab) == w3[z]);
    }
    Mask ell = bit(sh.index(0, 0, 0)) | bit(sh.index(1, 0, 0)) | bit(sh.index(0, 1, 0)) | bit(sh.index(0, 0, 1));
    CHECK(mu.value(ell) == oracle::cover_cost(st.space.mu_gen, ell));
    CHECK(nu.value(ell) == oracle::cover_cost(st.space.nu_gen, ell));
}

TEST_CASE("first family closed forms") {
    for (int m = 1; m <= 6; ++m)
        for (double r : {1.0, 2.0, 4.0}) {
            auto st = make_counterexample_first(m);
            Evaluator ev(st.space);
            Function f(m, 1.0);
            auto ref = first_family_refs(m, 3, r);
            CHECK(close(ev.norm(f, 1, SizeExpr::inner(r)).value, ref.single));
            CHECK(close(ev.norm(f, 1, SizeExpr::outer(1, r)).value, ref.dbl));
        }
    Evaluator one(make_counterexample_first(1).space);
    CHECK(close(one.norm({1}, 2, SizeExpr::outer(3, 2)).value, 1));
}

TEST_CASE("first family plateau list") {
    auto st = make_counterexample_first(5);
    Evaluator ev(st.space);
    auto pr = ev.profile(Function(5, 1.0), SizeExpr::outer(4, 1.5));
    auto ref = first_family_refs(5, 4, 1.5);
    REQUIRE(pr.breakpoints.size() == ref.bps.size());
    for (std::size_t i = 0; i < ref.bps.size(); ++i) CHECK(close(pr.breakpoints[i], ref.bps[i]));
    CHECK(pr.plateaus == ref.plateaus);
}

TEST_CASE("first family growth at m = 6") {
    Evaluator ev(make_counterexample_first(6).space);
    double v = ev.norm(Function(6, 1.0), 2, SizeExpr::outer(3, 2)).value;
    CHECK(v >= 0.5 * std::pow(6.0, 0.5 - 1.0 / 3 + 0.5));
}

TEST_CASE("second family closed forms") {
    CHECK_THROWS_AS(make_counterexample_second(3, 2), input_error);
    for (int m = 1; m <= 6; ++m)
        for (double r : {0.5, 1.0}) {
            auto st = make_counterexample_second(m, r);
            Evaluator ev(st.space);
            Function f(m, 1.0);
            auto ref = second_family_refs(m, r);
            CHECK(close(ev.norm(f, 1, SizeExpr::inner(r)).value, ref.single));
            auto got = ev.norm(f, 1, SizeExpr::outer(1, r));
            CHECK(close(got.value, ref.dbl));
            CHECK(got.value <= ref.dbl_bound);
            CHECK(got.profile.plateaus == ref.plateaus);
        }
    Evaluator ev(make_counterexample_second(3, 0.5).space);
    CHECK(close(ev.norm(Function(3, 1.0), 1, SizeExpr::inner(0.5)).value, 9));
}
