#include <doctest.h>

#include <random>

#include "gen.hpp"
#include "outer_lp/decompose.hpp"
#include "outer_lp/settings.hpp"

using namespace olp;

namespace {

Function indicator(int n, Mask m, double c = 1.0) {
    Function f(n, 0.0);
    for_each_bit(m, [&](int x) { f[x] = c; });
    return f;
}

std::vector<Mask> nonempty(const Decomposition& d) {
    std::vector<Mask> out;
    for (const auto& lv : d.levels)
        if (lv.e) out.push_back(lv.e);
    return out;
}

void require_clean(const DecompositionReport& rep) {
    if (auto bad = rep.first_failure()) {
        INFO("property " << bad->name << " at k=" << bad->k << ": " << bad->lhs << " vs " << bad->rhs);
        CHECK(false);
    }
}

}  // namespace

TEST_CASE("constant function on a one-generator space has one interior level") {
    FiniteSpace s;
    s.points = {"a", "b", "c"};
    s.omega = {Rat(1), Rat(1), Rat(1)};
    s.mu_gen = {{0b111, Rat(1)}};
    s.nu_gen = {{0b111, Rat(1)}};
    Evaluator ev(s);
    // size on X is (3 * 1.5^2 / 1)^{1/2} = 2.598, in (2, 4]
    auto d = interior_decompose(ev, Function(3, 1.5), 2, 2);
    auto e = nonempty(d);
    REQUIRE(e.size() == 1);
    CHECK(e[0] == 0b111);
    CHECK(d.levels.front().k == 1);
    require_clean(verify_decomposition(ev, Function(3, 1.5), d, singleton_spec(3)));
}

TEST_CASE("first counterexample m=4, r=2, q=1: U_0 = X") {
    auto st = make_counterexample_first(4);
    Evaluator ev(st.space);
    Function f(4, 1.0);
    auto d = interior_decompose(ev, f, 1, 2);
    REQUIRE(nonempty(d).size() == 1);
    CHECK(d.levels.front().k == 0);
    CHECK(d.levels.front().e == 0b1111);
    require_clean(verify_decomposition(ev, f, d, st.spec));
}

TEST_CASE("interior decomposition properties on random spaces") {
    std::mt19937_64 rng(21);
    for (int it = 0; it < 40; ++it) {
        int n = 2 + static_cast<int>(rng() % 5);
        auto s = gen::space(rng, n);
        Evaluator ev(s);
        auto f = gen::function(rng, n);
        double q = 0.5 + (rng() % 4) * 0.5, r = 0.5 + (rng() % 4) * 0.5;
        auto d = interior_decompose(ev, f, q, r);
        auto rep = verify_decomposition(ev, f, d, singleton_spec(n));
        require_clean(rep);
        Mask cover = 0;
        for (auto e : nonempty(d)) cover |= e;
        CHECK(cover == detail::support(f));
        if (rep.norm_power > 0) {
            // sum_j 2^{jq} nu(U_j) <= ||f||^q <= 2^q sum_j 2^{jq} sum_{l>=j} nu(U_l)
            CHECK(rep.norm_power <= std::pow(2.0, q) * rep.double_sum * (1 + 1e-9));
        }
    }
}

TEST_CASE("single support point with the identity spec") {
    auto st = make_three_measures(4, 3);
    Evaluator ev(st.space);
    auto f = indicator(4, 0b0100, 3.0);
    for (auto v : {Variant::canopy, Variant::qGeqR, Variant::psi}) {
        auto d = exterior_decompose(ev, f, 2, 2, 1, st.spec, v);
        auto e = nonempty(d);
        REQUIRE(e.size() == 1);
        CHECK(e[0] == 0b0100);
        for (const auto& lv : d.levels)
            if (lv.e) CHECK(lv.f == 0b0100);
        require_clean(verify_decomposition(ev, f, d, st.spec));
    }
}

TEST_CASE("cartesian slab indicator") {
    auto st = make_cartesian({2, 2, 2}, {}, 4);
    Evaluator ev(st.space);
    Mask slab = st.spec.family[1];
    auto f = indicator(8, slab);
    for (auto v : {Variant::canopy, Variant::qGeqR, Variant::psi}) {
        auto d = exterior_decompose(ev, f, 2, 2, 1, st.spec, v);
        auto e = nonempty(d);
        REQUIRE(e.size() == 1);
        CHECK(e[0] == slab);
        if (v == Variant::psi)
            for (const auto& lv : d.levels) CHECK(lv.e2 == 0);
        require_clean(verify_decomposition(ev, f, d, st.spec));
    }
}

TEST_CASE("first counterexample, q = r = 1, qGeqR") {
    auto st = make_counterexample_first(4);
    Evaluator ev(st.space);
    Function f(4, 1.0);
    auto d = exterior_decompose(ev, f, 1, 1, 1, st.spec, Variant::qGeqR);
    // every set has size exactly 1, so X is taken at the level below 1
    auto e = nonempty(d);
    REQUIRE(e.size() == 1);
    CHECK(e[0] == 0b1111);
    CHECK(d.levels.front().k == -1);
    require_clean(verify_decomposition(ev, f, d, st.spec));
}

TEST_CASE("moving a point across levels breaks the size lower bound") {
    FiniteSpace s;
    s.points = {"a", "b"};
    s.omega = {Rat(1), Rat(1)};
    s.mu_gen = {{0b01, Rat(1)}, {0b10, Rat(1)}};
    s.nu_gen = s.mu_gen;
    Evaluator ev(s);
    Function f{5, 1};
    auto spec = singleton_spec(2);
    auto d = exterior_decompose(ev, f, 1, 1, 1, spec, Variant::canopy);
    require_clean(verify_decomposition(ev, f, d, spec));
    REQUIRE(d.levels.front().e == 0b01);
    auto bad = d;
    for (auto& lv : bad.levels) lv.e &= ~Mask{0b10};
    bad.levels.front().e |= 0b10;
    auto rep = verify_decomposition(ev, f, bad, spec);
    CHECK_FALSE(rep.pass);
    CHECK(rep.failed("superlevel"));
}

TEST_CASE("exterior variants on three-measure and cartesian settings") {
    std::mt19937_64 rng(22);
    for (int it = 0; it < 30; ++it) {
        Setting st = it % 2 ? make_three_measures(2 + static_cast<int>(rng() % 5), static_cast<unsigned>(rng()))
                            : make_cartesian({1 + static_cast<int>(rng() % 2), 2, 1 + static_cast<int>(rng() % 3)}, {},
                                             static_cast<unsigned>(rng()));
        Evaluator ev(st.space);
        auto f = gen::function(rng, st.space.size());
        double p = 1 + (rng() % 3) * 0.5, q = 1 + (rng() % 3) * 0.5, r = 0.5 + (rng() % 3) * 0.5;
        for (auto v : {Variant::canopy, Variant::qGeqR, Variant::psi}) {
            if (v == Variant::qGeqR && q < r) continue;
            auto d = exterior_decompose(ev, f, p, q, r, st.spec, v, st.k);
            auto rep = verify_decomposition(ev, f, d, st.spec);
            INFO(variant_name(v) << " p=" << p << " q=" << q << " r=" << r);
            require_clean(rep);
            if (v == Variant::psi) CHECK(d.base == doctest::Approx(2.0));
        }
    }
}

TEST_CASE("psi variant with an explicit base keeps the partition") {
    auto st = make_cartesian({2, 2, 2}, {}, 9);
    Evaluator ev(st.space);
    std::mt19937_64 rng(5);
    auto f = gen::function(rng, 8);
    auto d = exterior_decompose(ev, f, 2, 2, 2, st.spec, Variant::psi, Rat(1), 3.0);
    CHECK(d.base == 3.0);
    auto rep = verify_decomposition(ev, f, d, st.spec);
    require_clean(rep);
    CHECK_FALSE(rep.failed("partition"));
}

TEST_CASE("bad variant requests") {
    auto st = make_three_measures(3, 1);
    Evaluator ev(st.space);
    Function f(3, 1.0);
    CHECK_THROWS_AS(exterior_decompose(ev, f, 2, 1, 2, st.spec, Variant::qGeqR), input_error);
    CHECK_THROWS_AS(exterior_decompose(ev, f, 2, 1, 2, st.spec, Variant::interior), input_error);
    CHECK(interior_decompose(ev, Function(3, 0.0), 1, 1).levels.empty());
}
