#include <doctest.h>

#include <random>

#include "gen.hpp"
#include "outer_lp/conditions.hpp"
#include "outer_lp/settings.hpp"

using namespace olp;

TEST_CASE("power set assignment is a covering function with phi 1") {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 10; ++it) {
        int n = 1 + static_cast<int>(rng() % 6);
        auto s = gen::space(rng, n);
        FactoredMeasure mu(s, Which::mu);
        auto v = parent_function_check(mu, n, power_set_spec(n));
        REQUIRE(v.holds);
        REQUIRE(v.exhaustive);
    }
}

TEST_CASE("an over-priced cover is caught") {
    auto st = make_three_measures(3, 5);
    FactoredMeasure mu(st.space, Which::mu);
    std::vector<std::vector<Mask>> table(8);
    for (Mask a = 1; a < 8; ++a) table[a] = {a};
    table[0b001] = {0b111};
    std::vector<Mask> fam;
    for (Mask a = 1; a < 8; ++a) fam.push_back(a);
    auto v = parent_function_check(mu, 3, explicit_spec(3, fam, table, Rat(1)));
    CHECK_FALSE(v.holds);
    CHECK(v.property == "optimality");
    CHECK(v.set == 0b001);
    CHECK(mu.value(0b111) > mu.value(0b001));
}

TEST_CASE("non-monotone assignment is caught") {
    auto st = make_three_measures(3, 5);
    FactoredMeasure mu(st.space, Which::mu);
    std::vector<std::vector<Mask>> table(8);
    std::vector<Mask> fam;
    for (Mask a = 1; a < 8; ++a) {
        table[a] = {a};
        fam.push_back(a);
    }
    table[0b001] = {0b011};
    auto v = parent_function_check(mu, 3, explicit_spec(3, fam, table, Rat(100)));
    CHECK_FALSE(v.holds);
    CHECK(v.property == "monotonicity");
    CHECK(v.set == 0b001);
    CHECK(v.other == 0b101);
}

TEST_CASE("overlapping cover is an input error") {
    auto st = make_three_measures(2, 5);
    FactoredMeasure mu(st.space, Which::mu);
    std::vector<std::vector<Mask>> table{{}, {0b01}, {0b10}, {0b11, 0b01}};
    CHECK_THROWS_AS(parent_function_check(mu, 2, explicit_spec(2, {0b01, 0b10, 0b11}, table, Rat(1))), input_error);
}

TEST_CASE("three measures satisfy both conditions with K = 1") {
    for (unsigned seed = 1; seed <= 6; ++seed) {
        auto st = make_three_measures(1 + seed % 5, seed);
        int n = st.space.size();
        FactoredMeasure mu(st.space, Which::mu), nu(st.space, Which::nu);
        REQUIRE(parent_function_check(mu, n, st.spec).holds);
        auto c = canopy_check(nu, n, st.spec, Rat(1));
        REQUIRE(c.holds);
        REQUIRE(c.exhaustive);
        REQUIRE(crop_check(nu, n, st.spec, Rat(1)).holds);
        REQUIRE(crop_check(nu, n, power_set_spec(n), Rat(1)).holds);
    }
}

TEST_CASE("cartesian slabs satisfy both conditions with phi = K = 1") {
    for (unsigned seed = 1; seed <= 4; ++seed) {
        auto st = make_cartesian({2, 2, 2}, {}, seed);
        FactoredMeasure mu(st.space, Which::mu), nu(st.space, Which::nu);
        REQUIRE(parent_function_check(mu, 8, st.spec).holds);
        auto c = canopy_check(nu, 8, st.spec, Rat(1));
        REQUIRE(c.holds);
        REQUIRE(c.exhaustive);
        REQUIRE(crop_check(nu, 8, st.spec, Rat(1)).holds);
    }
}

TEST_CASE("unit nu with singletons fails the canopy condition at K = 1") {
    auto st = make_counterexample_first(2);
    FactoredMeasure nu(st.space, Which::nu);
    auto v = canopy_check(nu, 2, st.spec, Rat(1));
    REQUIRE_FALSE(v.holds);
    auto ext = v.collection;
    ext.push_back(v.set);
    CHECK(caratheodory_check(nu, v.collection, Rat(1)).holds);
    CHECK_FALSE(caratheodory_check(nu, ext, Rat(1)).holds);
    CHECK((v.set & st.spec.parent(v.collection.empty() ? 0 : v.collection[0])) == 0);
}

TEST_CASE("canopy verdict is monotone in K") {
    std::mt19937_64 rng(32);
    for (int it = 0; it < 8; ++it) {
        int n = 2 + static_cast<int>(rng() % 3);
        auto s = gen::space(rng, n);
        FactoredMeasure nu(s, Which::nu);
        auto spec = singleton_spec(n);
        bool prev = false;
        for (int k = 1; k <= 4; ++k) {
            bool h = canopy_check(nu, n, spec, Rat(k)).holds;
            if (prev) REQUIRE(h);
            prev = h;
        }
    }
}

TEST_CASE("a cover that keeps a selected member fails the crop condition") {
    // family {A, B}; every cover uses B, so B can never be cropped
    auto st = make_three_measures(2, 3);
    FactoredMeasure nu(st.space, Which::nu);
    std::vector<std::vector<Mask>> table{{0b10}, {0b01, 0b10}, {0b10}, {0b01, 0b10}};
    auto spec = explicit_spec(2, {0b01, 0b10}, table, Rat(100));
    auto v = crop_check(nu, 2, spec, Rat(1));
    REQUIRE_FALSE(v.holds);
    REQUIRE(std::find(v.collection.begin(), v.collection.end(), Mask{0b10}) != v.collection.end());
    auto c = spec.assign(v.set);
    CHECK(std::find(c.begin(), c.end(), Mask{0b10}) != c.end());
}

TEST_CASE("collection counts are Bell numbers") {
    for (int n = 0; n <= 6; ++n) {
        std::size_t count = 0;
        detail::for_each_disjoint_collection(n, [&](const std::vector<Mask>&) {
            ++count;
            return true;
        });
        CHECK(count == detail::disjoint_collection_count(n));
    }
    CHECK(detail::disjoint_collection_count(7) == 4140);
}
