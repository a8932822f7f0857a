#ifndef OUTER_LP_SETTINGS_HPP
#define OUTER_LP_SETTINGS_HPP

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "conditions.hpp"
#include "norms.hpp"

namespace olp {

/** A space together with a covering function and the Caratheodory parameter it is meant to satisfy. */
struct Setting {
    std::string kind;
    FiniteSpace space;
    CoveringFunctionSpec spec;
    Rat k{1};
};

inline Rat random_weight(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(1, 6), den(1, 4);
    return Rat(num(rng), den(rng));
}

inline std::vector<std::string> numbered_points(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("x" + std::to_string(i + 1));
    return out;
}

/** mu, nu, omega all singleton-generated with random positive rational weights. */
inline Setting make_three_measures(int n, unsigned seed, int limit = kDefaultExactLimit) {
    if (n < 1 || n > limit) throw capacity_error("three-measure setting needs 1 <= n <= exact limit");
    std::mt19937_64 rng(seed);
    Setting s;
    s.kind = "threeMeasures";
    s.space.points = numbered_points(n);
    for (int i = 0; i < n; ++i) {
        s.space.omega.push_back(n == 1 ? Rat(1) : random_weight(rng));
        s.space.mu_gen.push_back({bit(i), n == 1 ? Rat(1) : random_weight(rng)});
        s.space.nu_gen.push_back({bit(i), n == 1 ? Rat(1) : random_weight(rng)});
    }
    s.spec = singleton_spec(n);
    return s;
}

struct CartesianShape {
    int s1 = 1, s2 = 1, s3 = 1;
    int index(int i, int j, int z) const { return i + s1 * (j + s2 * z); }
    int size() const { return s1 * s2 * s3; }
};

/**
 * X1 x X2 x X3 with mu generated by slabs X1 x X2 x {z} (weight w3(z)), nu by
 * fibres X1 x {y} x {z} (weight w2(y) w3(z)) and omega the product weight.
 * Empty weight lists are filled at random from the seed.
 */
inline Setting make_cartesian(CartesianShape shape, std::vector<std::vector<Rat>> weights, unsigned seed,
                              int limit = kDefaultExactLimit) {
    const int n = shape.size();
    if (n < 1 || n > limit) throw capacity_error("cartesian setting needs 1 <= |X1||X2||X3| <= exact limit");
    std::mt19937_64 rng(seed);
    const int dims[3] = {shape.s1, shape.s2, shape.s3};
    weights.resize(3);
    for (int d = 0; d < 3; ++d) {
        if (weights[d].empty())
            for (int i = 0; i < dims[d]; ++i) weights[d].push_back(random_weight(rng));
        if (static_cast<int>(weights[d].size()) != dims[d]) throw input_error("weight list length differs from factor size");
    }
    Setting s;
    s.kind = "cartesian";
    for (int z = 0; z < shape.s3; ++z)
        for (int j = 0; j < shape.s2; ++j)
            for (int i = 0; i < shape.s1; ++i) {
                s.space.points.push_back("(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(z) + ")");
                s.space.omega.push_back(weights[0][i] * weights[1][j] * weights[2][z]);
            }
    std::vector<Mask> slabs;
    for (int z = 0; z < shape.s3; ++z) {
        Mask slab = 0;
        for (int j = 0; j < shape.s2; ++j) {
            Mask fibre = 0;
            for (int i = 0; i < shape.s1; ++i) fibre |= bit(shape.index(i, j, z));
            s.space.nu_gen.push_back({fibre, weights[1][j] * weights[2][z]});
            slab |= fibre;
        }
        s.space.mu_gen.push_back({slab, weights[2][z]});
        slabs.push_back(slab);
    }
    s.spec.rule = "cartesian";
    s.spec.family = slabs;
    s.spec.atoms = singleton_atoms(n);
    s.spec.assign = [slabs](Mask a) {
        std::vector<Mask> out;
        for (Mask e : slabs)
            if (e & a) out.push_back(e);
        return out;
    };
    return s;
}

/**
 * General space: each family gets 1..n+1 random generators, then every
 * uncovered point gets one more through it. Spec is the singleton one.
 */
inline Setting make_random_space(int n, unsigned seed, int limit = kDefaultExactLimit) {
    if (n < 1 || n > limit) throw capacity_error("random space needs 1 <= n <= exact limit");
    std::mt19937_64 rng(seed);
    Setting s;
    s.kind = "random";
    s.space.points = numbered_points(n);
    for (int i = 0; i < n; ++i) s.space.omega.push_back(random_weight(rng));
    std::uniform_int_distribution<int> count(1, n + 1);
    for (auto* gens : {&s.space.mu_gen, &s.space.nu_gen}) {
        const int k = count(rng);
        for (int i = 0; i < k; ++i)
            if (Mask m = rng() & full_mask(n)) gens->push_back({m, random_weight(rng)});
        Mask covered = 0;
        for (const auto& g : *gens) covered |= g.mask;
        for (int x = 0; x < n; ++x)
            if (!(covered >> x & 1)) {
                Mask m = bit(x) | (rng() & rng() & full_mask(n));
                gens->push_back({m, random_weight(rng)});
                covered |= m;
            }
    }
    s.spec = singleton_spec(n);
    return s;
}

/** About a sixth zeros and a sixth ones, the rest uniform on [0.1, 3). */
inline Function random_function(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, 5);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    Function f(n);
    for (auto& v : f) {
        int c = pick(rng);
        v = c == 0 ? 0.0 : c == 1 ? 1.0 : u(rng);
    }
    return f;
}

/** Counting omega and mu, nu = 1 on every nonempty set; f = 1 is the test function. */
inline Setting make_counterexample_first(int m) {
    if (m < 1 || m > kMaxPoints) throw input_error("first family needs 1 <= m <= 64");
    Setting s;
    s.kind = "ce1";
    s.space.points = numbered_points(m);
    for (int i = 0; i < m; ++i) {
        s.space.omega.push_back(Rat(1));
        s.space.mu_gen.push_back({bit(i), Rat(1)});
    }
    s.space.nu_gen = {{full_mask(m), Rat(1)}};
    s.spec = singleton_spec(m);
    s.k = Rat(m);
    return s;
}

/** Like the first family, but mu({x_i}) = 2^{beta (i-1)} with beta = 2/r. */
inline Setting make_counterexample_second(int m, double r) {
    if (!(r > 0) || r > 1) throw input_error("second family needs r in (0, 1]");
    if (m < 1 || m > kMaxPoints) throw input_error("second family needs 1 <= m <= 64");
    const double beta = 2 / r;
    if (beta != std::floor(beta) || beta * (m - 1) > 60) throw input_error("second family needs 2/r integral and small");
    Setting s = make_counterexample_first(m);
    s.kind = "ce2";
    for (int i = 0; i < m; ++i) s.space.mu_gen[i].weight = Rat(std::int64_t{1} << static_cast<int>(beta * i));
    return s;
}

/** Closed forms for the first family, f = 1. */
struct FirstFamilyRefs {
    double single;              // ||f||_{L^1_nu(l^r)} = m^{1/r}
    double dbl;                 // ||f||_{L^1_mu(l^1_nu(l^r))} = m, r >= 1
    std::vector<double> bps;    // i^alpha, alpha = 1/r - 1/q
    std::vector<Rat> plateaus;  // m - i + 1, then 0
};

inline FirstFamilyRefs first_family_refs(int m, double q, double r) {
    FirstFamilyRefs out{std::pow(m, 1 / r), static_cast<double>(m), {}, {}};
    const double alpha = 1 / r - 1 / q;
    for (int i = 1; i <= m; ++i) {
        out.bps.push_back(std::pow(i, alpha));
        out.plateaus.push_back(Rat(m - i + 1));
    }
    out.plateaus.push_back(Rat(0));
    return out;
}

/** Closed forms for the second family, f = 1, with the plateaus of the L^1_mu(l^1_nu(l^r)) profile. */
struct SecondFamilyRefs {
    double single;     // m^{1/r}
    double dbl;        // exact value from the plateau list
    double dbl_bound;  // m 2^beta / (2^beta - 1)
    std::vector<double> bps;
    std::vector<Rat> plateaus;
};

inline SecondFamilyRefs second_family_refs(int m, double r) {
    const int beta = static_cast<int>(2 / r);
    SecondFamilyRefs out{std::pow(m, 1 / r), 0, m * std::ldexp(1.0, beta) / (std::ldexp(1.0, beta) - 1), {}, {}};
    // plateau sum_{i<=j} 2^{beta(i-1)} on [2^{-beta j}, 2^{-beta(j-1)}), full sum below 2^{-beta(m-1)}
    auto partial = [&](int j) {
        std::int64_t s = 0;
        for (int i = 1; i <= j; ++i) s += std::int64_t{1} << (beta * (i - 1));
        return s;
    };
    for (int j = m; j >= 1; --j) {
        out.plateaus.push_back(Rat(partial(j)));
        out.bps.push_back(std::ldexp(1.0, -beta * (j - 1)));
    }
    out.plateaus.push_back(Rat(0));
    double prev = 0;
    for (std::size_t i = 0; i < out.bps.size(); ++i) {
        out.dbl += to_double(out.plateaus[i]) * (out.bps[i] - prev);
        prev = out.bps[i];
    }
    return out;
}

}  // namespace olp

#endif
