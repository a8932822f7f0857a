#ifndef OUTER_LP_TESTS_ORACLE_HPP
#define OUTER_LP_TESTS_ORACLE_HPP

// Brute-force reference implementations. Everything here is computed straight
// from the definitions and shares no code path with the library beyond types.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "outer_lp/space.hpp"

namespace oracle {

using olp::Mask;
using olp::Rat;

/** Cheapest subcollection whose union contains a; enumerates all 2^|gens| subcollections. */
inline Rat cover_cost(const std::vector<olp::Generator>& gens, Mask a) {
    if (a == 0) return Rat(0);
    bool found = false;
    Rat best;
    const std::size_t k = gens.size();
    for (std::uint64_t sub = 1; sub < (std::uint64_t{1} << k); ++sub) {
        Mask uni = 0;
        Rat cost(0);
        for (std::size_t i = 0; i < k; ++i)
            if (sub >> i & 1) {
                uni |= gens[i].mask;
                cost += gens[i].weight;
            }
        if ((uni & a) == a && (!found || cost < best)) {
            best = cost;
            found = true;
        }
    }
    return best;
}

inline std::vector<Rat> measure_all(const std::vector<olp::Generator>& gens, int n) {
    std::vector<Rat> out(std::size_t{1} << n);
    for (Mask a = 0; a < out.size(); ++a) out[a] = cover_cost(gens, a);
    return out;
}

struct Space {
    int n;
    std::vector<double> omega;
    std::vector<Rat> mu, nu;
};

inline Space tabulate(const olp::FiniteSpace& s) {
    Space o{s.size(), {}, measure_all(s.mu_gen, s.size()), measure_all(s.nu_gen, s.size())};
    for (const auto& w : s.omega) o.omega.push_back(olp::to_double(w));
    return o;
}

inline double dbl(const Rat& r) { return static_cast<double>(r.numerator()) / r.denominator(); }

inline double lr_size(const Space& s, const std::vector<double>& f, Mask a, double r) {
    double acc = 0;
    for (int x = 0; x < s.n; ++x) {
        if (!(a >> x & 1)) continue;
        if (std::isinf(r))
            acc = std::max(acc, f[x]);
        else
            acc += std::pow(f[x], r) * s.omega[x];
    }
    if (std::isinf(r)) return acc;
    return std::pow(acc / dbl(s.nu[a]), 1.0 / r);
}

/** min level[B] such that every nonempty A outside B has size <= lambda. Returns (value, B). */
inline std::pair<Rat, Mask> super_level(const std::vector<double>& size, const std::vector<Rat>& level, int n,
                                        double lambda) {
    const Mask all = (Mask{1} << n) - 1;
    bool found = false;
    std::pair<Rat, Mask> best{Rat(0), 0};
    for (Mask b = 0; b <= all; ++b) {
        Mask rest = all & ~b;
        bool ok = true;
        for (Mask a = rest; a && ok; a = (a - 1) & rest)
            if (size[a] > lambda) ok = false;
        if (ok && (!found || level[b] < best.first)) {
            best = {level[b], b};
            found = true;
        }
    }
    return best;
}

/** Distinct size values together with 0, ascending. */
inline std::vector<double> candidates(const std::vector<double>& size) {
    std::set<double> c(size.begin(), size.end());
    c.insert(0.0);
    return {c.begin(), c.end()};
}

/** (integral of p l^{p-1} m(l) dl)^{1/p}, with m constant between consecutive candidates. */
inline double norm_from_sizes(const std::vector<double>& size, const std::vector<Rat>& level, int n, double p) {
    auto c = candidates(size);
    if (std::isinf(p)) return c.back();
    double acc = 0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
        acc += dbl(super_level(size, level, n, c[i]).first) * (std::pow(c[i + 1], p) - std::pow(c[i], p));
    return std::pow(acc, 1.0 / p);
}

inline std::vector<double> lr_sizes(const Space& s, const std::vector<double>& f, double r) {
    std::vector<double> out(std::size_t{1} << s.n, 0.0);
    for (Mask a = 1; a < out.size(); ++a) out[a] = lr_size(s, f, a, r);
    return out;
}

inline double inner_norm(const Space& s, const std::vector<double>& f, double q, double r) {
    return norm_from_sizes(lr_sizes(s, f, r), s.nu, s.n, q);
}

inline std::vector<double> outer_sizes(const Space& s, const std::vector<double>& f, double q, double r) {
    std::vector<double> out(std::size_t{1} << s.n, 0.0);
    for (Mask a = 1; a < out.size(); ++a) {
        std::vector<double> g(s.n, 0.0);
        for (int x = 0; x < s.n; ++x)
            if (a >> x & 1) g[x] = f[x];
        double in = inner_norm(s, g, q, r);
        out[a] = std::isinf(q) ? in : in * std::pow(dbl(s.mu[a]), -1.0 / q);
    }
    return out;
}

inline double double_norm(const Space& s, const std::vector<double>& f, double p, double q, double r) {
    return norm_from_sizes(outer_sizes(s, f, q, r), s.mu, s.n, p);
}

}  // namespace oracle

#endif
