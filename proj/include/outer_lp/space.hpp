#ifndef OUTER_LP_SPACE_HPP
#define OUTER_LP_SPACE_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace olp {

using Mask = std::uint64_t;
using Rat = boost::rational<std::int64_t>;

struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultExactLimit = 12;
inline constexpr int kMaxPoints = 64;

inline Mask bit(int i) { return Mask{1} << i; }
inline int popcount(Mask m) { return std::popcount(m); }
inline Mask full_mask(int n) { return n >= 64 ? ~Mask{0} : bit(n) - 1; }

template <class F>
void for_each_bit(Mask m, F&& f) {
    while (m) {
        f(std::countr_zero(m));
        m &= m - 1;
    }
}

inline double to_double(const Rat& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw capacity_error("measure value overflows int64");
    return out;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw capacity_error("measure value overflows int64");
    return out;
}

struct Generator {
    Mask mask = 0;
    Rat weight{1};
};

enum class Which { mu, nu };

inline const char* which_name(Which w) { return w == Which::mu ? "mu" : "nu"; }

/** Finite ground set with weight omega and the generating families of mu and nu. */
struct FiniteSpace {
    std::vector<std::string> points;
    std::vector<Rat> omega;
    std::vector<Generator> mu_gen;
    std::vector<Generator> nu_gen;

    int size() const { return static_cast<int>(points.size()); }
    Mask full() const { return full_mask(size()); }
    const std::vector<Generator>& gens(Which w) const { return w == Which::mu ? mu_gen : nu_gen; }

    void validate() const {
        const int n = size();
        if (n > kMaxPoints) throw capacity_error("ground set exceeds 64 points");
        if (static_cast<int>(omega.size()) != n) throw input_error("omega length differs from point count");
        for (const auto& w : omega)
            if (w <= 0) throw input_error("omega must be strictly positive");
        for (Which w : {Which::mu, Which::nu}) {
            Mask covered = 0;
            for (const auto& g : gens(w)) {
                if (g.weight <= 0) throw input_error(std::string(which_name(w)) + " pre-measure must be positive");
                if (g.mask == 0 || (g.mask & ~full())) throw input_error(std::string(which_name(w)) + " generator mask out of range");
                covered |= g.mask;
            }
            if (covered != full()) throw input_error(std::string("some point is not covered by a ") + which_name(w) + " generator");
        }
    }
};

inline std::int64_t common_denominator(const std::vector<Generator>& gens) {
    std::int64_t den = 1;
    for (const auto& g : gens) den = checked_mul(den / std::gcd(den, g.weight.denominator()), g.weight.denominator());
    return den;
}

/** Exact outer measure of every subset, stored as numerators over one denominator. */
class MeasureTable {
public:
    MeasureTable() = default;
    MeasureTable(Which which, int n, std::int64_t den, std::vector<std::int64_t> num, std::vector<std::int32_t> pick,
                 std::vector<Generator> gens)
        : which_(which), n_(n), den_(den), num_(std::move(num)), pick_(std::move(pick)), gens_(std::move(gens)) {}

    Which which() const { return which_; }
    int size() const { return n_; }
    std::int64_t den() const { return den_; }
    std::int64_t num(Mask a) const { return num_[a]; }
    Rat value(Mask a) const { return Rat(num_[a], den_); }
    double dvalue(Mask a) const { return static_cast<double>(num_[a]) / static_cast<double>(den_); }
    const std::vector<std::int64_t>& nums() const { return num_; }

    /** Generator indices of the minimal cover found by the dynamic program. */
    std::vector<int> cover(Mask a) const {
        std::vector<int> out;
        while (a) {
            int g = pick_[a];
            out.push_back(g);
            a &= ~gens_[g].mask;
        }
        return out;
    }

private:
    Which which_ = Which::mu;
    int n_ = 0;
    std::int64_t den_ = 1;
    std::vector<std::int64_t> num_;
    std::vector<std::int32_t> pick_;
    std::vector<Generator> gens_;
};

/** values[A] = min over generators S meeting A of sigma(S) + values[A \ S]. */
inline MeasureTable build_measure_table(int n, const std::vector<Generator>& gens, Which which,
                                        int limit = kDefaultExactLimit) {
    if (n > limit)
        throw capacity_error("exact mode needs n <= " + std::to_string(limit) + ", got " + std::to_string(n));
    const std::int64_t den = common_denominator(gens);
    std::vector<std::int64_t> w(gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i)
        w[i] = checked_mul(gens[i].weight.numerator(), den / gens[i].weight.denominator());
    const std::size_t size = std::size_t{1} << n;
    std::vector<std::int64_t> num(size, 0);
    std::vector<std::int32_t> pick(size, -1);
    constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max();
    for (Mask a = 1; a < size; ++a) {
        std::int64_t best = inf;
        std::int32_t arg = -1;
        for (std::size_t i = 0; i < gens.size(); ++i) {
            if (!(gens[i].mask & a)) continue;
            std::int64_t rest = num[a & ~gens[i].mask];
            if (rest == inf) continue;
            std::int64_t v = checked_add(w[i], rest);
            if (v < best) {
                best = v;
                arg = static_cast<std::int32_t>(i);
            }
        }
        num[a] = best;
        pick[a] = arg;
    }
    return MeasureTable(which, n, den, std::move(num), std::move(pick), gens);
}

inline MeasureTable build_measure_table(const FiniteSpace& space, Which which, int limit = kDefaultExactLimit) {
    return build_measure_table(space.size(), space.gens(which), which, limit);
}

inline Rat outer_measure(const MeasureTable& table, Mask a) { return table.value(a); }

/** Connected components of the hypergraph spanned by the given generators. */
inline std::vector<Mask> generator_components(int n, const std::vector<const std::vector<Generator>*>& families) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto* fam : families)
        for (const auto& g : *fam) {
            int first = std::countr_zero(g.mask);
            for_each_bit(g.mask, [&](int x) { parent[find(x)] = find(first); });
        }
    std::vector<Mask> byroot(n, 0);
    for (int x = 0; x < n; ++x) byroot[find(x)] |= bit(x);
    std::vector<Mask> out;
    for (Mask m : byroot)
        if (m) out.push_back(m);
    std::sort(out.begin(), out.end(), [](Mask a, Mask b) { return std::countr_zero(a) < std::countr_zero(b); });
    return out;
}

/** Packs the bits of a selected by comp into the low bits. */
inline Mask compress(Mask a, Mask comp) {
    Mask out = 0;
    int k = 0;
    for_each_bit(comp, [&](int x) {
        if (a & bit(x)) out |= bit(k);
        ++k;
    });
    return out;
}

inline Mask expand(Mask local, Mask comp) {
    Mask out = 0;
    int k = 0;
    for_each_bit(comp, [&](int x) {
        if (local & bit(k)) out |= bit(x);
        ++k;
    });
    return out;
}

inline std::vector<Generator> restrict_generators(const std::vector<Generator>& gens, Mask comp) {
    std::vector<Generator> out;
    for (const auto& g : gens)
        if (g.mask & comp) out.push_back({compress(g.mask, comp), g.weight});
    return out;
}

/**
 * Outer measure split over generator-connected components. No generator
 * crosses a component, so the measure of a set is the sum over components.
 */
class FactoredMeasure {
public:
    FactoredMeasure() = default;
    FactoredMeasure(const FiniteSpace& space, Which which, int limit = kDefaultExactLimit) : which_(which) {
        comps_ = generator_components(space.size(), {&space.gens(which)});
        den_ = common_denominator(space.gens(which));
        for (Mask c : comps_) {
            auto gens = restrict_generators(space.gens(which), c);
            tables_.push_back(build_measure_table(popcount(c), gens, which, limit));
            scale_.push_back(den_ / tables_.back().den());
        }
    }

    Which which() const { return which_; }
    std::int64_t den() const { return den_; }
    const std::vector<Mask>& components() const { return comps_; }
    std::int64_t num(Mask a) const {
        std::int64_t s = 0;
        for (std::size_t i = 0; i < comps_.size(); ++i)
            if (a & comps_[i]) s += tables_[i].num(compress(a, comps_[i])) * scale_[i];
        return s;
    }
    Rat value(Mask a) const { return Rat(num(a), den_); }
    double dvalue(Mask a) const { return static_cast<double>(num(a)) / static_cast<double>(den_); }

private:
    Which which_ = Which::mu;
    std::int64_t den_ = 1;
    std::vector<Mask> comps_;
    std::vector<MeasureTable> tables_;
    std::vector<std::int64_t> scale_;
};

struct CaratheodoryVerdict {
    bool holds = true;
    Mask witness = 0;
    Rat lhs{0};
    Rat rhs{0};
    bool exhaustive = true;
};

inline void require_disjoint(const std::vector<Mask>& coll) {
    Mask seen = 0;
    for (Mask a : coll) {
        if (a & seen) throw input_error("collection members are not pairwise disjoint");
        seen |= a;
    }
}

/**
 * Checks sum_A nu(U & A) <= K nu(U & union) for all U. Only U inside the
 * union matters, so U ranges over its subsets; above sample_above bits a
 * seeded sample of U is drawn instead. The reported witness maximises the
 * violation ratio, ties to the smallest mask.
 */
template <class Table>
CaratheodoryVerdict caratheodory_check(const Table& nu, const std::vector<Mask>& coll, const Rat& k,
                                       int sample_above = 20, int samples = 4096, unsigned seed = 1) {
    require_disjoint(coll);
    Mask uni = 0;
    for (Mask a : coll) uni |= a;
    CaratheodoryVerdict v;
    Rat worst{0};
    auto test = [&](Mask u) {
        std::int64_t lhs = 0;
        for (Mask a : coll)
            if (u & a) lhs += nu.num(u & a);
        std::int64_t rhs = nu.num(u);
        // lhs <= k * rhs  <=>  lhs * k.den <= k.num * rhs
        __int128 l = static_cast<__int128>(lhs) * k.denominator();
        __int128 r = static_cast<__int128>(k.numerator()) * rhs;
        if (l > r) {
            Rat ratio(lhs, rhs);
            if (v.holds || ratio > worst || (ratio == worst && u < v.witness)) {
                worst = ratio;
                v.holds = false;
                v.witness = u;
                v.lhs = Rat(lhs, nu.den());
                v.rhs = k * Rat(rhs, nu.den());
            }
        }
    };
    if (popcount(uni) <= sample_above) {
        for (Mask u = uni;; u = (u - 1) & uni) {
            if (u) test(u);
            if (!u) break;
        }
    } else {
        v.exhaustive = false;
        std::mt19937_64 rng(seed);
        for (int s = 0; s < samples; ++s) test(rng() & uni);
        test(uni);
    }
    return v;
}

/** Smallest K for which the collection is Caratheodory. */
template <class Table>
Rat caratheodory_constant(const Table& nu, const std::vector<Mask>& coll) {
    require_disjoint(coll);
    Mask uni = 0;
    for (Mask a : coll) uni |= a;
    Rat best{1};
    for (Mask u = uni; u; u = (u - 1) & uni) {
        std::int64_t lhs = 0;
        for (Mask a : coll)
            if (u & a) lhs += nu.num(u & a);
        Rat r(lhs, nu.num(u));
        if (r > best) best = r;
    }
    return best;
}

/** Both sides add up over nu components, so each component is checked on its own. */
inline CaratheodoryVerdict caratheodory_check(const FactoredMeasure& nu, const std::vector<Mask>& coll, const Rat& k,
                                              int sample_above = 20, int samples = 4096, unsigned seed = 1) {
    require_disjoint(coll);
    CaratheodoryVerdict out;
    Rat worst{0};
    for (Mask c : nu.components()) {
        std::vector<Mask> sub;
        for (Mask a : coll)
            if (a & c) sub.push_back(a & c);
        if (sub.empty()) continue;
        auto v = caratheodory_check<FactoredMeasure>(nu, sub, k, sample_above, samples, seed);
        out.exhaustive = out.exhaustive && v.exhaustive;
        if (v.holds) continue;
        Rat ratio = v.lhs * k / v.rhs;
        if (out.holds || ratio > worst || (ratio == worst && v.witness < out.witness)) {
            worst = ratio;
            out.holds = false;
            out.witness = v.witness;
            out.lhs = v.lhs;
            out.rhs = v.rhs;
        }
    }
    return out;
}

inline Rat caratheodory_constant(const FactoredMeasure& nu, const std::vector<Mask>& coll) {
    require_disjoint(coll);
    Rat best{1};
    for (Mask c : nu.components()) {
        std::vector<Mask> sub;
        for (Mask a : coll)
            if (a & c) sub.push_back(a & c);
        if (!sub.empty()) best = std::max(best, caratheodory_constant<FactoredMeasure>(nu, sub));
    }
    return best;
}

}  // namespace olp

#endif
