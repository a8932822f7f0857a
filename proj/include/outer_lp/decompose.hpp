#ifndef OUTER_LP_DECOMPOSE_HPP
#define OUTER_LP_DECOMPOSE_HPP

#include <cmath>
#include <string>
#include <vector>

#include "conditions.hpp"
#include "norms.hpp"

namespace olp {

enum class Variant { interior, canopy, qGeqR, psi };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::interior: return "interior";
        case Variant::canopy: return "canopy";
        case Variant::qGeqR: return "qGeqR";
        case Variant::psi: return "psi";
    }
    return "?";
}

/** One level k. For the interior variant e is U_j and f is V_j. */
struct Level {
    int k = 0;
    Mask e = 0;
    Mask f = 0;
    std::vector<Mask> picks;  // selected sets in order of selection
    Mask e1 = 0, e2 = 0;      // psi only
    bool fallback = false;    // qGeqR: no single set met both conditions
};

struct Decomposition {
    Variant variant = Variant::interior;
    double base = 2;
    double p = 1, q = 1, r = 1;
    Rat phi{1}, k{1};
    std::vector<Level> levels;  // descending k

    SizeExpr size() const { return variant == Variant::interior ? SizeExpr::inner(r) : SizeExpr::outer(q, r); }
    Which which() const { return variant == Variant::interior ? Which::nu : Which::mu; }
    /** Exponent of the outer integral: q for the interior variant, p otherwise. */
    double outer_exponent() const { return variant == Variant::interior ? q : p; }
};

/** c in the size lower bound, and (c, C) in the optimal-covering bound. */
struct DecompositionConstants {
    double c_sup = 1, c_opt = 1, C_opt = 1;
};

/** Quasi-triangle constant of L^q_nu(l^r) for two disjointly supported summands. */
inline double quasi_triangle(double q, double r) { return std::pow(2.0, 1 / r) * std::max(1.0, std::pow(2.0, 1 / q - 1)); }

inline DecompositionConstants decomposition_constants(const Decomposition& d) {
    DecompositionConstants c;
    if (d.variant == Variant::interior) {
        c.c_opt = 0.25;
        c.C_opt = std::pow(4.0, d.r) / (1 - std::pow(2.0, -d.r));
        return c;
    }
    const double cd = quasi_triangle(d.q, d.r);
    const double kk = d.variant == Variant::qGeqR ? 1.0 : to_double(d.k);
    c.c_sup = std::pow(kk, -1 / d.q);
    c.c_opt = 1 / (2 * cd);
    c.C_opt = kk * std::pow(2 * d.base * cd, d.q);
    return c;
}

namespace detail {

inline constexpr double kRel = 1e-9;
inline bool above(double x, double t) { return x > t * (1 + kRel); }
inline bool within(double x, double t) { return x <= t * (1 + kRel); }

inline Mask support(const Function& f) {
    Mask s = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] > 0) s |= bit(static_cast<int>(i));
    return s;
}

/** Size-maximizing A inside region with size above t, smallest mask on ties; 0 if none. */
inline Mask pick(const std::vector<double>& sizes, Mask region, double t) {
    Mask best = 0;
    double bv = 0;
    for (Mask a = region; a; a = (a - 1) & region)
        if (above(sizes[a], t) && sizes[a] >= bv) {
            best = a;
            bv = sizes[a];
        }
    return best;
}

inline int top_level(double sup, double base) {
    int k = static_cast<int>(std::ceil(std::log(sup) / std::log(base)));
    while (!within(sup, std::pow(base, k))) ++k;
    while (within(sup, std::pow(base, k - 1))) --k;
    return k;
}

inline constexpr int kLevelBudget = 4000;

}  // namespace detail

/** Pairwise disjoint U_j, greedy top-down: at each level keep taking the largest-size set that is still free. */
inline Decomposition interior_decompose(const Evaluator& ev, const Function& f, double q, double r) {
    check_exponent(q, "q");
    check_exponent(r, "r");
    if (std::isinf(q) || std::isinf(r)) throw input_error("interior decomposition needs finite q and r");
    Decomposition d;
    d.variant = Variant::interior;
    d.q = q;
    d.r = r;
    const auto s = d.size();
    auto sizes = ev.all_sizes(f, s);
    auto msub = sizes;
    detail::subset_max(msub, ev.size());
    const double sup = msub.back();
    if (sup <= 0) return d;
    const Mask supp = detail::support(f);
    Mask v = 0;
    for (int j = detail::top_level(sup, 2) - 1;; --j) {
        const double t = std::ldexp(1.0, j);
        Level lv;
        lv.k = j;
        while (Mask a = detail::pick(sizes, supp & ~v & ~lv.e, t)) {
            lv.picks.push_back(a);
            lv.e |= a;
        }
        v |= lv.e;
        lv.f = v;
        d.levels.push_back(lv);
        if (!(supp & ~v)) break;
        if (d.levels.size() > detail::kLevelBudget) throw std::logic_error("interior decomposition ran past the level budget");
    }
    return d;
}

/**
 * Backward recursion over k. canopy and psi select a Caratheodory
 * collection at each level, qGeqR a single set leaving nothing above the
 * level behind it. psi = 0 picks max(Phi^{3/p}, 2).
 */
inline Decomposition exterior_decompose(const Evaluator& ev, const Function& f, double p, double q, double r,
                                        const CoveringFunctionSpec& spec, Variant variant, const Rat& k = Rat(1),
                                        double psi = 0) {
    check_exponent(p, "p");
    check_exponent(q, "q");
    check_exponent(r, "r");
    if (std::isinf(p) || std::isinf(q) || std::isinf(r)) throw input_error("exterior decomposition needs finite exponents");
    if (variant == Variant::interior) throw input_error("use interior_decompose");
    if (variant == Variant::qGeqR && q < r) throw input_error("qGeqR variant needs q >= r");
    Decomposition d;
    d.variant = variant;
    d.p = p;
    d.q = q;
    d.r = r;
    d.phi = spec.phi;
    d.k = k;
    if (variant == Variant::psi) {
        d.base = psi > 0 ? psi : std::max(std::pow(to_double(spec.phi), 3 / p), 2.0);
        if (!(d.base > 1)) throw input_error("psi must exceed 1");
    }
    const auto s = d.size();
    auto sizes = ev.all_sizes(f, s);
    auto msub = sizes;
    detail::subset_max(msub, ev.size());
    const double sup = msub.back();
    if (sup <= 0) return d;
    const Mask supp = detail::support(f);
    const Mask full = ev.space().full();
    Mask fprev = 0, uni = 0;
    for (int kk = detail::top_level(sup, d.base) - 1;; --kk) {
        const double t = std::pow(d.base, kk);
        Level lv;
        lv.k = kk;
        if (variant == Variant::qGeqR) {
            const Mask region = supp & ~fprev;
            Mask best = 0;
            double bv = 0;
            for (Mask a = region; a; a = (a - 1) & region)
                if (detail::above(sizes[a], t) && detail::within(msub[full & ~fprev & ~a], t) && sizes[a] >= bv) {
                    best = a;
                    bv = sizes[a];
                }
            if (best) {
                lv.picks.push_back(best);
                lv.e = best;
            } else {
                while (Mask a = detail::pick(sizes, region & ~lv.e, t)) {
                    lv.picks.push_back(a);
                    lv.e |= a;
                }
                lv.fallback = lv.picks.size() > 1;
            }
            uni |= lv.e;
            lv.f = uni;
        } else {
            Mask taken = fprev;
            while (Mask a = detail::pick(sizes, supp & ~taken, t)) {
                lv.picks.push_back(a);
                lv.e |= a;
                taken = fprev | spec.parent(lv.e);
            }
            if (variant == Variant::canopy) {
                uni |= lv.e;
                lv.f = spec.parent(uni);
            } else {
                Mask inner = spec.parent(fprev | lv.e);
                lv.f = spec.parent(inner);
                lv.e1 = inner & ~fprev;
                lv.e2 = lv.f & ~inner;
            }
        }
        fprev = lv.f;
        d.levels.push_back(lv);
        if (!(supp & ~fprev)) break;
        if (d.levels.size() > detail::kLevelBudget) throw std::logic_error("exterior decomposition ran past the level budget");
    }
    return d;
}

struct PropertyCheck {
    std::string name;
    int k = 0;
    bool pass = true;
    double lhs = 0, rhs = 0;
};

struct DecompositionReport {
    bool pass = true;
    std::vector<PropertyCheck> checks;
    DecompositionConstants constants;
    double norm_power = 0;   // ||f||^p
    double single_sum = 0;   // sum_k b^{kp} m(E_k)
    double double_sum = 0;   // sum_k b^{kp} sum_{l>=k} m(E_l)
    double tilde_sum = 0;    // psi: sum_k b^{kp} (m(E1_k) + m(E2_k))

    const PropertyCheck* first_failure() const {
        for (const auto& c : checks)
            if (!c.pass) return &c;
        return nullptr;
    }
    bool failed(const std::string& name) const {
        for (const auto& c : checks)
            if (!c.pass && c.name == name) return true;
        return false;
    }
};

/**
 * Replays every per-level property with the exact engine. The F sets are
 * rebuilt from the E sets, so a corrupted level shows up here.
 */
inline DecompositionReport verify_decomposition(const Evaluator& ev, const Function& f, const Decomposition& d,
                                                const CoveringFunctionSpec& spec) {
    DecompositionReport rep;
    rep.constants = decomposition_constants(d);
    const auto s = d.size();
    const auto& meas = ev.measure(d.which());
    const Mask supp = detail::support(f);
    const double pe = d.outer_exponent();
    auto add = [&](const std::string& name, int k, bool ok, double lhs, double rhs) {
        rep.checks.push_back({name, k, ok, lhs, rhs});
        rep.pass = rep.pass && ok;
    };
    auto restrict_to = [&](Mask keep) {
        Function g(f.size(), 0.0);
        for_each_bit(keep, [&](int x) { g[x] = f[x]; });
        return g;
    };
    Mask fprev = 0, uni = 0, seen = 0, tilde = 0;
    for (const auto& lv : d.levels) {
        const double t = std::pow(d.base, lv.k);
        // structure: disjoint levels and F rebuilt from the E sets
        add("disjoint", lv.k, !(lv.e & seen), static_cast<double>(popcount(lv.e & seen)), 0);
        seen |= lv.e;
        uni |= lv.e;
        Mask rebuilt = 0;
        switch (d.variant) {
            case Variant::interior:
            case Variant::qGeqR: rebuilt = uni; break;
            case Variant::canopy: rebuilt = spec.parent(uni); break;
            case Variant::psi: {
                Mask inner = spec.parent(fprev | lv.e);
                rebuilt = spec.parent(inner);
                bool ok = lv.e1 == (inner & ~fprev) && lv.e2 == (rebuilt & ~inner) && !(tilde & (lv.e1 | lv.e2)) &&
                          !(lv.e1 & lv.e2);
                add("tilde", lv.k, ok, 0, 0);
                tilde |= lv.e1 | lv.e2;
                break;
            }
        }
        add("structure", lv.k, rebuilt == lv.f, 0, 0);
        const Mask fk = rebuilt;
        if (lv.e) {
            double sz = ev.size(restrict_to(ev.space().full() & ~fprev), lv.e, s);
            add("superlevel", lv.k, sz > rep.constants.c_sup * t * (1 - detail::kRel), sz, rep.constants.c_sup * t);
        }
        double cap = ev.sup_size(restrict_to(ev.space().full() & ~fk), s);
        add("cap", lv.k, detail::within(cap, t), cap, t);
        double lvl = to_double(ev.super_level(f, s, t).value);
        double mf = meas.dvalue(fk);
        add("covering", lv.k, detail::within(lvl, mf), lvl, mf);
        double me = meas.dvalue(lv.e);
        double opt = rep.constants.C_opt * to_double(ev.super_level(f, s, rep.constants.c_opt * t).value);
        add("optimal", lv.k, detail::within(me, opt), me, opt);
        if (d.variant != Variant::interior && d.variant != Variant::qGeqR && lv.picks.size() > 1) {
            auto c = caratheodory_check(ev.nu(), lv.picks, d.k);
            add("caratheodory", lv.k, c.holds, to_double(c.lhs), to_double(c.rhs));
        }
        fprev = fk;
    }
    if (d.variant == Variant::qGeqR) add("partition", 0, seen == supp, static_cast<double>(popcount(seen ^ supp)), 0);
    if (d.variant == Variant::psi)
        add("partition", 0, (tilde & supp) == supp, static_cast<double>(popcount(supp & ~tilde)), 0);

    rep.norm_power = std::pow(ev.norm(f, pe, s).value, pe);
    double tail = 0;
    for (auto it = d.levels.begin(); it != d.levels.end(); ++it) {
        const double w = std::pow(d.base, it->k * pe);
        tail += meas.dvalue(it->e);
        rep.single_sum += w * meas.dvalue(it->e);
        rep.double_sum += w * tail;
        rep.tilde_sum += w * (meas.dvalue(it->e1) + meas.dvalue(it->e2));
    }
    // every level below the last one sees the whole union
    if (!d.levels.empty()) {
        const double x = std::pow(d.base, -pe);
        rep.double_sum += tail * std::pow(d.base, d.levels.back().k * pe) * x / (1 - x);
    }
    return rep;
}

}  // namespace olp

#endif
