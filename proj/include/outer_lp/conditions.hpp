#ifndef OUTER_LP_CONDITIONS_HPP
#define OUTER_LP_CONDITIONS_HPP

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "space.hpp"

namespace olp {

/**
 * A mu-covering function: C(A) is a list of pairwise disjoint members of the
 * family, B_C(A) their union. C and mu are assumed to see A only through the
 * atoms it meets; singleton atoms make that vacuous.
 */
struct CoveringFunctionSpec {
    std::string rule = "explicit";
    std::vector<Mask> family;
    std::function<std::vector<Mask>(Mask)> assign;
    Rat phi{1};
    std::vector<Mask> atoms;

    Mask parent(Mask a) const {
        Mask b = 0;
        for (Mask e : assign(a)) b |= e;
        return b;
    }
    Mask saturate(Mask a) const {
        Mask out = 0;
        for (Mask t : atoms)
            if (t & a) out |= t;
        return out;
    }
};

inline std::vector<Mask> singleton_atoms(int n) {
    std::vector<Mask> out;
    for (int i = 0; i < n; ++i) out.push_back(bit(i));
    return out;
}

/** Singletons as the family, C(A) = singletons of A. */
inline CoveringFunctionSpec singleton_spec(int n) {
    CoveringFunctionSpec s;
    s.rule = "identity";
    s.family = singleton_atoms(n);
    s.atoms = s.family;
    s.assign = [](Mask a) {
        std::vector<Mask> out;
        for_each_bit(a, [&](int x) { out.push_back(bit(x)); });
        return out;
    };
    return s;
}

/** Every nonempty subset is a member and C(A) = {A}. */
inline CoveringFunctionSpec power_set_spec(int n) {
    if (n > 16) throw capacity_error("power set family needs n <= 16");
    CoveringFunctionSpec s;
    s.rule = "powerset";
    for (Mask a = 1; a <= full_mask(n); ++a) s.family.push_back(a);
    s.atoms = singleton_atoms(n);
    s.assign = [](Mask a) { return a ? std::vector<Mask>{a} : std::vector<Mask>{}; };
    return s;
}

/** C(A) given by a table indexed by A. */
inline CoveringFunctionSpec explicit_spec(int n, std::vector<Mask> family, std::vector<std::vector<Mask>> table,
                                          Rat phi) {
    if (table.size() != (std::size_t{1} << n)) throw input_error("explicit assignment needs one entry per subset");
    CoveringFunctionSpec s;
    s.family = std::move(family);
    s.phi = phi;
    s.atoms = singleton_atoms(n);
    s.assign = [t = std::move(table)](Mask a) { return t[a]; };
    return s;
}

struct ConditionVerdict {
    bool holds = true;
    bool exhaustive = true;
    std::string property;
    Mask set = 0;    // A for parent checks, D for canopy, F for crop
    Mask other = 0;  // the larger set of a monotonicity failure
    std::vector<Mask> collection;
    std::size_t checked = 0;
};

struct ConditionBudget {
    std::size_t collections = 25000;
    std::size_t samples_per_collection = 64;
    unsigned seed = 1;
};

namespace detail {

inline bool subcollection_of(const std::vector<Mask>& sub, const std::vector<Mask>& fam) {
    for (Mask a : sub)
        if (std::find(fam.begin(), fam.end(), a) == fam.end()) return false;
    return true;
}

/** Calls f(blocks) for every collection of pairwise disjoint nonempty subsets. */
template <class F>
bool for_each_disjoint_collection(int n, F&& f) {
    std::vector<Mask> blocks;
    std::function<bool(int)> rec = [&](int x) -> bool {
        if (x == n) return f(blocks);
        if (!rec(x + 1)) return false;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            blocks[b] |= bit(x);
            bool go = rec(x + 1);
            blocks[b] &= ~bit(x);
            if (!go) return false;
        }
        blocks.push_back(bit(x));
        bool go = rec(x + 1);
        blocks.pop_back();
        return go;
    };
    return rec(0);
}

/** Bell(n + 1), saturating. */
inline std::size_t disjoint_collection_count(int n) {
    std::vector<std::size_t> row{1};
    for (int i = 0; i < n + 1; ++i) {
        std::vector<std::size_t> next{row.back()};
        for (std::size_t v : row) {
            std::size_t s = next.back() + v;
            next.push_back(s < next.back() ? SIZE_MAX : s);
        }
        row = std::move(next);
    }
    return row.front();
}

inline std::vector<Mask> random_disjoint_collection(std::mt19937_64& rng, Mask ground) {
    int blocks = 1 + static_cast<int>(rng() % 4);
    std::vector<Mask> out(blocks, 0);
    for_each_bit(ground, [&](int x) {
        int l = static_cast<int>(rng() % (blocks + 1)) - 1;
        if (l >= 0) out[l] |= bit(x);
    });
    out.erase(std::remove(out.begin(), out.end(), Mask{0}), out.end());
    return out;
}

/** Subsets of region, saturated by atoms and cut back to region; enumerated or sampled. */
template <class F>
bool for_each_atom_subset(const CoveringFunctionSpec& spec, Mask region, std::size_t budget, std::mt19937_64& rng,
                          bool& exhaustive, F&& f) {
    std::vector<Mask> pieces;
    for (Mask t : spec.atoms)
        if (t & region) pieces.push_back(t & region);
    const int k = static_cast<int>(pieces.size());
    auto build = [&](std::uint64_t sel) {
        Mask a = 0;
        for (int i = 0; i < k; ++i)
            if (sel >> i & 1) a |= pieces[i];
        return a;
    };
    if (k < 63 && (std::uint64_t{1} << k) <= budget) {
        for (std::uint64_t sel = 0; sel < (std::uint64_t{1} << k); ++sel)
            if (!f(build(sel))) return false;
        return true;
    }
    exhaustive = false;
    if (!f(0) || !f(build(~std::uint64_t{0}))) return false;
    for (std::size_t s = 0; s < budget; ++s)
        if (!f(build(rng()))) return false;
    return true;
}

}  // namespace detail

/** Containment, Phi-optimality, disjointness and monotonicity of B_C. */
template <class Table>
ConditionVerdict parent_function_check(const Table& mu, int n, const CoveringFunctionSpec& spec,
                                       const ConditionBudget& budget = {}) {
    ConditionVerdict v;
    std::mt19937_64 rng(budget.seed);
    auto fail = [&](const char* what, Mask a, Mask b = 0) {
        v.holds = false;
        v.property = what;
        v.set = a;
        v.other = b;
        return false;
    };
    auto visit = [&](Mask a) {
        ++v.checked;
        auto c = spec.assign(a);
        require_disjoint(c);
        if (!detail::subcollection_of(c, spec.family)) return fail("family", a);
        Mask b = 0;
        for (Mask e : c) b |= e;
        if ((a & b) != a) return fail("containment", a);
        // mu(B) <= Phi mu(A)
        if (Rat(mu.num(b), 1) > spec.phi * Rat(mu.num(a), 1)) return fail("optimality", a);
        for (Mask t : spec.atoms) {
            if (t & a) continue;
            if ((spec.parent(a | t) & b) != b) return fail("monotonicity", a, a | t);
        }
        return true;
    };
    detail::for_each_atom_subset(spec, full_mask(n), budget.collections, rng, v.exhaustive, visit);
    return v;
}

/**
 * For every K-Caratheodory collection A and D outside B_C(union A), A + {D}
 * must stay K-Caratheodory. Exhaustive while the number of collections fits
 * the budget, seeded sampling beyond.
 */
template <class Table>
ConditionVerdict canopy_check(const Table& nu, int n, const CoveringFunctionSpec& spec, const Rat& k,
                              const ConditionBudget& budget = {}) {
    ConditionVerdict v;
    std::mt19937_64 rng(budget.seed);
    auto visit = [&](const std::vector<Mask>& coll) {
        if (coll.empty()) return true;
        ++v.checked;
        auto base = caratheodory_check(nu, coll, k);
        v.exhaustive = v.exhaustive && base.exhaustive;
        if (!base.holds) return true;
        Mask uni = 0;
        for (Mask a : coll) uni |= a;
        Mask rest = full_mask(n) & ~spec.parent(uni);
        auto test = [&](Mask d) {
            if (!d) return true;
            auto ext = coll;
            ext.push_back(d);
            auto r = caratheodory_check(nu, ext, k);
            v.exhaustive = v.exhaustive && r.exhaustive;
            if (r.holds) return true;
            v.holds = false;
            v.property = "canopy";
            v.collection = coll;
            v.set = d;
            v.other = r.witness;
            return false;
        };
        if (popcount(rest) <= 12) {
            for (Mask d = rest; d; d = (d - 1) & rest)
                if (!test(d)) return false;
            return true;
        }
        v.exhaustive = false;
        if (!test(rest)) return false;
        for (std::size_t s = 0; s < budget.samples_per_collection; ++s)
            if (!test(rng() & rest)) return false;
        return true;
    };
    if (detail::disjoint_collection_count(n) <= budget.collections) {
        detail::for_each_disjoint_collection(n, visit);
    } else {
        v.exhaustive = false;
        for (std::size_t s = 0; s < budget.collections && v.holds; ++s)
            visit(detail::random_disjoint_collection(rng, full_mask(n)));
    }
    return v;
}

namespace detail {

/** First F outside union(D) whose cover uses a member of A, if any. */
inline std::optional<Mask> crop_violation(const CoveringFunctionSpec& spec, int n, const std::vector<Mask>& a,
                                          const std::vector<Mask>& d, std::size_t budget, std::mt19937_64& rng,
                                          bool& exhaustive) {
    Mask uni = 0;
    for (Mask x : d) uni |= x;
    std::optional<Mask> bad;
    for_each_atom_subset(spec, full_mask(n) & ~uni, budget, rng, exhaustive, [&](Mask f) {
        Mask full = 0, kept = 0;
        for (Mask e : spec.assign(f)) {
            full |= e;
            if (std::find(a.begin(), a.end(), e) == a.end()) kept |= e;
        }
        if (full == kept) return true;
        bad = f;
        return false;
    });
    return bad;
}

inline bool pairwise_disjoint(const std::vector<Mask>& c) {
    Mask seen = 0;
    for (Mask x : c) {
        if (x & seen) return false;
        seen |= x;
    }
    return true;
}

}  // namespace detail

/** Outcome of the search for the subcollection D of one collection A. */
struct CropSelection {
    enum Status { found, refuted, capped } status = refuted;
    std::vector<Mask> d;
    Mask witness = 0;  // first F whose cover still uses A, for the maximal members
};

/**
 * Finds a K-Caratheodory D inside A such that covers of sets outside
 * union(D) avoid A. The maximal members of A are tried first, then a greedy
 * disjoint pick among them, then every disjoint subcollection up to a node cap.
 */
template <class Table>
CropSelection crop_subcollection(const Table& nu, int n, const CoveringFunctionSpec& spec, const Rat& k,
                                 const std::vector<Mask>& a, const ConditionBudget& budget, std::mt19937_64& rng,
                                 bool& exhaustive) {
    CropSelection out;
    auto admissible = [&](const std::vector<Mask>& d, std::optional<Mask>& bad) {
        if (!detail::pairwise_disjoint(d)) return false;
        if (!d.empty()) {
            auto c = caratheodory_check(nu, d, k);
            exhaustive = exhaustive && c.exhaustive;
            if (!c.holds) return false;
        }
        bad = detail::crop_violation(spec, n, a, d, budget.collections, rng, exhaustive);
        return !bad;
    };
    auto accept = [&](std::vector<Mask> d) {
        out.status = CropSelection::found;
        out.d = std::move(d);
        return out;
    };
    std::vector<Mask> maximal;
    for (Mask x : a) {
        bool top = true;
        for (Mask y : a)
            if (y != x && (x & y) == x) top = false;
        if (top) maximal.push_back(x);
    }
    std::optional<Mask> first_bad, bad;
    if (admissible(maximal, first_bad)) return accept(maximal);
    out.witness = first_bad.value_or(0);
    std::sort(maximal.begin(), maximal.end(), [](Mask x, Mask y) {
        return popcount(x) != popcount(y) ? popcount(x) > popcount(y) : x < y;
    });
    std::vector<Mask> greedy;
    Mask used = 0;
    for (Mask x : maximal)
        if (!(x & used)) {
            greedy.push_back(x);
            used |= x;
        }
    if (admissible(greedy, bad)) return accept(greedy);
    std::vector<Mask> d;
    std::size_t nodes = 0;
    bool capped = false;
    std::function<bool(std::size_t, Mask)> dfs = [&](std::size_t i, Mask taken) -> bool {
        if (++nodes > budget.collections * 4) {
            capped = true;
            return false;
        }
        if (i == a.size()) return admissible(d, bad);
        if (!(a[i] & taken)) {
            d.push_back(a[i]);
            bool ok = dfs(i + 1, taken | a[i]);
            if (ok) return true;
            d.pop_back();
        }
        return dfs(i + 1, taken);
    };
    if (dfs(0, 0)) return accept(d);
    out.status = capped ? CropSelection::capped : CropSelection::refuted;
    return out;
}

/**
 * Every subcollection A of the family must admit the subcollection D of
 * crop_subcollection. A search that hits the node cap counts as not refuted
 * and clears the exhaustive flag.
 */
template <class Table>
ConditionVerdict crop_check(const Table& nu, int n, const CoveringFunctionSpec& spec, const Rat& k,
                            const ConditionBudget& budget = {}) {
    ConditionVerdict v;
    std::mt19937_64 rng(budget.seed);
    const auto& fam = spec.family;
    const std::size_t m = fam.size();
    auto visit = [&](std::uint64_t sel) {
        std::vector<Mask> a;
        for (std::size_t i = 0; i < m; ++i)
            if (sel >> i & 1) a.push_back(fam[i]);
        ++v.checked;
        auto s = crop_subcollection(nu, n, spec, k, a, budget, rng, v.exhaustive);
        if (s.status == CropSelection::found) return true;
        if (s.status == CropSelection::capped) {
            v.exhaustive = false;
            return true;
        }
        v.holds = false;
        v.property = "crop";
        v.collection = a;
        v.set = s.witness;
        return false;
    };
    if (m < 63 && (std::uint64_t{1} << m) <= budget.collections) {
        for (std::uint64_t sel = 0; sel < (std::uint64_t{1} << m); ++sel)
            if (!visit(sel)) break;
    } else {
        v.exhaustive = false;
        for (std::size_t s = 0; s < budget.collections; ++s)
            if (!visit(m >= 64 ? rng() : rng() & ((std::uint64_t{1} << m) - 1))) break;
    }
    return v;
}

}  // namespace olp

#endif
