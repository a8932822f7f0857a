#ifndef OUTER_LP_DUALITY_HPP
#define OUTER_LP_DUALITY_HPP

#include <cmath>
#include <random>
#include <vector>

#include "conditions.hpp"
#include "decompose.hpp"
#include "norms.hpp"

namespace olp {

inline double dual_exponent(double e) { return e / (e - 1); }

struct DualBlock {
    int k = 0, j = 0;
    Mask u = 0, w = 0;
    std::vector<Mask> cropped;  // G^k_j, q > r only
    bool crop_found = true;
};

struct DualWitness {
    Function g;
    double p = 2, q = 2, r = 2;
    double pd = 2, qd = 2, rd = 2;
    int m = 0;          // M = 2 + floor(log2 K / r), q > r only
    double scale = 1;   // f was multiplied by this before decomposing
    Rat phi{1}, k{1};
    Decomposition exterior;
    std::vector<Decomposition> interior;  // one per nonempty E_k, in level order
    std::vector<DualBlock> blocks;
};

namespace detail {

inline void check_dual_exponents(double p, double q, double r) {
    for (double e : {p, q, r})
        if (!(e > 1) || std::isinf(e)) throw input_error("duality needs p, q, r in (1, inf)");
    if (q == r) throw input_error("q = r takes the single-iterated path, not build_dual");
}

inline double pairing(const Evaluator& ev, const Function& f, const Function& g) {
    double s = 0;
    for (int x = 0; x < ev.size(); ++x) s += f[x] * g[x] * to_double(ev.space().omega[x]);
    return s;
}

}  // namespace detail

/**
 * g = f^{r-1} sum_k 2^{k(p-q)} sum_j 2^{j(q-r)} 1_{W^k_j}, built on f scaled
 * so that its L^infty size lies in (1, 2], then scaled back by scale^{1-p}.
 * q > r decomposes with qGeqR and crops W, q < r with canopy and W = U.
 */
inline DualWitness build_dual(const Evaluator& ev, const Function& f, double p, double q, double r,
                              const CoveringFunctionSpec& spec, const Rat& k = Rat(1),
                              const ConditionBudget& budget = {}) {
    detail::check_dual_exponents(p, q, r);
    ev.check_function(f);
    DualWitness w;
    w.p = p;
    w.q = q;
    w.r = r;
    w.pd = dual_exponent(p);
    w.qd = dual_exponent(q);
    w.rd = dual_exponent(r);
    w.phi = spec.phi;
    w.k = k;
    w.g.assign(f.size(), 0.0);
    const double sup = ev.sup_size(f, SizeExpr::outer(q, r));
    if (sup <= 0) return w;
    w.scale = std::ldexp(1.0, 1 - detail::top_level(sup, 2));
    Function fs(f);
    for (double& v : fs) v *= w.scale;
    const bool crop = q > r;
    if (crop) w.m = 2 + static_cast<int>(std::floor(std::log2(to_double(k)) / r));
    w.exterior = exterior_decompose(ev, fs, p, q, r, spec, crop ? Variant::qGeqR : Variant::canopy, k);
    std::mt19937_64 rng(budget.seed);
    Function gs(f.size(), 0.0);
    for (const auto& lv : w.exterior.levels) {
        if (!lv.e) continue;
        Function fk(f.size(), 0.0);
        for_each_bit(lv.e, [&](int x) { fk[x] = fs[x]; });
        w.interior.push_back(interior_decompose(ev, fk, q, r));
        for (const auto& in : w.interior.back().levels) {
            if (!in.e) continue;
            DualBlock b;
            b.k = lv.k;
            b.j = in.k;
            b.u = in.e;
            b.w = in.e;
            if (crop) {
                Function fkj(f.size(), 0.0);
                for_each_bit(in.e, [&](int x) { fkj[x] = fs[x]; });
                std::vector<Mask> small;
                const double cut = std::ldexp(1.0, in.k - w.m);
                for (Mask e : spec.family)
                    if (detail::within(ev.size(fkj, e, SizeExpr::inner(r)), cut)) small.push_back(e);
                bool exhaustive = true;
                auto sel = crop_subcollection(ev.nu(), ev.size(), spec, k, small, budget, rng, exhaustive);
                b.crop_found = sel.status == CropSelection::found;
                b.cropped = sel.d;
                for (Mask e : b.cropped) b.w &= ~e;
            }
            const double coef = std::pow(2.0, lv.k * (p - q)) * std::pow(2.0, in.k * (q - r));
            for_each_bit(b.w, [&](int x) { gs[x] += coef * std::pow(fs[x], r - 1); });
            w.blocks.push_back(std::move(b));
        }
    }
    const double back = std::pow(w.scale, 1 - p);
    for (int x = 0; x < ev.size(); ++x) w.g[x] = gs[x] * back;
    return w;
}

struct DualityReport {
    double pairing = 0;    // ||fg||_{L^1(omega)}
    double lhs = 0;        // ||f||^p
    double dual_norm = 0;  // ||g||^{p'} in the dual exponents
    double c_lower = 0, c_lower_traced = 0;
    double C_upper = 0;
    double holder = 0;     // pairing / (||f|| ||g||)
    double c_block = 1;    // traced constant of the per-block bound
    double worst_block = 0;  // smallest realized block ratio over c_block
    bool lower_ok = true, blocks_ok = true, crop_ok = true;
    bool holds_within_envelope = true;
};

/** Traced constant of the pairing lower bound, see the README for the chain. */
inline double traced_lower_constant(const DualWitness& w) {
    const bool crop = w.q > w.r;
    const double c3 = crop ? 1 - to_double(w.k) * std::pow(2.0, -w.m * w.r) : 1.0;
    const double c1q = crop ? 1.0 : 1 / to_double(w.k);
    const double phi = crop ? 1.0 : to_double(w.phi);
    return c3 * std::pow(2.0, -w.q) * c1q * (1 - std::pow(2.0, -w.p)) / (std::pow(2.0, w.p) * phi);
}

/** Both pairing bounds and the Hoelder ratio for one witness; C_upper is checked against envelope. */
inline DualityReport verify_duality(const Evaluator& ev, const Function& f, const DualWitness& w,
                                    double envelope = kInf) {
    DualityReport rep;
    rep.pairing = detail::pairing(ev, f, w.g);
    rep.lhs = std::pow(ev.norm(f, w.p, SizeExpr::outer(w.q, w.r)).value, w.p);
    rep.dual_norm = std::pow(ev.norm(w.g, w.pd, SizeExpr::outer(w.qd, w.rd)).value, w.pd);
    if (rep.lhs <= 0) return rep;
    rep.c_lower = rep.pairing / rep.lhs;
    rep.c_lower_traced = traced_lower_constant(w);
    rep.lower_ok = rep.c_lower >= rep.c_lower_traced * (1 - detail::kRel);
    rep.C_upper = rep.dual_norm / rep.lhs;
    const double fn = std::pow(rep.lhs, 1 / w.p), gn = std::pow(rep.dual_norm, 1 / w.pd);
    rep.holder = gn > 0 ? rep.pairing / (fn * gn) : 0;
    const bool crop = w.q > w.r;
    rep.c_block = crop ? 1 - to_double(w.k) * std::pow(2.0, -w.m * w.r) : 1.0;
    rep.worst_block = kInf;
    for (const auto& b : w.blocks) {
        double lhs = 0;
        for_each_bit(b.w, [&](int x) { lhs += std::pow(f[x] * w.scale, w.r) * to_double(ev.space().omega[x]); });
        const double rhs = std::pow(2.0, b.j * w.r) * ev.nu().dvalue(b.u);
        rep.worst_block = std::min(rep.worst_block, lhs / (rep.c_block * rhs));
        rep.blocks_ok = rep.blocks_ok && lhs >= rep.c_block * rhs * (1 - detail::kRel);
        rep.crop_ok = rep.crop_ok && b.crop_found;
    }
    rep.holds_within_envelope = rep.lower_ok && rep.blocks_ok && rep.crop_ok && rep.C_upper <= envelope;
    return rep;
}

/** ||sum f_n|| / sum ||f_n|| in L^p_mu(l^q_nu(l^r)). */
inline double triangle_defect(const Evaluator& ev, const std::vector<Function>& fs, double p, double q, double r) {
    if (fs.empty()) throw input_error("triangle_defect needs at least one function");
    Function sum(ev.size(), 0.0);
    double parts = 0;
    const auto s = SizeExpr::outer(q, r);
    for (const auto& f : fs) {
        ev.check_function(f);
        for (int x = 0; x < ev.size(); ++x) sum[x] += f[x];
        parts += ev.norm(f, p, s).value;
    }
    if (parts == 0) return 1;
    return ev.norm(sum, p, s).value / parts;
}

/**
 * Lower estimate of sup ||fg||_{L^1} over ||g|| = 1 in the dual exponents:
 * the best normalized pairing among the witness g, f^{r-1} and budget
 * random candidates.
 */
inline double pairing_sup_search(const Evaluator& ev, const Function& f, double p, double q, double r,
                                 std::size_t budget, unsigned seed = 1, const Function* witness = nullptr) {
    if (budget == 0) throw input_error("budget must be positive");
    ev.check_function(f);
    const double pd = dual_exponent(p), qd = dual_exponent(q), rd = dual_exponent(r);
    const auto s = SizeExpr::outer(qd, rd);
    double best = 0;
    auto try_g = [&](const Function& g) {
        double n = ev.norm(g, pd, s).value;
        if (n > 0) best = std::max(best, detail::pairing(ev, f, g) / n);
    };
    if (witness) try_g(*witness);
    Function base(f.size());
    for (std::size_t x = 0; x < f.size(); ++x) base[x] = std::pow(f[x], r - 1);
    try_g(base);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t i = 0; i < budget; ++i) {
        Function g(f.size());
        for (std::size_t x = 0; x < f.size(); ++x) g[x] = f[x] > 0 ? u(rng) * (1 + base[x]) : 0;
        try_g(g);
    }
    return best;
}

}  // namespace olp

#endif
