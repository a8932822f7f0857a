#ifndef OUTER_LP_NORMS_HPP
#define OUTER_LP_NORMS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "space.hpp"

namespace olp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/** Per-point values of |f|. */
using Function = std::vector<double>;

struct SizeExpr {
    enum class Kind { inner, outer };
    Kind kind = Kind::inner;
    double q = kInf;
    double r = 1.0;

    static SizeExpr inner(double r) { return {Kind::inner, kInf, r}; }
    static SizeExpr outer(double q, double r) { return {Kind::outer, q, r}; }
    bool is_outer() const { return kind == Kind::outer; }
};

inline void check_exponent(double e, const char* what) {
    if (!(e > 0)) throw input_error(std::string(what) + " must lie in (0, inf]");
}

/**
 * lambda -> super-level measure. plateaus[i] holds on [b_i, b_{i+1}) with
 * b_0 = 0 and the last plateau 0. sets[i] is an optimal B at b_i. The zero
 * function has an empty profile.
 */
struct StepProfile {
    std::vector<double> breakpoints;
    std::vector<Rat> plateaus;
    std::vector<Mask> sets;

    bool empty() const { return plateaus.empty(); }
    std::size_t index(double lambda) const {
        return static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), lambda) -
                                        breakpoints.begin());
    }
    Rat exact_at(double lambda) const { return empty() ? Rat(0) : plateaus[index(lambda)]; }
    double at(double lambda) const { return to_double(exact_at(lambda)); }
};

struct NormResult {
    double value = 0;
    StepProfile profile;
};

struct LevelResult {
    Rat value{0};
    Mask set = 0;
};

namespace detail {

inline void subset_max(std::vector<double>& v, int n) {
    for (int i = 0; i < n; ++i) {
        const Mask b = bit(i);
        for (Mask a = 0; a < v.size(); ++a)
            if (a & b) v[a] = std::max(v[a], v[a ^ b]);
    }
}

/** Sum of f^r w over A (max of f for r = inf), built by peeling the lowest bit. */
inline std::vector<double> power_sums(const std::vector<double>& f, const std::vector<double>& w, double r, int n) {
    std::vector<double> s(std::size_t{1} << n, 0.0);
    std::vector<double> term(n);
    for (int i = 0; i < n; ++i) term[i] = std::isinf(r) ? f[i] : std::pow(f[i], r) * w[i];
    for (Mask a = 1; a < s.size(); ++a) {
        int lo = std::countr_zero(a);
        s[a] = std::isinf(r) ? std::max(s[a & (a - 1)], term[lo]) : s[a & (a - 1)] + term[lo];
    }
    return s;
}

inline double inner_size_from_sum(double sum, double nu, double r) {
    if (std::isinf(r)) return sum;
    return sum == 0 ? 0.0 : std::pow(sum / nu, 1.0 / r);
}

struct Sorted {
    std::vector<Mask> order;
    std::vector<double> value;
};

inline Sorted sort_masks(const std::vector<double>& ms, Mask within) {
    Sorted s;
    for (Mask t = within;; t = (t - 1) & within) {
        s.order.push_back(t);
        if (!t) break;
    }
    std::sort(s.order.begin(), s.order.end(), [&](Mask a, Mask b) { return ms[a] != ms[b] ? ms[a] < ms[b] : a < b; });
    s.value.reserve(s.order.size());
    for (Mask t : s.order) s.value.push_back(ms[t]);
    return s;
}

struct DenseProfile {
    std::vector<double> breakpoints;
    std::vector<std::int64_t> nums;
    std::vector<Mask> sets;
};

/** m(lambda) = min { level(C \ T) : T in C, ms[T] <= lambda }, sweeping T by increasing ms. */
inline DenseProfile sweep_profile(const Sorted& s, const MeasureTable& level, Mask within) {
    DenseProfile out;
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    Mask best_set = 0;
    std::size_t i = 0;
    bool first = true;
    while (i < s.order.size()) {
        const double v = s.value[i];
        for (; i < s.order.size() && s.value[i] == v; ++i) {
            Mask t = s.order[i];
            if (t & ~within) continue;
            Mask b = within & ~t;
            std::int64_t c = level.num(b);
            if (c < best || (c == best && b < best_set)) {
                best = c;
                best_set = b;
            }
        }
        if (first) {
            out.nums.push_back(best);
            out.sets.push_back(best_set);
            first = false;
        } else if (best < out.nums.back()) {
            out.breakpoints.push_back(v);
            out.nums.push_back(best);
            out.sets.push_back(best_set);
        }
        if (best == 0) break;
    }
    if (out.nums.size() == 1 && out.nums[0] == 0) out = {};
    return out;
}

/** Integral of p lambda^{p-1} m(lambda), with pw[i] = value[i]^p. */
inline double sweep_integral(const Sorted& s, const std::vector<double>& pw, const MeasureTable& level, Mask within) {
    std::int64_t cur = level.num(within);
    double prev = 0, acc = 0;
    for (std::size_t i = 0; i < s.order.size() && cur > 0; ++i) {
        Mask t = s.order[i];
        if (t & ~within) continue;
        std::int64_t c = level.num(within & ~t);
        if (c < cur) {
            acc += static_cast<double>(cur) * (pw[i] - prev);
            prev = pw[i];
            cur = c;
        }
    }
    return acc / static_cast<double>(level.den());
}

inline LevelResult dense_super_level(const std::vector<double>& ms, const MeasureTable& level, int n, double lambda) {
    const Mask all = full_mask(n);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    Mask best_set = 0;
    for (Mask t = 0; t < ms.size(); ++t) {
        if (ms[t] > lambda) continue;
        Mask b = all & ~t;
        std::int64_t c = level.num(b);
        if (c < best || (c == best && b < best_set)) {
            best = c;
            best_set = b;
        }
    }
    return {Rat(best, level.den()), best_set};
}

}  // namespace detail

/**
 * Exact evaluator for one space. Work is split over the connected components
 * of mu and nu generators together; norms factor over them (sum of p-th powers,
 * or max for p = inf) and super-level measures add up.
 */
class Evaluator {
public:
    explicit Evaluator(FiniteSpace space, int limit = kDefaultExactLimit) : space_(std::move(space)), limit_(limit) {
        space_.validate();
        mu_ = FactoredMeasure(space_, Which::mu, limit);
        nu_ = FactoredMeasure(space_, Which::nu, limit);
        for (Mask c : generator_components(space_.size(), {&space_.mu_gen, &space_.nu_gen})) {
            Part p;
            p.mask = c;
            p.n = popcount(c);
            p.mu = build_measure_table(p.n, restrict_generators(space_.mu_gen, c), Which::mu, limit);
            auto nug = restrict_generators(space_.nu_gen, c);
            p.nu = build_measure_table(p.n, nug, Which::nu, limit);
            for_each_bit(c, [&](int x) { p.w.push_back(to_double(space_.omega[x])); });
            p.nucomps = generator_components(p.n, {&nug});
            parts_.push_back(std::move(p));
        }
    }

    const FiniteSpace& space() const { return space_; }
    int size() const { return space_.size(); }
    int limit() const { return limit_; }
    const FactoredMeasure& mu() const { return mu_; }
    const FactoredMeasure& nu() const { return nu_; }
    const FactoredMeasure& measure(Which w) const { return w == Which::mu ? mu_ : nu_; }
    std::vector<Mask> parts() const {
        std::vector<Mask> out;
        for (const auto& p : parts_) out.push_back(p.mask);
        return out;
    }

    void check_function(const Function& f) const {
        if (static_cast<int>(f.size()) != size()) throw input_error("function length differs from point count");
        for (double v : f)
            if (!(v >= 0) || std::isinf(v)) throw input_error("function values must be finite and nonnegative");
    }

    /** ||f||_{L^q_nu(l^r_omega)}; q = inf gives the sup of the l^r size. */
    double inner_norm(const Function& f, double q, double r) const {
        check_function(f);
        check_exponent(q, "q");
        check_exponent(r, "r");
        double acc = 0;
        for (const auto& p : parts_) {
            auto memo = inner_memo(p, local(f, p), q, r);
            for (Mask qc : p.nucomps) acc = std::isinf(q) ? std::max(acc, memo[qc]) : acc + memo[qc];
        }
        return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
    }

    double size(const Function& f, Mask a, const SizeExpr& s) const {
        check_function(f);
        if (a == 0) throw input_error("size of the empty set is undefined");
        if (a & ~space_.full()) throw input_error("mask out of range");
        check_exponent(s.r, "r");
        if (!s.is_outer()) {
            double sum = 0;
            for_each_bit(a, [&](int x) {
                sum = std::isinf(s.r) ? std::max(sum, f[x]) : sum + std::pow(f[x], s.r) * to_double(space_.omega[x]);
            });
            return detail::inner_size_from_sum(sum, nu_.dvalue(a), s.r);
        }
        check_exponent(s.q, "q");
        Function g(f.size(), 0.0);
        for_each_bit(a, [&](int x) { g[x] = f[x]; });
        double in = inner_norm(g, s.q, s.r);
        return std::isinf(s.q) ? in : in * std::pow(mu_.dvalue(a), -1.0 / s.q);
    }

    /** Sizes of every subset (index 0 holds 0). Needs 2^n memory. */
    std::vector<double> all_sizes(const Function& f, const SizeExpr& s) const {
        check_function(f);
        const int n = size();
        if (n > 24) throw capacity_error("all_sizes needs n <= 24");
        std::vector<double> out(std::size_t{1} << n, 0.0);
        if (!s.is_outer()) {
            std::vector<double> w(n);
            for (int i = 0; i < n; ++i) w[i] = to_double(space_.omega[i]);
            auto sums = detail::power_sums(f, w, s.r, n);
            for (Mask a = 1; a < out.size(); ++a) out[a] = detail::inner_size_from_sum(sums[a], nu_.dvalue(a), s.r);
            return out;
        }
        std::vector<std::pair<Mask, std::vector<double>>> comps;  // global nu component, memo by compressed mask
        for (const auto& p : parts_) {
            auto memo = inner_memo(p, local(f, p), s.q, s.r);
            for (Mask qc : p.nucomps) {
                std::vector<double> t(std::size_t{1} << popcount(qc));
                for (Mask c = qc;; c = (c - 1) & qc) {
                    t[compress(c, qc)] = memo[c];
                    if (!c) break;
                }
                comps.emplace_back(expand(qc, p.mask), std::move(t));
            }
        }
        for (Mask a = 1; a < out.size(); ++a) {
            double acc = 0;
            for (const auto& [qc, t] : comps)
                if (a & qc) {
                    double v = t[compress(a, qc)];
                    acc = std::isinf(s.q) ? std::max(acc, v) : acc + v;
                }
            out[a] = std::isinf(s.q) ? acc : std::pow(acc / mu_.dvalue(a), 1.0 / s.q);
        }
        return out;
    }

    LevelResult super_level(const Function& f, const SizeExpr& s, double lambda) const {
        check_function(f);
        if (!(lambda >= 0)) throw input_error("lambda must be nonnegative");
        LevelResult out;
        for (const auto& p : parts_) {
            auto ms = part_sizes(p, local(f, p), s);
            detail::subset_max(ms, p.n);
            auto r = detail::dense_super_level(ms, level_table(p, s), p.n, lambda);
            out.value += r.value;
            out.set |= expand(r.set, p.mask);
        }
        return out;
    }

    StepProfile profile(const Function& f, const SizeExpr& s) const {
        check_function(f);
        std::vector<std::pair<detail::DenseProfile, const Part*>> pieces;
        std::vector<double> bps;
        for (const auto& p : parts_) {
            auto ms = part_sizes(p, local(f, p), s);
            detail::subset_max(ms, p.n);
            auto prof = detail::sweep_profile(detail::sort_masks(ms, full_mask(p.n)), level_table(p, s), full_mask(p.n));
            if (prof.nums.empty()) continue;
            bps.insert(bps.end(), prof.breakpoints.begin(), prof.breakpoints.end());
            pieces.emplace_back(std::move(prof), &p);
        }
        StepProfile out;
        if (pieces.empty()) return out;
        std::sort(bps.begin(), bps.end());
        bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
        std::vector<double> starts{0.0};
        starts.insert(starts.end(), bps.begin(), bps.end());
        for (double b : starts) {
            Rat m{0};
            Mask set = 0;
            for (const auto& [prof, p] : pieces) {
                auto i = static_cast<std::size_t>(
                    std::upper_bound(prof.breakpoints.begin(), prof.breakpoints.end(), b) - prof.breakpoints.begin());
                m += Rat(prof.nums[i], level_table(*p, s).den());
                set |= expand(prof.sets[i], p->mask);
            }
            out.plateaus.push_back(m);
            out.sets.push_back(set);
        }
        out.breakpoints = std::move(bps);
        return out;
    }

    /** Largest size over nonempty sets. */
    double sup_size(const Function& f, const SizeExpr& s) const {
        check_function(f);
        double out = 0;
        for (const auto& p : parts_) {
            auto sz = part_sizes(p, local(f, p), s);
            out = std::max(out, *std::max_element(sz.begin(), sz.end()));
        }
        return out;
    }

    NormResult norm(const Function& f, double p, const SizeExpr& s) const {
        check_exponent(p, "p");
        NormResult out;
        out.profile = profile(f, s);
        if (std::isinf(p)) {
            out.value = sup_size(f, s);
            return out;
        }
        const auto& pr = out.profile;
        double acc = 0, prev = 0;
        for (std::size_t i = 0; i + 1 < pr.plateaus.size(); ++i) {
            double next = std::pow(pr.breakpoints[i], p);
            acc += to_double(pr.plateaus[i]) * (next - prev);
            prev = next;
        }
        out.value = std::pow(acc, 1.0 / p);
        return out;
    }

private:
    struct Part {
        Mask mask = 0;
        int n = 0;
        MeasureTable mu, nu;
        std::vector<double> w;
        std::vector<Mask> nucomps;
    };

    static std::vector<double> local(const Function& f, const Part& p) {
        std::vector<double> out;
        for_each_bit(p.mask, [&](int x) { out.push_back(f[x]); });
        return out;
    }

    static const MeasureTable& level_table(const Part& p, const SizeExpr& s) { return s.is_outer() ? p.mu : p.nu; }

    static std::vector<double> inner_sizes(const Part& p, const std::vector<double>& fl, double r) {
        auto sums = detail::power_sums(fl, p.w, r, p.n);
        for (Mask a = 1; a < sums.size(); ++a) sums[a] = detail::inner_size_from_sum(sums[a], p.nu.dvalue(a), r);
        return sums;
    }

    /**
     * For every T inside one nu component: ||f 1_T||^q (or the sup when
     * q = inf). The l^r sizes of f 1_T are capped by sizes of f on subsets
     * of T, so one sort of f's sizes serves every T.
     */
    static std::vector<double> inner_memo(const Part& p, const std::vector<double>& fl, double q, double r) {
        auto ms = inner_sizes(p, fl, r);
        detail::subset_max(ms, p.n);
        std::vector<double> memo(ms.size(), 0.0);
        for (Mask qc : p.nucomps) {
            if (std::isinf(q)) {
                for (Mask c = qc; c; c = (c - 1) & qc) memo[c] = ms[c];
                continue;
            }
            auto sorted = detail::sort_masks(ms, qc);
            std::vector<double> pw;
            pw.reserve(sorted.value.size());
            for (double v : sorted.value) pw.push_back(std::pow(v, q));
            for (Mask c = qc; c; c = (c - 1) & qc) memo[c] = detail::sweep_integral(sorted, pw, p.nu, c);
        }
        return memo;
    }

    static std::vector<double> part_sizes(const Part& p, const std::vector<double>& fl, const SizeExpr& s) {
        check_exponent(s.r, "r");
        if (!s.is_outer()) return inner_sizes(p, fl, s.r);
        check_exponent(s.q, "q");
        auto memo = inner_memo(p, fl, s.q, s.r);
        std::vector<double> out(memo.size(), 0.0);
        for (Mask a = 1; a < out.size(); ++a) {
            double acc = 0;
            for (Mask qc : p.nucomps)
                if (a & qc) acc = std::isinf(s.q) ? std::max(acc, memo[a & qc]) : acc + memo[a & qc];
            out[a] = std::isinf(s.q) ? acc : std::pow(acc / p.mu.dvalue(a), 1.0 / s.q);
        }
        return out;
    }

    FiniteSpace space_;
    int limit_;
    FactoredMeasure mu_, nu_;
    std::vector<Part> parts_;
};

inline double size_eval(const Evaluator& ev, const Function& f, Mask a, const SizeExpr& s) { return ev.size(f, a, s); }

inline LevelResult super_level_measure(const Evaluator& ev, const Function& f, const SizeExpr& s, double lambda) {
    return ev.super_level(f, s, lambda);
}

inline StepProfile step_profile(const Evaluator& ev, const Function& f, const SizeExpr& s) { return ev.profile(f, s); }

inline NormResult outer_norm(const Evaluator& ev, const Function& f, double p, const SizeExpr& s) {
    return ev.norm(f, p, s);
}

/**
 * Discrete sums over lambda = psi^k. With S the single sum and D the double
 * sum, lo * S <= ||f||^p <= hi * S and likewise for D.
 */
struct DiscretizedBounds {
    double single_sum = 0, double_sum = 0;
    double single_lo = 0, single_hi = 0;
    double double_lo = 0, double_hi = 0;
};

inline DiscretizedBounds discretized_bounds(const StepProfile& pr, double p, double psi) {
    if (!(psi > 1)) throw input_error("psi must exceed 1");
    if (!(p > 0) || std::isinf(p)) throw input_error("p must be finite and positive");
    DiscretizedBounds out;
    const double x = std::pow(psi, -p);
    out.single_lo = 1 - x;
    out.single_hi = 1 / x - 1;
    out.double_lo = (1 - x) * (1 - x);
    out.double_hi = (1 / x - 1) * (1 - x);
    if (pr.empty()) return out;
    const double m0 = to_double(pr.plateaus.front());
    const double b1 = pr.breakpoints.front(), blast = pr.breakpoints.back();
    // first k with psi^k >= b1; below it m is the first plateau
    int k0 = static_cast<int>(std::floor(std::log(b1) / std::log(psi))) - 1;
    while (std::pow(psi, k0) < b1) ++k0;
    std::vector<double> terms;  // m(psi^k) for k = k0, k0+1, ...
    for (int k = k0; std::pow(psi, k) < blast; ++k) terms.push_back(pr.at(std::pow(psi, k)));
    double single = m0 * std::pow(psi, k0 * p) / (1 / x - 1);
    for (std::size_t i = 0; i < terms.size(); ++i) single += std::pow(psi, (k0 + static_cast<int>(i)) * p) * terms[i];
    double tail = 0, dbl = 0;
    for (std::size_t i = terms.size(); i-- > 0;) {
        tail += terms[i];
        dbl += std::pow(psi, (k0 + static_cast<int>(i)) * p) * tail;
    }
    // k < k0: tail_k = (k0 - k) m0 + tail_{k0}
    dbl += m0 * std::pow(psi, k0 * p) * x / ((1 - x) * (1 - x)) + tail * std::pow(psi, k0 * p) / (1 / x - 1);
    out.single_sum = single;
    out.double_sum = dbl;
    return out;
}

inline DiscretizedBounds discretized_norm_bounds(const Evaluator& ev, const Function& f, double p, const SizeExpr& s,
                                                 double psi) {
    return discretized_bounds(ev.profile(f, s), p, psi);
}

inline double classical_lp(const FiniteSpace& space, const Function& f, double r) {
    check_exponent(r, "r");
    if (static_cast<int>(f.size()) != space.size()) throw input_error("function length differs from point count");
    double acc = 0;
    for (int i = 0; i < space.size(); ++i)
        acc = std::isinf(r) ? std::max(acc, f[i]) : acc + std::pow(f[i], r) * to_double(space.omega[i]);
    return std::isinf(r) ? acc : std::pow(acc, 1.0 / r);
}

}  // namespace olp

#endif
