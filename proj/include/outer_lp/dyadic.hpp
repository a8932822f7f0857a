#ifndef OUTER_LP_DYADIC_HPP
#define OUTER_LP_DYADIC_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "conditions.hpp"
#include "space.hpp"

namespace olp::dyadic {

using Bits = boost::dynamic_bitset<>;

inline constexpr int kDefaultStructuredLimit = 4096;

struct Index {
    int m = 0, l = 0, n = 0;
    auto operator<=>(const Index&) const = default;
    std::string str() const { return std::to_string(m) + "," + std::to_string(l) + "," + std::to_string(n); }
};

/** Floor division by 2^k, also for negative a. */
inline std::int64_t shr(std::int64_t a, int k) { return a >= 0 ? a >> k : -((-a - 1) >> k) - 1; }

inline Rat pow2(int e) { return e >= 0 ? Rat(std::int64_t{1} << e) : Rat(1, std::int64_t{1} << -e); }

struct Piece {
    Index idx;  // n is unused for strips
    Bits points;
    Rat weight;
};

/**
 * The truncated tile space X'_J: strips and trees cut down to it, empty ones
 * dropped, and identical point sets kept once under the smallest (m, l, n).
 */
class Setting {
public:
    explicit Setting(int j, int limit = kDefaultStructuredLimit) : j_(j) {
        if (j < 1) throw input_error("J must be at least 1");
        lo_ = -j + 1;
        hi_ = j;
        std::int64_t count = 0;
        for (int l = lo_; l <= hi_; ++l) count += mwidth(l) * nwidth(l);
        if (count > limit) throw capacity_error("X'_J has " + std::to_string(count) + " points, above the structured limit");
        for (int l = lo_; l <= hi_; ++l) {
            offset_.push_back(static_cast<int>(points_.size()));
            for (int m = mlo(l); m < -mlo(l); ++m)
                for (int n = nlo(l); n < -nlo(l); ++n) points_.push_back({m, l, n});
        }
        top_ = j + static_cast<int>(std::ceil(std::log2(j))) + 1;
        std::map<Bits, std::size_t> seen;
        for (int l = lo_; l <= top_; ++l)
            for (std::int64_t m = shr(mlo(lo_), l - lo_) - 1; m <= shr(-mlo(lo_), l - lo_) + 1; ++m) {
                Bits b = strip_points(static_cast<int>(m), l);
                if (b.none()) continue;
                Index idx{static_cast<int>(m), l, 0};
                add(strips_, strip_key_, seen, idx, std::move(b), pow2(l));
            }
        seen.clear();
        for (int l = lo_; l <= top_; ++l) {
            std::int64_t nmax = std::int64_t{j} << (j + l);
            for (std::int64_t m = shr(mlo(lo_), l - lo_) - 1; m <= shr(-mlo(lo_), l - lo_) + 1; ++m)
                for (std::int64_t n = -nmax; n < nmax; ++n) {
                    Bits b = tree_points(static_cast<int>(m), l, static_cast<int>(n));
                    if (b.none()) continue;
                    add(trees_, tree_key_, seen, {static_cast<int>(m), l, static_cast<int>(n)}, std::move(b), pow2(l));
                }
        }
        for (const auto& p : points_) own_.push_back(strip_key_.at({p.m, p.l, 0}));
    }

    int j() const { return j_; }
    int size() const { return static_cast<int>(points_.size()); }
    int lowest() const { return lo_; }
    int highest() const { return hi_; }
    const std::vector<Index>& points() const { return points_; }
    const std::vector<Piece>& strips() const { return strips_; }
    const std::vector<Piece>& trees() const { return trees_; }
    Bits empty() const { return Bits(points_.size()); }

    std::optional<int> find(Index p) const {
        if (p.l < lo_ || p.l > hi_ || p.m < mlo(p.l) || p.m >= -mlo(p.l) || p.n < nlo(p.l) || p.n >= -nlo(p.l))
            return std::nullopt;
        return offset_[p.l - lo_] + (p.m - mlo(p.l)) * static_cast<int>(nwidth(p.l)) + (p.n - nlo(p.l));
    }

    /** Index into strips() of the kept strip with this point set, if D'(m,l) is nonempty. */
    std::optional<std::size_t> strip_index(int m, int l) const {
        auto it = strip_key_.find({m, l, 0});
        if (it == strip_key_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<std::size_t> tree_index(int m, int l, int n) const {
        auto it = tree_key_.find({m, l, n});
        if (it == tree_key_.end()) return std::nullopt;
        return it->second;
    }

    /** Index into strips() of the strip whose upper half holds point i. */
    std::size_t own_strip(int i) const { return own_[i]; }

    Bits strip_points(int m, int l) const {
        Bits b = empty();
        for (int lp = lo_; lp <= std::min(l, hi_); ++lp) {
            int d = l - lp;
            for (std::int64_t mp = std::int64_t{m} << d; mp < (std::int64_t{m} + 1) << d; ++mp) {
                if (mp < mlo(lp) || mp >= -mlo(lp)) continue;
                for (int n = nlo(lp); n < -nlo(lp); ++n) b.set(*find({static_cast<int>(mp), lp, n}));
            }
        }
        return b;
    }

    Bits tree_points(int m, int l, int n) const {
        Bits b = empty();
        for (int lp = lo_; lp <= std::min(l, hi_); ++lp) {
            int d = l - lp;
            auto np = shr(n, d);
            for (std::int64_t mp = std::int64_t{m} << d; mp < (std::int64_t{m} + 1) << d; ++mp)
                if (auto i = find({static_cast<int>(mp), lp, static_cast<int>(np)})) b.set(*i);
        }
        return b;
    }

    /** Base interval I(m,l) = (2^l m, 2^l (m+1)] in units of 2^{lowest level}. */
    std::pair<std::int64_t, std::int64_t> base(const Index& s) const {
        int e = s.l - lo_;
        return {std::int64_t{s.m} << e, (std::int64_t{s.m} + 1) << e};
    }

    /** mu'(A) by the strip hierarchy: a strip either pays 2^l or hands A over to its two halves. */
    Rat structured_mu(const Bits& a) const {
        std::map<std::pair<int, std::int64_t>, bool> own, meets;
        for (auto i = a.find_first(); i != Bits::npos; i = a.find_next(i)) {
            const auto& p = points_[i];
            own[{p.l, p.m}] = true;
            for (int l = p.l; l <= top_; ++l) meets[{l, shr(p.m, l - p.l)}] = true;
        }
        std::function<Rat(int, std::int64_t)> cost = [&](int l, std::int64_t m) -> Rat {
            if (!meets.count({l, m})) return Rat(0);
            if (own.count({l, m}) || l == lo_) return pow2(l);
            return std::min(pow2(l), cost(l - 1, 2 * m) + cost(l - 1, 2 * m + 1));
        };
        Rat total(0);
        for (const auto& [key, v] : meets)
            if (key.first == top_) total += cost(top_, key.second);
        return total;
    }

    /**
     * nu'(A) by exact search: the highest point still uncovered must lie in
     * some tree, and only trees through it are tried. Trees whose trace on
     * the remainder is dominated by a cheaper one are skipped.
     */
    Rat structured_nu(const Bits& a) const {
        std::map<Bits, Rat> memo;
        return nu_search(a, memo);
    }

    Rat structured(Which w, const Bits& a) const { return w == Which::mu ? structured_mu(a) : structured_nu(a); }

    /** C(A) = M(N(Q(A))) as indices into strips(). */
    std::vector<std::size_t> cover(const Bits& a) const {
        std::vector<std::size_t> q;
        for (auto i = a.find_first(); i != Bits::npos; i = a.find_next(i)) q.push_back(own_[i]);
        std::sort(q.begin(), q.end());
        q.erase(std::unique(q.begin(), q.end()), q.end());
        return maximal(doubling(q));
    }

    Bits parent(const Bits& a) const {
        Bits b = empty();
        for (auto s : cover(a)) b |= strips_[s].points;
        return b;
    }

    /** Strips whose base is at least half covered by the bases of the given strips. */
    std::vector<std::size_t> doubling(const std::vector<std::size_t>& coll) const {
        std::vector<std::pair<std::int64_t, std::int64_t>> bases;
        for (auto s : coll) bases.push_back(base(strips_[s].idx));
        std::sort(bases.begin(), bases.end());
        std::vector<std::pair<std::int64_t, std::int64_t>> merged;
        for (auto iv : bases) {
            if (!merged.empty() && iv.first <= merged.back().second)
                merged.back().second = std::max(merged.back().second, iv.second);
            else
                merged.push_back(iv);
        }
        std::vector<std::size_t> out;
        for (std::size_t s = 0; s < strips_.size(); ++s) {
            auto [a, b] = base(strips_[s].idx);
            std::int64_t cov = 0;
            for (auto [c, d] : merged) cov += std::max<std::int64_t>(0, std::min(b, d) - std::max(a, c));
            if (2 * cov >= b - a) out.push_back(s);
        }
        return out;
    }

    /** Members not contained in another member. */
    std::vector<std::size_t> maximal(const std::vector<std::size_t>& coll) const {
        std::vector<std::size_t> out;
        for (auto s : coll) {
            bool top = true;
            for (auto t : coll)
                if (t != s && strips_[s].points.is_subset_of(strips_[t].points)) top = false;
            if (top) out.push_back(s);
        }
        return out;
    }

    Mask to_mask(const Bits& b) const {
        if (b.size() > 64) throw capacity_error("point set does not fit a 64-bit mask");
        return static_cast<Mask>(b.to_ulong());
    }
    Bits from_mask(Mask m) const {
        Bits b = empty();
        for_each_bit(m, [&](int x) { b.set(x); });
        return b;
    }

    /** The space with unit omega; needs at most 64 points. */
    FiniteSpace finite_space() const {
        if (size() > kMaxPoints) throw capacity_error("finite_space needs at most 64 points");
        FiniteSpace s;
        for (const auto& p : points_) {
            s.points.push_back(p.str());
            s.omega.push_back(Rat(1));
        }
        for (const auto& d : strips_) s.mu_gen.push_back({to_mask(d.points), d.weight});
        for (const auto& t : trees_) s.nu_gen.push_back({to_mask(t.points), t.weight});
        return s;
    }

    /** C = M N Q on 64-bit masks; atoms are the points sharing an own strip. */
    CoveringFunctionSpec covering_spec() const {
        if (size() > kMaxPoints) throw capacity_error("covering_spec needs at most 64 points");
        CoveringFunctionSpec c;
        c.rule = "dyadicMNQ";
        c.phi = Rat(2);
        for (const auto& d : strips_) c.family.push_back(to_mask(d.points));
        std::vector<Mask> atoms(strips_.size(), 0);
        for (int i = 0; i < size(); ++i) atoms[own_[i]] |= bit(i);
        for (Mask t : atoms)
            if (t) c.atoms.push_back(t);
        c.assign = [self = std::make_shared<const Setting>(*this)](Mask a) {
            std::vector<Mask> out;
            for (auto s : self->cover(self->from_mask(a))) out.push_back(self->to_mask(self->strips_[s].points));
            return out;
        };
        return c;
    }

    /** Tile volume |I(m,l)| * 2^{l-1} * |I(n,-l)| = 2^{l-1}. */
    static Rat volume(const Index& p) { return pow2(p.l - 1); }

private:
    std::int64_t mwidth(int l) const { return std::int64_t{2} * j_ << (j_ - l); }
    std::int64_t nwidth(int l) const { return std::int64_t{2} * j_ << (j_ + l); }
    int mlo(int l) const { return -static_cast<int>(std::int64_t{j_} << (j_ - l)); }
    int nlo(int l) const { return -static_cast<int>(std::int64_t{j_} << (j_ + l)); }

    static void add(std::vector<Piece>& list, std::map<Index, std::size_t>& key, std::map<Bits, std::size_t>& seen,
                    Index idx, Bits b, Rat w) {
        auto it = seen.find(b);
        if (it != seen.end()) {
            // candidates arrive level by level, so compare keys explicitly
            auto& kept = list[it->second];
            if (idx < kept.idx) {
                kept.idx = idx;
                kept.weight = w;
            }
            key[idx] = it->second;
            return;
        }
        seen.emplace(b, list.size());
        key[idx] = list.size();
        list.push_back({idx, std::move(b), w});
    }

    Rat nu_search(const Bits& a, std::map<Bits, Rat>& memo) const {
        if (a.none()) return Rat(0);
        if (auto it = memo.find(a); it != memo.end()) return it->second;
        std::size_t pick = a.find_first();
        for (auto i = a.find_next(pick); i != Bits::npos; i = a.find_next(i))
            if (points_[i].l > points_[pick].l) pick = i;
        const auto& p = points_[pick];
        std::vector<std::size_t> cand;
        for (int l = p.l; l <= top_; ++l) {
            int d = l - p.l;
            std::int64_t m = shr(p.m, d);
            for (std::int64_t n = std::int64_t{p.n} << d; n < (std::int64_t{p.n} + 1) << d; ++n)
                if (auto t = tree_index(static_cast<int>(m), l, static_cast<int>(n))) cand.push_back(*t);
        }
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        std::vector<std::pair<Bits, Rat>> opts;
        for (auto t : cand) opts.emplace_back(trees_[t].points & a, trees_[t].weight);
        Rat best(-1);
        for (std::size_t i = 0; i < opts.size(); ++i) {
            bool dominated = false;
            for (std::size_t k = 0; k < opts.size() && !dominated; ++k) {
                if (k == i || !opts[i].first.is_subset_of(opts[k].first) || opts[k].second > opts[i].second) continue;
                // strict domination, or an identical option with a lower index
                if (opts[k].first != opts[i].first || opts[k].second < opts[i].second || k < i) dominated = true;
            }
            if (dominated) continue;
            Rat v = opts[i].second + nu_search(a - opts[i].first, memo);
            if (best < 0 || v < best) best = v;
        }
        memo.emplace(a, best);
        return best;
    }

    int j_, lo_, hi_, top_;
    std::vector<Index> points_;
    std::vector<int> offset_;
    std::vector<Piece> strips_, trees_;
    std::map<Index, std::size_t> strip_key_, tree_key_;
    std::vector<std::size_t> own_;
};

/** F(f,r): a tile-constant value v on a tile of volume vol becomes v vol^{1/r}. */
inline std::vector<double> tile_map(const Setting& s, const std::vector<double>& v, double r) {
    if (static_cast<int>(v.size()) != s.size()) throw input_error("tile function length differs from point count");
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= 0)) throw input_error("tile values must be nonnegative");
        out[i] = std::isinf(r) ? v[i] : v[i] * std::pow(to_double(Setting::volume(s.points()[i])), 1 / r);
    }
    return out;
}

/** The same strips and trees, with omega the tile volume. */
inline FiniteSpace volume_space(const Setting& s) {
    FiniteSpace out = s.finite_space();
    for (int i = 0; i < s.size(); ++i) out.omega[i] = Setting::volume(s.points()[i]);
    return out;
}

}  // namespace olp::dyadic

#endif
