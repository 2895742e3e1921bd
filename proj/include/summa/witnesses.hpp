#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conditions.hpp"
#include "error.hpp"
#include "ideal_core.hpp"
#include "numeric.hpp"
#include "operator_matrix.hpp"

namespace summa {

struct HumpStage {
    std::size_t n = 0;
    index_t s = 0;           // chosen row
    index_t m = 0;           // cut: block M_n = (m_{n-1}, m_n]
    double row_norm = 0.0;   // ||A_{s_n, omega}|| (upper bound)
    double block_norm = 0.0; // ||A_{s_n, M_n}|| (upper bound)
    double block_value = 0.0;
    double achieved = 0.0;   // ||A_{s_n} x|| for the final x
    double bound = 0.0;      // guaranteed lower bound for achieved
    std::optional<index_t> avoided_zone;
    std::string rule;
};

struct Witness {
    std::size_t dim = 1;
    std::vector<double> values; // x_0 .. x_{prefix-1}, row-major
    std::vector<double> fill;   // value past the prefix
    SetDescriptor support = SetDescriptor::omega();
    std::vector<index_t> rows;
    std::vector<HumpStage> stages;
    double target = 0.0;       // eta_0 estimate
    double target_lower = 0.0; // lower end of its bracket
    double achieved = 0.0;     // measured J-limsup of ||A_n x||
    bool degenerate = false;
    std::size_t completed = 0;
    index_t horizon = 0;
    index_t estimate_horizon = 0;
    std::vector<index_t> measured_rows;

    std::size_t prefix() const noexcept { return dim ? values.size() / dim : 0; }

    std::vector<double> at(index_t k) const
    {
        if (k < prefix())
            return {values.begin() + static_cast<std::ptrdiff_t>(k * dim),
                    values.begin() + static_cast<std::ptrdiff_t>((k + 1) * dim)};
        return fill;
    }

    SequenceView x() const
    {
        auto vals = std::make_shared<const std::vector<double>>(values);
        auto tail = fill;
        const std::size_t d = dim;
        auto v = SequenceView::vector(d, [vals, tail, d](index_t k, double* out) {
            if ((k + 1) * d <= vals->size())
                std::copy_n(vals->data() + k * d, d, out);
            else
                std::copy(tail.begin(), tail.end(), out);
        });
        v.declared_bounded = true;
        v.declared_sup = 1.0;
        return v;
    }
};

struct SlidingHumpOptions {
    index_t horizon = 4096;
    std::size_t stages = 8;
    NormContext ctx{};
    bool verify_hypotheses = true;
    index_t verify_horizon = 2048;
    // eta_0 is measured on deep rows up to this horizon (0: the construction horizon, capped at 2^14).
    index_t estimate_horizon = 0;
    std::size_t measure_rows = 256;
    // Return the completed stages instead of raising HorizonExhausted.
    bool partial = false;
};

namespace detail {

// Increasing generating family Q_0 ⊆ Q_1 ⊆ ...: index of the first Q_k containing n.
inline std::optional<index_t> zone_of(const IdealSpec& J, index_t n)
{
    if (J.is_fin()) return n;
    auto g = J.generator_of(n);
    if (!g) return std::nullopt;
    return static_cast<index_t>(*g);
}

inline bool avoids(const IdealSpec& J, index_t t, std::optional<index_t> z)
{
    if (!z) return true;
    auto zt = zone_of(J, t);
    return !zt || *zt > *z;
}

inline void require_generated(const IdealSpec& J)
{
    if (!J.countably_generated())
        throw error(errc::unsupported_ideal, "witness constructions need a countably generated ideal, got " + J.str());
}

// Upper bound of ||A_{t, <= m}|| with early exit above the threshold.
inline double prefix_norm(const BlockMatrix& A, index_t t, index_t m, double threshold, NormContext ctx)
{
    if (A.is_scalar() && A.prefix_abs_sum) return A.prefix_abs_sum(t, m);
    std::vector<double> buf(A.block_size());
    double acc = 0.0;
    auto add = [&](index_t k) {
        A.entry(t, k, buf.data());
        if (A.is_scalar())
            acc += std::fabs(buf[0]);
        else
            acc += op_norm_block(Block(A.m(), A.d(), buf), ctx);
    };
    if (A.row_support) {
        for (index_t k : A.row_support(t)) {
            if (k > m) continue;
            add(k);
            if (acc > threshold) return acc;
        }
        return acc;
    }
    const index_t hi = A.column_finite_bound ? std::min(m, A.column_finite_bound(t)) : m;
    for (index_t k = 0; k <= hi; ++k) {
        add(k);
        if (acc > threshold) return acc;
    }
    return acc;
}

struct row_norms {
    double upper = 0.0;
    double lower = 0.0;
};

inline row_norms full_norm(const BlockMatrix& A, index_t t, index_t H, NormContext ctx)
{
    auto tp = tail_profile(A, t, H, ctx);
    row_norms r{tp.total_upper(), tp.total_lower()};
    if (!tp.complete && tp.beyond) r.upper += *tp.beyond;
    return r;
}

// Smallest cut K >= first with ||A_{s, >= K}|| <= threshold.
inline std::optional<index_t> tail_cut(const BlockMatrix& A, index_t s, index_t first, index_t H, double threshold,
                                       NormContext ctx)
{
    auto tp = tail_profile(A, s, H, ctx);
    const double extra = tp.complete ? 0.0 : (tp.beyond ? *tp.beyond : std::numeric_limits<double>::infinity());
    if (tp.upper_from(first) + extra <= threshold) return first;
    for (std::size_t p = 0; p < tp.cols.size(); ++p)
        if (tp.cols[p] > first && tp.upper[p] + extra <= threshold) return tp.cols[p];
    if (tp.complete) return std::max(first, tp.cols.empty() ? index_t{0} : tp.cols.back() + 1);
    return std::nullopt;
}

inline std::vector<index_t> sample_evenly(const std::vector<index_t>& v, std::size_t budget)
{
    if (v.size() <= budget || budget < 2) return v;
    std::vector<index_t> out;
    for (std::size_t i = 0; i < budget; ++i) out.push_back(v[(i * (v.size() - 1)) / (budget - 1)]);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::vector<index_t> deep_rows(const IdealSpec& J, index_t H, std::size_t budget)
{
    std::vector<index_t> deep;
    if (J.level_structured()) {
        const index_t step = index_t{1} << level_cap(H);
        for (index_t n = step; n <= H; n += step) deep.push_back(n);
    } else {
        for (index_t n = H / 2; n <= H; ++n)
            if (in_deep(J, n, H)) deep.push_back(n);
    }
    return sample_evenly(deep, budget);
}

inline std::vector<double> first_extreme(std::size_t d, NormContext::domain dom)
{
    return extreme_point(d, dom, 0, false);
}

// Writes maximizing block values of row s on columns (lo, hi] into x, aligned with the contribution of columns <= lo.
inline std::pair<double, double> place_block(const BlockMatrix& A, index_t s, index_t lo, index_t hi, index_t H,
                                             NormContext ctx, std::vector<double>& x, bool first)
{
    const std::size_t d = A.d(), m = A.m();
    auto row = A.row(s, H);
    std::vector<Block> blocks;
    std::vector<index_t> cols;
    for (std::size_t p = 0; p < row->size(); ++p) {
        const index_t k = row->cols[p];
        if ((first ? k >= lo : k > lo) && k <= hi) {
            blocks.push_back(row->dense(p));
            cols.push_back(k);
        }
    }
    const std::size_t begin = first ? lo : lo + 1;
    const auto unit = first_extreme(d, ctx.dom);
    if (x.size() < (hi + 1) * d) {
        const std::size_t old = x.size() / d;
        x.resize((hi + 1) * d);
        for (std::size_t k = std::max(old, begin); k <= hi; ++k) std::copy(unit.begin(), unit.end(), x.begin() + k * d);
    }
    if (blocks.empty()) return {0.0, 0.0};
    auto g = group_norm_blocks(blocks, NormContext{ctx.dom, ctx.cod}, GroupNormMode::automatic, A.nonnegative);
    auto mx = maximize_blocks(blocks, ctx);
    std::vector<double> c(m, 0.0), v(m, 0.0);
    for (std::size_t p = 0; p < row->size(); ++p) {
        const index_t k = row->cols[p];
        if (k >= begin) continue;
        row->for_each(p, [&](std::size_t i, std::size_t j, double a) { c[i] += a * x[k * d + j]; });
    }
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < d; ++j) v[i] += blocks[b](i, j) * mx.x[b][j];
    std::vector<double> plus(m), minus(m);
    for (std::size_t i = 0; i < m; ++i) {
        plus[i] = c[i] + v[i];
        minus[i] = c[i] - v[i];
    }
    const double sign = codomain_norm(minus, ctx.cod) > codomain_norm(plus, ctx.cod) ? -1.0 : 1.0;
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (std::size_t j = 0; j < d; ++j) x[cols[b] * d + j] = sign * mx.x[b][j];
    return {mx.value, g.upper};
}

inline double row_image(const BlockMatrix& A, const Witness& w, index_t n, index_t H, NormContext::codomain cod)
{
    auto r = transform(A, w.x(), n, H);
    return codomain_norm(r.value, cod);
}

inline void finish(const BlockMatrix& A, const IdealSpec& J, Witness& w, const SlidingHumpOptions& o)
{
    const index_t H = o.horizon;
    std::vector<index_t> rows = deep_rows(J, H, o.measure_rows);
    for (const auto& st : w.stages) rows.push_back(st.s);
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    double best = 0.0;
    for (index_t n : rows) {
        double v = row_image(A, w, n, H, o.ctx.cod);
        for (auto& st : w.stages)
            if (st.s == n) st.achieved = v;
        if (J.level_structured() ? (n != 0 && nu2(n) >= level_cap(H)) : in_deep(J, n, H)) best = std::max(best, v);
    }
    w.measured_rows = std::move(rows);
    w.achieved = best;
    w.completed = w.stages.empty() ? 0 : w.stages.size() - 1;
    for (const auto& st : w.stages) w.rows.push_back(st.s);
}

} // namespace detail

inline Witness sliding_hump(const BlockMatrix& A, const IdealSpec& J, const SlidingHumpOptions& o = {})
{
    detail::require_generated(J);
    if (o.stages < 4) throw std::invalid_argument("sliding_hump: stages must be >= 4");
    const index_t H = o.horizon;
    if (H < 16) throw error(errc::insufficient_horizon, "sliding_hump needs horizon >= 16");
    if (o.verify_hypotheses) {
        CheckOptions co;
        co.horizon = std::min(H, std::max<index_t>(o.verify_horizon, 16));
        co.ctx = o.ctx;
        for (const auto& v : check_T(A, Block(A.m(), A.d(), 0.0), IdealSpec::fin(), J, co, {"T1♭", "T3♮", "T6♭"}))
            if (!v.passed())
                throw error(errc::hypothesis_failed, v.id + " is " + to_string(v.status) + " at horizon " +
                                                         std::to_string(co.horizon));
    }
    Witness w;
    w.dim = A.d();
    w.horizon = H;
    w.fill = detail::first_extreme(A.d(), o.ctx.dom);
    const index_t He = o.estimate_horizon ? std::min(o.estimate_horizon, H) : std::min<index_t>(H, index_t{1} << 14);
    w.estimate_horizon = He;
    double eta = 0.0, eta_lo = 0.0;
    for (index_t n : detail::deep_rows(J, He, o.measure_rows)) {
        auto r = detail::full_norm(A, n, He, o.ctx);
        eta = std::max(eta, r.upper);
        eta_lo = std::max(eta_lo, r.lower);
    }
    w.target = eta;
    w.target_lower = eta_lo;
    if (!(eta_lo > 1e-12)) {
        w.degenerate = true;
        detail::finish(A, J, w, o);
        return w;
    }

    auto in_E = [&](double norm, std::size_t n) { return std::fabs(norm - eta) <= eta_lo / std::ldexp(1.0, static_cast<int>(n)); };
    // Stage 0.
    index_t s = 0;
    detail::row_norms rn;
    for (;; ++s) {
        if (s > H) throw error(errc::horizon_exhausted, "no row within eta_0 of the row-norm limsup", 0);
        rn = detail::full_norm(A, s, H, o.ctx);
        if (in_E(rn.upper, 0)) break;
    }
    index_t m = 0;
    if (auto c = detail::tail_cut(A, s, 0, H, eta_lo, o.ctx))
        m = *c;
    else if (!o.partial)
        throw error(errc::horizon_exhausted, "row tail does not fall below eta_0 at stage 0", 0);
    auto [bv0, bn0] = detail::place_block(A, s, 0, m, H, o.ctx, w.values, true);
    w.stages.push_back({0, s, m, rn.upper, bn0, bv0, 0.0, 0.0, std::nullopt, "start"});

    for (std::size_t n = 1; n <= o.stages; ++n) {
        const double thr = eta_lo / std::ldexp(1.0, static_cast<int>(n));
        const auto zone = detail::zone_of(J, s);
        std::optional<index_t> next;
        for (index_t t = s + 1; t <= H; ++t) {
            if (!detail::avoids(J, t, zone)) continue;
            if (detail::prefix_norm(A, t, m, thr, o.ctx) > thr) continue;
            auto r = detail::full_norm(A, t, H, o.ctx);
            if (!in_E(r.upper, n)) continue;
            next = t;
            rn = r;
            break;
        }
        if (!next) {
            if (o.partial) break;
            throw error(errc::horizon_exhausted, "no admissible row at stage " + std::to_string(n), static_cast<long>(n));
        }
        auto mc = detail::tail_cut(A, *next, m + 1, H, thr, o.ctx);
        if (!mc) {
            if (o.partial) break;
            throw error(errc::horizon_exhausted, "row tail does not fall below eta_0/2^n at stage " + std::to_string(n),
                        static_cast<long>(n));
        }
        const index_t m_new = *mc;
        auto [bv, bn] = detail::place_block(A, *next, m, m_new, H, o.ctx, w.values, false);
        const double bound = eta_lo * (1.0 - std::ldexp(1.0, 3 - static_cast<int>(n)));
        w.stages.push_back({n, *next, m_new, rn.upper, bn, bv, 0.0, bound, zone, "hump"});
        s = *next;
        m = m_new;
    }
    // Past the last cut: maximize the horizon row so the tail is not arbitrary at the rows that are measured.
    if (m < H) detail::place_block(A, H, m, H, H, o.ctx, w.values, false);
    detail::finish(A, J, w, o);
    return w;
}

inline Witness sliding_hump_unbounded(const BlockMatrix& A, const IdealSpec& J, const SlidingHumpOptions& o = {})
{
    detail::require_generated(J);
    if (o.stages < 1) throw std::invalid_argument("sliding_hump_unbounded: stages must be >= 1");
    const index_t H = o.horizon;
    if (H < 16) throw error(errc::insufficient_horizon, "sliding_hump_unbounded needs horizon >= 16");
    if (o.verify_hypotheses) {
        CheckOptions co;
        co.horizon = std::min(H, std::max<index_t>(o.verify_horizon, 16));
        co.ctx = o.ctx;
        for (const auto& v : check_T(A, Block(A.m(), A.d(), 0.0), IdealSpec::fin(), J, co, {"T3♮"}))
            if (!v.passed()) throw error(errc::hypothesis_failed, v.id + " is " + to_string(v.status));
    }
    Witness w;
    w.dim = A.d();
    w.horizon = H;
    w.target = std::numeric_limits<double>::infinity();
    w.target_lower = std::numeric_limits<double>::infinity();
    w.fill = detail::first_extreme(A.d(), o.ctx.dom);
    w.estimate_horizon = H;
    // Row norms on a geometric sample decide whether the stage sets E_n can be nonempty.
    double sampled_sup = 0.0;
    for (index_t t = 1; t <= H + 1; t *= 2) sampled_sup = std::max(sampled_sup, detail::full_norm(A, t - 1, H, o.ctx).upper);
    sampled_sup = std::max(sampled_sup, detail::full_norm(A, H, H, o.ctx).upper);

    const double one = 1.0;
    index_t s = 0;
    detail::row_norms rn = detail::full_norm(A, 0, H, o.ctx);
    index_t m = 0;
    if (auto c = detail::tail_cut(A, 0, 0, H, one, o.ctx))
        m = *c;
    else if (!o.partial)
        throw error(errc::horizon_exhausted, "row tail does not fall below 1 at stage 0", 0);
    auto [bv0, bn0] = detail::place_block(A, s, 0, m, H, o.ctx, w.values, true);
    w.stages.push_back({0, s, m, rn.upper, bn0, bv0, 0.0, 0.0, std::nullopt, "start"});

    for (std::size_t n = 1; n <= o.stages; ++n) {
        const double need = static_cast<double>(n);
        if (sampled_sup < need)
            throw error(errc::not_divergent, "no sampled row reaches norm " + std::to_string(n), static_cast<long>(n));
        const auto zone = detail::zone_of(J, s);
        std::optional<index_t> next;
        std::string rule = "hump";
        std::vector<double> xv(A.d());
        auto prefix_image = [&](index_t t) {
            std::vector<kahan> acc(A.m());
            std::vector<double> buf(A.block_size());
            auto add = [&](index_t k) {
                A.entry(t, k, buf.data());
                for (std::size_t i = 0; i < A.m(); ++i)
                    for (std::size_t j = 0; j < A.d(); ++j) acc[i] += buf[i * A.d() + j] * w.values[k * A.d() + j];
            };
            if (A.row_support) {
                for (index_t k : A.row_support(t))
                    if (k <= m) add(k);
            } else {
                const index_t hi = A.column_finite_bound ? std::min(m, A.column_finite_bound(t)) : m;
                for (index_t k = 0; k <= hi; ++k) add(k);
            }
            std::vector<double> y(A.m());
            for (std::size_t i = 0; i < A.m(); ++i) y[i] = acc[i].value();
            return codomain_norm(y, o.ctx.cod);
        };
        for (index_t t = s + 1; t <= H && !next; ++t) {
            if (!detail::avoids(J, t, zone)) continue;
            auto r = detail::full_norm(A, t, H, o.ctx);
            if (r.upper < need) continue;
            if (prefix_image(t) > one) continue;
            next = t;
            rn = r;
        }
        if (!next) {
            // Block signs are aligned with the earlier contribution, so a large tail past the cut suffices.
            for (index_t t = s + 1; t <= H && !next; ++t) {
                if (!detail::avoids(J, t, zone)) continue;
                auto tp = tail_profile(A, t, H, o.ctx);
                if (tp.total_upper() < need || tp.lower_from(m + 1) < need - 2.0) continue;
                next = t;
                rn = {tp.total_upper(), tp.total_lower()};
                rule = "aligned";
            }
        }
        if (!next) {
            if (o.partial) break;
            throw error(errc::horizon_exhausted, "no admissible row at stage " + std::to_string(n), static_cast<long>(n));
        }
        auto mc = detail::tail_cut(A, *next, m + 1, H, one, o.ctx);
        if (!mc) {
            if (o.partial) break;
            throw error(errc::horizon_exhausted, "row tail does not fall below 1 at stage " + std::to_string(n),
                        static_cast<long>(n));
        }
        const index_t m_new = *mc;
        auto [bv, bn] = detail::place_block(A, *next, m, m_new, H, o.ctx, w.values, false);
        w.stages.push_back({n, *next, m_new, rn.upper, bn, bv, 0.0, need - 5.0, zone, rule});
        s = *next;
        m = m_new;
    }
    if (m < H) detail::place_block(A, H, m, H, H, o.ctx, w.values, false);
    detail::finish(A, J, w, o);
    return w;
}

// ------------------------------------------------------------------------------------------------

struct HahnSchurResult {
    SetDescriptor E;
    double defect = 0.0; // measured J-limsup |sum_{k in E} a_{n,k}|
    double eta0 = 0.0;   // J-limsup sum_k |a_{n,k}|
    double row_sum_limit = 0.0;
    Witness witness;
    bool unbounded = false;
};

namespace detail {

// Compact description of {k <= H : x_k = 1}, extended by the tail value.
inline SetDescriptor compress_positive(const std::vector<index_t>& elems, index_t H, bool tail_positive)
{
    const std::size_t cnt = elems.size();
    if (cnt == H + 1 && tail_positive) return SetDescriptor::omega();
    if (cnt == 0 && !tail_positive) return SetDescriptor::empty();
    if (cnt >= 2) {
        const index_t off = elems[0], step = elems[1] - elems[0];
        bool ap = step > 0 && off < step;
        for (std::size_t i = 0; ap && i < cnt; ++i) ap = elems[i] == off + i * step;
        if (ap && elems.back() + step > H) return SetDescriptor::ap(off, step);
    }
    auto fin = SetDescriptor::finite(elems);
    if (!tail_positive) return fin;
    return SetDescriptor::unite({fin, SetDescriptor::complement(SetDescriptor::range(0, H))});
}

} // namespace detail

inline HahnSchurResult hahn_schur_witness(const BlockMatrix& A, const IdealSpec& J, const SlidingHumpOptions& opt = {})
{
    if (!A.is_scalar()) throw error(errc::unsupported_norm_context, "hahn_schur_witness needs a scalar matrix");
    detail::require_generated(J);
    SlidingHumpOptions o = opt;
    o.ctx = NormContext::one_norm();
    const index_t H = o.horizon;
    HahnSchurResult r;
    std::vector<double> abs(H + 1), sum(H + 1);
    for (index_t n = 0; n <= H; ++n) {
        auto row = A.row(n, H);
        kahan a, s;
        for (std::size_t p = 0; p < row->size(); ++p) {
            double v = row->scalar_at(p);
            a += std::fabs(v);
            s += v;
        }
        abs[n] = a.value();
        sum[n] = s.value();
    }
    r.eta0 = std::max(0.0, detail::limsup_at(J, abs, H));
    auto lim = ideal_lim_sampled(J, sum, 1, H, 1e-6);
    r.row_sum_limit = lim.value();
    auto growth = detail::check_bounded(abs, abs, H, 1e-3);
    r.unbounded = growth.status == Status::fail;
    CheckOptions co;
    co.horizon = H;
    if (!r.unbounded && detail::check_vanishing(J, abs, abs, H, co).status == Status::pass) {
        r.eta0 = 0.0;
        Witness& w = r.witness;
        w.horizon = H;
        w.fill = detail::first_extreme(1, o.ctx.dom);
        w.degenerate = true;
        detail::finish(A, J, w, o);
    } else {
        r.witness = r.unbounded ? sliding_hump_unbounded(A, J, o) : sliding_hump(A, J, o);
    }
    std::vector<index_t> elems;
    for (index_t k = 0; k <= H; ++k)
        if (r.witness.at(k)[0] > 0) elems.push_back(k);
    r.E = detail::compress_positive(elems, H, r.witness.fill[0] > 0);
    std::vector<double> es(H + 1);
    for (index_t n = 0; n <= H; ++n) {
        auto row = A.row(n, H);
        kahan s;
        for (std::size_t p = 0; p < row->size(); ++p)
            if (r.E.contains(row->cols[p])) s += row->scalar_at(p);
        es[n] = std::fabs(s.value());
    }
    r.defect = std::max(0.0, detail::limsup_at(J, es, H));
    return r;
}

// ------------------------------------------------------------------------------------------------

struct DivergenceWitness {
    std::vector<double> kappa;
    std::vector<std::vector<double>> directions; // y_k
    std::vector<std::vector<double>> x;          // x_k = kappa_k y_k
    std::vector<double> partial_norms;           // ||sum_{k<=n} T_k x_k||
};

// x_n = kappa_n y_n with kappa_n = (n + ||sum_{k<n} T_k x_k||) / ||T_n y_n||, so partial sums have norm >= n.
inline DivergenceWitness divergence_witness(const std::vector<Block>& T, NormContext ctx = {})
{
    DivergenceWitness out;
    if (T.empty()) return out;
    const std::size_t m = T.front().rows, d = T.front().cols;
    std::vector<double> S(m, 0.0);
    for (std::size_t n = 0; n < T.size(); ++n) {
        const Block& B = T[n];
        if (B.rows != m || B.cols != d) throw std::invalid_argument("divergence_witness: block shape mismatch");
        if (B.is_zero()) throw error(errc::zero_operator, "block " + std::to_string(n) + " is zero");
        // Column extreme maximizing ||T_n y||, with the sign that keeps the partial sum growing.
        const std::size_t cnt = ctx.dom == NormContext::domain::one ? d : (d <= detail::max_sign_dim ? std::size_t{1} << (d - 1) : d);
        std::vector<double> y;
        double best = -1.0;
        for (std::size_t c = 0; c < cnt; ++c) {
            auto e = detail::extreme_point(d, ctx.dom, c, false);
            double v = codomain_norm(B.apply(e), ctx.cod);
            if (v > best) {
                best = v;
                y = std::move(e);
            }
        }
        auto Ty = B.apply(y);
        const double TyN = codomain_norm(Ty, ctx.cod);
        const double kap = (static_cast<double>(n) + codomain_norm(S, ctx.cod)) / TyN;
        std::vector<double> sp(m), sm(m);
        for (std::size_t i = 0; i < m; ++i) {
            sp[i] = S[i] + kap * Ty[i];
            sm[i] = S[i] - kap * Ty[i];
        }
        double sign = codomain_norm(sm, ctx.cod) > codomain_norm(sp, ctx.cod) ? -1.0 : 1.0;
        if (n == 0) sign = 1.0;
        for (auto& v : y) v *= sign;
        std::vector<double> xn(d);
        for (std::size_t j = 0; j < d; ++j) xn[j] = (n == 0 ? 1.0 : kap) * y[j];
        const double step = n == 0 ? 1.0 : kap;
        for (std::size_t i = 0; i < m; ++i) S[i] += sign * step * Ty[i];
        out.kappa.push_back(step);
        out.directions.push_back(y);
        out.x.push_back(std::move(xn));
        out.partial_norms.push_back(codomain_norm(S, ctx.cod));
    }
    return out;
}

} // namespace summa
