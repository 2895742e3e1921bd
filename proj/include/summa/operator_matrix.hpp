#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "ideal_core.hpp"
#include "numeric.hpp"

namespace summa {

struct NormContext {
    enum class domain { one, sup_unit };
    enum class codomain { one, sup };
    domain dom = domain::one;
    codomain cod = codomain::one;

    static NormContext one_norm() { return {}; }
    static NormContext positive() { return {domain::sup_unit, codomain::sup}; }
};

struct RankOneForm {
    std::function<double(index_t, index_t)> a;
    Block A0;
};

class BlockMatrix {
public:
    using rule_t = std::function<void(index_t n, index_t k, double* out)>;

    BlockMatrix() = default;
    // d: domain dimension, m: codomain dimension; the rule writes the m x d block row-major.
    BlockMatrix(std::size_t d, std::size_t m, rule_t rule)
        : d_(d), m_(m), rule_(std::move(rule)), cache_(std::make_shared<cache_state>())
    {
    }

    struct Entry {
        std::uint32_t i;
        std::uint32_t j;
        double v;
    };
    using sparse_rule_t = std::function<void(index_t n, index_t k, std::vector<Entry>& out)>;

    // Blocks given by their nonzero entries; rows store only nonempty blocks.
    static BlockMatrix sparse(std::size_t d, std::size_t m, sparse_rule_t srule)
    {
        auto shared = std::make_shared<sparse_rule_t>(std::move(srule));
        BlockMatrix A(d, m, [shared, d, m](index_t n, index_t k, double* out) {
            std::fill(out, out + d * m, 0.0);
            std::vector<Entry> e;
            (*shared)(n, k, e);
            for (const auto& t : e) out[t.i * d + t.j] += t.v;
        });
        A.sparse_rule_ = shared;
        return A;
    }

    static BlockMatrix scalar(std::function<double(index_t, index_t)> a)
    {
        return BlockMatrix(1, 1, [a = std::move(a)](index_t n, index_t k, double* out) { out[0] = a(n, k); });
    }

    std::size_t d() const noexcept { return d_; }
    std::size_t m() const noexcept { return m_; }
    std::size_t block_size() const noexcept { return d_ * m_; }
    bool is_scalar() const noexcept { return d_ == 1 && m_ == 1; }

    std::string name = "custom";
    // Row n vanishes for k > column_finite_bound(n).
    std::function<index_t(index_t)> column_finite_bound;
    // tail_decay(n, eps) = K with ||A_{n, >=K}|| <= eps.
    std::function<index_t(index_t, double)> tail_decay;
    bool nonnegative = false;
    std::optional<RankOneForm> rank_one;
    std::function<q64(index_t, index_t)> exact;
    // Scalar matrices: closed form of sum_{k <= m} |a_{n,k}|.
    std::function<double(index_t n, index_t m)> prefix_abs_sum;

    void entry(index_t n, index_t k, double* out) const
    {
        if (column_finite_bound && !row_support && k > column_finite_bound(n)) {
            std::fill(out, out + block_size(), 0.0);
            return;
        }
        rule_(n, k, out);
    }

    Block block(index_t n, index_t k) const
    {
        Block b(m_, d_);
        entry(n, k, b.v.data());
        return b;
    }

    // Last column index that can be nonzero in row n, capped at the horizon.
    index_t row_extent(index_t n, index_t horizon) const
    {
        if (column_finite_bound) return std::min(horizon, column_finite_bound(n));
        return horizon;
    }

    bool row_finite(index_t n, index_t horizon) const
    {
        if (row_support) return true;
        return column_finite_bound && column_finite_bound(n) <= horizon;
    }

    struct SparseRow {
        std::size_t m = 1;
        std::size_t d = 1;
        std::vector<index_t> cols; // increasing
        bool complete = false;     // every nonzero block of the row is present
        // Dense storage: cols.size() blocks, each m x d row-major.
        std::vector<double> vals;
        // Sparse storage: entries of block p are ent[start[p] .. start[p+1]).
        bool sparse = false;
        std::vector<std::size_t> start;
        std::vector<Entry> ent;

        std::size_t size() const noexcept { return cols.size(); }
        std::size_t stored() const noexcept { return vals.size() + cols.size() + 2 * ent.size() + start.size(); }

        template <typename F>
        void for_each(std::size_t p, F&& f) const
        {
            if (sparse) {
                for (std::size_t e = start[p]; e < start[p + 1]; ++e) f(std::size_t{ent[e].i}, std::size_t{ent[e].j}, ent[e].v);
                return;
            }
            const double* b = vals.data() + p * m * d;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < d; ++j) f(i, j, b[i * d + j]);
        }

        Block dense(std::size_t p) const
        {
            Block b(m, d);
            for_each(p, [&](std::size_t i, std::size_t j, double v) { b(i, j) += v; });
            return b;
        }

        double scalar_at(std::size_t p) const
        {
            if (!sparse) return vals[p];
            double s = 0.0;
            for (std::size_t e = start[p]; e < start[p + 1]; ++e) s += ent[e].v;
            return s;
        }
    };
    using row_ptr = std::shared_ptr<const SparseRow>;

    // Row n restricted to columns <= horizon, or its full support when row_support is set. Memoized.
    row_ptr row(index_t n, index_t horizon) const
    {
        const index_t ext = row_extent(n, horizon);
        const index_t key = row_support ? 0 : ext + 1;
        if (cache_) {
            std::lock_guard<std::mutex> lock(cache_->mu);
            auto it = cache_->rows.find(n);
            if (it != cache_->rows.end() && it->second.first == key) return it->second.second;
        }
        auto r = std::make_shared<SparseRow>();
        r->m = m_;
        r->d = d_;
        std::vector<index_t> candidates;
        if (row_support) {
            candidates = row_support(n);
            std::sort(candidates.begin(), candidates.end());
            candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
            r->complete = true;
        } else {
            candidates.resize(ext + 1);
            for (index_t k = 0; k <= ext; ++k) candidates[k] = k;
            r->complete = row_finite(n, horizon);
        }
        if (sparse_rule_) {
            r->sparse = true;
            r->start.push_back(0);
            std::vector<Entry> e;
            for (index_t k : candidates) {
                e.clear();
                (*sparse_rule_)(n, k, e);
                std::size_t kept = 0;
                for (const auto& t : e)
                    if (t.v != 0.0) {
                        r->ent.push_back(t);
                        ++kept;
                    }
                if (!kept) continue;
                r->cols.push_back(k);
                r->start.push_back(r->ent.size());
            }
        } else {
            const std::size_t bs = block_size();
            r->cols = std::move(candidates);
            r->vals.assign(r->cols.size() * bs, 0.0);
            for (std::size_t p = 0; p < r->cols.size(); ++p) rule_(n, r->cols[p], r->vals.data() + p * bs);
        }
        if (cache_) {
            std::lock_guard<std::mutex> lock(cache_->mu);
            const std::size_t sz = r->stored();
            if (cache_->stored + sz > cache_state::capacity) {
                cache_->rows.clear();
                cache_->stored = 0;
            }
            auto& slot = cache_->rows[n];
            if (slot.second) cache_->stored -= slot.second->stored();
            slot = {key, r};
            cache_->stored += sz;
        }
        return r;
    }

    void clear_cache() const
    {
        if (!cache_) return;
        std::lock_guard<std::mutex> lock(cache_->mu);
        cache_->rows.clear();
        cache_->stored = 0;
    }

    // Finite column support of row n, for matrices whose rows are sparse over a large index range.
    std::function<std::vector<index_t>(index_t)> row_support;

private:
    struct cache_state {
        static constexpr std::size_t capacity = std::size_t{1} << 23;
        std::mutex mu;
        std::unordered_map<index_t, std::pair<index_t, row_ptr>> rows;
        std::size_t stored = 0;
    };

    std::size_t d_ = 1;
    std::size_t m_ = 1;
    rule_t rule_;
    std::shared_ptr<sparse_rule_t> sparse_rule_;
    std::shared_ptr<cache_state> cache_;
};

inline double codomain_norm(const double* y, std::size_t m, NormContext::codomain c)
{
    if (c == NormContext::codomain::one) {
        kahan s;
        for (std::size_t i = 0; i < m; ++i) s += std::fabs(y[i]);
        return s.value();
    }
    double r = 0.0;
    for (std::size_t i = 0; i < m; ++i) r = std::max(r, std::fabs(y[i]));
    return r;
}

inline double codomain_norm(const std::vector<double>& y, NormContext::codomain c)
{
    return codomain_norm(y.data(), y.size(), c);
}

inline double domain_norm(const double* x, std::size_t d, NormContext::domain c)
{
    if (c == NormContext::domain::one) {
        kahan s;
        for (std::size_t j = 0; j < d; ++j) s += std::fabs(x[j]);
        return s.value();
    }
    double r = 0.0;
    for (std::size_t j = 0; j < d; ++j) r = std::max(r, std::fabs(x[j]));
    return r;
}

namespace detail {

inline constexpr std::size_t max_sign_dim = 20;

// Images of the extreme points of the domain unit ball under an m x d block (one per ± pair).
inline std::vector<std::vector<double>> extreme_images(const double* blk, std::size_t m, std::size_t d,
                                                       NormContext::domain dom)
{
    std::vector<std::vector<double>> out;
    if (dom == NormContext::domain::one) {
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> v(m);
            for (std::size_t i = 0; i < m; ++i) v[i] = blk[i * d + j];
            out.push_back(std::move(v));
        }
        return out;
    }
    if (d > max_sign_dim) throw error(errc::unsupported_norm_context, "sign enumeration beyond dimension 20");
    const std::size_t half = std::size_t{1} << (d - 1);
    for (std::size_t mask = 0; mask < half; ++mask) {
        std::vector<double> v(m, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
            double s = (j == d - 1 || !((mask >> j) & 1u)) ? 1.0 : -1.0;
            for (std::size_t i = 0; i < m; ++i) v[i] += s * blk[i * d + j];
        }
        out.push_back(std::move(v));
    }
    return out;
}

inline std::vector<double> extreme_point(std::size_t d, NormContext::domain dom, std::size_t idx, bool neg)
{
    std::vector<double> x(d, 0.0);
    const double s = neg ? -1.0 : 1.0;
    if (dom == NormContext::domain::one) {
        x[idx] = s;
        return x;
    }
    for (std::size_t j = 0; j < d; ++j) x[j] = s * ((j == d - 1 || !((idx >> j) & 1u)) ? 1.0 : -1.0);
    return x;
}

} // namespace detail

// Operator norm of an m x d block for the given norm pair.
inline double op_norm_block(const Block& M, NormContext ctx = {})
{
    using D = NormContext::domain;
    using C = NormContext::codomain;
    if (ctx.dom == D::one && ctx.cod == C::one) {
        double best = 0.0;
        for (std::size_t j = 0; j < M.cols; ++j) {
            kahan s;
            for (std::size_t i = 0; i < M.rows; ++i) s += std::fabs(M(i, j));
            best = std::max(best, s.value());
        }
        return best;
    }
    if (ctx.dom == D::one && ctx.cod == C::sup) {
        double best = 0.0;
        for (double a : M.v) best = std::max(best, std::fabs(a));
        return best;
    }
    if (ctx.dom == D::sup_unit && ctx.cod == C::sup) {
        double best = 0.0;
        for (std::size_t i = 0; i < M.rows; ++i) {
            kahan s;
            for (std::size_t j = 0; j < M.cols; ++j) s += std::fabs(M(i, j));
            best = std::max(best, s.value());
        }
        return best;
    }
    if (M.cols > detail::max_sign_dim)
        throw error(errc::unsupported_norm_context, "sup-to-one operator norm beyond dimension 20");
    double best = 0.0;
    for (const auto& v : detail::extreme_images(M.v.data(), M.rows, M.cols, ctx.dom))
        best = std::max(best, codomain_norm(v, ctx.cod));
    return best;
}

struct GroupNormBound {
    enum class method { scalar_sum, positive_unit, exhaustive, sandwich };
    double lower = 0.0;
    double upper = 0.0;
    bool exact = false;
    method how = method::sandwich;
    // Upper bound for the untruncated set when a tail certificate or finite row support exists.
    std::optional<double> full_upper;
    // Maximizing unit vectors x_k, one per evaluated block, when a maximizer was computed.
    std::vector<std::vector<double>> argmax;
    std::size_t evaluated = 0;
};

inline const char* to_string(GroupNormBound::method m)
{
    switch (m) {
    case GroupNormBound::method::scalar_sum: return "ScalarSum";
    case GroupNormBound::method::positive_unit: return "PositiveUnit";
    case GroupNormBound::method::exhaustive: return "ExtremePointExhaustive";
    default: return "Sandwich";
    }
}

enum class GroupNormMode { automatic, exhaustive, bounds };

struct BlockMaximum {
    double value = 0.0;
    std::vector<std::vector<double>> x;
    bool exhaustive = false;
};

namespace detail {

inline double log2_states(std::size_t blocks, std::size_t d, NormContext::domain dom)
{
    double per = dom == NormContext::domain::one ? std::log2(2.0 * static_cast<double>(d)) : static_cast<double>(d);
    return per * static_cast<double>(blocks);
}

struct maximizer {
    const std::vector<std::vector<std::vector<double>>>& cands; // [block][choice] -> image (one per ± pair)
    std::size_t m;
    NormContext::codomain cod;
    std::vector<double> rest_bound; // sum of max candidate norms over blocks >= b
    double best = -1.0;
    std::vector<std::pair<std::size_t, bool>> best_choice;
    std::vector<std::pair<std::size_t, bool>> cur;

    void dfs(std::size_t b, std::vector<double>& acc)
    {
        if (b == cands.size()) {
            double v = codomain_norm(acc, cod);
            if (v > best) {
                best = v;
                best_choice = cur;
            }
            return;
        }
        if (codomain_norm(acc, cod) + rest_bound[b] <= best) return;
        const auto& cs = cands[b];
        for (std::size_t c = 0; c < cs.size(); ++c) {
            for (int sgn = 0; sgn < 2; ++sgn) {
                // Global sign symmetry: fix the sign of the first block.
                if (b == 0 && sgn == 1) continue;
                const double s = sgn ? -1.0 : 1.0;
                for (std::size_t i = 0; i < m; ++i) acc[i] += s * cs[c][i];
                cur[b] = {c, sgn == 1};
                dfs(b + 1, acc);
                for (std::size_t i = 0; i < m; ++i) acc[i] -= s * cs[c][i];
            }
        }
    }
};

inline std::pair<double, std::vector<std::pair<std::size_t, bool>>>
greedy_choice(const std::vector<std::vector<std::vector<double>>>& cands, std::size_t m, NormContext::codomain cod)
{
    const std::size_t B = cands.size();
    std::vector<std::pair<std::size_t, bool>> ch(B, {0, false});
    std::vector<double> acc(m, 0.0);
    auto add = [&](std::size_t b, double s) {
        for (std::size_t i = 0; i < m; ++i) acc[i] += s * (ch[b].second ? -1.0 : 1.0) * cands[b][ch[b].first][i];
    };
    for (std::size_t b = 0; b < B; ++b) {
        double bestv = -1.0;
        std::pair<std::size_t, bool> bc{0, false};
        for (std::size_t c = 0; c < cands[b].size(); ++c)
            for (int sgn = 0; sgn < 2; ++sgn) {
                std::vector<double> t = acc;
                for (std::size_t i = 0; i < m; ++i) t[i] += (sgn ? -1.0 : 1.0) * cands[b][c][i];
                double v = codomain_norm(t, cod);
                if (v > bestv) {
                    bestv = v;
                    bc = {c, sgn == 1};
                }
            }
        ch[b] = bc;
        add(b, 1.0);
    }
    double cur = codomain_norm(acc, cod);
    for (int sweep = 0; sweep < 32; ++sweep) {
        bool improved = false;
        for (std::size_t b = 0; b < B; ++b) {
            add(b, -1.0);
            auto keep = ch[b];
            double bestv = -1.0;
            for (std::size_t c = 0; c < cands[b].size(); ++c)
                for (int sgn = 0; sgn < 2; ++sgn) {
                    std::vector<double> t = acc;
                    for (std::size_t i = 0; i < m; ++i) t[i] += (sgn ? -1.0 : 1.0) * cands[b][c][i];
                    double v = codomain_norm(t, cod);
                    if (v > bestv + 1e-15) {
                        bestv = v;
                        ch[b] = {c, sgn == 1};
                    }
                }
            add(b, 1.0);
            if (bestv > cur + 1e-13) {
                cur = bestv;
                improved = true;
            } else if (ch[b] != keep) {
                add(b, -1.0);
                ch[b] = keep;
                add(b, 1.0);
            }
        }
        if (!improved) break;
    }
    return {codomain_norm(acc, cod), ch};
}

} // namespace detail

// sup over x_k in the domain unit ball of ||sum_k B_k x_k||; exact when the state count allows.
inline BlockMaximum maximize_blocks(const std::vector<Block>& blocks, NormContext ctx, bool allow_exhaustive = true,
                                    double log2_cap = 24.0)
{
    BlockMaximum out;
    if (blocks.empty()) {
        out.exhaustive = true;
        return out;
    }
    const std::size_t m = blocks.front().rows, d = blocks.front().cols;
    std::vector<std::vector<std::vector<double>>> cands;
    cands.reserve(blocks.size());
    for (const auto& b : blocks) cands.push_back(detail::extreme_images(b.v.data(), m, d, ctx.dom));
    auto [gv, gc] = detail::greedy_choice(cands, m, ctx.cod);
    std::vector<std::pair<std::size_t, bool>> choice = gc;
    double value = gv;
    if (allow_exhaustive && detail::log2_states(blocks.size(), d, ctx.dom) <= log2_cap) {
        detail::maximizer mx{cands, m, ctx.cod, {}, gv - 1e-12, gc, std::vector<std::pair<std::size_t, bool>>(blocks.size())};
        mx.rest_bound.assign(blocks.size() + 1, 0.0);
        for (std::size_t b = blocks.size(); b-- > 0;) {
            double mb = 0.0;
            for (const auto& v : cands[b]) mb = std::max(mb, codomain_norm(v, ctx.cod));
            mx.rest_bound[b] = mx.rest_bound[b + 1] + mb;
        }
        std::vector<double> acc(m, 0.0);
        mx.dfs(0, acc);
        if (mx.best >= value) {
            value = mx.best;
            choice = mx.best_choice;
        }
        out.exhaustive = true;
    }
    out.value = value;
    for (std::size_t b = 0; b < blocks.size(); ++b)
        out.x.push_back(detail::extreme_point(d, ctx.dom, choice[b].first, choice[b].second));
    return out;
}

inline bool blocks_nonnegative(const std::vector<Block>& blocks)
{
    for (const auto& b : blocks)
        for (double a : b.v)
            if (a < 0) return false;
    return true;
}

// Group norm of an explicit finite list of blocks.
inline GroupNormBound group_norm_blocks(const std::vector<Block>& blocks, NormContext ctx = {},
                                        GroupNormMode mode = GroupNormMode::automatic, bool nonnegative_hint = false)
{
    using M = GroupNormBound::method;
    GroupNormBound g;
    g.evaluated = blocks.size();
    if (blocks.empty()) {
        g.exact = true;
        g.how = M::scalar_sum;
        g.full_upper = 0.0;
        return g;
    }
    const std::size_t m = blocks.front().rows, d = blocks.front().cols;
    const bool nonneg = nonnegative_hint || blocks_nonnegative(blocks);
    if (ctx.dom == NormContext::domain::sup_unit && !nonneg)
        throw error(errc::unsupported_norm_context, "sup norm with order unit requires nonnegative blocks");

    if (mode != GroupNormMode::exhaustive && d == 1 && m == 1) {
        kahan s;
        for (const auto& b : blocks) s += std::fabs(b.v[0]);
        g.lower = g.upper = s.value();
        g.exact = true;
        g.how = M::scalar_sum;
        for (const auto& b : blocks) g.argmax.push_back({b.v[0] < 0 ? -1.0 : 1.0});
        return g;
    }
    if (mode != GroupNormMode::exhaustive && ctx.dom == NormContext::domain::sup_unit) {
        std::vector<kahan> acc(m);
        for (const auto& b : blocks)
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < d; ++j) acc[i] += b(i, j);
        std::vector<double> y(m);
        for (std::size_t i = 0; i < m; ++i) y[i] = acc[i].value();
        g.lower = g.upper = codomain_norm(y, ctx.cod);
        g.exact = true;
        g.how = M::positive_unit;
        g.argmax.assign(blocks.size(), std::vector<double>(d, 1.0));
        return g;
    }
    const bool feasible = detail::log2_states(blocks.size(), d, ctx.dom) <= 24.0;
    if (mode == GroupNormMode::exhaustive || (mode == GroupNormMode::automatic && feasible)) {
        auto mx = maximize_blocks(blocks, ctx, true, mode == GroupNormMode::exhaustive ? 64.0 : 24.0);
        g.lower = g.upper = mx.value;
        g.exact = true;
        g.how = M::exhaustive;
        g.argmax = std::move(mx.x);
        return g;
    }
    // Sandwich: certified lower bound from rowwise sign choices and a greedy feasible point,
    // upper bound from the triangle inequality.
    kahan up;
    for (const auto& b : blocks) up += op_norm_block(b, ctx);
    double low = 0.0;
    if (ctx.dom == NormContext::domain::one) {
        for (std::size_t i = 0; i < m; ++i) {
            kahan s;
            for (const auto& b : blocks) {
                double mj = 0.0;
                for (std::size_t j = 0; j < d; ++j) mj = std::max(mj, std::fabs(b(i, j)));
                s += mj;
            }
            low = std::max(low, s.value());
        }
    }
    auto mx = maximize_blocks(blocks, ctx, false);
    g.lower = std::max(low, mx.value);
    g.upper = std::max(up.value(), g.lower);
    g.exact = false;
    g.how = M::sandwich;
    g.argmax = std::move(mx.x);
    return g;
}

// The bound pair stated for one-norm contexts: [(1/d) sum |a|, sum |a|].
inline std::pair<double, double> entrywise_sandwich(const std::vector<Block>& blocks)
{
    kahan s;
    std::size_t d = 1;
    for (const auto& b : blocks) {
        s += b.abs_sum();
        d = b.cols;
    }
    return {s.value() / static_cast<double>(d), s.value()};
}

namespace detail {

inline std::optional<double> beyond_horizon_bound(const BlockMatrix& A, index_t n, index_t horizon)
{
    if (A.row_finite(n, horizon)) return 0.0;
    if (!A.tail_decay) return std::nullopt;
    for (int j = 0; j <= 60; ++j) {
        double eps = std::ldexp(1.0, -j);
        if (A.tail_decay(n, eps) > horizon + 1) return j == 0 ? std::nullopt : std::optional<double>(2 * eps);
    }
    return std::ldexp(1.0, -60);
}

// Largest element when E is a finite set given explicitly.
inline std::optional<index_t> finite_max(const SetDescriptor& E)
{
    using K = SetDescriptor::kind;
    switch (E.type()) {
    case K::finite:
        if (E.elements().empty()) return index_t{0};
        return E.elements().back();
    case K::range: return E.a() <= E.b() ? E.b() : 0;
    case K::ap:
        if (E.b() == 0) return E.a();
        return std::nullopt;
    case K::set_union: {
        index_t m = 0;
        for (const auto& c : E.children()) {
            auto x = finite_max(c);
            if (!x) return std::nullopt;
            m = std::max(m, *x);
        }
        return m;
    }
    default: return std::nullopt;
    }
}

} // namespace detail

// Operator norm of block p of an evaluated row.
inline double op_norm_at(const BlockMatrix::SparseRow& r, std::size_t p, NormContext ctx = {})
{
    using D = NormContext::domain;
    using C = NormContext::codomain;
    if (!r.sparse) return op_norm_block(r.dense(p), ctx);
    if (ctx.dom == D::one && ctx.cod == C::sup) {
        double best = 0.0;
        r.for_each(p, [&](std::size_t, std::size_t, double v) { best = std::max(best, std::fabs(v)); });
        return best;
    }
    if ((ctx.dom == D::one && ctx.cod == C::one) || (ctx.dom == D::sup_unit && ctx.cod == C::sup)) {
        const bool by_col = ctx.dom == D::one;
        std::unordered_map<std::size_t, double> acc;
        r.for_each(p, [&](std::size_t i, std::size_t j, double v) { acc[by_col ? j : i] += std::fabs(v); });
        double best = 0.0;
        for (const auto& [key, v] : acc) best = std::max(best, v);
        return best;
    }
    return op_norm_block(r.dense(p), ctx);
}

inline GroupNormBound group_norm(const BlockMatrix& A, index_t n, const SetDescriptor& E, index_t horizon,
                                 NormContext ctx = {}, GroupNormMode mode = GroupNormMode::automatic)
{
    auto first = E.min_element(horizon);
    if (first && *first > horizon)
        throw error(errc::empty_evaluation, "horizon " + std::to_string(horizon) + " below min(E)");
    if (!first && E.type() != SetDescriptor::kind::finite)
        throw error(errc::empty_evaluation, "E has no element within the horizon");
    auto row = A.row(n, horizon);
    std::vector<Block> blocks;
    for (std::size_t p = 0; p < row->size(); ++p) {
        if (!E.contains(row->cols[p])) continue;
        blocks.push_back(row->dense(p));
    }
    GroupNormBound g = group_norm_blocks(blocks, ctx, mode, A.nonnegative);
    bool truncated = true;
    if (row->complete) {
        truncated = false;
    } else if (auto mx = detail::finite_max(E)) {
        truncated = *mx > horizon;
    }
    if (!truncated) {
        g.full_upper = g.upper;
    } else if (auto t = detail::beyond_horizon_bound(A, n, horizon)) {
        g.full_upper = g.upper + *t;
    }
    return g;
}

inline GroupNormBound tail_norm(const BlockMatrix& A, index_t n, index_t K, index_t horizon, NormContext ctx = {},
                                GroupNormMode mode = GroupNormMode::automatic)
{
    if (K > horizon && !A.row_support) throw error(errc::empty_evaluation, "tail start beyond horizon");
    const index_t hi = A.row_support ? std::numeric_limits<index_t>::max() - 1 : horizon;
    return group_norm(A, n, SetDescriptor::range(K, hi), horizon, ctx, mode);
}

// Suffix bounds of ||A_{n, >=K}|| over the evaluated columns, for every start position, in one pass.
struct TailProfile {
    std::vector<index_t> cols;
    std::vector<double> lower; // lower[p]: columns cols[p..]; size cols.size() + 1
    std::vector<double> upper;
    bool exact = false;
    bool complete = false;
    bool finite_support = false; // the row vanishes past some column, possibly beyond the horizon
    index_t extent = 0;
    std::optional<double> beyond;

    std::size_t position(index_t K) const
    {
        return static_cast<std::size_t>(std::lower_bound(cols.begin(), cols.end(), K) - cols.begin());
    }
    double upper_from(index_t K) const { return upper[position(K)]; }
    double lower_from(index_t K) const { return lower[position(K)]; }
    double total_upper() const { return upper.front(); }
    double total_lower() const { return lower.front(); }
};

inline TailProfile tail_profile(const BlockMatrix& A, index_t n, index_t horizon, NormContext ctx = {})
{
    TailProfile t;
    auto row = A.row(n, horizon);
    const std::size_t m = A.m();
    const std::size_t L = row->size();
    t.cols = row->cols;
    t.complete = row->complete;
    t.finite_support = row->complete || static_cast<bool>(A.column_finite_bound) || static_cast<bool>(A.row_support);
    t.extent = L ? row->cols.back() : 0;
    t.beyond = row->complete ? std::optional<double>(0.0) : detail::beyond_horizon_bound(A, n, horizon);
    t.lower.assign(L + 1, 0.0);
    t.upper.assign(L + 1, 0.0);
    if (A.is_scalar()) {
        kahan s;
        for (std::size_t p = L; p-- > 0;) {
            s += std::fabs(row->scalar_at(p));
            t.lower[p] = t.upper[p] = s.value();
        }
        t.exact = true;
        return t;
    }
    if (ctx.dom == NormContext::domain::sup_unit) {
        if (!A.nonnegative) throw error(errc::unsupported_norm_context, "order-unit norm needs a nonnegative matrix");
        std::vector<kahan> acc(m);
        std::vector<double> y(m);
        for (std::size_t p = L; p-- > 0;) {
            row->for_each(p, [&](std::size_t i, std::size_t, double v) { acc[i] += v; });
            for (std::size_t i = 0; i < m; ++i) y[i] = acc[i].value();
            t.lower[p] = t.upper[p] = codomain_norm(y, ctx.cod);
        }
        t.exact = true;
        return t;
    }
    kahan up;
    std::vector<kahan> rowwise(m);
    std::vector<double> rmax(m, 0.0);
    std::vector<std::size_t> touched;
    double low = 0.0;
    for (std::size_t p = L; p-- > 0;) {
        up += op_norm_at(*row, p, ctx);
        touched.clear();
        row->for_each(p, [&](std::size_t i, std::size_t, double v) {
            if (rmax[i] == 0.0 && v != 0.0) touched.push_back(i);
            rmax[i] = std::max(rmax[i], std::fabs(v));
        });
        for (std::size_t i : touched) {
            rowwise[i] += rmax[i];
            low = std::max(low, rowwise[i].value());
            rmax[i] = 0.0;
        }
        t.upper[p] = up.value();
        t.lower[p] = std::min(low, t.upper[p]);
    }
    return t;
}

// Per-block operator norms ||A_{n,k}|| over the evaluated columns of row n.
struct BlockNorms {
    std::vector<index_t> cols;
    std::vector<double> norms;

    double at(index_t k) const
    {
        auto it = std::lower_bound(cols.begin(), cols.end(), k);
        if (it == cols.end() || *it != k) return 0.0;
        return norms[static_cast<std::size_t>(it - cols.begin())];
    }
};

inline BlockNorms block_norms(const BlockMatrix& A, index_t n, index_t horizon, NormContext ctx = {})
{
    auto row = A.row(n, horizon);
    BlockNorms out;
    out.cols = row->cols;
    out.norms.resize(row->size());
    for (std::size_t p = 0; p < row->size(); ++p)
        out.norms[p] = A.is_scalar() ? std::fabs(row->scalar_at(p)) : op_norm_at(*row, p, ctx);
    return out;
}

namespace detail {

inline Block row_accumulate(const BlockMatrix& A, index_t n, index_t horizon, bool absolute)
{
    auto row = A.row(n, horizon);
    const std::size_t d = A.d();
    std::vector<kahan> acc(A.block_size());
    for (std::size_t p = 0; p < row->size(); ++p)
        row->for_each(p, [&](std::size_t i, std::size_t j, double v) { acc[i * d + j] += absolute ? std::fabs(v) : v; });
    Block out(A.m(), A.d());
    for (std::size_t e = 0; e < acc.size(); ++e) out.v[e] = acc[e].value();
    return out;
}

} // namespace detail

inline Block row_operator_sum(const BlockMatrix& A, index_t n, index_t horizon)
{
    return detail::row_accumulate(A, n, horizon, false);
}

// Entrywise sums of |a_{n,k}(i,j)| over the evaluated columns.
inline Block row_abs_sum(const BlockMatrix& A, index_t n, index_t horizon)
{
    return detail::row_accumulate(A, n, horizon, true);
}

// Exact row sum for scalar matrices with a rational rule.
inline q64 row_sum_exact(const BlockMatrix& A, index_t n, index_t horizon)
{
    if (!A.exact) throw std::logic_error("row_sum_exact: matrix has no rational rule");
    auto row = A.row(n, horizon);
    q64 s(0);
    for (index_t k : row->cols) s += A.exact(n, k);
    return s;
}

struct TransformResult {
    std::vector<double> value;
    double remainder_bound = 0.0;
    bool certified = false;
};

inline TransformResult transform(const BlockMatrix& A, const SequenceView& x, index_t n, index_t horizon,
                                 double tail_tol = 1e-12, NormContext ctx = {})
{
    const std::size_t m = A.m(), d = A.d();
    auto row = A.row(n, horizon);
    std::vector<kahan> acc(m);
    std::vector<double> xv(d);
    double xsup = 0.0;
    for (std::size_t p = 0; p < row->size(); ++p) {
        x.eval(row->cols[p], xv.data());
        xsup = std::max(xsup, domain_norm(xv.data(), d, ctx.dom));
        row->for_each(p, [&](std::size_t i, std::size_t j, double v) { acc[i] += v * xv[j]; });
    }
    TransformResult r;
    r.value.resize(m);
    for (std::size_t i = 0; i < m; ++i) r.value[i] = acc[i].value();
    if (row->complete) {
        r.certified = true;
        return r;
    }
    const bool bounded = x.declared_bounded && std::isfinite(x.declared_sup);
    if (bounded) xsup = std::max(xsup, x.declared_sup);
    if (A.tail_decay && A.tail_decay(n, tail_tol) <= horizon + 1) {
        r.certified = bounded;
        r.remainder_bound = xsup * tail_tol;
        return r;
    }
    if (auto t = detail::beyond_horizon_bound(A, n, horizon)) {
        r.certified = bounded;
        r.remainder_bound = xsup * *t;
        return r;
    }
    // Uncertified: report the weight of the last evaluated half as an indicator.
    const NormContext tctx{NormContext::domain::one, ctx.cod};
    auto tp = tail_profile(A, n, horizon, tctx);
    r.certified = false;
    r.remainder_bound = xsup * tp.upper_from(horizon / 2);
    return r;
}

// Transform of a pre-sampled sequence (flattened x_0..x_H) at row n; columns beyond the sample are dropped.
inline std::vector<double> transform_sampled(const BlockMatrix& A, const std::vector<double>& xs, index_t n,
                                             index_t horizon)
{
    const std::size_t m = A.m(), d = A.d();
    auto row = A.row(n, horizon);
    const std::size_t have = xs.size() / d;
    std::vector<kahan> acc(m);
    for (std::size_t p = 0; p < row->size(); ++p) {
        if (row->cols[p] >= have) break;
        const double* xv = xs.data() + row->cols[p] * d;
        row->for_each(p, [&](std::size_t i, std::size_t j, double v) { acc[i] += v * xv[j]; });
    }
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = acc[i].value();
    return out;
}

} // namespace summa
