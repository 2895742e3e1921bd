#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "error.hpp"
#include "ideal_core.hpp"
#include "numeric.hpp"
#include "operator_matrix.hpp"

namespace summa {

enum class Status { pass, fail, inconclusive };

inline const char* to_string(Status s)
{
    switch (s) {
    case Status::pass: return "Pass";
    case Status::fail: return "Fail";
    default: return "Inconclusive";
    }
}

struct ConditionVerdict {
    std::string id;
    Status status = Status::inconclusive;
    diagnostics evidence;
    // Textual evidence: existential bindings (k0, t0, J0, f), witnesses, quantifier, rule used.
    std::vector<std::pair<std::string, std::string>> bindings;
    index_t horizon = 0;
    double tol = 0.0;

    double value(const std::string& key) const
    {
        auto v = diag_get(evidence, key);
        return v ? *v : std::numeric_limits<double>::quiet_NaN();
    }
    std::string binding(const std::string& key) const
    {
        for (const auto& [k, v] : bindings)
            if (k == key) return v;
        return {};
    }
    void add(const std::string& key, double v) { evidence.emplace_back(key, v); }
    void bind(const std::string& key, std::string v) { bindings.emplace_back(key, std::move(v)); }
    bool passed() const noexcept { return status == Status::pass; }
    bool failed() const noexcept { return status == Status::fail; }
};

// ASCII spellings accepted for condition ids: T1b = T1♭, T1bb = T1♭♭, T3n = T3♮, T3s = T3♯, T5p = T5′, ...
inline std::string canonical_condition_id(const std::string& id)
{
    static const std::map<std::string, std::string> alias = {
        {"S3s", "S3♯"},  {"T1b", "T1♭"}, {"T1bb", "T1♭♭"}, {"T2b", "T2♭"}, {"T3n", "T3♮"}, {"T3s", "T3♯"},
        {"T4b", "T4♭"},  {"T5p", "T5′"}, {"T5'", "T5′"},   {"T5s", "T5♯"}, {"T6b", "T6♭"}, {"F6p", "F6′"},
        {"F6'", "F6′"},
    };
    auto it = alias.find(id);
    return it == alias.end() ? id : it->second;
}

struct Probe {
    std::string name;
    std::optional<std::size_t> axis; // coordinate extreme e_axis
    std::vector<double> v;           // explicit vector when axis is empty
};

inline std::vector<Probe> coordinate_probes(std::size_t d, std::size_t cap = 256)
{
    std::vector<Probe> out;
    for (std::size_t j = 0; j < d && j < cap; ++j) out.push_back({"e" + std::to_string(j), j, {}});
    return out;
}

struct CheckOptions {
    index_t horizon = 1024;
    double tol = 1e-6;
    double stabilization = 1e-3;
    NormContext ctx{};
    std::vector<SetDescriptor> E_samples;
    std::vector<SequenceView> x_samples;
    // Fixed vectors for pointwise column conditions; coordinate extremes when empty.
    std::vector<Probe> probes;
    std::size_t column_samples = 16;
    // A windowed estimate vanishes when it drops by this factor between H/4 and H.
    double trend_ratio = 0.75;
    // For level-structured ideals: minimal decay exponent of the level envelope.
    double level_exponent = 0.3;
    // Run entailed conditions as well (audit mode).
    bool audit = false;
};

namespace detail {

inline bool is_close_zero(double v, double tol) { return std::fabs(v) <= tol; }

inline unsigned floor_log2(index_t H)
{
    unsigned L = 0;
    while (L < 63 && (index_t{2} << L) <= H) ++L;
    return L;
}

struct windows {
    double quarter = 0.0;
    double half = 0.0;
    double full = 0.0;
    // Level-structured ideals: level thresholds of the half and full windows.
    unsigned level_half = 0;
    unsigned level_full = 0;
    bool levels = false;
    // Level-half envelope over [0, H/2] and [0, H/4]: growth across horizons means the level sup is unbounded.
    double half_prev = 0.0;
    double half_prev2 = 0.0;

    bool level_stable(double ratio) const { return half <= ratio * half_prev + 1e-300; }
    bool level_growing() const { return half_prev2 > 0 && half_prev >= 1.25 * half_prev2 && half >= 1.25 * half_prev; }
};

inline double nonneg(double v) { return std::isfinite(v) ? std::max(v, 0.0) : (v > 0 ? v : 0.0); }

inline unsigned ceil_frac(unsigned L, unsigned num, unsigned den)
{
    return std::max(1u, (L * num + den - 1) / den);
}

inline double level_envelope(const std::vector<double>& y, index_t H, unsigned level)
{
    double m = 0.0;
    for (index_t n = index_t{1} << level; n <= H; n += index_t{1} << level) m = std::max(m, y[n]);
    return m;
}

// 𝒥-limsup estimates of a nonnegative row quantity over three nested windows.
inline windows window_estimates(const IdealSpec& J, const std::vector<double>& y, index_t H)
{
    windows w;
    if (J.level_structured()) {
        const unsigned L = floor_log2(H);
        w.levels = true;
        w.level_half = ceil_frac(L, 1, 2);
        w.level_full = ceil_frac(L, 3, 4);
        w.quarter = level_envelope(y, H, ceil_frac(L, 1, 4));
        w.half = level_envelope(y, H, w.level_half);
        w.full = level_envelope(y, H, w.level_full);
        w.half_prev = level_envelope(y, H / 2, w.level_half);
        w.half_prev2 = level_envelope(y, H / 4, w.level_half);
        return w;
    }
    w.quarter = nonneg(limsup_at(J, y, std::max<index_t>(H / 4, 1)));
    w.half = nonneg(limsup_at(J, y, std::max<index_t>(H / 2, 1)));
    w.full = nonneg(limsup_at(J, y, H));
    return w;
}

// Last row in the final window whose value reaches v.
inline index_t window_witness(const IdealSpec& J, const std::vector<double>& y, index_t H, double v, const windows& w)
{
    for (index_t n = H + 1; n-- > 0;) {
        bool in_window = w.levels ? (n != 0 && nu2(n) >= w.level_full) : (trend_based(J) || in_deep(J, n, H));
        if (in_window && y[n] >= v * (1 - 1e-12)) return n;
    }
    return 0;
}

struct limit_eval {
    Status status = Status::inconclusive;
    windows up;
    windows low;
    double exponent = std::numeric_limits<double>::quiet_NaN();
    index_t witness = 0;
    double witness_value = 0.0;
    std::string rule;
};

// Decides 𝒥-lim_n y_n = 0 for a nonnegative quantity given upper and lower bounds per row.
inline limit_eval check_vanishing(const IdealSpec& J, const std::vector<double>& up, const std::vector<double>& low,
                                  index_t H, const CheckOptions& o)
{
    limit_eval r;
    r.up = window_estimates(J, up, H);
    r.low = window_estimates(J, low, H);
    const auto& u = r.up;
    if (u.full <= o.tol) {
        r.status = Status::pass;
        r.rule = "within_tol";
        return r;
    }
    const bool monotone = u.quarter >= u.half && u.half >= u.full;
    if (u.levels) {
        if (u.level_full > u.level_half && u.full > 0 && u.half > 0) {
            r.exponent = std::log(u.half / u.full) /
                         std::log(static_cast<double>(u.level_full) / static_cast<double>(u.level_half));
            if (monotone && r.exponent >= o.level_exponent && u.level_stable(1.25)) {
                r.status = Status::pass;
                r.rule = "level_decay";
                return r;
            }
        }
    } else if (monotone && u.full <= o.trend_ratio * u.quarter) {
        r.status = Status::pass;
        r.rule = "vanishing_trend";
        return r;
    }
    const auto& l = r.low;
    if (l.levels && l.half > 10 * o.tol && l.level_growing()) {
        r.status = Status::fail;
        r.rule = "level_growth";
        r.witness = window_witness(J, low, H, l.full, l);
        r.witness_value = low[r.witness];
        return r;
    }
    if (l.full > 10 * o.tol && l.full >= 0.95 * l.quarter) {
        r.status = Status::fail;
        r.rule = "persistent";
        r.witness = window_witness(J, low, H, l.full, l);
        r.witness_value = low[r.witness];
        return r;
    }
    r.rule = "undecided";
    return r;
}

struct sup_eval {
    Status status = Status::inconclusive;
    double quarter = 0.0, half = 0.0, sup = 0.0;
    double growth = 0.0;
    index_t argmax = 0;
    double witness_value = 0.0;
};

// Decides sup over the included rows < ∞ by stabilization across the last doubling.
inline sup_eval check_bounded(const std::vector<double>& up, const std::vector<double>& low, index_t H, double stab,
                              const std::function<bool(index_t)>& include = {})
{
    sup_eval r;
    double lq = 0, lh = 0, ls = 0;
    index_t larg = 0;
    for (index_t n = 0; n <= H; ++n) {
        if (include && !include(n)) continue;
        double u = up[n], l = low[n];
        if (n <= H / 4) {
            r.quarter = std::max(r.quarter, u);
            lq = std::max(lq, l);
        }
        if (n <= H / 2) {
            r.half = std::max(r.half, u);
            lh = std::max(lh, l);
        }
        if (u > r.sup || (n == 0 && u >= r.sup)) {
            r.sup = u;
            r.argmax = n;
        }
        if (l > ls) {
            ls = l;
            larg = n;
        }
    }
    r.growth = r.half > 0 ? r.sup / r.half - 1.0 : (r.sup > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (std::isfinite(r.sup) && r.sup <= r.half * (1 + stab) + 1e-300) {
        r.status = Status::pass;
        return r;
    }
    if (lq > 0 && lh >= 1.25 * lq && ls >= 1.25 * lh) {
        r.status = Status::fail;
        r.argmax = larg;
        r.witness_value = ls;
    }
    return r;
}

// 𝒥-limsup < ∞ via windowed estimates.
inline sup_eval check_limsup_bounded(const IdealSpec& J, const std::vector<double>& up, const std::vector<double>& low,
                                     index_t H, double stab)
{
    sup_eval r;
    auto u = window_estimates(J, up, H);
    auto l = window_estimates(J, low, H);
    r.quarter = u.quarter;
    r.half = u.half;
    r.sup = u.full;
    r.growth = u.half > 0 ? u.full / u.half - 1.0 : 0.0;
    if (std::isfinite(u.full) && (u.levels ? u.level_stable(1.1) : u.full <= u.half * (1 + stab) + 1e-300)) {
        r.status = Status::pass;
        return r;
    }
    if (u.levels ? l.level_growing() : (l.quarter > 0 && l.half >= 1.25 * l.quarter && l.full >= 1.25 * l.half)) {
        r.status = Status::fail;
        r.argmax = window_witness(J, low, H, l.full, l);
        r.witness_value = low[r.argmax];
    }
    return r;
}

// Convergence of a row series judged from its tail masses.
struct row_test {
    Status status = Status::inconclusive;
    double window = 0.0;      // mass over columns [H/2, H]
    double prev_window = 0.0; // mass over columns [H/4, H/2)
};

inline row_test row_tail_test(const TailProfile& tp, index_t H, double tol)
{
    row_test r;
    if (tp.complete || tp.finite_support) {
        r.status = Status::pass;
        return r;
    }
    r.window = tp.upper_from(H / 2);
    r.prev_window = tp.upper_from(H / 4) - r.window;
    if (tp.beyond && *tp.beyond <= tol) {
        r.status = Status::pass;
        return r;
    }
    if (r.window <= tol || r.window <= 0.75 * r.prev_window) {
        r.status = Status::pass;
        return r;
    }
    double lw = tp.lower_from(H / 2);
    double lprev = tp.lower_from(H / 4) - tp.lower_from(H / 2);
    if (lw > 10 * tol && lw >= 0.99 * lprev) r.status = Status::fail;
    return r;
}

inline std::vector<index_t> k0_candidates(index_t H)
{
    std::vector<index_t> c;
    const index_t cap = std::max<index_t>(H / 8, 1);
    for (index_t k = 0; k <= std::min<index_t>(16, cap); ++k) c.push_back(k);
    for (index_t k = 32; k <= cap; k *= 2) c.push_back(k);
    return c;
}

inline double probe_norm(const Probe& p, const BlockMatrix::SparseRow& row, std::size_t pos, NormContext::codomain cod,
                         std::vector<double>& scratch)
{
    scratch.assign(row.m, 0.0);
    if (p.axis) {
        const std::size_t j = *p.axis;
        row.for_each(pos, [&](std::size_t i, std::size_t jj, double v) {
            if (jj == j) scratch[i] += v;
        });
    } else {
        row.for_each(pos, [&](std::size_t i, std::size_t jj, double v) { scratch[i] += v * p.v[jj]; });
    }
    return codomain_norm(scratch, cod);
}

inline std::size_t find_col(const BlockMatrix::SparseRow& row, index_t k)
{
    auto it = std::lower_bound(row.cols.begin(), row.cols.end(), k);
    if (it == row.cols.end() || *it != k) return row.cols.size();
    return static_cast<std::size_t>(it - row.cols.begin());
}

} // namespace detail

// Per-row quantities gathered in a single sweep over rows 0..H.
struct SurveyRequest {
    bool tails = false;
    std::optional<Block> sum_target; // row sums compared with this block
    bool abs_sums = false;
    std::vector<index_t> columns;
    bool column_norms = false;
    std::vector<Probe> probes;
    std::vector<SetDescriptor> sets;
    bool set_group_norms = false;
    bool set_abs_sums = false;
};

struct RowSurvey {
    index_t H = 0;
    std::vector<index_t> k0s;
    std::vector<std::vector<double>> tail_up, tail_low; // [candidate][n]
    std::vector<detail::row_test> row_tests;             // [n]
    std::vector<double> sum_dev;                         // max_ij |sum_k a_{n,k}(i,j) - t(i,j)|
    std::vector<double> sum_flat;                        // row sums, when blocks are small
    std::vector<double> sum_prev_dev;                    // change of the row sum between H/2 and H
    std::vector<char> complete;
    std::vector<double> abs_total;
    std::vector<std::vector<double>> col_norm;                // [column][n]
    std::vector<std::vector<std::vector<double>>> probe_val; // [column][probe][n]
    std::vector<std::vector<double>> set_up, set_low, set_abs; // [set][n]
};

inline RowSurvey survey_rows(const BlockMatrix& A, index_t H, const SurveyRequest& q, NormContext ctx)
{
    RowSurvey s;
    s.H = H;
    const std::size_t N = H + 1, bs = A.block_size(), m = A.m(), d = A.d();
    if (q.tails) {
        s.k0s = detail::k0_candidates(H);
        s.tail_up.assign(s.k0s.size(), std::vector<double>(N, 0.0));
        s.tail_low.assign(s.k0s.size(), std::vector<double>(N, 0.0));
        s.row_tests.resize(N);
    }
    const bool keep_flat = bs <= 64;
    if (q.sum_target) {
        s.sum_dev.assign(N, 0.0);
        s.sum_prev_dev.assign(N, 0.0);
        if (keep_flat) s.sum_flat.assign(N * bs, 0.0);
    }
    s.complete.assign(N, 0);
    if (q.abs_sums) s.abs_total.assign(N, 0.0);
    if (q.column_norms) s.col_norm.assign(q.columns.size(), std::vector<double>(N, 0.0));
    if (!q.probes.empty())
        s.probe_val.assign(q.columns.size(), std::vector<std::vector<double>>(q.probes.size(), std::vector<double>(N, 0.0)));
    if (q.set_group_norms) {
        s.set_up.assign(q.sets.size(), std::vector<double>(N, 0.0));
        s.set_low.assign(q.sets.size(), std::vector<double>(N, 0.0));
    }
    if (q.set_abs_sums) s.set_abs.assign(q.sets.size(), std::vector<double>(N, 0.0));

    std::vector<double> scratch, colnorm;
    std::unordered_map<std::size_t, double> cells;
    std::vector<kahan> acc, acc_half;
    const bool axis_only = std::all_of(q.probes.begin(), q.probes.end(), [](const Probe& p) { return p.axis.has_value(); });
    for (index_t n = 0; n <= H; ++n) {
        auto row = A.row(n, H);
        s.complete[n] = row->complete ? 1 : 0;
        if (q.tails) {
            auto tp = tail_profile(A, n, H, ctx);
            for (std::size_t c = 0; c < s.k0s.size(); ++c) {
                s.tail_up[c][n] = tp.upper_from(s.k0s[c]);
                s.tail_low[c][n] = tp.lower_from(s.k0s[c]);
                if (!tp.complete && tp.beyond) s.tail_up[c][n] += *tp.beyond;
            }
            s.row_tests[n] = detail::row_tail_test(tp, H, 1e-12);
        }
        if (q.sum_target || q.abs_sums) {
            acc.assign(bs, kahan{});
            acc_half.assign(bs, kahan{});
            kahan tot;
            for (std::size_t p = 0; p < row->size(); ++p) {
                const bool early = row->cols[p] <= H / 2;
                row->for_each(p, [&](std::size_t i, std::size_t j, double v) {
                    acc[i * d + j] += v;
                    if (early) acc_half[i * d + j] += v;
                    tot += std::fabs(v);
                });
            }
            if (q.abs_sums) s.abs_total[n] = tot.value();
            if (q.sum_target) {
                double dev = 0.0, chg = 0.0;
                for (std::size_t e = 0; e < bs; ++e) {
                    double v = acc[e].value();
                    dev = std::max(dev, std::fabs(v - q.sum_target->v[e]));
                    chg = std::max(chg, std::fabs(v - acc_half[e].value()));
                    if (keep_flat) s.sum_flat[n * bs + e] = v;
                }
                s.sum_dev[n] = dev;
                s.sum_prev_dev[n] = chg;
            }
        }
        if (q.column_norms || !q.probes.empty()) {
            for (std::size_t c = 0; c < q.columns.size(); ++c) {
                std::size_t pos = detail::find_col(*row, q.columns[c]);
                if (pos == row->size()) continue;
                if (q.column_norms) s.col_norm[c][n] = A.is_scalar() ? std::fabs(row->scalar_at(pos)) : op_norm_at(*row, pos, ctx);
                if (q.probes.empty()) continue;
                if (axis_only) {
                    colnorm.assign(d, 0.0);
                    cells.clear();
                    row->for_each(pos, [&](std::size_t i, std::size_t j, double v) { cells[i * d + j] += v; });
                    for (const auto& [key, v] : cells) {
                        const std::size_t j = key % d;
                        if (ctx.cod == NormContext::codomain::one)
                            colnorm[j] += std::fabs(v);
                        else
                            colnorm[j] = std::max(colnorm[j], std::fabs(v));
                    }
                    for (std::size_t pi = 0; pi < q.probes.size(); ++pi) s.probe_val[c][pi][n] = colnorm[*q.probes[pi].axis];
                    continue;
                }
                for (std::size_t pi = 0; pi < q.probes.size(); ++pi)
                    s.probe_val[c][pi][n] = detail::probe_norm(q.probes[pi], *row, pos, ctx.cod, scratch);
            }
        }
        if (q.set_group_norms || q.set_abs_sums) {
            for (std::size_t e = 0; e < q.sets.size(); ++e) {
                const auto& E = q.sets[e];
                std::vector<Block> blocks;
                kahan abs;
                for (std::size_t p = 0; p < row->size(); ++p) {
                    if (!E.contains(row->cols[p])) continue;
                    if (q.set_abs_sums) row->for_each(p, [&](std::size_t, std::size_t, double v) { abs += std::fabs(v); });
                    if (q.set_group_norms) blocks.push_back(row->dense(p));
                }
                if (q.set_abs_sums) s.set_abs[e][n] = abs.value();
                if (q.set_group_norms && !blocks.empty()) {
                    auto g = group_norm_blocks(blocks, ctx, GroupNormMode::automatic, A.nonnegative);
                    s.set_up[e][n] = g.upper;
                    s.set_low[e][n] = g.lower;
                }
            }
        }
    }
    (void)m;
    return s;
}

// Built-in members of the ideal used for universally quantified conditions, plus validated user samples.
struct NamedSet {
    std::string name;
    SetDescriptor set;
};

inline std::vector<NamedSet> ideal_sample_suite(const IdealSpec& I, const std::vector<SetDescriptor>& user, index_t H)
{
    std::vector<NamedSet> out;
    auto push = [&](const SetDescriptor& S) {
        for (const auto& e : out)
            if (e.set == S) return;
        out.push_back({S.str(), S});
    };
    push(SetDescriptor::finite({0}));
    push(SetDescriptor::range(0, 7));
    std::vector<SetDescriptor> cands = {SetDescriptor::squares(), SetDescriptor::powers_of_two(),
                                        SetDescriptor::pairing_row(0), SetDescriptor::pairing_row(1),
                                        SetDescriptor::nu2_level(0), SetDescriptor::nu2_level(1),
                                        SetDescriptor::nu2_at_most(2)};
    if (I.type() == IdealSpec::kind::generated && !I.nu2_levels())
        for (const auto& g : I.explicit_generators()) cands.push_back(g);
    for (const auto& S : cands)
        if (ideal_member(I, S, H).in()) push(S);
    for (const auto& S : user) {
        auto mem = ideal_member(I, S, H);
        if (mem.not_in()) throw error(errc::rejected_sample, S.str() + " is not a member of " + I.str());
        push(S);
    }
    return out;
}

// Which sequence spaces over ℐ a declared sample belongs to.
struct SampleSpaces {
    bool c = false;     // c(X,ℐ)
    bool cb = false;    // c^b(X,ℐ)
    bool c0b = false;   // c_0^b(X,ℐ)
    bool c00 = false;   // c_00(X,ℐ)
    bool c00b = false;  // c_00^b(X,ℐ)
};

inline SampleSpaces classify_sample(const IdealSpec& I, const SequenceView& x, index_t H)
{
    if (!x.declared_ideal) throw error(errc::rejected_sample, "sample declares no ideal");
    const std::string& lit = *x.declared_ideal;
    if (lit != "fin" && lit != I.str())
        throw error(errc::rejected_sample, "sample declared for " + lit + ", checking " + I.str());
    if (!x.declared_limit && !x.declared_support) throw error(errc::rejected_sample, "sample declares no membership");
    SampleSpaces s;
    const bool bounded = x.declared_bounded;
    if (x.declared_support) {
        auto mem = ideal_member(lit == "fin" ? IdealSpec::fin() : I, *x.declared_support, H);
        if (mem.not_in()) throw error(errc::rejected_sample, "declared support outside the ideal");
        s.c00 = true;
        s.c00b = bounded;
    }
    s.c = true;
    s.cb = bounded;
    bool zero_limit = x.declared_support.has_value();
    if (x.declared_limit) {
        zero_limit = true;
        for (double v : *x.declared_limit)
            if (v != 0.0) zero_limit = false;
    }
    s.c0b = bounded && zero_limit;
    return s;
}

namespace detail {

struct named_sequence {
    std::string name;
    SequenceView x;
    bool user = false;
};

inline SequenceView axis_sequence(std::size_t d, std::size_t j, std::function<double(index_t)> w)
{
    return SequenceView::vector(d, [d, j, w = std::move(w)](index_t k, double* out) {
        std::fill(out, out + d, 0.0);
        out[j] = w(k);
    });
}

// Transform values and partial-sum changes of one sequence on rows 0..H.
struct transform_rows {
    std::vector<double> norm;   // ||A_n x|| (evaluated columns)
    std::vector<double> change; // ||S_H - S_{H/2}||
    std::vector<double> prev_change; // ||S_{H/2} - S_{H/4}||
};

inline transform_rows transform_all(const BlockMatrix& A, const SequenceView& x, index_t H, NormContext::codomain cod)
{
    transform_rows t;
    t.norm.assign(H + 1, 0.0);
    t.change.assign(H + 1, 0.0);
    t.prev_change.assign(H + 1, 0.0);
    const std::size_t m = A.m(), d = A.d();
    std::vector<double> xs;
    const bool presample = !A.row_support;
    if (presample) xs = x.sample(H);
    std::vector<double> xv(d);
    std::vector<kahan> a1(m), a2(m), a3(m);
    std::vector<double> y(m), y2(m);
    for (index_t n = 0; n <= H; ++n) {
        auto row = A.row(n, H);
        std::fill(a1.begin(), a1.end(), kahan{});
        std::fill(a2.begin(), a2.end(), kahan{});
        std::fill(a3.begin(), a3.end(), kahan{});
        for (std::size_t p = 0; p < row->size(); ++p) {
            const index_t k = row->cols[p];
            const double* xp;
            if (presample) {
                xp = xs.data() + k * d;
            } else {
                x.eval(k, xv.data());
                xp = xv.data();
            }
            row->for_each(p, [&](std::size_t i, std::size_t j, double v) {
                double c = v * xp[j];
                a1[i] += c;
                if (k <= H / 2) a2[i] += c;
                if (k <= H / 4) a3[i] += c;
            });
        }
        for (std::size_t i = 0; i < m; ++i) {
            y[i] = a1[i].value();
            y2[i] = a2[i].value();
        }
        t.norm[n] = codomain_norm(y, cod);
        if (!row->complete || row->size() == 0 || row->cols.back() > H / 4) {
            double c1 = 0, c2 = 0;
            for (std::size_t i = 0; i < m; ++i) {
                c1 = std::max(c1, std::fabs(y[i] - y2[i]));
                c2 = std::max(c2, std::fabs(y2[i] - a3[i].value()));
            }
            if (!row->complete) {
                t.change[n] = c1;
                t.prev_change[n] = c2;
            }
        }
    }
    return t;
}

inline Status combine(Status acc, Status s)
{
    if (acc == Status::fail || s == Status::fail) return Status::fail;
    if (acc == Status::inconclusive || s == Status::inconclusive) return Status::inconclusive;
    return Status::pass;
}

inline std::string fmt_index(index_t n) { return std::to_string(n); }

inline void put_windows(ConditionVerdict& v, const limit_eval& e, const std::string& prefix = "")
{
    v.add(prefix + "limsup_quarter", e.up.quarter);
    v.add(prefix + "limsup_half", e.up.half);
    v.add(prefix + "limsup", e.up.full);
    if (!std::isnan(e.exponent)) v.add(prefix + "level_exponent", e.exponent);
}

inline std::vector<index_t> sample_columns(index_t H, std::size_t count)
{
    std::vector<index_t> c;
    for (index_t k = 0; k < count && k <= H / 2; ++k) c.push_back(k);
    return c;
}

} // namespace detail

// ------------------------------------------------------------------------------------------------
// Classical conditions S1–S3 and S3♯.

inline std::vector<ConditionVerdict> check_S(const BlockMatrix& A, const Block& T, const CheckOptions& o)
{
    const index_t H = o.horizon;
    if (H < 16) throw error(errc::insufficient_horizon, "condition checks need horizon >= 16");
    const IdealSpec fin = IdealSpec::fin();
    SurveyRequest q;
    q.tails = true;
    q.sum_target = T;
    q.columns = detail::sample_columns(H, o.column_samples);
    q.column_norms = true;
    q.probes = o.probes.empty() ? coordinate_probes(A.d()) : o.probes;
    auto s = survey_rows(A, H, q, o.ctx);
    std::vector<ConditionVerdict> out;

    {
        ConditionVerdict v{"S1"};
        v.horizon = H;
        v.tol = o.stabilization;
        std::optional<std::size_t> chosen;
        bool all_fail = true;
        detail::sup_eval last;
        for (std::size_t c = 0; c < s.k0s.size(); ++c) {
            auto e = detail::check_bounded(s.tail_up[c], s.tail_low[c], H, o.stabilization);
            if (e.status != Status::fail) all_fail = false;
            if (e.status == Status::pass) {
                chosen = c;
                last = e;
                break;
            }
            last = e;
        }
        if (chosen) {
            v.status = Status::pass;
            v.bind("k0", std::to_string(s.k0s[*chosen]));
            v.add("k0", static_cast<double>(s.k0s[*chosen]));
        } else if (all_fail) {
            v.status = Status::fail;
            v.bind("witness_row", detail::fmt_index(last.argmax));
            v.add("witness_row", static_cast<double>(last.argmax));
            v.add("witness_value", last.witness_value);
            v.bind("witness_k0", std::to_string(s.k0s.back()));
        }
        v.add("sup", last.sup);
        v.add("sup_half", last.half);
        v.add("sup_quarter", last.quarter);
        v.add("relative_growth", last.growth);
        out.push_back(std::move(v));
    }
    {
        ConditionVerdict v{"S2"};
        v.horizon = H;
        v.tol = o.tol;
        auto e = detail::check_vanishing(fin, s.sum_dev, s.sum_dev, H, o);
        v.status = e.status;
        detail::put_windows(v, e, "deviation_");
        if (!s.sum_flat.empty()) {
            auto lim = ideal_lim_sampled(fin, s.sum_flat, A.block_size(), H, std::max(o.tol, 1e-12));
            if (A.block_size() == 1) {
                v.add("row_sum_limit", lim.value());
            } else {
                for (std::size_t i = 0; i < A.m(); ++i)
                    for (std::size_t j = 0; j < A.d(); ++j)
                        v.add("row_sum_limit(" + std::to_string(i) + "," + std::to_string(j) + ")",
                              lim.estimate[i * A.d() + j]);
            }
        }
        if (e.status == Status::fail) {
            v.bind("witness_row", detail::fmt_index(e.witness));
            v.add("witness_row", static_cast<double>(e.witness));
            v.add("witness_value", e.witness_value);
        }
        v.bind("rule", e.rule);
        out.push_back(std::move(v));
    }
    {
        ConditionVerdict v{"S3"};
        v.horizon = H;
        v.tol = o.tol;
        v.bind("quantifier", "sampled");
        v.bind("probes", std::to_string(q.probes.size()));
        Status st = Status::pass;
        double worst = 0.0;
        for (std::size_t c = 0; c < q.columns.size(); ++c) {
            double col_worst = 0.0;
            for (std::size_t p = 0; p < q.probes.size(); ++p) {
                auto e = detail::check_vanishing(fin, s.probe_val[c][p], s.probe_val[c][p], H, o);
                col_worst = std::max(col_worst, e.up.full);
                if (e.status == Status::fail && st != Status::fail) {
                    v.bind("witness_column", std::to_string(q.columns[c]));
                    v.bind("witness_probe", q.probes[p].name);
                    v.bind("witness_row", detail::fmt_index(e.witness));
                    v.add("witness_column", static_cast<double>(q.columns[c]));
                    v.add("witness_row", static_cast<double>(e.witness));
                    v.add("witness_value", e.witness_value);
                }
                st = detail::combine(st, e.status);
            }
            if (c < 4) v.add("column" + std::to_string(q.columns[c]) + "_tail_sup", col_worst);
            worst = std::max(worst, col_worst);
        }
        v.status = st;
        v.add("max_column_limsup", worst);
        v.add("columns", static_cast<double>(q.columns.size()));
        out.push_back(std::move(v));
    }
    {
        ConditionVerdict v{"S3♯"};
        v.horizon = H;
        v.tol = o.tol;
        Status st = Status::pass;
        double worst = 0.0;
        for (std::size_t c = 0; c < q.columns.size(); ++c) {
            auto e = detail::check_vanishing(fin, s.col_norm[c], s.col_norm[c], H, o);
            worst = std::max(worst, e.up.full);
            if (e.status == Status::fail && st != Status::fail) {
                v.bind("witness_column", std::to_string(q.columns[c]));
                v.bind("witness_row", detail::fmt_index(e.witness));
                v.add("witness_column", static_cast<double>(q.columns[c]));
                v.add("witness_row", static_cast<double>(e.witness));
                v.add("witness_value", e.witness_value);
            }
            st = detail::combine(st, e.status);
        }
        v.status = st;
        v.add("max_column_norm_limsup", worst);
        out.push_back(std::move(v));
    }
    return out;
}

// ------------------------------------------------------------------------------------------------
// Ideal conditions T1–T6 and their variants.

inline const std::vector<std::string>& all_T_conditions()
{
    static const std::vector<std::string> ids = {"T1", "T1♭", "T1♭♭", "T2", "T2♭", "T3", "T3♮", "T3♯",
                                                 "T4", "T4♭", "T5", "T5′", "T5♯", "T6", "T6♭"};
    return ids;
}

namespace detail {

struct T_context {
    const BlockMatrix& A;
    const Block& T;
    const IdealSpec& I;
    const IdealSpec& J;
    const CheckOptions& o;
    RowSurvey s;
    std::vector<NamedSet> suite;
    std::vector<index_t> columns;
    std::vector<Probe> probes;
    std::optional<std::size_t> k0_index; // chosen in T1
};

inline ConditionVerdict make(const std::string& id, const CheckOptions& o)
{
    ConditionVerdict v{id};
    v.horizon = o.horizon;
    v.tol = o.tol;
    return v;
}

inline void witness_row(ConditionVerdict& v, index_t n, double value)
{
    v.bind("witness_row", fmt_index(n));
    v.add("witness_row", static_cast<double>(n));
    v.add("witness_value", value);
}

inline ConditionVerdict check_T1(T_context& c)
{
    auto v = make("T1", c.o);
    v.tol = c.o.stabilization;
    bool all_fail = true;
    sup_eval last;
    for (std::size_t i = 0; i < c.s.k0s.size(); ++i) {
        auto e = check_bounded(c.s.tail_up[i], c.s.tail_low[i], c.o.horizon, c.o.stabilization);
        last = e;
        if (e.status != Status::fail) all_fail = false;
        if (e.status == Status::pass) {
            c.k0_index = i;
            break;
        }
    }
    if (c.k0_index) {
        v.status = Status::pass;
        v.bind("k0", std::to_string(c.s.k0s[*c.k0_index]));
        v.add("k0", static_cast<double>(c.s.k0s[*c.k0_index]));
    } else if (all_fail) {
        v.status = Status::fail;
        witness_row(v, last.argmax, last.witness_value);
        v.bind("witness_k0", std::to_string(c.s.k0s.back()));
    }
    v.add("sup", last.sup);
    v.add("sup_half", last.half);
    v.add("relative_growth", last.growth);
    return v;
}

inline ConditionVerdict check_T1flat(T_context& c)
{
    auto v = make("T1♭", c.o);
    v.tol = c.o.stabilization;
    const std::size_t ki = c.k0_index.value_or(0);
    auto e = check_limsup_bounded(c.J, c.s.tail_up[ki], c.s.tail_low[ki], c.o.horizon, c.o.stabilization);
    // Rows off J0 need a finite tail for some f(n); finite dimensions give f(n) = 0 when the row converges.
    Status rows = Status::pass;
    for (const auto& rt : c.s.row_tests) rows = combine(rows, rt.status == Status::fail ? Status::inconclusive : rt.status);
    v.status = e.status == Status::pass ? rows : e.status;
    v.bind("k0", std::to_string(c.s.k0s[ki]));
    const double thr = e.sup * (1 + c.o.stabilization) + 1e-12;
    v.bind("J0", "{n : ||A_{n,>=k0}|| <= " + std::to_string(thr) + "}");
    v.bind("f", "f(n)=0");
    v.add("J_limsup", e.sup);
    v.add("J_limsup_half", e.half);
    v.add("J0_threshold", thr);
    if (e.status == Status::fail) witness_row(v, e.argmax, e.witness_value);
    return v;
}

// Row-wise tail convergence, shared by T1♭♭ and T3♮.
inline ConditionVerdict check_rows_converge(T_context& c, const std::string& id)
{
    auto v = make(id, c.o);
    Status st = Status::pass;
    double worst = 0.0;
    index_t complete = 0;
    for (index_t n = 0; n <= c.o.horizon; ++n) {
        const auto& rt = c.s.row_tests[n];
        complete += c.s.complete[n] ? 1 : 0;
        worst = std::max(worst, rt.window);
        if (rt.status == Status::fail && st != Status::fail) witness_row(v, n, rt.window);
        st = combine(st, rt.status);
    }
    v.status = st;
    v.add("max_tail_window", worst);
    v.add("complete_rows", static_cast<double>(complete));
    if (id == "T1♭♭") v.bind("f", "f(n)=0");
    return v;
}

inline ConditionVerdict check_T2(T_context& c, bool flat)
{
    auto v = make(flat ? "T2♭" : "T2", c.o);
    const index_t k0 = c.k0_index ? c.s.k0s[*c.k0_index] : 0;
    v.bind("k0", std::to_string(k0));
    if (k0 == 0) {
        v.status = Status::pass;
        v.bind("rule", "void for k0 = 0");
        return v;
    }
    v.bind("quantifier", "sampled");
    Status st = Status::pass;
    for (std::size_t ci = 0; ci < c.columns.size() && c.columns[ci] < k0; ++ci)
        for (std::size_t p = 0; p < c.probes.size(); ++p) {
            const auto& y = c.s.probe_val[ci][p];
            auto e = flat ? check_limsup_bounded(c.J, y, y, c.o.horizon, c.o.stabilization)
                          : check_bounded(y, y, c.o.horizon, c.o.stabilization);
            if (e.status == Status::fail && st != Status::fail) {
                v.bind("witness_column", std::to_string(c.columns[ci]));
                v.bind("witness_probe", c.probes[p].name);
                witness_row(v, e.argmax, e.witness_value);
            }
            st = combine(st, e.status);
        }
    v.status = st;
    return v;
}

inline ConditionVerdict check_T4(T_context& c)
{
    auto v = make("T4", c.o);
    auto e = check_vanishing(c.J, c.s.sum_dev, c.s.sum_dev, c.o.horizon, c.o);
    v.status = e.status;
    put_windows(v, e, "deviation_");
    v.bind("rule", e.rule);
    if (!c.s.sum_flat.empty()) {
        auto lim = ideal_lim_sampled(c.J, c.s.sum_flat, c.A.block_size(), c.o.horizon, std::max(c.o.tol, 1e-12));
        if (c.A.block_size() == 1) v.add("row_sum_limit", lim.value());
    }
    if (e.status == Status::fail) witness_row(v, e.witness, e.witness_value);
    return v;
}

inline ConditionVerdict check_T4flat(T_context& c)
{
    auto v = make("T4♭", c.o);
    Status st = Status::pass;
    double worst = 0.0;
    for (index_t n = 0; n <= c.o.horizon; ++n) {
        if (c.s.complete[n]) continue;
        double ch = c.s.sum_prev_dev[n];
        worst = std::max(worst, ch);
        Status r = ch <= std::max(c.o.tol, 1e-12) ? Status::pass : Status::inconclusive;
        st = combine(st, r);
    }
    v.status = st;
    v.add("max_row_sum_change", worst);
    return v;
}

inline ConditionVerdict check_T6flat(T_context& c)
{
    auto v = make("T6♭", c.o);
    v.bind("quantifier", "sampled");
    Status st = Status::pass;
    double worst = 0.0;
    for (std::size_t ci = 0; ci < c.columns.size(); ++ci) {
        const auto& y = c.s.col_norm[ci];
        auto e = check_vanishing(c.J, y, y, c.o.horizon, c.o);
        worst = std::max(worst, e.up.full);
        if (e.status == Status::fail && st != Status::fail) {
            v.bind("witness_column", std::to_string(c.columns[ci]));
            v.add("witness_column", static_cast<double>(c.columns[ci]));
            witness_row(v, e.witness, e.witness_value);
        }
        st = combine(st, e.status);
    }
    v.status = st;
    v.add("max_column_norm_limsup", worst);
    v.add("columns", static_cast<double>(c.columns.size()));
    return v;
}

inline ConditionVerdict check_T6(T_context& c)
{
    auto v = make("T6", c.o);
    v.bind("quantifier", "sampled");
    Status st = Status::pass;
    std::string sets;
    for (std::size_t e = 0; e < c.suite.size(); ++e) {
        auto r = check_vanishing(c.J, c.s.set_up[e], c.s.set_low[e], c.o.horizon, c.o);
        v.add("limsup[" + c.suite[e].name + "]", r.up.full);
        if (r.status == Status::fail && st != Status::fail) {
            v.bind("witness_set", c.suite[e].name);
            witness_row(v, r.witness, r.witness_value);
        }
        st = combine(st, r.status);
        sets += (sets.empty() ? "" : ";") + c.suite[e].name;
    }
    v.bind("sets", sets);
    v.status = st;
    return v;
}

// Canonical and user sequences for the space a condition quantifies over.
inline std::vector<named_sequence> space_sequences(const T_context& c, const std::string& space)
{
    std::vector<named_sequence> out;
    const std::size_t d = c.A.d();
    const std::size_t axes = std::min<std::size_t>(d, 4);
    auto add_axis = [&](const std::string& name, std::size_t j, std::function<double(index_t)> w) {
        out.push_back({name + "·e" + std::to_string(j), axis_sequence(d, j, std::move(w)), false});
    };
    for (const auto& ns : c.suite) {
        const SetDescriptor E = ns.set;
        for (std::size_t j = 0; j < axes; ++j) {
            if (space == "c00b" || space == "c0b" || space == "cb" || space == "c00" || space == "c")
                add_axis("1_" + ns.name, j, [E](index_t k) { return E.contains(k) ? 1.0 : 0.0; });
            if (j == 0 && (space == "c00b" || space == "c0b" || space == "cb" || space == "c00" || space == "c"))
                add_axis("alt_" + ns.name, j, [E](index_t k) { return E.contains(k) ? (k % 2 ? -1.0 : 1.0) : 0.0; });
            if (j == 0 && (space == "c00" || space == "c"))
                add_axis("ramp_" + ns.name, j, [E](index_t k) { return E.contains(k) ? static_cast<double>(k + 1) : 0.0; });
        }
    }
    if (space == "cb" || space == "c")
        for (std::size_t j = 0; j < axes; ++j) add_axis("const", j, [](index_t) { return 1.0; });
    if (space == "c0b")
        for (std::size_t j = 0; j < axes; ++j)
            add_axis("harmonic", j, [](index_t k) { return 1.0 / static_cast<double>(k + 1); });
    for (std::size_t i = 0; i < c.o.x_samples.size(); ++i) {
        const auto& x = c.o.x_samples[i];
        auto sp = classify_sample(c.I, x, c.o.horizon);
        bool ok = (space == "c" && sp.c) || (space == "cb" && sp.cb) || (space == "c0b" && sp.c0b) ||
                  (space == "c00" && sp.c00) || (space == "c00b" && sp.c00b);
        if (ok) out.push_back({"sample" + std::to_string(i), x, true});
    }
    return out;
}

// Row convergence of A_n x over a sequence space (T3, T3♯).
inline ConditionVerdict check_series(T_context& c, const std::string& id, const std::string& space)
{
    auto v = make(id, c.o);
    v.bind("quantifier", "sampled");
    auto seqs = space_sequences(c, space);
    Status st = Status::pass;
    double worst = 0.0;
    for (const auto& ns : seqs) {
        auto t = transform_all(c.A, ns.x, c.o.horizon, c.o.ctx.cod);
        for (index_t n = 0; n <= c.o.horizon; ++n) {
            double ch = t.change[n];
            worst = std::max(worst, ch);
            Status r = Status::pass;
            if (ch > std::max(c.o.tol, 1e-12)) {
                r = Status::inconclusive;
                if (ch >= 1.0 && ch >= t.prev_change[n] && t.prev_change[n] >= 1.0) r = Status::fail;
            }
            if (r == Status::fail && st != Status::fail) {
                v.bind("witness_sequence", ns.name);
                witness_row(v, n, ch);
            }
            st = combine(st, r);
        }
    }
    v.status = st;
    v.add("sequences", static_cast<double>(seqs.size()));
    v.add("max_partial_sum_change", worst);
    return v;
}

// 𝒥-lim A x = 0 over a sequence space (T5, T5′, T5♯).
inline ConditionVerdict check_null_image(T_context& c, const std::string& id, const std::string& space, bool bounded)
{
    auto v = make(id, c.o);
    v.bind("quantifier", "sampled");
    auto seqs = space_sequences(c, space);
    Status st = Status::pass;
    double worst = 0.0;
    for (const auto& ns : seqs) {
        auto t = transform_all(c.A, ns.x, c.o.horizon, c.o.ctx.cod);
        auto e = check_vanishing(c.J, t.norm, t.norm, c.o.horizon, c.o);
        Status r = e.status;
        worst = std::max(worst, e.up.full);
        if (bounded) {
            auto b = check_bounded(t.norm, t.norm, c.o.horizon, c.o.stabilization);
            r = combine(r, b.status == Status::fail ? Status::fail : (b.status == Status::pass ? Status::pass : Status::inconclusive));
            if (b.status == Status::fail && st != Status::fail) {
                v.bind("witness_sequence", ns.name);
                witness_row(v, b.argmax, b.witness_value);
            }
        }
        if (e.status == Status::fail && st != Status::fail) {
            v.bind("witness_sequence", ns.name);
            witness_row(v, e.witness, e.witness_value);
        }
        st = combine(st, r);
    }
    v.status = st;
    v.add("sequences", static_cast<double>(seqs.size()));
    v.add("max_limsup", worst);
    return v;
}

} // namespace detail

inline std::vector<ConditionVerdict> check_T(const BlockMatrix& A, const Block& T, const IdealSpec& I,
                                             const IdealSpec& J, const CheckOptions& o,
                                             std::vector<std::string> ids = {})
{
    const index_t H = o.horizon;
    if (H < 16) throw error(errc::insufficient_horizon, "condition checks need horizon >= 16");
    if (ids.empty()) ids = all_T_conditions();
    for (auto& id : ids) id = canonical_condition_id(id);
    auto want = [&](const char* id) { return std::find(ids.begin(), ids.end(), id) != ids.end(); };

    detail::T_context c{A, T, I, J, o, {}, ideal_sample_suite(I, o.E_samples, H),
                        detail::sample_columns(H, o.column_samples),
                        o.probes.empty() ? coordinate_probes(A.d()) : o.probes, std::nullopt};
    for (const auto& x : o.x_samples) classify_sample(I, x, H);
    SurveyRequest q;
    q.tails = true;
    q.sum_target = T;
    q.columns = c.columns;
    q.column_norms = want("T6♭");
    if (want("T2") || want("T2♭")) q.probes = c.probes;
    if (want("T6")) {
        for (const auto& e : c.suite) q.sets.push_back(e.set);
        q.set_group_norms = true;
    }
    c.s = survey_rows(A, H, q, o.ctx);

    std::vector<ConditionVerdict> out;
    auto t1 = detail::check_T1(c);
    for (const auto& id : ids) {
        if (id == "T1") out.push_back(t1);
        else if (id == "T1♭") out.push_back(detail::check_T1flat(c));
        else if (id == "T1♭♭") out.push_back(detail::check_rows_converge(c, "T1♭♭"));
        else if (id == "T2") out.push_back(detail::check_T2(c, false));
        else if (id == "T2♭") out.push_back(detail::check_T2(c, true));
        else if (id == "T3") out.push_back(detail::check_series(c, "T3", "cb"));
        else if (id == "T3♮") out.push_back(detail::check_rows_converge(c, "T3♮"));
        else if (id == "T3♯") out.push_back(detail::check_series(c, "T3♯", "c"));
        else if (id == "T4") out.push_back(detail::check_T4(c));
        else if (id == "T4♭") out.push_back(detail::check_T4flat(c));
        else if (id == "T5") out.push_back(detail::check_null_image(c, "T5", "c00b", false));
        else if (id == "T5′") out.push_back(detail::check_null_image(c, "T5′", "c0b", true));
        else if (id == "T5♯") out.push_back(detail::check_null_image(c, "T5♯", "c00", false));
        else if (id == "T6") out.push_back(detail::check_T6(c));
        else if (id == "T6♭") out.push_back(detail::check_T6flat(c));
        else throw error(errc::unknown_name, "unknown condition id " + id);
    }
    return out;
}

// ------------------------------------------------------------------------------------------------
// Finite-dimensional conditions F1, F4, F6, F6′.

inline std::vector<ConditionVerdict> check_F(const BlockMatrix& A, const Block& T, const IdealSpec& I,
                                             const IdealSpec& J, const CheckOptions& o, bool with_F6prime = false)
{
    const index_t H = o.horizon;
    if (H < 16) throw error(errc::insufficient_horizon, "condition checks need horizon >= 16");
    auto suite = ideal_sample_suite(I, o.E_samples, H);
    SurveyRequest q;
    q.sum_target = T;
    q.abs_sums = true;
    for (const auto& e : suite) q.sets.push_back(e.set);
    q.set_abs_sums = true;
    auto s = survey_rows(A, H, q, o.ctx);
    std::vector<ConditionVerdict> out;
    {
        auto v = detail::make("F1", o);
        v.tol = o.stabilization;
        auto e = detail::check_bounded(s.abs_total, s.abs_total, H, o.stabilization);
        v.status = e.status;
        v.add("sup", e.sup);
        v.add("sup_half", e.half);
        v.add("relative_growth", e.growth);
        if (e.status == Status::fail) detail::witness_row(v, e.argmax, e.witness_value);
        out.push_back(std::move(v));
    }
    {
        auto v = detail::make("F4", o);
        auto e = detail::check_vanishing(J, s.sum_dev, s.sum_dev, H, o);
        v.status = e.status;
        detail::put_windows(v, e, "deviation_");
        v.bind("rule", e.rule);
        if (!s.sum_flat.empty()) {
            auto lim = ideal_lim_sampled(J, s.sum_flat, A.block_size(), H, std::max(o.tol, 1e-12));
            if (A.block_size() == 1) v.add("row_sum_limit", lim.value());
        }
        if (e.status == Status::fail) detail::witness_row(v, e.witness, e.witness_value);
        out.push_back(std::move(v));
    }
    {
        auto v = detail::make("F6", o);
        v.bind("quantifier", "sampled");
        Status st = Status::pass;
        std::string sets;
        for (std::size_t e = 0; e < suite.size(); ++e) {
            auto r = detail::check_vanishing(J, s.set_abs[e], s.set_abs[e], H, o);
            v.add("limsup[" + suite[e].name + "]", r.up.full);
            if (r.status == Status::fail && st != Status::fail) {
                v.bind("witness_set", suite[e].name);
                detail::witness_row(v, r.witness, r.witness_value);
            }
            st = detail::combine(st, r.status);
            sets += (sets.empty() ? "" : ";") + suite[e].name;
        }
        v.bind("sets", sets);
        v.status = st;
        out.push_back(std::move(v));
    }
    if (with_F6prime) {
        auto v = detail::make("F6′", o);
        auto e = detail::check_vanishing(J, s.abs_total, s.abs_total, H, o);
        v.status = e.status;
        detail::put_windows(v, e);
        v.bind("rule", e.rule);
        if (e.status == Status::fail) detail::witness_row(v, e.witness, e.witness_value);
        out.push_back(std::move(v));
    }
    return out;
}

// ------------------------------------------------------------------------------------------------
// Countably generated target: R1, R2, R4, R6.

inline std::vector<ConditionVerdict> check_R(const BlockMatrix& A, const Block& T, const IdealSpec& I,
                                             const IdealSpec& J, const CheckOptions& o,
                                             std::vector<NamedSet> r6_sets = {})
{
    const index_t H = o.horizon;
    if (H < 16) throw error(errc::insufficient_horizon, "condition checks need horizon >= 16");
    if (!(J.type() == IdealSpec::kind::generated || J.type() == IdealSpec::kind::nu2))
        throw error(errc::unsupported_ideal, "R conditions need a generated target ideal, got " + J.str());
    auto suite = r6_sets.empty() ? ideal_sample_suite(I, o.E_samples, H) : std::move(r6_sets);
    SurveyRequest q;
    q.tails = true;
    q.sum_target = T;
    q.abs_sums = true;
    for (const auto& e : suite) q.sets.push_back(e.set);
    q.set_abs_sums = true;
    auto s = survey_rows(A, H, q, NormContext::one_norm());

    const std::size_t G = J.generator_count(H);
    std::vector<char> covered(H + 1, 0);
    std::optional<std::size_t> t0;
    detail::sup_eval r1, last;
    bool diverges = false;
    for (std::size_t t = 0; t < G; ++t) {
        const auto Q = J.generator(t);
        for (index_t n = 0; n <= H; ++n)
            if (Q.contains(n)) covered[n] = 1;
        index_t outside_quarter = 0;
        for (index_t n = 0; n <= H / 4; ++n) outside_quarter += covered[n] ? 0 : 1;
        if (outside_quarter < 32) break;
        auto e = detail::check_bounded(s.abs_total, s.abs_total, H, o.stabilization,
                                       [&](index_t n) { return !covered[n]; });
        if (e.status == Status::inconclusive && J.level_structured()) {
            // Growth of the first uncovered level alone already makes the sup off Q_t infinite.
            auto lv = detail::check_bounded(s.abs_total, s.abs_total, H, o.stabilization,
                                            [&](index_t n) { return n != 0 && nu2(n) == t + 1; });
            if (lv.status == Status::fail) e = lv;
        }
        last = e;
        diverges = e.status == Status::fail;
        if (e.status == Status::pass) {
            t0 = t;
            r1 = e;
            break;
        }
    }
    std::vector<ConditionVerdict> out;
    {
        auto v = detail::make("R1", o);
        v.tol = o.stabilization;
        if (t0) {
            v.status = Status::pass;
            v.bind("t0", std::to_string(*t0));
            v.add("t0", static_cast<double>(*t0));
            v.add("sup_off_Q", r1.sup);
            v.add("sup_off_Q_half", r1.half);
        } else {
            v.status = diverges ? Status::fail : Status::inconclusive;
            v.add("sup_off_Q", last.sup);
            if (diverges) detail::witness_row(v, last.argmax, last.witness_value);
        }
        v.bind("Q_t0", "union of the first t0+1 generators of " + J.str());
        out.push_back(std::move(v));
    }
    {
        auto v = detail::make("R2", o);
        Status st = Status::pass;
        index_t rows = 0;
        if (t0) {
            std::vector<char> inQ(H + 1, 0);
            for (std::size_t t = 0; t <= *t0; ++t) {
                const auto Q = J.generator(t);
                for (index_t n = 0; n <= H; ++n)
                    if (Q.contains(n)) inQ[n] = 1;
            }
            for (index_t n = 0; n <= H; ++n) {
                if (!inQ[n]) continue;
                ++rows;
                const auto& rt = s.row_tests[n];
                if (rt.status == Status::fail && st != Status::fail) detail::witness_row(v, n, rt.window);
                st = detail::combine(st, rt.status);
            }
            v.bind("t0", std::to_string(*t0));
        } else {
            st = Status::inconclusive;
        }
        v.status = st;
        v.add("rows_checked", static_cast<double>(rows));
        out.push_back(std::move(v));
    }
    {
        auto v = detail::make("R4", o);
        auto e = detail::check_vanishing(J, s.sum_dev, s.sum_dev, H, o);
        v.status = e.status;
        detail::put_windows(v, e, "deviation_");
        v.bind("rule", e.rule);
        if (e.status == Status::fail) detail::witness_row(v, e.witness, e.witness_value);
        out.push_back(std::move(v));
    }
    {
        auto v = detail::make("R6", o);
        v.bind("quantifier", "sampled");
        Status st = Status::pass;
        std::string sets;
        for (std::size_t e = 0; e < suite.size(); ++e) {
            auto r = detail::check_vanishing(J, s.set_abs[e], s.set_abs[e], H, o);
            v.add("limsup[" + suite[e].name + "]", r.up.full);
            if (!std::isnan(r.exponent)) v.add("exponent[" + suite[e].name + "]", r.exponent);
            if (r.status == Status::fail && st != Status::fail) {
                v.bind("witness_set", suite[e].name);
                detail::witness_row(v, r.witness, r.witness_value);
            }
            st = detail::combine(st, r.status);
            sets += (sets.empty() ? "" : ";") + suite[e].name;
        }
        v.bind("sets", sets);
        v.status = st;
        out.push_back(std::move(v));
    }
    return out;
}

// ------------------------------------------------------------------------------------------------
// Rank-one matrices A_{n,k} = a_{n,k} A_0: M0, M1, M4, M6.

inline BlockMatrix rank_one_scalar(const BlockMatrix& A)
{
    if (!A.rank_one) throw error(errc::not_rank_one, "matrix " + A.name + " has no rank-one form");
    auto a = A.rank_one->a;
    BlockMatrix S = BlockMatrix::scalar([a](index_t n, index_t k) { return a(n, k); });
    S.column_finite_bound = A.column_finite_bound;
    S.row_support = A.row_support;
    S.name = A.name + ".scalar";
    return S;
}

inline std::vector<ConditionVerdict> check_M(const BlockMatrix& A, const Block& T, const IdealSpec& I,
                                             const IdealSpec& J, const CheckOptions& o)
{
    const index_t H = o.horizon;
    if (H < 16) throw error(errc::insufficient_horizon, "condition checks need horizon >= 16");
    BlockMatrix S = rank_one_scalar(A);
    const Block& A0 = A.rank_one->A0;
    auto f = check_F(S, Block(1, 1, 0.0), I, J, o);
    std::vector<ConditionVerdict> out;
    {
        auto v = detail::make("M0", o);
        v.status = Status::pass;
        v.add("A0_norm", op_norm_block(A0, o.ctx));
        out.push_back(std::move(v));
    }
    {
        auto v = f[0];
        v.id = "M1";
        out.push_back(std::move(v));
    }
    {
        auto v = detail::make("M4", o);
        std::vector<double> kappa(H + 1), dev(H + 1);
        for (index_t n = 0; n <= H; ++n) {
            kappa[n] = row_operator_sum(S, n, H).v[0];
            double m = 0.0;
            for (std::size_t e = 0; e < T.v.size(); ++e) m = std::max(m, std::fabs(T.v[e] - kappa[n] * A0.v[e]));
            dev[n] = m;
        }
        auto lim = ideal_lim_sampled(J, kappa, 1, H, std::max(o.tol, 1e-12));
        auto e = detail::check_vanishing(J, dev, dev, H, o);
        v.status = e.status;
        v.add("kappa", lim.value());
        detail::put_windows(v, e, "deviation_");
        v.bind("rule", e.rule);
        if (e.status == Status::fail) detail::witness_row(v, e.witness, e.witness_value);
        out.push_back(std::move(v));
    }
    {
        auto v = f[2];
        v.id = "M6";
        out.push_back(std::move(v));
    }
    return out;
}

// ------------------------------------------------------------------------------------------------
// Tall domain ideal: B1, B2, B3.

inline std::vector<ConditionVerdict> check_B(const BlockMatrix& A, const IdealSpec& I, const IdealSpec& J,
                                             const CheckOptions& o)
{
    const index_t H = o.horizon;
    if (H < 16) throw error(errc::insufficient_horizon, "condition checks need horizon >= 16");
    if (!I.tall()) throw error(errc::unsupported_ideal, "B conditions need a tall ideal, got " + I.str());
    // Last nonzero column over rows and columns <= H/2 and <= H.
    long last_half = -1, last_full = -1;
    index_t wn = 0, wk = 0;
    for (index_t n = 0; n <= H; ++n) {
        auto row = A.row(n, H);
        for (std::size_t p = row->size(); p-- > 0;) {
            bool nz = false;
            row->for_each(p, [&](std::size_t, std::size_t, double v) { nz = nz || v != 0.0; });
            if (!nz) continue;
            const index_t k = row->cols[p];
            if (static_cast<long>(k) > last_full) {
                last_full = static_cast<long>(k);
                wn = n;
                wk = k;
            }
            if (n <= H / 2) {
                auto it = std::upper_bound(row->cols.begin(), row->cols.begin() + static_cast<std::ptrdiff_t>(p + 1), H / 2);
                (void)it;
                for (std::size_t pp = p + 1; pp-- > 0;) {
                    if (row->cols[pp] > H / 2) continue;
                    bool nz2 = false;
                    row->for_each(pp, [&](std::size_t, std::size_t, double v) { nz2 = nz2 || v != 0.0; });
                    if (nz2) {
                        last_half = std::max(last_half, static_cast<long>(row->cols[pp]));
                        break;
                    }
                }
            }
            break;
        }
    }
    std::vector<ConditionVerdict> out;
    std::optional<index_t> k1;
    {
        auto v = detail::make("B1", o);
        if (last_full < 0) {
            k1 = 0;
        } else if (last_full == last_half && static_cast<index_t>(last_full) < H / 4) {
            k1 = static_cast<index_t>(last_full) + 1;
        }
        if (k1) {
            v.status = Status::pass;
            v.bind("k1", std::to_string(*k1));
            v.add("k1", static_cast<double>(*k1));
        } else if (last_full > last_half && static_cast<index_t>(last_full) > H / 2) {
            v.status = Status::fail;
            v.bind("witness_row", std::to_string(wn));
            v.bind("witness_column", std::to_string(wk));
            v.add("witness_row", static_cast<double>(wn));
            v.add("witness_column", static_cast<double>(wk));
            v.add("witness_value", op_norm_block(A.block(wn, wk), o.ctx));
        }
        v.add("last_nonzero_column", static_cast<double>(last_full));
        v.add("last_nonzero_column_half", static_cast<double>(last_half));
        out.push_back(std::move(v));
    }
    auto v2 = detail::make("B2", o);
    auto v3 = detail::make("B3", o);
    if (!k1) {
        v2.status = v3.status = Status::inconclusive;
    } else {
        SurveyRequest q;
        for (index_t k = 0; k < *k1; ++k) q.columns.push_back(k);
        q.column_norms = true;
        q.probes = o.probes.empty() ? coordinate_probes(A.d()) : o.probes;
        auto s = survey_rows(A, H, q, o.ctx);
        Status s2 = Status::pass, s3 = Status::pass;
        double sup = 0.0;
        for (std::size_t c = 0; c < q.columns.size(); ++c) {
            for (std::size_t p = 0; p < q.probes.size(); ++p) {
                auto e = detail::check_bounded(s.probe_val[c][p], s.probe_val[c][p], H, o.stabilization);
                sup = std::max(sup, e.sup);
                if (e.status == Status::fail && s2 != Status::fail) detail::witness_row(v2, e.argmax, e.witness_value);
                s2 = detail::combine(s2, e.status);
            }
            auto e = detail::check_vanishing(J, s.col_norm[c], s.col_norm[c], H, o);
            if (e.status == Status::fail && s3 != Status::fail) {
                v3.bind("witness_column", std::to_string(q.columns[c]));
                detail::witness_row(v3, e.witness, e.witness_value);
            }
            s3 = detail::combine(s3, e.status);
        }
        v2.status = s2;
        v3.status = s3;
        v2.add("sup", sup);
        v2.bind("k1", std::to_string(*k1));
        v3.bind("k1", std::to_string(*k1));
    }
    out.push_back(std::move(v2));
    out.push_back(std::move(v3));
    return out;
}

// ------------------------------------------------------------------------------------------------
// Behavioral cross-check.

struct SequenceFamily {
    std::string name;
    std::size_t dim = 1;
    std::string ideal = "fin"; // literal of the ideal the declared limits refer to
    std::size_t size = 0;      // 0: any index is a member
    std::function<SequenceView(std::size_t)> member;
};

struct BehavioralFailure {
    std::string family;
    std::size_t member = 0;
    double deviation = 0.0;
};

struct BehavioralSummary {
    std::size_t sequences = 0;
    std::size_t skipped = 0;
    std::size_t rows_sampled = 0;
    double max_deviation = 0.0;
    double max_row_deviation = 0.0;
    double tol = 0.0;
    index_t horizon = 0;
    std::vector<BehavioralFailure> failures;

    bool passed() const noexcept { return failures.empty() && sequences > 0; }
};

namespace detail {

inline std::vector<index_t> behavioral_rows(const IdealSpec& J, index_t H, std::size_t budget)
{
    std::vector<index_t> deep;
    if (J.level_structured()) {
        deep = deep_region(J, H);
    } else {
        for (index_t n = H / 2; n <= H; ++n)
            if (!J.is_generated() || in_deep(J, n, H)) deep.push_back(n);
    }
    if (deep.size() <= budget || budget == 0) return deep;
    std::vector<index_t> out;
    for (std::size_t i = 0; i < budget; ++i) out.push_back(deep[(i * (deep.size() - 1)) / (budget - 1)]);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace detail

inline BehavioralSummary empirical_regularity(const BlockMatrix& A, const Block& T, const IdealSpec& I,
                                              const IdealSpec& J, const std::vector<SequenceFamily>& families,
                                              std::size_t trials, index_t horizon, double tol,
                                              std::size_t row_budget = 256)
{
    BehavioralSummary out;
    out.tol = tol;
    out.horizon = horizon;
    auto rows = detail::behavioral_rows(J, horizon, row_budget);
    out.rows_sampled = rows.size();
    const std::size_t m = A.m(), d = A.d();
    for (const auto& fam : families) {
        if (fam.ideal != "fin" && fam.ideal != I.str()) {
            out.skipped += fam.size ? std::min(fam.size, trials) : trials;
            continue;
        }
        if (fam.dim != d) throw error(errc::invalid_family, fam.name + ": dimension mismatch");
        const std::size_t count = fam.size ? std::min(fam.size, trials) : trials;
        for (std::size_t i = 0; i < count; ++i) {
            SequenceView x = fam.member(i);
            if (!x.declared_limit) throw error(errc::invalid_family, fam.name + ": member without declared limit");
            const auto& eta = *x.declared_limit;
            std::vector<double> target = T.apply(eta);
            std::vector<double> flat;
            flat.reserve(rows.size() * m);
            std::vector<double> xs;
            if (!A.row_support) xs = x.sample(horizon);
            double row_dev = 0.0;
            for (index_t n : rows) {
                std::vector<double> y = A.row_support ? transform(A, x, n, horizon).value
                                                      : transform_sampled(A, xs, n, horizon);
                row_dev = std::max(row_dev, max_abs_diff(y, target));
                flat.insert(flat.end(), y.begin(), y.end());
            }
            std::vector<index_t> idx(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r) idx[r] = r;
            auto est = detail::median_over(flat, m, idx);
            const double dev = max_abs_diff(est, target);
            ++out.sequences;
            out.max_deviation = std::max(out.max_deviation, dev);
            out.max_row_deviation = std::max(out.max_row_deviation, row_dev);
            if (dev > tol) out.failures.push_back({fam.name, i, dev});
        }
    }
    return out;
}

// ------------------------------------------------------------------------------------------------
// Theorem-level verdicts.

enum class Overall { regular, not_regular, inconclusive };

inline const char* to_string(Overall o)
{
    switch (o) {
    case Overall::regular: return "Regular";
    case Overall::not_regular: return "NotRegular";
    default: return "Inconclusive";
    }
}

enum class TheoremMode {
    automatic,
    silverman_toeplitz,          // scalar, ℐ = 𝒥 = Fin: S1–S3
    operator_silverman_toeplitz, // ℐ = 𝒥 = Fin: S1–S3
    ideal_regularity,            // T1–T5
    countably_generated_target,  // T1, T4, T6 given T3♮, T6♭
    positive_operators,          // T1, T4, T6 with k0 = 0 given T3♮
    finite_dimensional,          // F1, F4, F6
    finite_dimensional_null,     // F1, F6′
    countably_generated_finite_dimensional, // R1, R2, R4, R6
    rank_one,                    // M0, M1, M4, M6
    tall_domain,                 // B1–B3
    bounded_to_bounded,          // T1♭, T2♭, T3♮
    convergent_to_bounded,       // T1♭, T2♭, T4♭
    unbounded_target,            // T1♭, T3, T4, T5
    convergent_domain,           // T1♭, T3♯, T4, T5♯
};

inline const char* to_string(TheoremMode m)
{
    switch (m) {
    case TheoremMode::automatic: return "automatic";
    case TheoremMode::silverman_toeplitz: return "silverman_toeplitz";
    case TheoremMode::operator_silverman_toeplitz: return "operator_silverman_toeplitz";
    case TheoremMode::ideal_regularity: return "ideal_regularity";
    case TheoremMode::countably_generated_target: return "countably_generated_target";
    case TheoremMode::positive_operators: return "positive_operators";
    case TheoremMode::finite_dimensional: return "finite_dimensional";
    case TheoremMode::finite_dimensional_null: return "finite_dimensional_null";
    case TheoremMode::countably_generated_finite_dimensional: return "countably_generated_finite_dimensional";
    case TheoremMode::rank_one: return "rank_one";
    case TheoremMode::tall_domain: return "tall_domain";
    case TheoremMode::bounded_to_bounded: return "bounded_to_bounded";
    case TheoremMode::convergent_to_bounded: return "convergent_to_bounded";
    case TheoremMode::unbounded_target: return "unbounded_target";
    case TheoremMode::convergent_domain: return "convergent_domain";
    }
    return "unknown";
}

inline TheoremMode parse_theorem_mode(const std::string& s)
{
    for (int i = 0; i <= static_cast<int>(TheoremMode::convergent_domain); ++i) {
        auto m = static_cast<TheoremMode>(i);
        if (s == to_string(m)) return m;
    }
    if (s == "auto") return TheoremMode::automatic;
    throw error(errc::unknown_name, "unknown theorem mode " + s);
}

struct RegularityReport {
    std::string theorem;
    std::string target_class;
    std::vector<ConditionVerdict> conditions;
    Overall overall = Overall::inconclusive;
    std::vector<std::string> implications;
    std::string explanation;
    std::optional<BehavioralSummary> behavioral;
    index_t horizon = 0;
    double tol = 0.0;

    const ConditionVerdict* find(const std::string& id) const
    {
        const std::string cid = canonical_condition_id(id);
        for (const auto& c : conditions)
            if (c.id == cid) return &c;
        return nullptr;
    }
};

namespace detail {

inline Overall decide(const std::vector<ConditionVerdict>& cs, const std::vector<std::string>& required)
{
    bool all = true;
    for (const auto& id : required) {
        const ConditionVerdict* v = nullptr;
        for (const auto& c : cs)
            if (c.id == id) v = &c;
        if (!v) {
            all = false;
            continue;
        }
        if (v->failed()) return Overall::not_regular;
        if (!v->passed()) all = false;
    }
    return all ? Overall::regular : Overall::inconclusive;
}

inline TheoremMode auto_mode(const BlockMatrix& A, const IdealSpec& I, const IdealSpec& J)
{
    if (I.is_fin() && J.is_fin()) return A.is_scalar() ? TheoremMode::silverman_toeplitz : TheoremMode::operator_silverman_toeplitz;
    if (I.is_fin() || J.countably_generated() || A.nonnegative) return TheoremMode::finite_dimensional;
    return TheoremMode::ideal_regularity;
}

} // namespace detail

inline RegularityReport regular_verdict(const BlockMatrix& A, const Block& T, const IdealSpec& I, const IdealSpec& J,
                                        TheoremMode mode, const CheckOptions& o,
                                        const std::vector<SequenceFamily>* families = nullptr,
                                        std::size_t trials = 0)
{
    RegularityReport r;
    r.horizon = o.horizon;
    r.tol = o.tol;
    if (mode == TheoremMode::automatic) mode = detail::auto_mode(A, I, J);
    r.theorem = to_string(mode);
    r.target_class = "(c^b(X," + I.str() + "), c^b(Y," + J.str() + ")) preserving limits through T";
    auto append = [&](std::vector<ConditionVerdict> v) {
        for (auto& c : v) r.conditions.push_back(std::move(c));
    };
    auto refuse = [&](const std::string& why) {
        r.overall = Overall::inconclusive;
        r.explanation = why;
    };
    std::vector<std::string> required;
    const bool finite_dim = true;
    switch (mode) {
    case TheoremMode::silverman_toeplitz:
    case TheoremMode::operator_silverman_toeplitz: {
        if (!(I.is_fin() && J.is_fin())) {
            refuse("the classical conditions apply to Fin on both sides");
            return r;
        }
        if (mode == TheoremMode::silverman_toeplitz && !A.is_scalar()) {
            refuse("scalar classical conditions need 1x1 blocks");
            return r;
        }
        auto s = check_S(A, T, o);
        append(std::move(s));
        required = {"S1", "S2", "S3"};
        r.implications.push_back("Fin domain: T1 and T4 imply T3");
        r.implications.push_back("Fin target: T5 implies T2");
        if (finite_dim) r.implications.push_back("finite dimensions: k0 = 0 and S3 coincides with S3♯");
        break;
    }
    case TheoremMode::ideal_regularity: {
        std::vector<std::string> ids = {"T1", "T2", "T4", "T5"};
        r.implications.push_back("finite dimensions: blocks bounded, k0 = 0, T2 void");
        r.implications.push_back("finite dimensions: T1 implies T3♮; T1 and T3♮ imply T3");
        if (J.is_fin()) r.implications.push_back("Fin target: T5 implies T2");
        if (I.is_fin()) r.implications.push_back("Fin domain: T1 and T4 imply T3");
        if (o.audit) {
            ids.push_back("T3");
            ids.push_back("T3♮");
        }
        append(check_T(A, T, I, J, o, ids));
        required = {"T1", "T4", "T5"};
        break;
    }
    case TheoremMode::countably_generated_target: {
        if (!J.countably_generated()) {
            refuse("target ideal " + J.str() + " is not countably generated");
            return r;
        }
        append(check_T(A, T, I, J, o, {"T3♮", "T6♭", "T1", "T4", "T6"}));
        const auto* h1 = r.find("T3♮");
        const auto* h2 = r.find("T6♭");
        if (h1 && h2 && (!h1->passed() || !h2->passed())) {
            r.explanation = "hypotheses T3♮ and T6♭ are not both verified";
            r.overall = Overall::inconclusive;
            return r;
        }
        required = {"T1", "T4", "T6"};
        r.implications.push_back("finite dimensions: k0 = 0");
        break;
    }
    case TheoremMode::positive_operators: {
        if (!A.nonnegative) {
            refuse("positive-operator characterization needs nonnegative blocks");
            return r;
        }
        CheckOptions po = o;
        po.ctx = NormContext::positive();
        append(check_T(A, T, I, J, po, {"T3♮", "T1", "T4", "T6"}));
        const auto* h = r.find("T3♮");
        if (h && !h->passed()) {
            r.explanation = "hypothesis T3♮ is not verified";
            r.overall = Overall::inconclusive;
            return r;
        }
        if (const auto* t1 = r.find("T1"); t1 && t1->passed() && t1->binding("k0") != "0") {
            r.explanation = "T1 holds only with k0 > 0";
            r.overall = Overall::inconclusive;
            return r;
        }
        required = {"T1", "T4", "T6"};
        break;
    }
    case TheoremMode::finite_dimensional: {
        if (!(I.is_fin() || J.countably_generated() || A.nonnegative)) {
            refuse("needs Fin domain, countably generated target, or nonnegative entries");
            return r;
        }
        append(check_F(A, T, I, J, o));
        required = {"F1", "F4", "F6"};
        break;
    }
    case TheoremMode::finite_dimensional_null: {
        r.target_class = "(l_inf(X), c_0^b(Y," + J.str() + "))";
        append(check_F(A, Block(A.m(), A.d(), 0.0), I, J, o, true));
        required = {"F1", "F6′"};
        break;
    }
    case TheoremMode::countably_generated_finite_dimensional: {
        r.target_class = "(c^b(X," + I.str() + "), c(Y," + J.str() + ")) preserving limits through T";
        append(check_R(A, T, I, J, o));
        required = {"R1", "R2", "R4", "R6"};
        break;
    }
    case TheoremMode::rank_one: {
        append(check_M(A, T, I, J, o));
        required = {"M0", "M1", "M4", "M6"};
        r.implications.push_back("rank-one blocks: T1 implies T3♮");
        break;
    }
    case TheoremMode::tall_domain: {
        r.target_class = "(c(X," + I.str() + "), c_0^b(Y," + J.str() + "))";
        append(check_B(A, I, J, o));
        required = {"B1", "B2", "B3"};
        break;
    }
    case TheoremMode::bounded_to_bounded:
    case TheoremMode::convergent_to_bounded: {
        if (!J.countably_generated()) {
            refuse("strong selectivity of " + J.str() + " has no finite certificate; only countably generated targets are checked");
            return r;
        }
        const bool bb = mode == TheoremMode::bounded_to_bounded;
        r.target_class = std::string(bb ? "(l_inf(X)" : "(c(X)") + ", l_inf(Y," + J.str() + "))";
        append(check_T(A, T, I, J, o, {"T1♭", "T2♭", bb ? "T3♮" : "T4♭"}));
        required = {"T1♭", "T2♭", bb ? "T3♮" : "T4♭"};
        break;
    }
    case TheoremMode::unbounded_target:
    case TheoremMode::convergent_domain: {
        if (!J.is_generated() && J.type() != IdealSpec::kind::nu2) {
            refuse("this condition list is checked only for generated target ideals");
            return r;
        }
        const bool ub = mode == TheoremMode::unbounded_target;
        r.target_class = ub ? "(c^b(X," + I.str() + "), c(Y," + J.str() + "))" : "(c(X," + I.str() + "), c(Y," + J.str() + "))";
        if (ub) {
            append(check_T(A, T, I, J, o, {"T1♭", "T3", "T4", "T5"}));
            required = {"T1♭", "T3", "T4", "T5"};
        } else {
            append(check_T(A, T, I, J, o, {"T1♭", "T3♯", "T4", "T5♯"}));
            required = {"T1♭", "T3♯", "T4", "T5♯"};
        }
        break;
    }
    case TheoremMode::automatic: break;
    }
    r.overall = detail::decide(r.conditions, required);
    if (families && !families->empty() && trials > 0)
        r.behavioral = empirical_regularity(A, T, I, J, *families, trials, o.horizon, std::max(o.tol, 1e-3));
    return r;
}

} // namespace summa
