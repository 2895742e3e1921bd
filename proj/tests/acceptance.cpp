// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any criterion fails.

#include <summa/conditions.hpp>
#include <summa/pringsheim.hpp>
#include <summa/witnesses.hpp>
#include <summa/zoo.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace summa;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream note;

    void require(bool cond, const std::string& what)
    {
        if (!cond) {
            if (ok) note << what;
            else note << "; " << what;
            ok = false;
        }
    }
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<void(Outcome&)> run;
};

const ConditionVerdict* find(const std::vector<ConditionVerdict>& cs, const std::string& id)
{
    for (const auto& c : cs)
        if (c.id == id) return &c;
    return nullptr;
}

bool has_status(const std::vector<ConditionVerdict>& cs, const std::string& id, Status s)
{
    const auto* c = find(cs, id);
    return c && c->status == s;
}

double evidence(const std::vector<ConditionVerdict>& cs, const std::string& id, const std::string& key)
{
    const auto* c = find(cs, id);
    if (!c) return std::nan("");
    auto v = diag_get(c->evidence, key);
    return v ? *v : std::nan("");
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Block random_block(std::mt19937_64& rng, std::size_t m, std::size_t d, bool nonneg)
{
    std::uniform_real_distribution<double> U(nonneg ? 0.0 : -1.0, 1.0);
    Block b(m, d);
    for (auto& v : b.v) v = U(rng);
    return b;
}

// ----------------------------------------------------------------------------------------------

void silverman_toeplitz(Outcome& out)
{
    constexpr index_t H = 10000;
    constexpr double exact_tol = 1e-12;
    constexpr double behavioral_tol = 1e-3;
    constexpr std::size_t trials = 200;

    auto C = cesaro();
    CheckOptions o;
    o.horizon = H;
    const Block T(1, 1, 1.0);
    auto s = check_S(C.matrix, T, o);
    for (const char* id : {"S1", "S2", "S3"}) out.require(has_status(s, id, Status::pass), std::string(id) + " not Pass");
    out.require(std::fabs(evidence(s, "S1", "sup") - 1.0) <= exact_tol, "S1 sup != 1");
    out.require(std::fabs(evidence(s, "S2", "row_sum_limit") - 1.0) <= exact_tol, "row-sum limit != 1");
    // Column k over rows [H/2, H]: the largest entry is 1/(H/2 + 1).
    const double col_oracle = 1.0 / static_cast<double>(H / 2 + 1);
    for (int k = 0; k < 4; ++k) {
        const double v = evidence(s, "S3", "column" + std::to_string(k) + "_tail_sup");
        out.require(std::fabs(v - col_oracle) <= exact_tol, "column " + std::to_string(k) + " tail sup " + fmt(v));
    }
    for (index_t n : {index_t{0}, index_t{7}, index_t{999}}) {
        auto row = C.matrix.row(n, H);
        double mx = 0.0;
        for (std::size_t p = 0; p < row->size(); ++p) mx = std::max(mx, std::fabs(row->scalar_at(p)));
        out.require(std::fabs(mx - 1.0 / static_cast<double>(n + 1)) <= exact_tol, "row max entry != 1/(n+1)");
    }

    std::vector<SequenceFamily> fams = {convergent_family(std::nullopt, "mixed", 1, 1)};
    auto b = empirical_regularity(C.matrix, T, IdealSpec::fin(), IdealSpec::fin(), fams, trials, H, behavioral_tol);
    out.require(b.sequences == trials, "sampled " + std::to_string(b.sequences) + " sequences");
    out.require(b.passed(), "behavioral max deviation " + fmt(b.max_deviation));
    out.note << (out.ok ? "" : "; ") << "max deviation " << fmt(b.max_deviation);
}

void remark22_separation(Outcome& out)
{
    constexpr std::size_t K = 64;
    constexpr double norm_tol = 1e-12;
    const double probe_bound = 2.0 / std::sqrt(static_cast<double>(K));

    auto M = remark22_truncated(K);
    CheckOptions o;
    o.horizon = M.default_horizon;
    o.probes = M.probes;
    auto t = check_T(M.matrix, *M.row_sum_limit, IdealSpec::fin(), IdealSpec::fin(), o, {"T6♭"});
    auto s = check_S(M.matrix, *M.row_sum_limit, o);
    out.require(has_status(t, "T6♭", Status::fail), "T6♭ not Fail");
    out.require(has_status(s, "S3", Status::pass), "S3 not Pass");
    out.require(has_status(s, "S3♯", Status::fail), "S3♯ not Fail");
    out.require(!find(t, "T6♭")->binding("witness_column").empty() && find(t, "T6♭")->binding("witness_column") == "0",
                "T6♭ witness column is not 0");

    for (index_t n = 0; n < K; ++n) {
        const double v = op_norm_block(M.matrix.block(n, 0), o.ctx);
        out.require(std::fabs(v - 1.0) <= norm_tol, "||A_{" + std::to_string(n) + ",0}|| = " + fmt(v));
    }
    // Per-vector column limit: the tail of ||A_{n,0} v|| over the late rows.
    const index_t first = static_cast<index_t>(std::sqrt(static_cast<double>(K)));
    double worst = 0.0;
    for (const auto& p : M.probes) {
        std::vector<double> v = p.v;
        if (p.axis) {
            v.assign(K, 0.0);
            v[*p.axis] = 1.0;
        }
        for (index_t n = first; n < K; ++n) worst = std::max(worst, norm1(M.matrix.block(n, 0).apply(v)));
    }
    out.require(worst <= probe_bound, "probe column limit " + fmt(worst));
    out.note << (out.ok ? "" : "; ") << "probe column limit " << fmt(worst) << " <= " << fmt(probe_bound);
}

void remark23_nonmembership(Outcome& out)
{
    std::vector<double> norms;
    std::vector<std::size_t> Ks = {16, 64, 256};
    for (std::size_t K : Ks) {
        auto M = remark23_truncated(K);
        CheckOptions o;
        o.horizon = M.default_horizon;
        auto s = check_S(M.matrix, Block::identity(K), o);
        for (const char* id : {"S1", "S2", "S3"})
            out.require(has_status(s, id, Status::pass), "K=" + std::to_string(K) + " " + id + " not Pass");
        auto x = SequenceView::vector(K, [K](index_t n, double* v) {
            std::fill(v, v + K, 0.0);
            if (n < K) v[n] = 1.0;
        });
        auto tr = transform(M.matrix, x, 0, o.horizon);
        const double nrm = norm1(tr.value);
        norms.push_back(nrm);
        out.require(nrm >= static_cast<double>(K) / 2.0, "K=" + std::to_string(K) + " row-0 norm " + fmt(nrm));
    }
    // Linear growth: the ratio of norms tracks the ratio of sizes within a factor 2.
    for (std::size_t i = 1; i < Ks.size(); ++i) {
        const double want = static_cast<double>(Ks[i]) / static_cast<double>(Ks[i - 1]);
        out.require(norms[i] / norms[i - 1] >= want / 2.0, "growth ratio " + fmt(norms[i] / norms[i - 1]));
    }
    out.note << (out.ok ? "" : "; ") << "row-0 norms " << fmt(norms[0]) << ", " << fmt(norms[1]) << ", " << fmt(norms[2]);
}

void sandwich(Outcome& out)
{
    constexpr int samples = 1000;
    constexpr double tol = 1e-12;
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> dim(1, 3), count(1, 6);
    int containment = 0, ratio = 0, ratio_m1 = 0;
    for (int t = 0; t < samples; ++t) {
        const std::size_t d = dim(rng), m = dim(rng), E = count(rng);
        std::vector<Block> blocks;
        for (std::size_t k = 0; k < E; ++k) blocks.push_back(random_block(rng, m, d, false));
        auto exact = group_norm_blocks(blocks, {}, GroupNormMode::exhaustive);
        auto sw = group_norm_blocks(blocks, {}, GroupNormMode::bounds);
        if (exact.upper < sw.lower - tol || exact.lower > sw.upper + tol) ++containment;
        if (sw.upper > static_cast<double>(d) * sw.lower * (1 + tol)) {
            ++ratio;
            if (m == 1) ++ratio_m1;
        }
    }
    out.require(containment == 0, std::to_string(containment) + " containment violations");
    out.require(ratio == 0, std::to_string(ratio) + " samples with upper > d*lower (" + std::to_string(ratio_m1) + " with m = 1)");
}

void positive_operators(Outcome& out)
{
    constexpr int samples = 1000;
    constexpr double tol = 1e-10;
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> dim(1, 3), count(1, 6);
    int bad = 0, wrong_method = 0;
    double worst = 0.0;
    const auto ctx = NormContext::positive();
    for (int t = 0; t < samples; ++t) {
        const std::size_t d = dim(rng), m = dim(rng), E = count(rng);
        std::vector<Block> blocks;
        for (std::size_t k = 0; k < E; ++k) blocks.push_back(random_block(rng, m, d, true));
        auto pu = group_norm_blocks(blocks, ctx, GroupNormMode::automatic);
        auto ex = group_norm_blocks(blocks, ctx, GroupNormMode::exhaustive);
        if (pu.how != GroupNormBound::method::positive_unit && !(d == 1 && m == 1)) ++wrong_method;
        const double diff = std::fabs(pu.upper - ex.upper);
        worst = std::max(worst, diff);
        if (diff > tol) ++bad;
    }
    out.require(bad == 0, std::to_string(bad) + " mismatches");
    out.require(wrong_method == 0, std::to_string(wrong_method) + " not via PositiveUnit");
    out.note << (out.ok ? "" : "; ") << "max |PositiveUnit - exhaustive| " << fmt(worst);
}

// Rows of block q = n / 8 are supported on columns [8q, 8q + 8) with row l1-norm eta.
BlockMatrix block_diagonal_8(std::uint64_t seed, double eta)
{
    auto raw = [seed](index_t n, index_t k) { return 2.0 * detail::unit_hash(seed, n, k) - 1.0; };
    auto A = BlockMatrix::scalar([=](index_t n, index_t k) {
        const index_t q = n / 8;
        if (k < 8 * q || k >= 8 * q + 8) return 0.0;
        double s = 0.0;
        for (index_t j = 8 * q; j < 8 * q + 8; ++j) s += std::fabs(raw(n, j));
        return raw(n, k) * eta / s;
    });
    A.column_finite_bound = [](index_t n) { return 8 * (n / 8) + 7; };
    A.tail_decay = [](index_t n, double) { return 8 * (n / 8) + 8; };
    return A;
}

void sliding_hump_check(Outcome& out)
{
    constexpr int matrices = 50;
    constexpr std::size_t stages = 8;
    constexpr double cap_tol = 1e-6;
    const auto J = IdealSpec::generated_nu2_levels();
    int stage_violations = 0, cap_violations = 0, errors = 0;
    double worst_margin = 1e300;
    for (int s = 0; s < matrices; ++s) {
        auto M = random_matrix(1000 + s, "banded");
        const double eta = 0.5 + 1.5 * detail::unit_hash(1000 + s, ~0ULL, 1);
        SlidingHumpOptions o;
        o.horizon = 8192;
        o.stages = stages;
        try {
            auto w = sliding_hump(M.matrix, J, o);
            for (const auto& st : w.stages) {
                if (st.n > stages) continue;
                const double bound = eta * (1.0 - std::ldexp(1.0, 3 - static_cast<int>(st.n)));
                worst_margin = std::min(worst_margin, st.achieved - bound);
                if (st.achieved < bound) ++stage_violations;
                if (st.achieved > eta + cap_tol) ++cap_violations;
            }
            if (w.achieved > eta + cap_tol) ++cap_violations;
        } catch (const std::exception& e) {
            ++errors;
            out.note << (errors == 1 ? "" : "; ") << "seed " << 1000 + s << ": " << e.what();
        }
    }
    out.require(errors == 0, std::to_string(errors) + " constructions failed");
    out.require(stage_violations == 0, std::to_string(stage_violations) + " stage bounds violated");
    out.require(cap_violations == 0, std::to_string(cap_violations) + " values above eta0");

    // Fin target, 8x8 diagonal blocks: each stage is compared with the exhaustive +-1 optimum on its block.
    constexpr double oracle_tol = 1e-12;
    int oracle_violations = 0;
    for (int s = 0; s < 10; ++s) {
        const double eta = 1.0 + 0.1 * s;
        auto A = block_diagonal_8(500 + s, eta);
        SlidingHumpOptions o;
        o.horizon = 4096;
        o.stages = stages;
        try {
            auto w = sliding_hump(A, IdealSpec::fin(), o);
            for (std::size_t i = 0; i < w.stages.size(); ++i) {
                const auto& st = w.stages[i];
                const index_t lo = i == 0 ? 0 : w.stages[i - 1].m + 1;
                // Exhaustive optimum of |sum a_k x_k| over x in {-1, 1}^cols.
                auto oracle = [&](index_t from, index_t to, double* got) {
                    std::vector<double> a;
                    std::vector<double> x;
                    for (index_t k = std::max(from, 8 * (st.s / 8)); k < 8 * (st.s / 8) + 8 && k <= to; ++k) {
                        a.push_back(A.block(st.s, k).v[0]);
                        x.push_back(w.at(k)[0]);
                    }
                    double best = 0.0, g = 0.0;
                    for (std::size_t mask = 0; mask < (std::size_t{1} << a.size()); ++mask) {
                        double v = 0.0;
                        for (std::size_t j = 0; j < a.size(); ++j) v += (mask >> j & 1 ? -1.0 : 1.0) * a[j];
                        best = std::max(best, std::fabs(v));
                    }
                    for (std::size_t j = 0; j < a.size(); ++j) g += a[j] * x[j];
                    *got = std::fabs(g);
                    return best;
                };
                double block_got = 0.0, row_got = 0.0;
                const double block_best = oracle(lo, st.m, &block_got);
                const double row_best = oracle(0, ~index_t{0}, &row_got);
                const double slack = w.target * std::ldexp(1.0, -static_cast<int>(st.n));
                if (block_got > block_best + oracle_tol || block_got < block_best - slack - oracle_tol) ++oracle_violations;
                if (st.achieved > row_best + oracle_tol || std::fabs(st.achieved - row_got) > oracle_tol) ++oracle_violations;
            }
        } catch (const std::exception& e) {
            ++oracle_violations;
            out.note << (out.note.tellp() > 0 ? "; " : "") << "block seed " << 500 + s << ": " << e.what();
        }
    }
    out.require(oracle_violations == 0, std::to_string(oracle_violations) + " +-1 oracle violations");
    out.note << (out.note.tellp() > 0 ? "; " : "") << "min stage margin " << fmt(worst_margin);
}

void hahn_schur(Outcome& out)
{
    constexpr double tol = 1e-3;
    auto A = alternating();
    SlidingHumpOptions o;
    o.horizon = 4096;
    o.stages = 4;
    auto r = hahn_schur_witness(A.matrix, IdealSpec::fin(), o);
    out.require(std::fabs(r.defect - 0.5) <= tol, "alternating defect " + fmt(r.defect));
    out.require(std::fabs(r.defect - r.eta0 / 2.0) <= tol, "defect vs eta0/2: eta0 = " + fmt(r.eta0));
    out.note << "alternating E = " << r.E.str() << ", defect " << fmt(r.defect);
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
        auto M = random_matrix(300 + s, "decaying");
        auto q = hahn_schur_witness(M.matrix, IdealSpec::fin(), o);
        worst = std::max(worst, q.defect);
    }
    out.require(worst <= tol, "decaying defect " + fmt(worst));
    out.note << "; decaying max defect " << fmt(worst);
}

void pringsheim_bridge(Outcome& out)
{
    constexpr double tol = 1e-3;
    const auto h = build_h();
    bool trip = true, val = true;
    for (index_t t = 0; t <= (index_t{1} << 16); ++t) {
        auto [m, n] = h.inverse(t);
        trip = trip && h.forward(m, n) == t;
    }
    // Levels stay below 64 so every index fits in 64 bits.
    for (index_t m = 0; m <= 300; ++m)
        for (index_t n = 0; n <= 300; ++n) {
            if (std::min(m, n) > 40) continue;
            const index_t t = h.forward(m, n);
            val = val && nu2(t) == std::min(m, n) && h.inverse(t) == std::pair<index_t, index_t>{m, n};
        }
    out.require(trip, "h round trip failed on [0, 2^16]");
    out.require(val, "nu2(forward(m, n)) != min(m, n)");

    auto seqs = convergent_double_sequences();
    out.require(seqs.size() >= 5, "fewer than 5 convergent double sequences");
    double worst = 0.0;
    for (const auto& x : seqs) {
        auto p = p_lim(x, 256, tol);
        auto q = ideal_lim(IdealSpec::nu2(), transport(x, h), index_t{1} << 14, tol);
        out.require(p.state == IdealLimitReport::status::converged, x.name + ": p_lim " + to_string(p.state));
        out.require(q.state == IdealLimitReport::status::converged, x.name + ": nu2 limit " + to_string(q.state));
        const double dev = std::max(max_abs_diff(p.estimate, q.estimate), max_abs_diff(q.estimate, *x.declared_limit));
        worst = std::max(worst, dev);
        out.require(dev <= tol, x.name + ": limits differ by " + fmt(dev));
    }
    auto r = rh_check(double_cesaro(), 1.0, index_t{1} << 14, 1e-6);
    out.require(r.overall == Overall::regular, std::string("double Cesaro ") + to_string(r.overall));
    out.note << (out.ok ? "" : "; ") << "max limit gap " << fmt(worst);
}

void tall_partition_check(Outcome& out)
{
    constexpr index_t N = 10000;
    const double bound = 1.5 * std::sqrt(2.0 * static_cast<double>(N));
    std::size_t rows_needed = 0;
    while (pairing(rows_needed, 0) <= N) ++rows_needed;
    auto rows = tall_partition(IdealSpec::density(), rows_needed + 1);
    std::vector<int> hits(N + 1, 0);
    double worst = 0.0;
    for (const auto& R : rows) {
        for (index_t n : R.elements_upto(N)) ++hits[n];
        const double cnt = static_cast<double>(R.count_prefix(N));
        worst = std::max(worst, cnt);
        out.require(cnt <= bound, R.str() + " has " + fmt(cnt) + " elements");
    }
    int uncovered = 0, repeated = 0;
    for (index_t n = 0; n <= N; ++n) {
        if (hits[n] == 0) ++uncovered;
        if (hits[n] > 1) ++repeated;
    }
    out.require(uncovered == 0, std::to_string(uncovered) + " uncovered");
    out.require(repeated == 0, std::to_string(repeated) + " covered twice");
    out.note << (out.ok ? "" : "; ") << rows.size() << " rows, max prefix density " << fmt(worst / N) << " <= "
             << fmt(bound / N);
}

void divergence(Outcome& out)
{
    constexpr std::size_t n_max = 50;
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> dim(1, 3);
    int bad = 0;
    for (int s = 0; s < 20; ++s) {
        const std::size_t m = dim(rng), d = dim(rng);
        std::vector<Block> T;
        while (T.size() <= n_max) {
            auto b = random_block(rng, m, d, false);
            if (!b.is_zero()) T.push_back(std::move(b));
        }
        auto w = divergence_witness(T);
        for (std::size_t n = 0; n <= n_max; ++n)
            if (!(w.partial_norms[n] >= static_cast<double>(n))) ++bad;
    }
    out.require(bad == 0, std::to_string(bad) + " partial sums below n");
}

} // namespace

int main()
{
    const std::vector<Criterion> all = {
        {1, "Silverman-Toeplitz round trip (Cesaro)", 10, silverman_toeplitz},
        {2, "Pointwise vs norm column separation (remark22_truncated(64))", 1, remark22_separation},
        {3, "Bounded-to-bounded non-membership (remark23_truncated)", 5, remark23_nonmembership},
        {4, "Group-norm sandwich", 30, sandwich},
        {5, "Positive-operator group norm", 30, positive_operators},
        {6, "Sliding hump", 60, sliding_hump_check},
        {7, "Hahn-Schur contrapositive", 30, hahn_schur},
        {8, "Pringsheim bridge", 60, pringsheim_bridge},
        {9, "Tall partition", 5, tall_partition_check},
        {10, "Divergence witness", 5, divergence},
    };
    int failed = 0;
    for (const auto& c : all) {
        Outcome out;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(out);
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.require(secs < c.budget_s, "runtime " + fmt(secs) + " s over budget " + fmt(c.budget_s) + " s");
        if (!out.ok) ++failed;
        std::printf("%s  criterion %2d  %-62s %7.2fs  %s\n", out.ok ? "PASS" : "FAIL", c.id, c.name, secs,
                    out.note.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
