#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "conditions.hpp"
#include "ideal_core.hpp"
#include "numeric.hpp"
#include "operator_matrix.hpp"

namespace summa {

struct DoubleSequence {
    std::string name = "double";
    std::size_t dim = 1;
    std::function<void(index_t m, index_t n, double*)> eval;
    std::optional<std::vector<double>> declared_limit;

    static DoubleSequence scalar(std::function<double(index_t, index_t)> f)
    {
        DoubleSequence x;
        x.eval = [f = std::move(f)](index_t m, index_t n, double* out) { out[0] = f(m, n); };
        return x;
    }

    std::vector<double> value(index_t m, index_t n) const
    {
        std::vector<double> v(dim, 0.0);
        eval(m, n, v.data());
        return v;
    }
    double at(index_t m, index_t n) const { return value(m, n)[0]; }
};

// Shell k = {(m,n) : min(m,n) = k} is enumerated (k,k), (k,k+1), (k+1,k), (k,k+2), (k+2,k), ... and paired
// with Q_k = {t : nu2(t) = k} in increasing order, where Q_0 = {0, 1, 3, 5, ...}.
class PairingBijection {
public:
    index_t forward(index_t m, index_t n) const
    {
        const index_t k = std::min(m, n);
        index_t i = 0;
        if (n > m) i = 2 * (n - k) - 1;
        if (m > n) i = 2 * (m - k);
        return level_element(k, i);
    }

    std::pair<index_t, index_t> inverse(index_t t) const
    {
        const index_t k = nu2(t);
        index_t i = 0;
        if (k == 0)
            i = t == 0 ? 0 : (t + 1) / 2;
        else
            i = ((t >> k) - 1) / 2;
        if (i == 0) return {k, k};
        if (i % 2 == 1) return {k, k + (i + 1) / 2};
        return {k + i / 2, k};
    }

    // i-th element of Q_k.
    static index_t level_element(index_t k, index_t i)
    {
        using W = unsigned __int128;
        if (k == 0) {
            if (i == 0) return 0;
            W t = W{2} * i - 1;
            if (t > W{~index_t{0}}) throw std::overflow_error("pairing index exceeds 64 bits");
            return static_cast<index_t>(t);
        }
        if (k >= 64) throw std::overflow_error("pairing index exceeds 64 bits");
        W t = (W{2} * i + 1) << k;
        if (t > W{~index_t{0}}) throw std::overflow_error("pairing index exceeds 64 bits");
        return static_cast<index_t>(t);
    }
};

inline PairingBijection build_h() { return {}; }

inline SequenceView transport(const DoubleSequence& x, const PairingBijection& h = {})
{
    SequenceView y = SequenceView::vector(x.dim, [x, h](index_t t, double* out) {
        auto [m, n] = h.inverse(t);
        x.eval(m, n, out);
    });
    y.declared_ideal = "nu2";
    y.declared_limit = x.declared_limit;
    return y;
}

inline DoubleSequence transport_inv(const SequenceView& y, const PairingBijection& h = {})
{
    DoubleSequence x;
    x.name = "transport_inv";
    x.dim = y.dim;
    x.eval = [y, h](index_t m, index_t n, double* out) { y.eval(h.forward(m, n), out); };
    if (y.declared_ideal && *y.declared_ideal == "nu2") x.declared_limit = y.declared_limit;
    return x;
}

// Pringsheim limit: candidate from the corner [H/2, H]^2, accepted when the whole corner is within tol.
inline IdealLimitReport p_lim(const DoubleSequence& x, index_t horizon, double tol = 1e-6)
{
    if (horizon < 4) throw error(errc::insufficient_horizon, "p_lim needs horizon >= 4");
    if (!(tol > 0)) throw std::invalid_argument("p_lim: tol must be positive");
    const std::size_t d = x.dim;
    const index_t H = horizon, half = H / 2, quarter = H / 4;
    std::vector<kahan> acc(d);
    std::vector<double> buf(d);
    index_t cnt = 0;
    for (index_t m = half; m <= H; ++m)
        for (index_t n = half; n <= H; ++n) {
            x.eval(m, n, buf.data());
            for (std::size_t i = 0; i < d; ++i) acc[i] += buf[i];
            ++cnt;
        }
    std::vector<double> eta(d);
    for (std::size_t i = 0; i < d; ++i) eta[i] = acc[i].value() / static_cast<double>(cnt);

    double sup_half = 0.0, sup_quarter = 0.0;
    std::vector<double> lo(d, std::numeric_limits<double>::infinity()), hi(d, -std::numeric_limits<double>::infinity());
    for (index_t m = quarter; m <= H; ++m)
        for (index_t n = quarter; n <= H; ++n) {
            x.eval(m, n, buf.data());
            double dev = 0.0;
            for (std::size_t i = 0; i < d; ++i) dev = std::max(dev, std::fabs(buf[i] - eta[i]));
            sup_quarter = std::max(sup_quarter, dev);
            if (m >= half && n >= half) {
                sup_half = std::max(sup_half, dev);
                for (std::size_t i = 0; i < d; ++i) {
                    lo[i] = std::min(lo[i], buf[i]);
                    hi[i] = std::max(hi[i], buf[i]);
                }
            }
        }

    IdealLimitReport r;
    r.horizon = H;
    r.tol = tol;
    r.estimate = eta;
    r.lower = lo;
    r.upper = hi;
    r.diag.push_back({"corner_sup_half", sup_half});
    r.diag.push_back({"corner_sup_quarter", sup_quarter});
    if (sup_half < tol)
        r.state = IdealLimitReport::status::converged;
    else if (sup_half > 10 * tol && sup_half >= 0.75 * sup_quarter)
        r.state = IdealLimitReport::status::no_limit_detected;
    else
        r.state = IdealLimitReport::status::inconclusive;
    return r;
}

// Four-index scalar kernel a((m,n),(p,q)) with finite support per row (m,n).
struct DoubleMatrix {
    std::string name = "double";
    std::function<double(index_t m, index_t n, index_t p, index_t q)> a;
    std::function<std::vector<std::pair<index_t, index_t>>(index_t m, index_t n)> support;
};

// Single-index matrix b_{r,c} = a(h^{-1}(r), h^{-1}(c)).
inline BlockMatrix transport_matrix(const DoubleMatrix& K, const PairingBijection& h = {})
{
    BlockMatrix A = BlockMatrix::scalar([K, h](index_t r, index_t c) {
        auto [m, n] = h.inverse(r);
        auto [p, q] = h.inverse(c);
        return K.a(m, n, p, q);
    });
    A.name = K.name + ".transported";
    A.row_support = [K, h](index_t r) {
        auto [m, n] = h.inverse(r);
        std::vector<index_t> cols;
        for (auto [p, q] : K.support(m, n)) cols.push_back(h.forward(p, q));
        return cols;
    };
    return A;
}

inline RegularityReport rh_check(const DoubleMatrix& K, double T, index_t horizon, double tol = 1e-6,
                                 std::vector<NamedSet> r6_sets = {})
{
    const auto h = build_h();
    BlockMatrix A = transport_matrix(K, h);
    CheckOptions o;
    o.horizon = horizon;
    o.tol = tol;
    o.ctx = NormContext::one_norm();
    const auto I = IdealSpec::nu2(), J = IdealSpec::nu2();
    if (r6_sets.empty())
        for (index_t t = 0; t <= 6; ++t) r6_sets.push_back({"nu2level(" + std::to_string(t) + ")", SetDescriptor::nu2_level(t)});

    RegularityReport r;
    r.theorem = to_string(TheoremMode::countably_generated_finite_dimensional);
    r.target_class = "RH-regular (P-convergent bounded double sequences, P-limit times " + std::to_string(T) + ")";
    r.horizon = horizon;
    r.tol = tol;
    r.conditions = check_R(A, Block(1, 1, T), I, J, o, std::move(r6_sets));
    bool any_fail = false, all_pass = true;
    for (auto& c : r.conditions) {
        any_fail = any_fail || c.failed();
        all_pass = all_pass && c.passed();
        if (auto w = c.binding("witness_row"); !w.empty()) {
            auto [m, n] = h.inverse(std::stoull(w));
            c.bind("witness_pair", "(" + std::to_string(m) + "," + std::to_string(n) + ")");
        }
    }
    r.overall = any_fail ? Overall::not_regular : (all_pass ? Overall::regular : Overall::inconclusive);
    r.implications.push_back("R1,R2,R4,R6 on the transported matrix <=> RH-regularity through the pairing h");
    r.explanation = all_pass ? "all R conditions hold on the transported kernel"
                             : (any_fail ? "an R condition fails on the transported kernel" : "some R condition is inconclusive");
    return r;
}

} // namespace summa
