#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "conditions.hpp"
#include "error.hpp"
#include "ideal_core.hpp"
#include "numeric.hpp"
#include "operator_matrix.hpp"
#include "pringsheim.hpp"

namespace summa {

struct NamedMatrix {
    std::string name;
    BlockMatrix matrix;
    std::string note;
    std::optional<index_t> K;           // truncation size of an infinite-dimensional example
    std::vector<Probe> probes;          // vectors for pointwise column checks, if the default is unsuitable
    std::optional<Block> row_sum_limit; // known limit of the row sums
    index_t default_horizon = 0;        // 0: caller's choice
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic uniform value in [0, 1) attached to (seed, a, b).
inline double unit_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept
{
    std::uint64_t h = mix64(seed ^ mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

struct call {
    std::string name;
    std::vector<std::string> args;
};

inline std::string trim(const std::string& s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// name or name(arg, arg, ...), with arguments split at top-level commas.
inline call parse_call(const std::string& text)
{
    call c;
    const std::string t = trim(text);
    const auto open = t.find('(');
    if (open == std::string::npos) {
        c.name = t;
        return c;
    }
    if (t.back() != ')') throw error(errc::parse_error, "unbalanced parentheses in '" + t + "'");
    c.name = trim(t.substr(0, open));
    const std::string body = t.substr(open + 1, t.size() - open - 2);
    int depth = 0;
    std::string cur;
    for (char ch : body) {
        if (ch == '(' || ch == '[') ++depth;
        if (ch == ')' || ch == ']') --depth;
        if (depth < 0) throw error(errc::parse_error, "unbalanced brackets in '" + t + "'");
        if (ch == ',' && depth == 0) {
            c.args.push_back(trim(cur));
            cur.clear();
            continue;
        }
        cur += ch;
    }
    if (depth != 0) throw error(errc::parse_error, "unbalanced brackets in '" + t + "'");
    if (!trim(cur).empty() || !c.args.empty()) c.args.push_back(trim(cur));
    return c;
}

inline double parse_number(const std::string& s)
{
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw error(errc::parse_error, "expected a number, got '" + s + "'");
    }
}

inline index_t parse_count(const std::string& s)
{
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw error(errc::parse_error, "expected a nonnegative integer, got '" + s + "'");
    return std::stoull(s);
}

} // namespace detail

// JSON literal [[a, b], [c, d]] (rows of the codomain) or a bare number for a 1 x 1 block.
inline Block parse_block(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw error(errc::parse_error, "matrix literal '" + text + "': " + e.what());
    }
    if (j.is_number()) return Block(1, 1, j.get<double>());
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
        throw error(errc::parse_error, "matrix literal must be a nonempty list of rows: '" + text + "'");
    const std::size_t m = j.size(), d = j[0].size();
    Block b(m, d);
    for (std::size_t i = 0; i < m; ++i) {
        if (!j[i].is_array() || j[i].size() != d) throw error(errc::parse_error, "ragged matrix literal '" + text + "'");
        for (std::size_t c = 0; c < d; ++c) {
            if (!j[i][c].is_number()) throw error(errc::parse_error, "non-numeric entry in '" + text + "'");
            b(i, c) = j[i][c].get<double>();
        }
    }
    return b;
}

// ------------------------------------------------------------------------------------------------
// Scalar matrices.

inline NamedMatrix cesaro()
{
    NamedMatrix r;
    r.name = "cesaro";
    r.note = "Cesaro means, the canonical regular matrix";
    r.matrix = BlockMatrix::scalar([](index_t n, index_t k) { return k <= n ? 1.0 / static_cast<double>(n + 1) : 0.0; });
    r.matrix.name = r.name;
    r.matrix.column_finite_bound = [](index_t n) { return n; };
    r.matrix.tail_decay = [](index_t n, double) { return n + 1; };
    r.matrix.nonnegative = true;
    r.matrix.exact = [](index_t n, index_t k) { return k <= n ? q64(1, static_cast<std::int64_t>(n + 1)) : q64(0); };
    r.matrix.prefix_abs_sum = [](index_t n, index_t m) { return static_cast<double>(std::min(m, n) + 1) / static_cast<double>(n + 1); };
    r.row_sum_limit = Block(1, 1, 1.0);
    return r;
}

// a_{n,k} = C(n,k) q^{n-k} / (1+q)^n.
inline NamedMatrix euler(double q)
{
    if (!(q >= 0)) throw std::invalid_argument("euler: q must be nonnegative");
    NamedMatrix r;
    r.name = "euler(" + std::to_string(q) + ")";
    r.note = "Euler means E_q";
    r.matrix = BlockMatrix::scalar([q](index_t n, index_t k) {
        if (k > n) return 0.0;
        if (q == 0) return k == n ? 1.0 : 0.0;
        const double N = static_cast<double>(n), K = static_cast<double>(k);
        return std::exp(std::lgamma(N + 1) - std::lgamma(K + 1) - std::lgamma(N - K + 1) + (N - K) * std::log(q) -
                        N * std::log1p(q));
    });
    r.matrix.name = r.name;
    r.matrix.column_finite_bound = [](index_t n) { return n; };
    r.matrix.tail_decay = [](index_t n, double) { return n + 1; };
    r.matrix.nonnegative = true;
    r.row_sum_limit = Block(1, 1, 1.0);
    return r;
}

// Weighted means a_{n,k} = p_k / P_n with p_k = (k+1)^alpha.
inline NamedMatrix riesz(double alpha)
{
    if (!(alpha > -1)) throw std::invalid_argument("riesz: alpha must exceed -1");
    struct prefix {
        std::mutex mu;
        std::vector<double> P;
    };
    auto st = std::make_shared<prefix>();
    auto total = [st, alpha](index_t n) {
        std::lock_guard<std::mutex> lock(st->mu);
        kahan s;
        if (!st->P.empty()) s += st->P.back();
        while (st->P.size() <= n) {
            s += std::pow(static_cast<double>(st->P.size() + 1), alpha);
            st->P.push_back(s.value());
        }
        return st->P[n];
    };
    NamedMatrix r;
    r.name = "riesz(" + std::to_string(alpha) + ")";
    r.note = "Riesz weighted means with weights (k+1)^alpha";
    r.matrix = BlockMatrix::scalar([total, alpha](index_t n, index_t k) {
        return k <= n ? std::pow(static_cast<double>(k + 1), alpha) / total(n) : 0.0;
    });
    r.matrix.name = r.name;
    r.matrix.column_finite_bound = [](index_t n) { return n; };
    r.matrix.tail_decay = [](index_t n, double) { return n + 1; };
    r.matrix.nonnegative = true;
    r.row_sum_limit = Block(1, 1, 1.0);
    return r;
}

inline NamedMatrix alternating()
{
    NamedMatrix r;
    r.name = "alternating";
    r.note = "a_{n,k} = (-1)^k/(n+1) for k <= n";
    r.matrix = BlockMatrix::scalar([](index_t n, index_t k) {
        if (k > n) return 0.0;
        return (k % 2 ? -1.0 : 1.0) / static_cast<double>(n + 1);
    });
    r.matrix.name = r.name;
    r.matrix.prefix_abs_sum = [](index_t n, index_t m) { return static_cast<double>(std::min(m, n) + 1) / static_cast<double>(n + 1); };
    r.matrix.column_finite_bound = [](index_t n) { return n; };
    r.matrix.tail_decay = [](index_t n, double) { return n + 1; };
    r.row_sum_limit = Block(1, 1, 0.0);
    return r;
}

inline NamedMatrix ones()
{
    NamedMatrix r;
    r.name = "ones";
    r.note = "a_{n,k} = 1 for k <= n, row norms n+1";
    r.matrix = BlockMatrix::scalar([](index_t n, index_t k) { return k <= n ? 1.0 : 0.0; });
    r.matrix.name = r.name;
    r.matrix.prefix_abs_sum = [](index_t n, index_t m) { return static_cast<double>(std::min(m, n) + 1); };
    r.matrix.column_finite_bound = [](index_t n) { return n; };
    r.matrix.tail_decay = [](index_t n, double) { return n + 1; };
    r.matrix.nonnegative = true;
    return r;
}

inline NamedMatrix logdiag()
{
    NamedMatrix r;
    r.name = "logdiag";
    r.note = "a_{n,n} = log(n+2), row norms growing slowly";
    r.matrix = BlockMatrix::scalar([](index_t n, index_t k) { return k == n ? std::log(static_cast<double>(n) + 2.0) : 0.0; });
    r.matrix.name = r.name;
    r.matrix.row_support = [](index_t n) { return std::vector<index_t>{n}; };
    r.matrix.column_finite_bound = [](index_t n) { return n; };
    r.matrix.tail_decay = [](index_t n, double) { return n + 1; };
    r.matrix.nonnegative = true;
    return r;
}

inline NamedMatrix zero_matrix(std::size_t d = 1)
{
    NamedMatrix r;
    r.name = "zero";
    r.note = "zero matrix";
    r.matrix = BlockMatrix(d, d, [d](index_t, index_t, double* out) { std::fill(out, out + d * d, 0.0); });
    r.matrix.name = r.name;
    r.matrix.row_support = [](index_t) { return std::vector<index_t>{}; };
    r.matrix.column_finite_bound = [](index_t) { return index_t{0}; };
    r.matrix.tail_decay = [](index_t, double) { return index_t{0}; };
    r.matrix.nonnegative = true;
    r.row_sum_limit = Block(d, d, 0.0);
    return r;
}

// ------------------------------------------------------------------------------------------------
// Block matrices.

// A_{n,k} = T if n = k, else 0.
inline NamedMatrix diagonal(const Block& T)
{
    NamedMatrix r;
    r.name = "diagonal";
    r.note = "A_{n,k} = T on the diagonal";
    const std::size_t m = T.rows, d = T.cols;
    r.matrix = BlockMatrix(d, m, [T, m, d](index_t n, index_t k, double* out) {
        if (n == k)
            std::copy(T.v.begin(), T.v.end(), out);
        else
            std::fill(out, out + m * d, 0.0);
    });
    r.matrix.name = r.name;
    r.matrix.row_support = [](index_t n) { return std::vector<index_t>{n}; };
    r.matrix.column_finite_bound = [](index_t n) { return n; };
    r.matrix.tail_decay = [](index_t n, double) { return n + 1; };
    r.matrix.nonnegative = std::all_of(T.v.begin(), T.v.end(), [](double v) { return v >= 0; });
    r.matrix.rank_one = RankOneForm{[](index_t n, index_t k) { return n == k ? 1.0 : 0.0; }, T};
    r.row_sum_limit = T;
    return r;
}

inline NamedMatrix identity(std::size_t d = 1)
{
    auto r = diagonal(Block::identity(d));
    r.name = "identity";
    r.matrix.name = r.name;
    r.note = "identity matrix";
    return r;
}

// A_{n,k} = a_{n,k} A0 for a scalar matrix a.
inline NamedMatrix rank_one(const NamedMatrix& scalar, const Block& A0)
{
    if (!scalar.matrix.is_scalar()) throw std::invalid_argument("rank_one: inner matrix must be scalar");
    NamedMatrix r;
    r.name = "rank_one(" + scalar.name + ")";
    r.note = "A_{n,k} = a_{n,k} A0";
    const BlockMatrix a = scalar.matrix;
    const std::size_t m = A0.rows, d = A0.cols;
    r.matrix = BlockMatrix(d, m, [a, A0, m, d](index_t n, index_t k, double* out) {
        double s = 0.0;
        a.entry(n, k, &s);
        for (std::size_t i = 0; i < m * d; ++i) out[i] = s * A0.v[i];
    });
    r.matrix.name = r.name;
    r.matrix.column_finite_bound = a.column_finite_bound;
    r.matrix.tail_decay = a.tail_decay;
    r.matrix.row_support = a.row_support;
    r.matrix.nonnegative = a.nonnegative && std::all_of(A0.v.begin(), A0.v.end(), [](double v) { return v >= 0; });
    r.matrix.rank_one = RankOneForm{[a](index_t n, index_t k) {
                                        double s = 0.0;
                                        a.entry(n, k, &s);
                                        return s;
                                    },
                                    A0};
    if (scalar.row_sum_limit) {
        Block T = A0;
        for (auto& v : T.v) v *= scalar.row_sum_limit->v[0];
        r.row_sum_limit = T;
    }
    return r;
}

// K x K truncation of l2 operators with A_{n,0} the tail projection and A_{n,k} = 0 for k > 0.
// Internal coordinate j stands for the l2 coordinate j+1, so A_{n,0} keeps coordinates j >= n.
inline NamedMatrix remark22_truncated(std::size_t K)
{
    if (K < 1 || K > (std::size_t{1} << 16)) throw std::invalid_argument("remark22_truncated: K out of range");
    NamedMatrix r;
    r.name = "remark22_truncated(" + std::to_string(K) + ")";
    r.note = "tail projections in column 0: unit norms, pointwise vanishing";
    r.K = K;
    r.default_horizon = K - 1 >= 16 ? K - 1 : 16;
    r.matrix = BlockMatrix::sparse(K, K, [K](index_t n, index_t k, std::vector<BlockMatrix::Entry>& out) {
        if (k != 0) return;
        for (index_t j = n; j < K; ++j) out.push_back({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(j), 1.0});
    });
    r.matrix.name = r.name;
    r.matrix.row_support = [](index_t) { return std::vector<index_t>{0}; };
    r.matrix.column_finite_bound = [](index_t) { return index_t{0}; };
    r.matrix.tail_decay = [](index_t, double) { return index_t{1}; };
    r.matrix.nonnegative = true;
    const std::size_t roots = static_cast<std::size_t>(isqrt(K));
    for (std::size_t j = 0; j < roots; ++j) r.probes.push_back({"e" + std::to_string(j), j, {}});
    Probe g{"geometric", std::nullopt, std::vector<double>(K)};
    for (std::size_t j = 0; j < K; ++j) g.v[j] = std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(j + 1, 1000)));
    r.probes.push_back(std::move(g));
    r.row_sum_limit = Block(K, K, 0.0);
    return r;
}

// A = Id + B on R^K: B_{n,0} projects onto coordinates >= n+1, B_{n,k} = -x_{n+k} e_{n+k} for k > 0.
inline NamedMatrix remark23_truncated(std::size_t K)
{
    if (K < 1 || K > (std::size_t{1} << 16)) throw std::invalid_argument("remark23_truncated: K out of range");
    NamedMatrix r;
    r.name = "remark23_truncated(" + std::to_string(K) + ")";
    r.note = "Id + B: regular at every K, transform of the coordinate family grows like K";
    r.K = K;
    r.default_horizon = 4 * K >= 16 ? 4 * K : 16;
    r.matrix = BlockMatrix::sparse(K, K, [K](index_t n, index_t k, std::vector<BlockMatrix::Entry>& out) {
        using E = BlockMatrix::Entry;
        if (n == k)
            for (std::uint32_t j = 0; j < K; ++j) out.push_back(E{j, j, 1.0});
        if (k == 0)
            for (index_t j = n + 1; j < K; ++j) out.push_back(E{static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(j), 1.0});
        if (k > 0 && n + k < K) {
            const auto j = static_cast<std::uint32_t>(n + k);
            out.push_back(E{j, j, -1.0});
        }
    });
    r.matrix.name = r.name;
    r.matrix.column_finite_bound = [K](index_t n) { return std::max<index_t>(n, K - 1 > n ? K - 1 - n : 0); };
    r.matrix.tail_decay = [K](index_t n, double) { return std::max<index_t>(n, K - 1 > n ? K - 1 - n : 0) + 1; };
    r.row_sum_limit = Block::identity(K);
    return r;
}

// ------------------------------------------------------------------------------------------------
// Random scalar matrices.
//   banded:   row n supported on [n, n + w_n), w_n <= 6, row l1-norm eta (1 - 2^{-nu2(n)-1})
//   decaying: row n supported on [n/2, n], row l1-norm c/(n+1)
//   dense:    row n supported on [0, n], row l1-norm 1, random signs
//   positive: row n supported on [0, n], nonnegative, row sums 1

inline NamedMatrix random_matrix(std::uint64_t seed, const std::string& profile = "banded")
{
    using detail::unit_hash;
    NamedMatrix r;
    r.name = "random(" + std::to_string(seed) + "," + profile + ")";
    const double eta = 0.5 + 1.5 * unit_hash(seed, ~0ULL, 1);
    const double c = 0.5 + 0.5 * unit_hash(seed, ~0ULL, 2);
    auto raw = [seed](index_t n, index_t k) { return 0.1 + 0.9 * unit_hash(seed, n, k); };
    auto sign = [seed](index_t n, index_t k) { return unit_hash(seed ^ 0x5bd1e995ULL, n, k) < 0.5 ? -1.0 : 1.0; };

    if (profile == "banded") {
        auto width = [seed](index_t n) { return 1 + static_cast<index_t>(6 * unit_hash(seed, n, ~0ULL)); };
        auto target = [eta](index_t n) { return eta * (1.0 - std::ldexp(1.0, -static_cast<int>(nu2(n)) - 1)); };
        r.matrix = BlockMatrix::scalar([=](index_t n, index_t k) {
            const index_t w = width(n);
            if (k < n || k >= n + w) return 0.0;
            double s = 0.0;
            for (index_t j = n; j < n + w; ++j) s += raw(n, j);
            return sign(n, k) * raw(n, k) * target(n) / s;
        });
        r.matrix.column_finite_bound = [width](index_t n) { return n + width(n) - 1; };
        r.matrix.tail_decay = [width](index_t n, double) { return n + width(n); };
        r.note = "banded random rows, nu2-level profile, eta0 = " + std::to_string(eta);
        r.row_sum_limit.reset();
    } else if (profile == "decaying" || profile == "dense" || profile == "positive") {
        struct norm_cache {
            std::mutex mu;
            std::unordered_map<index_t, double> sums;
        };
        auto cache = std::make_shared<norm_cache>();
        const bool decaying = profile == "decaying";
        auto lo = [decaying](index_t n) { return decaying ? n / 2 : index_t{0}; };
        auto row_total = [cache, raw, lo](index_t n) {
            {
                std::lock_guard<std::mutex> lock(cache->mu);
                auto it = cache->sums.find(n);
                if (it != cache->sums.end()) return it->second;
            }
            kahan s;
            for (index_t j = lo(n); j <= n; ++j) s += raw(n, j);
            std::lock_guard<std::mutex> lock(cache->mu);
            return cache->sums[n] = s.value();
        };
        const bool positive = profile == "positive";
        auto scale = [decaying, c](index_t n) { return decaying ? c / static_cast<double>(n + 1) : 1.0; };
        r.matrix = BlockMatrix::scalar([=](index_t n, index_t k) {
            if (k > n || k < lo(n)) return 0.0;
            return (positive ? 1.0 : sign(n, k)) * raw(n, k) * scale(n) / row_total(n);
        });
        r.matrix.column_finite_bound = [](index_t n) { return n; };
        r.matrix.tail_decay = [](index_t n, double) { return n + 1; };
        r.matrix.nonnegative = positive;
        if (positive) r.row_sum_limit = Block(1, 1, 1.0);
        if (decaying) r.row_sum_limit = Block(1, 1, 0.0);
        r.note = profile + " random rows";
    } else {
        throw error(errc::unknown_name, "unknown random profile '" + profile + "'");
    }
    r.matrix.name = r.name;
    return r;
}

// ------------------------------------------------------------------------------------------------

// Builders addressable by text: cesaro, euler(q), riesz(alpha), diagonal([[..]]), identity(d), zero(d),
// remark22_truncated(K), remark23_truncated(K), rank_one(inner, [[..]]), random(seed, profile),
// alternating, ones, logdiag.
inline NamedMatrix builtin_matrix(const std::string& text)
{
    const auto c = detail::parse_call(text);
    auto argc = [&](std::size_t lo, std::size_t hi) {
        if (c.args.size() < lo || c.args.size() > hi)
            throw error(errc::parse_error, "wrong number of arguments for " + c.name + " in '" + text + "'");
    };
    if (c.name == "cesaro") return argc(0, 0), cesaro();
    if (c.name == "alternating") return argc(0, 0), alternating();
    if (c.name == "ones") return argc(0, 0), ones();
    if (c.name == "logdiag") return argc(0, 0), logdiag();
    if (c.name == "euler") return argc(1, 1), euler(detail::parse_number(c.args[0]));
    if (c.name == "riesz") return argc(1, 1), riesz(detail::parse_number(c.args[0]));
    if (c.name == "identity") return argc(0, 1), identity(c.args.empty() ? 1 : detail::parse_count(c.args[0]));
    if (c.name == "zero") return argc(0, 1), zero_matrix(c.args.empty() ? 1 : detail::parse_count(c.args[0]));
    if (c.name == "diagonal") {
        argc(1, 1);
        auto r = diagonal(parse_block(c.args[0]));
        r.name = text;
        r.matrix.name = text;
        return r;
    }
    if (c.name == "remark22_truncated") return argc(1, 1), remark22_truncated(detail::parse_count(c.args[0]));
    if (c.name == "remark23_truncated") return argc(1, 1), remark23_truncated(detail::parse_count(c.args[0]));
    if (c.name == "rank_one") {
        argc(2, 2);
        return rank_one(builtin_matrix(c.args[0]), parse_block(c.args[1]));
    }
    if (c.name == "random") {
        argc(1, 2);
        return random_matrix(detail::parse_count(c.args[0]), c.args.size() > 1 ? c.args[1] : "banded");
    }
    throw error(errc::unknown_name, "unknown matrix '" + c.name + "'");
}

// ------------------------------------------------------------------------------------------------
// Sequence families with declared limits and memberships.

using NamedFamily = SequenceFamily;

namespace detail {

inline void require_member(const IdealSpec& I, const SetDescriptor& S, const std::string& what)
{
    auto m = ideal_member(I, S, index_t{1} << 14);
    if (!m.in())
        throw error(errc::invalid_family, what + ": set " + S.str() + " is not in " + I.str() + " (" + to_string(m.state) + ")");
}

} // namespace detail

// Convergent to eta (or a random limit in [-5, 5]^dim per member) with the given rate:
// geometric, power, alternating, harmonic, or mixed (cycling through the four).
inline NamedFamily convergent_family(std::optional<double> eta, const std::string& rate = "mixed", std::size_t dim = 1,
                                     std::uint64_t seed = 0)
{
    static const std::vector<std::string> rates = {"geometric", "power", "alternating", "harmonic"};
    if (rate != "mixed" && std::find(rates.begin(), rates.end(), rate) == rates.end())
        throw error(errc::unknown_name, "unknown convergence rate '" + rate + "'");
    NamedFamily f;
    f.name = "convergent(" + (eta ? std::to_string(*eta) : std::string("random")) + "," + rate + ")";
    f.dim = dim;
    f.ideal = "fin";
    f.member = [eta, rate, dim, seed](std::size_t i) {
        using detail::unit_hash;
        const std::string shape = rate == "mixed" ? rates[i % rates.size()] : rate;
        std::vector<double> lim(dim), amp(dim);
        for (std::size_t c = 0; c < dim; ++c) {
            lim[c] = eta ? *eta : -5.0 + 10.0 * unit_hash(seed, i, 3 * c);
            amp[c] = (0.5 + 0.5 * unit_hash(seed, i, 3 * c + 1)) * (unit_hash(seed, i, 3 * c + 2) < 0.5 ? -1.0 : 1.0);
        }
        const double ratio = 0.3 + 0.5 * unit_hash(seed, i, 1000);
        const double power = 1.5 + 1.5 * unit_hash(seed, i, 1001);
        auto g = [shape, ratio, power](index_t n) {
            const double x = static_cast<double>(n);
            if (shape == "geometric") return std::pow(ratio, x);
            if (shape == "power") return std::pow(x + 1, -power);
            if (shape == "alternating") return (n % 2 ? -1.0 : 1.0) / (x + 1);
            return 0.5 / (x + 1);
        };
        SequenceView s = SequenceView::vector(dim, [lim, amp, g, dim](index_t n, double* out) {
            const double gn = g(n);
            for (std::size_t c = 0; c < dim; ++c) out[c] = lim[c] + amp[c] * gn;
        });
        s.declared_ideal = "fin";
        s.declared_limit = lim;
        s.declared_bounded = true;
        double sup = 0.0;
        for (std::size_t c = 0; c < dim; ++c) sup = std::max(sup, std::fabs(lim[c]) + std::fabs(amp[c]));
        s.declared_sup = sup;
        return s;
    };
    return f;
}

// base off the spike set, spike on it; density-convergent to base.
inline NamedFamily spiky_density_family(double base, double spike, const SetDescriptor& set)
{
    detail::require_member(IdealSpec::density(), set, "spiky_density");
    NamedFamily f;
    f.name = "spiky_density(" + std::to_string(base) + "," + std::to_string(spike) + "," + set.str() + ")";
    f.ideal = "density";
    f.size = 1;
    f.member = [base, spike, set](std::size_t) {
        SequenceView s = SequenceView::scalar([base, spike, set](index_t n) { return set.contains(n) ? spike : base; });
        s.declared_ideal = "density";
        s.declared_limit = std::vector<double>{base};
        s.declared_bounded = true;
        s.declared_sup = std::max(std::fabs(base), std::fabs(spike));
        return s;
    };
    return f;
}

// Values on the support: "pm1" (member-dependent signs) or "ones"; zero elsewhere.
inline NamedFamily c00_supported_family(const SetDescriptor& support, const std::string& values = "pm1",
                                        const IdealSpec& I = IdealSpec::density())
{
    if (values != "pm1" && values != "ones") throw error(errc::unknown_name, "unknown value pattern '" + values + "'");
    detail::require_member(I, support, "c00_supported");
    NamedFamily f;
    f.name = "c00_supported(" + support.str() + "," + values + ")";
    f.ideal = I.str();
    const bool pm = values == "pm1";
    const std::string lit = I.str();
    f.member = [support, pm, lit](std::size_t i) {
        SequenceView s = SequenceView::scalar([support, pm, i](index_t n) {
            if (!support.contains(n)) return 0.0;
            return pm && detail::unit_hash(17, i, n) < 0.5 ? -1.0 : 1.0;
        });
        s.declared_ideal = lit;
        s.declared_limit = std::vector<double>{0.0};
        s.declared_support = support;
        s.declared_bounded = true;
        s.declared_sup = 1.0;
        return s;
    };
    return f;
}

// Bounded sequences without an ordinary limit: (-1)^n, indicator of the evens, cos(n).
inline NamedFamily bounded_divergent_family()
{
    NamedFamily f;
    f.name = "bounded_divergent";
    f.ideal = "fin";
    f.size = 3;
    f.member = [](std::size_t i) {
        SequenceView s = SequenceView::scalar([i](index_t n) {
            if (i % 3 == 0) return n % 2 ? -1.0 : 1.0;
            if (i % 3 == 1) return n % 2 ? 0.0 : 1.0;
            return std::cos(static_cast<double>(n));
        });
        s.declared_ideal = "fin";
        s.declared_bounded = true;
        s.declared_sup = 1.0;
        return s;
    };
    return f;
}

// eta off the blow-up set, n+1 on it: I-convergent to eta but unbounded.
inline NamedFamily unbounded_iconvergent_family(double eta, const SetDescriptor& blowup,
                                                const IdealSpec& I = IdealSpec::density())
{
    detail::require_member(I, blowup, "unbounded_Iconvergent");
    if (detail::is_finite(blowup) == detail::tri::yes)
        throw error(errc::invalid_family, "unbounded_Iconvergent: blow-up set " + blowup.str() + " is finite");
    NamedFamily f;
    f.name = "unbounded_Iconvergent(" + std::to_string(eta) + "," + blowup.str() + ")";
    f.ideal = I.str();
    f.size = 1;
    const std::string lit = I.str();
    f.member = [eta, blowup, lit](std::size_t) {
        SequenceView s =
            SequenceView::scalar([eta, blowup](index_t n) { return blowup.contains(n) ? static_cast<double>(n + 1) : eta; });
        s.declared_ideal = lit;
        s.declared_limit = std::vector<double>{eta};
        s.declared_bounded = false;
        return s;
    };
    return f;
}

// convergent(eta|random, rate[, dim]), spiky_density(base, spike, set), c00_supported(set, values[, ideal]),
// bounded_divergent, unbounded_Iconvergent(eta, set[, ideal]).
inline NamedFamily builtin_family(const std::string& text, std::uint64_t seed = 0)
{
    const auto c = detail::parse_call(text);
    auto argc = [&](std::size_t lo, std::size_t hi) {
        if (c.args.size() < lo || c.args.size() > hi)
            throw error(errc::parse_error, "wrong number of arguments for " + c.name + " in '" + text + "'");
    };
    if (c.name == "convergent") {
        argc(0, 3);
        std::optional<double> eta;
        if (!c.args.empty() && c.args[0] != "random") eta = detail::parse_number(c.args[0]);
        return convergent_family(eta, c.args.size() > 1 ? c.args[1] : "mixed",
                                 c.args.size() > 2 ? detail::parse_count(c.args[2]) : 1, seed);
    }
    if (c.name == "spiky_density") {
        argc(3, 3);
        return spiky_density_family(detail::parse_number(c.args[0]), detail::parse_number(c.args[1]),
                                    literal::parse_descriptor(c.args[2]));
    }
    if (c.name == "c00_supported") {
        argc(1, 3);
        return c00_supported_family(literal::parse_descriptor(c.args[0]), c.args.size() > 1 ? c.args[1] : "pm1",
                                    c.args.size() > 2 ? literal::parse_ideal(c.args[2]) : IdealSpec::density());
    }
    if (c.name == "bounded_divergent") return argc(0, 0), bounded_divergent_family();
    if (c.name == "unbounded_Iconvergent") {
        argc(2, 3);
        return unbounded_iconvergent_family(detail::parse_number(c.args[0]), literal::parse_descriptor(c.args[1]),
                                            c.args.size() > 2 ? literal::parse_ideal(c.args[2]) : IdealSpec::density());
    }
    throw error(errc::unknown_name, "unknown family '" + c.name + "'");
}

// ------------------------------------------------------------------------------------------------
// Double sequences and four-index kernels.

namespace detail {

inline std::vector<std::pair<index_t, index_t>> lower_rectangle(index_t m, index_t n)
{
    std::vector<std::pair<index_t, index_t>> v;
    v.reserve((m + 1) * (n + 1));
    for (index_t p = 0; p <= m; ++p)
        for (index_t q = 0; q <= n; ++q) v.push_back({p, q});
    return v;
}

} // namespace detail

inline DoubleMatrix double_cesaro()
{
    DoubleMatrix K;
    K.name = "double_cesaro";
    K.a = [](index_t m, index_t n, index_t p, index_t q) {
        return p <= m && q <= n ? 1.0 / (static_cast<double>(m + 1) * static_cast<double>(n + 1)) : 0.0;
    };
    K.support = detail::lower_rectangle;
    return K;
}

inline DoubleMatrix double_identity()
{
    DoubleMatrix K;
    K.name = "double_identity";
    K.a = [](index_t m, index_t n, index_t p, index_t q) { return p == m && q == n ? 1.0 : 0.0; };
    K.support = [](index_t m, index_t n) { return std::vector<std::pair<index_t, index_t>>{{m, n}}; };
    return K;
}

inline DoubleMatrix double_ones()
{
    DoubleMatrix K;
    K.name = "double_ones";
    K.a = [](index_t m, index_t n, index_t p, index_t q) { return p <= m && q <= n ? 1.0 : 0.0; };
    K.support = detail::lower_rectangle;
    return K;
}

inline DoubleMatrix builtin_double_matrix(const std::string& name)
{
    if (name == "double_cesaro") return double_cesaro();
    if (name == "double_identity") return double_identity();
    if (name == "double_ones") return double_ones();
    throw error(errc::unknown_name, "unknown double matrix '" + name + "'");
}

// Double sequences with declared Pringsheim limits. Corner deviations decay at least like 4^{-min(m,n)}.
inline std::vector<DoubleSequence> convergent_double_sequences()
{
    auto make = [](std::string name, double eta, std::function<double(index_t, index_t)> f) {
        auto x = DoubleSequence::scalar(std::move(f));
        x.name = std::move(name);
        x.declared_limit = std::vector<double>{eta};
        return x;
    };
    auto mn = [](index_t m, index_t n) { return static_cast<double>(std::min(m, n)); };
    std::vector<DoubleSequence> out;
    out.push_back(make("corner_decay", 0.0, [mn](index_t m, index_t n) { return std::pow(4.0, -mn(m, n)); }));
    out.push_back(make("constant", 3.0, [](index_t, index_t) { return 3.0; }));
    out.push_back(make("signed_corner", -1.0, [mn](index_t m, index_t n) {
        return -1.0 + ((m + n) % 2 ? -1.0 : 1.0) * std::pow(8.0, -mn(m, n));
    }));
    out.push_back(make("sum_decay", 0.5, [](index_t m, index_t n) { return 0.5 + std::pow(2.0, -static_cast<double>(m + n)); }));
    out.push_back(make("oscillating_decay", 2.0, [mn](index_t m, index_t n) {
        return 2.0 + std::cos(static_cast<double>(m)) * std::cos(static_cast<double>(n)) * std::pow(mn(m, n) + 1, -4.0);
    }));
    DoubleSequence v;
    v.name = "vector_corner";
    v.dim = 2;
    v.declared_limit = std::vector<double>{1.0, -2.0};
    v.eval = [](index_t m, index_t n, double* out) {
        out[0] = 1.0 + std::pow(4.0, -static_cast<double>(m + n));
        out[1] = -2.0 + std::pow(4.0, -static_cast<double>(std::min(m, n)));
    };
    out.push_back(std::move(v));
    return out;
}

// Double sequences without a Pringsheim limit.
inline std::vector<DoubleSequence> divergent_double_sequences()
{
    auto chess = DoubleSequence::scalar([](index_t m, index_t n) { return (m + n) % 2 ? -1.0 : 1.0; });
    chess.name = "checkerboard";
    auto diag = DoubleSequence::scalar([](index_t m, index_t n) { return m == n ? 1.0 : 0.0; });
    diag.name = "diagonal_indicator";
    return {chess, diag};
}

} // namespace summa
