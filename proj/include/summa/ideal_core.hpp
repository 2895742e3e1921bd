#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"

namespace summa {

// 2-adic valuation with nu2(0) = 0.
constexpr unsigned nu2(index_t n) noexcept
{
    if (n == 0) return 0;
    unsigned k = 0;
    while ((n & 1u) == 0) {
        n >>= 1;
        ++k;
    }
    return k;
}

inline index_t isqrt(index_t n) noexcept
{
    using W = unsigned __int128;
    index_t r = static_cast<index_t>(std::sqrt(static_cast<long double>(n)));
    while (static_cast<W>(r) * r > n) --r;
    while (static_cast<W>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

// Cantor pairing p(r, i) = (r+i)(r+i+1)/2 + i.
constexpr unsigned __int128 pairing(index_t r, index_t i) noexcept
{
    unsigned __int128 w = static_cast<unsigned __int128>(r) + i;
    return w * (w + 1) / 2 + i;
}

// Inverse of the Cantor pairing: n -> (r, i).
inline std::pair<index_t, index_t> unpairing(index_t n) noexcept
{
    using W = unsigned __int128;
    long double est = (std::sqrt(8.0L * static_cast<long double>(n) + 1.0L) - 1.0L) / 2.0L;
    index_t w = static_cast<index_t>(est);
    while (w > 0 && static_cast<W>(w) * (w + 1) / 2 > n) --w;
    while (static_cast<W>(w + 1) * (w + 2) / 2 <= n) ++w;
    index_t t = n - static_cast<index_t>(static_cast<W>(w) * (w + 1) / 2);
    return {w - t, t};
}

class SetDescriptor {
public:
    enum class kind { finite, range, ap, squares, pow2, pairrow, nu2level, nu2atmost, set_union, complement };

    SetDescriptor() : k_(kind::finite) {}

    static SetDescriptor finite(std::vector<index_t> elems)
    {
        SetDescriptor s(kind::finite);
        std::sort(elems.begin(), elems.end());
        elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
        s.elems_ = std::move(elems);
        return s;
    }
    static SetDescriptor empty() { return finite({}); }
    static SetDescriptor range(index_t lo, index_t hi) { return binary(kind::range, lo, hi); }
    static SetDescriptor ap(index_t offset, index_t step) { return binary(kind::ap, offset, step); }
    static SetDescriptor squares() { return SetDescriptor(kind::squares); }
    static SetDescriptor powers_of_two() { return SetDescriptor(kind::pow2); }
    static SetDescriptor pairing_row(index_t r) { return binary(kind::pairrow, r, 0); }
    static SetDescriptor nu2_level(index_t t) { return binary(kind::nu2level, t, 0); }
    static SetDescriptor nu2_at_most(index_t t) { return binary(kind::nu2atmost, t, 0); }
    static SetDescriptor unite(std::vector<SetDescriptor> parts)
    {
        SetDescriptor s(kind::set_union);
        s.kids_ = std::move(parts);
        return s;
    }
    static SetDescriptor complement(const SetDescriptor& inner)
    {
        if (inner.k_ == kind::complement) return inner.kids_.front();
        SetDescriptor s(kind::complement);
        s.kids_ = {inner};
        return s;
    }
    static SetDescriptor omega() { return complement(empty()); }

    kind type() const noexcept { return k_; }
    index_t a() const noexcept { return a_; }
    index_t b() const noexcept { return b_; }
    const std::vector<index_t>& elements() const noexcept { return elems_; }
    const std::vector<SetDescriptor>& children() const noexcept { return kids_; }

    bool contains(index_t n) const
    {
        switch (k_) {
        case kind::finite: return std::binary_search(elems_.begin(), elems_.end(), n);
        case kind::range: return a_ <= n && n <= b_;
        case kind::ap:
            if (n < a_) return false;
            return b_ == 0 ? n == a_ : (n - a_) % b_ == 0;
        case kind::squares: {
            index_t r = isqrt(n);
            return r * r == n;
        }
        case kind::pow2: return n != 0 && (n & (n - 1)) == 0;
        case kind::pairrow: return unpairing(n).first == a_;
        case kind::nu2level: return nu2(n) == a_;
        case kind::nu2atmost: return nu2(n) <= a_;
        case kind::set_union:
            for (const auto& c : kids_)
                if (c.contains(n)) return true;
            return false;
        case kind::complement: return !kids_.front().contains(n);
        }
        return false;
    }

    // |S ∩ [0, N]|
    index_t count_prefix(index_t N) const
    {
        switch (k_) {
        case kind::finite:
            return static_cast<index_t>(std::upper_bound(elems_.begin(), elems_.end(), N) - elems_.begin());
        case kind::range:
            if (a_ > b_ || N < a_) return 0;
            return std::min(N, b_) - a_ + 1;
        case kind::ap:
            if (N < a_) return 0;
            return b_ == 0 ? 1 : (N - a_) / b_ + 1;
        case kind::squares: return isqrt(N) + 1;
        case kind::pow2: {
            index_t c = 0;
            for (index_t p = 1; p <= N; p <<= 1) {
                ++c;
                if (p > (std::numeric_limits<index_t>::max() >> 1)) break;
            }
            return c;
        }
        case kind::pairrow: {
            index_t lo = 0, hi = index_t{1} << 33;
            if (pairing(a_, 0) > N) return 0;
            while (hi - lo > 1) {
                index_t mid = lo + (hi - lo) / 2;
                if (pairing(a_, mid) <= N)
                    lo = mid;
                else
                    hi = mid;
            }
            return lo + 1;
        }
        case kind::nu2level: {
            const index_t t = a_;
            if (t == 0) return (N + 1) / 2 + 1;
            if (t >= 63) return 0;
            return (N >> t) - (N >> (t + 1));
        }
        case kind::nu2atmost: {
            const index_t t = a_;
            if (t >= 63) return N + 1;
            return (N + 1) - (N >> (t + 1));
        }
        case kind::set_union: {
            bool all_finite = std::all_of(kids_.begin(), kids_.end(), [](const SetDescriptor& c) {
                return c.k_ == kind::finite || c.k_ == kind::range;
            });
            if (all_finite) {
                index_t c = 0;
                std::set<index_t> seen;
                for (const auto& ch : kids_) {
                    if (ch.k_ == kind::finite) {
                        for (index_t e : ch.elems_)
                            if (e <= N) seen.insert(e);
                    } else if (ch.a_ > ch.b_ || ch.a_ > N) {
                        continue;
                    } else if (std::min(N, ch.b_) - ch.a_ < (index_t{1} << 22)) {
                        for (index_t e = ch.a_; e <= std::min(N, ch.b_); ++e) seen.insert(e);
                    } else {
                        return brute_count(N);
                    }
                }
                c = seen.size();
                return c;
            }
            return brute_count(N);
        }
        case kind::complement: return (N + 1) - kids_.front().count_prefix(N);
        }
        return 0;
    }

    std::vector<index_t> elements_upto(index_t N) const
    {
        std::vector<index_t> out;
        if (k_ == kind::finite) {
            for (index_t e : elems_)
                if (e <= N) out.push_back(e);
            return out;
        }
        if (k_ == kind::range) {
            for (index_t e = a_; e <= std::min(N, b_) && a_ <= b_; ++e) out.push_back(e);
            return out;
        }
        if (k_ == kind::ap) {
            if (b_ == 0) {
                if (a_ <= N) out.push_back(a_);
                return out;
            }
            for (index_t e = a_; e <= N; e += b_) out.push_back(e);
            return out;
        }
        if (k_ == kind::pairrow) {
            for (index_t i = 0;; ++i) {
                auto p = pairing(a_, i);
                if (p > N) break;
                out.push_back(static_cast<index_t>(p));
            }
            return out;
        }
        for (index_t n = 0; n <= N; ++n)
            if (contains(n)) out.push_back(n);
        return out;
    }

    std::optional<index_t> min_element(index_t horizon) const
    {
        switch (k_) {
        case kind::finite:
            if (elems_.empty()) return std::nullopt;
            return elems_.front();
        case kind::range: return a_ <= b_ ? std::optional<index_t>(a_) : std::nullopt;
        case kind::ap: return a_;
        case kind::squares: return 0;
        case kind::pow2: return 1;
        case kind::pairrow: return static_cast<index_t>(pairing(a_, 0));
        case kind::nu2level: return a_ == 0 ? 0 : (a_ < 64 ? std::optional<index_t>(index_t{1} << a_) : std::nullopt);
        case kind::nu2atmost: return 0;
        default:
            for (index_t n = 0; n <= horizon; ++n)
                if (contains(n)) return n;
            return std::nullopt;
        }
    }

    std::string str() const
    {
        auto num = [](index_t v) { return std::to_string(v); };
        switch (k_) {
        case kind::finite: {
            std::string s = "finite(";
            for (std::size_t i = 0; i < elems_.size(); ++i) s += (i ? "," : "") + num(elems_[i]);
            return s + ")";
        }
        case kind::range: return "range(" + num(a_) + "," + num(b_) + ")";
        case kind::ap: return "ap(" + num(a_) + "," + num(b_) + ")";
        case kind::squares: return "squares";
        case kind::pow2: return "pow2";
        case kind::pairrow: return "pairrow(" + num(a_) + ")";
        case kind::nu2level: return "nu2level(" + num(a_) + ")";
        case kind::nu2atmost: return "nu2atmost(" + num(a_) + ")";
        case kind::set_union: {
            std::string s = "union(";
            for (std::size_t i = 0; i < kids_.size(); ++i) s += (i ? "," : "") + kids_[i].str();
            return s + ")";
        }
        case kind::complement: return "compl(" + kids_.front().str() + ")";
        }
        return "?";
    }

    friend bool operator==(const SetDescriptor& x, const SetDescriptor& y) { return x.str() == y.str(); }

private:
    explicit SetDescriptor(kind k) : k_(k) {}
    static SetDescriptor binary(kind k, index_t a, index_t b)
    {
        SetDescriptor s(k);
        s.a_ = a;
        s.b_ = b;
        return s;
    }
    index_t brute_count(index_t N) const
    {
        index_t c = 0;
        for (index_t n = 0; n <= N; ++n) c += contains(n) ? 1 : 0;
        return c;
    }

    kind k_;
    index_t a_ = 0;
    index_t b_ = 0;
    std::vector<index_t> elems_;
    std::vector<SetDescriptor> kids_;
};

inline q64 density_prefix(const SetDescriptor& S, index_t N)
{
    return q64(static_cast<std::int64_t>(S.count_prefix(N)), static_cast<std::int64_t>(N + 1));
}

class IdealSpec {
public:
    enum class kind { fin, density, summable, nu2, generated };

    IdealSpec() = default;
    static IdealSpec fin() { return IdealSpec(kind::fin); }
    static IdealSpec density() { return IdealSpec(kind::density); }
    static IdealSpec summable() { return IdealSpec(kind::summable); }
    static IdealSpec nu2() { return IdealSpec(kind::nu2); }
    static IdealSpec generated(std::vector<SetDescriptor> gens)
    {
        IdealSpec s(kind::generated);
        s.gens_ = std::move(gens);
        return s;
    }
    // Countably generated by the level sets Q_t = {n : nu2(n) = t}, t in ω.
    static IdealSpec generated_nu2_levels()
    {
        IdealSpec s(kind::generated);
        s.levels_ = true;
        return s;
    }

    kind type() const noexcept { return k_; }
    bool is_fin() const noexcept { return k_ == kind::fin; }
    bool is_generated() const noexcept { return k_ == kind::generated; }
    bool nu2_levels() const noexcept { return levels_; }
    // Fin and ideals generated by level sets are countably generated; nu2 is generated by its levels.
    bool countably_generated() const noexcept { return k_ == kind::fin || k_ == kind::nu2 || k_ == kind::generated; }
    bool tall() const noexcept { return k_ == kind::density || k_ == kind::summable; }
    bool level_structured() const noexcept { return k_ == kind::nu2 || (k_ == kind::generated && levels_); }
    const std::vector<SetDescriptor>& explicit_generators() const noexcept { return gens_; }

    // Number of generators relevant below the horizon.
    std::size_t generator_count(index_t horizon) const
    {
        if (level_structured()) {
            std::size_t c = 1;
            while (c < 63 && (index_t{1} << c) <= horizon) ++c;
            return c;
        }
        if (k_ == kind::fin) return 1;
        return gens_.size();
    }

    SetDescriptor generator(std::size_t j) const
    {
        if (level_structured()) return SetDescriptor::nu2_level(j);
        if (k_ == kind::fin) return SetDescriptor::empty();
        if (k_ != kind::generated) throw error(errc::unsupported_ideal, "ideal has no explicit generators: " + str());
        return gens_.at(j);
    }

    // Least generator index containing n.
    std::optional<std::size_t> generator_of(index_t n) const
    {
        if (level_structured()) return summa::nu2(n);
        if (k_ != kind::generated) return std::nullopt;
        for (std::size_t j = 0; j < gens_.size(); ++j)
            if (gens_[j].contains(n)) return j;
        return std::nullopt;
    }

    std::string str() const
    {
        switch (k_) {
        case kind::fin: return "fin";
        case kind::density: return "density";
        case kind::summable: return "summable";
        case kind::nu2: return "nu2";
        case kind::generated: {
            if (levels_) return "generated[nu2levels]";
            std::string s = "generated[";
            for (std::size_t i = 0; i < gens_.size(); ++i) s += (i ? "," : "") + gens_[i].str();
            return s + "]";
        }
        }
        return "?";
    }

    friend bool operator==(const IdealSpec& x, const IdealSpec& y) { return x.str() == y.str(); }

private:
    explicit IdealSpec(kind k) : k_(k) {}
    kind k_ = kind::fin;
    std::vector<SetDescriptor> gens_;
    bool levels_ = false;
};

// Literal syntax shared with the CLI.
namespace literal {

class parser {
public:
    explicit parser(std::string text) : s_(std::move(text)) {}

    SetDescriptor descriptor()
    {
        std::string id = ident();
        if (id == "finite") {
            std::vector<index_t> v;
            expect('(');
            if (!peek(')')) {
                v.push_back(number());
                while (accept(',')) v.push_back(number());
            }
            expect(')');
            return SetDescriptor::finite(std::move(v));
        }
        if (id == "empty") return SetDescriptor::empty();
        if (id == "omega") return SetDescriptor::omega();
        if (id == "squares") return SetDescriptor::squares();
        if (id == "pow2") return SetDescriptor::powers_of_two();
        if (id == "range" || id == "ap") {
            expect('(');
            index_t a = number();
            expect(',');
            index_t b = number();
            expect(')');
            return id == "range" ? SetDescriptor::range(a, b) : SetDescriptor::ap(a, b);
        }
        if (id == "pairrow" || id == "nu2level" || id == "nu2atmost") {
            expect('(');
            index_t a = number();
            expect(')');
            if (id == "pairrow") return SetDescriptor::pairing_row(a);
            return id == "nu2level" ? SetDescriptor::nu2_level(a) : SetDescriptor::nu2_at_most(a);
        }
        if (id == "union") {
            expect('(');
            std::vector<SetDescriptor> parts;
            parts.push_back(descriptor());
            while (accept(',')) parts.push_back(descriptor());
            expect(')');
            return SetDescriptor::unite(std::move(parts));
        }
        if (id == "compl") {
            expect('(');
            auto inner = descriptor();
            expect(')');
            return SetDescriptor::complement(inner);
        }
        fail("unknown descriptor '" + id + "'");
    }

    IdealSpec ideal()
    {
        std::string id = ident();
        if (id == "fin") return IdealSpec::fin();
        if (id == "density") return IdealSpec::density();
        if (id == "summable") return IdealSpec::summable();
        if (id == "nu2") return IdealSpec::nu2();
        if (id == "generated") {
            expect('[');
            skip();
            if (s_.compare(pos_, 9, "nu2levels") == 0) {
                pos_ += 9;
                expect(']');
                return IdealSpec::generated_nu2_levels();
            }
            std::vector<SetDescriptor> gens;
            gens.push_back(descriptor());
            while (accept(',')) gens.push_back(descriptor());
            expect(']');
            return IdealSpec::generated(std::move(gens));
        }
        fail("unknown ideal '" + id + "'");
    }

    void finish()
    {
        skip();
        if (pos_ != s_.size()) fail("trailing input");
    }

private:
    [[noreturn]] void fail(const std::string& why) const
    {
        throw error(errc::parse_error, why + " at offset " + std::to_string(pos_) + " in '" + s_ + "'");
    }
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c)
    {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool accept(char c)
    {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }
    void expect(char c)
    {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    std::string ident()
    {
        skip();
        std::size_t b = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        if (b == pos_) fail("expected identifier");
        return s_.substr(b, pos_ - b);
    }
    index_t number()
    {
        skip();
        std::size_t b = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (b == pos_) fail("expected number");
        return std::stoull(s_.substr(b, pos_ - b));
    }

    std::string s_;
    std::size_t pos_ = 0;
};

inline SetDescriptor parse_descriptor(const std::string& text)
{
    parser p(text);
    auto d = p.descriptor();
    p.finish();
    return d;
}

inline IdealSpec parse_ideal(const std::string& text)
{
    parser p(text);
    auto i = p.ideal();
    p.finish();
    return i;
}

} // namespace literal

using diagnostics = std::vector<std::pair<std::string, double>>;

inline std::optional<double> diag_get(const diagnostics& d, const std::string& key)
{
    for (const auto& [k, v] : d)
        if (k == key) return v;
    return std::nullopt;
}

struct Membership {
    enum class status { in, not_in, unknown_at_horizon };
    status state = status::unknown_at_horizon;
    std::string rule;
    diagnostics diag;

    bool in() const noexcept { return state == status::in; }
    bool not_in() const noexcept { return state == status::not_in; }
};

inline const char* to_string(Membership::status s)
{
    switch (s) {
    case Membership::status::in: return "In";
    case Membership::status::not_in: return "NotIn";
    default: return "UnknownAtHorizon";
    }
}

namespace detail {

enum class tri { yes, no, unknown };

inline tri is_finite(const SetDescriptor& S);

inline std::optional<double> density_exact(const SetDescriptor& S)
{
    using K = SetDescriptor::kind;
    switch (S.type()) {
    case K::finite:
    case K::range:
    case K::squares:
    case K::pow2:
    case K::pairrow: return 0.0;
    case K::ap: return S.b() == 0 ? 0.0 : 1.0 / static_cast<double>(S.b());
    case K::nu2level: return S.a() >= 63 ? 0.0 : std::ldexp(1.0, -static_cast<int>(S.a()) - 1);
    case K::nu2atmost: return S.a() >= 63 ? 1.0 : 1.0 - std::ldexp(1.0, -static_cast<int>(S.a()) - 1);
    case K::set_union: {
        for (const auto& c : S.children()) {
            auto d = density_exact(c);
            if (!d || *d != 0.0) return std::nullopt;
        }
        return 0.0;
    }
    case K::complement: {
        auto d = density_exact(S.children().front());
        if (!d) return std::nullopt;
        return 1.0 - *d;
    }
    }
    return std::nullopt;
}

// Certified lower bound on the lower asymptotic density.
inline double density_lower(const SetDescriptor& S)
{
    if (auto d = density_exact(S)) return *d;
    if (S.type() == SetDescriptor::kind::set_union) {
        double m = 0.0;
        for (const auto& c : S.children()) m = std::max(m, density_lower(c));
        return m;
    }
    return 0.0;
}

inline tri is_cofinite(const SetDescriptor& S)
{
    using K = SetDescriptor::kind;
    switch (S.type()) {
    case K::ap: return S.b() == 1 ? tri::yes : tri::no;
    case K::complement: return is_finite(S.children().front());
    case K::set_union: {
        for (const auto& c : S.children())
            if (is_cofinite(c) == tri::yes) return tri::yes;
        if (density_lower(S) < 1.0 && density_exact(S)) return tri::no;
        return tri::unknown;
    }
    default: return tri::no;
    }
}

inline tri is_finite(const SetDescriptor& S)
{
    using K = SetDescriptor::kind;
    switch (S.type()) {
    case K::finite:
    case K::range: return tri::yes;
    case K::ap: return S.b() == 0 ? tri::yes : tri::no;
    case K::set_union: {
        bool all = true;
        for (const auto& c : S.children()) {
            tri t = is_finite(c);
            if (t == tri::no) return tri::no;
            if (t != tri::yes) all = false;
        }
        return all ? tri::yes : tri::unknown;
    }
    case K::complement: {
        const auto& in = S.children().front();
        if (density_lower(S) > 0.0) return tri::no;
        return is_cofinite(in);
    }
    default: return tri::no;
    }
}

inline tri harmonic_convergent(const SetDescriptor& S)
{
    using K = SetDescriptor::kind;
    switch (S.type()) {
    case K::finite:
    case K::range:
    case K::squares:
    case K::pow2:
    case K::pairrow: return tri::yes;
    case K::ap: return S.b() == 0 ? tri::yes : tri::no;
    case K::nu2level:
    case K::nu2atmost: return tri::no;
    case K::set_union: {
        bool all = true;
        for (const auto& c : S.children()) {
            tri t = harmonic_convergent(c);
            if (t == tri::no) return tri::no;
            if (t != tri::yes) all = false;
        }
        return all ? tri::yes : tri::unknown;
    }
    case K::complement:
        if (density_lower(S) > 0.0) return tri::no;
        if (is_finite(S) == tri::yes) return tri::yes;
        return tri::unknown;
    }
    return tri::unknown;
}

// Levels: all but finitely many elements have nu2 in `levels`, and each listed level is hit infinitely often.
// Unbounded: for every finite level set V, infinitely many elements fall outside nu2^{-1}(V).
struct nu2_profile {
    enum class tag { levels, unbounded, unknown } t = tag::unknown;
    std::set<index_t> levels;
};

inline nu2_profile profile(const SetDescriptor& S)
{
    using K = SetDescriptor::kind;
    using T = nu2_profile::tag;
    nu2_profile p;
    switch (S.type()) {
    case K::finite:
    case K::range: p.t = T::levels; return p;
    case K::ap: {
        const index_t o = S.a(), s = S.b();
        if (s == 0) {
            p.t = T::levels;
        } else if (o > 0 && nu2(s) > nu2(o)) {
            p.t = T::levels;
            p.levels.insert(nu2(o));
        } else {
            p.t = T::unbounded;
        }
        return p;
    }
    case K::squares:
    case K::pow2: p.t = T::unbounded; return p;
    case K::pairrow: return p;
    case K::nu2level:
        p.t = T::levels;
        p.levels.insert(S.a());
        return p;
    case K::nu2atmost:
        p.t = T::levels;
        for (index_t t = 0; t <= S.a() && t < 64; ++t) p.levels.insert(t);
        return p;
    case K::set_union: {
        p.t = T::levels;
        for (const auto& c : S.children()) {
            auto q = profile(c);
            if (q.t == T::unbounded) return q;
            if (q.t == T::unknown) p.t = T::unknown;
            p.levels.insert(q.levels.begin(), q.levels.end());
        }
        if (p.t == T::unknown) p.levels.clear();
        return p;
    }
    case K::complement: {
        auto q = profile(S.children().front());
        if (q.t == T::levels) p.t = T::unbounded;
        return p;
    }
    }
    return p;
}

// Levels covered by an explicit generator list, when every generator is level-structured.
inline std::optional<std::set<index_t>> generator_levels(const std::vector<SetDescriptor>& gens)
{
    std::set<index_t> L;
    for (const auto& g : gens) {
        auto q = profile(g);
        if (q.t != nu2_profile::tag::levels) return std::nullopt;
        // Only exact level unions: the profile must describe the generator itself, not just its tail.
        using K = SetDescriptor::kind;
        bool exact = g.type() == K::nu2level || g.type() == K::nu2atmost || g.type() == K::finite ||
                     g.type() == K::range;
        if (g.type() == K::set_union)
            exact = std::all_of(g.children().begin(), g.children().end(), [](const SetDescriptor& c) {
                return c.type() == K::nu2level || c.type() == K::nu2atmost || c.type() == K::finite ||
                       c.type() == K::range;
            });
        if (!exact) return std::nullopt;
        L.insert(q.levels.begin(), q.levels.end());
    }
    return L;
}

inline bool provably_subset(const SetDescriptor& S, const SetDescriptor& T)
{
    using K = SetDescriptor::kind;
    if (is_finite(S) == tri::yes && S.type() == K::finite) {
        return std::all_of(S.elements().begin(), S.elements().end(), [&](index_t e) { return T.contains(e); });
    }
    if (S == T) return true;
    if (S.type() == K::set_union)
        return std::all_of(S.children().begin(), S.children().end(),
                           [&](const SetDescriptor& c) { return provably_subset(c, T); });
    if (T.type() == K::set_union)
        for (const auto& c : T.children())
            if (provably_subset(S, c)) return true;
    if (S.type() == K::nu2level && T.type() == K::nu2atmost) return S.a() <= T.a();
    if (S.type() == K::nu2atmost && T.type() == K::nu2atmost) return S.a() <= T.a();
    if (S.type() == K::ap && T.type() == K::ap) {
        if (S.b() == 0) return T.contains(S.a());
        return T.b() != 0 && S.b() % T.b() == 0 && T.contains(S.a());
    }
    return false;
}

// Harmonic partial sum and related diagnostics.
inline diagnostics sample_diagnostics(const SetDescriptor& S, index_t N)
{
    kahan h;
    index_t count = 0;
    unsigned maxv = 0;
    for (index_t n = 0; n <= N; ++n) {
        if (!S.contains(n)) continue;
        ++count;
        h += 1.0 / static_cast<double>(n + 1);
        maxv = std::max(maxv, nu2(n));
    }
    return {{"horizon", static_cast<double>(N)},
            {"count", static_cast<double>(count)},
            {"prefix_density", static_cast<double>(count) / static_cast<double>(N + 1)},
            {"harmonic_partial", h.value()},
            {"max_nu2", static_cast<double>(maxv)}};
}

} // namespace detail

inline Membership ideal_member(const IdealSpec& I, const SetDescriptor& S, index_t horizon = index_t{1} << 16)
{
    using detail::tri;
    Membership m;
    auto from_tri = [&](tri t, const char* rule) {
        if (t == tri::yes) {
            m.state = Membership::status::in;
        } else if (t == tri::no) {
            m.state = Membership::status::not_in;
        } else {
            m.state = Membership::status::unknown_at_horizon;
            m.diag = detail::sample_diagnostics(S, horizon);
        }
        m.rule = rule;
    };
    // Finite sets belong to every ideal handled here.
    if (detail::is_finite(S) == tri::yes) {
        m.state = Membership::status::in;
        m.rule = "finite set";
        m.diag = {{"count", static_cast<double>(S.count_prefix(horizon))}};
        return m;
    }
    switch (I.type()) {
    case IdealSpec::kind::fin: from_tri(detail::is_finite(S), "finiteness"); break;
    case IdealSpec::kind::density: {
        auto d = detail::density_exact(S);
        if (d && *d == 0.0)
            from_tri(tri::yes, "asymptotic density 0");
        else if (detail::density_lower(S) > 0.0)
            from_tri(tri::no, "positive asymptotic density");
        else
            from_tri(tri::unknown, "density undecided");
        m.diag.push_back({"density", d ? *d : detail::density_lower(S)});
        break;
    }
    case IdealSpec::kind::summable: from_tri(detail::harmonic_convergent(S), "reciprocal sum"); break;
    case IdealSpec::kind::nu2: {
        auto p = detail::profile(S);
        from_tri(p.t == detail::nu2_profile::tag::levels      ? tri::yes
                 : p.t == detail::nu2_profile::tag::unbounded ? tri::no
                                                               : tri::unknown,
                 "bounded 2-adic valuation");
        if (p.t == detail::nu2_profile::tag::levels)
            m.diag.push_back({"max_nu2_tail", p.levels.empty() ? 0.0 : static_cast<double>(*p.levels.rbegin())});
        break;
    }
    case IdealSpec::kind::generated: {
        auto p = detail::profile(S);
        using T = detail::nu2_profile::tag;
        if (I.nu2_levels()) {
            from_tri(p.t == T::levels ? tri::yes : p.t == T::unbounded ? tri::no : tri::unknown,
                     "covered by finitely many level generators");
            break;
        }
        SetDescriptor cover = SetDescriptor::unite(I.explicit_generators());
        // Finite parts of a union are absorbed by the ideal.
        SetDescriptor core = S;
        if (S.type() == SetDescriptor::kind::set_union) {
            std::vector<SetDescriptor> rest;
            for (const auto& c : S.children())
                if (detail::is_finite(c) != tri::yes) rest.push_back(c);
            core = SetDescriptor::unite(std::move(rest));
        }
        if (detail::provably_subset(core, cover)) {
            from_tri(tri::yes, "covered by generators");
            break;
        }
        auto L = detail::generator_levels(I.explicit_generators());
        if (L && p.t != T::unknown) {
            bool sub = p.t == T::levels && std::includes(L->begin(), L->end(), p.levels.begin(), p.levels.end());
            from_tri(sub ? tri::yes : tri::no, "level profile against generators");
            break;
        }
        from_tri(tri::unknown, "generator cover undecided");
        break;
    }
    }
    return m;
}

// A sequence in R^d given by a deterministic rule, with optional declarations.
struct SequenceView {
    std::size_t dim = 1;
    std::function<void(index_t, double*)> eval;

    std::optional<std::string> declared_ideal; // literal of the ideal the declarations refer to
    std::optional<std::vector<double>> declared_limit;
    std::optional<SetDescriptor> declared_support;
    bool declared_bounded = false;
    double declared_sup = std::numeric_limits<double>::infinity();

    static SequenceView scalar(std::function<double(index_t)> f)
    {
        SequenceView s;
        s.dim = 1;
        s.eval = [f = std::move(f)](index_t n, double* out) { out[0] = f(n); };
        return s;
    }
    static SequenceView vector(std::size_t d, std::function<void(index_t, double*)> f)
    {
        SequenceView s;
        s.dim = d;
        s.eval = std::move(f);
        return s;
    }

    double at(index_t n) const
    {
        double buf[16];
        if (dim <= 16) {
            eval(n, buf);
            return buf[0];
        }
        return value(n)[0];
    }
    std::vector<double> value(index_t n) const
    {
        std::vector<double> v(dim, 0.0);
        eval(n, v.data());
        return v;
    }
    // Flattened samples for n = 0..N.
    std::vector<double> sample(index_t N) const
    {
        std::vector<double> out((N + 1) * dim, 0.0);
        for (index_t n = 0; n <= N; ++n) eval(n, out.data() + n * dim);
        return out;
    }
};

struct IdealLimitReport {
    enum class status { converged, no_limit_detected, inconclusive };
    std::vector<double> estimate;
    std::vector<double> lower;
    std::vector<double> upper;
    index_t horizon = 0;
    double tol = 0.0;
    status state = status::inconclusive;
    diagnostics diag;

    double value() const { return estimate.empty() ? 0.0 : estimate.front(); }
    bool converged() const noexcept { return state == status::converged; }
};

inline const char* to_string(IdealLimitReport::status s)
{
    switch (s) {
    case IdealLimitReport::status::converged: return "Converged";
    case IdealLimitReport::status::no_limit_detected: return "NoLimitDetected";
    default: return "Inconclusive";
    }
}

// Classification of a sampled index set (mask over [0, N]) as small for the ideal.
struct trend_options {
    double density_ceiling = 0.05;
    double harmonic_ceiling = 0.05;
};

namespace detail {

inline index_t level_cap(index_t N)
{
    unsigned lg = 0;
    while (lg < 63 && (index_t{1} << (lg + 1)) <= N + 1) ++lg;
    return std::max<index_t>(1, lg / 2);
}

inline bool in_deep(const IdealSpec& I, index_t n, index_t N)
{
    if (I.is_fin()) return 2 * n >= N;
    if (I.level_structured()) return nu2(n) >= level_cap(N) && n != 0;
    if (I.type() == IdealSpec::kind::generated) {
        if (2 * n < N) return false;
        for (const auto& g : I.explicit_generators())
            if (g.contains(n)) return false;
        return true;
    }
    return true;
}

inline bool trend_based(const IdealSpec& I)
{
    return I.type() == IdealSpec::kind::density || I.type() == IdealSpec::kind::summable;
}

} // namespace detail

// Indices carrying the ideal's tail behaviour at horizon N.
inline std::vector<index_t> deep_region(const IdealSpec& I, index_t N)
{
    std::vector<index_t> out;
    for (index_t n = 0; n <= N; ++n)
        if (detail::in_deep(I, n, N)) out.push_back(n);
    return out;
}

inline bool sampled_small(const IdealSpec& I, const std::vector<char>& mask, index_t N, diagnostics* diag = nullptr,
                          const trend_options& opt = {})
{
    if (I.type() == IdealSpec::kind::density) {
        const index_t n1 = N / 4, n2 = N / 2;
        index_t c = 0, c1 = 0, c2 = 0;
        for (index_t n = 0; n <= N; ++n) {
            c += mask[n] ? 1 : 0;
            if (n == n1) c1 = c;
            if (n == n2) c2 = c;
        }
        double d1 = static_cast<double>(c1) / static_cast<double>(n1 + 1);
        double d2 = static_cast<double>(c2) / static_cast<double>(n2 + 1);
        double d3 = static_cast<double>(c) / static_cast<double>(N + 1);
        if (diag) *diag = {{"density_quarter", d1}, {"density_half", d2}, {"density", d3}};
        return c == 0 || (d1 > d2 && d2 > d3 && d3 < opt.density_ceiling);
    }
    if (I.type() == IdealSpec::kind::summable) {
        kahan w1, w2, tot;
        for (index_t n = 0; n <= N; ++n) {
            if (!mask[n]) continue;
            double r = 1.0 / static_cast<double>(n + 1);
            tot += r;
            if (4 * n > N && 2 * n <= N) w1 += r;
            if (2 * n > N) w2 += r;
        }
        if (diag) *diag = {{"harmonic_window_prev", w1.value()}, {"harmonic_window", w2.value()},
                           {"harmonic_partial", tot.value()}};
        return w2.value() == 0.0 || (w2.value() < w1.value() && w2.value() < opt.harmonic_ceiling);
    }
    index_t hits = 0;
    for (index_t n = 0; n <= N; ++n)
        if (mask[n] && detail::in_deep(I, n, N)) ++hits;
    if (diag) *diag = {{"deep_hits", static_cast<double>(hits)}};
    return hits == 0;
}

namespace detail {

inline double limsup_at(const IdealSpec& I, const std::vector<double>& y, index_t H)
{
    if (!trend_based(I)) {
        double m = -std::numeric_limits<double>::infinity();
        for (index_t n = 0; n <= H; ++n)
            if (in_deep(I, n, H)) m = std::max(m, y[n]);
        return m;
    }
    std::vector<double> vals(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(H + 1));
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    std::vector<char> mask(H + 1);
    auto small_at = [&](double r) {
        for (index_t n = 0; n <= H; ++n) mask[n] = y[n] >= r ? 1 : 0;
        return sampled_small(I, mask, H);
    };
    // Largest value whose super-level set is not small.
    std::size_t lo = 0, hi = vals.size();
    if (small_at(vals[0])) return vals[0];
    while (hi - lo > 1) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (small_at(vals[mid]))
            hi = mid;
        else
            lo = mid;
    }
    return vals[lo];
}

inline std::vector<double> median_over(const std::vector<double>& flat, std::size_t dim,
                                       const std::vector<index_t>& idx)
{
    std::vector<double> out(dim, 0.0);
    if (idx.empty()) return out;
    std::vector<double> col(idx.size());
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t i = 0; i < idx.size(); ++i) col[i] = flat[idx[i] * dim + c];
        auto mid = col.begin() + static_cast<std::ptrdiff_t>(col.size() / 2);
        std::nth_element(col.begin(), mid, col.end());
        double hi = *mid;
        if (col.size() % 2 == 0) {
            double lo = *std::max_element(col.begin(), mid);
            out[c] = 0.5 * (lo + hi);
        } else {
            out[c] = hi;
        }
    }
    return out;
}

inline double dist_inf(const double* a, const std::vector<double>& c)
{
    double m = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) m = std::max(m, std::fabs(a[i] - c[i]));
    return m;
}

} // namespace detail

inline IdealLimitReport ideal_limsup(const IdealSpec& I, const SequenceView& y, index_t horizon, double tol = 1e-6)
{
    if (horizon == 0) throw error(errc::insufficient_horizon, "ideal_limsup needs horizon >= 1");
    std::vector<double> v(horizon + 1);
    for (index_t n = 0; n <= horizon; ++n) v[n] = y.at(n);
    std::vector<index_t> hs;
    if (horizon >= 16) hs.push_back(horizon / 4);
    if (horizon >= 8) hs.push_back(horizon / 2);
    hs.push_back(horizon);
    std::vector<double> est;
    for (index_t H : hs) est.push_back(detail::limsup_at(I, v, H));
    IdealLimitReport r;
    r.horizon = horizon;
    r.tol = tol;
    r.estimate = {est.back()};
    r.lower = {*std::min_element(est.begin(), est.end())};
    r.upper = {*std::max_element(est.begin(), est.end())};
    double prev = est.size() > 1 ? est[est.size() - 2] : est.back();
    r.state = std::fabs(est.back() - prev) <= tol ? IdealLimitReport::status::converged
                                                  : IdealLimitReport::status::inconclusive;
    for (std::size_t i = 0; i < hs.size(); ++i) r.diag.push_back({"estimate@" + std::to_string(hs[i]), est[i]});
    return r;
}

inline IdealLimitReport ideal_lim_sampled(const IdealSpec& I, const std::vector<double>& flat, std::size_t dim,
                                          index_t horizon, double tol)
{
    if (horizon == 0) throw error(errc::insufficient_horizon, "ideal_lim needs horizon >= 1");
    if (!(tol > 0)) throw std::invalid_argument("ideal_lim: tol must be positive");
    auto candidate_at = [&](index_t H) {
        std::vector<index_t> D;
        for (index_t n = 0; n <= H; ++n)
            if (detail::in_deep(I, n, H)) D.push_back(n);
        return std::make_pair(detail::median_over(flat, dim, D), D);
    };
    IdealLimitReport r;
    r.horizon = horizon;
    r.tol = tol;

    std::vector<index_t> hs;
    if (horizon >= 16) hs.push_back(horizon / 4);
    if (horizon >= 8) hs.push_back(horizon / 2);
    hs.push_back(horizon);
    std::vector<std::vector<double>> cands;
    std::vector<double> spreads;
    std::vector<index_t> D;
    for (index_t H : hs) {
        auto [c, d] = candidate_at(H);
        double sp = 0.0;
        for (index_t n : d) sp = std::max(sp, detail::dist_inf(flat.data() + n * dim, c));
        cands.push_back(c);
        spreads.push_back(sp);
        D = std::move(d);
    }
    const auto& c = cands.back();
    r.estimate = c;
    r.lower = c;
    r.upper = c;
    for (const auto& cc : cands)
        for (std::size_t i = 0; i < dim; ++i) {
            r.lower[i] = std::min(r.lower[i], cc[i]);
            r.upper[i] = std::max(r.upper[i], cc[i]);
        }

    std::vector<char> mask(horizon + 1);
    for (index_t n = 0; n <= horizon; ++n) mask[n] = detail::dist_inf(flat.data() + n * dim, c) >= tol ? 1 : 0;
    diagnostics d1;
    bool small = sampled_small(I, mask, horizon, &d1);
    for (auto& kv : d1) r.diag.push_back({"exceptional_" + kv.first, kv.second});
    r.diag.push_back({"deep_spread", spreads.back()});
    if (small) {
        r.state = IdealLimitReport::status::converged;
        return r;
    }
    // Second cluster: median of the exceptional deep values.
    std::vector<index_t> exc;
    for (index_t n : D)
        if (mask[n]) exc.push_back(n);
    r.state = IdealLimitReport::status::inconclusive;
    if (exc.empty()) return r;
    auto c2 = detail::median_over(flat, dim, exc);
    std::vector<char> near(horizon + 1);
    for (index_t n = 0; n <= horizon; ++n) near[n] = detail::dist_inf(flat.data() + n * dim, c2) < tol ? 1 : 0;
    bool second_positive = !sampled_small(I, near, horizon);
    bool separated = max_abs_diff(c, c2) >= 2 * tol;
    bool persistent = spreads.size() < 2 || spreads.back() >= 0.75 * spreads[spreads.size() - 2];
    r.diag.push_back({"second_cluster", c2.front()});
    if (second_positive && separated && persistent) r.state = IdealLimitReport::status::no_limit_detected;
    return r;
}

inline IdealLimitReport ideal_lim(const IdealSpec& I, const SequenceView& x, index_t horizon, double tol = 1e-6)
{
    if (horizon == 0) throw error(errc::insufficient_horizon, "ideal_lim needs horizon >= 1");
    return ideal_lim_sampled(I, x.sample(horizon), x.dim, horizon, tol);
}

// Rows E_r = {p(r, i) : i in ω} of the Cantor pairing.
inline std::vector<SetDescriptor> tall_partition(const IdealSpec& I, std::size_t count)
{
    if (!I.tall()) throw error(errc::unsupported_ideal, I.str() + " is not tall");
    if (count == 0) throw std::invalid_argument("tall_partition: count must be >= 1");
    std::vector<SetDescriptor> rows;
    rows.reserve(count);
    for (std::size_t r = 0; r < count; ++r) rows.push_back(SetDescriptor::pairing_row(r));
    return rows;
}

} // namespace summa
