#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <summa/ideal_core.hpp>

#include <random>

using namespace summa;

namespace {

std::vector<SetDescriptor> descriptor_zoo()
{
    return {
        SetDescriptor::empty(),
        SetDescriptor::finite({0, 3, 3, 17, 250}),
        SetDescriptor::range(5, 40),
        SetDescriptor::range(9, 3),
        SetDescriptor::ap(0, 2),
        SetDescriptor::ap(7, 5),
        SetDescriptor::ap(4, 0),
        SetDescriptor::squares(),
        SetDescriptor::powers_of_two(),
        SetDescriptor::pairing_row(0),
        SetDescriptor::pairing_row(3),
        SetDescriptor::nu2_level(0),
        SetDescriptor::nu2_level(3),
        SetDescriptor::nu2_at_most(2),
        SetDescriptor::unite({SetDescriptor::squares(), SetDescriptor::ap(1, 3), SetDescriptor::finite({2, 4})}),
        SetDescriptor::complement(SetDescriptor::squares()),
        SetDescriptor::complement(SetDescriptor::unite({SetDescriptor::nu2_level(1), SetDescriptor::range(0, 10)})),
        SetDescriptor::omega(),
    };
}

} // namespace

TEST_CASE("nu2 values")
{
    CHECK(nu2(0) == 0);
    CHECK(nu2(12) == 2);
    CHECK(nu2(7) == 0);
    CHECK(nu2(index_t{1} << 40) == 40);
}

TEST_CASE("density_prefix is exact")
{
    CHECK(density_prefix(SetDescriptor::ap(0, 2), 9) == q64(5, 10));
    CHECK(density_prefix(SetDescriptor::squares(), 99) == q64(10, 100));
    for (index_t N : {index_t{0}, index_t{1}, index_t{1000}}) CHECK(density_prefix(SetDescriptor::omega(), N) == q64(1));
}

TEST_CASE("count_prefix matches brute-force membership")
{
    for (const auto& S : descriptor_zoo()) {
        index_t brute = 0;
        for (index_t n = 0; n <= 3000; ++n) {
            brute += S.contains(n) ? 1 : 0;
            if (n % 97 == 0 || n == 3000) REQUIRE_MESSAGE(S.count_prefix(n) == brute, S.str() << " at " << n);
        }
    }
}

TEST_CASE("double complement has identical membership")
{
    for (const auto& S : descriptor_zoo()) {
        auto C = SetDescriptor::complement(SetDescriptor::complement(S));
        for (index_t n = 0; n <= 2000; ++n) REQUIRE(C.contains(n) == S.contains(n));
    }
}

TEST_CASE("elements_upto lists exactly the members")
{
    for (const auto& S : descriptor_zoo()) {
        auto el = S.elements_upto(500);
        CHECK(el.size() == S.count_prefix(500));
        for (index_t n : el) CHECK(S.contains(n));
        CHECK(std::is_sorted(el.begin(), el.end()));
    }
}

TEST_CASE("ideal_member examples")
{
    CHECK(ideal_member(IdealSpec::fin(), SetDescriptor::range(0, 10)).in());
    CHECK(ideal_member(IdealSpec::density(), SetDescriptor::ap(0, 2)).not_in());
    CHECK(ideal_member(IdealSpec::nu2(), SetDescriptor::nu2_at_most(3)).in());
    CHECK(ideal_member(IdealSpec::summable(), SetDescriptor::squares()).in());
    CHECK(ideal_member(IdealSpec::summable(), SetDescriptor::ap(3, 7)).not_in());
    CHECK(ideal_member(IdealSpec::density(), SetDescriptor::squares()).in());
    CHECK(ideal_member(IdealSpec::density(), SetDescriptor::pairing_row(2)).in());
    CHECK(ideal_member(IdealSpec::nu2(), SetDescriptor::nu2_level(5)).in());
    CHECK(ideal_member(IdealSpec::nu2(), SetDescriptor::ap(0, 2)).not_in());
    CHECK(ideal_member(IdealSpec::fin(), SetDescriptor::squares()).not_in());
}

TEST_CASE("proper ideals contain finite sets and exclude cofinite sets")
{
    const std::vector<IdealSpec> ideals = {IdealSpec::fin(), IdealSpec::density(), IdealSpec::summable(), IdealSpec::nu2(),
                                           IdealSpec::generated_nu2_levels(),
                                           IdealSpec::generated({SetDescriptor::squares(), SetDescriptor::powers_of_two()})};
    for (const auto& I : ideals) {
        CHECK_MESSAGE(ideal_member(I, SetDescriptor::finite({1, 5, 99})).in(), I.str());
        CHECK_MESSAGE(ideal_member(I, SetDescriptor::empty()).in(), I.str());
        CHECK_MESSAGE(!ideal_member(I, SetDescriptor::complement(SetDescriptor::finite({2, 3}))).in(), I.str());
        CHECK_MESSAGE(!ideal_member(I, SetDescriptor::omega()).in(), I.str());
    }
}

TEST_CASE("generated ideal membership")
{
    auto I = IdealSpec::generated({SetDescriptor::squares(), SetDescriptor::powers_of_two()});
    CHECK(ideal_member(I, SetDescriptor::squares()).in());
    CHECK(ideal_member(I, SetDescriptor::unite({SetDescriptor::squares(), SetDescriptor::finite({3})})).in());
    auto L = IdealSpec::generated_nu2_levels();
    CHECK(ideal_member(L, SetDescriptor::unite({SetDescriptor::nu2_level(0), SetDescriptor::nu2_level(4)})).in());
    CHECK(ideal_member(L, SetDescriptor::nu2_at_most(6)).in());
}

TEST_CASE("unknown membership carries a diagnostic")
{
    for (const auto& I : {IdealSpec::fin(), IdealSpec::density(), IdealSpec::summable(), IdealSpec::nu2()})
        for (const auto& S : descriptor_zoo()) {
            auto m = ideal_member(I, S);
            if (m.state == Membership::status::unknown_at_horizon) CHECK_MESSAGE(!m.diag.empty(), I.str() << " " << S.str());
        }
}

TEST_CASE("membership is monotone under provable inclusion")
{
    const std::vector<std::pair<SetDescriptor, SetDescriptor>> pairs = {
        {SetDescriptor::nu2_level(2), SetDescriptor::nu2_at_most(3)},
        {SetDescriptor::range(3, 9), SetDescriptor::range(0, 20)},
        {SetDescriptor::finite({4, 16}), SetDescriptor::squares()},
        {SetDescriptor::squares(), SetDescriptor::unite({SetDescriptor::squares(), SetDescriptor::powers_of_two()})},
        {SetDescriptor::ap(0, 4), SetDescriptor::ap(0, 2)},
    };
    for (const auto& I : {IdealSpec::fin(), IdealSpec::density(), IdealSpec::summable(), IdealSpec::nu2()})
        for (const auto& [S, T] : pairs)
            if (ideal_member(I, T).in()) CHECK_MESSAGE(!ideal_member(I, S).not_in(), I.str() << " " << S.str());
}

TEST_CASE("ideal literals round trip")
{
    for (const char* text : {"fin", "density", "summable", "nu2", "generated[nu2levels]", "generated[squares,pow2]"})
        CHECK(literal::parse_ideal(text).str() == text);
    auto S = literal::parse_descriptor("union(range(2,5),ap(1,3),compl(squares),nu2level(2),nu2atmost(1),pairrow(4))");
    for (index_t n = 0; n < 200; ++n) {
        const bool want = (n >= 2 && n <= 5) || (n >= 1 && (n - 1) % 3 == 0) || isqrt(n) * isqrt(n) != n || nu2(n) == 2 ||
                          nu2(n) <= 1 || unpairing(n).first == 4;
        CHECK(S.contains(n) == want);
    }
    CHECK_THROWS_AS(literal::parse_descriptor("range(1"), error);
    CHECK_THROWS_AS(literal::parse_ideal("maximal"), error);
}

TEST_CASE("ideal_limsup examples")
{
    auto c = ideal_limsup(IdealSpec::fin(), SequenceView::scalar([](index_t) { return 2.5; }), 1000);
    CHECK(c.value() == doctest::Approx(2.5));
    CHECK(c.converged());
    auto sq = SequenceView::scalar([](index_t n) { return isqrt(n) * isqrt(n) == n ? 1.0 : 0.0; });
    CHECK(ideal_limsup(IdealSpec::density(), sq, 10000).value() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(ideal_limsup(IdealSpec::fin(), sq, 10000).value() == doctest::Approx(1.0));
    auto h = ideal_limsup(IdealSpec::fin(), SequenceView::scalar([](index_t n) { return 1.0 / (n + 1.0); }), 1000);
    CHECK(h.value() == doctest::Approx(1.0 / 501).epsilon(1e-9));
    CHECK_THROWS_AS(ideal_limsup(IdealSpec::fin(), sq, 0), error);
}

TEST_CASE("ideal_limsup is non-increasing over doubling horizons for decreasing input")
{
    auto y = SequenceView::scalar([](index_t n) { return 1.0 + 1.0 / std::sqrt(n + 1.0); });
    double prev = 1e300;
    for (index_t N : {index_t{256}, index_t{512}, index_t{1024}, index_t{2048}}) {
        double v = ideal_limsup(IdealSpec::fin(), y, N).value();
        CHECK(v <= prev + 1e-12);
        CHECK(v >= 0.0);
        prev = v;
    }
}

TEST_CASE("ideal_lim examples")
{
    auto spiky = SequenceView::scalar([](index_t n) { return isqrt(n) * isqrt(n) == n ? 100.0 : 5.0; });
    auto d = ideal_lim(IdealSpec::density(), spiky, 10000, 1e-6);
    CHECK(d.converged());
    CHECK(d.value() == doctest::Approx(5.0));
    auto f = ideal_lim(IdealSpec::fin(), spiky, 10000, 1e-6);
    CHECK(f.state == IdealLimitReport::status::no_limit_detected);
    auto h = ideal_lim(IdealSpec::fin(), SequenceView::scalar([](index_t n) { return 1.0 / (n + 1.0); }), 10000, 1e-3);
    CHECK(h.converged());
    CHECK(h.value() == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("ideal_lim brackets contain the estimate")
{
    std::vector<SequenceView> xs = {
        SequenceView::scalar([](index_t n) { return std::cos(static_cast<double>(n)); }),
        SequenceView::scalar([](index_t n) { return 3.0 - 1.0 / (n + 1.0); }),
        SequenceView::vector(2, [](index_t n, double* o) {
            o[0] = 1.0 + std::pow(0.5, static_cast<double>(n % 64));
            o[1] = nu2(n) > 3 ? 7.0 : -1.0;
        }),
    };
    for (const auto& I : {IdealSpec::fin(), IdealSpec::density(), IdealSpec::nu2()})
        for (const auto& x : xs) {
            auto r = ideal_lim(I, x, 4096, 1e-6);
            REQUIRE(r.estimate.size() == x.dim);
            for (std::size_t i = 0; i < x.dim; ++i) {
                CHECK(r.lower[i] <= r.estimate[i] + 1e-12);
                CHECK(r.estimate[i] <= r.upper[i] + 1e-12);
            }
        }
}

TEST_CASE("nu2 ideal limits see only bounded valuation exceptions")
{
    auto x = SequenceView::scalar([](index_t n) { return nu2(n) <= 2 ? 9.0 : 1.0 + std::ldexp(1.0, -static_cast<int>(nu2(n))); });
    auto r = ideal_lim(IdealSpec::nu2(), x, index_t{1} << 14, 1e-2);
    CHECK(r.converged());
    CHECK(r.value() == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("tall_partition rows")
{
    auto rows = tall_partition(IdealSpec::density(), 3);
    REQUIRE(rows.size() == 3);
    for (const auto& R : rows) {
        CHECK(static_cast<double>(R.count_prefix(10000)) / 10001.0 <= 0.02);
        CHECK(ideal_member(IdealSpec::density(), R).in());
        CHECK(ideal_member(IdealSpec::summable(), R).in());
    }
    CHECK_THROWS_AS(tall_partition(IdealSpec::fin(), 2), error);
    CHECK_THROWS_AS(tall_partition(IdealSpec::nu2(), 2), error);
    try {
        tall_partition(IdealSpec::fin(), 2);
    } catch (const error& e) {
        CHECK(e.code() == errc::unsupported_ideal);
    }
}

TEST_CASE("tall_partition covers every prefix exactly once")
{
    constexpr index_t N = 10000;
    std::size_t count = 0;
    while (pairing(count, 0) <= N) ++count;
    auto rows = tall_partition(IdealSpec::summable(), count);
    for (index_t M : {index_t{0}, index_t{10}, index_t{999}, N}) {
        index_t total = 0;
        for (const auto& R : rows) total += R.count_prefix(M);
        CHECK(total == M + 1);
    }
    for (index_t n = 0; n <= 1000; ++n) {
        int hits = 0;
        for (const auto& R : rows) hits += R.contains(n) ? 1 : 0;
        REQUIRE(hits == 1);
    }
}

TEST_CASE("sequence evaluation is deterministic and reentrant")
{
    std::mt19937_64 rng(3);
    auto x = SequenceView::scalar([](index_t n) { return std::sin(0.1 * static_cast<double>(n)); });
    auto a = x.sample(500);
    for (int t = 0; t < 1000; ++t) {
        index_t n = rng() % 501;
        CHECK(x.at(n) == a[n]);
    }
}
