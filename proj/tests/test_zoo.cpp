#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <summa/conditions.hpp>
#include <summa/zoo.hpp>

using namespace summa;

namespace {

double row_sum(const BlockMatrix& A, index_t n, index_t H)
{
    double s = 0.0;
    auto row = A.row(n, H);
    for (std::size_t p = 0; p < row->size(); ++p) s += row->scalar_at(p);
    return s;
}

} // namespace

TEST_CASE("cesaro entries")
{
    auto C = cesaro().matrix;
    for (index_t n = 0; n < 30; ++n)
        for (index_t k = 0; k < 40; ++k) CHECK(C.block(n, k).v[0] == (k <= n ? 1.0 / (n + 1.0) : 0.0));
}

TEST_CASE("remark22_truncated: unit column norms with pointwise vanishing")
{
    constexpr std::size_t K = 64;
    auto M = remark22_truncated(K);
    CHECK(M.K == K);
    for (index_t n = 0; n < K; ++n) {
        CHECK(op_norm_block(M.matrix.block(n, 0)) == 1.0);
        CHECK(M.matrix.block(n, 1).is_zero());
    }
    // Fixed x = e_j: A_{n,0} e_j = 0 once n > j.
    for (std::size_t j = 0; j < 8; ++j) {
        std::vector<double> e(K, 0.0);
        e[j] = 1.0;
        for (index_t n = j + 1; n < K; ++n) CHECK(norm1(M.matrix.block(n, 0).apply(e)) == 0.0);
    }
}

TEST_CASE("remark23_truncated: regular at fixed K, growth in K")
{
    double prev = 0.0;
    for (std::size_t K : {std::size_t{8}, std::size_t{32}}) {
        auto M = remark23_truncated(K);
        CheckOptions o;
        o.horizon = M.default_horizon;
        auto s = check_S(M.matrix, Block::identity(K), o);
        for (const auto& c : s)
            if (c.id != "S3♯") CHECK_MESSAGE(c.passed(), c.id);
        // Row 0 applied to the coordinate family x_k = e_k.
        std::vector<double> y(K, 0.0);
        for (index_t k = 0; k < K; ++k) {
            std::vector<double> e(K, 0.0);
            e[k] = 1.0;
            auto part = M.matrix.block(0, k).apply(e);
            for (std::size_t i = 0; i < K; ++i) y[i] += part[i];
        }
        const double growth = norm1(y);
        CHECK(growth >= K / 2.0);
        CHECK(growth > prev);
        prev = growth;
    }
}

TEST_CASE("diagonal row sums equal T")
{
    auto M = builtin_matrix("diagonal([[1,0],[0,2]])");
    for (index_t n : {index_t{0}, index_t{3}, index_t{50}}) CHECK(row_operator_sum(M.matrix, n, 128).v == std::vector<double>{1, 0, 0, 2});
}

TEST_CASE("random profiles match their descriptions")
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto b = random_matrix(seed, "banded");
        const double eta = 0.5 + 1.5 * detail::unit_hash(seed, ~0ULL, 1);
        for (index_t n = 1; n < 64; ++n) {
            double l1 = 0.0;
            auto row = b.matrix.row(n, 256);
            for (std::size_t p = 0; p < row->size(); ++p) {
                l1 += std::fabs(row->scalar_at(p));
                if (row->scalar_at(p) == 0.0) continue;
                CHECK(row->cols[p] >= n);
                CHECK(row->cols[p] < n + 7);
            }
            CHECK(l1 == doctest::Approx(eta * (1.0 - std::ldexp(1.0, -static_cast<int>(nu2(n)) - 1))).epsilon(1e-12));
        }
        auto p = random_matrix(seed, "positive");
        for (index_t n = 0; n < 32; ++n) CHECK(row_sum(p.matrix, n, 256) == doctest::Approx(1.0).epsilon(1e-12));
        auto d = random_matrix(seed, "decaying");
        for (index_t n = 0; n < 32; ++n) CHECK(row_abs_sum(d.matrix, n, 256).v[0] <= 1.0 / (n + 1.0) + 1e-15);
    }
    CHECK(random_matrix(3, "dense").matrix.block(10, 4).v == random_matrix(3, "dense").matrix.block(10, 4).v);
}

TEST_CASE("builtin_matrix names and errors")
{
    for (const char* name : {"cesaro", "alternating", "ones", "logdiag", "euler(0.5)", "riesz(2)", "identity(3)", "zero(2)",
                             "remark22_truncated(8)", "remark23_truncated(8)", "rank_one(cesaro,[[1,2],[3,4]])",
                             "random(7,dense)"})
        CHECK_NOTHROW(builtin_matrix(name));
    CHECK(builtin_matrix("identity(3)").matrix.d() == 3);
    try {
        builtin_matrix("hilbert");
        FAIL("expected UnknownName");
    } catch (const error& e) {
        CHECK(e.code() == errc::unknown_name);
    }
    try {
        builtin_matrix("euler(1,2)");
        FAIL("expected ParseError");
    } catch (const error& e) {
        CHECK(e.code() == errc::parse_error);
    }
    CHECK_THROWS_AS(random_matrix(1, "lumpy"), error);
}

TEST_CASE("family declared limits agree with ideal_lim")
{
    std::vector<std::pair<SequenceFamily, IdealSpec>> fams = {
        {convergent_family(2.5, "geometric"), IdealSpec::fin()},
        {convergent_family(-1.0, "power"), IdealSpec::fin()},
        {convergent_family(std::nullopt, "mixed", 2, 4), IdealSpec::fin()},
        {spiky_density_family(5.0, 100.0, SetDescriptor::squares()), IdealSpec::density()},
        {builtin_family("c00_supported(pairrow(2))"), IdealSpec::density()},
    };
    for (const auto& [f, I] : fams) {
        INFO(f.name);
        CHECK(f.ideal == I.str());
        const std::size_t count = f.size ? std::min<std::size_t>(f.size, 8) : 8;
        for (std::size_t i = 0; i < count; ++i) {
            auto x = f.member(i);
            REQUIRE(x.declared_limit);
            auto r = ideal_lim(I, x, index_t{1} << 14, 1e-2);
            CHECK(r.converged());
            for (std::size_t c = 0; c < f.dim; ++c) CHECK(std::fabs(r.estimate[c] - (*x.declared_limit)[c]) <= 1e-2);
        }
    }
}

TEST_CASE("spiky density family declares the base value")
{
    auto f = builtin_family("spiky_density(5,100,squares)");
    auto x = f.member(0);
    REQUIRE(x.declared_limit);
    CHECK((*x.declared_limit)[0] == 5.0);
    CHECK(x.value(16)[0] == 100.0);
    CHECK(x.value(17)[0] == 5.0);
}

TEST_CASE("families reject exceptional sets outside the ideal")
{
    try {
        spiky_density_family(5.0, 100.0, SetDescriptor::ap(0, 2));
        FAIL("expected InvalidFamily");
    } catch (const error& e) {
        CHECK(e.code() == errc::invalid_family);
    }
    CHECK_THROWS_AS(builtin_family("c00_supported(ap(1,3))"), error);
    CHECK_THROWS_AS(builtin_family("nonsense"), error);
    CHECK_THROWS_AS(convergent_family(1.0, "sluggish"), error);
}

TEST_CASE("unbounded I-convergent family is unbounded on its blow-up set")
{
    auto f = builtin_family("unbounded_Iconvergent(1,squares)");
    auto x = f.member(0);
    CHECK(!x.declared_bounded);
    double mx = 0.0;
    for (index_t k = 0; k < 4096; ++k) mx = std::max(mx, std::fabs(x.value(k)[0]));
    CHECK(mx > 10.0);
    auto r = ideal_lim(IdealSpec::density(), x, index_t{1} << 14, 1e-2);
    CHECK(r.converged());
    CHECK(r.value() == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("bounded divergent family has no Fin limit")
{
    auto f = bounded_divergent_family();
    auto x = f.member(0);
    CHECK(x.declared_bounded);
    CHECK(ideal_lim(IdealSpec::fin(), x, 4096).state == IdealLimitReport::status::no_limit_detected);
}

TEST_CASE("double matrix builders")
{
    CHECK_NOTHROW(builtin_double_matrix("double_cesaro"));
    CHECK_THROWS_AS(builtin_double_matrix("double_hilbert"), error);
    auto K = double_cesaro();
    double s = 0.0;
    for (auto [p, q] : K.support(3, 5)) s += K.a(3, 5, p, q);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(convergent_double_sequences().size() == 6);
}
