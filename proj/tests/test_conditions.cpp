#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <summa/conditions.hpp>
#include <summa/zoo.hpp>

using namespace summa;

namespace {

const ConditionVerdict& get(const std::vector<ConditionVerdict>& cs, const std::string& id)
{
    for (const auto& c : cs)
        if (c.id == id) return c;
    FAIL("missing condition " << id);
    throw std::logic_error("unreachable");
}

Status status(const std::vector<ConditionVerdict>& cs, const std::string& id) { return get(cs, id).status; }

CheckOptions opts(index_t H = 1024)
{
    CheckOptions o;
    o.horizon = H;
    return o;
}

BlockMatrix column_zero(double (*f)(index_t))
{
    auto A = BlockMatrix::scalar([f](index_t n, index_t k) { return k == 0 ? f(n) : 0.0; });
    A.column_finite_bound = [](index_t) { return 0; };
    return A;
}

BlockMatrix lower_triangle(double (*f)(index_t))
{
    auto A = BlockMatrix::scalar([f](index_t n, index_t k) { return k <= n ? f(n) : 0.0; });
    A.column_finite_bound = [](index_t n) { return n; };
    return A;
}

const Block one(1, 1, 1.0);
const Block zero1(1, 1, 0.0);

} // namespace

TEST_CASE("check_S: Cesaro")
{
    auto s = check_S(cesaro().matrix, one, opts());
    for (const char* id : {"S1", "S2", "S3", "S3♯"}) CHECK(status(s, id) == Status::pass);
    CHECK(get(s, "S1").binding("k0") == "0");
    CHECK(get(s, "S1").value("sup") == 1.0);
    CHECK(get(s, "S2").value("row_sum_limit") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(get(s, "S3").binding("quantifier") == "sampled");
}

TEST_CASE("check_S: zero matrix")
{
    auto s = check_S(zero_matrix().matrix, zero1, opts());
    for (const char* id : {"S1", "S2", "S3"}) CHECK(status(s, id) == Status::pass);
    auto t = check_S(zero_matrix().matrix, one, opts());
    CHECK(status(t, "S2") == Status::fail);
}

TEST_CASE("check_S: constant column 0")
{
    auto s = check_S(column_zero([](index_t) { return 1.0; }), one, opts());
    CHECK(status(s, "S1") == Status::pass);
    CHECK(status(s, "S2") == Status::pass);
    CHECK(status(s, "S3") == Status::fail);
    CHECK(get(s, "S3").binding("witness_column") == "0");
}

TEST_CASE("check_S rejects tiny horizons")
{
    CHECK_THROWS_AS(check_S(cesaro().matrix, one, opts(8)), error);
}

TEST_CASE("Fail verdicts carry witnesses that recompute")
{
    const auto o = opts();
    auto A = ones().matrix;
    auto s = check_S(A, one, o);
    for (const auto& c : s) {
        CHECK(c.failed());
        CHECK(!c.binding("witness_row").empty());
    }
    {
        const auto& c = get(s, "S1");
        const index_t n = std::stoull(c.binding("witness_row"));
        const index_t k0 = std::stoull(c.binding("witness_k0"));
        CHECK(tail_norm(A, n, k0, o.horizon).upper == doctest::Approx(c.value("witness_value")).epsilon(1e-12));
    }
    {
        const auto& c = get(s, "S2");
        const index_t n = std::stoull(c.binding("witness_row"));
        const double dev = std::fabs(row_operator_sum(A, n, o.horizon).v[0] - 1.0);
        CHECK(dev == doctest::Approx(c.value("witness_value")).epsilon(1e-12));
    }
    {
        const auto& c = get(s, "S3♯");
        const index_t n = std::stoull(c.binding("witness_row"));
        const index_t k = std::stoull(c.binding("witness_column"));
        CHECK(op_norm_block(A.block(n, k)) == doctest::Approx(c.value("witness_value")).epsilon(1e-12));
    }
}

TEST_CASE("check_T: Cesaro over Fin")
{
    auto t = check_T(cesaro().matrix, one, IdealSpec::fin(), IdealSpec::fin(), opts());
    for (const auto& id : all_T_conditions()) CHECK_MESSAGE(status(t, id) == Status::pass, id);
    CHECK(get(t, "T6").binding("quantifier") == "sampled");
}

TEST_CASE("check_T: Cesaro over Density, squares vanish at rate n^-1/2")
{
    for (index_t H : {index_t{100}, index_t{1000}, index_t{10000}}) {
        auto o = opts(H);
        o.E_samples = {SetDescriptor::squares()};
        auto t = check_T(cesaro().matrix, one, IdealSpec::density(), IdealSpec::fin(), o, {"T6"});
        CHECK(status(t, "T6") == Status::pass);
        // Direct evaluation of sum_{k in squares, k <= n} 1/(n+1) over the rows [H/2, H].
        double oracle = 0.0;
        for (index_t n = H / 2; n <= H; ++n) {
            const auto r = static_cast<double>(static_cast<index_t>(std::sqrt(static_cast<double>(n))));
            oracle = std::max(oracle, (r + 1.0) / static_cast<double>(n + 1));
        }
        CHECK(get(t, "T6").value("limsup[squares]") == doctest::Approx(oracle).epsilon(1e-12));
        const double last = (std::floor(std::sqrt(static_cast<double>(H))) + 1.0) / static_cast<double>(H + 1);
        CHECK(last <= 1.1 / std::sqrt(static_cast<double>(H)));
    }
}

TEST_CASE("check_T accepts ASCII condition ids")
{
    auto t = check_T(cesaro().matrix, one, IdealSpec::fin(), IdealSpec::fin(), opts(), {"T1b", "T3n"});
    REQUIRE(t.size() == 2);
    CHECK(t[0].id == "T1♭");
    CHECK(t[1].id == "T3♮");
}

TEST_CASE("check_T: remark 2.2 truncation separates norm and pointwise column limits")
{
    auto M = remark22_truncated(32);
    auto o = opts(M.default_horizon);
    o.probes = M.probes;
    auto t = check_T(M.matrix, *M.row_sum_limit, IdealSpec::fin(), IdealSpec::fin(), o, {"T6♭"});
    CHECK(status(t, "T6♭") == Status::fail);
    CHECK(get(t, "T6♭").binding("witness_column") == "0");
}

TEST_CASE("check_T rejects samples without declared membership")
{
    auto o = opts();
    o.x_samples = {SequenceView::scalar([](index_t) { return 1.0; })};
    try {
        check_T(cesaro().matrix, one, IdealSpec::fin(), IdealSpec::fin(), o);
        FAIL("expected RejectedSample");
    } catch (const error& e) {
        CHECK(e.code() == errc::rejected_sample);
    }
}

TEST_CASE("check_F examples")
{
    auto f = check_F(cesaro().matrix, one, IdealSpec::fin(), IdealSpec::fin(), opts(), true);
    CHECK(status(f, "F1") == Status::pass);
    CHECK(get(f, "F1").value("sup") == 1.0);
    CHECK(status(f, "F4") == Status::pass);
    CHECK(get(f, "F4").value("row_sum_limit") == doctest::Approx(1.0));
    CHECK(status(f, "F6′") == Status::fail);

    auto sq = lower_triangle([](index_t n) { return 1.0 / ((n + 1.0) * (n + 1.0)); });
    auto g = check_F(sq, zero1, IdealSpec::fin(), IdealSpec::fin(), opts(), true);
    CHECK(status(g, "F6′") == Status::pass);
    CHECK(get(g, "F6′").value("limsup") == doctest::Approx(1.0 / 513.0));
}

TEST_CASE("F6 on a set implies T6 flat on its columns")
{
    auto o = opts();
    o.E_samples = {SetDescriptor::squares()};
    auto F = check_F(cesaro().matrix, one, IdealSpec::density(), IdealSpec::fin(), o);
    REQUIRE(status(F, "F6") == Status::pass);
    auto t = check_T(cesaro().matrix, one, IdealSpec::density(), IdealSpec::fin(), o, {"T6♭"});
    CHECK(status(t, "T6♭") == Status::pass);
}

TEST_CASE("check_R examples")
{
    Block three(1, 1, 3.0);
    auto r = check_R(diagonal(three).matrix, three, IdealSpec::fin(), IdealSpec::nu2(), opts());
    for (const char* id : {"R1", "R2", "R4", "R6"}) CHECK(status(r, id) == Status::pass);
    CHECK(get(r, "R1").binding("t0") == "0");
    CHECK(get(r, "R1").value("sup_off_Q") == 3.0);

    // Rows on Q_0 = {0} + odd numbers blow up; the other rows are e_n.
    auto blow = BlockMatrix::scalar([](index_t n, index_t k) {
        if (n == 0 || n % 2) return k <= n ? static_cast<double>(n + 1) : 0.0;
        return k == n ? 1.0 : 0.0;
    });
    blow.column_finite_bound = [](index_t n) { return n; };
    auto b = check_R(blow, one, IdealSpec::fin(), IdealSpec::nu2(), opts());
    CHECK(status(b, "R1") == Status::pass);
    CHECK(get(b, "R1").binding("t0") == "0");
    CHECK(status(b, "R2") == Status::pass);

    try {
        check_R(cesaro().matrix, one, IdealSpec::fin(), IdealSpec::density(), opts());
        FAIL("expected UnsupportedIdeal");
    } catch (const error& e) {
        CHECK(e.code() == errc::unsupported_ideal);
    }
}

TEST_CASE("check_M examples")
{
    auto r1 = rank_one(cesaro(), Block::identity(2));
    auto m = check_M(r1.matrix, Block::identity(2), IdealSpec::fin(), IdealSpec::fin(), opts());
    for (const char* id : {"M0", "M1", "M4", "M6"}) CHECK(status(m, id) == Status::pass);
    CHECK(get(m, "M4").value("kappa") == doctest::Approx(1.0));

    Block twoI = Block::identity(2);
    for (auto& v : twoI.v) v *= 2;
    CHECK(status(check_M(r1.matrix, twoI, IdealSpec::fin(), IdealSpec::fin(), opts()), "M4") == Status::fail);

    auto alt = rank_one(alternating(), Block::identity(2));
    auto a = check_M(alt.matrix, Block(2, 2), IdealSpec::fin(), IdealSpec::fin(), opts());
    CHECK(status(a, "M4") == Status::pass);
    CHECK(std::fabs(get(a, "M4").value("kappa")) <= 1.0 / 1024);
    CHECK(status(check_M(alt.matrix, Block::identity(2), IdealSpec::fin(), IdealSpec::fin(), opts()), "M4") == Status::fail);

    try {
        check_M(cesaro().matrix, one, IdealSpec::fin(), IdealSpec::fin(), opts());
        FAIL("expected NotRankOne");
    } catch (const error& e) {
        CHECK(e.code() == errc::not_rank_one);
    }
}

TEST_CASE("check_B examples")
{
    auto c0 = check_B(column_zero([](index_t n) { return 1.0 / (n + 1.0); }), IdealSpec::density(), IdealSpec::density(), opts());
    for (const char* id : {"B1", "B2", "B3"}) CHECK(status(c0, id) == Status::pass);
    CHECK(get(c0, "B1").binding("k1") == "1");
    CHECK(get(c0, "B2").value("sup") == 1.0);

    CHECK(status(check_B(cesaro().matrix, IdealSpec::density(), IdealSpec::density(), opts()), "B1") == Status::fail);

    auto z = check_B(zero_matrix().matrix, IdealSpec::density(), IdealSpec::fin(), opts());
    for (const char* id : {"B1", "B2", "B3"}) CHECK(status(z, id) == Status::pass);
    CHECK(get(z, "B1").binding("k1") == "0");

    CHECK_THROWS_AS(check_B(cesaro().matrix, IdealSpec::fin(), IdealSpec::fin(), opts()), error);
}

TEST_CASE("regular_verdict examples")
{
    auto a = regular_verdict(cesaro().matrix, one, IdealSpec::fin(), IdealSpec::fin(), TheoremMode::automatic, opts());
    CHECK(a.theorem == std::string(to_string(TheoremMode::silverman_toeplitz)));
    CHECK(a.overall == Overall::regular);

    auto b = regular_verdict(cesaro().matrix, one, IdealSpec::density(), IdealSpec::fin(), TheoremMode::automatic, opts());
    CHECK(b.overall == Overall::regular);
    CHECK(b.find("F1"));
    CHECK(b.find("F4"));
    CHECK(b.find("F6"));

    auto c = regular_verdict(identity().matrix, one, IdealSpec::fin(), IdealSpec::density(), TheoremMode::automatic, opts());
    CHECK(c.overall == Overall::regular);

    auto d = regular_verdict(ones().matrix, one, IdealSpec::fin(), IdealSpec::fin(), TheoremMode::automatic, opts());
    CHECK(d.overall == Overall::not_regular);
}

TEST_CASE("regular_verdict: overall agrees with the required conditions")
{
    for (const char* name : {"cesaro", "ones", "alternating", "euler(0.5)", "logdiag", "remark22_truncated(16)"}) {
        auto M = builtin_matrix(name);
        auto o = opts(M.default_horizon ? M.default_horizon : 512);
        o.probes = M.probes;
        const Block T = M.row_sum_limit ? *M.row_sum_limit : Block::identity(M.matrix.d());
        auto r = regular_verdict(M.matrix, T, IdealSpec::fin(), IdealSpec::fin(), TheoremMode::automatic, o);
        bool any_fail = false, all_pass = !r.conditions.empty();
        for (const auto& c : r.conditions) {
            any_fail = any_fail || c.failed();
            all_pass = all_pass && c.passed();
        }
        INFO(name);
        if (any_fail) CHECK(r.overall == Overall::not_regular);
        if (r.overall == Overall::regular) CHECK(all_pass);
    }
}

TEST_CASE("Regular verdicts are preserved behaviorally")
{
    auto C = cesaro();
    auto r = regular_verdict(C.matrix, one, IdealSpec::fin(), IdealSpec::fin(), TheoremMode::automatic, opts(4096));
    REQUIRE(r.overall == Overall::regular);
    std::vector<SequenceFamily> fams = {convergent_family(std::nullopt, "mixed", 1, 3)};
    auto b = empirical_regularity(C.matrix, one, IdealSpec::fin(), IdealSpec::fin(), fams, 100, 4096, 1e-2);
    CHECK(b.passed());
}

TEST_CASE("empirical_regularity examples")
{
    auto spiky = spiky_density_family(5.0, 100.0, SetDescriptor::squares());
    auto b = empirical_regularity(cesaro().matrix, one, IdealSpec::density(), IdealSpec::fin(), {spiky}, 4, 10000, 1e-2);
    CHECK(b.sequences > 0);

    std::vector<SequenceFamily> fams = {convergent_family(std::nullopt, "geometric", 1, 7)};
    auto id = empirical_regularity(identity().matrix, one, IdealSpec::fin(), IdealSpec::fin(), fams, 50, 2048, 1e-6);
    CHECK(id.passed());

    auto z = empirical_regularity(zero_matrix().matrix, zero1, IdealSpec::fin(), IdealSpec::fin(), fams, 50, 2048, 1e-12);
    CHECK(z.passed());
    CHECK(z.max_deviation == 0.0);
}

TEST_CASE("Condition checks are deterministic")
{
    auto a = check_T(cesaro().matrix, one, IdealSpec::density(), IdealSpec::density(), opts());
    auto b = check_T(cesaro().matrix, one, IdealSpec::density(), IdealSpec::density(), opts());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].status == b[i].status);
        CHECK(a[i].evidence == b[i].evidence);
        CHECK(a[i].bindings == b[i].bindings);
    }
}

TEST_CASE("S1 sup evidence is non-decreasing in horizon")
{
    auto A = euler(0.5).matrix;
    double prev = 0.0;
    for (index_t H : {index_t{64}, index_t{128}, index_t{256}, index_t{512}}) {
        auto s = check_S(A, one, opts(H));
        const double sup = get(s, "S1").value("sup");
        CHECK(sup >= prev - 1e-15);
        prev = sup;
    }
}

TEST_CASE("Fin: T1 and T4 passing implies T3 passing")
{
    for (const char* name : {"cesaro", "euler(0.5)", "riesz(1)", "alternating"}) {
        auto M = builtin_matrix(name);
        auto o = opts(512);
        o.audit = true;
        auto t = check_T(M.matrix, M.row_sum_limit ? *M.row_sum_limit : one, IdealSpec::fin(), IdealSpec::fin(), o,
                         {"T1", "T4", "T3"});
        INFO(name);
        if (status(t, "T1") == Status::pass && status(t, "T4") == Status::pass) CHECK(status(t, "T3") == Status::pass);
    }
}
