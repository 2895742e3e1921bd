#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <summa/cli.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace summa;

namespace {

JobSpec job(const std::string& task, const std::string& matrix = "cesaro")
{
    JobSpec j;
    j.task = task;
    j.matrix = matrix;
    return j;
}

ojson parse(const RunResult& r) { return ojson::parse(r.output); }

} // namespace

TEST_CASE("check cesaro over density and fin is Regular")
{
    auto j = job("check");
    j.ideal_i = "density";
    j.target = "1";
    std::string err;
    auto r = run_guarded(j, &err);
    CHECK(err.empty());
    CHECK(r.exit_code == 0);
    auto o = parse(r);
    CHECK(o["report"]["overall"] == "Regular");
    CHECK(o["report"]["conditions"].size() > 0);
}

TEST_CASE("check cesaro over fin is Regular")
{
    auto r = run_guarded(job("check"));
    CHECK(r.exit_code == 0);
    CHECK(parse(r)["report"]["overall"] == "Regular");
}

TEST_CASE("check remark22_truncated(64) for T6 flat fails at column 0")
{
    auto j = job("check", "remark22_truncated(64)");
    j.conditions = {"T6b"};
    auto r = run_guarded(j);
    CHECK(r.exit_code == 1);
    auto o = parse(r);
    REQUIRE(o["conditions"].size() == 1);
    CHECK(o["conditions"][0]["id"] == "T6♭");
    CHECK(o["conditions"][0]["status"] == "Fail");
    CHECK(o["conditions"][0]["bindings"]["witness_column"] == "0");
}

TEST_CASE("non-regular matrices exit 1, inconclusive checks exit 2")
{
    CHECK(run_guarded(job("check", "ones")).exit_code == 1);
    auto j = job("check");
    j.ideal_j = "generated[nu2levels]";
    j.conditions = {"T1b"};
    const int code = run_guarded(j).exit_code;
    CHECK((code == 0 || code == 2));
}

TEST_CASE("witness on cesaro under nu2 levels with six stages")
{
    auto j = job("witness");
    j.ideal_j = "generated[nu2levels]";
    j.stages = 6;
    j.horizon = index_t{1} << 22;
    j.format = "csv";
    auto r = run_guarded(j);
    CHECK(r.exit_code == 0);
    std::istringstream is(r.output);
    std::string line;
    std::getline(is, line);
    CHECK(line == "k_from,k_to,x_0,stage");
    long long last_stage = -2;
    index_t next = 0;
    while (std::getline(is, line)) {
        unsigned long long a = 0, b = 0;
        double x = 0;
        long long st = 0;
        REQUIRE(std::sscanf(line.c_str(), "%llu,%llu,%lf,%lld", &a, &b, &x, &st) == 4);
        CHECK(a == next);
        CHECK(b >= a);
        CHECK(std::fabs(x) == 1.0);
        next = b + 1;
        last_stage = st;
    }
    CHECK(last_stage == -1);
    CHECK(next == *j.horizon + 1);
}

TEST_CASE("witness JSON carries the stage log")
{
    auto j = job("witness", "alternating");
    j.ideal_j = "fin";
    j.stages = 4;
    auto r = run_guarded(j);
    CHECK(r.exit_code == 0);
    auto o = parse(r);
    CHECK(o["witness"]["stages"].size() == 5);
    CHECK(o["witness"]["completed"] == 4);
}

TEST_CASE("degenerate witness exits 2")
{
    auto j = job("witness", "zero");
    j.ideal_j = "fin";
    j.stages = 4;
    CHECK(run_guarded(j).exit_code == 2);
}

TEST_CASE("hahn-schur on alternating rows")
{
    auto j = job("hahn-schur", "alternating");
    j.ideal_j = "fin";
    j.stages = 4;
    auto r = run_guarded(j);
    CHECK(r.exit_code == 0);
    auto o = parse(r);
    CHECK(o["result"]["E"] == "ap(0,2)");
    CHECK(o["result"]["defect"].get<double>() == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("transform of the ones sequence under Cesaro")
{
    auto j = job("transform");
    j.sequence = "ones";
    j.row = 9;
    auto r = run_guarded(j);
    CHECK(r.exit_code == 0);
    auto o = parse(r);
    CHECK(o["value"][0].get<double>() == doctest::Approx(1.0));
    CHECK(o["certified"] == true);
}

TEST_CASE("pringsheim tasks")
{
    auto j = job("pringsheim");
    j.double_sequence = "corner_decay";
    j.tol = 1e-3;
    CHECK(run_guarded(j).exit_code == 0);
    j.double_sequence = "checkerboard";
    CHECK(run_guarded(j).exit_code == 1);
    auto k = job("pringsheim");
    k.double_matrix = "double_identity";
    CHECK(run_guarded(k).exit_code == 0);
    k.double_matrix = "double_ones";
    CHECK(run_guarded(k).exit_code == 1);
}

TEST_CASE("pringsheim reads a CSV grid")
{
    const auto path = std::filesystem::temp_directory_path() / "summa_grid_test.csv";
    {
        std::ofstream f(path);
        for (int m = 0; m < 300; ++m) {
            for (int n = 0; n < 300; ++n) f << (n ? "," : "") << 2.0 + std::pow(4.0, -std::min(m, n));
            f << "\n";
        }
    }
    auto j = job("pringsheim");
    j.grid = path.string();
    j.tol = 1e-3;
    auto r = run_guarded(j);
    std::filesystem::remove(path);
    CHECK(r.exit_code != exit_internal);
    auto o = parse(r);
    CHECK(o["p_lim"]["status"] == "Converged");
    CHECK(o["p_lim"]["estimate"][0].get<double>() == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("reports are byte-reproducible")
{
    auto j = job("report", "random(5,dense)");
    j.families = {"convergent(random,mixed)"};
    j.trials = 10;
    j.seed = 42;
    j.horizon = 256;
    auto a = run_guarded(j), b = run_guarded(j);
    CHECK(a.output == b.output);
    CHECK(a.exit_code == b.exit_code);
    j.format = "csv";
    CHECK(run_guarded(j).output == run_guarded(j).output);
}

TEST_CASE("output files match standard output")
{
    const auto path = std::filesystem::temp_directory_path() / "summa_out_test.json";
    auto j = job("check");
    auto a = run_guarded(j);
    j.out = path.string();
    auto b = run_guarded(j);
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    std::filesystem::remove(path);
    CHECK(ss.str() == a.output);
    CHECK(b.exit_code == a.exit_code);
}

TEST_CASE("execution errors exit above 2")
{
    std::string err;
    auto j = job("check", "hilbert");
    auto r = run_guarded(j, &err);
    CHECK(r.exit_code == exit_code_for(errc::unknown_name));
    CHECK(!err.empty());

    auto h = job("check");
    h.horizon = 8;
    CHECK(run_guarded(h).exit_code == exit_code_for(errc::insufficient_horizon));

    auto p = job("check");
    p.ideal_i = "density(";
    CHECK(run_guarded(p).exit_code == exit_code_for(errc::parse_error));

    auto t = job("nonsense");
    CHECK(run_guarded(t).exit_code == exit_code_for(errc::unknown_name));

    auto f = job("check");
    f.format = "xml";
    CHECK(run_guarded(f).exit_code == exit_code_for(errc::parse_error));

    for (int c = 0; c <= static_cast<int>(errc::parse_error); ++c) CHECK(exit_code_for(static_cast<errc>(c)) > 2);
}

TEST_CASE("exit codes follow the verdicts over the zoo")
{
    for (const char* name : {"cesaro", "ones", "alternating", "identity", "euler(0.5)", "logdiag", "random(2,positive)"}) {
        auto j = job("check", name);
        j.horizon = 512;
        auto r = run_guarded(j);
        INFO(name);
        REQUIRE(r.exit_code <= 2);
        const std::string overall = parse(r)["report"]["overall"];
        const int expected = overall == "Regular" ? 0 : overall == "NotRegular" ? 1 : 2;
        CHECK(r.exit_code == expected);
    }
}
