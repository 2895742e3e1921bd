#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "summa/cli.hpp"

namespace {

void common(CLI::App* sub, summa::JobSpec& j)
{
    sub->add_option("--matrix", j.matrix, "builtin matrix, e.g. cesaro, remark22_truncated(64), diagonal([[1,0],[0,2]])");
    sub->add_option("--horizon", j.horizon, "evaluation horizon (>= 16)");
    sub->add_option("--tol", j.tol, "tolerance");
    sub->add_option("--format", j.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", j.out, "write the output to this file");
    sub->add_option("--seed", j.seed, "seed for random sequence families");
    sub->add_option("--norm", j.norm, "norm context: one or positive")->check(CLI::IsMember({"one", "positive"}));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"summa: ideal regularity of matrices of linear operators"};
    app.require_subcommand(1);
    summa::JobSpec j;
    std::string witness_j = "generated[nu2levels]";

    for (const char* name : {"check", "report"}) {
        auto* sub = app.add_subcommand(name, std::string(name) == "check" ? "check regularity conditions"
                                                                          : "full audit report with row diagnostics");
        common(sub, j);
        sub->add_option("--ideal-i", j.ideal_i, "domain ideal: fin, density, summable, nu2, generated[...]");
        sub->add_option("--ideal-j", j.ideal_j, "target ideal");
        sub->add_option("--target", j.target, "limit operator T as a JSON matrix or a number");
        sub->add_option("--theorem", j.theorem, "characterization to apply (auto picks one)");
        sub->add_option("--conditions", j.conditions, "only these conditions, e.g. T6b S3s")->delimiter(',');
        sub->add_option("--samples", j.samples, "extra set descriptors for E quantifiers")->delimiter(';');
        sub->add_option("--families", j.families, "sequence families for the behavioural check")->delimiter(';');
        sub->add_option("--trials", j.trials, "members drawn per family");
    }
    {
        auto* sub = app.add_subcommand("transform", "evaluate (A x)_n");
        common(sub, j);
        sub->add_option("--row", j.row, "row index n");
        sub->add_option("--sequence", j.sequence, "coordinates, ones, or a family such as convergent(0.5,harmonic)");
        sub->add_option("--member", j.member, "family member index");
    }
    for (const char* name : {"witness", "hahn-schur"}) {
        auto* sub = app.add_subcommand(name, std::string(name) == "witness" ? "sliding-hump witness construction"
                                                                            : "Hahn-Schur set extraction");
        common(sub, j);
        sub->add_option("--ideal-j", witness_j, "countably generated target ideal");
        sub->add_option("--stages", j.stages, "number of hump stages");
        if (std::string(name) == "witness") sub->add_flag("--unbounded", j.unbounded, "unbounded-row-norm variant");
    }
    {
        auto* sub = app.add_subcommand("pringsheim", "double sequences and RH-regularity through the pairing h");
        sub->add_option("--horizon", j.horizon, "evaluation horizon (>= 16)");
        sub->add_option("--tol", j.tol, "tolerance");
        sub->add_option("--format", j.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", j.out, "write the output to this file");
        sub->add_option("--double-matrix", j.double_matrix, "double_cesaro, double_identity, double_ones");
        sub->add_option("--target", j.double_target, "scalar limit factor for rh checks");
        sub->add_option("--sequence", j.double_sequence, "builtin double sequence");
        sub->add_option("--grid", j.grid, "CSV grid file with rows m and columns n");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : summa::exit_code_for(summa::errc::parse_error);
    }
    j.task = app.get_subcommands().front()->get_name();
    if (j.task == "witness" || j.task == "hahn-schur") j.ideal_j = witness_j;

    std::string err;
    auto r = summa::run_guarded(j, &err);
    if (!err.empty()) std::cerr << "error: " << err << "\n";
    if (j.out.empty()) std::cout << r.output;
    return r.exit_code;
}
