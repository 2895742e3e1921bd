#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "conditions.hpp"
#include "error.hpp"
#include "ideal_core.hpp"
#include "operator_matrix.hpp"
#include "pringsheim.hpp"
#include "report.hpp"
#include "witnesses.hpp"
#include "zoo.hpp"

namespace summa {

struct JobSpec {
    std::string task; // check, transform, witness, hahn-schur, pringsheim, report
    std::string matrix = "cesaro";
    std::string ideal_i = "fin";
    std::string ideal_j = "fin";
    std::optional<std::string> target;
    std::optional<index_t> horizon;
    double tol = 1e-6;
    std::size_t stages = 8;
    std::vector<std::string> samples; // set descriptors for E-type quantifiers
    std::vector<std::string> families;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out;
    std::string theorem = "auto";
    std::vector<std::string> conditions;
    std::string norm = "one"; // one | positive
    // transform
    index_t row = 0;
    std::string sequence = "coordinates";
    std::size_t member = 0;
    // witness
    bool unbounded = false;
    // pringsheim
    std::string double_matrix;
    std::string double_sequence;
    std::string grid; // CSV file, row m / column n
    double double_target = 1.0;
};

struct RunResult {
    int exit_code = 0;
    std::string output;
};

// Exit codes past the three verdict codes: 3 + the error category index, 16 for other failures.
inline int exit_code_for(errc c) { return 3 + static_cast<int>(c); }
constexpr int exit_internal = 16;

namespace detail {

inline int verdict_exit(Overall o)
{
    switch (o) {
    case Overall::regular: return 0;
    case Overall::not_regular: return 1;
    default: return 2;
    }
}

inline int status_exit(Status s)
{
    switch (s) {
    case Status::pass: return 0;
    case Status::fail: return 1;
    default: return 2;
    }
}

inline index_t job_horizon(const JobSpec& j, const NamedMatrix& M, index_t fallback)
{
    index_t H = j.horizon ? *j.horizon : (M.default_horizon ? M.default_horizon : fallback);
    if (H < 16) throw error(errc::insufficient_horizon, "horizon must be >= 16, got " + std::to_string(H));
    return H;
}

inline Block job_target(const JobSpec& j, const NamedMatrix& M)
{
    if (j.target) {
        Block T = parse_block(*j.target);
        if (T.rows != M.matrix.m() || T.cols != M.matrix.d())
            throw error(errc::parse_error, "target must be " + std::to_string(M.matrix.m()) + "x" + std::to_string(M.matrix.d()));
        return T;
    }
    if (M.row_sum_limit) return *M.row_sum_limit;
    if (M.matrix.m() == M.matrix.d()) return Block::identity(M.matrix.d());
    throw error(errc::parse_error, "matrix " + M.name + " needs an explicit --target");
}

inline CheckOptions job_options(const JobSpec& j, const NamedMatrix& M, index_t H)
{
    CheckOptions o;
    o.horizon = H;
    o.tol = j.tol;
    o.probes = M.probes;
    if (j.norm == "positive")
        o.ctx = NormContext::positive();
    else if (j.norm != "one")
        throw error(errc::unknown_name, "unknown norm context '" + j.norm + "'");
    for (const auto& s : j.samples) o.E_samples.push_back(literal::parse_descriptor(s));
    return o;
}

inline ojson header(const JobSpec& j, const NamedMatrix& M, index_t H)
{
    ojson h;
    h["task"] = j.task;
    h["matrix"] = M.name;
    h["note"] = M.note;
    if (M.K) h["K"] = *M.K;
    h["block"] = {M.matrix.m(), M.matrix.d()};
    h["horizon"] = H;
    h["tol"] = num(j.tol);
    return h;
}

inline std::vector<ConditionVerdict> keep(std::vector<ConditionVerdict> all, const std::vector<std::string>& ids)
{
    std::vector<ConditionVerdict> out;
    for (auto& c : all)
        if (std::find(ids.begin(), ids.end(), c.id) != ids.end()) out.push_back(std::move(c));
    return out;
}

// Runs the named conditions, grouped by the checker that owns them.
inline std::vector<ConditionVerdict> run_conditions(const std::vector<std::string>& raw, const BlockMatrix& A, const Block& T,
                                                    const IdealSpec& I, const IdealSpec& J, const CheckOptions& o)
{
    std::map<char, std::vector<std::string>> groups;
    std::vector<std::string> order;
    for (const auto& r : raw) {
        const std::string id = canonical_condition_id(r);
        if (id.empty()) continue;
        const char g = id[0];
        if (std::string("STFRMB").find(g) == std::string::npos) throw error(errc::unknown_name, "unknown condition '" + r + "'");
        if (g == 'T' && std::find(all_T_conditions().begin(), all_T_conditions().end(), id) == all_T_conditions().end())
            throw error(errc::unknown_name, "unknown condition '" + r + "'");
        groups[g].push_back(id);
        order.push_back(id);
    }
    std::vector<ConditionVerdict> found;
    auto take = [&](std::vector<ConditionVerdict> v) {
        for (auto& c : v) found.push_back(std::move(c));
    };
    for (const auto& [g, ids] : groups) {
        switch (g) {
        case 'S': take(keep(check_S(A, T, o), ids)); break;
        case 'T': take(check_T(A, T, I, J, o, ids)); break;
        case 'F': {
            bool prime = std::find(ids.begin(), ids.end(), "F6′") != ids.end();
            take(keep(check_F(A, T, I, J, o, prime), ids));
            break;
        }
        case 'R': take(keep(check_R(A, T, I, J, o), ids)); break;
        case 'M': take(keep(check_M(A, T, I, J, o), ids)); break;
        case 'B': take(keep(check_B(A, I, J, o), ids)); break;
        }
    }
    std::vector<ConditionVerdict> out;
    for (const auto& id : order) {
        for (auto& c : found)
            if (c.id == id) {
                out.push_back(c);
                break;
            }
        if (out.empty() || out.back().id != id) throw error(errc::unknown_name, "condition '" + id + "' is not produced by its checker");
    }
    return out;
}

inline Status combine_all(const std::vector<ConditionVerdict>& cs)
{
    bool fail = false, all_pass = !cs.empty();
    for (const auto& c : cs) {
        fail = fail || c.failed();
        all_pass = all_pass && c.passed();
    }
    return fail ? Status::fail : (all_pass ? Status::pass : Status::inconclusive);
}

inline SequenceView job_sequence(const JobSpec& j, std::size_t d)
{
    if (j.sequence == "coordinates")
        return SequenceView::vector(d, [d](index_t n, double* out) {
            std::fill(out, out + d, 0.0);
            if (n < d) out[n] = 1.0;
        });
    if (j.sequence == "ones") return SequenceView::vector(d, [d](index_t, double* out) { std::fill(out, out + d, 1.0); });
    auto f = builtin_family(j.sequence, j.seed);
    if (f.dim != d) throw error(errc::invalid_family, "family dimension " + std::to_string(f.dim) + " does not match blocks");
    if (f.size && j.member >= f.size) throw error(errc::invalid_family, "member index out of range");
    return f.member(j.member);
}

// Double-sequence grid: one row per m, comma-separated values for n = 0, 1, ...; outside the grid the last row/column repeats.
inline DoubleSequence read_grid(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw error(errc::parse_error, "cannot open grid file '" + path + "'");
    auto rows = std::make_shared<std::vector<std::vector<double>>>();
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty() || line[0] == '#') continue;
        std::vector<double> r;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) r.push_back(parse_number(trim(cell)));
        if (!rows->empty() && r.size() != rows->front().size()) throw error(errc::parse_error, "ragged grid in '" + path + "'");
        rows->push_back(std::move(r));
    }
    if (rows->empty() || rows->front().empty()) throw error(errc::parse_error, "empty grid in '" + path + "'");
    auto x = DoubleSequence::scalar([rows](index_t m, index_t n) {
        const auto& R = (*rows)[std::min<index_t>(m, rows->size() - 1)];
        return R[std::min<index_t>(n, R.size() - 1)];
    });
    x.name = path;
    return x;
}

inline std::optional<DoubleSequence> named_double_sequence(const std::string& name)
{
    for (auto& x : convergent_double_sequences())
        if (x.name == name) return x;
    for (auto& x : divergent_double_sequences())
        if (x.name == name) return x;
    return std::nullopt;
}

inline RunResult finish_json(const ojson& j, int code)
{
    return {code, j.dump(2) + "\n"};
}

// ------------------------------------------------------------------------------------------------

inline RunResult run_check(const JobSpec& j, bool audit)
{
    const auto M = builtin_matrix(j.matrix);
    const index_t H = job_horizon(j, M, 1024);
    const Block T = job_target(j, M);
    const auto I = literal::parse_ideal(j.ideal_i), J = literal::parse_ideal(j.ideal_j);
    auto o = job_options(j, M, H);
    o.audit = audit;
    ojson out = header(j, M, H);
    out["ideal_i"] = I.str();
    out["ideal_j"] = J.str();
    out["target"] = to_json(T);

    if (!j.conditions.empty() && !audit) {
        auto cs = run_conditions(j.conditions, M.matrix, T, I, J, o);
        const Status st = combine_all(cs);
        out["overall"] = to_string(st);
        out["conditions"] = to_json(cs);
        if (j.format == "csv") return {status_exit(st), conditions_csv(cs)};
        return finish_json(out, status_exit(st));
    }

    std::vector<SequenceFamily> fams;
    for (const auto& f : j.families) fams.push_back(builtin_family(f, j.seed));
    const std::size_t trials = fams.empty() ? 0 : (j.trials ? j.trials : 20);
    auto rep = regular_verdict(M.matrix, T, I, J, parse_theorem_mode(j.theorem), o, fams.empty() ? nullptr : &fams, trials);
    if (audit) {
        // Every applicable condition family, for the record.
        std::vector<ConditionVerdict> extra;
        auto add = [&](std::vector<ConditionVerdict> v) {
            for (auto& c : v)
                if (!rep.find(c.id)) extra.push_back(std::move(c));
        };
        if (I.is_fin() && J.is_fin()) add(check_S(M.matrix, T, o));
        add(check_T(M.matrix, T, I, J, o));
        add(check_F(M.matrix, T, I, J, o, true));
        out["audit"] = to_json(extra);
        ojson rows = ojson::array();
        const index_t step = std::max<index_t>(1, H / 256);
        for (index_t n = 0; n <= H; n += step) {
            auto tp = tail_profile(M.matrix, n, H, o.ctx);
            auto rs = row_operator_sum(M.matrix, n, H);
            double dev = 0.0;
            for (std::size_t i = 0; i < rs.v.size(); ++i) dev = std::max(dev, std::fabs(rs.v[i] - T.v[i]));
            rows.push_back({{"n", n}, {"row_norm_upper", num(tp.total_upper())}, {"row_norm_lower", num(tp.total_lower())},
                            {"row_sum_deviation", num(dev)}});
        }
        out["rows"] = rows;
        if (j.format == "csv") {
            std::ostringstream os;
            os << "n,row_norm_upper,row_norm_lower,row_sum_deviation\n";
            for (const auto& r : rows)
                os << r["n"].get<index_t>() << "," << csv_num(r["row_norm_upper"].get<double>()) << ","
                   << csv_num(r["row_norm_lower"].get<double>()) << "," << csv_num(r["row_sum_deviation"].get<double>()) << "\n";
            return {verdict_exit(rep.overall), os.str()};
        }
    }
    out["report"] = to_json(rep);
    if (j.format == "csv" && !audit) return {verdict_exit(rep.overall), conditions_csv(rep.conditions)};
    return finish_json(out, verdict_exit(rep.overall));
}

inline RunResult run_transform(const JobSpec& j)
{
    const auto M = builtin_matrix(j.matrix);
    const index_t H = job_horizon(j, M, 1024);
    auto x = job_sequence(j, M.matrix.d());
    auto r = transform(M.matrix, x, j.row, H);
    ojson out = header(j, M, H);
    out["row"] = j.row;
    out["sequence"] = j.sequence;
    out["value"] = nums(r.value);
    out["one_norm"] = num(norm1(r.value));
    out["sup_norm"] = num(norm_inf(r.value));
    out["remainder_bound"] = num(r.remainder_bound);
    out["certified"] = r.certified;
    const int code = r.certified ? 0 : 2;
    if (j.format == "csv") {
        std::ostringstream os;
        os << "i,value\n";
        for (std::size_t i = 0; i < r.value.size(); ++i) os << i << "," << csv_num(r.value[i]) << "\n";
        return {code, os.str()};
    }
    return finish_json(out, code);
}

inline RunResult run_witness(const JobSpec& j)
{
    const auto M = builtin_matrix(j.matrix);
    const index_t H = job_horizon(j, M, 4096);
    const auto J = literal::parse_ideal(j.ideal_j);
    SlidingHumpOptions o;
    o.horizon = H;
    o.stages = j.stages;
    if (j.norm == "positive") o.ctx = NormContext::positive();
    auto w = j.unbounded ? sliding_hump_unbounded(M.matrix, J, o) : sliding_hump(M.matrix, J, o);
    ojson out = header(j, M, H);
    out["ideal_j"] = J.str();
    out["kind"] = j.unbounded ? "unbounded" : "bounded";
    out["witness"] = to_json(w, false);
    const int code = w.degenerate ? 2 : 0;
    if (j.format == "csv") return {code, witness_csv(w)};
    return finish_json(out, code);
}

inline RunResult run_hahn_schur(const JobSpec& j)
{
    const auto M = builtin_matrix(j.matrix);
    const index_t H = job_horizon(j, M, 4096);
    const auto J = literal::parse_ideal(j.ideal_j);
    SlidingHumpOptions o;
    o.horizon = H;
    o.stages = j.stages;
    auto r = hahn_schur_witness(M.matrix, J, o);
    ojson out = header(j, M, H);
    out["ideal_j"] = J.str();
    out["result"] = to_json(r);
    if (j.format == "csv") return {0, witness_csv(r.witness)};
    return finish_json(out, 0);
}

inline RunResult run_pringsheim(const JobSpec& j)
{
    const index_t H = j.horizon ? *j.horizon : (j.double_matrix.empty() ? 256 : index_t{1} << 12);
    if (H < 16) throw error(errc::insufficient_horizon, "horizon must be >= 16, got " + std::to_string(H));
    ojson out;
    out["task"] = j.task;
    out["horizon"] = H;
    out["tol"] = num(j.tol);
    if (!j.double_matrix.empty()) {
        auto K = builtin_double_matrix(j.double_matrix);
        auto rep = rh_check(K, j.double_target, H, j.tol);
        out["double_matrix"] = K.name;
        out["report"] = to_json(rep);
        if (j.format == "csv") return {verdict_exit(rep.overall), conditions_csv(rep.conditions)};
        return finish_json(out, verdict_exit(rep.overall));
    }
    DoubleSequence x;
    if (!j.grid.empty())
        x = read_grid(j.grid);
    else if (auto named = named_double_sequence(j.double_sequence.empty() ? "corner_decay" : j.double_sequence))
        x = *named;
    else
        throw error(errc::unknown_name, "unknown double sequence '" + j.double_sequence + "'");
    auto p = p_lim(x, H, j.tol);
    const index_t Ht = std::max<index_t>(index_t{1} << 14, H);
    auto y = ideal_lim(IdealSpec::nu2(), transport(x), Ht, j.tol);
    out["sequence"] = x.name;
    out["p_lim"] = to_json(p);
    out["transported"] = to_json(y);
    out["transported"]["indexing"] = "t = h(m,n): shell min(m,n)=k onto nu2 level k";
    int code = 2;
    if (p.converged() && max_abs_diff(p.estimate, y.estimate) <= j.tol) code = 0;
    if (p.state == IdealLimitReport::status::no_limit_detected && y.state == IdealLimitReport::status::no_limit_detected) code = 1;
    if (j.format == "csv") {
        std::ostringstream os;
        os << "t,m,n";
        for (std::size_t c = 0; c < x.dim; ++c) os << ",y_" << c;
        os << "\n";
        const auto h = build_h();
        for (index_t t = 0; t <= std::min<index_t>(Ht, 4096); ++t) {
            auto [m, n] = h.inverse(t);
            os << t << "," << m << "," << n;
            for (double v : x.value(m, n)) os << "," << csv_num(v);
            os << "\n";
        }
        return {code, os.str()};
    }
    return finish_json(out, code);
}

} // namespace detail

inline RunResult run(const JobSpec& j)
{
    if (j.format != "json" && j.format != "csv") throw error(errc::parse_error, "format must be json or csv");
    if (j.task == "check") return detail::run_check(j, false);
    if (j.task == "report") return detail::run_check(j, true);
    if (j.task == "transform") return detail::run_transform(j);
    if (j.task == "witness") return detail::run_witness(j);
    if (j.task == "hahn-schur") return detail::run_hahn_schur(j);
    if (j.task == "pringsheim") return detail::run_pringsheim(j);
    throw error(errc::unknown_name, "unknown task '" + j.task + "'");
}

// Runs the job, mapping failures to the error exit codes, and writes the output to j.out when set.
inline RunResult run_guarded(const JobSpec& j, std::string* error_text = nullptr)
{
    RunResult r;
    try {
        r = run(j);
    } catch (const error& e) {
        if (error_text) *error_text = e.what();
        return {exit_code_for(e.code()), {}};
    } catch (const std::exception& e) {
        if (error_text) *error_text = e.what();
        return {exit_internal, {}};
    }
    if (!j.out.empty()) {
        std::ofstream f(j.out, std::ios::binary);
        if (!f) {
            if (error_text) *error_text = "cannot write '" + j.out + "'";
            return {exit_internal, {}};
        }
        f << r.output;
    }
    return r;
}

} // namespace summa
