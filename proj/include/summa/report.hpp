#pragma once

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conditions.hpp"
#include "ideal_core.hpp"
#include "witnesses.hpp"

namespace summa {

using ojson = nlohmann::ordered_json;

namespace detail {

// Non-finite values become strings so the output stays valid JSON.
inline ojson num(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline ojson nums(const std::vector<double>& v)
{
    ojson a = ojson::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

inline ojson diag_json(const diagnostics& d)
{
    ojson o = ojson::object();
    for (const auto& [k, v] : d) o[k] = num(v);
    return o;
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

inline std::string csv_num(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace detail

// Blocks with more than 64 entries are listed sparsely as [i, j, value] triples.
inline ojson to_json(const Block& b)
{
    if (b.rows * b.cols > 64) {
        ojson nz = ojson::array();
        for (std::size_t i = 0; i < b.rows; ++i)
            for (std::size_t j = 0; j < b.cols; ++j)
                if (b(i, j) != 0.0) nz.push_back({i, j, detail::num(b(i, j))});
        return {{"rows", b.rows}, {"cols", b.cols}, {"nonzeros", nz}};
    }
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < b.rows; ++i) {
        ojson r = ojson::array();
        for (std::size_t j = 0; j < b.cols; ++j) r.push_back(detail::num(b(i, j)));
        rows.push_back(r);
    }
    return rows;
}

inline ojson to_json(const ConditionVerdict& c)
{
    ojson o;
    o["id"] = c.id;
    o["status"] = to_string(c.status);
    o["horizon"] = c.horizon;
    o["tol"] = detail::num(c.tol);
    o["evidence"] = detail::diag_json(c.evidence);
    ojson b = ojson::object();
    for (const auto& [k, v] : c.bindings) b[k] = v;
    o["bindings"] = b;
    return o;
}

inline ojson to_json(const std::vector<ConditionVerdict>& cs)
{
    ojson a = ojson::array();
    for (const auto& c : cs) a.push_back(to_json(c));
    return a;
}

inline ojson to_json(const BehavioralSummary& s)
{
    ojson o;
    o["passed"] = s.passed();
    o["sequences"] = s.sequences;
    o["skipped"] = s.skipped;
    o["rows_sampled"] = s.rows_sampled;
    o["max_deviation"] = detail::num(s.max_deviation);
    o["max_row_deviation"] = detail::num(s.max_row_deviation);
    o["tol"] = detail::num(s.tol);
    o["horizon"] = s.horizon;
    ojson f = ojson::array();
    for (const auto& x : s.failures) f.push_back({{"family", x.family}, {"member", x.member}, {"deviation", detail::num(x.deviation)}});
    o["failures"] = f;
    return o;
}

inline ojson to_json(const RegularityReport& r)
{
    ojson o;
    o["theorem"] = r.theorem;
    o["target_class"] = r.target_class;
    o["overall"] = to_string(r.overall);
    o["explanation"] = r.explanation;
    o["horizon"] = r.horizon;
    o["tol"] = detail::num(r.tol);
    o["implications"] = r.implications;
    o["conditions"] = to_json(r.conditions);
    if (r.behavioral) o["behavioral"] = to_json(*r.behavioral);
    return o;
}

inline ojson to_json(const IdealLimitReport& r)
{
    ojson o;
    o["status"] = to_string(r.state);
    o["estimate"] = detail::nums(r.estimate);
    o["lower"] = detail::nums(r.lower);
    o["upper"] = detail::nums(r.upper);
    o["horizon"] = r.horizon;
    o["tol"] = detail::num(r.tol);
    o["diagnostics"] = detail::diag_json(r.diag);
    return o;
}

inline ojson to_json(const HumpStage& s)
{
    ojson o;
    o["n"] = s.n;
    o["row"] = s.s;
    o["cut"] = s.m;
    o["row_norm"] = detail::num(s.row_norm);
    o["block_norm"] = detail::num(s.block_norm);
    o["block_value"] = detail::num(s.block_value);
    o["achieved"] = detail::num(s.achieved);
    o["bound"] = detail::num(s.bound);
    o["avoided_zone"] = s.avoided_zone ? ojson(*s.avoided_zone) : ojson(nullptr);
    o["rule"] = s.rule;
    return o;
}

inline ojson to_json(const Witness& w, bool include_values = true)
{
    ojson o;
    o["dim"] = w.dim;
    o["target"] = detail::num(w.target);
    o["target_lower"] = detail::num(w.target_lower);
    o["achieved"] = detail::num(w.achieved);
    o["degenerate"] = w.degenerate;
    o["completed"] = w.completed;
    o["horizon"] = w.horizon;
    o["estimate_horizon"] = w.estimate_horizon;
    o["support"] = w.support.str();
    o["rows"] = w.rows;
    ojson st = ojson::array();
    for (const auto& s : w.stages) st.push_back(to_json(s));
    o["stages"] = st;
    o["prefix"] = w.prefix();
    o["fill"] = detail::nums(w.fill);
    if (include_values) o["values"] = detail::nums(w.values);
    return o;
}

inline ojson to_json(const HahnSchurResult& r)
{
    ojson o;
    o["E"] = r.E.str();
    o["defect"] = detail::num(r.defect);
    o["eta0"] = detail::num(r.eta0);
    o["row_sum_limit"] = detail::num(r.row_sum_limit);
    o["unbounded"] = r.unbounded;
    o["witness"] = to_json(r.witness, false);
    return o;
}

// condition,status,kind,key,value
inline std::string conditions_csv(const std::vector<ConditionVerdict>& cs)
{
    std::ostringstream os;
    os << "condition,status,kind,key,value\n";
    for (const auto& c : cs) {
        const std::string head = detail::csv_field(c.id) + "," + to_string(c.status) + ",";
        if (c.evidence.empty() && c.bindings.empty()) os << head << ",,\n";
        for (const auto& [k, v] : c.evidence) os << head << "evidence," << detail::csv_field(k) << "," << detail::csv_num(v) << "\n";
        for (const auto& [k, v] : c.bindings) os << head << "binding," << detail::csv_field(k) << "," << detail::csv_field(v) << "\n";
    }
    return os.str();
}

// Run-length rows k_from,k_to,x_0,...,x_{d-1},stage: x_k is constant on [k_from, k_to] and the run lies in one hump
// block (stage -1 past the last cut). Indices past the prefix take the fill value.
inline std::string witness_csv(const Witness& w)
{
    std::ostringstream os;
    os << "k_from,k_to";
    for (std::size_t c = 0; c < w.dim; ++c) os << ",x_" << c;
    os << ",stage\n";
    auto emit = [&](index_t a, index_t b, const std::vector<double>& v, long long st) {
        os << a << "," << b;
        for (double x : v) os << "," << detail::csv_num(x);
        os << "," << st << "\n";
    };
    const index_t P = w.prefix();
    index_t a = 0;
    std::size_t next_stage = 0;
    std::vector<double> cur;
    long long cur_stage = 0;
    for (index_t k = 0; k < P; ++k) {
        while (next_stage < w.stages.size() && w.stages[next_stage].m < k) ++next_stage;
        const long long st = next_stage < w.stages.size() ? static_cast<long long>(w.stages[next_stage].n) : -1;
        auto v = w.at(k);
        if (k == 0) {
            cur = std::move(v);
            cur_stage = st;
            continue;
        }
        if (v != cur || st != cur_stage) {
            emit(a, k - 1, cur, cur_stage);
            a = k;
            cur = std::move(v);
            cur_stage = st;
        }
    }
    if (P > 0) emit(a, P - 1, cur, cur_stage);
    return os.str();
}

} // namespace summa
