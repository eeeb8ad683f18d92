// Copyright 2026 The qubo-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QUBO_FORGE_IO_HPP_INCLUDED
#define QUBO_FORGE_IO_HPP_INCLUDED

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qubo_forge/analysis.hpp"
#include "qubo_forge/compiler.hpp"
#include "qubo_forge/encoding.hpp"
#include "qubo_forge/error.hpp"
#include "qubo_forge/expression.hpp"
#include "qubo_forge/lambda_update.hpp"
#include "qubo_forge/problem.hpp"
#include "qubo_forge/solvers.hpp"

namespace qubo_forge {

using json = nlohmann::json;

inline constexpr const char* kProblemSchema = "qubo-forge-problem/1";
inline constexpr const char* kModelSchema = "qubo-forge-model/1";
inline constexpr const char* kSolutionSchema = "qubo-forge-solution/1";

namespace detail {

// Floats are written with 12 significant digits; non-finite values as null.
inline json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return snap12(v);
}

inline double number_or_inf(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

inline void check_schema(const json& j, const char* expected) {
    if (!j.is_object() || !j.contains("schema")) throw Error(std::string("missing schema, expected ") + expected);
    const auto found = j.at("schema").get<std::string>();
    if (found != expected) throw Error("unsupported schema version '" + found + "', expected " + expected);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path + "'");
}

inline json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error("invalid JSON in " + what + ": " + e.what());
    }
}

inline std::string hardness_name(Hardness h) { return h == Hardness::hard ? "hard" : "weak"; }

inline Hardness hardness_from(const std::string& s) {
    if (s == "hard") return Hardness::hard;
    if (s == "weak") return Hardness::weak;
    throw Error("unknown hardness '" + s + "'");
}

inline std::string kind_name(VariableKind k) {
    switch (k) {
        case VariableKind::binary: return "binary";
        case VariableKind::spin: return "spin";
        case VariableKind::discrete: return "discrete";
        case VariableKind::continuous: return "continuous";
    }
    return "?";
}

inline VariableKind kind_from(const std::string& s) {
    if (s == "binary") return VariableKind::binary;
    if (s == "spin") return VariableKind::spin;
    if (s == "discrete") return VariableKind::discrete;
    if (s == "continuous") return VariableKind::continuous;
    throw Error("unknown variable kind '" + s + "'");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Problem files

inline json to_json(const Problem& p) {
    json vars = json::array();
    for (const auto& v : p.variables()) {
        json j{{"name", v.name}, {"kind", detail::kind_name(v.kind)}};
        if (v.kind == VariableKind::discrete) {
            json levels = json::array();
            for (double l : v.levels) levels.push_back(detail::number(l));
            j["levels"] = levels;
        }
        if (v.kind == VariableKind::continuous) {
            j["lo"] = detail::number(v.lo);
            j["hi"] = detail::number(v.hi);
            j["precision"] = detail::number(v.precision);
            j["encoding"] = to_string(v.encoding.method);
            if (v.encoding.method == EncodingMethod::logarithmic) j["base"] = detail::number(v.encoding.base);
            if (v.encoding.method == EncodingMethod::bounded_coefficient)
                j["bound"] = detail::number(v.encoding.bound);
        }
        vars.push_back(j);
    }
    json objectives = json::array();
    for (const auto& o : p.objectives())
        objectives.push_back({{"expr", o.expr.to_string()},
                              {"sense", o.sense == Sense::minimize ? "minimize" : "maximize"},
                              {"weight", detail::number(o.weight)}});
    json constraints = json::array();
    for (const auto& c : p.constraints()) {
        json j;
        if (c.is_comparison()) {
            j["expr"] = c.comparison().to_string();
        } else {
            const auto& r = c.relation();
            j["relation"] = to_string(r.kind);
            j["output"] = r.output;
            j["inputs"] = r.inputs;
        }
        j["hardness"] = detail::hardness_name(c.hardness);
        if (c.slack_precision) j["slack_precision"] = detail::number(*c.slack_precision);
        constraints.push_back(j);
    }
    return {{"schema", kProblemSchema}, {"variables", vars}, {"objectives", objectives}, {"constraints", constraints}};
}

/**
 * Reads a problem document. A variable entry may carry "shape": [n] or
 * [n, m] to declare an array of that kind.
 */
inline Problem problem_from_json(const json& j) {
    detail::check_schema(j, kProblemSchema);
    Problem p;
    try {
        for (const auto& v : j.at("variables")) {
            VariableDecl d;
            d.name = v.at("name").get<std::string>();
            d.kind = detail::kind_from(v.value("kind", std::string("binary")));
            if (d.kind == VariableKind::discrete) d.levels = v.at("levels").get<std::vector<double>>();
            if (d.kind == VariableKind::continuous) {
                d.lo = v.at("lo").get<double>();
                d.hi = v.at("hi").get<double>();
                d.precision = v.at("precision").get<double>();
                d.encoding.method = encoding_method_from_string(v.value("encoding", std::string("logarithmic")));
                d.encoding.base = v.value("base", 2.0);
                d.encoding.bound = v.value("bound", 0.0);
            }
            if (v.contains("shape")) {
                p.add_array(d.name, v.at("shape").get<std::vector<std::size_t>>(), d);
                continue;
            }
            switch (d.kind) {
                case VariableKind::binary: p.add_binary(d.name); break;
                case VariableKind::spin: p.add_spin(d.name); break;
                case VariableKind::discrete: p.add_discrete(d.name, d.levels); break;
                case VariableKind::continuous: p.add_continuous(d.name, d.lo, d.hi, d.precision, d.encoding); break;
            }
        }
        for (const auto& o : j.at("objectives")) {
            const auto sense = o.value("sense", std::string("minimize"));
            if (sense != "minimize" && sense != "maximize") throw Error("unknown objective sense '" + sense + "'");
            p.add_objective(o.at("expr").get<std::string>(), sense == "minimize" ? Sense::minimize : Sense::maximize,
                            o.value("weight", 1.0));
        }
        if (j.contains("constraints")) {
            for (const auto& c : j.at("constraints")) {
                const Hardness h = detail::hardness_from(c.value("hardness", std::string("hard")));
                if (c.contains("relation")) {
                    p.add_boolean(boolean_kind_from_string(c.at("relation").get<std::string>()),
                                  c.at("output").get<std::string>(), c.at("inputs").get<std::vector<std::string>>(), h);
                } else {
                    std::optional<double> sp;
                    if (c.contains("slack_precision")) sp = c.at("slack_precision").get<double>();
                    p.add_constraint(c.at("expr").get<std::string>(), h, sp);
                }
            }
        }
    } catch (const json::exception& e) {
        throw Error(std::string("malformed problem document: ") + e.what());
    }
    return p;
}

inline Problem load_problem(const std::string& path) {
    return problem_from_json(detail::parse_json(detail::read_file(path), path));
}

inline void save_problem(const Problem& p, const std::string& path) { detail::write_file(path, to_json(p).dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// Optional "compile" and "solver" sections of a problem document

inline void apply_compile_section(const json& j, CompileConfig& cfg) {
    if (j.contains("lambda_method")) cfg.lambda_method = lambda_method_from_string(j.at("lambda_method"));
    if (j.contains("lambdas")) {
        cfg.lambda_method = LambdaMethod::manual;
        cfg.manual_lambdas = j.at("lambdas").get<std::vector<double>>();
    }
    if (j.contains("hard_multiplier")) cfg.hard_multiplier = j.at("hard_multiplier");
    if (j.contains("weak_multiplier")) cfg.weak_multiplier = j.at("weak_multiplier");
    if (j.contains("slack_precision")) {
        cfg.slack_policy = SlackPolicy::explicit_precision;
        cfg.slack_precision = j.at("slack_precision");
    }
}

inline void apply_solver_section(const json& j, SolverParams& p) {
    if (j.contains("runs")) p.runs = j.at("runs");
    if (j.contains("seed")) p.seed = j.at("seed");
    if (j.contains("sweeps")) p.sweeps = j.at("sweeps");
    if (j.contains("beta_start")) p.beta_start = j.at("beta_start");
    if (j.contains("beta_end")) p.beta_end = j.at("beta_end");
    if (j.contains("auto_scale_beta")) p.auto_scale_beta = j.at("auto_scale_beta");
    if (j.contains("layers")) p.layers = j.at("layers");
    if (j.contains("shots")) p.shots = j.at("shots");
    if (j.contains("max_optimizer_iters")) p.max_optimizer_iters = j.at("max_optimizer_iters");
    if (j.contains("initial_angles")) p.initial_angles = j.at("initial_angles").get<std::vector<double>>();
    if (j.contains("record_time")) p.record_time = j.at("record_time");
}

// ---------------------------------------------------------------------------
// Compiled models

namespace detail {

inline json plan_to_json(const EncodingPlan& plan) {
    json bins = json::array();
    for (const auto& b : plan.binaries) bins.push_back({b.name, number(b.weight)});
    json induced = json::array();
    for (const auto& c : plan.induced)
        induced.push_back({{"kind", c.kind == InducedKind::one_hot ? "one-hot" : "monotone"},
                           {"form", c.form.to_string()},
                           {"provenance", c.provenance}});
    return {{"source", plan.source}, {"method", plan.method},  {"offset", number(plan.offset)},
            {"precision", number(plan.precision)}, {"binaries", bins}, {"induced", induced}};
}

inline EncodingPlan plan_from_json(const json& j) {
    EncodingPlan plan;
    plan.source = j.at("source");
    plan.method = j.at("method");
    plan.offset = j.at("offset");
    plan.precision = j.at("precision");
    VariableSet names;
    for (const auto& b : j.at("binaries")) {
        plan.binaries.push_back({b.at(0).get<std::string>(), b.at(1).get<double>()});
        names.insert(plan.binaries.back().name);
    }
    for (const auto& c : j.at("induced")) {
        const auto kind = c.at("kind").get<std::string>() == "one-hot" ? InducedKind::one_hot : InducedKind::monotone;
        plan.induced.push_back({kind, parse_constraint(c.at("form").get<std::string>(), names), c.at("provenance")});
    }
    return plan;
}

}  // namespace detail

inline json to_json(const QuboModel& m) {
    json quadratic = json::array(), linear = json::array();
    for (const auto& [mono, c] : m.quadratic.terms()) {
        const auto& v = mono.variables();
        if (mono.degree() == 2) quadratic.push_back({v[0], v[1], detail::number(c)});
        if (mono.degree() == 1) linear.push_back({v[0], detail::number(c)});
    }
    json encodings = json::array();
    for (const auto& e : m.encodings) encodings.push_back(detail::plan_to_json(e));
    json penalties = json::array();
    for (const auto& p : m.penalties) {
        penalties.push_back({{"description", p.description},
                             {"origin", p.origin == PenaltyOrigin::user ? "user" : "encoding"},
                             {"source_constraint", p.source_constraint},
                             {"hardness", detail::hardness_name(p.hardness)},
                             {"lambda", detail::number(p.lambda)},
                             {"tolerance", detail::number(p.tolerance)},
                             {"satisfiable", p.satisfiable},
                             {"penalty", p.penalty.to_string()},
                             {"slack", p.slack_plan ? detail::plan_to_json(*p.slack_plan) : json(nullptr)}});
    }
    json aux = json::array();
    for (const auto& a : m.aux_registry)
        aux.push_back({{"first", a.first}, {"second", a.second}, {"aux", a.aux}, {"scale", detail::number(a.scale)}});
    return {{"schema", kModelSchema}, {"variables", m.binaries()}, {"offset", detail::number(m.offset)},
            {"linear", linear},       {"quadratic", quadratic},     {"cost", m.cost.to_string()},
            {"encodings", encodings}, {"penalties", penalties},     {"aux", aux},
            {"warnings", m.warnings}};
}

inline QuboModel model_from_json(const json& j) {
    detail::check_schema(j, kModelSchema);
    QuboModel m;
    try {
        const auto vars = j.at("variables").get<std::vector<std::string>>();
        const VariableSet known(vars.begin(), vars.end());
        m.offset = j.at("offset");
        for (const auto& t : j.at("linear")) m.quadratic.add_term(Monomial{t.at(0).get<std::string>()}, t.at(1));
        for (const auto& t : j.at("quadratic"))
            m.quadratic.add_term(Monomial{t.at(0).get<std::string>(), t.at(1).get<std::string>()}, t.at(2));
        m.cost = parse_expression(j.at("cost").get<std::string>(), known);
        for (const auto& e : j.at("encodings")) m.encodings.push_back(detail::plan_from_json(e));
        for (const auto& p : j.at("penalties")) {
            PenaltyBlock b;
            b.description = p.at("description");
            b.origin = p.at("origin").get<std::string>() == "user" ? PenaltyOrigin::user : PenaltyOrigin::encoding;
            b.source_constraint = p.at("source_constraint");
            b.hardness = detail::hardness_from(p.at("hardness"));
            b.lambda = p.at("lambda");
            b.tolerance = p.at("tolerance");
            b.satisfiable = p.at("satisfiable");
            b.penalty = parse_expression(p.at("penalty").get<std::string>(), known);
            if (!p.at("slack").is_null()) b.slack_plan = detail::plan_from_json(p.at("slack"));
            m.penalties.push_back(std::move(b));
        }
        for (const auto& a : j.at("aux")) m.aux_registry.push_back({a.at("first"), a.at("second"), a.at("aux"), a.at("scale")});
        m.warnings = j.at("warnings").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw Error(std::string("malformed model document: ") + e.what());
    }
    return m;
}

/**
 * Upper-triangular QUBO matrix, one "row col value" entry per line with
 * 0-based indices into the sorted binary list; linear terms sit on the
 * diagonal. Comment lines carry the offset and the index-to-name map.
 */
inline std::string to_qubo_text(const QuboModel& m) {
    const IndexedQubo q(m);
    std::ostringstream out;
    out << "# qubo-forge upper-triangular QUBO\n";
    out << "# offset " << format_number(q.offset()) << "\n";
    for (std::size_t i = 0; i < q.size(); ++i) out << "# var " << i << " " << q.names()[i] << "\n";
    std::map<std::pair<std::size_t, std::size_t>, double> entries;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q.linear()[i] != 0.0) entries[{i, i}] += q.linear()[i];
        for (const auto& n : q.neighbors(i))
            if (n.index > i) entries[{i, n.index}] += n.coupling;
    }
    for (const auto& [ij, v] : entries) out << ij.first << " " << ij.second << " " << format_number(v) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Solutions and reports

namespace detail {

inline std::string bit_string(const Bits& b) {
    std::string s;
    for (auto x : b) s.push_back(x ? '1' : '0');
    return s;
}

inline Bits bits_from(const std::string& s) {
    Bits b;
    for (char c : s) {
        if (c != '0' && c != '1') throw Error("invalid bit string '" + s + "'");
        b.push_back(c == '1');
    }
    return b;
}

inline json samples_json(const std::vector<Sample>& v) {
    json out = json::array();
    for (const auto& s : v) out.push_back({{"bits", bit_string(s.bits)}, {"energy", number(s.energy)}});
    return out;
}

inline std::vector<Sample> samples_from(const json& j) {
    std::vector<Sample> out;
    for (const auto& s : j) out.push_back({bits_from(s.at("bits")), number_or_inf(s.at("energy"))});
    return out;
}

inline json decoded_json(const Decoded& d) {
    json out = json::object();
    for (const auto& [k, v] : d) out[k] = number(v);
    return out;
}

inline Decoded decoded_from(const json& j) {
    Decoded out;
    for (const auto& [k, v] : j.items()) out[k] = v.get<double>();
    return out;
}

}  // namespace detail

/**
 * Solution document. Everything that depends on wall-clock time lives under
 * "timing", so two runs with the same seed differ only there.
 */
inline json to_json(const SolutionSet& s, const AnalysisReport* report = nullptr) {
    json decoded = json::array();
    for (const auto& d : s.decoded) decoded.push_back(detail::decoded_json(d));
    json j{{"schema", kSolutionSchema},
           {"solver", s.solver},
           {"variables", s.variables},
           {"samples", detail::samples_json(s.samples)},
           {"decoded", decoded},
           {"landscape", detail::samples_json(s.landscape)},
           {"warnings", s.warnings}};
    if (!s.empty()) {
        j["best"] = {{"bits", detail::bit_string(s.best().bits)},
                     {"energy", detail::number(s.best_energy())},
                     {"decoded", detail::decoded_json(s.best_decoded())}};
    }
    json timing{{"total_seconds", s.total_seconds}, {"run_seconds", s.run_seconds}};
    if (report) {
        json constraints = json::array();
        for (const auto& c : report->constraint_results)
            constraints.push_back({{"description", c.description},
                                   {"hardness", detail::hardness_name(c.hardness)},
                                   {"counted", c.counted},
                                   {"satisfied", c.satisfied},
                                   {"residual", detail::number(c.residual)}});
        json cumulative = json::array();
        for (const auto& p : report->cumulative) cumulative.push_back({detail::number(p.energy), detail::number(p.fraction)});
        json objectives = json::array();
        for (double v : report->objective_values) objectives.push_back(detail::number(v));
        j["report"] = {{"valid_rate", detail::number(report->valid_rate)},
                       {"p_range", detail::number(report->p_range)},
                       {"val_ref", detail::number(report->val_ref)},
                       {"best_energy", detail::number(report->best_energy)},
                       {"best_feasible", report->best_feasible},
                       {"best_decoded", detail::decoded_json(report->best_decoded)},
                       {"objective_values", objectives},
                       {"constraints", constraints},
                       {"cumulative", cumulative},
                       {"p_conf", detail::number(report->p_conf)}};
        if (report->t_f) {
            timing["t_f"] = detail::number(*report->t_f);
            timing["tts"] = report->tts ? detail::number(*report->tts) : json(nullptr);
        }
    }
    j["timing"] = timing;
    return j;
}

struct SolutionDocument {
    SolutionSet solution;
    std::optional<AnalysisReport> report;
};

inline SolutionDocument solution_from_json(const json& j) {
    detail::check_schema(j, kSolutionSchema);
    SolutionDocument doc;
    try {
        auto& s = doc.solution;
        s.solver = j.at("solver");
        s.variables = j.at("variables").get<std::vector<std::string>>();
        s.samples = detail::samples_from(j.at("samples"));
        for (const auto& d : j.at("decoded")) s.decoded.push_back(detail::decoded_from(d));
        s.landscape = detail::samples_from(j.at("landscape"));
        s.warnings = j.at("warnings").get<std::vector<std::string>>();
        const auto& timing = j.at("timing");
        s.total_seconds = timing.at("total_seconds");
        s.run_seconds = timing.at("run_seconds").get<std::vector<double>>();
        if (j.contains("report")) {
            const auto& r = j.at("report");
            AnalysisReport a;
            a.valid_rate = r.at("valid_rate");
            a.p_range = r.at("p_range");
            a.val_ref = r.at("val_ref");
            a.best_energy = r.at("best_energy");
            a.best_feasible = r.at("best_feasible");
            a.best_decoded = detail::decoded_from(r.at("best_decoded"));
            a.objective_values = r.at("objective_values").get<std::vector<double>>();
            for (const auto& c : r.at("constraints"))
                a.constraint_results.push_back({c.at("description"), detail::hardness_from(c.at("hardness")),
                                                c.at("counted"), c.at("satisfied"), c.at("residual")});
            for (const auto& p : r.at("cumulative")) a.cumulative.push_back({p.at(0), p.at(1)});
            a.p_conf = r.at("p_conf");
            if (timing.contains("t_f")) {
                a.t_f = timing.at("t_f").get<double>();
                a.tts = detail::number_or_inf(timing.at("tts"));
            }
            doc.report = std::move(a);
        }
    } catch (const json::exception& e) {
        throw Error(std::string("malformed solution document: ") + e.what());
    }
    return doc;
}

inline void save_report(const std::string& path, const SolutionSet& s, const AnalysisReport* report = nullptr) {
    detail::write_file(path, to_json(s, report).dump(2) + "\n");
}

inline SolutionDocument load_report(const std::string& path) {
    return solution_from_json(detail::parse_json(detail::read_file(path), path));
}

/// Plot data: "energy,cumulative_fraction" rows.
inline std::string cumulative_csv(const std::vector<CumulativePoint>& points) {
    std::ostringstream out;
    out << "energy,cumulative_fraction\n";
    for (const auto& p : points) out << format_number(p.energy) << "," << format_number(p.fraction) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Knapsack instances

struct KnapsackInstance {
    std::vector<double> profits;
    std::vector<double> weights;
    double capacity = 0.0;

    std::size_t size() const noexcept { return profits.size(); }
};

/// "N W" header followed by N lines "profit weight".
inline KnapsackInstance parse_knapsack(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&](std::vector<double>& fields) {
        while (std::getline(in, line)) {
            ++line_no;
            std::istringstream ls(line);
            fields.clear();
            std::string tok;
            while (ls >> tok) {
                std::size_t used = 0;
                double v = 0.0;
                try {
                    v = std::stod(tok, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != tok.size()) throw Error("knapsack line " + std::to_string(line_no) + ": bad number '" + tok + "'");
                fields.push_back(v);
            }
            if (!fields.empty()) return true;
        }
        return false;
    };
    std::vector<double> f;
    if (!next_line(f) || f.size() != 2) throw Error("knapsack header must be 'N_obj W_max'");
    if (f[0] < 1 || f[0] != std::floor(f[0])) throw Error("knapsack item count must be a positive integer");
    KnapsackInstance k;
    const auto n = static_cast<std::size_t>(f[0]);
    k.capacity = f[1];
    if (!(k.capacity > 0)) throw Error("knapsack capacity must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        if (!next_line(f)) throw Error("knapsack file has " + std::to_string(i) + " items, header says " + std::to_string(n));
        if (f.size() != 2) throw Error("knapsack line " + std::to_string(line_no) + ": expected 'profit weight'");
        if (!(f[1] > 0)) throw Error("knapsack line " + std::to_string(line_no) + ": weight must be positive");
        k.profits.push_back(f[0]);
        k.weights.push_back(f[1]);
    }
    if (next_line(f)) throw Error("knapsack file has more items than its header declares");
    return k;
}

inline KnapsackInstance load_knapsack(const std::string& path) { return parse_knapsack(detail::read_file(path)); }

/// Binary array obj[N]; maximize sum p_i obj_i subject to sum w_i obj_i <= W.
inline Problem knapsack_problem(const KnapsackInstance& k) {
    Problem p;
    const auto names = p.add_binary_array("obj", {k.size()});
    Polynomial value, weight;
    for (std::size_t i = 0; i < k.size(); ++i) {
        value.add_term(Monomial{names[i]}, k.profits[i]);
        weight.add_term(Monomial{names[i]}, k.weights[i]);
    }
    p.add_objective(value, Sense::maximize);
    p.add_constraint(Comparison{weight, CompareOp::le, k.capacity});
    return p;
}

inline std::string knapsack_text(const KnapsackInstance& k) {
    std::ostringstream out;
    out << k.size() << " " << format_number(k.capacity) << "\n";
    for (std::size_t i = 0; i < k.size(); ++i) out << format_number(k.profits[i]) << " " << format_number(k.weights[i]) << "\n";
    return out.str();
}

/// Random instance with integer profits and weights in [1, max_value] and
/// capacity at half the total weight.
inline KnapsackInstance random_knapsack(std::size_t n, std::uint64_t seed, int max_value = 20) {
    if (n < 1) throw Error("a knapsack needs at least one item");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(1, max_value);
    KnapsackInstance k;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        k.profits.push_back(pick(rng));
        k.weights.push_back(pick(rng));
        total += k.weights.back();
    }
    k.capacity = std::max(1.0, std::floor(total / 2.0));
    return k;
}

// ---------------------------------------------------------------------------
// Linear regression

struct RegressionDataset {
    std::vector<std::vector<double>> X;  // augmented: last column is 1
    std::vector<double> Y;
    std::vector<std::string> warnings;

    std::size_t features() const { return X.empty() ? 0 : X[0].size() - 1; }
};

/**
 * Reads a CSV of feature columns followed by one label column. A first row
 * that is not numeric is taken as a header. `features` selects the leading
 * columns to use; 0 means all but the label.
 */
inline RegressionDataset parse_regression_csv(const std::string& text, std::size_t features = 0) {
    RegressionDataset d;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0, width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ls, cell, ',')) {
            std::size_t used = 0;
            try {
                row.push_back(std::stod(cell, &used));
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
                if (used != cell.size()) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
            if (!numeric) break;
        }
        if (!numeric) {
            if (d.Y.empty() && width == 0) continue;  // header
            throw Error("regression CSV line " + std::to_string(line_no) + ": non-numeric cell");
        }
        if (width == 0) width = row.size();
        if (row.size() != width || width < 2)
            throw Error("regression CSV line " + std::to_string(line_no) + ": inconsistent column count");
        const std::size_t d_used = features == 0 ? width - 1 : features;
        if (d_used > width - 1) throw Error("regression CSV has fewer feature columns than requested");
        std::vector<double> x(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(d_used));
        x.push_back(1.0);
        d.X.push_back(std::move(x));
        d.Y.push_back(row.back());
    }
    if (d.X.empty()) throw Error("regression CSV has no data rows");
    if (d.X.size() < d.X[0].size()) d.warnings.push_back("fewer data points than regression weights; rank deficient");
    return d;
}

inline RegressionDataset load_regression_csv(const std::string& path, std::size_t features = 0) {
    return parse_regression_csv(detail::read_file(path), features);
}

/**
 * Continuous array w[d+1] in [minv, maxv] at `precision`, minimizing
 * w'(X'X)w - 2w'X'Y + Y'Y. Coefficients are kept to 12 significant digits so
 * the problem round-trips through its text form.
 */
inline Problem regression_problem(const RegressionDataset& data, double minv, double maxv, double precision,
                                  ContinuousEncoding encoding = {}) {
    Problem p;
    const std::size_t m = data.X[0].size();
    const auto w = p.add_continuous_array("w", {m}, minv, maxv, precision, encoding);
    std::vector<std::vector<double>> xtx(m, std::vector<double>(m, 0.0));
    std::vector<double> xty(m, 0.0);
    double yty = 0.0;
    for (std::size_t r = 0; r < data.X.size(); ++r) {
        for (std::size_t i = 0; i < m; ++i) {
            xty[i] += data.X[r][i] * data.Y[r];
            for (std::size_t j = 0; j < m; ++j) xtx[i][j] += data.X[r][i] * data.X[r][j];
        }
        yty += data.Y[r] * data.Y[r];
    }
    Polynomial e = Polynomial::constant(snap12(yty));
    for (std::size_t i = 0; i < m; ++i) {
        e.add_term(Monomial{w[i], w[i]}, snap12(xtx[i][i]));
        for (std::size_t j = i + 1; j < m; ++j) e.add_term(Monomial{w[i], w[j]}, snap12(2.0 * xtx[i][j]));
        e.add_term(Monomial{w[i]}, snap12(-2.0 * xty[i]));
    }
    p.add_objective(e);
    return p;
}

}  // namespace qubo_forge

#endif  // QUBO_FORGE_IO_HPP_INCLUDED
