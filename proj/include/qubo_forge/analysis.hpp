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

#ifndef QUBO_FORGE_ANALYSIS_HPP_INCLUDED
#define QUBO_FORGE_ANALYSIS_HPP_INCLUDED

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qubo_forge/compiler.hpp"
#include "qubo_forge/error.hpp"
#include "qubo_forge/problem.hpp"
#include "qubo_forge/solvers.hpp"

namespace qubo_forge {

struct ConstraintResult {
    std::string description;
    Hardness hardness = Hardness::hard;
    bool counted = true;  // false for weak constraints unless weak ones are included
    bool satisfied = true;
    double residual = 0.0;

    bool operator==(const ConstraintResult&) const = default;
};

namespace detail {

inline double lookup(const Decoded& values, const std::string& name) {
    auto it = values.find(name);
    if (it == values.end()) throw Error("decoded solution has no value for '" + name + "'");
    return it->second;
}

inline bool boolean_holds(const BooleanRelation& r, const Decoded& values) {
    const bool z = lookup(values, r.output) > 0.5;
    const bool x = lookup(values, r.inputs[0]) > 0.5;
    switch (r.kind) {
        case BooleanKind::not_: return z == !x;
        case BooleanKind::and_: return z == (x && lookup(values, r.inputs[1]) > 0.5);
        case BooleanKind::or_: return z == (x || lookup(values, r.inputs[1]) > 0.5);
        case BooleanKind::xor_: return z == (x != (lookup(values, r.inputs[1]) > 0.5));
    }
    return false;
}

}  // namespace detail

/**
 * Evaluates every problem constraint on decoded values. Comparisons use a
 * tolerance of half the slack precision; strict ones must clear the bound by
 * at least half a step. The residual is the size of the violation.
 */
inline std::vector<ConstraintResult> check_constraints(const Decoded& values, const Problem& problem,
                                                       bool include_weak = false, const CompileConfig& cfg = {}) {
    std::vector<ConstraintResult> out;
    for (const auto& decl : problem.constraints()) {
        ConstraintResult r;
        r.description = decl.to_string();
        r.hardness = decl.hardness;
        r.counted = decl.hardness == Hardness::hard || include_weak;
        if (decl.is_comparison()) {
            const Comparison& c = decl.comparison();
            Assignment a;
            for (const auto& v : c.lhs.variables()) a[v] = detail::lookup(values, v);
            const double lhs = c.lhs.evaluate(a);
            const double step = detail::slack_precision_for(problem, decl, cfg);
            const double tol = step / 2.0;
            double gap = 0.0;
            switch (c.op) {
                case CompareOp::eq: gap = std::abs(lhs - c.rhs); break;
                case CompareOp::ge: gap = c.rhs - lhs; break;
                case CompareOp::gt: gap = c.rhs + step - lhs; break;
                case CompareOp::le: gap = lhs - c.rhs; break;
                case CompareOp::lt: gap = lhs - (c.rhs - step); break;
            }
            r.residual = snap12(std::max(0.0, gap));
            r.satisfied = r.residual <= tol + 1e-12 * std::max(1.0, std::abs(c.rhs));
        } else {
            r.satisfied = detail::boolean_holds(decl.relation(), values);
            r.residual = r.satisfied ? 0.0 : 1.0;
        }
        out.push_back(std::move(r));
    }
    return out;
}

/// True when every encoding-induced constraint holds on the raw bits.
inline bool encodings_valid(const QuboModel& model, const std::vector<std::string>& names, const Bits& bits) {
    return decode_sample(model, names, bits).valid;
}

inline bool all_satisfied(const std::vector<ConstraintResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const ConstraintResult& r) { return !r.counted || r.satisfied; });
}

/// Value of each declared objective in its own sense, without weights.
inline std::vector<double> objective_values(const Decoded& values, const Problem& problem) {
    std::vector<double> out;
    for (const auto& o : problem.objectives()) {
        Assignment a;
        for (const auto& v : o.expr.variables()) a[v] = detail::lookup(values, v);
        out.push_back(snap12(o.expr.evaluate(a)));
    }
    return out;
}

/// Percentage of energies strictly below `val_ref`.
inline double p_range(const std::vector<double>& energies, double val_ref) {
    if (energies.empty()) return 0.0;
    const auto hits = std::count_if(energies.begin(), energies.end(), [&](double e) { return e < val_ref; });
    return 100.0 * static_cast<double>(hits) / static_cast<double>(energies.size());
}

/**
 * Time to reach the target with confidence p_conf, given the per-run time t_f
 * and the per-run success fraction. A success fraction of 0 gives infinity
 * and a fraction of 1 gives t_f.
 */
inline double tts(double t_f, double p_conf, double success_fraction) {
    if (!(p_conf > 0.0 && p_conf < 1.0)) throw Error("p_conf must lie in (0, 1)");
    if (success_fraction < 0.0 || success_fraction > 1.0) throw Error("success fraction must lie in [0, 1]");
    if (success_fraction == 0.0) return std::numeric_limits<double>::infinity();
    if (success_fraction == 1.0) return t_f;
    return t_f * std::log(1.0 - p_conf) / std::log(1.0 - success_fraction);
}

struct CumulativePoint {
    double energy = 0.0;
    double fraction = 0.0;

    bool operator==(const CumulativePoint&) const = default;
};

/// Sorted energies with the fraction of samples at or below each one;
/// energies within 1e-9 share one point.
inline std::vector<CumulativePoint> cumulative_distribution(std::vector<double> energies) {
    std::sort(energies.begin(), energies.end());
    std::vector<CumulativePoint> out;
    const auto n = static_cast<double>(energies.size());
    for (std::size_t k = 0; k < energies.size(); ++k) {
        const double fraction = static_cast<double>(k + 1) / n;
        if (!out.empty() && std::abs(energies[k] - out.back().energy) <= 1e-9)
            out.back().fraction = fraction;
        else
            out.push_back({energies[k], fraction});
    }
    return out;
}

struct AnalysisOptions {
    bool include_weak = false;
    std::optional<double> val_ref;  // defaults to just above the best energy
    double p_conf = 0.99;
    CompileConfig compile;  // slack policy used for tolerances
};

struct AnalysisReport {
    double valid_rate = 0.0;  // percent
    double p_range = 0.0;  // percent
    double val_ref = 0.0;
    double best_energy = 0.0;
    bool best_feasible = false;
    Decoded best_decoded;
    std::vector<double> objective_values;  // of the best sample
    std::vector<ConstraintResult> constraint_results;  // of the best sample
    std::vector<CumulativePoint> cumulative;
    std::optional<double> t_f;
    double p_conf = 0.99;
    std::optional<double> tts;

    bool operator==(const AnalysisReport&) const = default;
};

/// Whether sample k is feasible: valid encodings and all counted constraints met.
inline bool sample_feasible(const SolutionSet& s, std::size_t k, const QuboModel& model, const Problem& problem,
                            const AnalysisOptions& opt = {}) {
    if (!encodings_valid(model, s.variables, s.samples[k].bits)) return false;
    return all_satisfied(check_constraints(s.decoded[k], problem, opt.include_weak, opt.compile));
}

inline AnalysisReport analyze(const SolutionSet& s, const QuboModel& model, const Problem& problem,
                              const AnalysisOptions& opt = {}) {
    if (s.empty()) throw Error("cannot analyze an empty solution set");
    AnalysisReport r;
    const auto energies = s.energies();
    std::size_t valid = 0;
    for (std::size_t k = 0; k < s.samples.size(); ++k)
        if (sample_feasible(s, k, model, problem, opt)) ++valid;
    r.valid_rate = 100.0 * static_cast<double>(valid) / static_cast<double>(s.samples.size());

    const std::size_t best = s.best_index();
    r.best_energy = s.samples[best].energy;
    r.best_decoded = s.decoded[best];
    r.best_feasible = sample_feasible(s, best, model, problem, opt);
    r.objective_values = objective_values(r.best_decoded, problem);
    r.constraint_results = check_constraints(r.best_decoded, problem, opt.include_weak, opt.compile);
    r.val_ref = opt.val_ref ? *opt.val_ref : r.best_energy + 1e-9;
    r.p_range = p_range(energies, r.val_ref);
    r.cumulative = cumulative_distribution(energies);
    r.p_conf = opt.p_conf;
    if (!s.run_seconds.empty()) {
        double total = 0.0;
        for (double t : s.run_seconds) total += t;
        r.t_f = total / static_cast<double>(s.run_seconds.size());
        r.tts = tts(*r.t_f, opt.p_conf, r.p_range / 100.0);
    }
    return r;
}

}  // namespace qubo_forge

#endif  // QUBO_FORGE_ANALYSIS_HPP_INCLUDED
