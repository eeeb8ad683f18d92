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

#ifndef QUBO_FORGE_LAMBDA_UPDATE_HPP_INCLUDED
#define QUBO_FORGE_LAMBDA_UPDATE_HPP_INCLUDED

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qubo_forge/analysis.hpp"
#include "qubo_forge/compiler.hpp"
#include "qubo_forge/error.hpp"
#include "qubo_forge/problem.hpp"
#include "qubo_forge/solvers.hpp"

namespace qubo_forge {

enum class UpdateKind { none, sequential, scaled, binary_search };

inline std::string to_string(UpdateKind k) {
    switch (k) {
        case UpdateKind::none: return "none";
        case UpdateKind::sequential: return "sequential";
        case UpdateKind::scaled: return "scaled";
        case UpdateKind::binary_search: return "binary-search";
    }
    return "?";
}

inline UpdateKind update_kind_from_string(const std::string& s) {
    for (auto k : {UpdateKind::none, UpdateKind::sequential, UpdateKind::scaled, UpdateKind::binary_search})
        if (to_string(k) == s) return k;
    throw Error("unknown lambda update strategy '" + s + "'");
}

struct UpdateStrategy {
    UpdateKind kind = UpdateKind::sequential;
    double lambda_max = std::numeric_limits<double>::infinity();
    std::size_t max_trials = 5;
    bool update_all = false;  // raise every block, not only the violated ones

    void validate() const {
        if (max_trials < 1) throw Error("max_trials must be at least 1");
        if (!(lambda_max > 0.0)) throw Error("lambda_max must be positive");
        if ((kind == UpdateKind::scaled || kind == UpdateKind::binary_search) && !std::isfinite(lambda_max))
            throw Error(to_string(kind) + " update needs a finite lambda_max");
    }
};

/// Half-away-from-zero rounding.
inline double round_half_away(double x) { return std::round(x); }

/**
 * Next penalty weight. sequential: 10*lambda; scaled:
 * round(lambda * lambda_max^(1/(t-1))); binary-search:
 * round(sqrt(lambda * lambda_max)). The result never exceeds lambda_max and,
 * while lambda < lambda_max, is strictly larger than lambda (rounding that
 * would stall falls back to the unrounded value, then to lambda_max).
 */
inline double next_lambda(double lambda, const UpdateStrategy& s) {
    if (lambda >= s.lambda_max) return s.lambda_max;
    double raw = lambda;
    switch (s.kind) {
        case UpdateKind::none: return lambda;
        case UpdateKind::sequential: raw = 10.0 * lambda; break;
        case UpdateKind::scaled:
            raw = s.max_trials <= 1 ? s.lambda_max
                                    : lambda * std::pow(s.lambda_max, 1.0 / static_cast<double>(s.max_trials - 1));
            break;
        case UpdateKind::binary_search: raw = std::sqrt(lambda * s.lambda_max); break;
    }
    double next = s.kind == UpdateKind::sequential ? raw : round_half_away(raw);
    if (next <= lambda) next = raw;
    if (next <= lambda) next = s.lambda_max;
    return std::min(next, s.lambda_max);
}

struct LambdaUpdateResult {
    SolutionSet solution;
    QuboModel model;
    AnalysisReport report;
    std::vector<double> lambdas;  // final weight per penalty block
    std::vector<std::vector<double>> history;  // weights used in each trial
    std::size_t trials = 0;
    bool valid = false;
};

namespace detail {

// Penalty blocks whose constraint is broken by the best sample.
inline std::vector<bool> violated_blocks(const QuboModel& model, const Problem& problem, const SolutionSet& s,
                                         const CompileConfig& cfg) {
    const std::size_t best = s.best_index();
    const auto results = check_constraints(s.decoded[best], problem, true, cfg);
    const Assignment bits = to_assignment(s.variables, s.samples[best].bits);
    std::vector<bool> out(model.penalties.size(), false);
    for (std::size_t k = 0; k < model.penalties.size(); ++k) {
        const auto& block = model.penalties[k];
        if (block.hardness != Hardness::hard) continue;
        if (block.origin == PenaltyOrigin::user)
            out[k] = !results[block.source_constraint].satisfied;
        else
            out[k] = block.penalty.evaluate(bits) > 1e-9;
    }
    return out;
}

}  // namespace detail

/**
 * Compile, solve and check the best sample; while it violates a hard
 * constraint and trials remain, raise the weights of the violated blocks and
 * try again with the next seed block. Running out of trials is reported
 * through `valid`, not thrown.
 */
inline LambdaUpdateResult solve_with_lambda_update(const Problem& problem, const CompileConfig& config,
                                                   SolverKind solver, const SolverParams& params,
                                                   const UpdateStrategy& strategy,
                                                   const AnalysisOptions& analysis = {}) {
    strategy.validate();
    LambdaUpdateResult out;
    CompileConfig cfg = config;
    AnalysisOptions opt = analysis;
    opt.compile = config;
    const std::size_t trials = strategy.kind == UpdateKind::none ? 1 : strategy.max_trials;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        out.model = compile(problem, cfg);
        out.lambdas = out.model.lambdas();
        out.history.push_back(out.lambdas);
        SolverParams p = params;
        p.seed = params.seed + trial * std::max<std::size_t>(params.runs, 1);
        out.solution = solve(out.model, solver, p);
        out.report = analyze(out.solution, out.model, problem, opt);
        out.trials = trial + 1;
        out.valid = out.report.best_feasible;
        if (out.valid || trial + 1 == trials) break;

        const auto violated = detail::violated_blocks(out.model, problem, out.solution, config);
        std::vector<double> next = out.lambdas;
        bool changed = false;
        for (std::size_t k = 0; k < next.size(); ++k) {
            if (!strategy.update_all && !violated[k]) continue;
            const double v = next_lambda(next[k], strategy);
            changed = changed || v != next[k];
            next[k] = v;
        }
        if (!changed) break;  // every weight already at lambda_max
        cfg.lambda_method = LambdaMethod::manual;
        cfg.manual_lambdas = std::move(next);
    }
    return out;
}

}  // namespace qubo_forge

#endif  // QUBO_FORGE_LAMBDA_UPDATE_HPP_INCLUDED
