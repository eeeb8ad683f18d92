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

#ifndef QUBO_FORGE_COMPILER_HPP_INCLUDED
#define QUBO_FORGE_COMPILER_HPP_INCLUDED

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qubo_forge/encoding.hpp"
#include "qubo_forge/error.hpp"
#include "qubo_forge/expression.hpp"
#include "qubo_forge/problem.hpp"

namespace qubo_forge {

enum class LambdaMethod { ub_positive, mqc, vlm, momc, moc, ub_naive, ub_posiform, manual };

inline std::string to_string(LambdaMethod m) {
    switch (m) {
        case LambdaMethod::ub_positive: return "ub-positive";
        case LambdaMethod::mqc: return "mqc";
        case LambdaMethod::vlm: return "vlm";
        case LambdaMethod::momc: return "momc";
        case LambdaMethod::moc: return "moc";
        case LambdaMethod::ub_naive: return "ub-naive";
        case LambdaMethod::ub_posiform: return "ub-posiform";
        case LambdaMethod::manual: return "manual";
    }
    return "?";
}

inline LambdaMethod lambda_method_from_string(const std::string& s) {
    for (auto m : {LambdaMethod::ub_positive, LambdaMethod::mqc, LambdaMethod::vlm, LambdaMethod::momc,
                   LambdaMethod::moc, LambdaMethod::ub_naive, LambdaMethod::ub_posiform, LambdaMethod::manual})
        if (to_string(m) == s) return m;
    throw Error("unknown lambda method '" + s + "'");
}

/// How the grid step of inequality slack variables is chosen.
enum class SlackPolicy { from_variables, explicit_precision, integer };

struct CompileConfig {
    LambdaMethod lambda_method = LambdaMethod::vlm;
    std::vector<double> manual_lambdas;  // one value for all blocks, or one per block
    double hard_multiplier = 1.0;
    double weak_multiplier = 0.3;
    SlackPolicy slack_policy = SlackPolicy::from_variables;
    double slack_precision = 1.0;  // used by SlackPolicy::explicit_precision
};

enum class PenaltyOrigin { user, encoding };

struct PenaltyBlock {
    std::size_t source_constraint = 0;  // index into problem constraints, or into induced constraints
    PenaltyOrigin origin = PenaltyOrigin::user;
    std::string description;
    Polynomial penalty;  // over binaries
    double lambda = 1.0;
    Hardness hardness = Hardness::hard;
    std::optional<EncodingPlan> slack_plan;
    double tolerance = 0.0;  // satisfaction tolerance on the decoded constraint
    bool satisfiable = true;
};

/// One pair-to-auxiliary substitution made by quadratization.
struct AuxRecord {
    std::string first;
    std::string second;
    std::string aux;
    double scale = 0.0;

    bool operator==(const AuxRecord&) const = default;
};

/// Solver-ready model: energy(b) = offset + quadratic(b), degree <= 2.
struct QuboModel {
    Polynomial quadratic;  // no constant term
    double offset = 0.0;
    Polynomial cost;  // composed objective before penalties, over binaries
    std::vector<EncodingPlan> encodings;
    std::vector<PenaltyBlock> penalties;
    std::vector<AuxRecord> aux_registry;
    std::vector<std::string> warnings;

    /// Every binary identifier of the model, sorted.
    std::vector<std::string> binaries() const {
        VariableSet all = quadratic.variables();
        for (const auto& e : encodings)
            for (const auto& b : e.binaries) all.insert(b.name);
        for (const auto& p : penalties)
            if (p.slack_plan)
                for (const auto& b : p.slack_plan->binaries) all.insert(b.name);
        for (const auto& a : aux_registry) all.insert(a.aux);
        return {all.begin(), all.end()};
    }

    double energy(const Assignment& bits) const { return offset + quadratic.evaluate(bits); }

    const EncodingPlan* plan_for(const std::string& source) const {
        for (const auto& e : encodings)
            if (e.source == source) return &e;
        return nullptr;
    }

    std::vector<double> lambdas() const {
        std::vector<double> out;
        for (const auto& p : penalties) out.push_back(p.lambda);
        return out;
    }
};

// ---------------------------------------------------------------------------
// Cost composition and penalty functions

inline std::map<std::string, Polynomial> affine_map(const std::vector<EncodingPlan>& plans) {
    std::map<std::string, Polynomial> out;
    for (const auto& p : plans) out.emplace(p.source, p.affine());
    return out;
}

inline VariableSet binary_set(const std::vector<EncodingPlan>& plans) {
    VariableSet out;
    for (const auto& p : plans)
        for (const auto& b : p.binaries) out.insert(b.name);
    return out;
}

/// Weighted sum of the objectives over binaries; maximize terms are negated.
inline Polynomial compose_cost(const std::vector<ObjectiveTerm>& objectives, const std::vector<EncodingPlan>& plans) {
    const auto subs = affine_map(plans);
    const auto bins = binary_set(plans);
    Polynomial total;
    for (const auto& o : objectives) {
        const double sign = o.sense == Sense::maximize ? -1.0 : 1.0;
        total += o.expr.substitute(subs).reduce_binary_idempotence(bins).scaled(sign * o.weight);
    }
    return total;
}

/// (lhs - rhs)^2 over 0/1 variables; zero exactly where the equality holds.
inline Polynomial equality_penalty(const Comparison& c) {
    Polynomial diff = c.lhs - Polynomial::constant(c.rhs);
    return (diff * diff).multilinear();
}

struct InequalityPenalty {
    Polynomial penalty;
    std::optional<EncodingPlan> slack;
    bool satisfiable = true;
};

/**
 * Turns `lhs >= rhs` (or <=, >, <) over binaries into (lhs + s - rhs)^2 with
 * a logarithmically encoded slack s. For >= the slack spans
 * [-(max(lhs) - rhs), 0]; for <= it spans [0, rhs - min(lhs)]. Strict
 * comparisons are tightened by one slack step. `lhs_range` is the range of the
 * left side over the declared (not encoded) variables.
 */
inline InequalityPenalty inequality_to_penalty(const Comparison& c, Interval lhs_range, double precision,
                                               const std::string& slack_name) {
    if (c.op == CompareOp::eq) throw Error("inequality_to_penalty called on an equality");
    if (!(precision > 0.0)) throw Error("slack precision must be positive");
    const bool greater = c.op == CompareOp::ge || c.op == CompareOp::gt;
    double rhs = c.rhs;
    if (c.op == CompareOp::gt) rhs += precision;
    if (c.op == CompareOp::lt) rhs -= precision;
    rhs = snap12(rhs);

    const double span = snap12(greater ? lhs_range.hi - rhs : rhs - lhs_range.lo);
    InequalityPenalty out;
    out.satisfiable = span >= -1e-9;
    Polynomial diff = c.lhs - Polynomial::constant(rhs);
    if (span > 1e-9) {
        const double lo = greater ? -span : 0.0;
        const double hi = greater ? 0.0 : span;
        const double step = std::min(precision, span);
        out.slack = encode_continuous(slack_name, lo, hi, step);
        diff += out.slack->affine();
    }
    out.penalty = (diff * diff).multilinear();
    return out;
}

/// Quadratic gate penalties: zero on rows consistent with the truth table,
/// at least one elsewhere. XOR needs the extra binary `aux`.
inline Polynomial boolean_penalty(BooleanKind kind, const std::string& z, const std::vector<std::string>& in,
                                  const std::string& aux = {}) {
    const auto v = [](const std::string& n) { return Polynomial::variable(n); };
    const std::size_t arity = kind == BooleanKind::not_ ? 1 : 2;
    if (in.size() != arity) throw Error(to_string(kind) + " takes " + std::to_string(arity) + " input(s)");
    switch (kind) {
        case BooleanKind::not_: {
            Polynomial e = v(in[0]) + v(z) - Polynomial::constant(1.0);
            return (e * e).multilinear();
        }
        case BooleanKind::and_:
            return v(in[0]) * v(in[1]) - 2.0 * (v(in[0]) + v(in[1])) * v(z) + 3.0 * v(z);
        case BooleanKind::or_:
            return v(in[0]) * v(in[1]) + v(in[0]) + v(in[1]) - 2.0 * v(in[0]) * v(z) -
                   2.0 * v(in[1]) * v(z) + v(z);
        case BooleanKind::xor_: {
            if (aux.empty()) throw Error("xor penalty needs an auxiliary binary");
            Polynomial e = v(in[0]) + v(in[1]) + v(z) - 2.0 * v(aux);
            return (e * e).multilinear();
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Penalty weight estimation

/// Largest increase (`up`) and decrease (`down`) of p caused by flipping
/// `var` alone, bounded term by term.
struct FlipBounds {
    double up = 0.0;
    double down = 0.0;
};

inline FlipBounds flip_bounds(const Polynomial& p, const std::string& var) {
    FlipBounds b;
    for (const auto& [m, c] : p.terms()) {
        if (!m.contains(var)) continue;
        if (m.degree() == 1) {
            b.up += c;
            b.down -= c;
        } else {
            b.up += std::max(c, 0.0);
            b.down += std::max(-c, 0.0);
        }
    }
    return b;
}

namespace detail {

inline double objective_flip(const Polynomial& p, const std::string& var) {
    const auto b = flip_bounds(p, var);
    return std::max(b.up, b.down);
}

// Smallest of the two one-flip bounds: how little the penalty is guaranteed
// to move when `var` flips.
inline double penalty_flip(const Polynomial& p, const std::string& var) {
    const auto b = flip_bounds(p, var);
    return std::min(b.up, b.down);
}

inline double vlm(const Polynomial& objective) {
    double best = 0.0;
    for (const auto& v : objective.variables()) best = std::max(best, objective_flip(objective, v));
    return best;
}

}  // namespace detail

/**
 * Penalty weight for one constraint. `penalty` is only consulted by the
 * per-constraint methods (momc, moc). The result is not yet scaled by the
 * hard/weak multipliers.
 */
inline double estimate_lambda(LambdaMethod method, const Polynomial& objective, const Polynomial& penalty = {}) {
    const double offset = objective.constant_term();
    switch (method) {
        case LambdaMethod::ub_positive: {
            double sum = 0.0;
            for (const auto& [m, c] : objective.terms()) {
                if (c < 0) throw Error("ub-positive needs an objective with non-negative coefficients");
                sum += c;
            }
            return sum;
        }
        case LambdaMethod::mqc: {
            double best = 0.0;
            for (const auto& [m, c] : objective.terms())
                if (!m.is_constant()) best = std::max(best, std::abs(c));
            return best + std::abs(offset);
        }
        case LambdaMethod::vlm: return detail::vlm(objective);
        case LambdaMethod::momc: {
            double floor = std::numeric_limits<double>::infinity();
            for (const auto& v : penalty.variables()) {
                const double d = detail::penalty_flip(penalty, v);
                if (d > 1e-12) floor = std::min(floor, d);
            }
            const double top = detail::vlm(objective);
            return std::isfinite(floor) ? top / floor : top;
        }
        case LambdaMethod::moc: {
            double best = 0.0;
            for (const auto& v : penalty.variables()) {
                const double d = detail::penalty_flip(penalty, v);
                if (d <= 1e-12) continue;
                best = std::max(best, detail::objective_flip(objective, v) / d);
            }
            return best;
        }
        case LambdaMethod::ub_naive: {
            double pos = 0.0, neg = 0.0;
            for (const auto& [m, c] : objective.terms()) {
                if (m.is_constant()) continue;
                (c > 0 ? pos : neg) += c;
            }
            return pos - neg;
        }
        case LambdaMethod::ub_posiform: {
            // Each non-linear term is shared evenly among its variables; the
            // upper bound keeps the positive shares, the lower bound the negative.
            std::map<std::string, double> up, down;
            for (const auto& [m, c] : objective.terms()) {
                if (m.is_constant()) continue;
                const auto support = m.support();
                const double share = c / static_cast<double>(support.size());
                for (const auto& v : support) {
                    if (support.size() == 1) {
                        up[v] += c;
                        down[v] += c;
                    } else {
                        up[v] += std::max(share, 0.0);
                        down[v] += std::min(share, 0.0);
                    }
                }
            }
            double ub = offset, lb = offset;
            for (const auto& [v, s] : up) ub += std::max(s, 0.0);
            for (const auto& [v, s] : down) lb += std::min(s, 0.0);
            return ub - lb;
        }
        case LambdaMethod::manual: throw Error("manual lambdas are not estimated");
    }
    return 1.0;
}

// ---------------------------------------------------------------------------
// Quadratization

struct Quadratized {
    Polynomial polynomial;
    std::vector<AuxRecord> records;
};

/**
 * Rosenberg reduction of a multilinear polynomial to degree two. Repeatedly
 * picks the variable pair occurring in the most degree >= 3 monomials (ties
 * broken lexicographically), replaces it by a fresh binary y, and adds
 * M*(xi*xj - 2*xi*y - 2*xj*y + 3*y). Without an explicit `scale`, M is twice
 * the absolute coefficient sum of the monomials being rewritten.
 */
inline Quadratized quadratize(const Polynomial& p, std::optional<double> scale = std::nullopt,
                              const std::string& aux_prefix = "__aux", std::size_t first_index = 0) {
    Quadratized out{p.multilinear(), {}};
    std::size_t next = first_index;
    for (;;) {
        std::map<std::pair<std::string, std::string>, std::size_t> counts;
        for (const auto& [m, c] : out.polynomial.terms()) {
            if (m.degree() < 3) continue;
            const auto& v = m.variables();
            for (std::size_t i = 0; i < v.size(); ++i)
                for (std::size_t j = i + 1; j < v.size(); ++j) ++counts[{v[i], v[j]}];
        }
        if (counts.empty()) break;
        auto chosen = counts.begin();  // map order gives the lexicographic tie-break
        for (auto it = counts.begin(); it != counts.end(); ++it)
            if (it->second > chosen->second) chosen = it;
        const auto [first, second] = chosen->first;
        const std::string aux = aux_prefix + "#" + std::to_string(next++);

        Polynomial rewritten;
        double magnitude = 0.0;
        for (const auto& [m, c] : out.polynomial.terms()) {
            if (m.degree() >= 3 && m.contains(first) && m.contains(second)) {
                magnitude += std::abs(c);
                rewritten.add_term(m.without(first).without(second) * Monomial{aux}, c);
            } else {
                rewritten.add_term(m, c);
            }
        }
        const double M = scale ? *scale : 2.0 * magnitude;
        const auto x = Polynomial::variable(first);
        const auto y = Polynomial::variable(second);
        const auto a = Polynomial::variable(aux);
        rewritten += (x * y - 2.0 * x * a - 2.0 * y * a + 3.0 * a).scaled(M);
        out.polynomial = std::move(rewritten);
        out.records.push_back({first, second, aux, M});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Compilation

namespace detail {

inline double slack_precision_for(const Problem& problem, const ConstraintDecl& decl, const CompileConfig& cfg) {
    if (decl.slack_precision) return *decl.slack_precision;
    switch (cfg.slack_policy) {
        case SlackPolicy::explicit_precision: return cfg.slack_precision;
        case SlackPolicy::integer: return 1.0;
        case SlackPolicy::from_variables: break;
    }
    const Comparison& c = decl.comparison();
    double best = std::numeric_limits<double>::infinity();
    bool integral = c.rhs == std::floor(c.rhs);
    for (const auto& name : c.lhs.variables()) {
        const VariableDecl* v = problem.find(name);
        if (v->kind == VariableKind::continuous) best = std::min(best, v->precision);
        integral = integral && v->is_integral();
    }
    if (std::isfinite(best)) return best;
    for (const auto& [m, coeff] : c.lhs.terms()) integral = integral && coeff == std::floor(coeff);
    if (integral) return 1.0;
    // Non-integral data without continuous variables: smallest linear step.
    double step = 1.0;
    for (const auto& [m, coeff] : c.lhs.terms()) {
        if (m.degree() != 1) continue;
        const VariableDecl* v = problem.find(m.variables()[0]);
        double grid = 1.0;
        if (v->kind == VariableKind::discrete && v->levels.size() > 1) {
            auto levels = v->levels;
            std::sort(levels.begin(), levels.end());
            grid = levels[1] - levels[0];
            for (std::size_t i = 2; i < levels.size(); ++i) grid = std::min(grid, levels[i] - levels[i - 1]);
        }
        step = std::min(step, std::abs(coeff) * grid);
    }
    const double frac = c.rhs - std::floor(c.rhs);
    if (frac > 1e-12) step = std::min(step, frac);
    return step;
}

}  // namespace detail

/**
 * Compiles a problem into a QUBO: encodes every variable, composes the cost,
 * builds one penalty block per user constraint followed by one per
 * encoding-induced constraint, weights them, and quadratizes the sum.
 */
inline QuboModel compile(const Problem& problem, const CompileConfig& cfg = {}) {
    problem.validate();
    if (!(cfg.hard_multiplier > 0.0) || !(cfg.weak_multiplier > 0.0))
        throw Error("lambda multipliers must be positive");

    QuboModel model;
    for (const auto& v : problem.variables()) model.encodings.push_back(encode(v));
    const auto subs = affine_map(model.encodings);
    const auto ranges = problem.ranges();
    model.cost = compose_cost(problem.objectives(), model.encodings);

    const auto& constraints = problem.constraints();
    for (std::size_t k = 0; k < constraints.size(); ++k) {
        const auto& decl = constraints[k];
        PenaltyBlock block;
        block.source_constraint = k;
        block.origin = PenaltyOrigin::user;
        block.description = decl.to_string();
        block.hardness = decl.hardness;
        if (decl.is_comparison()) {
            const Comparison& c = decl.comparison();
            const double precision = detail::slack_precision_for(problem, decl, cfg);
            block.tolerance = precision / 2.0;
            Comparison binary{c.lhs.substitute(subs), c.op, c.rhs};
            if (c.op == CompareOp::eq) {
                block.penalty = equality_penalty(binary);
            } else {
                auto ineq = inequality_to_penalty(binary, interval_bounds(c.lhs, ranges), precision,
                                                  "__slack" + std::to_string(k));
                block.penalty = std::move(ineq.penalty);
                block.slack_plan = std::move(ineq.slack);
                block.satisfiable = ineq.satisfiable;
                if (!ineq.satisfiable)
                    model.warnings.push_back("constraint unsatisfiable: " + block.description);
            }
        } else {
            const BooleanRelation& r = decl.relation();
            std::string aux;
            if (r.kind == BooleanKind::xor_) {
                VariableDecl w;
                w.name = "__xor" + std::to_string(k);
                block.slack_plan = encode(w);
                aux = block.slack_plan->binaries[0].name;
            }
            block.penalty = boolean_penalty(r.kind, r.output, r.inputs, aux).substitute(subs).multilinear();
        }
        model.penalties.push_back(std::move(block));
    }

    std::size_t induced_index = 0;
    for (const auto& plan : model.encodings) {
        for (const auto& ic : plan.induced) {
            PenaltyBlock block;
            block.source_constraint = induced_index++;
            block.origin = PenaltyOrigin::encoding;
            block.description = ic.provenance + ": " + ic.form.to_string();
            block.hardness = Hardness::hard;
            block.tolerance = 0.5;
            if (ic.kind == InducedKind::one_hot) {
                block.penalty = equality_penalty(ic.form);
            } else {
                // b_k >= b_{k-1} on binaries: b_{k-1} * (1 - b_k)
                std::string upper, lower;
                for (const auto& [m, c] : ic.form.lhs.terms()) (c > 0 ? upper : lower) = m.variables()[0];
                const auto lo = Polynomial::variable(lower);
                block.penalty = lo - lo * Polynomial::variable(upper);
            }
            model.penalties.push_back(std::move(block));
        }
    }

    // Penalty weights.
    const bool per_constraint = cfg.lambda_method == LambdaMethod::momc || cfg.lambda_method == LambdaMethod::moc;
    if (cfg.lambda_method == LambdaMethod::manual) {
        const auto& m = cfg.manual_lambdas;
        if (m.size() != 1 && m.size() != model.penalties.size())
            throw Error("manual lambdas: expected 1 or " + std::to_string(model.penalties.size()) + " values, got " +
                        std::to_string(m.size()));
        for (std::size_t k = 0; k < model.penalties.size(); ++k) {
            const double value = m.size() == 1 ? m[0] : m[k];
            if (!(value > 0.0)) throw Error("manual lambdas must be positive");
            model.penalties[k].lambda = value;
        }
    } else if (!model.penalties.empty()) {
        const double shared = per_constraint ? 0.0 : estimate_lambda(cfg.lambda_method, model.cost);
        for (auto& block : model.penalties) {
            double lambda = per_constraint ? estimate_lambda(cfg.lambda_method, model.cost, block.penalty) : shared;
            if (!(lambda > 0.0) || !std::isfinite(lambda)) lambda = 1.0;
            const double mult = block.hardness == Hardness::hard ? cfg.hard_multiplier : cfg.weak_multiplier;
            block.lambda = lambda * mult;
        }
    }

    Polynomial total = model.cost;
    for (const auto& block : model.penalties) total += block.penalty.scaled(block.lambda);
    total = total.multilinear();
    if (total.degree() > 2) {
        auto q = quadratize(total);
        total = std::move(q.polynomial);
        model.aux_registry = std::move(q.records);
    }
    model.offset = total.constant_term();
    total.add_term(Monomial{}, -model.offset);
    model.quadratic = std::move(total);
    return model;
}

}  // namespace qubo_forge

#endif  // QUBO_FORGE_COMPILER_HPP_INCLUDED
