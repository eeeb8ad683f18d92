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

#ifndef QUBO_FORGE_ENCODING_HPP_INCLUDED
#define QUBO_FORGE_ENCODING_HPP_INCLUDED

#include <cmath>
#include <string>
#include <vector>

#include "qubo_forge/error.hpp"
#include "qubo_forge/expression.hpp"
#include "qubo_forge/problem.hpp"

namespace qubo_forge {

enum class InducedKind { one_hot, monotone };

/// A constraint that exists only because of how a variable was encoded.
struct InducedConstraint {
    InducedKind kind = InducedKind::one_hot;
    Comparison form;  // over binary identifiers
    std::string provenance;
};

struct BinaryWeight {
    std::string name;
    double weight = 0.0;

    bool operator==(const BinaryWeight&) const = default;
};

struct DecodedValue {
    double value = 0.0;
    bool valid = true;  // false when an induced constraint is violated
};

/**
 * Affine map from one source variable onto weighted binaries:
 * value = offset + sum(weight_k * bit_k). Binary names are "<source>#<k>".
 */
struct EncodingPlan {
    std::string source;
    std::string method;  // "unipolar", "bipolar", "dictionary", "logarithmic", ...
    std::vector<BinaryWeight> binaries;
    double offset = 0.0;
    double precision = 0.0;  // grid step; 0 for binary sources
    std::vector<InducedConstraint> induced;

    Polynomial affine() const {
        Polynomial p = Polynomial::constant(offset);
        for (const auto& b : binaries) p.add_term(Monomial{b.name}, b.weight);
        return p;
    }

    std::vector<std::string> binary_names() const {
        std::vector<std::string> out;
        out.reserve(binaries.size());
        for (const auto& b : binaries) out.push_back(b.name);
        return out;
    }

    /// `bit(name)` must return the 0/1 value of a binary of this plan.
    template <class BitLookup>
    DecodedValue decode_with(BitLookup&& bit) const {
        DecodedValue out{offset, true};
        std::vector<int> bits;
        bits.reserve(binaries.size());
        for (const auto& b : binaries) {
            const int x = bit(b.name) != 0 ? 1 : 0;
            bits.push_back(x);
            out.value += b.weight * x;
        }
        for (const auto& c : induced) {
            if (c.kind == InducedKind::one_hot) {
                int ones = 0;
                for (int x : bits) ones += x;
                out.valid = out.valid && ones == 1;
            } else {
                for (std::size_t k = 1; k < bits.size(); ++k) out.valid = out.valid && bits[k] >= bits[k - 1];
                break;  // one check covers the whole chain
            }
        }
        return out;
    }

    DecodedValue decode(const Assignment& bits) const {
        return decode_with([&](const std::string& name) {
            auto it = bits.find(name);
            if (it == bits.end()) throw Error("no value for binary '" + name + "' of '" + source + "'");
            return it->second;
        });
    }

    /// Smallest and largest value over all bit patterns, ignoring induced constraints.
    Interval value_range() const {
        Interval r{offset, offset};
        for (const auto& b : binaries) (b.weight < 0 ? r.lo : r.hi) += b.weight;
        return r;
    }
};

namespace detail {

inline std::string binary_name(const std::string& source, std::size_t k) {
    return source + "#" + std::to_string(k);
}

inline EncodingPlan weighted_plan(const std::string& source, const std::string& method,
                                  const std::vector<double>& weights, double offset, double precision) {
    EncodingPlan plan;
    plan.source = source;
    plan.method = method;
    plan.offset = offset;
    plan.precision = precision;
    for (std::size_t k = 0; k < weights.size(); ++k)
        plan.binaries.push_back({binary_name(source, k), weights[k]});
    return plan;
}

inline InducedConstraint one_hot_constraint(const EncodingPlan& plan) {
    Polynomial sum;
    for (const auto& b : plan.binaries) sum.add_term(Monomial{b.name}, 1.0);
    return {InducedKind::one_hot, Comparison{sum, CompareOp::eq, 1.0}, "one-hot(" + plan.source + ")"};
}

inline EncodingPlan dictionary_plan(const std::string& source, const std::vector<double>& levels,
                                    double precision) {
    EncodingPlan plan = weighted_plan(source, "dictionary", levels, 0.0, precision);
    plan.induced.push_back(one_hot_constraint(plan));
    return plan;
}

// Appends the leftover range as a final weight so the weights sum to `range`.
inline void append_residual(std::vector<double>& weights, double range, double eps) {
    double sum = 0.0;
    for (double w : weights) sum += w;
    const double residual = snap12(range - sum);
    if (residual > eps) weights.push_back(residual);
}

}  // namespace detail

/**
 * Binary expansion of a continuous range [lo, hi] on a grid of step
 * `precision`. Every scheme except dictionary uses offset lo and weights that
 * sum to exactly hi - lo, so the all-ones pattern decodes to hi.
 */
inline EncodingPlan encode_continuous(const std::string& source, double lo, double hi, double precision,
                                      const ContinuousEncoding& enc = {}) {
    const double range = hi - lo;
    if (!(precision > 0.0)) throw Error("precision must be positive");
    const double eps = 1e-9 * std::max(1.0, range);
    if (precision > range + eps) throw Error("precision exceeds the range of '" + source + "'");

    std::vector<double> w;
    switch (enc.method) {
        case EncodingMethod::dictionary: {
            std::vector<double> levels;
            for (std::size_t k = 0;; ++k) {
                const double v = snap12(lo + static_cast<double>(k) * precision);
                if (v > hi + eps) break;
                levels.push_back(v);
            }
            if (levels.back() < hi - eps) levels.push_back(hi);
            return detail::dictionary_plan(source, levels, precision);
        }
        case EncodingMethod::logarithmic: {
            if (!(enc.base >= 2.0)) throw Error("logarithmic base must be at least 2");
            double sum = 0.0;
            for (double step = precision; sum + step <= range + eps; step = snap12(step * enc.base)) {
                w.push_back(step);
                sum += step;
            }
            detail::append_residual(w, range, eps);
            break;
        }
        case EncodingMethod::unitary: {
            const auto n = static_cast<std::size_t>(std::floor(range / precision + 1e-9));
            w.assign(n, precision);
            detail::append_residual(w, range, eps);
            break;
        }
        case EncodingMethod::arithmetic: {
            double sum = 0.0;
            for (std::size_t k = 1;; ++k) {
                const double step = snap12(static_cast<double>(k) * precision);
                if (sum + step > range + eps) break;
                w.push_back(step);
                sum += step;
            }
            detail::append_residual(w, range, eps);
            break;
        }
        case EncodingMethod::bounded_coefficient: {
            const double mu = enc.bound;
            if (mu < precision) throw Error("coefficient bound is below the precision of '" + source + "'");
            double sum = 0.0;
            for (double step = precision; step <= mu + eps && sum + step <= range + eps; step = snap12(step * 2.0)) {
                w.push_back(step);
                sum += step;
            }
            while (sum + mu <= range + eps) {
                w.push_back(mu);
                sum += mu;
            }
            detail::append_residual(w, range, eps);
            break;
        }
        case EncodingMethod::domain_wall: {
            // Valid patterns are 0..01..1; m trailing ones decode to lo + m*precision.
            // Bit 0 switches on last, so it carries the leftover range.
            const auto n = static_cast<std::size_t>(std::ceil(range / precision - 1e-9));
            w.assign(n, precision);
            w[0] = snap12(range - static_cast<double>(n - 1) * precision);
            EncodingPlan plan = detail::weighted_plan(source, "domain-wall", w, lo, precision);
            for (std::size_t k = 1; k < n; ++k) {
                Polynomial diff = Polynomial::variable(plan.binaries[k].name) -
                                  Polynomial::variable(plan.binaries[k - 1].name);
                plan.induced.push_back({InducedKind::monotone, Comparison{diff, CompareOp::ge, 0.0},
                                        "domain-wall(" + source + ")"});
            }
            return plan;
        }
    }
    return detail::weighted_plan(source, to_string(enc.method), w, lo, precision);
}

inline EncodingPlan encode(const VariableDecl& v) {
    switch (v.kind) {
        case VariableKind::binary:
            return detail::weighted_plan(v.name, "unipolar", {1.0}, 0.0, 0.0);
        case VariableKind::spin:
            return detail::weighted_plan(v.name, "bipolar", {2.0}, -1.0, 0.0);
        case VariableKind::discrete: {
            if (v.levels.empty()) throw Error("discrete variable '" + v.name + "' has no levels");
            std::vector<double> sorted = v.levels;
            std::sort(sorted.begin(), sorted.end());
            double gap = 0.0;
            for (std::size_t i = 1; i < sorted.size(); ++i)
                gap = i == 1 ? sorted[i] - sorted[i - 1] : std::min(gap, sorted[i] - sorted[i - 1]);
            return detail::dictionary_plan(v.name, v.levels, gap);
        }
        case VariableKind::continuous:
            return encode_continuous(v.name, v.lo, v.hi, v.precision, v.encoding);
    }
    throw Error("unknown variable kind");
}

}  // namespace qubo_forge

#endif  // QUBO_FORGE_ENCODING_HPP_INCLUDED
