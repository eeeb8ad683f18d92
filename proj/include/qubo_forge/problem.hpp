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

#ifndef QUBO_FORGE_PROBLEM_HPP_INCLUDED
#define QUBO_FORGE_PROBLEM_HPP_INCLUDED

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "qubo_forge/error.hpp"
#include "qubo_forge/expression.hpp"

namespace qubo_forge {

enum class VariableKind { binary, spin, discrete, continuous };

/// Binary expansion schemes for continuous variables.
enum class EncodingMethod { dictionary, logarithmic, unitary, arithmetic, domain_wall, bounded_coefficient };

inline std::string to_string(EncodingMethod m) {
    switch (m) {
        case EncodingMethod::dictionary: return "dictionary";
        case EncodingMethod::logarithmic: return "logarithmic";
        case EncodingMethod::unitary: return "unitary";
        case EncodingMethod::arithmetic: return "arithmetic";
        case EncodingMethod::domain_wall: return "domain-wall";
        case EncodingMethod::bounded_coefficient: return "bounded-coefficient";
    }
    return "?";
}

inline EncodingMethod encoding_method_from_string(const std::string& s) {
    if (s == "dictionary") return EncodingMethod::dictionary;
    if (s == "logarithmic") return EncodingMethod::logarithmic;
    if (s == "unitary") return EncodingMethod::unitary;
    if (s == "arithmetic" || s == "arithmetic-progression") return EncodingMethod::arithmetic;
    if (s == "domain-wall") return EncodingMethod::domain_wall;
    if (s == "bounded-coefficient") return EncodingMethod::bounded_coefficient;
    throw Error("unknown encoding method '" + s + "'");
}

struct ContinuousEncoding {
    EncodingMethod method = EncodingMethod::logarithmic;
    double base = 2.0;   // logarithmic only
    double bound = 0.0;  // bounded-coefficient only (largest allowed weight)
};

struct VariableDecl {
    std::string name;
    VariableKind kind = VariableKind::binary;
    std::vector<double> levels;  // discrete
    double lo = 0.0;             // continuous
    double hi = 1.0;
    double precision = 1.0;
    ContinuousEncoding encoding;

    /// Range of values the variable can take.
    Interval range() const {
        switch (kind) {
            case VariableKind::binary: return {0.0, 1.0};
            case VariableKind::spin: return {-1.0, 1.0};
            case VariableKind::discrete: {
                auto [mn, mx] = std::minmax_element(levels.begin(), levels.end());
                return {*mn, *mx};
            }
            case VariableKind::continuous: return {lo, hi};
        }
        return {};
    }

    bool is_integral() const {
        switch (kind) {
            case VariableKind::binary:
            case VariableKind::spin: return true;
            case VariableKind::discrete:
                return std::all_of(levels.begin(), levels.end(),
                                   [](double v) { return v == std::floor(v); });
            case VariableKind::continuous: return false;
        }
        return false;
    }
};

enum class Sense { minimize, maximize };

struct ObjectiveTerm {
    Polynomial expr;
    Sense sense = Sense::minimize;
    double weight = 1.0;
};

enum class Hardness { hard, weak };

enum class BooleanKind { not_, and_, or_, xor_ };

inline std::string to_string(BooleanKind k) {
    switch (k) {
        case BooleanKind::not_: return "not";
        case BooleanKind::and_: return "and";
        case BooleanKind::or_: return "or";
        case BooleanKind::xor_: return "xor";
    }
    return "?";
}

inline BooleanKind boolean_kind_from_string(const std::string& s) {
    if (s == "not") return BooleanKind::not_;
    if (s == "and") return BooleanKind::and_;
    if (s == "or") return BooleanKind::or_;
    if (s == "xor") return BooleanKind::xor_;
    throw Error("unknown boolean relation '" + s + "'");
}

/// output = kind(inputs...); NOT takes one input, the others two.
struct BooleanRelation {
    BooleanKind kind = BooleanKind::and_;
    std::string output;
    std::vector<std::string> inputs;

    bool operator==(const BooleanRelation&) const = default;

    std::string to_string() const {
        std::string out = output + " = " + qubo_forge::to_string(kind) + "(";
        for (std::size_t i = 0; i < inputs.size(); ++i) out += (i ? ", " : "") + inputs[i];
        return out + ")";
    }
};

struct ConstraintDecl {
    std::variant<Comparison, BooleanRelation> form;
    Hardness hardness = Hardness::hard;
    std::optional<double> slack_precision;

    bool is_comparison() const { return std::holds_alternative<Comparison>(form); }
    const Comparison& comparison() const { return std::get<Comparison>(form); }
    const BooleanRelation& relation() const { return std::get<BooleanRelation>(form); }

    std::string to_string() const {
        return is_comparison() ? comparison().to_string() : relation().to_string();
    }
};

/**
 * Declared variables, objectives and constraints. Expressions are checked
 * against the declared names when they are added, so a Problem built
 * through this interface always refers only to known variables.
 */
class Problem {
 public:
    std::string add_binary(const std::string& name) {
        VariableDecl v;
        v.name = name;
        v.kind = VariableKind::binary;
        return declare(std::move(v));
    }

    std::string add_spin(const std::string& name) {
        VariableDecl v;
        v.name = name;
        v.kind = VariableKind::spin;
        return declare(std::move(v));
    }

    std::string add_discrete(const std::string& name, std::vector<double> levels) {
        VariableDecl v;
        v.name = name;
        v.kind = VariableKind::discrete;
        v.levels = std::move(levels);
        return declare(std::move(v));
    }

    std::string add_continuous(const std::string& name, double lo, double hi, double precision,
                               ContinuousEncoding encoding = {}) {
        VariableDecl v;
        v.name = name;
        v.kind = VariableKind::continuous;
        v.lo = lo;
        v.hi = hi;
        v.precision = precision;
        v.encoding = encoding;
        return declare(std::move(v));
    }

    /// Registers every element of a 1-D or 2-D array named "name_i" or
    /// "name_i_j" using `prototype` for the kind-specific fields.
    std::vector<std::string> add_array(const std::string& name, const std::vector<std::size_t>& shape,
                                       const VariableDecl& prototype) {
        if (shape.empty() || shape.size() > 2) throw Error("arrays must be 1-D or 2-D");
        std::vector<std::string> names;
        for (const auto& n : array_names(name, shape)) {
            VariableDecl v = prototype;
            v.name = n;
            names.push_back(declare(std::move(v)));
        }
        return names;
    }

    std::vector<std::string> add_binary_array(const std::string& name, const std::vector<std::size_t>& shape) {
        VariableDecl proto;
        proto.kind = VariableKind::binary;
        return add_array(name, shape, proto);
    }

    std::vector<std::string> add_continuous_array(const std::string& name, const std::vector<std::size_t>& shape,
                                                  double lo, double hi, double precision,
                                                  ContinuousEncoding encoding = {}) {
        VariableDecl proto;
        proto.kind = VariableKind::continuous;
        proto.lo = lo;
        proto.hi = hi;
        proto.precision = precision;
        proto.encoding = encoding;
        return add_array(name, shape, proto);
    }

    static std::vector<std::string> array_names(const std::string& name, const std::vector<std::size_t>& shape) {
        std::vector<std::string> out;
        if (shape.size() == 1) {
            for (std::size_t i = 0; i < shape[0]; ++i) out.push_back(name + "_" + std::to_string(i));
        } else if (shape.size() == 2) {
            for (std::size_t i = 0; i < shape[0]; ++i)
                for (std::size_t j = 0; j < shape[1]; ++j)
                    out.push_back(name + "_" + std::to_string(i) + "_" + std::to_string(j));
        }
        return out;
    }

    void add_objective(const Polynomial& expr, Sense sense = Sense::minimize, double weight = 1.0) {
        if (!std::isfinite(weight) || weight <= 0.0) throw Error("objective weight must be finite and positive");
        require_declared(expr.variables(), "objective");
        objectives_.push_back(ObjectiveTerm{expr, sense, weight});
    }

    void add_objective(std::string_view text, Sense sense = Sense::minimize, double weight = 1.0) {
        add_objective(parse_expression(text, names_), sense, weight);
    }

    void add_constraint(const Comparison& c, Hardness hardness = Hardness::hard,
                        std::optional<double> slack_precision = std::nullopt) {
        if (slack_precision && !(*slack_precision > 0.0)) throw Error("slack precision must be positive");
        require_declared(c.lhs.variables(), "constraint");
        constraints_.push_back(ConstraintDecl{c, hardness, slack_precision});
    }

    void add_constraint(std::string_view text, Hardness hardness = Hardness::hard,
                        std::optional<double> slack_precision = std::nullopt) {
        add_constraint(parse_constraint(text, names_), hardness, slack_precision);
    }

    void add_boolean(BooleanKind kind, const std::string& output, const std::vector<std::string>& inputs,
                     Hardness hardness = Hardness::hard) {
        const std::size_t arity = kind == BooleanKind::not_ ? 1 : 2;
        if (inputs.size() != arity)
            throw Error(to_string(kind) + " relation takes " + std::to_string(arity) + " input(s)");
        std::vector<std::string> all = inputs;
        all.push_back(output);
        for (const auto& v : all) {
            const VariableDecl* d = find(v);
            if (!d) throw Error("constraint references undeclared variable '" + v + "'");
            if (d->kind != VariableKind::binary)
                throw Error("boolean relation variable '" + v + "' must be a unipolar binary");
        }
        constraints_.push_back(ConstraintDecl{BooleanRelation{kind, output, inputs}, hardness, std::nullopt});
    }

    /// Throws if the problem cannot be compiled.
    void validate() const {
        if (objectives_.empty()) throw Error("problem has no objective");
        for (const auto& o : objectives_) require_declared(o.expr.variables(), "objective");
        for (const auto& c : constraints_) {
            if (c.is_comparison()) require_declared(c.comparison().lhs.variables(), "constraint");
        }
    }

    const VariableDecl* find(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &variables_[it->second];
    }

    const std::vector<VariableDecl>& variables() const noexcept { return variables_; }
    const std::vector<ObjectiveTerm>& objectives() const noexcept { return objectives_; }
    const std::vector<ConstraintDecl>& constraints() const noexcept { return constraints_; }
    const VariableSet& names() const noexcept { return names_; }

    std::map<std::string, Interval> ranges() const {
        std::map<std::string, Interval> out;
        for (const auto& v : variables_) out[v.name] = v.range();
        return out;
    }

 private:
    std::string declare(VariableDecl v) {
        validate_decl(v);
        if (names_.count(v.name)) throw Error("duplicate variable name '" + v.name + "'");
        names_.insert(v.name);
        index_[v.name] = variables_.size();
        variables_.push_back(std::move(v));
        return variables_.back().name;
    }

    static void validate_decl(const VariableDecl& v) {
        if (v.name.empty() || !detail::ident_start(v.name[0]) ||
            !std::all_of(v.name.begin(), v.name.end(), detail::ident_char) ||
            v.name.find('#') != std::string::npos || v.name.rfind("__", 0) == 0)
            throw Error("invalid variable name '" + v.name + "'");
        if (v.kind == VariableKind::discrete) {
            if (v.levels.empty()) throw Error("discrete variable '" + v.name + "' needs at least one level");
            std::set<double> uniq(v.levels.begin(), v.levels.end());
            if (uniq.size() != v.levels.size())
                throw Error("discrete variable '" + v.name + "' has repeated levels");
        }
        if (v.kind == VariableKind::continuous) {
            if (!(v.lo < v.hi)) throw Error("continuous variable '" + v.name + "' needs lo < hi");
            if (!(v.precision > 0.0)) throw Error("continuous variable '" + v.name + "' needs precision > 0");
            if (v.precision > v.hi - v.lo + 1e-12)
                throw Error("precision of '" + v.name + "' exceeds its range");
            if (v.encoding.method == EncodingMethod::logarithmic && !(v.encoding.base >= 2.0))
                throw Error("logarithmic base must be at least 2");
            if (v.encoding.method == EncodingMethod::bounded_coefficient && v.encoding.bound < v.precision)
                throw Error("coefficient bound of '" + v.name + "' is below its precision");
        }
    }

    void require_declared(const VariableSet& used, const char* what) const {
        for (const auto& v : used)
            if (!names_.count(v)) throw Error(std::string(what) + " references undeclared variable '" + v + "'");
    }

    std::vector<VariableDecl> variables_;
    std::map<std::string, std::size_t> index_;
    VariableSet names_;
    std::vector<ObjectiveTerm> objectives_;
    std::vector<ConstraintDecl> constraints_;
};

}  // namespace qubo_forge

#endif  // QUBO_FORGE_PROBLEM_HPP_INCLUDED
