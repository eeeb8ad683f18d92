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

#ifndef QUBO_FORGE_EXPRESSION_HPP_INCLUDED
#define QUBO_FORGE_EXPRESSION_HPP_INCLUDED

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qubo_forge/error.hpp"

namespace qubo_forge {

/// Coefficients whose magnitude falls below this are dropped.
inline constexpr double kZeroTolerance = 1e-12;

using Assignment = std::map<std::string, double>;
using VariableSet = std::set<std::string>;

/// Formats a real with up to 12 significant digits (the canonical text and
/// file representation used throughout the project).
inline std::string format_number(double value) {
    if (value == 0.0) value = 0.0;  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

/// Rounds `value` to 12 significant digits.
inline double snap12(double value) {
    return std::strtod(format_number(value).c_str(), nullptr);
}

/**
 * Product of variables, stored as a sorted multiset of identifiers so that
 * x*y*x and x^2*y share one representation. The empty monomial is the
 * constant 1.
 */
class Monomial {
 public:
    Monomial() = default;

    explicit Monomial(std::vector<std::string> vars) : vars_(std::move(vars)) {
        std::sort(vars_.begin(), vars_.end());
    }

    Monomial(std::initializer_list<std::string> vars)
        : Monomial(std::vector<std::string>(vars)) {}

    const std::vector<std::string>& variables() const noexcept { return vars_; }
    std::size_t degree() const noexcept { return vars_.size(); }
    bool is_constant() const noexcept { return vars_.empty(); }

    std::size_t multiplicity(const std::string& var) const {
        auto [lo, hi] = std::equal_range(vars_.begin(), vars_.end(), var);
        return static_cast<std::size_t>(hi - lo);
    }

    bool contains(const std::string& var) const {
        return std::binary_search(vars_.begin(), vars_.end(), var);
    }

    Monomial operator*(const Monomial& other) const {
        Monomial out;
        out.vars_.reserve(vars_.size() + other.vars_.size());
        std::merge(vars_.begin(), vars_.end(), other.vars_.begin(), other.vars_.end(),
                   std::back_inserter(out.vars_));
        return out;
    }

    /// Monomial with every occurrence of `var` removed.
    Monomial without(const std::string& var) const {
        Monomial out;
        for (const auto& v : vars_)
            if (v != var) out.vars_.push_back(v);
        return out;
    }

    /// Distinct identifiers in sorted order.
    std::vector<std::string> support() const {
        std::vector<std::string> out;
        std::unique_copy(vars_.begin(), vars_.end(), std::back_inserter(out));
        return out;
    }

    /// "x*y^2"; the constant monomial prints as "1".
    std::string to_string() const {
        if (vars_.empty()) return "1";
        std::string out;
        for (std::size_t i = 0; i < vars_.size();) {
            std::size_t j = i;
            while (j < vars_.size() && vars_[j] == vars_[i]) ++j;
            if (!out.empty()) out += '*';
            out += vars_[i];
            if (j - i > 1) out += "^" + std::to_string(j - i);
            i = j;
        }
        return out;
    }

    bool operator==(const Monomial& other) const = default;

    // Canonical order: higher degree first, then lexicographic.
    bool operator<(const Monomial& other) const {
        if (vars_.size() != other.vars_.size()) return vars_.size() > other.vars_.size();
        return vars_ < other.vars_;
    }

 private:
    std::vector<std::string> vars_;
};

/**
 * Sparse polynomial over named variables with real coefficients. The
 * constant term lives at the empty monomial; zero coefficients are never
 * stored.
 */
class Polynomial {
 public:
    using TermMap = std::map<Monomial, double>;

    Polynomial() = default;

    static Polynomial constant(double value) {
        Polynomial p;
        p.add_term(Monomial{}, value);
        return p;
    }

    static Polynomial variable(const std::string& name, double coefficient = 1.0) {
        Polynomial p;
        p.add_term(Monomial{name}, coefficient);
        return p;
    }

    /// Accumulates `coefficient` onto `monomial`.
    void add_term(const Monomial& monomial, double coefficient) {
        if (coefficient == 0.0) return;
        auto it = terms_.find(monomial);
        if (it == terms_.end()) {
            if (std::abs(coefficient) >= kZeroTolerance) terms_.emplace(monomial, coefficient);
            return;
        }
        it->second += coefficient;
        if (std::abs(it->second) < kZeroTolerance) terms_.erase(it);
    }

    const TermMap& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }

    double coefficient(const Monomial& monomial) const {
        auto it = terms_.find(monomial);
        return it == terms_.end() ? 0.0 : it->second;
    }

    double constant_term() const { return coefficient(Monomial{}); }

    std::size_t degree() const {
        std::size_t d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
        return d;
    }

    VariableSet variables() const {
        VariableSet out;
        for (const auto& [m, c] : terms_) out.insert(m.variables().begin(), m.variables().end());
        return out;
    }

    Polynomial& operator+=(const Polynomial& other) {
        for (const auto& [m, c] : other.terms_) add_term(m, c);
        return *this;
    }

    Polynomial& operator-=(const Polynomial& other) {
        for (const auto& [m, c] : other.terms_) add_term(m, -c);
        return *this;
    }

    Polynomial& operator*=(double scalar) {
        *this = scaled(scalar);
        return *this;
    }

    Polynomial scaled(double scalar) const {
        Polynomial out;
        for (const auto& [m, c] : terms_) out.add_term(m, c * scalar);
        return out;
    }

    friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
    friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
    friend Polynomial operator-(const Polynomial& p) { return p.scaled(-1.0); }
    friend Polynomial operator*(const Polynomial& p, double s) { return p.scaled(s); }
    friend Polynomial operator*(double s, const Polynomial& p) { return p.scaled(s); }

    friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
        Polynomial out;
        for (const auto& [ma, ca] : lhs.terms_)
            for (const auto& [mb, cb] : rhs.terms_) out.add_term(ma * mb, ca * cb);
        return out;
    }

    Polynomial pow(unsigned exponent) const {
        Polynomial result = constant(1.0);
        Polynomial base = *this;
        while (exponent > 0) {
            if (exponent & 1U) result = result * base;
            exponent >>= 1U;
            if (exponent > 0) base = base * base;
        }
        return result;
    }

    /// Exact evaluation; throws if a variable of the polynomial is unassigned.
    double evaluate(const Assignment& assignment) const {
        double total = 0.0;
        for (const auto& [m, c] : terms_) {
            double term = c;
            for (const auto& v : m.variables()) {
                auto it = assignment.find(v);
                if (it == assignment.end()) throw Error("no value assigned to variable '" + v + "'");
                term *= it->second;
            }
            total += term;
        }
        return total;
    }

    /// Replaces `var` by `replacement` everywhere.
    Polynomial substitute(const std::string& var, const Polynomial& replacement) const {
        Polynomial out;
        for (const auto& [m, c] : terms_) {
            const std::size_t k = m.multiplicity(var);
            if (k == 0) {
                out.add_term(m, c);
                continue;
            }
            Polynomial rest;
            rest.add_term(m.without(var), c);
            out += rest * replacement.pow(static_cast<unsigned>(k));
        }
        return out;
    }

    /// Simultaneous substitution of several variables. Variables not in the
    /// map are kept as they are.
    Polynomial substitute(const std::map<std::string, Polynomial>& replacements) const {
        Polynomial out;
        for (const auto& [m, c] : terms_) {
            Polynomial term = constant(c);
            Monomial kept;
            for (const auto& v : m.variables()) {
                auto it = replacements.find(v);
                if (it == replacements.end())
                    kept = kept * Monomial{v};
                else
                    term = term * it->second;
            }
            Polynomial k;
            k.add_term(kept, 1.0);
            out += term * k;
        }
        return out;
    }

    /// Collapses b^k to b for each listed 0/1 variable (b*b == b).
    Polynomial reduce_binary_idempotence(const VariableSet& binary_vars) const {
        Polynomial out;
        for (const auto& [m, c] : terms_) {
            std::vector<std::string> vars;
            const auto& src = m.variables();
            for (std::size_t i = 0; i < src.size(); ++i) {
                if (i > 0 && src[i] == src[i - 1] && binary_vars.count(src[i])) continue;
                vars.push_back(src[i]);
            }
            out.add_term(Monomial(std::move(vars)), c);
        }
        return out;
    }

    /// Same as above, treating every variable as binary.
    Polynomial multilinear() const {
        Polynomial out;
        for (const auto& [m, c] : terms_) out.add_term(Monomial(m.support()), c);
        return out;
    }

    /// Canonical text: terms by (degree desc, lexicographic), coefficients
    /// with up to 12 significant digits, "^" for powers.
    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            const bool negative = c < 0;
            const double mag = std::abs(c);
            if (first)
                out += negative ? "-" : "";
            else
                out += negative ? " - " : " + ";
            if (m.is_constant()) {
                out += format_number(mag);
            } else {
                if (format_number(mag) != "1") out += format_number(mag) + "*";
                out += m.to_string();
            }
            first = false;
        }
        return out;
    }

    bool operator==(const Polynomial& other) const = default;

 private:
    TermMap terms_;
};

/// Closed interval used for range bounds of expressions.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Interval-arithmetic bounds of `p` given a range for every variable.
inline Interval interval_bounds(const Polynomial& p, const std::map<std::string, Interval>& ranges) {
    auto mul = [](Interval a, Interval b) {
        const double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
        return Interval{*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
    };
    Interval total{0.0, 0.0};
    for (const auto& [m, coeff] : p.terms()) {
        Interval term{coeff, coeff};
        const auto& vars = m.variables();
        for (std::size_t i = 0; i < vars.size();) {
            std::size_t j = i;
            while (j < vars.size() && vars[j] == vars[i]) ++j;
            auto it = ranges.find(vars[i]);
            if (it == ranges.end()) throw Error("no range known for variable '" + vars[i] + "'");
            const Interval r = it->second;
            const auto k = static_cast<int>(j - i);
            Interval power{std::pow(r.lo, k), std::pow(r.hi, k)};
            if (power.lo > power.hi) std::swap(power.lo, power.hi);
            if (k % 2 == 0 && r.lo < 0 && r.hi > 0) power = {0.0, std::max(power.lo, power.hi)};
            term = mul(term, power);
            i = j;
        }
        total.lo += term.lo;
        total.hi += term.hi;
    }
    return total;
}

enum class CompareOp { eq, ge, gt, le, lt };

inline std::string to_string(CompareOp op) {
    switch (op) {
        case CompareOp::eq: return "=";
        case CompareOp::ge: return ">=";
        case CompareOp::gt: return ">";
        case CompareOp::le: return "<=";
        case CompareOp::lt: return "<";
    }
    return "?";
}

/// `lhs op rhs` with every variable moved to the left and a constant right side.
struct Comparison {
    Polynomial lhs;
    CompareOp op = CompareOp::eq;
    double rhs = 0.0;

    std::string to_string() const {
        return lhs.to_string() + " " + qubo_forge::to_string(op) + " " + format_number(rhs);
    }

    bool operator==(const Comparison&) const = default;
};

namespace detail {

enum class TokenKind { number, ident, plus, minus, star, power, lparen, rparen, compare, end };

struct Token {
    TokenKind kind;
    std::size_t pos;
    double number = 0.0;
    std::string text;
    CompareOp op = CompareOp::eq;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#';
}

inline std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            if (i < text.size() && text[i] == '.') {
                ++i;
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            }
            if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < text.size() && (text[j] == '+' || text[j] == '-')) ++j;
                if (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
                    i = j;
                    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
                }
            }
            const std::string literal(text.substr(start, i - start));
            if (literal == ".") throw ParseError("malformed number", start);
            if (i < text.size() && ident_start(text[i]))
                throw ParseError("implicit multiplication is not supported; write '*' explicitly", i);
            Token t{TokenKind::number, start, 0.0, {}};
            t.number = std::strtod(literal.c_str(), nullptr);
            t.text = literal;
            tokens.push_back(std::move(t));
            continue;
        }
        if (ident_start(c)) {
            while (i < text.size() && ident_char(text[i])) ++i;
            Token t{TokenKind::ident, start, 0.0, {}};
            t.text = std::string(text.substr(start, i - start));
            tokens.push_back(std::move(t));
            continue;
        }
        auto two = [&](char next) { return i + 1 < text.size() && text[i + 1] == next; };
        Token t{TokenKind::end, start, 0.0, {}};
        switch (c) {
            case '+': t.kind = TokenKind::plus; ++i; break;
            case '-': t.kind = TokenKind::minus; ++i; break;
            case '*':
                t.kind = two('*') ? TokenKind::power : TokenKind::star;
                i += two('*') ? 2 : 1;
                break;
            case '^': t.kind = TokenKind::power; ++i; break;
            case '(': t.kind = TokenKind::lparen; ++i; break;
            case ')': t.kind = TokenKind::rparen; ++i; break;
            case '=':
                t.kind = TokenKind::compare;
                t.op = CompareOp::eq;
                i += two('=') ? 2 : 1;
                break;
            case '>':
                t.kind = TokenKind::compare;
                t.op = two('=') ? CompareOp::ge : CompareOp::gt;
                i += two('=') ? 2 : 1;
                break;
            case '<':
                t.kind = TokenKind::compare;
                t.op = two('=') ? CompareOp::le : CompareOp::lt;
                i += two('=') ? 2 : 1;
                break;
            case '/': throw ParseError("division is not supported in polynomial expressions", start);
            case '!': throw ParseError("'!=' is not a supported comparison", start);
            default: throw ParseError(std::string("unexpected character '") + c + "'", start);
        }
        tokens.push_back(std::move(t));
    }
    tokens.push_back(Token{TokenKind::end, text.size(), 0.0, {}});
    return tokens;
}

// Recursive descent over a token range [begin, end); `end` must be an end or
// compare token.
class ExpressionParser {
 public:
    ExpressionParser(const std::vector<Token>& tokens, std::size_t begin, std::size_t end,
                     const VariableSet& known)
        : tokens_(tokens), pos_(begin), end_(end), known_(known) {}

    Polynomial parse_all() {
        if (pos_ == end_) throw ParseError("expected an expression", tokens_[pos_].pos);
        Polynomial p = expression();
        if (pos_ != end_) throw ParseError("unexpected token", tokens_[pos_].pos);
        return p;
    }

 private:
    const Token& peek() const { return tokens_[pos_]; }
    bool at_end() const { return pos_ >= end_; }

    Polynomial expression() {
        Polynomial acc = term();
        while (!at_end() && (peek().kind == TokenKind::plus || peek().kind == TokenKind::minus)) {
            const bool minus = peek().kind == TokenKind::minus;
            ++pos_;
            Polynomial rhs = term();
            if (minus)
                acc -= rhs;
            else
                acc += rhs;
        }
        return acc;
    }

    Polynomial term() {
        Polynomial acc = unary();
        while (!at_end() && peek().kind == TokenKind::star) {
            ++pos_;
            acc = acc * unary();
        }
        return acc;
    }

    Polynomial unary() {
        if (!at_end() && peek().kind == TokenKind::minus) {
            ++pos_;
            return -unary();
        }
        if (!at_end() && peek().kind == TokenKind::plus) {
            ++pos_;
            return unary();
        }
        return power();
    }

    Polynomial power() {
        Polynomial base = primary();
        while (!at_end() && peek().kind == TokenKind::power) {
            ++pos_;
            if (at_end()) throw ParseError("missing exponent", peek().pos);
            const Token& t = peek();
            if (t.kind == TokenKind::minus) throw ParseError("negative exponents are not supported", t.pos);
            if (t.kind != TokenKind::number)
                throw ParseError("exponent must be a non-negative integer literal", t.pos);
            if (t.number != std::floor(t.number))
                throw ParseError("non-integer exponent '" + t.text + "'", t.pos);
            if (t.number > 64) throw ParseError("exponent too large", t.pos);
            ++pos_;
            base = base.pow(static_cast<unsigned>(t.number));
        }
        return base;
    }

    Polynomial primary() {
        if (at_end()) throw ParseError("unexpected end of expression", peek().pos);
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::number:
                ++pos_;
                return Polynomial::constant(t.number);
            case TokenKind::ident: {
                if (pos_ + 1 < end_ && tokens_[pos_ + 1].kind == TokenKind::lparen)
                    throw ParseError("function '" + t.text + "' is not supported; only polynomials are accepted",
                                     t.pos);
                if (!known_.count(t.text)) throw ParseError("unknown identifier '" + t.text + "'", t.pos);
                ++pos_;
                return Polynomial::variable(t.text);
            }
            case TokenKind::lparen: {
                ++pos_;
                Polynomial inner = expression();
                if (at_end() || peek().kind != TokenKind::rparen)
                    throw ParseError("missing closing parenthesis", peek().pos);
                ++pos_;
                return inner;
            }
            case TokenKind::compare:
                throw ParseError("unexpected comparison operator", t.pos);
            default:
                throw ParseError("unexpected token", t.pos);
        }
    }

    const std::vector<Token>& tokens_;
    std::size_t pos_;
    std::size_t end_;
    const VariableSet& known_;
};

}  // namespace detail

/// Parses a polynomial expression over `known_vars` and returns its expanded
/// canonical form.
inline Polynomial parse_expression(std::string_view text, const VariableSet& known_vars) {
    const auto tokens = detail::tokenize(text);
    for (const auto& t : tokens)
        if (t.kind == detail::TokenKind::compare)
            throw ParseError("unexpected comparison operator in expression", t.pos);
    return detail::ExpressionParser(tokens, 0, tokens.size() - 1, known_vars).parse_all();
}

/// Parses "<expr> <op> <expr>" and moves every variable term to the left.
inline Comparison parse_constraint(std::string_view text, const VariableSet& known_vars) {
    const auto tokens = detail::tokenize(text);
    std::size_t split = tokens.size();
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].kind != detail::TokenKind::compare) continue;
        if (split != tokens.size()) throw ParseError("more than one comparison operator", tokens[i].pos);
        split = i;
    }
    if (split == tokens.size()) throw ParseError("missing comparison operator", text.size());

    const Polynomial left = detail::ExpressionParser(tokens, 0, split, known_vars).parse_all();
    const Polynomial right =
        detail::ExpressionParser(tokens, split + 1, tokens.size() - 1, known_vars).parse_all();

    Polynomial diff = left - right;
    const double constant = diff.constant_term();
    diff.add_term(Monomial{}, -constant);
    return Comparison{std::move(diff), tokens[split].op, constant == 0.0 ? 0.0 : -constant};
}

}  // namespace qubo_forge

#endif  // QUBO_FORGE_EXPRESSION_HPP_INCLUDED
