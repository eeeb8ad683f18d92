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

#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "test_support.hpp"

using namespace qubo_forge;
using namespace qubo_forge::testing;

namespace {

Polynomial v(const std::string& name) { return Polynomial::variable(name); }

std::vector<double> slack_weights(const PenaltyBlock& b) {
    std::vector<double> w;
    for (const auto& x : b.slack_plan->binaries) w.push_back(x.weight);
    return w;
}

// Minimum over the names in `hidden` of p, for a fixed assignment of the rest.
double min_over(const Polynomial& p, Assignment fixed, const std::vector<std::string>& hidden) {
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << hidden.size()); ++code) {
        Assignment a = fixed;
        for (std::size_t i = 0; i < hidden.size(); ++i) a[hidden[i]] = static_cast<double>((code >> i) & 1U);
        best = std::min(best, p.evaluate(a));
    }
    return best;
}

double lambda_of(const Problem& p, LambdaMethod m, std::size_t block) {
    CompileConfig cfg;
    cfg.lambda_method = m;
    return compile(p, cfg).penalties.at(block).lambda;
}

}  // namespace

TEST_CASE("composed cost of the worked example", "[compiler]") {
    const auto model = compile(worked_example());
    CHECK(model.cost.size() == 35);
    CHECK(model.cost.constant_term() == 4.0);
    double largest = 0.0;
    for (const auto& [m, c] : model.cost.terms())
        if (!m.is_constant()) largest = std::max(largest, c);
    CHECK(largest == 6.0);
    CHECK(model.cost.coefficient(Monomial{"b#2", "c#3"}) == 6.0);
    CHECK(model.binaries().size() == 13);
}

TEST_CASE("maximize terms are negated and weighted", "[compiler]") {
    Problem p;
    p.add_binary("x");
    p.add_binary("y");
    p.add_objective("x", Sense::maximize, 2.0);
    p.add_objective("y", Sense::minimize, 0.5);
    const auto cost = compose_cost(p.objectives(), compile(p).encodings);
    CHECK(cost == v("x#0").scaled(-2.0) + v("y#0").scaled(0.5));
}

TEST_CASE("one-hot equality penalty", "[compiler]") {
    const auto model = compile(worked_example());
    REQUIRE(model.penalties.size() == 2);
    const auto& one_hot = model.penalties[1];
    CHECK(one_hot.origin == PenaltyOrigin::encoding);
    Polynomial expected = Polynomial::constant(1.0) - v("b#0") - v("b#1") - v("b#2");
    expected += (v("b#0") * v("b#1") + v("b#0") * v("b#2") + v("b#1") * v("b#2")).scaled(2.0);
    CHECK(one_hot.penalty == expected);
}

TEST_CASE("inequality slack of the worked example", "[compiler]") {
    const auto model = compile(worked_example());
    const auto& block = model.penalties[0];
    CHECK(block.origin == PenaltyOrigin::user);
    REQUIRE(block.slack_plan);
    CHECK(slack_weights(block) == std::vector<double>{0.25, 0.5, 1, 1.25});
    CHECK(block.slack_plan->offset == -3.0);
    CHECK(block.tolerance == 0.125);

    // the optimum satisfies b + c = 2 exactly, so every slack bit is on
    Assignment a{{"b#0", 0}, {"b#1", 0}, {"b#2", 1}, {"c#0", 1}, {"c#1", 1}, {"c#2", 0}, {"c#3", 0}, {"c#4", 1}};
    for (const auto& s : block.slack_plan->binary_names()) a[s] = 1;
    CHECK(block.penalty.evaluate(a) == 0.0);
}

TEST_CASE("knapsack capacity slack", "[compiler]") {
    const auto model = compile(knapsack_problem(load_knapsack(data_path("f3_l-d_kp_4_20.txt"))));
    REQUIRE(model.penalties.size() == 1);
    CHECK(slack_weights(model.penalties[0]) == std::vector<double>{1, 2, 4, 8, 5});
    CHECK(model.penalties[0].slack_plan->offset == 0.0);
    CHECK(model.binaries().size() == 9);
    CHECK(model.penalties[0].lambda == 15.0);
}

TEST_CASE("inequality penalty helper", "[compiler]") {
    const Comparison ge{v("x") + v("y"), CompareOp::ge, 1.0};
    const auto pen = inequality_to_penalty(ge, {0, 2}, 1.0, "s");
    REQUIRE(pen.slack);
    CHECK(pen.slack->offset == -1.0);
    for (std::uint64_t code = 0; code < 4; ++code) {
        const auto a = bits_assignment({"x", "y"}, code);
        const bool ok = a.at("x") + a.at("y") >= 1;
        CHECK((min_over(pen.penalty, a, pen.slack->binary_names()) == 0.0) == ok);
    }
    CHECK_THROWS_AS(inequality_to_penalty(Comparison{v("x"), CompareOp::eq, 1}, {0, 1}, 1, "s"), Error);

    // a bound that is already tight needs no slack
    const auto tight = inequality_to_penalty(Comparison{v("x"), CompareOp::le, 0.0}, {0, 1}, 1.0, "t");
    CHECK_FALSE(tight.slack);
    CHECK(tight.penalty == v("x"));

    const auto impossible = inequality_to_penalty(Comparison{v("x"), CompareOp::ge, 3.0}, {0, 1}, 1.0, "u");
    CHECK_FALSE(impossible.satisfiable);
}

TEST_CASE("strict comparisons are shifted by one step", "[compiler]") {
    Problem p;
    p.add_binary_array("x", {3});
    p.add_objective("x_0 + x_1 + x_2");
    p.add_constraint("x_0 + x_1 + x_2 > 1");
    const auto model = compile(p);
    const auto best = solve_exhaustive(model);
    CHECK(best.best_energy() == 2.0);

    Problem q;
    q.add_binary_array("x", {3});
    q.add_objective("x_0 + x_1 + x_2", Sense::maximize);
    q.add_constraint("x_0 + x_1 + x_2 < 2");
    CHECK(solve_exhaustive(compile(q)).best_energy() == -1.0);
}

TEST_CASE("lambda estimates for the worked example", "[compiler]") {
    const Problem p = worked_example();
    CHECK(lambda_of(p, LambdaMethod::mqc, 0) == 10.0);
    CHECK(lambda_of(p, LambdaMethod::vlm, 0) == 12.0);
    CHECK(lambda_of(p, LambdaMethod::ub_naive, 0) == 52.25);
    CHECK(lambda_of(p, LambdaMethod::ub_posiform, 0) == 31.625);
    CHECK(lambda_of(p, LambdaMethod::momc, 0) == Approx(6.19).margin(0.005));
    CHECK(lambda_of(p, LambdaMethod::momc, 0) == Approx(12.0 / 1.9375));
    CHECK(lambda_of(p, LambdaMethod::momc, 1) == 12.0);
    CHECK(lambda_of(p, LambdaMethod::moc, 0) == 1.0);
    CHECK(lambda_of(p, LambdaMethod::moc, 1) == 6.0);
    CHECK_THROWS_AS(lambda_of(p, LambdaMethod::ub_positive, 0), Error);
}

TEST_CASE("ub-positive on a positive objective", "[compiler]") {
    const auto f = v("b") + (v("b") * v("c")).scaled(2.0);
    CHECK(estimate_lambda(LambdaMethod::ub_positive, f) == 3.0);
    CHECK(estimate_lambda(LambdaMethod::ub_positive, f + Polynomial::constant(1.0)) == 4.0);
}

TEST_CASE("flip bounds", "[compiler]") {
    const auto f = v("x").scaled(2.0) - (v("x") * v("y")).scaled(3.0) + (v("x") * v("z")).scaled(1.0);
    const auto b = flip_bounds(f, "x");
    CHECK(b.up == 3.0);
    CHECK(b.down == 1.0);
}

TEST_CASE("non-positive estimates fall back to one", "[compiler]") {
    Problem p;
    p.add_binary("x");
    p.add_objective("3");
    p.add_constraint("x = 1");
    CHECK(lambda_of(p, LambdaMethod::vlm, 0) == 1.0);
    CHECK(lambda_of(p, LambdaMethod::mqc, 0) == 3.0);
}

TEST_CASE("manual lambdas and multipliers", "[compiler]") {
    const Problem p = worked_example();
    CompileConfig cfg;
    cfg.lambda_method = LambdaMethod::manual;
    cfg.manual_lambdas = {5.0};
    CHECK(compile(p, cfg).lambdas() == std::vector<double>{5.0, 5.0});
    cfg.manual_lambdas = {5.0, 7.0};
    CHECK(compile(p, cfg).lambdas() == std::vector<double>{5.0, 7.0});
    cfg.manual_lambdas = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(compile(p, cfg), Error);
    cfg.manual_lambdas = {-1.0};
    CHECK_THROWS_AS(compile(p, cfg), Error);

    Problem weak;
    weak.add_binary("x");
    weak.add_binary("y");
    weak.add_objective("x - y");
    weak.add_constraint("x + y = 1", Hardness::weak);
    CompileConfig w;
    w.weak_multiplier = 0.5;
    CHECK(compile(weak, w).penalties[0].lambda == Approx(0.5 * 1.0));
}

TEST_CASE("compiled energy equals cost plus weighted penalties", "[compiler][property]") {
    const auto model = compile(worked_example());
    const auto bins = model.binaries();
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::uint64_t> code(0, (std::uint64_t{1} << bins.size()) - 1);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = bits_assignment(bins, code(rng));
        double expected = model.cost.evaluate(a);
        for (const auto& b : model.penalties) expected += b.lambda * b.penalty.evaluate(a);
        CHECK(model.energy(a) == Approx(expected).margin(1e-9));
        for (const auto& b : model.penalties) CHECK(b.penalty.evaluate(a) >= -1e-9);
    }
}

TEST_CASE("property: penalties vanish exactly on feasible encodings", "[compiler][property]") {
    const Problem p = worked_example();
    const auto model = compile(p);
    const auto& block = model.penalties[0];
    const auto slack = block.slack_plan->binary_names();
    const auto* b = model.plan_for("b");
    const auto* c = model.plan_for("c");
    for (std::size_t bi = 0; bi < 3; ++bi) {
        for (std::uint64_t cc = 0; cc < 32; ++cc) {
            Assignment a = bits_assignment(c->binary_names(), cc);
            for (std::size_t k = 0; k < 3; ++k) a[b->binaries[k].name] = k == bi ? 1 : 0;
            const double bv = b->decode(a).value, cv = c->decode(a).value;
            const double floor = min_over(block.penalty, a, slack);
            if (bv + cv >= 2.0)
                CHECK(floor == Approx(0.0).margin(1e-12));
            else
                CHECK(floor >= 0.0625 - 1e-12);  // at least one grid step squared
        }
    }
}

TEST_CASE("boolean penalties match their truth tables", "[compiler][property]") {
    for (auto kind : {BooleanKind::not_, BooleanKind::and_, BooleanKind::or_, BooleanKind::xor_}) {
        const bool unary = kind == BooleanKind::not_;
        const std::vector<std::string> in = unary ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
        const auto pen = boolean_penalty(kind, "z", in, "w");
        for (std::uint64_t code = 0; code < (unary ? 4U : 8U); ++code) {
            const int x = code & 1, y = unary ? 0 : (code >> 1) & 1, z = (code >> (unary ? 1 : 2)) & 1;
            bool truth = false;
            switch (kind) {
                case BooleanKind::not_: truth = z == !x; break;
                case BooleanKind::and_: truth = z == (x && y); break;
                case BooleanKind::or_: truth = z == (x || y); break;
                case BooleanKind::xor_: truth = z == (x != y); break;
            }
            Assignment a{{"x", double(x)}, {"z", double(z)}};
            if (!unary) a["y"] = y;
            const double value = kind == BooleanKind::xor_ ? min_over(pen, a, {"w"}) : pen.evaluate(a);
            INFO(to_string(kind) << " x=" << x << " y=" << y << " z=" << z);
            if (truth)
                CHECK(value == 0.0);
            else
                CHECK(value >= 1.0);
        }
    }
    CHECK_THROWS_AS(boolean_penalty(BooleanKind::xor_, "z", {"x", "y"}), Error);
    CHECK_THROWS_AS(boolean_penalty(BooleanKind::and_, "z", {"x"}), Error);
}

TEST_CASE("boolean constraints compile and solve", "[compiler]") {
    Problem p;
    p.add_binary("x");
    p.add_binary("y");
    p.add_binary("z");
    p.add_objective("z - x - y");
    p.add_boolean(BooleanKind::xor_, "z", {"x", "y"});
    const auto model = compile(p);
    REQUIRE(model.penalties[0].slack_plan);
    const auto s = solve_exhaustive(model);
    const auto& d = s.best_decoded();
    CHECK(d.at("z") == double(int(d.at("x")) ^ int(d.at("y"))));
    CHECK(s.best_energy() == -2.0);
}

TEST_CASE("quadratization of a cubic term", "[compiler]") {
    const auto cubic = v("b1") * v("b2") * v("b3");
    const auto q = quadratize(cubic, 3.0);
    REQUIRE(q.records.size() == 1);
    CHECK(q.records[0] == AuxRecord{"b1", "b2", "__aux#0", 3.0});
    const auto y = v("__aux#0");
    const auto expected = y * v("b3") + (v("b1") * v("b2") - 2.0 * v("b1") * y - 2.0 * v("b2") * y + 3.0 * y).scaled(3.0);
    CHECK(q.polynomial == expected);
    CHECK(q.polynomial.degree() == 2);
}

TEST_CASE("property: quadratization preserves the minimum over auxiliaries", "[compiler][property]") {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<std::size_t> nvars(3, 10), nterms(1, 12);
    for (int trial = 0; trial < 200; ++trial) {
        const auto vars = names("b", nvars(rng));
        const auto p = random_polynomial(rng, vars, nterms(rng), 4, false).multilinear();
        const auto q = quadratize(p);
        REQUIRE(q.polynomial.degree() <= 2);
        std::vector<std::string> aux;
        for (const auto& r : q.records) aux.push_back(r.aux);
        REQUIRE(aux.size() <= 10);
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << vars.size()); ++code) {
            const auto a = bits_assignment(vars, code);
            REQUIRE(min_over(q.polynomial, a, aux) == p.evaluate(a));
        }
    }
}

TEST_CASE("higher-degree objectives compile through quadratization", "[compiler]") {
    Problem p;
    p.add_binary_array("x", {4});
    p.add_objective("-3*x_0*x_1*x_2 + 2*x_1*x_2*x_3 - x_0*x_3 + x_2");
    const auto model = compile(p);
    CHECK_FALSE(model.aux_registry.empty());
    CHECK(model.quadratic.degree() <= 2);
    const auto s = solve_exhaustive(model);
    const auto vars = names("x_", 4);
    CHECK(s.best_energy() == brute_force_min(p.objectives()[0].expr, vars));
}

TEST_CASE("unsatisfiable constraints produce a warning", "[compiler]") {
    Problem p;
    p.add_binary("x");
    p.add_objective("x");
    p.add_constraint("x >= 2");
    const auto model = compile(p);
    CHECK_FALSE(model.penalties[0].satisfiable);
    CHECK(model.warnings.size() == 1);
}

TEST_CASE("slack precision policy", "[compiler]") {
    Problem p;
    p.add_continuous("c", 0, 2, 0.5);
    p.add_binary("x");
    p.add_objective("c + x");
    p.add_constraint("c + x >= 1");
    p.add_constraint("x <= 0.5");
    p.add_constraint("c >= 0.5", Hardness::hard, 0.25);
    const auto model = compile(p);
    CHECK(model.penalties[0].tolerance == 0.25);
    CHECK(model.penalties[1].tolerance == 0.25);  // step limited by the fractional bound
    CHECK(model.penalties[2].tolerance == 0.125);  // explicit per-constraint precision

    CompileConfig cfg;
    cfg.slack_policy = SlackPolicy::explicit_precision;
    cfg.slack_precision = 1.0;
    CHECK(compile(p, cfg).penalties[0].tolerance == 0.5);
}

TEST_CASE("lambda sufficiency on the worked example", "[compiler][property]") {
    // Every estimate except moc keeps the unconstrained minimum feasible.
    for (auto m : {LambdaMethod::mqc, LambdaMethod::vlm, LambdaMethod::momc, LambdaMethod::ub_naive,
                   LambdaMethod::ub_posiform}) {
        CompileConfig cfg;
        cfg.lambda_method = m;
        const auto s = solve_exhaustive(compile(worked_example(), cfg));
        INFO(to_string(m));
        CHECK(s.best_energy() == Approx(-2.0).margin(1e-9));
        CHECK(s.best_decoded().at("b") == 3.0);
        CHECK(s.best_decoded().at("c") == -1.0);
    }
    // moc's (1, 6) is too small: the minimum violates b + c >= 2.
    CompileConfig cfg;
    cfg.lambda_method = LambdaMethod::moc;
    const auto s = solve_exhaustive(compile(worked_example(), cfg));
    CHECK(s.best_energy() == -2.125);
    CHECK(s.best_decoded().at("b") + s.best_decoded().at("c") < 2.0);
}
