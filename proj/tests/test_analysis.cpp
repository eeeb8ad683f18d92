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
#include <limits>
#include <random>

#include "test_support.hpp"

using namespace qubo_forge;
using namespace qubo_forge::testing;

namespace {

Problem knapsack() { return knapsack_problem(load_knapsack(data_path("f3_l-d_kp_4_20.txt"))); }

Decoded items(std::initializer_list<double> bits) {
    Decoded d;
    std::size_t i = 0;
    for (double b : bits) d["obj_" + std::to_string(i++)] = b;
    return d;
}

// Independent form of the time-to-solution formula.
double tts_reference(double t_f, double p_conf, double p) { return t_f * std::log1p(-p_conf) / std::log1p(-p); }

}  // namespace

TEST_CASE("p_range counts strictly lower energies", "[analysis]") {
    std::vector<double> e(100, -20.0);
    for (std::size_t i = 0; i < 40; ++i) e[i] = -31.0;
    CHECK(p_range(e, -30.0) == 40.0);
    CHECK(p_range(e, 0.0) == 100.0);
    CHECK(p_range({-30.0}, -30.0) == 0.0);
    CHECK(p_range({}, 1.0) == 0.0);
}

TEST_CASE("time to solution", "[analysis]") {
    CHECK(tts(1.0, 0.99, 0.5) == Approx(6.64385618977).epsilon(1e-9));
    CHECK(tts(2.0, 0.9, 0.1) == Approx(43.7086906536).epsilon(1e-9));
    CHECK(tts(3.0, 0.7, 0.7) == Approx(3.0));
    CHECK(std::isinf(tts(1.0, 0.99, 0.0)));
    CHECK(tts(1.5, 0.99, 1.0) == 1.5);
    CHECK_THROWS_AS(tts(1.0, 1.0, 0.5), Error);
    CHECK_THROWS_AS(tts(1.0, 0.5, 1.5), Error);
}

TEST_CASE("property: tts matches the log form and decreases in p", "[analysis][property]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> t(0.01, 100.0), conf(0.5, 0.999);
    for (int trial = 0; trial < 200; ++trial) {
        const double t_f = t(rng), p_conf = conf(rng);
        double previous = std::numeric_limits<double>::infinity();
        for (int k = 1; k < 100; ++k) {
            const double p = k / 100.0;
            const double value = tts(t_f, p_conf, p);
            CHECK(value == Approx(tts_reference(t_f, p_conf, p)).epsilon(1e-9));
            CHECK(value < previous);
            previous = value;
        }
    }
}

TEST_CASE("cumulative distribution", "[analysis]") {
    const auto c = cumulative_distribution({3, 1, 2});
    REQUIRE(c.size() == 3);
    CHECK(c[0] == CumulativePoint{1, 1.0 / 3});
    CHECK(c[1] == CumulativePoint{2, 2.0 / 3});
    CHECK(c[2] == CumulativePoint{3, 1.0});
    CHECK(cumulative_distribution({5, 5}) == std::vector<CumulativePoint>{{5, 1.0}});
    CHECK(cumulative_distribution({}).empty());
}

TEST_CASE("property: cumulative is a non-decreasing step ending at one", "[analysis][property]") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> size(1, 60), value(-10, 10);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> e(static_cast<std::size_t>(size(rng)));
        for (auto& x : e) x = value(rng);
        const auto c = cumulative_distribution(e);
        for (std::size_t k = 1; k < c.size(); ++k) {
            CHECK(c[k].energy > c[k - 1].energy);
            CHECK(c[k].fraction > c[k - 1].fraction);
        }
        CHECK(c.back().fraction == 1.0);
        // each fraction is the share of energies at or below its point
        for (const auto& pt : c) {
            const auto below = std::count_if(e.begin(), e.end(), [&](double x) { return x <= pt.energy; });
            CHECK(pt.fraction == Approx(static_cast<double>(below) / e.size()));
        }
    }
}

TEST_CASE("knapsack constraint checks", "[analysis]") {
    const auto p = knapsack();
    const auto all = check_constraints(items({1, 1, 1, 1}), p);
    REQUIRE(all.size() == 1);
    CHECK_FALSE(all[0].satisfied);
    CHECK(all[0].residual == 7.0);  // weights 6 + 5 + 9 + 7 against capacity 20

    const auto best = check_constraints(items({1, 1, 0, 1}), p);
    CHECK(best[0].satisfied);
    CHECK(best[0].residual == 0.0);
    CHECK(objective_values(items({1, 1, 0, 1}), p) == std::vector<double>{35});
    CHECK_THROWS_AS(check_constraints({{"obj_0", 1}}, p), Error);
}

TEST_CASE("objective values keep their own sense", "[analysis]") {
    Problem p;
    p.add_binary("x");
    p.add_objective("7");
    p.add_objective("3*x", Sense::maximize, 2.0);
    CHECK(objective_values({{"x", 1}}, p) == std::vector<double>{7, 3});
    CHECK(objective_values(solve_exhaustive(compile(worked_example())).best_decoded(), worked_example()) ==
          std::vector<double>{-2});
}

TEST_CASE("weak constraints are reported but not counted", "[analysis]") {
    Problem p;
    p.add_binary("x");
    p.add_binary("y");
    p.add_objective("x + y");
    p.add_constraint("x + y = 1", Hardness::weak);
    const Decoded zero{{"x", 0}, {"y", 0}};
    const auto r = check_constraints(zero, p);
    CHECK_FALSE(r[0].counted);
    CHECK_FALSE(r[0].satisfied);
    CHECK(all_satisfied(r));
    CHECK_FALSE(all_satisfied(check_constraints(zero, p, true)));
}

TEST_CASE("boolean relation checks", "[analysis]") {
    Problem p;
    for (const auto* n : {"x", "y", "z"}) p.add_binary(n);
    p.add_objective("x");
    p.add_boolean(BooleanKind::and_, "z", {"x", "y"});
    CHECK(check_constraints({{"x", 1}, {"y", 1}, {"z", 1}}, p)[0].satisfied);
    const auto bad = check_constraints({{"x", 1}, {"y", 0}, {"z", 1}}, p)[0];
    CHECK_FALSE(bad.satisfied);
    CHECK(bad.residual == 1.0);
}

TEST_CASE("grid tolerance on continuous constraints", "[analysis]") {
    Problem p;
    p.add_continuous("c", -2, 2, 0.25);
    p.add_objective("c");
    p.add_constraint("c >= 0.5");
    p.add_constraint("c < 1");
    CHECK(check_constraints({{"c", 0.5}}, p)[0].satisfied);
    CHECK_FALSE(check_constraints({{"c", 0.25}}, p)[0].satisfied);
    CHECK(check_constraints({{"c", 0.75}}, p)[1].satisfied);
    CHECK_FALSE(check_constraints({{"c", 1.0}}, p)[1].satisfied);
    CHECK(check_constraints({{"c", 0.25}}, p)[0].residual == 0.25);
}

TEST_CASE("analysis of the worked example", "[analysis]") {
    const auto p = worked_example();
    const auto model = compile(p);
    const auto s = solve_exhaustive(model);
    const auto r = analyze(s, model, p);
    CHECK(r.best_energy == -2.0);
    CHECK(r.best_feasible);
    CHECK(r.valid_rate == 100.0);
    CHECK(r.p_range == 100.0);
    CHECK(r.constraint_results.size() == 1);
    CHECK(r.constraint_results[0].residual == 0.0);
    CHECK_FALSE(r.t_f);
    CHECK_FALSE(r.tts);
    CHECK_THROWS_AS(analyze(SolutionSet{}, model, p), Error);
}

TEST_CASE("knapsack sa report recounts", "[analysis]") {
    const auto p = knapsack();
    const auto model = compile(p);
    SolverParams params;
    params.record_time = true;
    params.sweeps = 30;
    const auto s = solve_sa(model, params);
    AnalysisOptions opt;
    opt.val_ref = -30.0;
    const auto r = analyze(s, model, p, opt);

    std::size_t below = 0, feasible = 0;
    for (std::size_t k = 0; k < s.samples.size(); ++k) {
        if (s.samples[k].energy < -30.0) ++below;
        const auto& d = s.decoded[k];
        double w = 6 * d.at("obj_0") + 5 * d.at("obj_1") + 9 * d.at("obj_2") + 7 * d.at("obj_3");
        if (w <= 20) ++feasible;
    }
    CHECK(r.p_range == Approx(below));
    CHECK(r.valid_rate == Approx(feasible));
    REQUIRE(r.t_f);
    REQUIRE(r.tts);
    CHECK(*r.tts == Approx(tts(*r.t_f, 0.99, r.p_range / 100.0)));
}

TEST_CASE("property: feasible best solutions have residuals within tolerance", "[analysis][property]") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const auto k = random_knapsack(5, seed, 12);
        const auto p = knapsack_problem(k);
        const auto model = compile(p);
        SolverParams params;
        params.runs = 10;
        params.sweeps = 50;
        params.seed = seed;
        const auto s = solve_sa(model, params);
        const auto r = analyze(s, model, p);
        if (r.best_feasible)
            for (const auto& c : r.constraint_results) CHECK(c.residual <= 0.5);
        CHECK(r.valid_rate >= 0.0);
        CHECK(r.valid_rate <= 100.0);
    }
}
