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

#include <random>

#include "test_support.hpp"

using namespace qubo_forge;
using namespace qubo_forge::testing;

TEST_CASE("declare the worked example", "[problem]") {
    const Problem p = worked_example();
    REQUIRE(p.variables().size() == 3);
    const auto* c = p.find("c");
    REQUIRE(c != nullptr);
    CHECK(c->kind == VariableKind::continuous);
    CHECK(c->encoding.method == EncodingMethod::logarithmic);
    CHECK(c->encoding.base == 2.0);
    CHECK(p.objectives().size() == 1);
    CHECK(p.objectives()[0].sense == Sense::minimize);
    CHECK(p.objectives()[0].weight == 1.0);
    REQUIRE(p.constraints().size() == 1);
    CHECK(p.constraints()[0].hardness == Hardness::hard);
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("binary array names", "[problem]") {
    Problem p;
    const auto obj = p.add_binary_array("obj", {4});
    CHECK(obj == std::vector<std::string>{"obj_0", "obj_1", "obj_2", "obj_3"});
    const auto m = p.add_binary_array("m", {2, 2});
    CHECK(m == std::vector<std::string>{"m_0_0", "m_0_1", "m_1_0", "m_1_1"});
    CHECK_THROWS_AS(p.add_binary_array("t", {2, 2, 2}), Error);
}

TEST_CASE("array declaration equals scalar declarations", "[problem][property]") {
    for (std::size_t m = 1; m <= 6; ++m) {
        Problem arr, scalars;
        const auto a = arr.add_continuous_array("w", {m}, -1, 1, 0.5);
        for (std::size_t i = 0; i < m; ++i) scalars.add_continuous("w_" + std::to_string(i), -1, 1, 0.5);
        CHECK(arr.names() == scalars.names());
        CHECK(a.size() == m);
    }
}

TEST_CASE("single-level discrete variable is allowed", "[problem]") {
    Problem p;
    CHECK(p.add_discrete("b", {-1}) == "b");
}

TEST_CASE("declaration errors", "[problem]") {
    Problem p;
    p.add_binary("x");
    CHECK_THROWS_AS(p.add_binary("x"), Error);
    CHECK_THROWS_AS(p.add_discrete("d", {}), Error);
    CHECK_THROWS_AS(p.add_discrete("d", {1, 1}), Error);
    CHECK_THROWS_AS(p.add_continuous("c", 2, -2, 0.25), Error);
    CHECK_THROWS_AS(p.add_continuous("c", -2, 2, 0), Error);
    CHECK_THROWS_AS(p.add_continuous("c", -2, 2, 5), Error);
    CHECK_THROWS_AS(p.add_binary("1x"), Error);
    CHECK_THROWS_AS(p.add_binary("x#0"), Error);
    CHECK_THROWS_AS(p.add_binary("__slack0"), Error);
    ContinuousEncoding bounded{EncodingMethod::bounded_coefficient, 2.0, 0.1};
    CHECK_THROWS_AS(p.add_continuous("c", -2, 2, 0.5, bounded), Error);
}

TEST_CASE("objectives and constraints", "[problem]") {
    Problem p;
    p.add_binary_array("obj", {4});
    p.add_objective("9*obj_0 + 11*obj_1 + 13*obj_2 + 15*obj_3", Sense::maximize);
    p.add_objective("0");
    CHECK_THROWS_AS(p.add_objective("obj_0", Sense::minimize, 0.0), Error);
    CHECK_THROWS_AS(p.add_objective("obj_0", Sense::minimize, -1.0), Error);
    CHECK_THROWS_AS(p.add_objective("missing", Sense::minimize), ParseError);

    p.add_constraint("obj_0 = obj_0");
    p.add_boolean(BooleanKind::or_, "obj_0", {"obj_1", "obj_2"}, Hardness::weak);
    CHECK(p.constraints().size() == 2);
    CHECK(p.constraints()[1].hardness == Hardness::weak);
    CHECK(p.constraints()[1].to_string() == "obj_0 = or(obj_1, obj_2)");
    CHECK_THROWS_AS(p.add_constraint("obj_0 >= 1", Hardness::hard, 0.0), Error);
    CHECK_THROWS_AS(p.add_boolean(BooleanKind::and_, "obj_0", {"obj_1"}), Error);

    Problem q;
    q.add_binary("x");
    q.add_continuous("c", 0, 1, 0.5);
    CHECK_THROWS_AS(q.add_boolean(BooleanKind::not_, "x", {"c"}), Error);
}

TEST_CASE("validation needs an objective", "[problem]") {
    Problem p;
    p.add_binary("x");
    CHECK_THROWS_AS(p.validate(), Error);
    p.add_objective("x");
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("property: expressions validate iff their variables are declared", "[problem][property]") {
    std::mt19937_64 rng(8);
    const auto all = names("v", 6);
    for (int trial = 0; trial < 100; ++trial) {
        const auto expr = random_polynomial(rng, all, 4, 2);
        std::bernoulli_distribution keep(0.7);
        Problem p;
        VariableSet declared;
        for (const auto& v : all)
            if (keep(rng)) {
                p.add_binary(v);
                declared.insert(v);
            }
        const auto used = expr.variables();
        const bool covered = std::includes(declared.begin(), declared.end(), used.begin(), used.end());
        if (covered) {
            CHECK_NOTHROW(p.add_objective(expr));
            CHECK_NOTHROW(p.validate());
        } else {
            CHECK_THROWS_AS(p.add_objective(expr), Error);
        }
    }
}
