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

#ifndef QUBO_FORGE_QUBO_FORGE_HPP_INCLUDED
#define QUBO_FORGE_QUBO_FORGE_HPP_INCLUDED

#include "qubo_forge/error.hpp"
#include "qubo_forge/expression.hpp"
#include "qubo_forge/problem.hpp"
#include "qubo_forge/encoding.hpp"
#include "qubo_forge/compiler.hpp"
#include "qubo_forge/solvers.hpp"
#include "qubo_forge/analysis.hpp"
#include "qubo_forge/lambda_update.hpp"
#include "qubo_forge/io.hpp"

#endif  // QUBO_FORGE_QUBO_FORGE_HPP_INCLUDED
