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

#ifndef QUBO_FORGE_ERROR_HPP_INCLUDED
#define QUBO_FORGE_ERROR_HPP_INCLUDED

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qubo_forge {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression or constraint text. `position()` is a 0-based
/// character offset into the parsed string.
class ParseError : public Error {
 public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message + " (at position " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

 private:
    std::size_t position_;
};

}  // namespace qubo_forge

#endif  // QUBO_FORGE_ERROR_HPP_INCLUDED
