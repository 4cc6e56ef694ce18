// Copyright 2026 The Bilevel Reformulation Authors
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

#ifndef BILEVEL_ERRORS_HPP_
#define BILEVEL_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bilevel {

// Malformed or inconsistent caller input (dimension mismatch, infeasible
// point where feasibility is a precondition, unknown names, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The input is valid but falls outside the structural class an operation
// supports (non-polynomial structure, enumeration caps, ...).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InputError(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace bilevel

#endif  // BILEVEL_ERRORS_HPP_
