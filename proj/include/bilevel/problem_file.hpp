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

// Line-oriented problem files:
//
//   # comment
//   name = running
//   n = 1
//   m = 1
//   F = "(+ (pow (+ (var x 0) (const -1)) 2) (pow (+ (var y 0) (const -1)) 2))"
//   f = "(neg (var y 0))"
//   g[0] = "(+ (var x 0) (var y 0) (const -1))"
//
// p and q default to the number of g[i] / G[i] entries. Optional numeric
// keys: tol, tol_act, step, radius, box_radius, box_step.

#ifndef BILEVEL_PROBLEM_FILE_HPP_
#define BILEVEL_PROBLEM_FILE_HPP_

#include <map>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "bilevel/model.hpp"

namespace bilevel {

struct ProblemFile {
  BilevelProblem problem;
  std::map<std::string, double> settings;
  std::string text;
};

ProblemFile parse_problem_file(std::string_view text);
ProblemFile load_problem_file(const std::string& path);

// Parses "x=0;y=1;u=0,1" (every block of space, any order) or a flat
// comma-separated list in the flat order of space.
Eigen::VectorXd parse_point(const std::string& text, const VarSpace& space);

// Canonical problem-file text for a problem (round-trips through the parser).
std::string write_problem_file(const BilevelProblem& bp);

}  // namespace bilevel

#endif  // BILEVEL_PROBLEM_FILE_HPP_
