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

// Built-in example problems and the example suite.

#ifndef BILEVEL_EXAMPLES_HPP_
#define BILEVEL_EXAMPLES_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "bilevel/model.hpp"
#include "bilevel/verify.hpp"

namespace bilevel {

// min (x-1)^2 + (y-1)^2 s.t. y solves min -y s.t. x+y <= 1, -x+y <= 1.
BilevelProblem running_example();

// Lower level min x(y1+y2) s.t. y1+y2 <= 2, y1-y2 <= 0 with upper level
// objective x^2 + y1^2 + (y2-1)^2.
BilevelProblem bcq_fails_example();

// Lower level min y s.t. y^3 <= x, y >= 0 at fixed x (not convex in y).
Nlp cubic_lower_level(double x);

// Lower level min -y s.t. x(y-1) <= 0, used to exhibit multipliers 1/x.
BilevelProblem exploding_multiplier_example();

// Scan box over every block of `space`: multiplier blocks ("u", "v") span
// [0, 1] at step 0.1, all other blocks span [-radius, radius] at `step`.
Box multiplier_aware_box(const VarSpace& space, double radius, double step);

const std::vector<std::string>& example_names();

struct ExampleAssertion {
  std::string name;
  bool passed = false;
};

struct ExampleOutcome {
  std::string name;
  std::vector<ExampleAssertion> assertions;
  nlohmann::json details;
  bool passed() const;
};

struct ExampleSettings {
  int workers = 1;
};

// Throws InputError for unknown names.
ExampleOutcome run_example(const std::string& name, const ExampleSettings& settings = {});

}  // namespace bilevel

#endif  // BILEVEL_EXAMPLES_HPP_
