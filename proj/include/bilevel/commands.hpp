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

// Subcommand dispatch behind the bilevel executable.
//
// Exit codes: 0 when the command completed and the verdict holds, 1 when it
// completed with a negative verdict, 2 on input or capability errors.

#ifndef BILEVEL_COMMANDS_HPP_
#define BILEVEL_COMMANDS_HPP_

#include <map>
#include <optional>
#include <string>

namespace bilevel {

struct CliOptions {
  std::string command;  // reformulate | examples | compare | check
  std::string file;
  std::string name;     // example name
  std::string what;     // check target
  std::string kind;
  std::string point;
  std::string dual;
  std::string dims;     // "n,m,p,q" for compare without a file
  std::optional<double> tol;
  std::optional<double> tol_act;
  std::optional<double> step;
  std::optional<double> radius;
  int workers = 1;
  bool json = false;
};

struct CommandResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

using Environment = std::map<std::string, std::string>;

// Reads BILEVEL_TOL, BILEVEL_TOL_ACT, BILEVEL_STEP and BILEVEL_RADIUS from
// the process environment.
Environment process_environment();

struct Tolerances {
  double tol = 1e-8;
  double tol_act = 1e-7;
  double step = 1e-3;
  double radius = 0.1;
  std::map<std::string, double> as_map() const;
};

// Flag, then problem-file setting, then environment, then default.
Tolerances resolve_tolerances(const CliOptions& options,
                              const std::map<std::string, double>& file_settings,
                              const Environment& env);

CommandResult run_command(const CliOptions& options, const Environment& env);

}  // namespace bilevel

#endif  // BILEVEL_COMMANDS_HPP_
