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


#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bilevel/commands.hpp"

namespace {

void common_flags(CLI::App* sub, bilevel::CliOptions& o) {
  sub->add_option("--kind", o.kind, "Reformulation, dual or fiber kind");
  sub->add_option("--point", o.point, "Point as 'x=0;y=1;u=0,1' or a flat list");
  sub->add_option("--tol", o.tol, "Feasibility and verdict tolerance (default 1e-8)");
  sub->add_option("--tol-act", o.tol_act, "Active-set tolerance (default 1e-7)");
  sub->add_option("--step", o.step, "Grid step (default 1e-3)");
  sub->add_option("--radius", o.radius, "Neighbourhood radius (default 0.1)");
  sub->add_option("--workers", o.workers, "Worker threads for grid scans")
      ->check(CLI::Range(1, 256));
  sub->add_flag("--json", o.json, "Print a JSON report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-level reformulations of bilevel optimization problems"};
  app.require_subcommand(1);
  bilevel::CliOptions o;

  auto* reformulate = app.add_subcommand("reformulate", "Emit a single-level reformulation");
  reformulate->add_option("file", o.file, "Problem file")->required();
  common_flags(reformulate, o);

  auto* examples = app.add_subcommand("examples", "Run the built-in example suite");
  examples->add_option("name", o.name, "Example name (all when omitted)");
  common_flags(examples, o);

  auto* compare = app.add_subcommand("compare", "Compare reformulation sizes and properties");
  compare->add_option("file", o.file, "Problem file");
  compare->add_option("--dims", o.dims, "Dimensions n,m,p,q instead of a file");
  common_flags(compare, o);

  auto* check = app.add_subcommand("check", "Run a duality, CQ or verification check");
  check->add_option("what", o.what,
                    "weak-duality | strong-duality | saddle | mfcq | nsmfcq | bcq | slater | "
                    "local | global | enumerate-K | ge-feasible | probe-isc")
      ->required();
  check->add_option("file", o.file, "Problem file")->required();
  check->add_option("--dual", o.dual, "Dual point for duality and saddle checks");
  common_flags(check, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  o.command = app.get_subcommands().front()->get_name();

  const bilevel::CommandResult r = bilevel::run_command(o, bilevel::process_environment());
  std::cout << r.out;
  std::cerr << r.err;
  return r.exit_code;
}
