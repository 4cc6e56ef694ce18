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


#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "bilevel/commands.hpp"
#include "bilevel/errors.hpp"
#include "bilevel/examples.hpp"
#include "bilevel/problem_file.hpp"
#include "bilevel/report.hpp"

using namespace bilevel;

namespace {
const std::string kData = BILEVEL_DATA_DIR;

const char* kRunning = R"PF(# comment
name = running
n = 1
m = 1
F = "(+ (pow (+ (var x 0) (const -1)) 2) (pow (+ (var y 0) (const -1)) 2))"
f = "(neg (var y 0))"
g[0] = "(+ (var x 0) (var y 0) (const -1))"
g[1] = "(+ (neg (var x 0)) (var y 0) (const -1))"
tol = 1e-9
)PF";

CliOptions check(const std::string& what, const std::string& file) {
  CliOptions o;
  o.command = "check";
  o.what = what;
  o.file = kData + "/" + file;
  return o;
}
}  // namespace

TEST_CASE("problem files parse into bilevel problems") {
  const ProblemFile pf = parse_problem_file(kRunning);
  CHECK(pf.problem.name == "running");
  CHECK(pf.problem.p == 2);
  CHECK(pf.problem.q == 0);
  CHECK(pf.settings.at("tol") == 1e-9);
  CHECK(pf.text == kRunning);
  const ProblemFile again = parse_problem_file(write_problem_file(pf.problem));
  CHECK(print(again.problem.F) == print(pf.problem.F));
  CHECK(print(again.problem.g[1]) == print(pf.problem.g[1]));
}

TEST_CASE("problem file errors carry line numbers") {
  const auto message = [](const std::string& text) {
    try {
      parse_problem_file(text);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("n = 1\nm = 1\nbogus = 3\n").find("line 3") != std::string::npos);
  CHECK(message("n = 1\nn = 2\n").find("duplicate") != std::string::npos);
  CHECK(message("n = 1\nm = 1\nF = \"(var x 0)\"\nf = \"(var y 0)\"\ng[1] = \"(var y 0)\"\n")
            .find("missing g[0]") != std::string::npos);
  CHECK(message("n = 1\nm = 1\nF = \"(var x 0)\"\nf = \"(var z 0)\"\n").find("line 4") !=
        std::string::npos);
  CHECK(message("n = 1\nm = 1\np = 3\nF = \"(var x 0)\"\nf = \"(var y 0)\"\n")
            .find("line 3") != std::string::npos);
  CHECK(message("n = 1\nm = 1\nF = \"(var x 0)\"\nf = \"(var y 0)\"\ntol = -1\n")
            .find("positive") != std::string::npos);
  CHECK_FALSE(message("n = 1\nm = 1\nF = \"(var x 0)\"\nG[0] = \"(var y 0)\"\n").empty());
  CHECK_THROWS_AS(load_problem_file(kData + "/no-such.problem"), InputError);
}

TEST_CASE("points by block or flat") {
  const VarSpace s({{"x", 1}, {"y", 1}, {"u", 2}});
  const Eigen::VectorXd a = parse_point("u=0.25,0.75; x=1; y=-2", s);
  const Eigen::VectorXd b = parse_point("1,-2,0.25,0.75", s);
  CHECK(a == b);
  CHECK_THROWS_AS(parse_point("x=1;y=2", s), InputError);
  CHECK_THROWS_AS(parse_point("1,2,3", s), InputError);
  CHECK_THROWS_AS(parse_point("x=1;x=1;y=0;u=0,0", s), InputError);
  CHECK_THROWS_AS(parse_point("1,2,abc,4", s), InputError);
}

TEST_CASE("deterministic JSON") {
  nlohmann::json j;
  j["b"] = 0.1;
  j["a"] = std::numeric_limits<double>::infinity();
  j["c"] = std::vector<double>{1, 2};
  const std::string s = dump_json(j);
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("\"inf\"") != std::string::npos);
  CHECK(format_double(0.5) == "0.5");
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  const auto report = make_report({{"subcommand", "check"}}, "abc", nlohmann::json::object(),
                                  {{"tol", 1e-8}});
  CHECK(report.at("version") == kToolVersion);
  CHECK(report.at("inputs_digest") == fnv1a_hex("abc"));
}

TEST_CASE("tolerance precedence: flag, file, environment, default") {
  CliOptions o;
  Tolerances t = resolve_tolerances(o, {}, {});
  CHECK(t.tol == 1e-8);
  CHECK(t.tol_act == 1e-7);
  CHECK(t.step == 1e-3);
  CHECK(t.radius == 0.1);
  const Environment env{{"BILEVEL_TOL", "1e-6"}, {"BILEVEL_RADIUS", "0.5"}};
  t = resolve_tolerances(o, {}, env);
  CHECK(t.tol == 1e-6);
  CHECK(t.radius == 0.5);
  t = resolve_tolerances(o, {{"tol", 1e-7}}, env);
  CHECK(t.tol == 1e-7);
  CHECK(t.radius == 0.5);
  o.tol = 1e-4;
  t = resolve_tolerances(o, {{"tol", 1e-7}}, env);
  CHECK(t.tol == 1e-4);
  CHECK_THROWS_AS(resolve_tolerances(CliOptions{}, {}, {{"BILEVEL_TOL", "tiny"}}), InputError);
  CHECK(t.as_map().size() == 4);
}

TEST_CASE("check exit codes") {
  CliOptions mfcq = check("mfcq", "running.problem");
  mfcq.kind = "wd";
  mfcq.point = "x=0;y=1;z=1;u=0,1";
  CHECK(run_command(mfcq, {}).exit_code == 1);

  CliOptions slater = check("slater", "running.problem");
  slater.point = "x=0";
  CHECK(run_command(slater, {}).exit_code == 0);

  CHECK(run_command(check("bogus", "running.problem"), {}).exit_code == 2);
  CHECK(run_command(check("slater", "missing.problem"), {}).exit_code == 2);

  CliOptions vf = check("mfcq", "running.problem");
  vf.kind = "vf";
  vf.point = "x=0.5;y=0.5";
  CHECK(run_command(vf, {}).exit_code == 2);

  CliOptions bad_env = slater;
  CHECK(run_command(bad_env, {{"BILEVEL_TOL", "-1"}}).exit_code == 2);
}

TEST_CASE("reformulate output") {
  CliOptions o;
  o.command = "reformulate";
  o.file = kData + "/running.problem";
  o.kind = "ge";
  const CommandResult ge = run_command(o, {});
  CHECK(ge.exit_code == 0);
  CHECK(ge.out.find("feasibility-test-only") != std::string::npos);
  o.kind = "ld";
  o.json = true;
  const CommandResult ld = run_command(o, {});
  CHECK(ld.exit_code == 0);
  const auto j = nlohmann::json::parse(ld.out);
  CHECK(j.at("command").at("kind") == "ld");
  CHECK(j.contains("tolerances"));
  CHECK(run_command(o, {}).out == ld.out);
}

TEST_CASE("compare accepts dimensions") {
  CliOptions o;
  o.command = "compare";
  o.dims = "2,3,4,1";
  const CommandResult r = run_command(o, {});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("13") != std::string::npos);
  o.dims = "2,3";
  CHECK(run_command(o, {}).exit_code == 2);
}

TEST_CASE("examples by name") {
  CliOptions o;
  o.command = "examples";
  o.name = "bcq-fails";
  CHECK(run_command(o, {}).exit_code == 0);
  o.name = "no-such-example";
  CHECK(run_command(o, {}).exit_code == 2);
}
