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

#include "bilevel/errors.hpp"
#include "bilevel/examples.hpp"
#include "bilevel/verify.hpp"
#include "../support/instances.hpp"

using namespace bilevel;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}
Expr Y(int i = 0) { return Expr::var("y", i); }

GridProblem parabola(double c) {
  const VarSpace s({{"y", 1}});
  return GridProblem::from(make_nlp(s, pow(Y() + (-c), 2), {}, {}));
}
}  // namespace

TEST_CASE("box grid sizes") {
  const VarSpace s({{"y", 2}});
  CHECK(Box::uniform(Point::zeros(s), 1.0, 0.5).grid_size() == 25);
  CHECK(Box::uniform(Point::zeros(s), 1.0, 1e-9).grid_size() > (std::uint64_t{1} << 40));
}

TEST_CASE("global grid scan finds the grid minimiser") {
  const VarSpace s({{"y", 1}});
  const SolveReport r = brute_force_global(parabola(0.3), Box::uniform(Point::zeros(s), 1, 0.1));
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.point[0] == doctest::Approx(0.3));
  CHECK(r.value == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("global grid scan respects constraints and detects infeasibility") {
  const VarSpace s({{"y", 1}});
  const Box box = Box::uniform(Point::zeros(s), 1, 0.25);
  const SolveReport c =
      brute_force_global(GridProblem::from(make_nlp(s, Y(), {-Y() + 0.5}, {})), box);
  REQUIRE(c.status == SolveStatus::kOptimal);
  CHECK(c.point[0] == doctest::Approx(0.5));
  const SolveReport none =
      brute_force_global(GridProblem::from(make_nlp(s, Y(), {-Y() + 5.0}, {})), box);
  CHECK(none.status == SolveStatus::kInfeasible);
}

TEST_CASE("global grid scan is independent of the worker count") {
  const BilevelProblem bp = running_example();
  const GridProblem gp = GridProblem::from(build_vf_ref(bp));
  const Box box = Box::uniform(Point::zeros(build_vf_ref(bp).nlp.space), 2.0, 0.01);
  ScanOptions one, many;
  many.workers = 4;
  const SolveReport a = brute_force_global(gp, box, one);
  const SolveReport b = brute_force_global(gp, box, many);
  CHECK(a.value == b.value);
  CHECK(a.point == b.point);
  CHECK(a.value == doctest::Approx(0.5));
}

TEST_CASE("scan budget raises a capability error") {
  const VarSpace s({{"y", 1}});
  ScanOptions tight;
  tight.max_nodes = 100;
  CHECK_THROWS_AS(
      brute_force_global(parabola(0), Box::uniform(Point::zeros(s), 1, 1e-3), tight),
      CapabilityError);
}

TEST_CASE("local certificates") {
  const LocalCertificate ok = local_min_certificate(parabola(0), vec({0}), 0.1, 0.01);
  CHECK(ok.verdict == LocalCertificate::Verdict::kNoBetterPoint);
  const LocalCertificate bad = local_min_certificate(parabola(0), vec({0.5}), 0.1, 0.01);
  CHECK(bad.verdict == LocalCertificate::Verdict::kCounterexample);
  CHECK(bad.witness_value < bad.value);
  CHECK(bad.drop > 0);
}

TEST_CASE("fibers of the intermediate mappings on the running example") {
  const BilevelProblem bp = running_example();
  const KFiber ell = enumerate_K(bp, FiberKind::kEll, vec({0}), vec({1}));
  CHECK(ell.checked_against_multipliers);
  CHECK(ell.matches_multipliers);
  CHECK(testing::same_point_set(ell.description.vertices, {vec({1, 0}), vec({0, 1})}, 1e-9));
  const KFiber mw = enumerate_K(bp, FiberKind::kMw, vec({0}), vec({1}));
  CHECK(mw.blocks == std::vector<std::string>{"z", "u"});
  CHECK(testing::same_point_set(mw.description.vertices, {vec({1, 0, 1}), vec({1, 1, 0})},
                                1e-9));
  CHECK(enumerate_K(bp, FiberKind::kEll, vec({0}), vec({0.5})).description.vertices.empty());
  CHECK(fiber_for(ReformKind::kWd) == FiberKind::kW);
  CHECK(parse_fiber_kind("mw") == FiberKind::kMw);
  CHECK(parse_fiber_kind("ld") == FiberKind::kEll);
}

TEST_CASE("quantified local check on the Lagrange reformulation") {
  const BilevelProblem bp = running_example();
  const QuantifiedReport r =
      quantified_local_check(bp, ReformKind::kLd, vec({0}), vec({1}), 0.05, 0.01);
  CHECK_FALSE(r.entries.empty());
  CHECK_FALSE(r.all_local);
}

TEST_CASE("inner semicompactness probe") {
  const ProbeReport bounded =
      inner_semicompactness_probe(running_example(), FiberKind::kEll, vec({0}), vec({1}), 0.1);
  CHECK(bounded.bounded_evidence);
  CHECK_FALSE(bounded.unbounded_evidence);
  const ProbeReport exploding = inner_semicompactness_probe(
      exploding_multiplier_example(), FiberKind::kEll, vec({0}), vec({1}), 0.1);
  CHECK(exploding.unbounded_evidence);
}
