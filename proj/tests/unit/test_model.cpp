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
#include "bilevel/lp.hpp"
#include "bilevel/model.hpp"
#include "bilevel/polyhedron.hpp"
#include "../support/instances.hpp"

using namespace bilevel;
using testing::same_point_set;

namespace {
Eigen::VectorXd v1(double a) { return Eigen::VectorXd::Constant(1, a); }
Eigen::VectorXd v2(double a, double b) { return Eigen::Vector2d(a, b); }
}  // namespace

TEST_CASE("structural convexity certificates") {
  const Expr x = Expr::var("x", 0), y = Expr::var("y", 0);
  CHECK(certify_convex(pow(y, 2), std::vector<std::string>{"y"}));
  CHECK(certify_convex(x * y, std::vector<std::string>{"y"}));
  CHECK_FALSE(certify_convex(pow(y, 3), std::vector<std::string>{"y"}));
  CHECK_FALSE(certify_convex(-pow(y, 2), std::vector<std::string>{"y"}));
  CHECK_FALSE(certify_convex(x * pow(y, 2), std::vector<std::string>{"y"}));
  CHECK(is_affine(x * y, {"y"}));
  CHECK_FALSE(is_affine(x * y, {"x", "y"}));
  CHECK(joint_degree(x * y, {"x", "y"}) == 2);
}

TEST_CASE("make_nlp tags convexity") {
  const VarSpace s({{"y", 1}});
  const Expr y = Expr::var("y", 0);
  CHECK(make_nlp(s, pow(y, 2), {y - 1.0}, {}).convexity == Convexity::kConvex);
  CHECK(make_nlp(s, y, {pow(y, 3) - 8.0}, {}).convexity == Convexity::kUnknown);
  CHECK(make_nlp(s, y, {}, {pow(y, 2) - 1.0}).convexity == Convexity::kUnknown);
  CHECK(cubic_lower_level(8).convexity == Convexity::kUnknown);
}

TEST_CASE("bilevel problems validate block usage") {
  const Expr x = Expr::var("x", 0), y = Expr::var("y", 0);
  CHECK_THROWS_AS(make_bilevel("bad", 1, 1, x, {y}, y, {}), InputError);
  CHECK_THROWS_AS(make_bilevel("bad", 1, 1, Expr::var("z", 0), {}, y, {}), InputError);
  const BilevelProblem bp = running_example();
  CHECK(bp.p == 2);
  CHECK(bp.q == 0);
  CHECK(bp.lower_convex_in_y);
  CHECK(lower_affine_in_y(bp));
}

TEST_CASE("value function of the running example") {
  const BilevelProblem bp = running_example();
  for (double x : {-0.5, 0.0, 0.25, 1.0}) {
    const ValueResult v = value_function(bp, v1(x));
    REQUIRE(v.kind == ValueResult::Kind::kFinite);
    CHECK(v.value == doctest::Approx(std::abs(x) - 1));
    CHECK(solution_membership(bp, v1(x), v1(1 - std::abs(x))));
  }
  CHECK_FALSE(solution_membership(bp, v1(0), v1(0.5)));
}

TEST_CASE("value function signals infeasible and unbounded lower levels") {
  const BilevelProblem e = exploding_multiplier_example();
  CHECK(value_function(e, v1(-1)).kind == ValueResult::Kind::kMinusInfinity);
  const Expr x = Expr::var("x", 0), y = Expr::var("y", 0);
  const BilevelProblem empty = make_bilevel("empty", 1, 1, x, {}, y, {y + 1.0, -y + 1.0});
  CHECK(value_function(empty, v1(0)).kind == ValueResult::Kind::kPlusInfinity);
  const BilevelProblem unb = make_bilevel("unb", 1, 1, x, {}, y, {});
  CHECK(value_function(unb, v1(0)).kind == ValueResult::Kind::kMinusInfinity);
}

TEST_CASE("multiplier set at (0,1) is the unit simplex edge") {
  const BilevelProblem bp = running_example();
  const MultiplierPolyhedron mp = multiplier_set(bp, v1(0), v1(1));
  CHECK(mp.active == std::vector<int>{0, 1});
  const PolyhedronDescription d = polyhedron_vertices(mp);
  CHECK(same_point_set(d.vertices, {v2(1, 0), v2(0, 1)}, 1e-9));
  CHECK(d.bounded());
  const MultiplierPolyhedron mq = multiplier_set(bp, v1(0.5), v1(0.5));
  CHECK(same_point_set(polyhedron_vertices(mq).vertices, {v2(1, 0)}, 1e-9));
}

TEST_CASE("Lagrangian and KKT residual") {
  const BilevelProblem bp = running_example();
  const Nlp lower = lower_level(bp, v1(0));
  CHECK(kkt_residual(lower, v1(1), v2(0.5, 0.5)) == doctest::Approx(0).epsilon(1e-12));
  CHECK(kkt_residual(lower, v1(1), v2(1, 1)) > 0.5);
  CHECK(print(lagrangian(bp)).find("(var u 0)") != std::string::npos);
}

TEST_CASE("simplex solves, detects infeasibility and unboundedness") {
  LinearProgram lp(2);
  lp.c = v2(-1, -1);
  lp.add_le(Eigen::RowVector2d(1, 2), 4);
  lp.add_le(Eigen::RowVector2d(3, 1), 6);
  lp.lower = Eigen::VectorXd::Zero(2);
  LpResult r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::kOptimal);
  CHECK(r.value == doctest::Approx(-2.8));

  LinearProgram inf(1);
  inf.add_le(Eigen::RowVectorXd::Ones(1), -1);
  inf.lower = Eigen::VectorXd::Zero(1);
  CHECK(solve_lp(inf).status == LpStatus::kInfeasible);

  LinearProgram unb(1);
  unb.c = v1(-1);
  unb.lower = Eigen::VectorXd::Zero(1);
  r = solve_lp(unb);
  REQUIRE(r.status == LpStatus::kUnbounded);
  CHECK(r.ray[0] > 0);
}

TEST_CASE("polyhedron enumeration returns vertices, rays and lineality") {
  Polyhedron box(2);
  box.add_nonneg(0);
  box.add_nonneg(1);
  box.add_le(Eigen::RowVector2d(1, 1), 1);
  const PolyhedronDescription d = enumerate_polyhedron(box);
  CHECK(same_point_set(d.vertices, {v2(0, 0), v2(1, 0), v2(0, 1)}, 1e-9));
  CHECK(d.edges.size() == 3);

  Polyhedron half(2);
  half.add_nonneg(0);
  const PolyhedronDescription h = enumerate_polyhedron(half);
  CHECK(h.vertices.size() == 1);
  CHECK(h.rays.size() == 1);
  CHECK(h.lineality.size() == 1);

  Polyhedron empty(1);
  empty.add_le(Eigen::RowVectorXd::Ones(1), -1);
  empty.add_nonneg(0);
  CHECK(enumerate_polyhedron(empty).empty());
  CHECK(numerical_rank(Eigen::Matrix2d::Identity()) == 2);
  CHECK(null_space(Eigen::RowVector2d(1, 1)).cols() == 1);
}

TEST_CASE("convex solver matches closed-form QP solutions") {
  const VarSpace s({{"y", 2}});
  const Expr y0 = Expr::var("y", 0), y1 = Expr::var("y", 1);
  const Nlp nlp = make_nlp(s, pow(y0 - 1.0, 2) + pow(y1 - 2.0, 2), {y0 + y1 - 1.0}, {});
  const SolveReport r = solve_convex(nlp, Eigen::VectorXd::Zero(2));
  REQUIRE(r.status == SolveStatus::kOptimal);
  CHECK(r.point[0] == doctest::Approx(0));
  CHECK(r.point[1] == doctest::Approx(1));
  CHECK(r.multipliers[0] == doctest::Approx(2));
  CHECK(r.kkt_residual <= 1e-8);
  CHECK_THROWS_AS(solve_convex(cubic_lower_level(8), Eigen::VectorXd::Zero(1)), InputError);
}

TEST_CASE("convex solver handles non-quadratic convex programs") {
  const VarSpace s({{"y", 1}});
  const Expr y = Expr::var("y", 0);
  const Nlp nlp = make_nlp(s, pow(y, 4) - 4.0 * y, {y - 0.5}, {});
  const SolveReport r = solve_convex(nlp, Eigen::VectorXd::Zero(1), 1e-9);
  REQUIRE(r.status != SolveStatus::kInfeasible);
  CHECK(r.point[0] == doctest::Approx(0.5).epsilon(1e-5));
}
