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

#include <random>

#include "bilevel/errors.hpp"
#include "bilevel/expr.hpp"
#include "../support/instances.hpp"

using namespace bilevel;

namespace {
const VarSpace kSpace({{"x", 1}, {"y", 2}});
const char* kText = "(+ (* (const 2) (var x 0) (var y 1)) (pow (var y 0) 3) (neg (const 1)))";
}  // namespace

TEST_CASE("var spaces index blocks in declaration order") {
  CHECK(kSpace.total_dim() == 3);
  CHECK(kSpace.offset("y") == 1);
  CHECK(kSpace.flat_index("y", 1) == 2);
  CHECK_THROWS_AS(kSpace.flat_index("y", 2), InputError);
  CHECK_THROWS_AS(kSpace.block("z"), InputError);
  CHECK_THROWS_AS(VarSpace({{"x", 1}, {"x", 2}}), InputError);
  CHECK_THROWS_AS(VarSpace({{"x", 0}}), InputError);
  CHECK(VarSpace::from_nonempty({{"x", 1}, {"u", 0}}).blocks().size() == 1);
}

TEST_CASE("points read and write blocks") {
  Point p = Point::zeros(kSpace);
  p.set_block("y", Eigen::Vector2d(4, 5));
  CHECK(p.at("y", 1) == 5);
  CHECK(p.block("x")[0] == 0);
  CHECK_THROWS_AS(p.set_block("y", Eigen::VectorXd::Ones(3)), InputError);
  CHECK_THROWS_AS(Point(kSpace, Eigen::VectorXd::Zero(2)), InputError);
}

TEST_CASE("parse keeps structure and print round-trips") {
  const Expr e = parse(kText, kSpace);
  CHECK(print(e) == kText);
  CHECK(print(parse(print(e), kSpace)) == print(e));
  CHECK(print(simplify(e)) ==
        "(+ (* (const 2) (var x 0) (var y 1)) (pow (var y 0) 3) (const -1))");
}

TEST_CASE("parse errors report a position") {
  CHECK_THROWS_AS(parse("(var z 0)", kSpace), ParseError);
  CHECK_THROWS_AS(parse("(+ (var x 0)", kSpace), ParseError);
  CHECK_THROWS_AS(parse("(var x 3)", kSpace), ParseError);
  CHECK_THROWS_AS(parse("(pow (var x 0) -1)", kSpace), InputError);
  CHECK_THROWS_AS(parse("(const 1) (const 2)", kSpace), ParseError);
  try {
    parse("(+ (var x 0) (bogus))", kSpace);
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.position() > 0);
  }
}

TEST_CASE("folding builders merge constants and drop neutral elements") {
  const Expr x = Expr::var("x", 0);
  CHECK(print(x * Expr::constant(0.0)) == "(const 0)");
  CHECK(print(Expr::sum({})) == "(const 0)");
  CHECK(print(pow(x, 1)) == "(var x 0)");
  CHECK(print(pow(x, 0)) == "(const 1)");
  CHECK(print(x + 1.0 + 2.0) == "(+ (var x 0) (const 3))");
  CHECK(print(x - 1.0) == "(+ (var x 0) (const -1))");
  CHECK(print(-(-x)) == "(var x 0)");
}

TEST_CASE("evaluation matches the compiled program") {
  const Expr e = parse(kText, kSpace);
  const Point p(kSpace, Eigen::Vector3d(1, 2, 3));
  CHECK(eval(e, p) == doctest::Approx(2 * 3 + 8 - 1));
  CHECK(CompiledExpr(e, kSpace)(p.values) == doctest::Approx(eval(e, p)));
  CHECK(CompiledExpr(e, kSpace).max_index() == 2);
}

TEST_CASE("symbolic derivatives") {
  const Expr e = parse(kText, kSpace);
  CHECK(print(diff(e, "y", 0)) == "(* (const 3) (pow (var y 0) 2))");
  const Point p(kSpace, Eigen::Vector3d(1, 2, 3));
  const Eigen::VectorXd g = grad(e, "y", p);
  CHECK(g[0] == doctest::Approx(12));
  CHECK(g[1] == doctest::Approx(2));
  const Eigen::MatrixXd H = hessian(e, "y", "y", p);
  CHECK(H(0, 0) == doctest::Approx(12));
  CHECK(H(1, 1) == doctest::Approx(0));
  CHECK(hessian(e, "x", "y", p)(0, 1) == doctest::Approx(2));
}

TEST_CASE("structural queries and rewrites") {
  const Expr e = parse(kText, kSpace);
  CHECK(degree(e, "y") == 3);
  CHECK(degree(e, "x") == 1);
  CHECK(depends_on(e, "x"));
  CHECK(blocks_used(e) == std::set<std::string>{"x", "y"});
  CHECK(print(bind(e, "x", Eigen::VectorXd::Ones(1))) ==
        "(+ (* (const 2) (var y 1)) (pow (var y 0) 3) (const -1))");
  CHECK(print(substitute(e, "y", {Expr::var("x", 0), Expr::constant(2)})) ==
        "(+ (* (const 4) (var x 0)) (pow (var x 0) 3) (const -1))");
  CHECK(print(rename_block(e, "y", "z")) ==
        "(+ (* (const 2) (var x 0) (var z 1)) (pow (var z 0) 3) (const -1))");
}

TEST_CASE("gradients agree with central differences on random polynomials") {
  std::mt19937_64 rng(5);
  const VarSpace space({{"x", 2}, {"y", 2}});
  for (int t = 0; t < 100; ++t) {
    const Expr e = testing::random_polynomial(rng, 3);
    Point p = Point::zeros(space);
    for (int i = 0; i < 4; ++i) p.values[i] = testing::uniform_real(rng, -1, 1);
    const Eigen::VectorXd g = grad(e, "x", p);
    for (int i = 0; i < 2; ++i) {
      Point a = p, b = p;
      a.values[i] += 1e-6;
      b.values[i] -= 1e-6;
      const double fd = (eval(e, a) - eval(e, b)) / 2e-6;
      CHECK(std::abs(g[i] - fd) <= 1e-5 * std::max(1.0, std::abs(g[i])));
    }
  }
}
