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

#include "bilevel/cq.hpp"
#include "bilevel/errors.hpp"
#include "bilevel/examples.hpp"

using namespace bilevel;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}
Expr Y(int i = 0) { return Expr::var("y", i); }
}  // namespace

TEST_CASE("MFCQ at the kink of the running lower level") {
  const Nlp lower = lower_level(running_example(), vec({0}));
  const CqReport r = check_mfcq(lower, vec({1}));
  CHECK(r.verdict == Verdict::kHolds);
  CHECK(r.active_set == std::vector<int>{0, 1});
  REQUIRE(r.direction.size() == 1);
  CHECK(r.direction[0] < 0);
  CHECK(r.sigma > 0);
}

TEST_CASE("MFCQ fails for opposing active constraints") {
  const VarSpace s({{"y", 1}});
  const Nlp nlp = make_nlp(s, Y(), {Y(), -Y()}, {});
  const CqReport r = check_mfcq(nlp, vec({0}));
  CHECK(r.verdict == Verdict::kViolated);
  REQUIRE(r.multipliers.size() == 2);
  CHECK(r.multipliers[0] == doctest::Approx(r.multipliers[1]));
  CHECK(r.multipliers[0] > 0);
  CHECK(r.certificate_residual <= 1e-9);
}

TEST_CASE("MFCQ with equality constraints") {
  const VarSpace s({{"y", 2}});
  const Nlp dependent = make_nlp(s, Y(0), {}, {Y(0) + Y(1), 2.0 * Y(0) + 2.0 * Y(1)});
  CHECK(check_mfcq(dependent, vec({0, 0})).verdict == Verdict::kViolated);
  const Nlp fine = make_nlp(s, Y(0), {pow(Y(0), 2) + pow(Y(1), 2) - 1.0}, {Y(0) - Y(1)});
  const double h = std::sqrt(0.5);
  CHECK(check_mfcq(fine, vec({h, h})).verdict == Verdict::kHolds);
}

TEST_CASE("MFCQ fails on the Wolfe reformulation and rejects callables") {
  const BilevelProblem bp = running_example();
  CHECK(check_mfcq(build_wd_ref(bp), vec({0, 1, 1, 0, 1})).verdict == Verdict::kViolated);
  CHECK_THROWS_AS(check_mfcq(build_vf_ref(bp), vec({0.5, 0.5})), CapabilityError);
}

TEST_CASE("Slater points") {
  const VarSpace s({{"y", 1}});
  const CqReport ok = check_slater({Y() - 1.0, -Y() - 1.0}, s);
  CHECK(ok.verdict == Verdict::kHolds);
  REQUIRE(ok.point.size() == 1);
  CHECK(ok.point[0] - 1.0 < 0);
  CHECK(-ok.point[0] - 1.0 < 0);
  CHECK(check_slater({Y(), -Y()}, s).verdict == Verdict::kViolated);
  CHECK(check_slater({-pow(Y(), 2) + 1.0}, s).verdict == Verdict::kNotApplicable);
}

TEST_CASE("polyhedral GCQ needs affine constraints") {
  const VarSpace s({{"y", 1}});
  CHECK(check_gcq_polyhedral(make_nlp(s, Y(), {Y(), -Y() - 1.0}, {})).verdict ==
        Verdict::kHolds);
  CHECK(check_gcq_polyhedral(make_nlp(s, Y(), {pow(Y(), 2)}, {})).verdict !=
        Verdict::kHolds);
}

TEST_CASE("normal cone of the nonnegative orthant at the origin") {
  Eigen::MatrixXd A(2, 2);
  A << -1, 0, 0, -1;
  const PolyhedralCone cone = polyhedral_normal_cone(
      A, Eigen::VectorXd::Zero(2), Eigen::MatrixXd(0, 2), Eigen::VectorXd(0),
      Eigen::VectorXd::Zero(2));
  CHECK(cone.contains(vec({-1, -2})));
  CHECK_FALSE(cone.contains(vec({1, 0})));
  const PolyhedralCone interior = polyhedral_normal_cone(
      A, Eigen::VectorXd::Zero(2), Eigen::MatrixXd(0, 2), Eigen::VectorXd(0), vec({1, 1}));
  CHECK(interior.contains(vec({0, 0})));
  CHECK_FALSE(interior.contains(vec({-1, 0})));
}

TEST_CASE("BCQ and NSMFCQ on the Lagrange reformulation") {
  const ReformulatedNlp ld = build_ld_ref(running_example());
  CHECK(check_bcq_closed_form(ld, vec({0.5, 0.5, 1, 0})).verdict == Verdict::kHolds);
  CHECK(check_bcq_closed_form(ld, vec({0, 1, 0.5, 0.5})).verdict == Verdict::kHolds);
  CHECK(check_nsmfcq_ld(ld, vec({0, 1, 0, 1})).verdict == Verdict::kViolated);

  const ReformulatedNlp bad = build_ld_ref(bcq_fails_example());
  const CqReport r = check_bcq_closed_form(bad, vec({0, 0, 1, 0, 0}));
  CHECK(r.verdict == Verdict::kViolated);
  CHECK(r.cone_element.norm() > 0);
  CHECK(check_bcq_closed_form(build_kkt_ref(running_example()), vec({0, 1, 0, 1})).verdict ==
        Verdict::kNotApplicable);
}
