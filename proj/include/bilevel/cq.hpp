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

// Constraint qualification checks decided by linear programming.

#ifndef BILEVEL_CQ_HPP_
#define BILEVEL_CQ_HPP_

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bilevel/model.hpp"
#include "bilevel/reform.hpp"

namespace bilevel {

enum class CqCondition { kMfcq, kNsmfcq, kSlater, kGcqPolyhedral, kBcq };
enum class Verdict { kHolds, kViolated, kNotApplicable };
const char* to_string(CqCondition c);
const char* to_string(Verdict v);

struct CqTolerances {
  double tol = 1e-8;       // verdict threshold and rank threshold
  double tol_act = 1e-7;   // active-set detection
  double lp_tol = 1e-9;    // LP optimality
  double cert_tol = 1e-9;  // certificate residual bound
};

struct CqReport {
  CqCondition condition = CqCondition::kMfcq;
  Verdict verdict = Verdict::kNotApplicable;
  std::string reason;
  std::vector<int> active_set;   // active inequality indices
  Eigen::VectorXd direction;     // MFCQ direction d
  double sigma = 0.0;
  // Nontrivial multiplier, inequality then equality entries (zeros for
  // inactive inequalities).
  Eigen::VectorXd multipliers;
  double certificate_residual = 0.0;
  Eigen::VectorXd point;         // Slater point
  Eigen::VectorXd cone_element;  // BCQ eta
  Eigen::VectorXd coefficients;  // generator coefficients behind cone_element
  bool primal_dual_agree = true;
  std::map<std::string, double> tolerances;
};

struct PolyhedralCone {
  std::vector<Eigen::VectorXd> generators;
  std::vector<Eigen::VectorXd> lineality;
  bool contains(const Eigen::VectorXd& v, double tol = 1e-9) const;
};

CqReport check_mfcq(const Nlp& nlp, const Eigen::VectorXd& w,
                    const CqTolerances& tols = {});
// Rejects reformulations that carry callable constraints.
CqReport check_mfcq(const ReformulatedNlp& r, const Eigen::VectorXd& w,
                    const CqTolerances& tols = {});

CqReport check_slater(const std::vector<Expr>& constraints, const VarSpace& space,
                      const CqTolerances& tols = {});
CqReport check_gcq_polyhedral(const Nlp& nlp);

PolyhedralCone polyhedral_normal_cone(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                      const Eigen::MatrixXd& eqA,
                                      const Eigen::VectorXd& eqb,
                                      const Eigen::VectorXd& w, double tol_act = 1e-7);

CqReport check_bcq_closed_form(const ReformulatedNlp& ldref, const Eigen::VectorXd& pt,
                               const CqTolerances& tols = {});
CqReport check_nsmfcq_ld(const ReformulatedNlp& ldref, const Eigen::VectorXd& pt,
                         const CqTolerances& tols = {});

}  // namespace bilevel

#endif  // BILEVEL_CQ_HPP_
