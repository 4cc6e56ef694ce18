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

// Lagrange, Wolfe and Mond-Weir duals of a single-level program and checks of
// weak duality, saddle points and converse duality.

#ifndef BILEVEL_DUALITY_HPP_
#define BILEVEL_DUALITY_HPP_

#include <map>
#include <string>

#include <Eigen/Dense>

#include "bilevel/model.hpp"

namespace bilevel {

enum class DualKind { kLagrange, kWolfe, kMondWeir };
const char* to_string(DualKind k);
// Accepts "lagrange", "wolfe", "mond-weir" / "mond_weir" / "mondweir".
DualKind parse_dual_kind(const std::string& s);

struct LagrangeValue {
  bool minus_infinity = false;
  double value = 0.0;
  Eigen::VectorXd minimizer;  // when finite
  Eigen::VectorXd ray;        // direction of unbounded decrease, when -inf
  double as_double() const;
};

// phi_l(v) = inf_w L(w, v). Needs L(., v) of degree <= 2 in w; otherwise a
// CapabilityError is raised.
LagrangeValue lagrange_value_fn(const Nlp& nlp, const Eigen::VectorXd& v,
                                double tol = 1e-8);

struct DualOptions {
  // Primal block renames in the dual (e.g. y -> z); unmapped blocks keep
  // their names.
  std::map<std::string, std::string> rename;
  std::string multiplier = "v";
  // Builds the dual even when the primal is not certified convex.
  bool allow_uncertified = false;
};

// max L(w, v) s.t. grad_w L(w, v) = 0, -v_i <= 0 (inequality multipliers).
Nlp build_wolfe_dual(const Nlp& nlp, const DualOptions& options = {});
// max p(w) s.t. grad_w L(w, v) = 0, -v^T q(w) <= 0, -v_i <= 0.
Nlp build_mond_weir_dual(const Nlp& nlp, const DualOptions& options = {});

struct DualityReport {
  DualKind kind = DualKind::kLagrange;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  bool weak_duality_ok = true;
  bool convex_certified = false;
  double primal_violation = 0.0;
  double dual_violation = 0.0;
  Eigen::VectorXd primal_point;
  Eigen::VectorXd dual_point;
};

// dual_point is v for kLagrange and the flat (w, v) point of the dual
// program otherwise. Infeasible inputs raise InputError.
DualityReport check_weak_duality(const Nlp& nlp, const Eigen::VectorXd& primal,
                                 const Eigen::VectorXd& dual_point, DualKind kind,
                                 double tol = 1e-8,
                                 const DualOptions& options = {});

struct StrongDualityReport {
  DualKind kind = DualKind::kLagrange;
  SolveStatus primal_status = SolveStatus::kInfeasible;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  double dual_violation = 0.0;
  bool holds = false;
  Eigen::VectorXd primal_point;
  Eigen::VectorXd multipliers;
};

// Solves the convexity-certified primal, takes its KKT multipliers as the
// dual candidate and compares values: holds when the candidate is dual
// feasible to tol_feas and the gap is at most tol_gap.
StrongDualityReport check_strong_duality(const Nlp& nlp, DualKind kind,
                                         double tol_gap = 1e-6,
                                         double tol_feas = 1e-6);

struct SaddleResult {
  bool is_saddle = false;
  double residual = 0.0;
};

SaddleResult check_saddle_point(const Nlp& nlp, const Eigen::VectorXd& w,
                                const Eigen::VectorXd& v, double tol = 1e-8);

struct ConverseCertificate {
  bool applies = false;
  std::string reason;
  double matrix_measure = 0.0;  // smallest singular value / eigenvalue
  double gradient_norm = 0.0;
  bool primal_feasible = false;
  double kkt_residual = 0.0;
  // Set when the matrix condition holds but w is not a KKT point.
  bool counterexample = false;
};

// `assume_regular_minimizer` lets the caller assert the alternative Mond-Weir
// hypothesis (a regular primal minimizer exists).
ConverseCertificate converse_duality_certificate(
    const Nlp& nlp, const Eigen::VectorXd& w, const Eigen::VectorXd& v,
    DualKind kind, double tol = 1e-8, bool assume_regular_minimizer = false);

}  // namespace bilevel

#endif  // BILEVEL_DUALITY_HPP_
