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

// Single-level reformulations of the optimistic bilevel problem.

#ifndef BILEVEL_REFORM_HPP_
#define BILEVEL_REFORM_HPP_

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bilevel/model.hpp"

namespace bilevel {

enum class ReformKind { kVf, kKkt, kGe, kLd, kWd, kMwd };
const char* to_string(ReformKind k);
ReformKind parse_reform_kind(const std::string& s);

enum class Provenance { kOriginal, kImplicit };
const char* to_string(Provenance p);

enum class Role {
  kUpper,          // G_i(x) <= 0
  kLower,          // g_i(x,y) <= 0
  kSign,           // -u_i <= 0
  kValue,          // value-function type inequality
  kDomain,         // closed-form dual domain equality
  kComplementarity,
  kStationarity,   // grad_y L = 0
  kDualFeasible,   // -u^T g(x,z) <= 0
};
const char* to_string(Role r);

struct EmittedConstraint {
  std::string label;
  Role role = Role::kUpper;
  bool equality = false;
  int index = 0;  // position inside the Nlp inequality or equality list
  int group = 0;  // logical constraint it belongs to
};

// lhs(w) - fn(args(w)) <= 0 where args are the concatenated arg_blocks of w.
// A non-finite fn value makes the constraint infeasible.
struct ImplicitConstraint {
  std::string name;
  Expr lhs;
  std::vector<std::string> arg_blocks;
  std::function<double(const Eigen::VectorXd&)> fn;
  bool lipschitz_unreliable = true;
  long budget = 10'000'000;
  std::shared_ptr<std::atomic<long>> evaluations =
      std::make_shared<std::atomic<long>>(0);

  Eigen::VectorXd args(const Point& pt) const;
  // fn(args), counted against the budget.
  double rhs(const Eigen::VectorXd& args) const;
  double evaluate(const Point& pt) const;
  double evaluate(const Point& pt, const Eigen::VectorXd& args) const;
};

struct ReformulatedNlp {
  ReformKind kind = ReformKind::kVf;
  Nlp nlp;
  std::map<std::string, Provenance> provenance;
  std::vector<EmittedConstraint> constraints;  // inequalities first, then equalities
  std::vector<ImplicitConstraint> implicit_constraints;
  std::vector<std::string> scan_order;
  std::vector<std::string> notes;
  bool closed_form = false;
  // Closed-form Lagrange-dual data: value row = smooth_value <= 0 on the
  // domain {domain_equalities = 0}.
  Expr smooth_value;
  std::vector<Expr> domain_equalities;

  int logical_constraint_count() const;
  int literal_constraint_count() const;
  int implicit_variable_count() const;
  // max of the Nlp violation and positive parts of implicit constraints.
  double violation(const Eigen::VectorXd& w) const;
  bool feasible(const Eigen::VectorXd& w, double tol) const;
};

struct KktOptions {
  bool per_component_complementarity = false;
};

ReformulatedNlp build_vf_ref(const BilevelProblem& bp);
ReformulatedNlp build_kkt_ref(const BilevelProblem& bp, const KktOptions& options = {});
ReformulatedNlp build_ld_ref(const BilevelProblem& bp);
ReformulatedNlp build_wd_ref(const BilevelProblem& bp);
ReformulatedNlp build_mwd_ref(const BilevelProblem& bp);
// Dispatches on kind; kGe raises InputError (feasibility test only).
ReformulatedNlp build_reformulation(const BilevelProblem& bp, ReformKind kind);

struct GeFeasibility {
  bool feasible = false;
  Eigen::VectorXd u;  // multipliers over all p constraints (zeros when inactive)
  double residual = 0.0;
  std::vector<int> active;
  bool gcq_assumed = true;
};

GeFeasibility ge_ref_feasibility(const BilevelProblem& bp, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y, double tol = 1e-8,
                                 double tol_act = 1e-7);

struct CountSummary {
  ReformKind kind = ReformKind::kVf;
  int n_vars = 0;
  int n_implicit_vars = 0;
  int n_constraints = 0;
};

CountSummary count_summary(int n, int m, int p, int q, ReformKind kind);
CountSummary count_summary(const BilevelProblem& bp, ReformKind kind);

}  // namespace bilevel

#endif  // BILEVEL_REFORM_HPP_
