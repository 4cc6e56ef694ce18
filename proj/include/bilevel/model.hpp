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

// Single-level and bilevel problem containers, Lagrangians, KKT residuals and
// the lower-level value / solution / multiplier maps.

#ifndef BILEVEL_MODEL_HPP_
#define BILEVEL_MODEL_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bilevel/expr.hpp"
#include "bilevel/polyhedron.hpp"

namespace bilevel {

enum class Sense { kMinimize, kMaximize };
enum class Convexity { kConvex, kUnknown };

const char* to_string(Sense s);
const char* to_string(Convexity c);

struct Nlp {
  VarSpace space;
  Expr objective;
  std::vector<Expr> inequalities;  // q_i(w) <= 0
  std::vector<Expr> equalities;    // q_i(w) == 0
  Sense sense = Sense::kMinimize;
  Convexity convexity = Convexity::kUnknown;

  int num_inequalities() const { return static_cast<int>(inequalities.size()); }
  int num_constraints() const {
    return static_cast<int>(inequalities.size() + equalities.size());
  }
  std::vector<std::string> block_names() const;
};

// Builds an Nlp and tags it by the structural convexity check.
Nlp make_nlp(VarSpace space, Expr objective, std::vector<Expr> inequalities,
             std::vector<Expr> equalities, Sense sense = Sense::kMinimize);

// Degree of e in all variables of the given blocks jointly.
int joint_degree(const Expr& e, const std::vector<std::string>& blocks);

// Certified convexity of e in the variables of `blocks` (other blocks are
// parameters): affine, or quadratic with a parameter-free PSD Hessian, or a
// nonnegative combination of certified pieces.
bool certify_convex(const Expr& e, const std::vector<std::string>& blocks);
bool certify_convex(const Expr& e, const VarSpace& space);
bool is_affine(const Expr& e, const std::vector<std::string>& blocks);

// Structural certificate for the Nlp; see certify_convex.
Convexity structural_convexity(const Nlp& nlp);

// Gradient / Hessian with respect to every variable of pt.space, in flat
// order.
Eigen::VectorXd flat_gradient(const Expr& e, const Point& pt);
Eigen::MatrixXd flat_hessian(const Expr& e, const Point& pt);

// Feasibility violation max(0, q_i) / |h_j| at w.
double constraint_violation(const Nlp& nlp, const Eigen::VectorXd& w);
double objective_value(const Nlp& nlp, const Eigen::VectorXd& w);

// Lagrangian p(w) + sum v_i q_i(w) with the multiplier block `mult`.
Expr nlp_lagrangian(const Nlp& nlp, const std::string& mult);

// KKT residual of (w, v); v lists inequality then equality multipliers.
// Maximization problems are treated as minimization of -p.
double kkt_residual(const Nlp& nlp, const Eigen::VectorXd& w,
                    const Eigen::VectorXd& v);

enum class SolveStatus { kOptimal, kUnbounded, kInfeasible, kToleranceReached };
const char* to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::kInfeasible;
  Eigen::VectorXd point;
  double value = 0.0;
  double kkt_residual = 0.0;
  Eigen::VectorXd multipliers;  // inequality then equality
  Eigen::VectorXd ray;          // set when unbounded
  int iterations = 0;
};

// Affine constraints with a quadratic objective use a primal active-set
// method; other convex polynomial programs use a log-barrier Newton scheme.
SolveReport solve_convex(const Nlp& nlp, const Eigen::VectorXd& start,
                         double tol = 1e-8, int max_iter = 500);

struct BilevelProblem {
  std::string name;
  int n = 0, m = 0, p = 0, q = 0;
  Expr F;
  std::vector<Expr> G;
  Expr f;
  std::vector<Expr> g;
  bool lower_convex_in_y = false;

  VarSpace xy_space() const;
  VarSpace x_space() const;
  VarSpace y_space() const;
};

// Validates dimensions and block usage and tags lower-level convexity.
BilevelProblem make_bilevel(std::string name, int n, int m, Expr F,
                            std::vector<Expr> G, Expr f, std::vector<Expr> g);

// L(x,y,u) = f(x,y) + u^T g(x,y).
Expr lagrangian(const BilevelProblem& bp);

// The lower-level problem P(x) over the block y.
Nlp lower_level(const BilevelProblem& bp, const Eigen::VectorXd& x);

// True when f and all g_i are affine in y.
bool lower_affine_in_y(const BilevelProblem& bp);

struct ValueResult {
  enum class Kind { kFinite, kPlusInfinity, kMinusInfinity };
  Kind kind = Kind::kFinite;
  double value = 0.0;
  Eigen::VectorXd y;  // a minimizer when finite
  double as_double() const;
};

ValueResult value_function(const BilevelProblem& bp, const Eigen::VectorXd& x,
                           double tol = 1e-8);

bool solution_membership(const BilevelProblem& bp, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y, double tol = 1e-8);

// Lambda(x,y) = {u >= 0 | grad_y L(x,y,u) = 0, u_i = 0 for inactive i}.
struct MultiplierPolyhedron {
  int p = 0;
  std::vector<int> active;
  std::vector<int> zero_indices;
  Eigen::MatrixXd A;  // m x p
  Eigen::VectorXd b;  // m
  Polyhedron to_polyhedron() const;
};

MultiplierPolyhedron multiplier_set(const BilevelProblem& bp,
                                    const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y,
                                    double tol_act = 1e-7);

PolyhedronDescription polyhedron_vertices(const MultiplierPolyhedron& mp,
                                          int dim_cap = 6);

}  // namespace bilevel

#endif  // BILEVEL_MODEL_HPP_
