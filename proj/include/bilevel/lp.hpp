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

// Dense two-phase simplex for small linear programs.

#ifndef BILEVEL_LP_HPP_
#define BILEVEL_LP_HPP_

#include <limits>

#include <Eigen/Dense>

namespace bilevel {

//   minimize    c^T x
//   subject to  A_ub x <= b_ub
//               A_eq x  = b_eq
//               lower <= x <= upper   (entries may be infinite)
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  // All variables free, no constraints.
  explicit LinearProgram(int num_vars = 0);
  int num_vars() const { return static_cast<int>(c.size()); }

  void add_le(const Eigen::RowVectorXd& row, double rhs);
  void add_eq(const Eigen::RowVectorXd& row, double rhs);
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::quiet_NaN();
  // For kUnbounded: a direction d with c^T d < 0 that keeps x + t d feasible
  // for all t >= 0.
  Eigen::VectorXd ray;
  int pivots = 0;
};

struct LpOptions {
  double pivot_tol = 1e-11;
  double optimality_tol = 1e-9;
  double feasibility_tol = 1e-9;
  int max_pivots = 50000;
};

LpResult solve_lp(const LinearProgram& lp, const LpOptions& options = {});

const char* to_string(LpStatus status);

}  // namespace bilevel

#endif  // BILEVEL_LP_HPP_
