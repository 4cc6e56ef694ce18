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

#include "bilevel/lp.hpp"

#include <cmath>
#include <vector>

#include "bilevel/errors.hpp"

namespace bilevel {

LinearProgram::LinearProgram(int num_vars)
    : c(Eigen::VectorXd::Zero(num_vars)),
      A_ub(0, num_vars),
      b_ub(0),
      A_eq(0, num_vars),
      b_eq(0),
      lower(Eigen::VectorXd::Constant(num_vars,
                                      -std::numeric_limits<double>::infinity())),
      upper(Eigen::VectorXd::Constant(num_vars,
                                      std::numeric_limits<double>::infinity())) {}

void LinearProgram::add_le(const Eigen::RowVectorXd& row, double rhs) {
  if (row.size() != num_vars()) throw InputError("add_le: row length mismatch");
  A_ub.conservativeResize(A_ub.rows() + 1, num_vars());
  A_ub.row(A_ub.rows() - 1) = row;
  b_ub.conservativeResize(b_ub.size() + 1);
  b_ub[b_ub.size() - 1] = rhs;
}

void LinearProgram::add_eq(const Eigen::RowVectorXd& row, double rhs) {
  if (row.size() != num_vars()) throw InputError("add_eq: row length mismatch");
  A_eq.conservativeResize(A_eq.rows() + 1, num_vars());
  A_eq.row(A_eq.rows() - 1) = row;
  b_eq.conservativeResize(b_eq.size() + 1);
  b_eq[b_eq.size() - 1] = rhs;
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

// Tableau over nonnegative columns. Row `rows` holds reduced costs, column
// `cols` holds the right-hand side.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& M, const Eigen::VectorXd& r, int num_art)
      : rows_(static_cast<int>(M.rows())),
        cols_(static_cast<int>(M.cols()) + num_art),
        t_(Eigen::MatrixXd::Zero(M.rows() + 1, M.cols() + num_art + 1)),
        basis_(M.rows(), -1),
        active_(M.rows(), true) {
    t_.topLeftCorner(rows_, M.cols()) = M;
    t_.block(0, cols_, rows_, 1) = r;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& at(int i, int j) { return t_(i, j); }
  double rhs(int i) const { return t_(i, cols_); }
  std::vector<int>& basis() { return basis_; }
  std::vector<bool>& active() { return active_; }

  void pivot(int pr, int pc) {
    const double p = t_(pr, pc);
    t_.row(pr) /= p;
    for (int i = 0; i <= rows_; ++i) {
      if (i == pr) continue;
      const double f = t_(i, pc);
      if (f != 0.0) t_.row(i) -= f * t_.row(pr);
    }
    basis_[pr] = pc;
  }

  // Installs cost vector `cost` (size cols) as the objective row.
  void set_objective(const Eigen::VectorXd& cost) {
    t_.row(rows_).setZero();
    t_.block(rows_, 0, 1, cols_) = cost.transpose();
    for (int i = 0; i < rows_; ++i) {
      if (!active_[i] || basis_[i] < 0) continue;
      const double cb = cost[basis_[i]];
      if (cb != 0.0) t_.row(rows_) -= cb * t_.row(i);
    }
  }

  double objective_value() const { return -t_(rows_, cols_); }

  // Bland's rule iterations restricted to columns < allowed_cols.
  // Returns -1 on optimum, otherwise the entering column of an unbounded ray.
  int run(int allowed_cols, const LpOptions& opt, int& pivots) {
    while (true) {
      int enter = -1;
      for (int j = 0; j < allowed_cols; ++j) {
        if (t_(rows_, j) < -opt.optimality_tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return -1;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < rows_; ++i) {
        if (!active_[i]) continue;
        const double a = t_(i, enter);
        if (a <= opt.pivot_tol) continue;
        const double ratio = t_(i, cols_) / a;
        if (leave < 0 || ratio < best - 1e-14 ||
            (std::abs(ratio - best) <= 1e-14 && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return enter;
      pivot(leave, enter);
      if (++pivots > opt.max_pivots) {
        throw CapabilityError("simplex pivot limit exceeded");
      }
    }
  }

 private:
  int rows_;
  int cols_;
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
  std::vector<bool> active_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const LpOptions& opt) {
  const int n = lp.num_vars();
  if (lp.A_ub.cols() != n || lp.A_eq.cols() != n || lp.b_ub.size() != lp.A_ub.rows() ||
      lp.b_eq.size() != lp.A_eq.rows() || lp.lower.size() != n ||
      lp.upper.size() != n) {
    throw InputError("solve_lp: inconsistent dimensions");
  }

  // x = offset + T s with s >= 0.
  std::vector<std::pair<int, double>> columns;  // (original var, sign)
  Eigen::VectorXd offset = Eigen::VectorXd::Zero(n);
  std::vector<std::pair<int, double>> upper_rows;  // (column, bound on s)
  for (int j = 0; j < n; ++j) {
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    if (lo > hi) {
      LpResult r;
      r.status = LpStatus::kInfeasible;
      return r;
    }
    if (std::isfinite(lo)) {
      offset[j] = lo;
      columns.push_back({j, 1.0});
      if (std::isfinite(hi)) {
        upper_rows.push_back({static_cast<int>(columns.size()) - 1, hi - lo});
      }
    } else if (std::isfinite(hi)) {
      offset[j] = hi;
      columns.push_back({j, -1.0});
    } else {
      columns.push_back({j, 1.0});
      columns.push_back({j, -1.0});
    }
  }
  const int ns = static_cast<int>(columns.size());
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, ns);
  for (int k = 0; k < ns; ++k) T(columns[k].first, k) = columns[k].second;

  const int n_ub = static_cast<int>(lp.A_ub.rows());
  const int n_eq = static_cast<int>(lp.A_eq.rows());
  const int n_up = static_cast<int>(upper_rows.size());
  const int m = n_ub + n_eq + n_up;
  const int n_slack = n_ub + n_up;
  const int N = ns + n_slack;

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, N);
  Eigen::VectorXd r(m);
  if (n_ub > 0) {
    M.block(0, 0, n_ub, ns) = lp.A_ub * T;
    r.head(n_ub) = lp.b_ub - lp.A_ub * offset;
    for (int i = 0; i < n_ub; ++i) M(i, ns + i) = 1.0;
  }
  if (n_eq > 0) {
    M.block(n_ub, 0, n_eq, ns) = lp.A_eq * T;
    r.segment(n_ub, n_eq) = lp.b_eq - lp.A_eq * offset;
  }
  for (int k = 0; k < n_up; ++k) {
    const int row = n_ub + n_eq + k;
    M(row, upper_rows[k].first) = 1.0;
    M(row, ns + n_ub + k) = 1.0;
    r[row] = upper_rows[k].second;
  }
  for (int i = 0; i < m; ++i) {
    if (r[i] < 0) {
      M.row(i) *= -1.0;
      r[i] = -r[i];
    }
  }

  LpResult result;
  Tableau tab(M, r, m);
  for (int i = 0; i < m; ++i) {
    tab.at(i, N + i) = 1.0;
    tab.basis()[i] = N + i;
  }

  // Phase one.
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(N + m);
  phase1.tail(m).setOnes();
  tab.set_objective(phase1);
  tab.run(N + m, opt, result.pivots);
  const double scale = 1.0 + (m > 0 ? r.cwiseAbs().maxCoeff() : 0.0);
  if (tab.objective_value() > opt.feasibility_tol * scale) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  for (int i = 0; i < m; ++i) {
    if (tab.basis()[i] < N) continue;
    int pc = -1;
    for (int j = 0; j < N; ++j) {
      if (std::abs(tab.at(i, j)) > 1e-9) {
        pc = j;
        break;
      }
    }
    if (pc >= 0) {
      tab.pivot(i, pc);
    } else {
      tab.active()[i] = false;  // redundant row
    }
  }

  // Phase two.
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(N + m);
  cost.head(ns) = T.transpose() * lp.c;
  tab.set_objective(cost);
  const int enter = tab.run(N, opt, result.pivots);

  Eigen::VectorXd s = Eigen::VectorXd::Zero(N + m);
  for (int i = 0; i < m; ++i) {
    if (tab.active()[i] && tab.basis()[i] >= 0) s[tab.basis()[i]] = tab.rhs(i);
  }
  result.x = offset + T * s.head(ns);
  result.value = lp.c.dot(result.x);
  if (enter >= 0) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(N + m);
    d[enter] = 1.0;
    for (int i = 0; i < m; ++i) {
      if (tab.active()[i] && tab.basis()[i] >= 0) {
        d[tab.basis()[i]] = -tab.at(i, enter);
      }
    }
    result.ray = T * d.head(ns);
    result.status = LpStatus::kUnbounded;
    result.value = -std::numeric_limits<double>::infinity();
    return result;
  }
  result.status = LpStatus::kOptimal;
  return result;
}

}  // namespace bilevel
