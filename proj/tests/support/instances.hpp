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


// Random test instances with a planted lower-level KKT point.

#ifndef BILEVEL_TESTS_SUPPORT_INSTANCES_HPP_
#define BILEVEL_TESTS_SUPPORT_INSTANCES_HPP_

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bilevel/expr.hpp"
#include "bilevel/model.hpp"

namespace bilevel::testing {

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// sum_i coeffs[i] * var(block, i) + constant
inline Expr affine(const Eigen::VectorXd& coeffs, const std::string& block, double constant) {
  std::vector<Expr> terms;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] != 0.0) {
      terms.push_back(coeffs[i] * Expr::var(block, static_cast<int>(i)));
    }
  }
  terms.push_back(Expr::constant(constant));
  return Expr::sum(std::move(terms));
}

inline Eigen::MatrixXd int_matrix(std::mt19937_64& rng, int rows, int cols, int lo, int hi) {
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) M(i, j) = uniform_int(rng, lo, hi);
  }
  return M;
}

struct PlantedInstance {
  BilevelProblem bp;
  Eigen::VectorXd x, y, u;
  Eigen::MatrixXd A;  // lower-level constraint rows in y
  bool quadratic = false;
};

// Lower level: min (d + D x)^T y [+ 1/2 y^T Q y] s.t. A y + B x + c <= 0,
// built so that (x, y, u) is a KKT point. Integer data; x, y in {-1,0,1}.
inline PlantedInstance planted_instance(std::mt19937_64& rng, bool quadratic, int n, int m,
                                        int p, int q) {
  PlantedInstance out;
  out.quadratic = quadratic;
  Eigen::VectorXd x0(n), y0(m);
  for (int i = 0; i < n; ++i) x0[i] = uniform_int(rng, -1, 1);
  for (int i = 0; i < m; ++i) y0[i] = uniform_int(rng, -1, 1);
  Eigen::MatrixXd A = int_matrix(rng, p, m, -2, 2);
  for (int i = 0; i < p; ++i) {
    if (A.row(i).isZero()) A(i, uniform_int(rng, 0, m - 1)) = 1;
  }
  const Eigen::MatrixXd B = int_matrix(rng, p, n, -1, 1);
  const int n_active = uniform_int(rng, 1, p);
  Eigen::VectorXd c(p), u0 = Eigen::VectorXd::Zero(p);
  for (int i = 0; i < p; ++i) {
    const double base = -(A.row(i).dot(y0) + B.row(i).dot(x0));
    if (i < n_active) {
      c[i] = base;
      u0[i] = uniform_int(rng, 0, 2);
    } else {
      c[i] = base - uniform_int(rng, 1, 2);
    }
  }
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m);
  if (quadratic) {
    const Eigen::MatrixXd M = int_matrix(rng, m, m, -1, 1);
    Q = M * M.transpose() + Eigen::MatrixXd::Identity(m, m);
  }
  const Eigen::MatrixXd D = int_matrix(rng, m, n, -1, 1);
  const Eigen::VectorXd d = -A.transpose() * u0 - D * x0 - Q * y0;

  std::vector<Expr> fterms;
  for (int j = 0; j < m; ++j) {
    const Expr coef = affine(D.row(j).transpose(), "x", d[j]);
    fterms.push_back(coef * Expr::var("y", j));
    for (int k = 0; k < m; ++k) {
      if (Q(j, k) != 0.0) {
        fterms.push_back((0.5 * Q(j, k)) * (Expr::var("y", j) * Expr::var("y", k)));
      }
    }
  }
  std::vector<Expr> g;
  for (int i = 0; i < p; ++i) {
    g.push_back(Expr::sum({affine(A.row(i).transpose(), "y", 0.0),
                           affine(B.row(i).transpose(), "x", c[i])}));
  }
  std::vector<Expr> G;
  for (int j = 0; j < q; ++j) {
    const Eigen::VectorXd a = int_matrix(rng, n, 1, -1, 1).col(0);
    G.push_back(affine(a, "x", -a.dot(x0) - uniform_int(rng, 0, 1)));
  }
  std::vector<Expr> Fterms;
  for (int i = 0; i < n; ++i) Fterms.push_back(pow(Expr::var("x", i) - uniform_int(rng, -1, 1), 2));
  for (int j = 0; j < m; ++j) Fterms.push_back(pow(Expr::var("y", j) - uniform_int(rng, -1, 1), 2));
  out.bp = make_bilevel("planted", n, m, Expr::sum(Fterms), G, Expr::sum(fterms), g);
  out.x = x0;
  out.y = y0;
  out.u = u0;
  out.A = A;
  return out;
}

struct ConvexQp {
  Nlp nlp;
  Eigen::MatrixXd Q, A;
  Eigen::VectorXd c, b;
  Eigen::VectorXd strict_point;
};

// min 1/2 y^T Q y + c^T y s.t. A y <= b with Q positive definite and a
// strictly feasible point.
inline ConvexQp random_convex_qp(std::mt19937_64& rng, int m, int p) {
  ConvexQp out;
  Eigen::MatrixXd M(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) M(i, j) = uniform_real(rng, -1, 1);
  }
  out.Q = M * M.transpose() + 0.5 * Eigen::MatrixXd::Identity(m, m);
  out.c = Eigen::VectorXd(m);
  for (int i = 0; i < m; ++i) out.c[i] = uniform_real(rng, -2, 2);
  out.A = Eigen::MatrixXd(p, m);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < m; ++j) out.A(i, j) = uniform_real(rng, -1, 1);
  }
  out.strict_point = Eigen::VectorXd(m);
  for (int i = 0; i < m; ++i) out.strict_point[i] = uniform_real(rng, -1, 1);
  out.b = out.A * out.strict_point;
  for (int i = 0; i < p; ++i) out.b[i] += uniform_real(rng, 0.2, 1.5);

  std::vector<Expr> obj;
  for (int j = 0; j < m; ++j) {
    obj.push_back(out.c[j] * Expr::var("y", j));
    for (int k = 0; k < m; ++k) {
      obj.push_back((0.5 * out.Q(j, k)) * (Expr::var("y", j) * Expr::var("y", k)));
    }
  }
  std::vector<Expr> ineq;
  for (int i = 0; i < p; ++i) ineq.push_back(affine(out.A.row(i).transpose(), "y", -out.b[i]));
  out.nlp = make_nlp(VarSpace({{"y", m}}), Expr::sum(obj), ineq, {});
  return out;
}

// Random polynomial expression over x (dim 2) and y (dim 2).
inline Expr random_polynomial(std::mt19937_64& rng, int depth) {
  const int pick = depth <= 0 ? uniform_int(rng, 0, 1) : uniform_int(rng, 0, 5);
  switch (pick) {
    case 0:
      return Expr::constant(std::round(uniform_real(rng, -3, 3) * 4) / 4);
    case 1:
      return Expr::var(uniform_int(rng, 0, 1) ? "x" : "y", uniform_int(rng, 0, 1));
    case 2: {
      std::vector<Expr> t;
      const int k = uniform_int(rng, 2, 3);
      for (int i = 0; i < k; ++i) t.push_back(random_polynomial(rng, depth - 1));
      return Expr::sum(t);
    }
    case 3:
      return random_polynomial(rng, depth - 1) * random_polynomial(rng, depth - 1);
    case 4:
      return pow(random_polynomial(rng, depth - 1), uniform_int(rng, 0, 3));
    default:
      return -random_polynomial(rng, depth - 1);
  }
}

inline bool same_point_set(const std::vector<Eigen::VectorXd>& a,
                           const std::vector<Eigen::VectorXd>& b, double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& pnt : a) {
    bool found = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && pnt.size() == b[j].size() &&
          (pnt - b[j]).lpNorm<Eigen::Infinity>() <= tol) {
        used[j] = found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace bilevel::testing

#endif  // BILEVEL_TESTS_SUPPORT_INSTANCES_HPP_
