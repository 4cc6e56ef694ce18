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

#include "bilevel/polyhedron.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bilevel/errors.hpp"

namespace bilevel {

Polyhedron::Polyhedron(int dim)
    : A_eq(0, dim), b_eq(0), A_in(0, dim), b_in(0) {}

void Polyhedron::add_eq(const Eigen::RowVectorXd& row, double rhs) {
  if (row.size() != dim()) throw InputError("polyhedron: row length mismatch");
  A_eq.conservativeResize(A_eq.rows() + 1, dim());
  A_eq.row(A_eq.rows() - 1) = row;
  b_eq.conservativeResize(b_eq.size() + 1);
  b_eq[b_eq.size() - 1] = rhs;
}

void Polyhedron::add_le(const Eigen::RowVectorXd& row, double rhs) {
  if (row.size() != dim()) throw InputError("polyhedron: row length mismatch");
  A_in.conservativeResize(A_in.rows() + 1, dim());
  A_in.row(A_in.rows() - 1) = row;
  b_in.conservativeResize(b_in.size() + 1);
  b_in[b_in.size() - 1] = rhs;
}

void Polyhedron::add_nonneg(int i) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim());
  row[i] = -1.0;
  add_le(row, 0.0);
}

double Polyhedron::violation(const Eigen::VectorXd& x) const {
  double v = 0.0;
  if (A_eq.rows() > 0) v = std::max(v, (A_eq * x - b_eq).cwiseAbs().maxCoeff());
  if (A_in.rows() > 0) v = std::max(v, (A_in * x - b_in).maxCoeff());
  return v;
}

bool Polyhedron::contains(const Eigen::VectorXd& x, double tol) const {
  return x.size() == dim() && violation(x) <= tol;
}

int numerical_rank(const Eigen::MatrixXd& M, double tol) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] <= tol) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > tol * std::max(1.0, s[0])) ++r;
  }
  return r;
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& M, double tol) {
  const int n = static_cast<int>(M.cols());
  if (M.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double top = s.size() > 0 ? std::max(1.0, s[0]) : 1.0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > tol * top) ++r;
  }
  return svd.matrixV().rightCols(n - r);
}

namespace {

// Calls fn(subset) for every k-subset of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  if (k < 0 || k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool contains_close(const std::vector<Eigen::VectorXd>& list,
                    const Eigen::VectorXd& v, double tol) {
  for (const auto& w : list) {
    if ((w - v).cwiseAbs().maxCoeff() <= tol * (1.0 + v.cwiseAbs().maxCoeff())) {
      return true;
    }
  }
  return false;
}

Eigen::MatrixXd stack_rows(const Eigen::MatrixXd& top, const Eigen::MatrixXd& src,
                           const std::vector<int>& rows) {
  Eigen::MatrixXd out(top.rows() + static_cast<Eigen::Index>(rows.size()),
                      top.cols());
  out.topRows(top.rows()) = top;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(top.rows() + static_cast<Eigen::Index>(i)) = src.row(rows[i]);
  }
  return out;
}

}  // namespace

PolyhedronDescription enumerate_polyhedron(const Polyhedron& poly, int dim_cap,
                                           double tol) {
  const int d = poly.dim();
  PolyhedronDescription out;
  const int free_dim = d - numerical_rank(poly.A_eq, tol);
  if (free_dim > dim_cap) {
    throw CapabilityError("polyhedron free dimension " + std::to_string(free_dim) +
                          " exceeds cap " + std::to_string(dim_cap));
  }
  const int n_in = static_cast<int>(poly.A_in.rows());
  const double feas_tol = 1e-8;

  // Lineality space and the equality system of the pointed part.
  Eigen::MatrixXd all(poly.A_eq.rows() + n_in, d);
  all << poly.A_eq, poly.A_in;
  Eigen::MatrixXd L = null_space(all, tol);
  for (int k = 0; k < L.cols(); ++k) out.lineality.push_back(L.col(k));
  Eigen::MatrixXd E(poly.A_eq.rows() + L.cols(), d);
  E << poly.A_eq, L.transpose();
  Eigen::VectorXd e(E.rows());
  e << poly.b_eq, Eigen::VectorXd::Zero(L.cols());
  const int rE = numerical_rank(E, tol);

  if (d == 0) {
    if (poly.violation(Eigen::VectorXd(0)) <= feas_tol) {
      out.vertices.push_back(Eigen::VectorXd(0));
    }
    return out;
  }

  const int k_vert = d - rE;
  if (binomial(n_in, std::max(0, k_vert)) > 2e6) {
    throw CapabilityError("polyhedron has too many candidate bases");
  }

  std::vector<std::vector<int>> active_sets;
  auto active_of = [&](const Eigen::VectorXd& x) {
    std::vector<int> act;
    for (int i = 0; i < n_in; ++i) {
      if (std::abs(poly.A_in.row(i).dot(x) - poly.b_in[i]) <=
          1e-7 * (1.0 + std::abs(poly.b_in[i]))) {
        act.push_back(i);
      }
    }
    return act;
  };

  if (k_vert >= 0) {
    for_each_subset(n_in, k_vert, [&](const std::vector<int>& S) {
      Eigen::MatrixXd M = stack_rows(E, poly.A_in, S);
      if (numerical_rank(M, tol) < d) return;
      Eigen::VectorXd rhs(M.rows());
      rhs.head(E.rows()) = e;
      for (std::size_t i = 0; i < S.size(); ++i) {
        rhs[E.rows() + static_cast<Eigen::Index>(i)] = poly.b_in[S[i]];
      }
      Eigen::VectorXd x = M.colPivHouseholderQr().solve(rhs);
      if ((M * x - rhs).cwiseAbs().maxCoeff() > feas_tol * (1.0 + rhs.cwiseAbs().maxCoeff())) {
        return;
      }
      if (poly.violation(x) > feas_tol) return;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) < 1e-13) x[i] = 0.0;
      }
      if (contains_close(out.vertices, x, 1e-9)) return;
      out.vertices.push_back(x);
      active_sets.push_back(active_of(x));
    });
  }

  // Extreme rays of the pointed recession cone.
  const int k_ray = d - rE - 1;
  if (k_ray >= 0 && !out.vertices.empty()) {
    Eigen::MatrixXd E0 = E;
    for_each_subset(n_in, k_ray, [&](const std::vector<int>& S) {
      Eigen::MatrixXd M = stack_rows(E0, poly.A_in, S);
      Eigen::MatrixXd N = null_space(M, tol);
      if (N.cols() != 1) return;
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd r = sign * N.col(0);
        r /= r.cwiseAbs().maxCoeff();
        if (n_in > 0 && (poly.A_in * r).maxCoeff() > feas_tol) continue;
        if (poly.A_eq.rows() > 0 &&
            (poly.A_eq * r).cwiseAbs().maxCoeff() > feas_tol) {
          continue;
        }
        for (Eigen::Index i = 0; i < r.size(); ++i) {
          if (std::abs(r[i]) < 1e-13) r[i] = 0.0;
        }
        if (!contains_close(out.rays, r, 1e-9)) out.rays.push_back(r);
      }
    });
  }

  // Bounded edges: vertex pairs whose common active rows leave one degree of
  // freedom.
  for (std::size_t i = 0; i < out.vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < out.vertices.size(); ++j) {
      std::vector<int> common;
      std::set_intersection(active_sets[i].begin(), active_sets[i].end(),
                            active_sets[j].begin(), active_sets[j].end(),
                            std::back_inserter(common));
      Eigen::MatrixXd M = stack_rows(E, poly.A_in, common);
      if (numerical_rank(M, tol) == d - 1) {
        out.edges.push_back({static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  return out;
}

}  // namespace bilevel
