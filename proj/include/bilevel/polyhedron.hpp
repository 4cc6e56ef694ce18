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

// Small polyhedra {x | A_eq x = b_eq, A_in x <= b_in} and their vertex / ray
// description by basis enumeration.

#ifndef BILEVEL_POLYHEDRON_HPP_
#define BILEVEL_POLYHEDRON_HPP_

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bilevel {

struct Polyhedron {
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_in;
  Eigen::VectorXd b_in;

  explicit Polyhedron(int dim = 0);
  int dim() const { return static_cast<int>(A_eq.cols()); }

  void add_eq(const Eigen::RowVectorXd& row, double rhs);
  void add_le(const Eigen::RowVectorXd& row, double rhs);
  // Adds -x_i <= 0.
  void add_nonneg(int i);

  bool contains(const Eigen::VectorXd& x, double tol) const;
  // max over constraint violations (0 when inside).
  double violation(const Eigen::VectorXd& x) const;
};

// The polyhedron equals conv(vertices) + cone(rays) + span(lineality).
// Vertices and rays lie in the orthogonal complement of the lineality space.
struct PolyhedronDescription {
  std::vector<Eigen::VectorXd> vertices;
  std::vector<Eigen::VectorXd> rays;       // max-norm 1
  std::vector<Eigen::VectorXd> lineality;  // orthonormal
  std::vector<std::pair<int, int>> edges;  // bounded edges, vertex indices
  bool empty() const { return vertices.empty(); }
  bool bounded() const { return rays.empty() && lineality.empty(); }
};

// Throws CapabilityError when dim - rank(A_eq) exceeds dim_cap.
PolyhedronDescription enumerate_polyhedron(const Polyhedron& poly,
                                           int dim_cap = 6, double tol = 1e-9);

// Numerical rank by singular values relative to the largest one.
int numerical_rank(const Eigen::MatrixXd& M, double tol = 1e-9);
// Orthonormal basis of the null space of M, as columns.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& M, double tol = 1e-9);

}  // namespace bilevel

#endif  // BILEVEL_POLYHEDRON_HPP_
