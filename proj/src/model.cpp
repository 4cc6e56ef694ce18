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

#include "bilevel/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "bilevel/errors.hpp"

namespace bilevel {

const char* to_string(Sense s) {
  return s == Sense::kMinimize ? "minimize" : "maximize";
}

const char* to_string(Convexity c) {
  return c == Convexity::kConvex ? "convex" : "unknown";
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kToleranceReached:
      return "tolerance_reached";
  }
  return "unknown";
}

std::vector<std::string> Nlp::block_names() const {
  std::vector<std::string> out;
  for (const auto& b : space.blocks()) out.push_back(b.name);
  return out;
}

namespace {

bool in_blocks(const std::string& name, const std::vector<std::string>& blocks) {
  return std::find(blocks.begin(), blocks.end(), name) != blocks.end();
}

void collect_vars(const Expr& e, const std::vector<std::string>& blocks,
                  std::set<std::pair<std::string, int>>& out) {
  if (e.kind() == Expr::Kind::kVar) {
    if (in_blocks(e.block(), blocks)) out.insert({e.block(), e.index()});
    return;
  }
  for (const Expr& c : e.children()) collect_vars(c, blocks, out);
}

bool depends_on_any(const Expr& e, const std::vector<std::string>& blocks) {
  for (const auto& b : blocks) {
    if (depends_on(e, b)) return true;
  }
  return false;
}

bool quadratic_psd(const Expr& e, const std::vector<std::string>& blocks) {
  std::set<std::pair<std::string, int>> vars;
  collect_vars(e, blocks, vars);
  std::vector<std::pair<std::string, int>> list(vars.begin(), vars.end());
  const int k = static_cast<int>(list.size());
  Eigen::MatrixXd H(k, k);
  for (int i = 0; i < k; ++i) {
    Expr di = diff(e, list[i].first, list[i].second);
    for (int j = 0; j < k; ++j) {
      Expr dij = simplify(diff(di, list[j].first, list[j].second));
      if (!dij.is_constant()) return false;
      H(i, j) = dij.value();
    }
  }
  if (k == 0) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
  return es.eigenvalues().minCoeff() >= -1e-10;
}

}  // namespace

int joint_degree(const Expr& e, const std::vector<std::string>& blocks) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      return 0;
    case Expr::Kind::kVar:
      return in_blocks(e.block(), blocks) ? 1 : 0;
    case Expr::Kind::kAdd: {
      int d = 0;
      for (const Expr& c : e.children()) d = std::max(d, joint_degree(c, blocks));
      return d;
    }
    case Expr::Kind::kMul: {
      int d = 0;
      for (const Expr& c : e.children()) d += joint_degree(c, blocks);
      return d;
    }
    case Expr::Kind::kPow:
      return e.exponent() * joint_degree(e.children().front(), blocks);
    case Expr::Kind::kNeg:
      return joint_degree(e.children().front(), blocks);
  }
  return 0;
}

bool is_affine(const Expr& e, const std::vector<std::string>& blocks) {
  return joint_degree(e, blocks) <= 1;
}

bool certify_convex(const Expr& e, const std::vector<std::string>& blocks) {
  const int d = joint_degree(e, blocks);
  if (d <= 1) return true;
  if (d == 2 && quadratic_psd(e, blocks)) return true;
  switch (e.kind()) {
    case Expr::Kind::kAdd:
      for (const Expr& c : e.children()) {
        if (!certify_convex(c, blocks)) return false;
      }
      return true;
    case Expr::Kind::kMul: {
      double scale = 1.0;
      const Expr* piece = nullptr;
      for (const Expr& c : e.children()) {
        if (depends_on_any(c, blocks)) {
          if (piece != nullptr) return false;
          piece = &c;
        } else if (c.is_constant()) {
          scale *= c.value();
        } else {
          return false;
        }
      }
      return piece != nullptr && scale >= 0.0 && certify_convex(*piece, blocks);
    }
    case Expr::Kind::kPow:
      return e.exponent() % 2 == 0 && is_affine(e.children().front(), blocks);
    default:
      return false;
  }
}

bool certify_convex(const Expr& e, const VarSpace& space) {
  std::vector<std::string> names;
  for (const auto& b : space.blocks()) names.push_back(b.name);
  return certify_convex(e, names);
}

Convexity structural_convexity(const Nlp& nlp) {
  const auto names = nlp.block_names();
  const Expr obj =
      nlp.sense == Sense::kMinimize ? nlp.objective : -nlp.objective;
  if (!certify_convex(obj, names)) return Convexity::kUnknown;
  for (const Expr& q : nlp.inequalities) {
    if (!certify_convex(q, names)) return Convexity::kUnknown;
  }
  for (const Expr& h : nlp.equalities) {
    if (!is_affine(h, names)) return Convexity::kUnknown;
  }
  return Convexity::kConvex;
}

Nlp make_nlp(VarSpace space, Expr objective, std::vector<Expr> inequalities,
             std::vector<Expr> equalities, Sense sense) {
  Nlp nlp;
  nlp.space = std::move(space);
  nlp.objective = std::move(objective);
  nlp.inequalities = std::move(inequalities);
  nlp.equalities = std::move(equalities);
  nlp.sense = sense;
  // Validates every variable reference against the space.
  CompiledExpr(nlp.objective, nlp.space);
  for (const Expr& q : nlp.inequalities) CompiledExpr(q, nlp.space);
  for (const Expr& h : nlp.equalities) CompiledExpr(h, nlp.space);
  nlp.convexity = structural_convexity(nlp);
  return nlp;
}

Eigen::VectorXd flat_gradient(const Expr& e, const Point& pt) {
  Eigen::VectorXd g(pt.space.total_dim());
  for (const auto& b : pt.space.blocks()) {
    g.segment(b.offset, b.dim) = grad(e, b.name, pt);
  }
  return g;
}

Eigen::MatrixXd flat_hessian(const Expr& e, const Point& pt) {
  const int n = pt.space.total_dim();
  Eigen::MatrixXd H(n, n);
  for (const auto& a : pt.space.blocks()) {
    for (const auto& b : pt.space.blocks()) {
      H.block(a.offset, b.offset, a.dim, b.dim) = hessian(e, a.name, b.name, pt);
    }
  }
  return H;
}

double constraint_violation(const Nlp& nlp, const Eigen::VectorXd& w) {
  const Point pt(nlp.space, w);
  double v = 0.0;
  for (const Expr& q : nlp.inequalities) v = std::max(v, eval(q, pt));
  for (const Expr& h : nlp.equalities) v = std::max(v, std::abs(eval(h, pt)));
  return v;
}

double objective_value(const Nlp& nlp, const Eigen::VectorXd& w) {
  return eval(nlp.objective, Point(nlp.space, w));
}

Expr nlp_lagrangian(const Nlp& nlp, const std::string& mult) {
  std::vector<Expr> terms{nlp.objective};
  int k = 0;
  for (const Expr& q : nlp.inequalities) terms.push_back(Expr::var(mult, k++) * q);
  for (const Expr& h : nlp.equalities) terms.push_back(Expr::var(mult, k++) * h);
  return Expr::sum(std::move(terms));
}

double kkt_residual(const Nlp& nlp, const Eigen::VectorXd& w,
                    const Eigen::VectorXd& v) {
  if (v.size() != nlp.num_constraints()) {
    throw InputError("kkt_residual: expected " +
                     std::to_string(nlp.num_constraints()) + " multipliers");
  }
  const Point pt(nlp.space, w);
  const double sign = nlp.sense == Sense::kMinimize ? 1.0 : -1.0;
  Eigen::VectorXd stat = sign * flat_gradient(nlp.objective, pt);
  double res = 0.0;
  int k = 0;
  for (const Expr& q : nlp.inequalities) {
    const double val = eval(q, pt);
    stat += v[k] * flat_gradient(q, pt);
    res = std::max({res, val, -v[k], std::abs(v[k] * val)});
    ++k;
  }
  for (const Expr& h : nlp.equalities) {
    stat += v[k] * flat_gradient(h, pt);
    res = std::max(res, std::abs(eval(h, pt)));
    ++k;
  }
  if (stat.size() > 0) res = std::max(res, stat.cwiseAbs().maxCoeff());
  return res;
}

VarSpace BilevelProblem::xy_space() const {
  return VarSpace::from_nonempty({{"x", n}, {"y", m}});
}
VarSpace BilevelProblem::x_space() const {
  return VarSpace::from_nonempty({{"x", n}});
}
VarSpace BilevelProblem::y_space() const {
  return VarSpace::from_nonempty({{"y", m}});
}

BilevelProblem make_bilevel(std::string name, int n, int m, Expr F,
                            std::vector<Expr> G, Expr f, std::vector<Expr> g) {
  if (n < 1 || m < 1) throw InputError("dimensions n and m must be positive");
  BilevelProblem bp;
  bp.name = std::move(name);
  bp.n = n;
  bp.m = m;
  bp.p = static_cast<int>(g.size());
  bp.q = static_cast<int>(G.size());
  bp.F = std::move(F);
  bp.G = std::move(G);
  bp.f = std::move(f);
  bp.g = std::move(g);
  const VarSpace xy = bp.xy_space();
  const VarSpace xs = bp.x_space();
  CompiledExpr(bp.F, xy);
  CompiledExpr(bp.f, xy);
  for (const Expr& e : bp.G) CompiledExpr(e, xs);
  for (const Expr& e : bp.g) CompiledExpr(e, xy);
  bp.lower_convex_in_y = certify_convex(bp.f, {"y"});
  for (const Expr& e : bp.g) {
    bp.lower_convex_in_y = bp.lower_convex_in_y && certify_convex(e, {"y"});
  }
  return bp;
}

Expr lagrangian(const BilevelProblem& bp) {
  std::vector<Expr> terms{bp.f};
  for (int i = 0; i < bp.p; ++i) terms.push_back(Expr::var("u", i) * bp.g[i]);
  return Expr::sum(std::move(terms));
}

Nlp lower_level(const BilevelProblem& bp, const Eigen::VectorXd& x) {
  if (x.size() != bp.n) throw InputError("lower_level: x has wrong dimension");
  std::vector<Expr> ineq;
  for (const Expr& e : bp.g) ineq.push_back(bind(e, "x", x));
  return make_nlp(bp.y_space(), bind(bp.f, "x", x), std::move(ineq), {});
}

bool lower_affine_in_y(const BilevelProblem& bp) {
  if (!is_affine(bp.f, {"y"})) return false;
  for (const Expr& e : bp.g) {
    if (!is_affine(e, {"y"})) return false;
  }
  return true;
}

double ValueResult::as_double() const {
  switch (kind) {
    case Kind::kPlusInfinity:
      return std::numeric_limits<double>::infinity();
    case Kind::kMinusInfinity:
      return -std::numeric_limits<double>::infinity();
    case Kind::kFinite:
      break;
  }
  return value;
}

ValueResult value_function(const BilevelProblem& bp, const Eigen::VectorXd& x,
                           double tol) {
  if (!bp.lower_convex_in_y) {
    throw InputError("value_function requires a lower level certified convex in y");
  }
  Nlp ll = lower_level(bp, x);
  SolveReport rep = solve_convex(ll, Eigen::VectorXd::Zero(bp.m), tol);
  ValueResult out;
  switch (rep.status) {
    case SolveStatus::kInfeasible:
      out.kind = ValueResult::Kind::kPlusInfinity;
      break;
    case SolveStatus::kUnbounded:
      out.kind = ValueResult::Kind::kMinusInfinity;
      break;
    default:
      out.value = rep.value;
      out.y = rep.point;
  }
  return out;
}

bool solution_membership(const BilevelProblem& bp, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y, double tol) {
  Eigen::VectorXd xy(bp.n + bp.m);
  xy << x, y;
  const Point pt(bp.xy_space(), xy);
  for (const Expr& e : bp.g) {
    if (eval(e, pt) > tol) return false;
  }
  const ValueResult phi = value_function(bp, x, tol);
  if (phi.kind != ValueResult::Kind::kFinite) return false;
  return eval(bp.f, pt) <= phi.value + tol;
}

MultiplierPolyhedron multiplier_set(const BilevelProblem& bp,
                                    const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y, double tol_act) {
  Eigen::VectorXd xy(bp.n + bp.m);
  xy << x, y;
  const Point pt(bp.xy_space(), xy);
  MultiplierPolyhedron mp;
  mp.p = bp.p;
  mp.A = Eigen::MatrixXd::Zero(bp.m, bp.p);
  mp.b = -grad(bp.f, "y", pt);
  for (int i = 0; i < bp.p; ++i) {
    const double val = eval(bp.g[i], pt);
    if (val > tol_act) {
      throw InputError("multiplier_set: y violates lower-level constraint " +
                       std::to_string(i) + " by " + std::to_string(val));
    }
    if (val >= -tol_act) {
      mp.active.push_back(i);
    } else {
      mp.zero_indices.push_back(i);
    }
    mp.A.col(i) = grad(bp.g[i], "y", pt);
  }
  return mp;
}

Polyhedron MultiplierPolyhedron::to_polyhedron() const {
  Polyhedron poly(p);
  for (Eigen::Index r = 0; r < A.rows(); ++r) poly.add_eq(A.row(r), b[r]);
  for (int i : zero_indices) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(p);
    row[i] = 1.0;
    poly.add_eq(row, 0.0);
  }
  for (int i = 0; i < p; ++i) poly.add_nonneg(i);
  return poly;
}

PolyhedronDescription polyhedron_vertices(const MultiplierPolyhedron& mp,
                                          int dim_cap) {
  return enumerate_polyhedron(mp.to_polyhedron(), dim_cap);
}

}  // namespace bilevel
