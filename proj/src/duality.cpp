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

#include "bilevel/duality.hpp"

#include <cmath>
#include <limits>

#include "bilevel/errors.hpp"

namespace bilevel {

const char* to_string(DualKind k) {
  switch (k) {
    case DualKind::kLagrange:
      return "lagrange";
    case DualKind::kWolfe:
      return "wolfe";
    case DualKind::kMondWeir:
      return "mond-weir";
  }
  return "unknown";
}

DualKind parse_dual_kind(const std::string& s) {
  if (s == "lagrange") return DualKind::kLagrange;
  if (s == "wolfe") return DualKind::kWolfe;
  if (s == "mond-weir" || s == "mond_weir" || s == "mondweir") {
    return DualKind::kMondWeir;
  }
  throw InputError("unknown dual kind '" + s + "'");
}

double LagrangeValue::as_double() const {
  return minus_infinity ? -std::numeric_limits<double>::infinity() : value;
}

namespace {

Expr bound_lagrangian(const Nlp& nlp, const Eigen::VectorXd& v) {
  std::vector<Expr> terms{nlp.objective};
  int k = 0;
  for (const Expr& q : nlp.inequalities) terms.push_back(v[k++] * q);
  for (const Expr& h : nlp.equalities) terms.push_back(v[k++] * h);
  return Expr::sum(std::move(terms));
}

}  // namespace

LagrangeValue lagrange_value_fn(const Nlp& nlp, const Eigen::VectorXd& v,
                                double tol) {
  if (v.size() != nlp.num_constraints()) {
    throw InputError("lagrange_value_fn: multiplier has wrong dimension");
  }
  if (nlp.sense != Sense::kMinimize) {
    throw InputError("lagrange_value_fn expects a minimization problem");
  }
  LagrangeValue out;
  for (int i = 0; i < nlp.num_inequalities(); ++i) {
    if (v[i] < 0.0) {
      out.minus_infinity = true;
      return out;
    }
  }
  const Expr L = bound_lagrangian(nlp, v);
  if (joint_degree(L, nlp.block_names()) > 2) {
    throw CapabilityError(
        "Lagrange value function needs a Lagrangian of degree at most 2");
  }
  const int n = nlp.space.total_dim();
  const Point zero = Point::zeros(nlp.space);
  const Eigen::MatrixXd H = flat_hessian(L, zero);
  const Eigen::VectorXd g0 = flat_gradient(L, zero);
  if (n == 0) {
    out.value = eval(L, zero);
    out.minimizer = Eigen::VectorXd(0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const Eigen::MatrixXd& V = es.eigenvectors();
  const double top = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -1e-10 * top) {
    out.minus_infinity = true;
    out.ray = V.col(0);
    return out;
  }
  const Eigen::VectorXd coef = V.transpose() * g0;
  Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd null_part = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    if (ev[k] > 1e-10 * top) {
      step[k] = -coef[k] / ev[k];
    } else {
      null_part[k] = -coef[k];
    }
  }
  if (null_part.cwiseAbs().maxCoeff() > std::max(tol, 1e-9 * (1.0 + g0.cwiseAbs().maxCoeff()))) {
    out.minus_infinity = true;
    out.ray = V * null_part;
    return out;
  }
  out.minimizer = V * step;
  out.value = eval(L, Point(nlp.space, out.minimizer));
  return out;
}

namespace {

Nlp build_dual(const Nlp& nlp, const DualOptions& opt, bool mond_weir) {
  if (nlp.sense != Sense::kMinimize) {
    throw InputError("dual construction expects a minimization problem");
  }
  if (nlp.convexity != Convexity::kConvex && !opt.allow_uncertified) {
    throw InputError("dual construction requires a convexity-certified program");
  }
  const int t = nlp.num_constraints();
  std::vector<std::pair<std::string, int>> blocks;
  auto renamed = [&](const std::string& name) {
    auto it = opt.rename.find(name);
    return it == opt.rename.end() ? name : it->second;
  };
  for (const auto& b : nlp.space.blocks()) blocks.push_back({renamed(b.name), b.dim});
  for (const auto& b : blocks) {
    if (b.first == opt.multiplier) {
      throw InputError("multiplier block name collides with a primal block");
    }
  }
  if (t > 0) blocks.push_back({opt.multiplier, t});
  const VarSpace space(blocks);

  auto rename_all = [&](Expr e) {
    for (const auto& b : nlp.space.blocks()) {
      const std::string to = renamed(b.name);
      if (to != b.name) e = rename_block(e, b.name, to);
    }
    return e;
  };
  std::vector<Expr> q;
  for (const Expr& e : nlp.inequalities) q.push_back(rename_all(e));
  for (const Expr& e : nlp.equalities) q.push_back(rename_all(e));
  const Expr p = rename_all(nlp.objective);
  std::vector<Expr> lag_terms{p};
  for (int i = 0; i < t; ++i) lag_terms.push_back(Expr::var(opt.multiplier, i) * q[i]);
  const Expr L = Expr::sum(lag_terms);

  std::vector<Expr> eqs;
  for (const auto& b : nlp.space.blocks()) {
    const std::string name = renamed(b.name);
    for (int i = 0; i < b.dim; ++i) eqs.push_back(diff(L, name, i));
  }
  std::vector<Expr> ineqs;
  if (mond_weir && t > 0) {
    std::vector<Expr> terms;
    for (int i = 0; i < t; ++i) terms.push_back(Expr::var(opt.multiplier, i) * q[i]);
    ineqs.push_back(-Expr::sum(terms));
  }
  for (int i = 0; i < nlp.num_inequalities(); ++i) {
    ineqs.push_back(-Expr::var(opt.multiplier, i));
  }
  return make_nlp(space, mond_weir ? p : L, std::move(ineqs), std::move(eqs),
                  Sense::kMaximize);
}

}  // namespace

Nlp build_wolfe_dual(const Nlp& nlp, const DualOptions& options) {
  return build_dual(nlp, options, false);
}

Nlp build_mond_weir_dual(const Nlp& nlp, const DualOptions& options) {
  return build_dual(nlp, options, true);
}

DualityReport check_weak_duality(const Nlp& nlp, const Eigen::VectorXd& primal,
                                 const Eigen::VectorXd& dual_point, DualKind kind,
                                 double tol, const DualOptions& options) {
  DualityReport rep;
  rep.kind = kind;
  rep.convex_certified = nlp.convexity == Convexity::kConvex;
  rep.primal_point = primal;
  rep.dual_point = dual_point;
  rep.primal_violation = constraint_violation(nlp, primal);
  if (rep.primal_violation > tol) {
    throw InputError("primal point violates constraints by " +
                     std::to_string(rep.primal_violation));
  }
  rep.primal_value = objective_value(nlp, primal);
  if (kind == DualKind::kLagrange) {
    const int nu = nlp.num_inequalities();
    for (int i = 0; i < nu; ++i) {
      rep.dual_violation = std::max(rep.dual_violation, -dual_point[i]);
    }
    if (rep.dual_violation > tol) {
      throw InputError("Lagrange multiplier has a negative component");
    }
    Eigen::VectorXd v = dual_point;
    for (int i = 0; i < nu; ++i) v[i] = std::max(0.0, v[i]);
    const LagrangeValue lv = lagrange_value_fn(nlp, v, tol);
    if (lv.minus_infinity) {
      throw InputError("multiplier lies outside the domain of the Lagrange dual");
    }
    rep.dual_value = lv.value;
  } else {
    DualOptions opt = options;
    opt.allow_uncertified = true;
    const Nlp dual = kind == DualKind::kWolfe ? build_wolfe_dual(nlp, opt)
                                              : build_mond_weir_dual(nlp, opt);
    if (dual_point.size() != dual.space.total_dim()) {
      throw InputError("dual point has wrong dimension");
    }
    rep.dual_violation = constraint_violation(dual, dual_point);
    if (rep.dual_violation > tol) {
      throw InputError("dual point violates dual constraints by " +
                       std::to_string(rep.dual_violation));
    }
    rep.dual_value = objective_value(dual, dual_point);
  }
  rep.gap = rep.primal_value - rep.dual_value;
  rep.weak_duality_ok = rep.gap >= -tol;
  return rep;
}

StrongDualityReport check_strong_duality(const Nlp& nlp, DualKind kind, double tol_gap,
                                         double tol_feas) {
  StrongDualityReport rep;
  rep.kind = kind;
  const SolveReport sol = solve_convex(nlp, Eigen::VectorXd::Zero(nlp.space.total_dim()));
  rep.primal_status = sol.status;
  if (sol.status != SolveStatus::kOptimal && sol.status != SolveStatus::kToleranceReached) {
    return rep;
  }
  rep.primal_point = sol.point;
  rep.primal_value = sol.value;
  Eigen::VectorXd v = sol.multipliers;
  for (int i = 0; i < nlp.num_inequalities(); ++i) v[i] = std::max(0.0, v[i]);
  rep.multipliers = v;
  if (kind == DualKind::kLagrange) {
    const LagrangeValue lv = lagrange_value_fn(nlp, v);
    if (lv.minus_infinity) {
      rep.dual_value = -std::numeric_limits<double>::infinity();
      rep.gap = std::numeric_limits<double>::infinity();
      return rep;
    }
    rep.dual_value = lv.value;
  } else {
    DualOptions opt;
    opt.allow_uncertified = true;
    const Nlp dual = kind == DualKind::kWolfe ? build_wolfe_dual(nlp, opt)
                                              : build_mond_weir_dual(nlp, opt);
    Eigen::VectorXd wv(sol.point.size() + v.size());
    wv << sol.point, v;
    rep.dual_violation = constraint_violation(dual, wv);
    rep.dual_value = objective_value(dual, wv);
  }
  rep.gap = rep.primal_value - rep.dual_value;
  rep.holds = rep.dual_violation <= tol_feas && std::abs(rep.gap) <= tol_gap;
  return rep;
}

SaddleResult check_saddle_point(const Nlp& nlp, const Eigen::VectorXd& w,
                                const Eigen::VectorXd& v, double tol) {
  SaddleResult out;
  out.residual = kkt_residual(nlp, w, v);
  out.is_saddle = out.residual <= tol;
  return out;
}

ConverseCertificate converse_duality_certificate(const Nlp& nlp,
                                                 const Eigen::VectorXd& w,
                                                 const Eigen::VectorXd& v,
                                                 DualKind kind, double tol,
                                                 bool assume_regular_minimizer) {
  if (kind == DualKind::kLagrange) {
    throw InputError("converse duality certificates cover Wolfe and Mond-Weir duals");
  }
  DualOptions opt;
  opt.allow_uncertified = true;
  const Nlp dual = kind == DualKind::kWolfe ? build_wolfe_dual(nlp, opt)
                                            : build_mond_weir_dual(nlp, opt);
  Eigen::VectorXd wv(w.size() + v.size());
  wv << w, v;
  if (wv.size() != dual.space.total_dim()) {
    throw InputError("dual point has wrong dimension");
  }
  const double viol = constraint_violation(dual, wv);
  if (viol > tol) {
    throw InputError("dual point violates dual constraints by " + std::to_string(viol));
  }
  ConverseCertificate out;
  const Point pw(nlp.space, w);
  const Expr L = bound_lagrangian(nlp, v);
  const Eigen::MatrixXd H = flat_hessian(L, pw);
  out.gradient_norm = flat_gradient(nlp.objective, pw).cwiseAbs().maxCoeff();
  if (kind == DualKind::kWolfe) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
    out.matrix_measure = H.size() == 0 ? 0.0 : svd.singularValues().minCoeff();
    out.applies = out.matrix_measure >= tol;
    out.reason = out.applies ? "Hessian of the Lagrangian is regular"
                             : "Hessian of the Lagrangian is singular";
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
    out.matrix_measure = H.size() == 0 ? 0.0 : es.eigenvalues().minCoeff();
    if (out.matrix_measure < tol) {
      out.reason = "Hessian of the Lagrangian is not positive definite";
    } else if (out.gradient_norm >= tol) {
      out.applies = true;
      out.reason = "positive definite Hessian and nonvanishing objective gradient";
    } else if (assume_regular_minimizer) {
      out.applies = true;
      out.reason = "positive definite Hessian and asserted regular primal minimizer";
    } else {
      out.reason = "objective gradient vanishes and no regular primal minimizer asserted";
    }
  }
  if (out.applies) {
    out.primal_feasible = constraint_violation(nlp, w) <= tol;
    out.kkt_residual = kkt_residual(nlp, w, v);
    out.counterexample = !out.primal_feasible || out.kkt_residual > tol;
  }
  return out;
}

}  // namespace bilevel
