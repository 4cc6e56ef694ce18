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

#include "bilevel/cq.hpp"

#include <cmath>
#include <optional>

#include "bilevel/errors.hpp"
#include "bilevel/lp.hpp"
#include "bilevel/polyhedron.hpp"

namespace bilevel {

const char* to_string(CqCondition c) {
  switch (c) {
    case CqCondition::kMfcq:
      return "mfcq";
    case CqCondition::kNsmfcq:
      return "nsmfcq";
    case CqCondition::kSlater:
      return "slater";
    case CqCondition::kGcqPolyhedral:
      return "gcq_polyhedral";
    case CqCondition::kBcq:
      return "bcq";
  }
  return "unknown";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kHolds:
      return "holds";
    case Verdict::kViolated:
      return "violated";
    case Verdict::kNotApplicable:
      return "not_applicable";
  }
  return "unknown";
}

namespace {

std::map<std::string, double> tol_map(const CqTolerances& t) {
  return {{"cert_tol", t.cert_tol},
          {"lp_tol", t.lp_tol},
          {"tol", t.tol},
          {"tol_act", t.tol_act}};
}

LpOptions lp_options(const CqTolerances& t) {
  LpOptions o;
  o.optimality_tol = t.lp_tol;
  return o;
}

Eigen::MatrixXd stack_rows(const std::vector<Eigen::VectorXd>& rows, int cols) {
  Eigen::MatrixXd M(static_cast<int>(rows.size()), cols);
  for (int i = 0; i < M.rows(); ++i) M.row(i) = rows[i].transpose();
  return M;
}

}  // namespace

bool PolyhedralCone::contains(const Eigen::VectorXd& v, double tol) const {
  const int ng = static_cast<int>(generators.size());
  const int nl = static_cast<int>(lineality.size());
  LinearProgram lp(ng + nl);
  for (int i = 0; i < ng; ++i) lp.lower[i] = 0.0;
  for (int r = 0; r < v.size(); ++r) {
    Eigen::RowVectorXd row(ng + nl);
    for (int i = 0; i < ng; ++i) row[i] = generators[i][r];
    for (int i = 0; i < nl; ++i) row[ng + i] = lineality[i][r];
    lp.add_eq(row, v[r]);
  }
  LpOptions o;
  o.feasibility_tol = tol;
  return solve_lp(lp, o).status == LpStatus::kOptimal;
}

CqReport check_mfcq(const Nlp& nlp, const Eigen::VectorXd& w, const CqTolerances& tols) {
  CqReport rep;
  rep.condition = CqCondition::kMfcq;
  rep.tolerances = tol_map(tols);
  const double viol = constraint_violation(nlp, w);
  if (viol > tols.tol_act) {
    throw InputError("point violates the constraints by " + std::to_string(viol));
  }
  const int s = nlp.space.total_dim();
  const Point pt(nlp.space, w);
  std::vector<Eigen::VectorXd> gq;
  for (int i = 0; i < nlp.num_inequalities(); ++i) {
    if (eval(nlp.inequalities[i], pt) >= -tols.tol_act) {
      rep.active_set.push_back(i);
      gq.push_back(flat_gradient(nlp.inequalities[i], pt));
    }
  }
  std::vector<Eigen::VectorXd> gh;
  for (const Expr& h : nlp.equalities) gh.push_back(flat_gradient(h, pt));
  const int k = static_cast<int>(gq.size());
  const int e = static_cast<int>(gh.size());
  const Eigen::MatrixXd Q = stack_rows(gq, s);
  const Eigen::MatrixXd E = stack_rows(gh, s);

  // Primal: max sigma s.t. Q d + sigma <= 0, E d = 0, sigma <= 1, |d| <= 1.
  LinearProgram primal(s + 1);
  for (int j = 0; j < s; ++j) {
    primal.lower[j] = -1.0;
    primal.upper[j] = 1.0;
  }
  primal.upper[s] = 1.0;
  primal.lower[s] = -1.0;
  primal.c[s] = -1.0;
  for (int i = 0; i < k; ++i) {
    Eigen::RowVectorXd row(s + 1);
    row << Q.row(i), 1.0;
    primal.add_le(row, 0.0);
  }
  for (int i = 0; i < e; ++i) {
    Eigen::RowVectorXd row(s + 1);
    row << E.row(i), 0.0;
    primal.add_eq(row, 0.0);
  }
  const LpResult pr = solve_lp(primal, lp_options(tols));
  const int rank = e == 0 ? 0 : numerical_rank(E, tols.tol);
  if (pr.status == LpStatus::kOptimal) {
    rep.sigma = pr.x[s];
    rep.direction = pr.x.head(s);
  } else {
    rep.sigma = -1.0;
  }
  const bool primal_holds = rep.sigma >= tols.tol && rank == e;

  // Dual: Q^T lambda + E^T mu = 0, sum lambda = 1, lambda >= 0.
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(e);
  bool found = false;
  if (k > 0) {
    LinearProgram dual(k + e);
    for (int i = 0; i < k; ++i) dual.lower[i] = 0.0;
    for (int r = 0; r < s; ++r) {
      Eigen::RowVectorXd row(k + e);
      row << Q.col(r).transpose(), E.col(r).transpose();
      dual.add_eq(row, 0.0);
    }
    Eigen::RowVectorXd ones = Eigen::RowVectorXd::Zero(k + e);
    ones.head(k).setOnes();
    dual.add_eq(ones, 1.0);
    const LpResult dr = solve_lp(dual, lp_options(tols));
    if (dr.status == LpStatus::kOptimal) {
      lambda = dr.x.head(k);
      mu = dr.x.tail(e);
      found = true;
    }
  }
  if (!found && rank < e) {
    const Eigen::MatrixXd N = null_space(E.transpose(), tols.tol);
    if (N.cols() > 0) {
      mu = N.col(0);
      found = true;
    }
  }
  bool dual_violated = false;
  if (found) {
    double scale = std::max(lambda.size() ? lambda.cwiseAbs().maxCoeff() : 0.0,
                            mu.size() ? mu.cwiseAbs().maxCoeff() : 0.0);
    if (scale > 0.0) {
      lambda /= scale;
      mu /= scale;
      Eigen::VectorXd res = Eigen::VectorXd::Zero(s);
      if (k > 0) res += Q.transpose() * lambda;
      if (e > 0) res += E.transpose() * mu;
      rep.certificate_residual = s > 0 ? res.cwiseAbs().maxCoeff() : 0.0;
      rep.multipliers = Eigen::VectorXd::Zero(nlp.num_constraints());
      for (int i = 0; i < k; ++i) rep.multipliers[rep.active_set[i]] = lambda[i];
      for (int i = 0; i < e; ++i) rep.multipliers[nlp.num_inequalities() + i] = mu[i];
      dual_violated = rep.certificate_residual <= tols.cert_tol;
    }
  }
  rep.primal_dual_agree = primal_holds != dual_violated;
  if (primal_holds) {
    rep.verdict = Verdict::kHolds;
    rep.reason = "strictly decreasing direction exists";
  } else {
    rep.verdict = Verdict::kViolated;
    rep.reason = rank < e ? "equality gradients are linearly dependent"
                          : "no strictly decreasing direction";
  }
  return rep;
}

CqReport check_mfcq(const ReformulatedNlp& r, const Eigen::VectorXd& w,
                    const CqTolerances& tols) {
  if (!r.implicit_constraints.empty()) {
    throw CapabilityError(
        "MFCQ needs gradients; the reformulation carries callable constraints");
  }
  return check_mfcq(r.nlp, w, tols);
}

CqReport check_slater(const std::vector<Expr>& constraints, const VarSpace& space,
                      const CqTolerances& tols) {
  CqReport rep;
  rep.condition = CqCondition::kSlater;
  rep.tolerances = tol_map(tols);
  const int s = space.total_dim();
  if (constraints.empty()) {
    rep.verdict = Verdict::kHolds;
    rep.reason = "no constraints";
    rep.point = Eigen::VectorXd::Zero(s);
    return rep;
  }
  bool affine = true;
  for (const Expr& c : constraints) {
    if (!certify_convex(c, space)) {
      rep.verdict = Verdict::kNotApplicable;
      rep.reason = "constraints are not certified convex";
      return rep;
    }
    std::vector<std::string> names;
    for (const auto& b : space.blocks()) names.push_back(b.name);
    affine = affine && is_affine(c, names);
  }
  double best = 0.0;
  Eigen::VectorXd point;
  if (affine) {
    const Point zero = Point::zeros(space);
    LinearProgram lp(s + 1);
    lp.lower[s] = -1.0;
    lp.c[s] = 1.0;
    for (const Expr& c : constraints) {
      Eigen::RowVectorXd row(s + 1);
      row << flat_gradient(c, zero).transpose(), -1.0;
      lp.add_le(row, -eval(c, zero));
    }
    const LpResult res = solve_lp(lp, lp_options(tols));
    if (res.status != LpStatus::kOptimal) {
      throw CapabilityError("Slater LP failed: " + std::string(to_string(res.status)));
    }
    point = res.x.head(s);
  } else {
    std::vector<std::pair<std::string, int>> blocks;
    for (const auto& b : space.blocks()) blocks.push_back({b.name, b.dim});
    blocks.push_back({"slack", 1});
    const VarSpace ext(blocks);
    const Expr t = Expr::var("slack", 0);
    std::vector<Expr> ineqs;
    for (const Expr& c : constraints) ineqs.push_back(c - t);
    ineqs.push_back(Expr::constant(-1.0) - t);
    const Nlp nlp = make_nlp(ext, t, std::move(ineqs), {});
    Eigen::VectorXd start = Eigen::VectorXd::Zero(s + 1);
    const Point zero = Point::zeros(space);
    double worst = -1.0;
    for (const Expr& c : constraints) worst = std::max(worst, eval(c, zero));
    start[s] = worst + 1.0;
    const SolveReport sr = solve_convex(nlp, start, tols.tol);
    if (sr.status == SolveStatus::kInfeasible || sr.status == SolveStatus::kUnbounded) {
      throw CapabilityError("Slater subproblem could not be solved");
    }
    point = sr.point.head(s);
  }
  const Point pt(space, point);
  best = -std::numeric_limits<double>::infinity();
  for (const Expr& c : constraints) best = std::max(best, eval(c, pt));
  rep.point = point;
  rep.sigma = best;
  if (best < -tols.tol) {
    rep.verdict = Verdict::kHolds;
    rep.reason = "strictly feasible point found";
  } else {
    rep.verdict = Verdict::kViolated;
    rep.reason = "minimal constraint maximum is not negative";
  }
  return rep;
}

CqReport check_gcq_polyhedral(const Nlp& nlp) {
  CqReport rep;
  rep.condition = CqCondition::kGcqPolyhedral;
  const auto names = nlp.block_names();
  for (const Expr& e : nlp.inequalities) {
    if (!is_affine(e, names)) {
      rep.verdict = Verdict::kNotApplicable;
      rep.reason = "non-affine constraint";
      return rep;
    }
  }
  for (const Expr& e : nlp.equalities) {
    if (!is_affine(e, names)) {
      rep.verdict = Verdict::kNotApplicable;
      rep.reason = "non-affine constraint";
      return rep;
    }
  }
  rep.verdict = Verdict::kHolds;
  rep.reason = "all constraints are affine";
  return rep;
}

PolyhedralCone polyhedral_normal_cone(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                      const Eigen::MatrixXd& eqA,
                                      const Eigen::VectorXd& eqb,
                                      const Eigen::VectorXd& w, double tol_act) {
  PolyhedralCone cone;
  for (int i = 0; i < A.rows(); ++i) {
    const double slack = A.row(i).dot(w) - b[i];
    if (slack > tol_act) throw InputError("point lies outside the polyhedron");
    if (slack >= -tol_act) cone.generators.push_back(A.row(i).transpose());
  }
  for (int i = 0; i < eqA.rows(); ++i) {
    if (std::abs(eqA.row(i).dot(w) - eqb[i]) > tol_act) {
      throw InputError("point lies outside the polyhedron");
    }
    cone.lineality.push_back(eqA.row(i).transpose());
  }
  return cone;
}

namespace {

struct ConeHit {
  Eigen::VectorXd eta;
  Eigen::VectorXd coefficients;
  double residual = 0.0;
};

// Looks for eta = L xi + K lam != 0 with -eta in cone(M). Coefficients are
// boxed (|xi| <= 1, 0 <= lam, alpha <= kBound) so every LP is bounded.
std::optional<ConeHit> cone_intersection(const std::vector<Eigen::VectorXd>& L,
                                         const std::vector<Eigen::VectorXd>& K,
                                         const std::vector<Eigen::VectorXd>& M, int dim,
                                         const CqTolerances& tols) {
  constexpr double kBound = 1e3;
  const int nl = static_cast<int>(L.size());
  const int nk = static_cast<int>(K.size());
  const int nm = static_cast<int>(M.size());
  const int nv = nl + nk + nm;
  if (nl + nk == 0) return std::nullopt;
  Eigen::MatrixXd G(dim, nv);
  for (int i = 0; i < nl; ++i) G.col(i) = L[i];
  for (int i = 0; i < nk; ++i) G.col(nl + i) = K[i];
  for (int i = 0; i < nm; ++i) G.col(nl + nk + i) = M[i];
  LinearProgram base(nv);
  for (int i = 0; i < nl; ++i) {
    base.lower[i] = -1.0;
    base.upper[i] = 1.0;
  }
  for (int i = nl; i < nv; ++i) {
    base.lower[i] = 0.0;
    base.upper[i] = kBound;
  }
  for (int r = 0; r < dim; ++r) base.add_eq(G.row(r), 0.0);
  const Eigen::MatrixXd Eta = G.leftCols(nl + nk);
  std::optional<ConeHit> best;
  double best_value = tols.tol;
  for (int r = 0; r < dim; ++r) {
    for (double sign : {1.0, -1.0}) {
      LinearProgram lp = base;
      lp.c.setZero();
      lp.c.head(nl + nk) = -sign * Eta.row(r).transpose();
      const LpResult res = solve_lp(lp, lp_options(tols));
      if (res.status != LpStatus::kOptimal) continue;
      const double value = -res.value;
      if (value > best_value) {
        best_value = value;
        ConeHit hit;
        hit.coefficients = res.x.head(nl + nk);
        hit.eta = Eta * res.x.head(nl + nk);
        hit.residual = (G * res.x).cwiseAbs().maxCoeff();
        best = hit;
      }
    }
  }
  return best;
}

struct LdPieces {
  int dim = 0;
  Point pt;
  std::vector<Eigen::VectorXd> domain;      // lineality of N_Omega
  std::vector<Eigen::VectorXd> u_active;    // -e_{u_i} for active u_i = 0
  std::vector<Eigen::VectorXd> lower;       // active grad g
  std::vector<Eigen::VectorXd> upper;       // active grad G
  std::vector<int> active;
  Eigen::VectorXd grad_smooth;
  bool value_active = false;
};

std::optional<std::string> ld_not_applicable(const ReformulatedNlp& r) {
  if (r.kind != ReformKind::kLd) return "not a Lagrange dual reformulation";
  if (!r.closed_form) return "Lagrange value function has no closed form";
  for (const Expr& d : r.domain_equalities) {
    if (!is_affine(d, r.nlp.block_names())) return "domain of the dual is not polyhedral";
  }
  return std::nullopt;
}

LdPieces ld_pieces(const ReformulatedNlp& r, const Eigen::VectorXd& w,
                   const CqTolerances& tols) {
  if (w.size() != r.nlp.space.total_dim()) throw InputError("point has wrong dimension");
  const double viol = r.violation(w);
  if (viol > tols.tol_act) {
    throw InputError("point is infeasible for the reformulation (violation " +
                     std::to_string(viol) + ")");
  }
  LdPieces P;
  P.dim = static_cast<int>(w.size());
  P.pt = Point(r.nlp.space, w);
  for (const Expr& d : r.domain_equalities) P.domain.push_back(flat_gradient(d, P.pt));
  for (const auto& c : r.constraints) {
    if (c.equality) continue;
    const Expr& e = r.nlp.inequalities[c.index];
    const double v = eval(e, P.pt);
    if (v < -tols.tol_act) continue;
    P.active.push_back(c.index);
    const Eigen::VectorXd g = flat_gradient(e, P.pt);
    switch (c.role) {
      case Role::kSign:
        P.u_active.push_back(g);
        break;
      case Role::kLower:
        P.lower.push_back(g);
        break;
      case Role::kUpper:
        P.upper.push_back(g);
        break;
      case Role::kValue:
        P.value_active = true;
        break;
      default:
        break;
    }
  }
  P.grad_smooth = flat_gradient(r.smooth_value, P.pt);
  return P;
}

template <typename T>
std::vector<T> concat(std::vector<T> a, const std::vector<T>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

CqReport check_bcq_closed_form(const ReformulatedNlp& ldref, const Eigen::VectorXd& pt,
                               const CqTolerances& tols) {
  CqReport rep;
  rep.condition = CqCondition::kBcq;
  rep.tolerances = tol_map(tols);
  if (auto why = ld_not_applicable(ldref)) {
    rep.verdict = Verdict::kNotApplicable;
    rep.reason = *why;
    return rep;
  }
  const LdPieces P = ld_pieces(ldref, pt, tols);
  rep.active_set = P.active;
  const auto M = concat(P.lower, P.u_active);
  const auto hit = cone_intersection(P.domain, P.u_active, M, P.dim, tols);
  if (hit) {
    rep.verdict = Verdict::kViolated;
    rep.reason = "singular cone meets the negative normal cone nontrivially";
    rep.cone_element = hit->eta;
    rep.coefficients = hit->coefficients;
    rep.certificate_residual = hit->residual;
  } else {
    rep.verdict = Verdict::kHolds;
    rep.reason = "cone intersection is trivial";
  }
  return rep;
}

CqReport check_nsmfcq_ld(const ReformulatedNlp& ldref, const Eigen::VectorXd& pt,
                         const CqTolerances& tols) {
  CqReport rep;
  rep.condition = CqCondition::kNsmfcq;
  rep.tolerances = tol_map(tols);
  if (auto why = ld_not_applicable(ldref)) {
    rep.verdict = Verdict::kNotApplicable;
    rep.reason = *why;
    return rep;
  }
  const LdPieces P = ld_pieces(ldref, pt, tols);
  rep.active_set = P.active;

  // Smooth constraints alone.
  std::vector<Expr> smooth;
  for (const auto& c : ldref.constraints) {
    if (!c.equality && (c.role == Role::kUpper || c.role == Role::kLower ||
                        c.role == Role::kSign)) {
      smooth.push_back(ldref.nlp.inequalities[c.index]);
    }
  }
  const Nlp smooth_nlp =
      make_nlp(ldref.nlp.space, Expr::constant(0.0), std::move(smooth), {});
  const CqReport m = check_mfcq(smooth_nlp, pt, tols);
  if (m.verdict == Verdict::kViolated) {
    rep.verdict = Verdict::kViolated;
    rep.reason = "smooth constraints violate MFCQ";
    rep.multipliers = m.multipliers;
    rep.certificate_residual = m.certificate_residual;
    return rep;
  }

  const auto normals = concat(concat(P.upper, P.lower), P.u_active);
  if (P.value_active) {
    // grad s + L xi + K lam + M alpha = 0 with the value multiplier fixed at 1.
    const int nl = static_cast<int>(P.domain.size());
    const int nk = static_cast<int>(P.u_active.size());
    const int nm = static_cast<int>(normals.size());
    const int nv = nl + nk + nm;
    Eigen::MatrixXd G(P.dim, nv);
    for (int i = 0; i < nl; ++i) G.col(i) = P.domain[i];
    for (int i = 0; i < nk; ++i) G.col(nl + i) = P.u_active[i];
    for (int i = 0; i < nm; ++i) G.col(nl + nk + i) = normals[i];
    LinearProgram lp(nv);
    for (int i = nl; i < nv; ++i) lp.lower[i] = 0.0;
    for (int r = 0; r < P.dim; ++r) lp.add_eq(G.row(r), -P.grad_smooth[r]);
    const LpResult res = solve_lp(lp, lp_options(tols));
    if (res.status == LpStatus::kOptimal) {
      Eigen::VectorXd cert(nv + 1);
      cert << 1.0, res.x;
      const double scale = cert.cwiseAbs().maxCoeff();
      rep.coefficients = cert / scale;
      rep.certificate_residual =
          (P.grad_smooth + G * res.x).cwiseAbs().maxCoeff() / scale;
      rep.verdict = Verdict::kViolated;
      rep.reason = "nontrivial multiplier with positive value-row weight";
      return rep;
    }
  }
  const auto hit = cone_intersection(P.domain, P.u_active, normals, P.dim, tols);
  if (hit) {
    rep.verdict = Verdict::kViolated;
    rep.reason = "singular part admits a nontrivial multiplier";
    rep.cone_element = hit->eta;
    rep.coefficients = hit->coefficients;
    rep.certificate_residual = hit->residual;
    return rep;
  }
  rep.verdict = Verdict::kHolds;
  rep.reason = "only the trivial multiplier solves the system";
  return rep;
}

}  // namespace bilevel
