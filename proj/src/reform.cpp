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

#include "bilevel/reform.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "bilevel/duality.hpp"
#include "bilevel/errors.hpp"
#include "bilevel/lp.hpp"

namespace bilevel {

const char* to_string(ReformKind k) {
  switch (k) {
    case ReformKind::kVf:
      return "vf";
    case ReformKind::kKkt:
      return "kkt";
    case ReformKind::kGe:
      return "ge";
    case ReformKind::kLd:
      return "ld";
    case ReformKind::kWd:
      return "wd";
    case ReformKind::kMwd:
      return "mwd";
  }
  return "unknown";
}

ReformKind parse_reform_kind(const std::string& s) {
  if (s == "vf") return ReformKind::kVf;
  if (s == "kkt") return ReformKind::kKkt;
  if (s == "ge") return ReformKind::kGe;
  if (s == "ld") return ReformKind::kLd;
  if (s == "wd") return ReformKind::kWd;
  if (s == "mwd") return ReformKind::kMwd;
  throw InputError("unknown reformulation kind '" + s + "'");
}

const char* to_string(Provenance p) {
  return p == Provenance::kOriginal ? "original" : "implicit";
}

const char* to_string(Role r) {
  switch (r) {
    case Role::kUpper:
      return "upper";
    case Role::kLower:
      return "lower";
    case Role::kSign:
      return "sign";
    case Role::kValue:
      return "value";
    case Role::kDomain:
      return "domain";
    case Role::kComplementarity:
      return "complementarity";
    case Role::kStationarity:
      return "stationarity";
    case Role::kDualFeasible:
      return "dual-feasible";
  }
  return "unknown";
}

Eigen::VectorXd ImplicitConstraint::args(const Point& pt) const {
  int total = 0;
  for (const auto& b : arg_blocks) total += pt.space.dim(b);
  Eigen::VectorXd a(total);
  int k = 0;
  for (const auto& b : arg_blocks) {
    const Eigen::VectorXd v = pt.block(b);
    a.segment(k, v.size()) = v;
    k += static_cast<int>(v.size());
  }
  return a;
}

double ImplicitConstraint::evaluate(const Point& pt) const {
  return evaluate(pt, args(pt));
}

double ImplicitConstraint::rhs(const Eigen::VectorXd& a) const {
  if (evaluations->fetch_add(1) >= budget) {
    throw CapabilityError("evaluation budget of implicit constraint '" + name +
                          "' exhausted");
  }
  return fn(a);
}

double ImplicitConstraint::evaluate(const Point& pt, const Eigen::VectorXd& a) const {
  const double r = rhs(a);
  if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
  return eval(lhs, pt) - r;
}

int ReformulatedNlp::logical_constraint_count() const {
  std::set<int> groups;
  for (const auto& c : constraints) groups.insert(c.group);
  return static_cast<int>(groups.size() + implicit_constraints.size());
}

int ReformulatedNlp::literal_constraint_count() const {
  return nlp.num_constraints() + static_cast<int>(implicit_constraints.size());
}

int ReformulatedNlp::implicit_variable_count() const {
  int total = 0;
  for (const auto& [name, prov] : provenance) {
    if (prov == Provenance::kImplicit && nlp.space.has(name)) {
      total += nlp.space.dim(name);
    }
  }
  return total;
}

double ReformulatedNlp::violation(const Eigen::VectorXd& w) const {
  double v = constraint_violation(nlp, w);
  if (!implicit_constraints.empty()) {
    const Point pt(nlp.space, w);
    for (const auto& ic : implicit_constraints) {
      v = std::max(v, ic.evaluate(pt));
    }
  }
  return v;
}

bool ReformulatedNlp::feasible(const Eigen::VectorXd& w, double tol) const {
  return violation(w) <= tol;
}

namespace {

class Builder {
 public:
  explicit Builder(ReformulatedNlp& r) : r_(r) {}

  void ineq(Expr e, Role role, std::string label, int group = -1) {
    r_.constraints.push_back({std::move(label), role, false,
                              static_cast<int>(ineqs_.size()),
                              group < 0 ? next_group_++ : group});
    ineqs_.push_back(std::move(e));
  }
  void eq(Expr e, Role role, std::string label, int group = -1) {
    eq_meta_.push_back({std::move(label), role, true,
                        static_cast<int>(eqs_.size()),
                        group < 0 ? next_group_++ : group});
    eqs_.push_back(std::move(e));
  }
  int new_group() { return next_group_++; }

  void finish(VarSpace space, Expr objective) {
    for (auto& m : eq_meta_) r_.constraints.push_back(std::move(m));
    r_.nlp = make_nlp(std::move(space), std::move(objective), std::move(ineqs_),
                      std::move(eqs_));
  }

 private:
  ReformulatedNlp& r_;
  std::vector<Expr> ineqs_;
  std::vector<Expr> eqs_;
  std::vector<EmittedConstraint> eq_meta_;
  int next_group_ = 0;
};

void require_convex(const BilevelProblem& bp, const char* what) {
  if (!bp.lower_convex_in_y) {
    throw InputError(std::string(what) +
                     " requires a lower level certified convex in y");
  }
}

VarSpace make_space(const BilevelProblem& bp, bool with_z, bool with_u) {
  std::vector<std::pair<std::string, int>> blocks{{"x", bp.n}, {"y", bp.m}};
  if (with_z) blocks.push_back({"z", bp.m});
  if (with_u) blocks.push_back({"u", bp.p});
  return VarSpace::from_nonempty(blocks);
}

void upper_and_lower(const BilevelProblem& bp, Builder& b, bool sign_rows) {
  for (int i = 0; i < bp.q; ++i) {
    b.ineq(bp.G[i], Role::kUpper, "G[" + std::to_string(i) + "]");
  }
  for (int i = 0; i < bp.p; ++i) {
    b.ineq(bp.g[i], Role::kLower, "g[" + std::to_string(i) + "]");
  }
  if (sign_rows) {
    for (int i = 0; i < bp.p; ++i) {
      b.ineq(-Expr::var("u", i), Role::kSign, "u[" + std::to_string(i) + "]>=0");
    }
  }
}

std::vector<Expr> zeros(int m) { return std::vector<Expr>(m, Expr::constant(0.0)); }

// grad_y L(x, y, u) with y renamed to `at` (e.g. "z").
std::vector<Expr> stationarity(const BilevelProblem& bp, const std::string& at) {
  const Expr L = lagrangian(bp);
  std::vector<Expr> rows;
  for (int j = 0; j < bp.m; ++j) {
    Expr d = diff(L, "y", j);
    if (at != "y") d = rename_block(d, "y", at);
    rows.push_back(d);
  }
  return rows;
}

// Closed form of phi for unconstrained lower levels with a constant positive
// definite Hessian in y; empty optional otherwise.
std::optional<Expr> closed_form_phi(const BilevelProblem& bp) {
  if (bp.p != 0) return std::nullopt;
  if (is_affine(bp.f, {"y"})) {
    for (int j = 0; j < bp.m; ++j) {
      if (!simplify(diff(bp.f, "y", j)).is_constant(0.0)) return std::nullopt;
    }
    return substitute(bp.f, "y", zeros(bp.m));
  }
  if (joint_degree(bp.f, {"y"}) != 2) return std::nullopt;
  Eigen::MatrixXd H(bp.m, bp.m);
  std::vector<Expr> lin;
  for (int i = 0; i < bp.m; ++i) {
    const Expr di = diff(bp.f, "y", i);
    lin.push_back(substitute(di, "y", zeros(bp.m)));
    for (int j = 0; j < bp.m; ++j) {
      const Expr h = simplify(diff(di, "y", j));
      if (!h.is_constant()) return std::nullopt;
      H(i, j) = h.value();
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.eigenvalues().minCoeff() <= 1e-8) return std::nullopt;
  const Eigen::MatrixXd Hinv = H.inverse();
  std::vector<Expr> ystar;
  for (int i = 0; i < bp.m; ++i) {
    std::vector<Expr> terms;
    for (int j = 0; j < bp.m; ++j) terms.push_back(-Hinv(i, j) * lin[j]);
    ystar.push_back(Expr::sum(terms));
  }
  return substitute(bp.f, "y", ystar);
}

}  // namespace

ReformulatedNlp build_vf_ref(const BilevelProblem& bp) {
  ReformulatedNlp r;
  r.kind = ReformKind::kVf;
  r.provenance = {{"x", Provenance::kOriginal}, {"y", Provenance::kOriginal}};
  r.scan_order = {"x", "y"};
  Builder b(r);
  upper_and_lower(bp, b, false);
  if (auto phi = closed_form_phi(bp)) {
    b.ineq(bp.f - *phi, Role::kValue, "value");
    r.closed_form = true;
    r.notes.push_back("value function in closed form");
  } else {
    ImplicitConstraint ic;
    ic.name = "value";
    ic.lhs = bp.f;
    ic.arg_blocks = {"x"};
    const BilevelProblem copy = bp;
    ic.fn = [copy](const Eigen::VectorXd& x) {
      return value_function(copy, x).as_double();
    };
    r.implicit_constraints.push_back(std::move(ic));
    r.notes.push_back("value function constraint is callable");
  }
  b.finish(make_space(bp, false, false), bp.F);
  return r;
}

ReformulatedNlp build_kkt_ref(const BilevelProblem& bp, const KktOptions& options) {
  require_convex(bp, "KKT reformulation");
  ReformulatedNlp r;
  r.kind = ReformKind::kKkt;
  r.provenance = {{"x", Provenance::kOriginal},
                  {"y", Provenance::kOriginal},
                  {"u", Provenance::kImplicit}};
  r.scan_order = {"x", "u", "y"};
  Builder b(r);
  upper_and_lower(bp, b, true);
  if (bp.p > 0) {
    if (options.per_component_complementarity) {
      const int group = b.new_group();
      for (int i = 0; i < bp.p; ++i) {
        b.eq(Expr::var("u", i) * bp.g[i], Role::kComplementarity,
             "complementarity[" + std::to_string(i) + "]", group);
      }
    } else {
      std::vector<Expr> terms;
      for (int i = 0; i < bp.p; ++i) terms.push_back(Expr::var("u", i) * bp.g[i]);
      b.eq(Expr::sum(terms), Role::kComplementarity, "complementarity");
    }
  }
  const auto st = stationarity(bp, "y");
  for (int j = 0; j < bp.m; ++j) {
    b.eq(st[j], Role::kStationarity, "stationarity[" + std::to_string(j) + "]");
  }
  b.finish(make_space(bp, false, true), bp.F);
  return r;
}

ReformulatedNlp build_ld_ref(const BilevelProblem& bp) {
  require_convex(bp, "Lagrange dual reformulation");
  ReformulatedNlp r;
  r.kind = ReformKind::kLd;
  r.provenance = {{"x", Provenance::kOriginal},
                  {"y", Provenance::kOriginal},
                  {"u", Provenance::kImplicit}};
  r.scan_order = {"x", "u", "y"};
  Builder b(r);
  upper_and_lower(bp, b, true);
  if (lower_affine_in_y(bp)) {
    const Expr L = lagrangian(bp);
    const Expr l0 = substitute(L, "y", zeros(bp.m));
    r.smooth_value = bp.f - l0;
    const int group = b.new_group();
    b.ineq(r.smooth_value, Role::kValue, "value", group);
    for (int j = 0; j < bp.m; ++j) {
      Expr d = diff(L, "y", j);
      r.domain_equalities.push_back(d);
      b.eq(d, Role::kDomain, "domain[" + std::to_string(j) + "]", group);
    }
    r.closed_form = true;
    r.notes.push_back("Lagrange value function in closed form on its domain");
  } else {
    ImplicitConstraint ic;
    ic.name = "value";
    ic.lhs = bp.f;
    ic.arg_blocks = {"x", "u"};
    const BilevelProblem copy = bp;
    ic.fn = [copy](const Eigen::VectorXd& xu) {
      const Eigen::VectorXd x = xu.head(copy.n);
      const Eigen::VectorXd u = xu.tail(copy.p);
      return lagrange_value_fn(lower_level(copy, x), u).as_double();
    };
    r.implicit_constraints.push_back(std::move(ic));
    r.notes.push_back("Lagrange value function constraint is callable");
  }
  b.finish(make_space(bp, false, true), bp.F);
  return r;
}

namespace {

ReformulatedNlp build_wolfe_type(const BilevelProblem& bp, bool mond_weir) {
  require_convex(bp, mond_weir ? "Mond-Weir dual reformulation"
                               : "Wolfe dual reformulation");
  ReformulatedNlp r;
  r.kind = mond_weir ? ReformKind::kMwd : ReformKind::kWd;
  r.provenance = {{"x", Provenance::kOriginal},
                  {"y", Provenance::kOriginal},
                  {"z", Provenance::kImplicit},
                  {"u", Provenance::kImplicit}};
  Builder b(r);
  upper_and_lower(bp, b, true);
  const Expr fz = rename_block(bp.f, "y", "z");
  std::vector<Expr> gz;
  for (const Expr& e : bp.g) gz.push_back(rename_block(e, "y", "z"));
  if (mond_weir) {
    r.scan_order = {"x", "u", "z", "y"};
    b.ineq(bp.f - fz, Role::kValue, "value");
    if (bp.p > 0) {
      std::vector<Expr> terms;
      for (int i = 0; i < bp.p; ++i) terms.push_back(Expr::var("u", i) * gz[i]);
      b.ineq(-Expr::sum(terms), Role::kDualFeasible, "dual-feasible");
    }
  } else {
    r.scan_order = {"x", "u", "y", "z"};
    if (lower_affine_in_y(bp)) {
      const Expr l0 = substitute(lagrangian(bp), "y", zeros(bp.m));
      b.ineq(bp.f - l0, Role::kValue, "value");
      r.notes.push_back("value row does not depend on the variable z");
    } else {
      std::vector<Expr> terms{fz};
      for (int i = 0; i < bp.p; ++i) terms.push_back(Expr::var("u", i) * gz[i]);
      b.ineq(bp.f - Expr::sum(terms), Role::kValue, "value");
    }
  }
  const auto st = stationarity(bp, "z");
  for (int j = 0; j < bp.m; ++j) {
    b.eq(st[j], Role::kStationarity, "stationarity[" + std::to_string(j) + "]");
  }
  b.finish(make_space(bp, true, true), bp.F);
  return r;
}

}  // namespace

ReformulatedNlp build_wd_ref(const BilevelProblem& bp) {
  return build_wolfe_type(bp, false);
}

ReformulatedNlp build_mwd_ref(const BilevelProblem& bp) {
  return build_wolfe_type(bp, true);
}

ReformulatedNlp build_reformulation(const BilevelProblem& bp, ReformKind kind) {
  switch (kind) {
    case ReformKind::kVf:
      return build_vf_ref(bp);
    case ReformKind::kKkt:
      return build_kkt_ref(bp);
    case ReformKind::kLd:
      return build_ld_ref(bp);
    case ReformKind::kWd:
      return build_wd_ref(bp);
    case ReformKind::kMwd:
      return build_mwd_ref(bp);
    case ReformKind::kGe:
      break;
  }
  throw InputError(
      "the generalized equation reformulation is a feasibility test only; "
      "no single-level program is emitted");
}

GeFeasibility ge_ref_feasibility(const BilevelProblem& bp, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y, double tol,
                                 double tol_act) {
  if (x.size() != bp.n || y.size() != bp.m) {
    throw InputError("ge_ref_feasibility: point has wrong dimension");
  }
  const Point px(bp.x_space(), x);
  for (const Expr& G : bp.G) {
    if (eval(G, px) > tol) throw InputError("x violates the upper-level constraints");
  }
  Eigen::VectorXd xy(bp.n + bp.m);
  xy << x, y;
  const Point pt(bp.xy_space(), xy);
  GeFeasibility out;
  for (int i = 0; i < bp.p; ++i) {
    const double gi = eval(bp.g[i], pt);
    if (gi > tol) throw InputError("y is infeasible for the lower-level problem");
    if (gi >= -tol_act) out.active.push_back(i);
  }
  const int k = static_cast<int>(out.active.size());
  const int m = bp.m;
  const Eigen::VectorXd a = grad(bp.f, "y", pt);
  LinearProgram lp(k + 2 * m);
  lp.lower.setZero();
  for (int j = 0; j < m; ++j) {
    lp.c[k + j] = 1.0;
    lp.c[k + m + j] = 1.0;
  }
  Eigen::MatrixXd B(m, k);
  for (int c = 0; c < k; ++c) B.col(c) = grad(bp.g[out.active[c]], "y", pt);
  for (int j = 0; j < m; ++j) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(k + 2 * m);
    row.head(k) = B.row(j);
    row[k + j] = -1.0;
    row[k + m + j] = 1.0;
    lp.add_eq(row, -a[j]);
  }
  const LpResult res = solve_lp(lp);
  out.u = Eigen::VectorXd::Zero(bp.p);
  if (res.status != LpStatus::kOptimal) {
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }
  for (int c = 0; c < k; ++c) out.u[out.active[c]] = res.x[c];
  out.residual = (a + B * res.x.head(k)).cwiseAbs().maxCoeff();
  if (m == 0) out.residual = 0.0;
  out.feasible = out.residual <= tol;
  return out;
}

CountSummary count_summary(int n, int m, int p, int q, ReformKind kind) {
  CountSummary c;
  c.kind = kind;
  switch (kind) {
    case ReformKind::kVf:
      c = {kind, n + m, 0, p + q + 1};
      break;
    case ReformKind::kKkt:
      c = {kind, n + m + p, p, m + 2 * p + q + (p > 0 ? 1 : 0)};
      break;
    case ReformKind::kGe:
      c = {kind, n + m, 0, m + q};
      break;
    case ReformKind::kLd:
      c = {kind, n + m + p, p, 2 * p + q + 1};
      break;
    case ReformKind::kWd:
      c = {kind, n + 2 * m + p, m + p, m + 2 * p + q + 1};
      break;
    case ReformKind::kMwd:
      c = {kind, n + 2 * m + p, m + p, m + 2 * p + q + (p > 0 ? 2 : 1)};
      break;
  }
  return c;
}

CountSummary count_summary(const BilevelProblem& bp, ReformKind kind) {
  return count_summary(bp.n, bp.m, bp.p, bp.q, kind);
}

}  // namespace bilevel
