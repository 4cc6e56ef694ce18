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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "bilevel/errors.hpp"
#include "bilevel/lp.hpp"
#include "bilevel/model.hpp"

namespace bilevel {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rows a_i^T w + c_i of affine expressions.
void affine_rows(const std::vector<Expr>& exprs, const VarSpace& space,
                 Eigen::MatrixXd& A, Eigen::VectorXd& c) {
  const int n = space.total_dim();
  const Point zero = Point::zeros(space);
  A.resize(static_cast<Eigen::Index>(exprs.size()), n);
  c.resize(static_cast<Eigen::Index>(exprs.size()));
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    A.row(i) = flat_gradient(exprs[i], zero).transpose();
    c[i] = eval(exprs[i], zero);
  }
}

// l1-closest multipliers: lambda >= 0 on the rows of Ai, mu free on the rows
// of E, minimizing |g + Ai^T lambda + E^T mu|_1.
void fit_multipliers(const Eigen::VectorXd& g, const Eigen::MatrixXd& Ai,
                     const Eigen::MatrixXd& E, Eigen::VectorXd& lambda,
                     Eigen::VectorXd& mu) {
  const int n = static_cast<int>(g.size());
  const int ki = static_cast<int>(Ai.rows());
  const int ke = static_cast<int>(E.rows());
  const int nv = ki + ke + 2 * n;
  LinearProgram lp(nv);
  for (int j = 0; j < ki; ++j) lp.lower[j] = 0.0;
  for (int j = ki + ke; j < nv; ++j) {
    lp.lower[j] = 0.0;
    lp.c[j] = 1.0;
  }
  for (int r = 0; r < n; ++r) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
    for (int j = 0; j < ki; ++j) row[j] = Ai(j, r);
    for (int j = 0; j < ke; ++j) row[ki + j] = E(j, r);
    row[ki + ke + r] = 1.0;
    row[ki + ke + n + r] = -1.0;
    lp.add_eq(row, -g[r]);
  }
  LpResult res = solve_lp(lp);
  lambda = Eigen::VectorXd::Zero(ki);
  mu = Eigen::VectorXd::Zero(ke);
  if (res.status != LpStatus::kOptimal) return;
  lambda = res.x.head(ki).cwiseMax(0.0);
  mu = res.x.segment(ki, ke);
  // Polish the free part by least squares on the support.
  std::vector<int> support;
  for (int j = 0; j < ki; ++j) {
    if (lambda[j] > 1e-12) support.push_back(j);
  }
  const int ks = static_cast<int>(support.size());
  Eigen::MatrixXd M(n, ks + ke);
  for (int j = 0; j < ks; ++j) M.col(j) = Ai.row(support[j]).transpose();
  for (int j = 0; j < ke; ++j) M.col(ks + j) = E.row(j).transpose();
  if (M.cols() == 0) return;
  Eigen::VectorXd sol = M.colPivHouseholderQr().solve(-g);
  Eigen::VectorXd cur(ks + ke);
  for (int j = 0; j < ks; ++j) cur[j] = lambda[support[j]];
  cur.tail(ke) = mu;
  if ((M * sol + g).cwiseAbs().maxCoeff() < (M * cur + g).cwiseAbs().maxCoeff() &&
      (ks == 0 || sol.head(ks).minCoeff() >= 0.0)) {
    for (int j = 0; j < ks; ++j) lambda[support[j]] = sol[j];
    mu = sol.tail(ke);
  }
}

struct QpData {
  Eigen::MatrixXd H;
  Eigen::VectorXd c;
  double k = 0.0;
  Eigen::MatrixXd A;  // A w <= b
  Eigen::VectorXd b;
  Eigen::MatrixXd E;  // E w = e
  Eigen::VectorXd e;
};

// Returns an unbounded ray or an empty vector.
Eigen::VectorXd qp_unbounded_ray(const QpData& qp) {
  const int n = static_cast<int>(qp.c.size());
  LinearProgram lp(n);
  lp.c = qp.c;
  lp.lower.setConstant(-1.0);
  lp.upper.setConstant(1.0);
  for (Eigen::Index i = 0; i < qp.A.rows(); ++i) lp.add_le(qp.A.row(i), 0.0);
  for (Eigen::Index i = 0; i < qp.E.rows(); ++i) lp.add_eq(qp.E.row(i), 0.0);
  for (Eigen::Index i = 0; i < qp.H.rows(); ++i) {
    if (qp.H.row(i).cwiseAbs().maxCoeff() > 0.0) lp.add_eq(qp.H.row(i), 0.0);
  }
  LpResult res = solve_lp(lp);
  if (res.status == LpStatus::kOptimal && res.value < -1e-9) return res.x;
  return {};
}

SolveReport solve_qp(const QpData& qp, const Eigen::VectorXd& start,
                     int max_iter) {
  const int n = static_cast<int>(qp.c.size());
  const int mi = static_cast<int>(qp.A.rows());
  SolveReport rep;

  // Feasible starting point.
  Eigen::VectorXd w = start;
  auto feasible = [&](const Eigen::VectorXd& v) {
    if (mi > 0 && (qp.A * v - qp.b).maxCoeff() > 1e-12) return false;
    if (qp.E.rows() > 0 && (qp.E * v - qp.e).cwiseAbs().maxCoeff() > 1e-12) {
      return false;
    }
    return true;
  };
  if (!feasible(w)) {
    LinearProgram lp(n);
    for (int i = 0; i < mi; ++i) lp.add_le(qp.A.row(i), qp.b[i]);
    for (Eigen::Index i = 0; i < qp.E.rows(); ++i) lp.add_eq(qp.E.row(i), qp.e[i]);
    LpResult res = solve_lp(lp);
    if (res.status == LpStatus::kInfeasible) {
      rep.status = SolveStatus::kInfeasible;
      return rep;
    }
    w = res.x;
  }

  Eigen::VectorXd ray = qp_unbounded_ray(qp);
  if (ray.size() > 0) {
    rep.status = SolveStatus::kUnbounded;
    rep.point = w;
    rep.ray = ray;
    rep.value = -kInf;
    return rep;
  }

  if (qp.H.cwiseAbs().maxCoeff() == 0.0) {
    LinearProgram lp(n);
    lp.c = qp.c;
    for (int i = 0; i < mi; ++i) lp.add_le(qp.A.row(i), qp.b[i]);
    for (Eigen::Index i = 0; i < qp.E.rows(); ++i) lp.add_eq(qp.E.row(i), qp.e[i]);
    LpResult res = solve_lp(lp);
    rep.iterations = res.pivots;
    if (res.status == LpStatus::kUnbounded) {
      rep.status = SolveStatus::kUnbounded;
      rep.point = res.x;
      rep.ray = res.ray;
      rep.value = -kInf;
      return rep;
    }
    rep.status = SolveStatus::kOptimal;
    rep.point = res.x;
    return rep;
  }

  std::vector<int> working;
  rep.status = SolveStatus::kToleranceReached;
  for (int iter = 0; iter < max_iter; ++iter) {
    rep.iterations = iter + 1;
    const Eigen::VectorXd g = qp.H * w + qp.c;
    Eigen::MatrixXd C(qp.E.rows() + static_cast<Eigen::Index>(working.size()), n);
    C.topRows(qp.E.rows()) = qp.E;
    for (std::size_t j = 0; j < working.size(); ++j) {
      C.row(qp.E.rows() + static_cast<Eigen::Index>(j)) = qp.A.row(working[j]);
    }
    const Eigen::MatrixXd Z = null_space(C, 1e-10);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    double alpha_max = 1.0;
    if (Z.cols() > 0) {
      const Eigen::MatrixXd Hr = Z.transpose() * qp.H * Z;
      const Eigen::VectorXd gr = Z.transpose() * g;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Hr + Hr.transpose()));
      const Eigen::VectorXd& ev = es.eigenvalues();
      const Eigen::MatrixXd& V = es.eigenvectors();
      const double top = std::max(1.0, ev.cwiseAbs().maxCoeff());
      Eigen::VectorXd coef = V.transpose() * gr;
      Eigen::VectorXd null_part = Eigen::VectorXd::Zero(ev.size());
      Eigen::VectorXd step = Eigen::VectorXd::Zero(ev.size());
      for (Eigen::Index k = 0; k < ev.size(); ++k) {
        if (ev[k] > 1e-10 * top) {
          step[k] = -coef[k] / ev[k];
        } else {
          null_part[k] = -coef[k];
        }
      }
      if (null_part.cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.cwiseAbs().maxCoeff())) {
        p = Z * (V * null_part);
        alpha_max = kInf;
      } else {
        p = Z * (V * step);
      }
    }
    if (p.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + w.cwiseAbs().maxCoeff())) {
      if (working.empty()) {
        rep.status = SolveStatus::kOptimal;
        break;
      }
      Eigen::VectorXd mult = C.transpose().colPivHouseholderQr().solve(-g);
      int drop = -1;
      double most = -1e-10;
      for (std::size_t j = 0; j < working.size(); ++j) {
        const double lam = mult[qp.E.rows() + static_cast<Eigen::Index>(j)];
        if (lam < most) {
          most = lam;
          drop = static_cast<int>(j);
        }
      }
      if (drop < 0) {
        rep.status = SolveStatus::kOptimal;
        break;
      }
      working.erase(working.begin() + drop);
      continue;
    }
    int block = -1;
    double alpha = alpha_max;
    for (int i = 0; i < mi; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) continue;
      const double ap = qp.A.row(i).dot(p);
      if (ap <= 1e-13) continue;
      const double ai = std::max(0.0, qp.b[i] - qp.A.row(i).dot(w)) / ap;
      if (ai < alpha) {
        alpha = ai;
        block = i;
      }
    }
    if (!std::isfinite(alpha)) {
      rep.status = SolveStatus::kUnbounded;
      rep.point = w;
      rep.ray = p / p.cwiseAbs().maxCoeff();
      rep.value = -kInf;
      return rep;
    }
    w += alpha * p;
    if (block >= 0) working.push_back(block);
  }
  rep.point = w;
  return rep;
}

// Smooth function of the flat decision vector with compiled derivatives.
class SmoothFn {
 public:
  SmoothFn(const Expr& e, const VarSpace& space) : f_(e, space) {
    std::vector<std::pair<std::string, int>> vars;
    for (const auto& b : space.blocks()) {
      for (int i = 0; i < b.dim; ++i) vars.push_back({b.name, i});
    }
    const std::size_t n = vars.size();
    h_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      Expr di = diff(e, vars[i].first, vars[i].second);
      g_.emplace_back(di, space);
      for (std::size_t j = 0; j < n; ++j) {
        h_[i].emplace_back(diff(di, vars[j].first, vars[j].second), space);
      }
    }
  }

  double value(const Eigen::VectorXd& w) const { return f_(w); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& w) const {
    Eigen::VectorXd g(g_.size());
    for (std::size_t i = 0; i < g_.size(); ++i) g[i] = g_[i](w);
    return g;
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& w) const {
    const auto n = static_cast<Eigen::Index>(g_.size());
    Eigen::MatrixXd H(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) H(i, j) = h_[i][j](w);
    }
    return H;
  }

 private:
  CompiledExpr f_;
  std::vector<CompiledExpr> g_;
  std::vector<std::vector<CompiledExpr>> h_;
};

// Smooth function of the reduced variable z through an affine map.
struct Reduced {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
};

struct BarrierOutcome {
  enum class Kind { kConverged, kUnbounded, kIterLimit, kStopped } kind;
  Eigen::VectorXd z;
  double t = 1.0;
  int iterations = 0;
};

// Minimizes obj over {c_i(z) < 0} by the log-barrier method. `stop` is
// consulted after every centering step.
BarrierOutcome barrier_minimize(const Reduced& obj, const std::vector<Reduced>& cons,
                                Eigen::VectorXd z, double tol, int max_iter,
                                const std::function<bool(const Eigen::VectorXd&)>& stop) {
  BarrierOutcome out;
  const int d = static_cast<int>(z.size());
  const double nc = static_cast<double>(cons.size());
  double t = 1.0;
  int iters = 0;
  auto phi = [&](const Eigen::VectorXd& v, bool& ok) {
    double s = t * obj.value(v);
    ok = true;
    for (const auto& c : cons) {
      const double cv = c.value(v);
      if (!(cv < 0.0)) {
        ok = false;
        return kInf;
      }
      s -= std::log(-cv);
    }
    return s;
  };
  while (true) {
    for (int inner = 0; inner < 200; ++inner) {
      if (++iters > max_iter) {
        out.kind = BarrierOutcome::Kind::kIterLimit;
        out.z = z;
        out.t = t;
        out.iterations = iters;
        return out;
      }
      Eigen::VectorXd G = t * obj.gradient(z);
      Eigen::MatrixXd H = t * obj.hessian(z);
      for (const auto& c : cons) {
        const double cv = c.value(z);
        const Eigen::VectorXd cg = c.gradient(z);
        G += cg / (-cv);
        H += c.hessian(z) / (-cv) + cg * cg.transpose() / (cv * cv);
      }
      if (d == 0) break;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      Eigen::VectorXd dz;
      if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
          ldlt.vectorD().minCoeff() > 1e-14 * std::max(1.0, H.cwiseAbs().maxCoeff())) {
        dz = -ldlt.solve(G);
      } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        Eigen::VectorXd coef = es.eigenvectors().transpose() * G;
        Eigen::VectorXd step(d);
        for (int k = 0; k < d; ++k) {
          const double lam = es.eigenvalues()[k];
          step[k] = lam > 1e-12 * top ? -coef[k] / lam : -coef[k];
        }
        dz = es.eigenvectors() * step;
      }
      const double dec = -G.dot(dz);
      if (dec <= 1e-14 * std::max(1.0, t)) break;
      bool ok = false;
      const double cur = phi(z, ok);
      double alpha = 1.0;
      Eigen::VectorXd next;
      while (alpha > 1e-16) {
        next = z + alpha * dz;
        bool ok2 = false;
        const double val = phi(next, ok2);
        if (ok2 && val <= cur - 0.25 * alpha * dec) break;
        alpha *= 0.5;
      }
      if (alpha <= 1e-16) break;
      z = next;
      if (z.cwiseAbs().maxCoeff() > 1e9 || obj.value(z) < -1e15) {
        out.kind = BarrierOutcome::Kind::kUnbounded;
        out.z = z;
        out.t = t;
        out.iterations = iters;
        return out;
      }
    }
    if (stop && stop(z)) {
      out.kind = BarrierOutcome::Kind::kStopped;
      break;
    }
    if (cons.empty() || nc / t <= tol * 1e-2 || t >= 1e15) {
      out.kind = BarrierOutcome::Kind::kConverged;
      break;
    }
    t *= 10.0;
  }
  out.z = z;
  out.t = t;
  out.iterations = iters;
  return out;
}

SolveReport solve_general(const Nlp& nlp, const Expr& obj_min,
                          const Eigen::VectorXd& start, double tol, int max_iter) {
  SolveReport rep;
  const int n = nlp.space.total_dim();
  Eigen::MatrixXd E;
  Eigen::VectorXd ec;
  affine_rows(nlp.equalities, nlp.space, E, ec);
  const Eigen::VectorXd e = -ec;

  Eigen::VectorXd wp = start;
  Eigen::MatrixXd N = Eigen::MatrixXd::Identity(n, n);
  if (E.rows() > 0) {
    wp = start - E.colPivHouseholderQr().solve(E * start - e);
    if ((E * wp - e).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + e.cwiseAbs().maxCoeff())) {
      rep.status = SolveStatus::kInfeasible;
      return rep;
    }
    N = null_space(E, 1e-10);
  }
  const int d = static_cast<int>(N.cols());

  const SmoothFn fobj(obj_min, nlp.space);
  std::vector<SmoothFn> fcons;
  for (const Expr& q : nlp.inequalities) fcons.emplace_back(q, nlp.space);

  auto reduce = [&](const SmoothFn& fn) {
    Reduced r;
    r.value = [&fn, &wp, &N](const Eigen::VectorXd& z) { return fn.value(wp + N * z); };
    r.gradient = [&fn, &wp, &N](const Eigen::VectorXd& z) {
      return Eigen::VectorXd(N.transpose() * fn.gradient(wp + N * z));
    };
    r.hessian = [&fn, &wp, &N](const Eigen::VectorXd& z) {
      return Eigen::MatrixXd(N.transpose() * fn.hessian(wp + N * z) * N);
    };
    return r;
  };
  const Reduced robj = reduce(fobj);
  std::vector<Reduced> rcons;
  for (const auto& fc : fcons) rcons.push_back(reduce(fc));

  Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
  double worst = -kInf;
  for (const auto& c : rcons) worst = std::max(worst, c.value(z));
  int used = 0;
  if (!rcons.empty() && worst >= -1e-12) {
    // Phase one over (z, s): min s s.t. c_i(z) - s < 0, -1 - s < 0.
    Reduced sobj;
    sobj.value = [d](const Eigen::VectorXd& v) { return v[d]; };
    sobj.gradient = [d](const Eigen::VectorXd&) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1);
      g[d] = 1.0;
      return g;
    };
    sobj.hessian = [d](const Eigen::VectorXd&) {
      return Eigen::MatrixXd(Eigen::MatrixXd::Zero(d + 1, d + 1));
    };
    std::vector<Reduced> scons;
    for (const auto& c : rcons) {
      Reduced r;
      r.value = [&c, d](const Eigen::VectorXd& v) { return c.value(v.head(d)) - v[d]; };
      r.gradient = [&c, d](const Eigen::VectorXd& v) {
        Eigen::VectorXd g(d + 1);
        g.head(d) = c.gradient(v.head(d));
        g[d] = -1.0;
        return g;
      };
      r.hessian = [&c, d](const Eigen::VectorXd& v) {
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d + 1, d + 1);
        H.topLeftCorner(d, d) = c.hessian(v.head(d));
        return H;
      };
      scons.push_back(r);
    }
    Reduced floor_con;
    floor_con.value = [d](const Eigen::VectorXd& v) { return -1.0 - v[d]; };
    floor_con.gradient = [d](const Eigen::VectorXd&) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1);
      g[d] = -1.0;
      return g;
    };
    floor_con.hessian = sobj.hessian;
    scons.push_back(floor_con);
    Eigen::VectorXd v0(d + 1);
    v0.head(d) = z;
    v0[d] = worst + 1.0;
    BarrierOutcome ph1 = barrier_minimize(
        sobj, scons, v0, tol, max_iter,
        [d](const Eigen::VectorXd& v) { return v[d] < -1e-9; });
    used = ph1.iterations;
    if (ph1.z[d] >= -1e-9) {
      if (ph1.z[d] > tol) {
        rep.status = SolveStatus::kInfeasible;
        rep.iterations = used;
        return rep;
      }
      throw CapabilityError("convex solver: feasible set has no strictly feasible point");
    }
    z = ph1.z.head(d);
  }

  BarrierOutcome res = barrier_minimize(robj, rcons, z, tol, max_iter - used, {});
  rep.iterations = used + res.iterations;
  const Eigen::VectorXd w = wp + N * res.z;
  rep.point = w;
  if (res.kind == BarrierOutcome::Kind::kUnbounded) {
    rep.status = SolveStatus::kUnbounded;
    rep.ray = N * res.z;
    rep.ray /= std::max(1e-300, rep.ray.cwiseAbs().maxCoeff());
    rep.value = -kInf;
    return rep;
  }
  Eigen::VectorXd lam(fcons.size());
  Eigen::VectorXd g = fobj.gradient(w);
  for (std::size_t i = 0; i < fcons.size(); ++i) {
    lam[i] = 1.0 / (res.t * -fcons[i].value(w));
    g += lam[i] * fcons[i].gradient(w);
  }
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(E.rows());
  if (E.rows() > 0) mu = E.transpose().colPivHouseholderQr().solve(-g);
  rep.multipliers.resize(lam.size() + mu.size());
  rep.multipliers << lam, mu;
  rep.status = res.kind == BarrierOutcome::Kind::kIterLimit
                   ? SolveStatus::kToleranceReached
                   : SolveStatus::kOptimal;
  return rep;
}

}  // namespace

SolveReport solve_convex(const Nlp& nlp, const Eigen::VectorXd& start,
                         double tol, int max_iter) {
  if (nlp.convexity != Convexity::kConvex) {
    throw InputError("solve_convex requires a convexity-certified program");
  }
  const int n = nlp.space.total_dim();
  if (start.size() != n) throw InputError("solve_convex: start has wrong dimension");
  const Expr obj_min =
      nlp.sense == Sense::kMinimize ? nlp.objective : -nlp.objective;
  const auto names = nlp.block_names();

  bool affine = true;
  for (const Expr& q : nlp.inequalities) affine = affine && is_affine(q, names);
  const bool quadratic = joint_degree(obj_min, names) <= 2;

  SolveReport rep;
  if (affine && quadratic) {
    QpData qp;
    const Point zero = Point::zeros(nlp.space);
    qp.H = flat_hessian(obj_min, zero);
    qp.c = flat_gradient(obj_min, zero);
    qp.k = eval(obj_min, zero);
    Eigen::VectorXd ca, ce;
    affine_rows(nlp.inequalities, nlp.space, qp.A, ca);
    qp.b = -ca;
    affine_rows(nlp.equalities, nlp.space, qp.E, ce);
    qp.e = -ce;
    rep = solve_qp(qp, start, max_iter);
    if (rep.status == SolveStatus::kOptimal ||
        rep.status == SolveStatus::kToleranceReached) {
      const Eigen::VectorXd& w = rep.point;
      std::vector<int> act;
      for (Eigen::Index i = 0; i < qp.A.rows(); ++i) {
        if (qp.A.row(i).dot(w) - qp.b[i] >= -1e-9 * (1.0 + std::abs(qp.b[i]))) {
          act.push_back(static_cast<int>(i));
        }
      }
      Eigen::MatrixXd Ai(static_cast<Eigen::Index>(act.size()), n);
      for (std::size_t j = 0; j < act.size(); ++j) Ai.row(j) = qp.A.row(act[j]);
      Eigen::VectorXd lam_a, mu;
      fit_multipliers(qp.H * w + qp.c, Ai, qp.E, lam_a, mu);
      Eigen::VectorXd lam = Eigen::VectorXd::Zero(qp.A.rows());
      for (std::size_t j = 0; j < act.size(); ++j) lam[act[j]] = lam_a[j];
      rep.multipliers.resize(lam.size() + mu.size());
      rep.multipliers << lam, mu;
    }
  } else {
    rep = solve_general(nlp, obj_min, start, tol, max_iter);
  }
  if (rep.status == SolveStatus::kOptimal ||
      rep.status == SolveStatus::kToleranceReached) {
    rep.value = objective_value(nlp, rep.point);
    rep.kkt_residual = kkt_residual(nlp, rep.point, rep.multipliers);
    if (rep.kkt_residual > tol) rep.status = SolveStatus::kToleranceReached;
  }
  return rep;
}

}  // namespace bilevel
