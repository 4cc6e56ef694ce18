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

#include "bilevel/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "bilevel/duality.hpp"
#include "bilevel/errors.hpp"

namespace bilevel {

Box Box::uniform(const Point& center, double radius, double step) {
  if (!(radius > 0.0) || !(step > 0.0)) {
    throw InputError("box radius and step must be positive");
  }
  const int d = center.space.total_dim();
  return Box{center, Eigen::VectorXd::Constant(d, radius),
             Eigen::VectorXd::Constant(d, step)};
}

namespace {

long half_width(double radius, double step) {
  return static_cast<long>(std::floor(radius / step + 1e-9));
}

}  // namespace

std::uint64_t Box::grid_size() const {
  const double cap = static_cast<double>(std::numeric_limits<std::uint64_t>::max());
  double total = 1.0;
  for (int k = 0; k < radius.size(); ++k) {
    total *= static_cast<double>(2 * half_width(radius[k], step[k]) + 1);
    if (total >= cap) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(total);
}

GridProblem GridProblem::from(const Nlp& nlp) {
  GridProblem g;
  g.space = nlp.space;
  g.objective = nlp.objective;
  g.sense = nlp.sense;
  g.inequalities = nlp.inequalities;
  g.equalities = nlp.equalities;
  for (const auto& b : nlp.space.blocks()) g.scan_order.push_back(b.name);
  return g;
}

GridProblem GridProblem::from(const ReformulatedNlp& r) {
  GridProblem g = from(r.nlp);
  g.implicit = r.implicit_constraints;
  g.scan_order.clear();
  for (const auto& b : r.scan_order) {
    if (r.nlp.space.has(b)) g.scan_order.push_back(b);
  }
  return g;
}

double GridProblem::violation(const Eigen::VectorXd& w) const {
  const Point pt(space, w);
  double v = 0.0;
  for (const Expr& e : inequalities) v = std::max(v, eval(e, pt));
  for (const Expr& e : equalities) v = std::max(v, std::abs(eval(e, pt)));
  for (const auto& ic : implicit) v = std::max(v, ic.evaluate(pt));
  return v;
}

namespace {

int var_degree(const Expr& e, const std::string& block, int index) {
  switch (e.kind()) {
    case Expr::Kind::kConstant:
      return 0;
    case Expr::Kind::kVar:
      return e.block() == block && e.index() == index ? 1 : 0;
    case Expr::Kind::kAdd: {
      int d = 0;
      for (const Expr& c : e.children()) d = std::max(d, var_degree(c, block, index));
      return d;
    }
    case Expr::Kind::kMul: {
      int d = 0;
      for (const Expr& c : e.children()) d += var_degree(c, block, index);
      return d;
    }
    case Expr::Kind::kPow:
      return e.exponent() * var_degree(e.children()[0], block, index);
    case Expr::Kind::kNeg:
      return var_degree(e.children()[0], block, index);
  }
  return 0;
}

struct ScanConstraint {
  CompiledExpr expr;  // the constraint, or the lhs of an implicit one
  bool equality = false;
  bool affine = false;
  int implicit = -1;
  std::vector<int> arg_indices;
};

struct Level {
  int var = 0;
  bool pinned = false;
  double center = 0.0;
  double step = 1.0;
  long half = 0;
  std::vector<int> constraints;
};

struct Best {
  bool found = false;
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> point;

  void offer(double v, const std::vector<double>& pt) {
    if (!found || v < value ||
        (v == value && std::lexicographical_compare(pt.begin(), pt.end(),
                                                    point.begin(), point.end()))) {
      found = true;
      value = v;
      point = pt;
    }
  }
};

class Scanner {
 public:
  Scanner(const GridProblem& prob, const Box& box, const ScanOptions& opt)
      : prob_(prob), opt_(opt) {
    const VarSpace& space = prob.space;
    const int d = space.total_dim();
    if (box.center.space != space || box.radius.size() != d || box.step.size() != d) {
      throw InputError("box does not match the problem space");
    }
    for (int k = 0; k < d; ++k) {
      if (!(box.radius[k] > 0.0) || !(box.step[k] > 0.0)) {
        throw InputError("box radius and step must be positive");
      }
    }
    std::vector<int> perm;
    std::vector<std::string> order = prob.scan_order;
    for (const auto& b : space.blocks()) {
      if (std::find(order.begin(), order.end(), b.name) == order.end()) {
        order.push_back(b.name);
      }
    }
    for (const auto& name : order) {
      if (!space.has(name)) continue;
      const auto& b = space.block(name);
      for (int i = 0; i < b.dim; ++i) {
        perm.push_back(b.offset + i);
        names_.push_back({b.name, i});
      }
    }
    std::vector<int> pos(d);
    for (int k = 0; k < d; ++k) pos[perm[k]] = k;

    std::vector<bool> used(d, false);
    auto mark = [&](const std::vector<int>& idx) {
      for (int i : idx) used[i] = true;
    };
    objective_ = CompiledExpr(prob.objective, space);
    mark(objective_.indices());

    levels_.resize(d);
    for (int k = 0; k < d; ++k) {
      levels_[k].var = perm[k];
      levels_[k].center = box.center.values[perm[k]];
      levels_[k].step = box.step[perm[k]];
      levels_[k].half = half_width(box.radius[perm[k]], box.step[perm[k]]);
    }
    auto add = [&](ScanConstraint sc, const Expr& e, std::vector<int> idx) {
      mark(idx);
      int level = -1;
      for (int i : idx) level = std::max(level, pos[i]);
      if (level >= 0) {
        const auto& nm = names_[level];
        const bool in_args = std::find(sc.arg_indices.begin(), sc.arg_indices.end(),
                                       perm[level]) != sc.arg_indices.end();
        sc.affine = !in_args && var_degree(e, nm.first, nm.second) <= 1;
        levels_[level].constraints.push_back(static_cast<int>(cons_.size()));
      } else {
        constant_.push_back(static_cast<int>(cons_.size()));
      }
      cons_.push_back(std::move(sc));
    };
    for (const Expr& e : prob.inequalities) {
      ScanConstraint sc{CompiledExpr(e, space), false, false, -1, {}};
      add(std::move(sc), e, CompiledExpr(e, space).indices());
    }
    for (const Expr& e : prob.equalities) {
      ScanConstraint sc{CompiledExpr(e, space), true, false, -1, {}};
      add(std::move(sc), e, CompiledExpr(e, space).indices());
    }
    for (int j = 0; j < static_cast<int>(prob.implicit.size()); ++j) {
      const auto& ic = prob.implicit[j];
      ScanConstraint sc{CompiledExpr(ic.lhs, space), false, false, j, {}};
      for (const auto& b : ic.arg_blocks) {
        for (int i = 0; i < space.dim(b); ++i) sc.arg_indices.push_back(space.offset(b) + i);
      }
      std::vector<int> idx = sc.expr.indices();
      idx.insert(idx.end(), sc.arg_indices.begin(), sc.arg_indices.end());
      add(std::move(sc), ic.lhs, idx);
    }
    for (int k = 0; k < d; ++k) levels_[k].pinned = !used[perm[k]];
  }

  SolveReport run() {
    SolveReport rep;
    const int d = static_cast<int>(levels_.size());
    State root(*this);
    for (int c : constant_) {
      if (!root.check(c)) {
        rep.status = SolveStatus::kInfeasible;
        return rep;
      }
    }
    Best best;
    if (d == 0) {
      root.leaf(best);
    } else {
      std::vector<long> top = root.candidates(0);
      const int workers = std::max(1, std::min<int>(opt_.workers, static_cast<int>(top.size())));
      if (workers <= 1) {
        for (long j : top) root.visit(0, j, best);
      } else {
        std::vector<Best> bests(workers);
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) {
          threads.emplace_back([&, w] {
            try {
              State st(*this);
              for (std::size_t t = w; t < top.size(); t += workers) {
                st.visit(0, top[t], bests[w]);
              }
            } catch (...) {
              errors[w] = std::current_exception();
            }
          });
        }
        for (auto& t : threads) t.join();
        for (auto& e : errors) {
          if (e) std::rethrow_exception(e);
        }
        for (auto& b : bests) {
          if (b.found) best.offer(b.value, b.point);
        }
      }
    }
    rep.iterations = static_cast<int>(std::min<std::uint64_t>(nodes_.load(), 2147483647u));
    if (!best.found) {
      rep.status = SolveStatus::kInfeasible;
      return rep;
    }
    rep.status = SolveStatus::kOptimal;
    rep.point = Eigen::Map<const Eigen::VectorXd>(best.point.data(), d);
    rep.value = prob_.sense == Sense::kMinimize ? best.value : -best.value;
    return rep;
  }

 private:
  class State {
   public:
    explicit State(Scanner& s)
        : s_(s), v_(s.levels_.size(), 0.0), cache_(s.prob_.implicit.size()) {
      for (const auto& lv : s.levels_) v_[lv.var] = lv.center;
    }

    // Value of constraint c at the current v (implicit: lhs - rhs); +inf when
    // the implicit right-hand side is not finite.
    double value(int c) {
      const ScanConstraint& sc = s_.cons_[c];
      const double lhs = sc.expr(std::span<const double>(v_));
      if (sc.implicit < 0) return lhs;
      return lhs - rhs(c);
    }

    bool check(int c) {
      const double val = value(c);
      if (!std::isfinite(val)) return false;
      return s_.cons_[c].equality ? std::abs(val) <= s_.opt_.tol : val <= s_.opt_.tol;
    }

    std::vector<long> candidates(int level) {
      const Level& lv = s_.levels_[level];
      long lo = -lv.half, hi = lv.half;
      if (lv.pinned) lo = hi = 0;
      const double tol = s_.opt_.tol;
      for (int c : lv.constraints) {
        const ScanConstraint& sc = s_.cons_[c];
        if (!sc.affine) continue;
        const double saved = v_[lv.var];
        v_[lv.var] = 0.0;
        const double b = value(c);
        v_[lv.var] = 1.0;
        const double a = value(c) - b;
        v_[lv.var] = saved;
        if (!std::isfinite(b) || !std::isfinite(a)) return {};
        double tlo = -std::numeric_limits<double>::infinity();
        double thi = std::numeric_limits<double>::infinity();
        if (std::abs(a) <= 1e-14) {
          if (sc.equality ? std::abs(b) > tol : b > tol) return {};
          continue;
        }
        if (sc.equality) {
          tlo = (-tol - b) / a;
          thi = (tol - b) / a;
          if (tlo > thi) std::swap(tlo, thi);
        } else if (a > 0) {
          thi = (tol - b) / a;
        } else {
          tlo = (tol - b) / a;
        }
        if (std::isfinite(thi)) {
          const double j = std::floor((thi - lv.center) / lv.step) + 1.0;
          if (j < static_cast<double>(lo)) return {};
          hi = std::min<long>(hi, static_cast<long>(std::min(j, 1e15)));
        }
        if (std::isfinite(tlo)) {
          const double j = std::ceil((tlo - lv.center) / lv.step) - 1.0;
          if (j > static_cast<double>(hi)) return {};
          lo = std::max<long>(lo, static_cast<long>(std::max(j, -1e15)));
        }
        if (lo > hi) return {};
      }
      std::vector<long> out;
      for (long j = lo; j <= hi; ++j) out.push_back(j);
      return out;
    }

    void visit(int level, long j, Best& best) {
      if (s_.nodes_.fetch_add(1) >= s_.opt_.max_nodes) {
        throw CapabilityError("grid scan exceeds the node budget of " +
                              std::to_string(s_.opt_.max_nodes));
      }
      const Level& lv = s_.levels_[level];
      v_[lv.var] = lv.center + static_cast<double>(j) * lv.step;
      for (int c : lv.constraints) {
        if (!check(c)) return;
      }
      const int next = level + 1;
      if (next == static_cast<int>(s_.levels_.size())) {
        leaf(best);
        return;
      }
      for (long jj : candidates(next)) visit(next, jj, best);
    }

    void leaf(Best& best) {
      double val = s_.objective_(std::span<const double>(v_));
      if (s_.prob_.sense == Sense::kMaximize) val = -val;
      if (std::isnan(val)) return;
      best.offer(val, v_);
    }

   private:
    double rhs(int c) {
      const ScanConstraint& sc = s_.cons_[c];
      Eigen::VectorXd args(sc.arg_indices.size());
      for (std::size_t i = 0; i < sc.arg_indices.size(); ++i) args[i] = v_[sc.arg_indices[i]];
      auto& slot = cache_[sc.implicit];
      if (slot.valid && slot.args.size() == args.size() && slot.args == args) return slot.value;
      slot.valid = true;
      slot.args = args;
      slot.value = s_.prob_.implicit[sc.implicit].rhs(args);
      return slot.value;
    }

    struct CacheSlot {
      bool valid = false;
      Eigen::VectorXd args;
      double value = 0.0;
    };
    Scanner& s_;
    std::vector<double> v_;
    std::vector<CacheSlot> cache_;
  };

  const GridProblem& prob_;
  ScanOptions opt_;
  CompiledExpr objective_;
  std::vector<std::pair<std::string, int>> names_;
  std::vector<Level> levels_;
  std::vector<ScanConstraint> cons_;
  std::vector<int> constant_;
  std::atomic<std::uint64_t> nodes_{0};
};

}  // namespace

SolveReport brute_force_global(const GridProblem& prob, const Box& box,
                               const ScanOptions& options) {
  Scanner scanner(prob, box, options);
  return scanner.run();
}

const char* to_string(LocalCertificate::Verdict v) {
  return v == LocalCertificate::Verdict::kNoBetterPoint ? "no_better_point_at_resolution"
                                                        : "counterexample";
}

LocalCertificate local_min_certificate(const GridProblem& prob, const Eigen::VectorXd& pt,
                                       double radius, double step, double tol_obj,
                                       const ScanOptions& options) {
  if (pt.size() != prob.space.total_dim()) throw InputError("point has wrong dimension");
  const double viol = prob.violation(pt);
  if (viol > options.tol) {
    throw InputError("point is infeasible (violation " + std::to_string(viol) + ")");
  }
  LocalCertificate cert;
  cert.point = pt;
  cert.radius = radius;
  cert.step = step;
  cert.value = eval(prob.objective, Point(prob.space, pt));
  const SolveReport best =
      brute_force_global(prob, Box::uniform(Point(prob.space, pt), radius, step), options);
  cert.visited = best.iterations;
  if (best.status != SolveStatus::kOptimal) return cert;
  const double drop = prob.sense == Sense::kMinimize ? cert.value - best.value
                                                     : best.value - cert.value;
  if (drop > tol_obj) {
    cert.verdict = LocalCertificate::Verdict::kCounterexample;
    cert.witness = best.point;
    cert.witness_value = best.value;
    cert.drop = drop;
  }
  return cert;
}

const char* to_string(FiberKind k) {
  switch (k) {
    case FiberKind::kEll:
      return "ell";
    case FiberKind::kW:
      return "w";
    case FiberKind::kMw:
      return "mw";
  }
  return "unknown";
}

FiberKind parse_fiber_kind(const std::string& s) {
  if (s == "ell" || s == "l" || s == "ld") return FiberKind::kEll;
  if (s == "w" || s == "wd") return FiberKind::kW;
  if (s == "mw" || s == "mwd") return FiberKind::kMw;
  throw InputError("unknown fiber kind '" + s + "'");
}

FiberKind fiber_for(ReformKind k) {
  switch (k) {
    case ReformKind::kLd:
      return FiberKind::kEll;
    case ReformKind::kWd:
      return FiberKind::kW;
    case ReformKind::kMwd:
      return FiberKind::kMw;
    default:
      break;
  }
  throw InputError(std::string("no intermediate mapping for kind ") + to_string(k));
}

namespace {

bool same_vertex_sets(const std::vector<Eigen::VectorXd>& a,
                      const std::vector<Eigen::VectorXd>& b, double tol) {
  if (a.size() != b.size()) return false;
  auto covered = [tol](const std::vector<Eigen::VectorXd>& from,
                       const std::vector<Eigen::VectorXd>& in) {
    for (const auto& v : from) {
      bool hit = false;
      for (const auto& w : in) {
        if ((v - w).cwiseAbs().maxCoeff() <= tol) {
          hit = true;
          break;
        }
      }
      if (!hit) return false;
    }
    return true;
  };
  return covered(a, b) && covered(b, a);
}

}  // namespace

KFiber enumerate_K(const BilevelProblem& bp, FiberKind kind, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y, int dim_cap, double tol) {
  if (x.size() != bp.n || y.size() != bp.m) throw InputError("point has wrong dimension");
  const int m = bp.m, p = bp.p;
  const bool affine = lower_affine_in_y(bp);
  KFiber out;
  out.kind = kind;
  Eigen::VectorXd xy(bp.n + m);
  xy << x, y;
  const Point pt(bp.xy_space(), xy);
  Eigen::VectorXd x0(bp.n + m);
  x0 << x, Eigen::VectorXd::Zero(m);
  const Point p0(bp.xy_space(), x0);

  bool y_feasible = true;
  for (const Expr& g : bp.g) y_feasible = y_feasible && eval(g, pt) <= 1e-7;

  if (!affine) {
    if (kind != FiberKind::kEll) {
      throw CapabilityError("K_w and K_mw fibers need a lower level affine in y");
    }
    if (!bp.lower_convex_in_y || joint_degree(bp.f, {"y"}) > 2) {
      throw CapabilityError("K_ell fibers need an affine or quadratic lower level");
    }
    for (const Expr& g : bp.g) {
      if (joint_degree(g, {"y"}) > 2) {
        throw CapabilityError("K_ell fibers need an affine or quadratic lower level");
      }
    }
    out.blocks = {"u"};
    if (!y_feasible) {
      out.polyhedron = Polyhedron(p);
      out.polyhedron.add_le(Eigen::RowVectorXd::Zero(p), -1.0);
      out.description = enumerate_polyhedron(out.polyhedron, dim_cap, tol);
      out.notes.push_back("y is infeasible; the fiber is empty");
      return out;
    }
    const MultiplierPolyhedron mp = multiplier_set(bp, x, y);
    out.polyhedron = mp.to_polyhedron();
    out.description = enumerate_polyhedron(out.polyhedron, dim_cap, tol);
    const Nlp lower = lower_level(bp, x);
    const double fxy = eval(bp.f, pt);
    out.checked_against_multipliers = true;
    out.matches_multipliers = true;
    for (const auto& u : out.description.vertices) {
      const double psi = lagrange_value_fn(lower, u).as_double();
      if (!(fxy <= psi + 1e-7)) out.matches_multipliers = false;
    }
    out.notes.push_back("quadratic lower level: fiber described through the multiplier set");
    return out;
  }

  const Eigen::VectorXd a = grad(bp.f, "y", pt);
  Eigen::MatrixXd B(p, m);
  Eigen::VectorXd g0(p);
  for (int i = 0; i < p; ++i) {
    B.row(i) = grad(bp.g[i], "y", pt).transpose();
    g0[i] = eval(bp.g[i], p0);
  }
  const double f0 = eval(bp.f, p0);
  const double fxy = eval(bp.f, pt);
  const int zoff = kind == FiberKind::kEll ? 0 : m;
  const int dim = zoff + p;
  Polyhedron poly(dim);
  for (int j = 0; j < m; ++j) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim);
    row.segment(zoff, p) = B.col(j).transpose();
    poly.add_eq(row, -a[j]);
  }
  for (int i = 0; i < p; ++i) poly.add_nonneg(zoff + i);
  {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim);
    row.segment(zoff, p) = -g0.transpose();
    poly.add_le(row, f0 - fxy);
  }
  if (kind == FiberKind::kMw) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim);
    row.head(m) = a.transpose();
    row.segment(zoff, p) = -g0.transpose();
    poly.add_le(row, 0.0);
    Eigen::RowVectorXd vrow = Eigen::RowVectorXd::Zero(dim);
    vrow.head(m) = -a.transpose();
    poly.add_le(vrow, f0 - fxy);
  }
  out.blocks = kind == FiberKind::kEll ? std::vector<std::string>{"u"}
                                       : std::vector<std::string>{"z", "u"};
  out.polyhedron = poly;
  out.description = enumerate_polyhedron(poly, dim_cap, tol);
  if (kind == FiberKind::kEll) {
    out.checked_against_multipliers = true;
    std::vector<Eigen::VectorXd> lambda_vertices;
    bool lambda_bounded = true;
    if (y_feasible) {
      const auto desc = polyhedron_vertices(multiplier_set(bp, x, y), dim_cap);
      lambda_vertices = desc.vertices;
      lambda_bounded = desc.bounded();
    }
    out.matches_multipliers =
        same_vertex_sets(out.description.vertices, lambda_vertices, 1e-9) &&
        lambda_bounded == out.description.bounded();
  }
  return out;
}

QuantifiedReport quantified_local_check(const BilevelProblem& bp, ReformKind kind,
                                        const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                        double radius, double step, int dim_cap,
                                        const ScanOptions& options) {
  const FiberKind fk = fiber_for(kind);
  const ReformulatedNlp r = build_reformulation(bp, kind);
  const GridProblem prob = GridProblem::from(r);
  const KFiber K = enumerate_K(bp, fk, x, y, dim_cap);
  QuantifiedReport rep;
  rep.kind = kind;
  rep.note =
      "fiber sampled at vertices, bounded-edge midpoints and ray points; "
      "this under-approximates the full fiber";
  const int m = bp.m, p = bp.p;
  auto full_point = [&](const Eigen::VectorXd& v) {
    Point pt = Point::zeros(r.nlp.space);
    pt.set_block("x", x);
    pt.set_block("y", y);
    const int zoff = fk == FiberKind::kEll ? 0 : m;
    if (zoff > 0) pt.set_block("z", v.head(m));
    if (p > 0) pt.set_block("u", v.segment(zoff, p));
    return pt.values;
  };
  std::vector<std::pair<std::string, Eigen::VectorXd>> samples;
  const auto& D = K.description;
  for (const auto& v : D.vertices) samples.push_back({"vertex", v});
  for (const auto& [i, j] : D.edges) {
    samples.push_back({"edge-midpoint", 0.5 * (D.vertices[i] + D.vertices[j])});
  }
  for (const auto& v : D.vertices) {
    for (double s : {1.0, 10.0, 100.0}) {
      for (const auto& ray : D.rays) samples.push_back({"ray", v + s * radius * ray});
      for (const auto& l : D.lineality) {
        samples.push_back({"lineality", v + s * radius * l});
        samples.push_back({"lineality", v - s * radius * l});
      }
    }
  }
  for (const auto& [source, v] : samples) {
    const Eigen::VectorXd w = full_point(v);
    if (prob.violation(w) > options.tol) continue;
    QuantifiedEntry e;
    e.source = source;
    e.fiber_point = v;
    e.certificate = local_min_certificate(prob, w, radius, step, 1e-6, options);
    if (e.certificate.verdict == LocalCertificate::Verdict::kCounterexample) {
      rep.all_local = false;
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

ProbeReport inner_semicompactness_probe(const BilevelProblem& bp, FiberKind kind,
                                        const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                        double radius, int samples) {
  if (x.size() != bp.n || y.size() != bp.m) throw InputError("point has wrong dimension");
  if (samples < 2) throw InputError("the probe needs at least two scales");
  ProbeReport rep;
  rep.note = "sampling heuristic; not a proof of inner semicompactness";
  bool any = false;
  for (int i = 0; i < bp.n; ++i) {
    for (double sign : {1.0, -1.0}) {
      std::vector<double> norms;
      for (int k = 0; k < samples; ++k) {
        const double r = radius * std::pow(10.0, -k);
        ProbeSample s;
        s.x = x;
        s.x[i] += sign * r;
        const ValueResult vr = value_function(bp, s.x);
        if (vr.kind != ValueResult::Kind::kFinite) {
          s.empty = true;
          rep.samples.push_back(s);
          continue;
        }
        s.y = vr.y;
        const KFiber K = enumerate_K(bp, kind, s.x, s.y);
        const auto& D = K.description;
        s.has_rays = !D.rays.empty();
        s.has_lineality = !D.lineality.empty();
        rep.rays_seen = rep.rays_seen || s.has_rays || s.has_lineality;
        if (D.vertices.empty()) {
          s.empty = true;
          rep.samples.push_back(s);
          continue;
        }
        s.min_vertex_norm = std::numeric_limits<double>::infinity();
        for (const auto& v : D.vertices) {
          s.min_vertex_norm = std::min(s.min_vertex_norm, v.norm());
          s.max_vertex_norm = std::max(s.max_vertex_norm, v.norm());
        }
        rep.max_vertex_norm = std::max(rep.max_vertex_norm, s.max_vertex_norm);
        norms.push_back(s.min_vertex_norm);
        any = true;
        rep.samples.push_back(s);
      }
      if (norms.size() >= 2 && norms.back() > 10.0 * std::max(1.0, norms.front())) {
        rep.unbounded_evidence = true;
      }
    }
  }
  rep.bounded_evidence = any && !rep.unbounded_evidence;
  return rep;
}

}  // namespace bilevel
