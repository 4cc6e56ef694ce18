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


// Prints one line per acceptance criterion and exits nonzero if any fails.
//
//   acceptance --cli <path to bilevel> [--golden <examples.json>]

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bilevel/cq.hpp"
#include "bilevel/duality.hpp"
#include "bilevel/examples.hpp"
#include "bilevel/reform.hpp"
#include "bilevel/verify.hpp"
#include "../support/instances.hpp"

using namespace bilevel;
using bilevel::testing::planted_instance;
using bilevel::testing::same_point_set;

namespace {

struct Line {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}

Eigen::VectorXd assemble(const VarSpace& space,
                         const std::vector<std::pair<std::string, Eigen::VectorXd>>& blocks) {
  Point pt = Point::zeros(space);
  for (const auto& [name, v] : blocks) pt.set_block(name, v);
  return pt.values;
}

// 1 ------------------------------------------------------------------------
Line criterion1() {
  const BilevelProblem bp = running_example();
  std::ostringstream d;
  bool ok = true;
  auto t0 = Clock::now();
  const ReformulatedNlp vf = build_vf_ref(bp);
  const SolveReport g = brute_force_global(
      GridProblem::from(vf), Box::uniform(Point::zeros(vf.nlp.space), 2.0, 1e-3));
  double t = seconds_since(t0);
  ok = ok && g.status == SolveStatus::kOptimal &&
       (g.point - vec({0.5, 0.5})).lpNorm<Eigen::Infinity>() <= 1e-3 &&
       std::abs(g.value - 0.5) <= 2e-3 && t < 10;
  d << "obop (" << g.point[0] << ", " << g.point[1] << ") value " << g.value << " in "
    << fmt("%.2f", t) << "s";
  for (auto k : {ReformKind::kLd, ReformKind::kWd, ReformKind::kMwd}) {
    const ReformulatedNlp r = build_reformulation(bp, k);
    t0 = Clock::now();
    const SolveReport s = brute_force_global(GridProblem::from(r),
                                             multiplier_aware_box(r.nlp.space, 1.0, 1e-3));
    t = seconds_since(t0);
    ok = ok && s.status == SolveStatus::kOptimal && std::abs(s.value - g.value) <= 2e-3 && t < 10;
    d << "; " << to_string(k) << " value " << s.value << " in " << fmt("%.2f", t) << "s";
  }
  return {ok, d.str()};
}

// 2 ------------------------------------------------------------------------
Line criterion2() {
  const BilevelProblem bp = running_example();
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream d;
  struct Case {
    ReformKind kind;
    Eigen::VectorXd good, bad;
  };
  const std::vector<Case> cases{
      {ReformKind::kLd, vec({0, 1, 0, 1}), vec({0, 1, 1, 0})},
      {ReformKind::kWd, vec({0, 1, 1, 0, 1}), vec({0, 1, 1, 1, 0})},
      {ReformKind::kMwd, vec({0, 1, 1, 0, 1}), vec({0, 1, 1, 1, 0})},
  };
  for (const auto& c : cases) {
    const GridProblem gp = GridProblem::from(build_reformulation(bp, c.kind));
    const LocalCertificate a = local_min_certificate(gp, c.good, 0.1, 1e-3);
    const LocalCertificate b = local_min_certificate(gp, c.bad, 0.1, 1e-3);
    const bool case_ok = a.verdict == LocalCertificate::Verdict::kNoBetterPoint &&
                         b.verdict == LocalCertificate::Verdict::kCounterexample &&
                         b.drop >= 1e-3;
    ok = ok && case_ok;
    d << to_string(c.kind) << " " << to_string(a.verdict) << "/" << to_string(b.verdict)
      << " drop " << b.drop << "; ";
  }
  const double t = seconds_since(t0);
  ok = ok && t < 30;
  d << fmt("%.2f", t) << "s total";
  return {ok, d.str()};
}

// 3 ------------------------------------------------------------------------
Line criterion3() {
  int points = 0, exceptions = 0, infeasible = 0;
  double worst = 0.0;
  auto check = [&](const ReformulatedNlp& r, const Eigen::VectorXd& w) {
    if (!r.feasible(w, 1e-8)) {
      ++infeasible;
      return;
    }
    ++points;
    const CqReport rep = check_mfcq(r, w);
    worst = std::max(worst, rep.certificate_residual);
    if (rep.verdict != Verdict::kViolated || rep.certificate_residual > 1e-9) ++exceptions;
  };
  {
    const BilevelProblem bp = running_example();
    const ReformulatedNlp kkt = build_kkt_ref(bp), wd = build_wd_ref(bp), mwd = build_mwd_ref(bp);
    std::vector<std::array<double, 4>> base;  // x, y, u0, u1
    for (double x : {-1.0, -0.5, 0.5, 1.0}) {
      base.push_back(x > 0 ? std::array<double, 4>{x, 1 - std::abs(x), 1, 0}
                           : std::array<double, 4>{x, 1 - std::abs(x), 0, 1});
    }
    for (double t : {0.0, 0.3, 0.5, 1.0}) base.push_back({0, 1, t, 1 - t});
    for (const auto& b : base) {
      const Eigen::VectorXd x = vec({b[0]}), y = vec({b[1]}), u = vec({b[2], b[3]});
      check(kkt, assemble(kkt.nlp.space, {{"x", x}, {"y", y}, {"u", u}}));
      for (double z : {b[1], b[1] + 0.5, -2.0}) {
        check(wd, assemble(wd.nlp.space, {{"x", x}, {"y", y}, {"z", vec({z})}, {"u", u}}));
      }
      check(mwd, assemble(mwd.nlp.space, {{"x", x}, {"y", y}, {"z", y}, {"u", u}}));
    }
  }
  std::mt19937_64 rng(20260301);
  for (int inst = 0; inst < 50; ++inst) {
    const bool quad = inst % 2 == 1;
    const int n = testing::uniform_int(rng, 1, 2), m = testing::uniform_int(rng, 1, 2);
    const int p = testing::uniform_int(rng, 1, 3), q = testing::uniform_int(rng, 0, 1);
    const auto pi = planted_instance(rng, quad, n, m, p, q);
    const ReformulatedNlp kkt = build_kkt_ref(pi.bp), wd = build_wd_ref(pi.bp),
                          mwd = build_mwd_ref(pi.bp);
    check(kkt, assemble(kkt.nlp.space, {{"x", pi.x}, {"y", pi.y}, {"u", pi.u}}));
    std::vector<Eigen::VectorXd> zs{pi.y};
    if (!quad) {
      // z is free in the WD rows for affine lower levels; in the MWD rows it
      // may move along the null space of u^T A.
      Eigen::VectorXd shift(m);
      for (int j = 0; j < m; ++j) shift[j] = testing::uniform_real(rng, -1, 1);
      zs.push_back(pi.y + shift);
    }
    for (const auto& z : zs) {
      check(wd, assemble(wd.nlp.space, {{"x", pi.x}, {"y", pi.y}, {"z", z}, {"u", pi.u}}));
    }
    check(mwd, assemble(mwd.nlp.space, {{"x", pi.x}, {"y", pi.y}, {"z", pi.y}, {"u", pi.u}}));
    if (!quad) {
      const Eigen::RowVectorXd uA = pi.u.transpose() * pi.A;
      const Eigen::MatrixXd N = null_space(uA);
      if (N.cols() > 0) {
        const Eigen::VectorXd z = pi.y + N.col(0);
        check(mwd, assemble(mwd.nlp.space, {{"x", pi.x}, {"y", pi.y}, {"z", z}, {"u", pi.u}}));
      }
    }
  }
  std::ostringstream d;
  d << points << " feasible points, " << exceptions << " exceptions, worst residual " << worst;
  if (infeasible) d << ", " << infeasible << " generated points infeasible";
  return {exceptions == 0 && infeasible == 0 && points > 0, d.str()};
}

// 4 ------------------------------------------------------------------------
Line criterion4() {
  bool ok = true;
  std::ostringstream d;
  const BilevelProblem bp = running_example();
  const ReformulatedNlp ld = build_ld_ref(bp);
  int holds = 0, sampled = 0;
  for (int i = -10; i <= 10; ++i) {
    const double x = i / 10.0;
    std::vector<Eigen::VectorXd> us;
    if (x > 0) us.push_back(vec({1, 0}));
    if (x < 0) us.push_back(vec({0, 1}));
    if (x == 0) {
      for (int k = 0; k <= 10; ++k) us.push_back(vec({k / 10.0, 1 - k / 10.0}));
    }
    for (const auto& u : us) {
      const Eigen::VectorXd w = assemble(ld.nlp.space, {{"x", vec({x})}, {"y", vec({1 - std::abs(x)})}, {"u", u}});
      if (!ld.feasible(w, 1e-8)) {
        ok = false;
        continue;
      }
      ++sampled;
      holds += check_bcq_closed_form(ld, w).verdict == Verdict::kHolds;
    }
  }
  ok = ok && holds == sampled;
  d << "running example BCQ holds at " << holds << "/" << sampled;
  const CqReport ns1 = check_nsmfcq_ld(ld, vec({0, 1, 0, 1}));
  ok = ok && ns1.verdict == Verdict::kViolated;

  const BilevelProblem bf = bcq_fails_example();
  const ReformulatedNlp bld = build_ld_ref(bf);
  const Eigen::VectorXd w =
      assemble(bld.nlp.space, {{"x", vec({0})}, {"y", vec({0, 1})}, {"u", vec({0, 0})}});
  const CqReport bcq = check_bcq_closed_form(bld, w);
  const CqReport ns2 = check_nsmfcq_ld(bld, w);
  const bool eta = bcq.cone_element.size() > 0 && bcq.cone_element.lpNorm<Eigen::Infinity>() > 1e-6;
  ok = ok && bcq.verdict == Verdict::kViolated && eta && ns2.verdict == Verdict::kViolated;
  d << "; bcq-fails instance " << to_string(bcq.verdict) << " with |eta| "
    << (bcq.cone_element.size() ? bcq.cone_element.lpNorm<Eigen::Infinity>() : 0.0)
    << "; NSMFCQ " << to_string(ns1.verdict) << "/" << to_string(ns2.verdict);
  return {ok, d.str()};
}

// 5 ------------------------------------------------------------------------
Line criterion5() {
  const Nlp lower = cubic_lower_level(8.0);
  DualOptions o;
  o.rename = {{"y", "z"}};
  o.multiplier = "u";
  const DualityReport r = check_weak_duality(lower, vec({0}), vec({-3, 0.1, 3.7}),
                                             DualKind::kWolfe, 1e-8, o);
  const bool ok = r.dual_violation <= 1e-12 && std::abs(r.dual_value - 4.6) <= 1e-9 &&
                  r.primal_value == 0.0 && !r.weak_duality_ok;
  std::ostringstream d;
  d << "dual residual " << r.dual_violation << ", dual value " << r.dual_value
    << " vs primal optimum " << r.primal_value << ", weak Wolfe duality "
    << (r.weak_duality_ok ? "holds" : "fails");
  return {ok, d.str()};
}

// 6 ------------------------------------------------------------------------
Line criterion6() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(7);
  int weak_fail = 0, strong_fail = 0, slater_fail = 0, subset_fail = 0, mw_feasible = 0;
  double worst_gap = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const int m = testing::uniform_int(rng, 1, 3), p = testing::uniform_int(rng, 1, 4);
    const auto qp = testing::random_convex_qp(rng, m, p);
    const Nlp& nlp = qp.nlp;
    if (check_slater(nlp.inequalities, nlp.space).verdict != Verdict::kHolds) ++slater_fail;
    for (auto k : {DualKind::kLagrange, DualKind::kWolfe}) {
      const StrongDualityReport s = check_strong_duality(nlp, k);
      worst_gap = std::max(worst_gap, std::abs(s.gap));
      if (!s.holds) ++strong_fail;
    }
    DualOptions opt;
    opt.rename = {{"y", "z"}};
    opt.multiplier = "u";
    const Nlp wolfe = build_wolfe_dual(nlp, opt);
    const Nlp mw = build_mond_weir_dual(nlp, opt);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(qp.Q);
    for (int s = 0; s < 1000; ++s) {
      Eigen::VectorXd u(p);
      for (int i = 0; i < p; ++i) u[i] = testing::uniform_real(rng, 0, 2);
      Eigen::VectorXd z = ldlt.solve(-(qp.c + qp.A.transpose() * u));
      if (s % 2 == 1) {
        for (int j = 0; j < m; ++j) z[j] += testing::uniform_real(rng, -0.1, 0.1);
      }
      Eigen::VectorXd zu(m + p);
      zu << z, u;
      const bool in_mw = constraint_violation(mw, zu) <= 1e-8;
      const bool in_w = constraint_violation(wolfe, zu) <= 1e-8;
      mw_feasible += in_mw;
      if (in_mw && !in_w) ++subset_fail;
      if (s % 50 == 0) {
        Eigen::VectorXd y = qp.strict_point;
        for (int j = 0; j < m; ++j) y[j] += testing::uniform_real(rng, -0.05, 0.05);
        if (constraint_violation(nlp, y) > 0) y = qp.strict_point;
        const DualityReport lr = check_weak_duality(nlp, y, u, DualKind::kLagrange, 1e-8);
        weak_fail += !lr.weak_duality_ok;
        if (in_w) {
          weak_fail += !check_weak_duality(nlp, y, zu, DualKind::kWolfe, 1e-8, opt).weak_duality_ok;
        }
        if (in_mw) {
          weak_fail +=
              !check_weak_duality(nlp, y, zu, DualKind::kMondWeir, 1e-8, opt).weak_duality_ok;
        }
      }
    }
  }
  const double t = seconds_since(t0);
  std::ostringstream d;
  d << "weak failures " << weak_fail << ", strong failures " << strong_fail << " (worst gap "
    << worst_gap << "), Slater failures " << slater_fail << ", MW not in W " << subset_fail
    << " (" << mw_feasible << " MW-feasible samples), " << fmt("%.2f", t) << "s";
  const bool ok = weak_fail == 0 && strong_fail == 0 && slater_fail == 0 && subset_fail == 0 &&
                  mw_feasible > 0 && t < 60;
  return {ok, d.str()};
}

// 7 ------------------------------------------------------------------------
Line criterion7() {
  std::mt19937_64 rng(424242);
  int disagreements = 0, members = 0, total = 0, vertex_mismatch = 0, vertex_checks = 0;
  auto run = [&](const BilevelProblem& bp, const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& anchors,
                 const std::vector<Eigen::VectorXd>& planted) {
    const ReformulatedNlp kkt = build_kkt_ref(bp), ld = build_ld_ref(bp);
    const int dim = kkt.nlp.space.total_dim();
    std::vector<Eigen::VectorXd> pts = planted;
    while (static_cast<int>(pts.size()) < 1000) {
      Eigen::VectorXd w(dim);
      for (int i = 0; i < dim; ++i) w[i] = testing::uniform_int(rng, -2, 4) * 0.5;
      pts.push_back(w);
    }
    for (const auto& w : pts) {
      const bool a = kkt.feasible(w, 1e-7), b = ld.feasible(w, 1e-7);
      ++total;
      members += a;
      disagreements += a != b;
    }
    for (const auto& [x, y] : anchors) {
      const KFiber k = enumerate_K(bp, FiberKind::kEll, x, y);
      const PolyhedronDescription lam = polyhedron_vertices(multiplier_set(bp, x, y));
      ++vertex_checks;
      if (!same_point_set(k.description.vertices, lam.vertices, 1e-9) ||
          k.description.rays.size() != lam.rays.size() ||
          k.description.lineality.size() != lam.lineality.size()) {
        ++vertex_mismatch;
      }
    }
  };
  {
    const BilevelProblem bp = running_example();
    std::vector<Eigen::VectorXd> planted;
    for (double t : {0.0, 0.5, 1.0}) planted.push_back(vec({0, 1, t, 1 - t}));
    run(bp, {{vec({0}), vec({1})}, {vec({0.5}), vec({0.5})}, {vec({-0.5}), vec({0.5})}}, planted);
  }
  {
    const BilevelProblem bp = bcq_fails_example();
    run(bp, {{vec({0}), vec({0, 1})}, {vec({1}), vec({-1, 3})}}, {vec({0, 0, 1, 0, 0})});
  }
  {
    const BilevelProblem bp = exploding_multiplier_example();
    run(bp, {{vec({1}), vec({1})}, {vec({0.5}), vec({1})}}, {vec({1, 1, 1}), vec({0.5, 1, 2})});
  }
  for (int inst = 0; inst < 50; ++inst) {
    const int n = testing::uniform_int(rng, 1, 2), m = testing::uniform_int(rng, 1, 2);
    const int p = testing::uniform_int(rng, 1, 3);
    const auto pi = planted_instance(rng, false, n, m, p, 0);
    Eigen::VectorXd w(n + m + p);
    w << pi.x, pi.y, pi.u;
    run(pi.bp, {{pi.x, pi.y}}, {w});
  }
  std::ostringstream d;
  d << total << " points (" << members << " members), " << disagreements
    << " membership disagreements; " << vertex_mismatch << "/" << vertex_checks
    << " vertex-set mismatches";
  return {disagreements == 0 && vertex_mismatch == 0 && members > 0, d.str()};
}

// 8 ------------------------------------------------------------------------
Line criterion8() {
  std::mt19937_64 rng(88);
  int mismatches = 0, checked = 0;
  const std::array<ReformKind, 5> emitted{ReformKind::kVf, ReformKind::kKkt, ReformKind::kLd,
                                          ReformKind::kWd, ReformKind::kMwd};
  for (int t = 0; t < 50; ++t) {
    const int n = testing::uniform_int(rng, 1, 3), m = testing::uniform_int(rng, 1, 3);
    const int p = testing::uniform_int(rng, 1, 4), q = testing::uniform_int(rng, 0, 3);
    const auto pi = planted_instance(rng, t % 3 == 0, n, m, p, q);
    const CountSummary ge = count_summary(pi.bp, ReformKind::kGe);
    mismatches += !(ge.n_vars == n + m && ge.n_implicit_vars == 0 && ge.n_constraints == m + q);
    for (auto k : emitted) {
      const ReformulatedNlp r = build_reformulation(pi.bp, k);
      const CountSummary c = count_summary(pi.bp, k);
      const int rows = r.nlp.num_constraints() + static_cast<int>(r.implicit_constraints.size());
      const int extra = (k == ReformKind::kLd && r.closed_form) ? m : 0;
      ++checked;
      if (c.n_vars != r.nlp.space.total_dim() || c.n_implicit_vars != r.implicit_variable_count() ||
          c.n_constraints != r.logical_constraint_count() ||
          r.literal_constraint_count() != rows || rows != c.n_constraints + extra) {
        ++mismatches;
      }
    }
  }
  const std::array<std::array<int, 3>, 6> expect{{{2, 0, 3}, {4, 2, 6}, {2, 0, 1}, {4, 2, 5},
                                                  {5, 3, 6}, {5, 3, 7}}};
  const std::array<ReformKind, 6> kinds{ReformKind::kVf, ReformKind::kKkt, ReformKind::kGe,
                                        ReformKind::kLd, ReformKind::kWd, ReformKind::kMwd};
  bool worked = true;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const CountSummary c = count_summary(1, 1, 2, 0, kinds[i]);
    worked = worked && c.n_vars == expect[i][0] && c.n_implicit_vars == expect[i][1] &&
             c.n_constraints == expect[i][2];
  }
  std::ostringstream d;
  d << checked << " emitted reformulations cross-checked, " << mismatches
    << " mismatches; (1,1,2,0) worked numbers " << (worked ? "match" : "differ");
  return {mismatches == 0 && worked, d.str()};
}

// 9 ------------------------------------------------------------------------
Line criterion9() {
  std::mt19937_64 rng(99);
  const VarSpace space({{"x", 2}, {"y", 2}});
  double worst = 0.0;
  int bad = 0;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); };
  for (int t = 0; t < 500; ++t) {
    const Expr e = testing::random_polynomial(rng, testing::uniform_int(rng, 1, 4));
    Point pt = Point::zeros(space);
    for (int i = 0; i < 4; ++i) pt.values[i] = testing::uniform_real(rng, -1, 1);
    const Eigen::VectorXd g = flat_gradient(e, pt);
    const Eigen::MatrixXd H = flat_hessian(e, pt);
    const double h = 1e-5;
    for (int i = 0; i < 4; ++i) {
      Point a = pt, b = pt;
      a.values[i] += h;
      b.values[i] -= h;
      const double fd = (eval(e, a) - eval(e, b)) / (2 * h);
      double err = rel(g[i], fd);
      const Eigen::VectorXd ga = flat_gradient(e, a), gb = flat_gradient(e, b);
      for (int j = 0; j < 4; ++j) err = std::max(err, rel(H(j, i), (ga[j] - gb[j]) / (2 * h)));
      worst = std::max(worst, err);
      bad += err > 1e-5;
    }
  }
  std::ostringstream d;
  d << "500 expressions, worst relative error " << worst << ", " << bad << " entries above 1e-5";
  return {bad == 0, d.str()};
}

// 10 -----------------------------------------------------------------------
std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), n);
  status = pclose(f);
  return out;
}

Line criterion10(const std::string& cli, const std::string& golden) {
  if (cli.empty()) return {false, "no --cli path given"};
  int s1 = 0, s2 = 0, s3 = 0;
  const std::string a = capture("'" + cli + "' examples --json", s1);
  const std::string b = capture("'" + cli + "' examples --json", s2);
  const std::string c = capture("'" + cli + "' examples --json --workers 4", s3);
  bool ok = s1 == 0 && s2 == 0 && s3 == 0 && !a.empty() && a == b && a == c;
  std::ostringstream d;
  d << "3 runs (" << a.size() << " bytes) " << (a == b && a == c ? "byte-identical" : "differ");
  if (!golden.empty()) {
    std::ifstream in(golden, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    const bool match = in && ss.str() == a;
    ok = ok && match;
    d << ", golden report " << (match ? "matches" : "differs");
  }
  return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli, golden;
  for (int i = 1; i + 1 < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli") cli = argv[++i];
    else if (a == "--golden") golden = argv[++i];
  }
  const std::vector<std::pair<std::string, std::function<Line()>>> criteria{
      {"running-example global equivalence", criterion1},
      {"artificial local minimizers", criterion2},
      {"MFCQ violation on KKT/WD/MWD reformulations", criterion3},
      {"NSMFCQ and BCQ for the Lagrange reformulation", criterion4},
      {"Wolfe weak-duality refutation", criterion5},
      {"duality property suite", criterion6},
      {"feasible-set identity K_ell = Lambda", criterion7},
      {"count tables", criterion8},
      {"derivative correctness", criterion9},
      {"determinism", [&] { return criterion10(cli, golden); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Line l;
    try {
      l = criteria[i].second();
    } catch (const std::exception& e) {
      l = {false, std::string("exception: ") + e.what()};
    }
    failed += !l.pass;
    std::cout << "criterion " << (i + 1) << " [" << (l.pass ? "PASS" : "FAIL") << "] "
              << criteria[i].first << ": " << l.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
