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

#include "bilevel/examples.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "bilevel/cq.hpp"
#include "bilevel/duality.hpp"
#include "bilevel/errors.hpp"
#include "bilevel/reform.hpp"
#include "bilevel/report.hpp"

namespace bilevel {

namespace {

Expr X(int i = 0) { return Expr::var("x", i); }
Expr Y(int i = 0) { return Expr::var("y", i); }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out[i++] = d;
  return out;
}

// Order-insensitive comparison of two point sets.
bool same_point_set(const std::vector<Eigen::VectorXd>& a,
                    const std::vector<Eigen::VectorXd>& b, double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& p : a) {
    bool found = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && p.size() == b[j].size() &&
          (p - b[j]).lpNorm<Eigen::Infinity>() <= tol) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

class Recorder {
 public:
  explicit Recorder(std::string name) { out_.name = std::move(name); }
  void check(const std::string& what, bool ok) { out_.assertions.push_back({what, ok}); }
  nlohmann::json& details() { return out_.details; }
  ExampleOutcome take() { return std::move(out_); }

 private:
  ExampleOutcome out_;
};

nlohmann::json certificate_json(const LocalCertificate& c) {
  nlohmann::json j;
  j["verdict"] = to_string(c.verdict);
  j["point"] = to_json(c.point);
  j["value"] = c.value;
  j["radius"] = c.radius;
  j["step"] = c.step;
  if (c.verdict == LocalCertificate::Verdict::kCounterexample) {
    j["witness"] = to_json(c.witness);
    j["witness_value"] = c.witness_value;
    j["drop"] = c.drop;
  }
  return j;
}

nlohmann::json global_json(const SolveReport& r) {
  nlohmann::json j;
  j["status"] = to_string(r.status);
  j["point"] = to_json(r.point);
  j["value"] = r.value;
  return j;
}

constexpr double kLocalRadius = 0.1;
constexpr double kLocalStep = 1e-3;
constexpr double kObopRadius = 2.0;
constexpr double kObopStep = 1e-3;
constexpr double kRefRadius = 1.0;
constexpr double kRefStep = 1e-3;

SolveReport obop_global(const BilevelProblem& bp, const ScanOptions& so) {
  const ReformulatedNlp vf = build_vf_ref(bp);
  return brute_force_global(GridProblem::from(vf),
                            Box::uniform(Point::zeros(vf.nlp.space), kObopRadius, kObopStep),
                            so);
}

// Local pattern on a duality-based reformulation of the running example:
// `good` is local at resolution, `bad` admits a better nearby point.
void local_pattern(Recorder& rec, const ReformulatedNlp& r, const Eigen::VectorXd& good,
                   const Eigen::VectorXd& bad, const std::string& tag,
                   const ScanOptions& so) {
  const GridProblem gp = GridProblem::from(r);
  const LocalCertificate a = local_min_certificate(gp, good, kLocalRadius, kLocalStep, 1e-6, so);
  const LocalCertificate b = local_min_certificate(gp, bad, kLocalRadius, kLocalStep, 1e-6, so);
  rec.check(tag + " local at resolution at the multiplier (0,1)",
            a.verdict == LocalCertificate::Verdict::kNoBetterPoint);
  rec.check(tag + " counterexample at the multiplier (1,0) with drop >= 1e-3",
            b.verdict == LocalCertificate::Verdict::kCounterexample && b.drop >= 1e-3);
  rec.details()["local_good"] = certificate_json(a);
  rec.details()["local_bad"] = certificate_json(b);
}

void reformulation_global(Recorder& rec, const ReformulatedNlp& r, double reference,
                          const std::string& tag, const ScanOptions& so) {
  const SolveReport g = brute_force_global(
      GridProblem::from(r), multiplier_aware_box(r.nlp.space, kRefRadius, kRefStep), so);
  rec.check(tag + " grid-global value agrees with the original problem within 2e-3",
            g.status == SolveStatus::kOptimal && std::abs(g.value - reference) <= 2e-3);
  rec.details()["global_" + tag] = global_json(g);
}

void mfcq_violations(Recorder& rec, const ReformulatedNlp& r,
                     const std::vector<Eigen::VectorXd>& points, const std::string& tag) {
  nlohmann::json arr = nlohmann::json::array();
  bool all = true;
  for (const auto& w : points) {
    const CqReport m = check_mfcq(r, w);
    all = all && m.verdict == Verdict::kViolated && m.certificate_residual <= 1e-9;
    nlohmann::json j;
    j["point"] = to_json(w);
    j["verdict"] = to_string(m.verdict);
    j["multipliers"] = to_json(m.multipliers);
    j["certificate_residual"] = m.certificate_residual;
    arr.push_back(j);
  }
  rec.check(tag + " MFCQ violated with a certified multiplier", all);
  rec.details()["mfcq"] = arr;
}

nlohmann::json fiber_json(const KFiber& k) {
  nlohmann::json j;
  j["kind"] = to_string(k.kind);
  j["blocks"] = k.blocks;
  j["vertices"] = to_json(k.description.vertices);
  j["rays"] = to_json(k.description.rays);
  j["lineality"] = to_json(k.description.lineality);
  return j;
}

ExampleOutcome lagrange_running(const ExampleSettings& s) {
  Recorder rec("lagrange-running");
  ScanOptions so;
  so.workers = s.workers;
  const BilevelProblem bp = running_example();
  const SolveReport g = obop_global(bp, so);
  rec.check("global minimizer (0.5, 0.5) within 1e-3",
            g.status == SolveStatus::kOptimal &&
                (g.point - vec({0.5, 0.5})).lpNorm<Eigen::Infinity>() <= 1e-3);
  rec.check("global value 0.5 within 2e-3", std::abs(g.value - 0.5) <= 2e-3);
  rec.details()["global_obop"] = global_json(g);

  const ReformulatedNlp ld = build_ld_ref(bp);
  reformulation_global(rec, ld, g.value, "ld", so);
  local_pattern(rec, ld, vec({0, 1, 0, 1}), vec({0, 1, 1, 0}), "ld", so);

  const KFiber k = enumerate_K(bp, FiberKind::kEll, vec({0}), vec({1}));
  rec.check("K_ell(0,1) has vertices {(1,0),(0,1)}",
            same_point_set(k.description.vertices, {vec({1, 0}), vec({0, 1})}, 1e-9) &&
                k.description.bounded());
  rec.check("K_ell(0,1) equals the multiplier set", k.matches_multipliers);
  rec.details()["K_ell"] = fiber_json(k);

  const CqReport ns = check_nsmfcq_ld(ld, vec({0, 1, 0, 1}));
  rec.check("NSMFCQ violated at (0,1,(0,1))", ns.verdict == Verdict::kViolated);
  rec.details()["nsmfcq"] = {{"verdict", to_string(ns.verdict)},
                             {"coefficients", to_json(ns.coefficients)}};
  return rec.take();
}

ExampleOutcome bcq_holds(const ExampleSettings&) {
  Recorder rec("bcq-holds");
  const BilevelProblem bp = running_example();
  const ReformulatedNlp ld = build_ld_ref(bp);
  std::vector<Eigen::VectorXd> pts;
  for (double x : {-1.0, -0.5, 0.5, 1.0}) {
    pts.push_back(x > 0 ? vec({x, 1 - std::abs(x), 1, 0}) : vec({x, 1 - std::abs(x), 0, 1}));
  }
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) pts.push_back(vec({0, 1, t, 1 - t}));
  bool feasible = true, holds = true;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& w : pts) {
    feasible = feasible && ld.feasible(w, 1e-8);
    const CqReport r = check_bcq_closed_form(ld, w);
    holds = holds && r.verdict == Verdict::kHolds;
    arr.push_back({{"point", to_json(w)}, {"verdict", to_string(r.verdict)}});
  }
  rec.check("sampled points are feasible for the Lagrange-dual reformulation", feasible);
  rec.check("BCQ holds at every sampled feasible point", holds);
  rec.details()["bcq"] = arr;
  const CqReport ns = check_nsmfcq_ld(ld, vec({0, 1, 0, 1}));
  rec.check("NSMFCQ violated at (0,1,(0,1))", ns.verdict == Verdict::kViolated);
  rec.details()["nsmfcq"] = {{"verdict", to_string(ns.verdict)},
                             {"coefficients", to_json(ns.coefficients)}};
  return rec.take();
}

ExampleOutcome bcq_fails(const ExampleSettings&) {
  Recorder rec("bcq-fails");
  const BilevelProblem bp = bcq_fails_example();
  const ReformulatedNlp ld = build_ld_ref(bp);
  const Eigen::VectorXd w = vec({0, 0, 1, 0, 0});
  rec.check("(0,(0,1),(0,0)) is feasible", ld.feasible(w, 1e-8));
  const CqReport r = check_bcq_closed_form(ld, w);
  rec.check("BCQ violated with a nonzero eta certificate",
            r.verdict == Verdict::kViolated && r.cone_element.size() > 0 &&
                r.cone_element.lpNorm<Eigen::Infinity>() > 1e-6);
  rec.details()["bcq"] = {{"verdict", to_string(r.verdict)},
                          {"eta", to_json(r.cone_element)},
                          {"coefficients", to_json(r.coefficients)}};
  const CqReport ns = check_nsmfcq_ld(ld, w);
  rec.check("NSMFCQ violated", ns.verdict == Verdict::kViolated);
  rec.details()["nsmfcq"] = {{"verdict", to_string(ns.verdict)}};
  return rec.take();
}

ExampleOutcome wolfe_running(const ExampleSettings& s) {
  Recorder rec("wolfe-running");
  ScanOptions so;
  so.workers = s.workers;
  const BilevelProblem bp = running_example();
  const ReformulatedNlp wd = build_wd_ref(bp);
  reformulation_global(rec, wd, 0.5, "wd", so);
  const Eigen::VectorXd good = vec({0, 1, 1, 0, 1});
  const Eigen::VectorXd bad = vec({0, 1, 1, 1, 0});
  local_pattern(rec, wd, good, bad, "wd", so);
  mfcq_violations(rec, wd, {good, bad}, "wd");
  const KFiber k = enumerate_K(bp, FiberKind::kW, vec({0}), vec({1}));
  rec.check("K_w(0,1) is nonempty", !k.description.empty());
  rec.details()["K_w"] = fiber_json(k);
  return rec.take();
}

ExampleOutcome wolfe_counterexample(const ExampleSettings&) {
  Recorder rec("wolfe-counterexample");
  const double x = 8.0, eps = 0.1;
  const Nlp lower = cubic_lower_level(x);
  rec.check("lower level is not certified convex", lower.convexity == Convexity::kUnknown);
  const SolveReport primal =
      brute_force_global(GridProblem::from(lower),
                         Box::uniform(Point::zeros(lower.space), 3.0, 1e-3));
  rec.check("primal optimum is 0", primal.status == SolveStatus::kOptimal &&
                                       std::abs(primal.value) <= 1e-12);
  DualOptions o;
  o.rename = {{"y", "z"}};
  o.multiplier = "u";
  const Eigen::VectorXd dual = vec({-3, eps, 3.7});
  const DualityReport r = check_weak_duality(lower, primal.point, dual, DualKind::kWolfe, 1e-8, o);
  rec.check("dual point is Wolfe-dual feasible (residual <= 1e-12)", r.dual_violation <= 1e-12);
  rec.check("dual value 4.6 exceeds the primal optimum by (54 - x) eps",
            std::abs(r.dual_value - 4.6) <= 1e-9 &&
                std::abs((r.dual_value - r.primal_value) - (54 - x) * eps) <= 1e-9);
  rec.check("weak Wolfe duality fails", !r.weak_duality_ok);
  rec.details()["x"] = x;
  rec.details()["primal_point"] = to_json(r.primal_point);
  rec.details()["primal_value"] = r.primal_value;
  rec.details()["dual_point"] = to_json(r.dual_point);
  rec.details()["dual_value"] = r.dual_value;
  rec.details()["dual_violation"] = r.dual_violation;
  rec.details()["gap"] = r.gap;
  rec.details()["weak_duality_ok"] = r.weak_duality_ok;
  return rec.take();
}

ExampleOutcome mondweir_running(const ExampleSettings& s) {
  Recorder rec("mondweir-running");
  ScanOptions so;
  so.workers = s.workers;
  const BilevelProblem bp = running_example();
  const ReformulatedNlp mwd = build_mwd_ref(bp);
  reformulation_global(rec, mwd, 0.5, "mwd", so);
  const Eigen::VectorXd good = vec({0, 1, 1, 0, 1});
  const Eigen::VectorXd bad = vec({0, 1, 1, 1, 0});
  local_pattern(rec, mwd, good, bad, "mwd", so);
  mfcq_violations(rec, mwd, {good, bad}, "mwd");
  const KFiber k = enumerate_K(bp, FiberKind::kMw, vec({0}), vec({1}));
  rec.check("K_mw(0,1) has vertices {(1,0,1),(1,1,0)}",
            same_point_set(k.description.vertices, {vec({1, 0, 1}), vec({1, 1, 0})}, 1e-9));
  rec.details()["K_mw"] = fiber_json(k);
  return rec.take();
}

using Runner = std::function<ExampleOutcome(const ExampleSettings&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"lagrange-running", lagrange_running},
      {"bcq-holds", bcq_holds},
      {"bcq-fails", bcq_fails},
      {"wolfe-running", wolfe_running},
      {"wolfe-counterexample", wolfe_counterexample},
      {"mondweir-running", mondweir_running},
  };
  return table;
}

}  // namespace

BilevelProblem running_example() {
  return make_bilevel("running", 1, 1, pow(X() - 1.0, 2) + pow(Y() - 1.0, 2), {}, -Y(),
                      {X() + Y() - 1.0, -X() + Y() - 1.0});
}

BilevelProblem bcq_fails_example() {
  return make_bilevel("bcq-fails", 1, 2, pow(X(), 2) + pow(Y(0), 2) + pow(Y(1) - 1.0, 2), {},
                      X() * (Y(0) + Y(1)), {Y(0) + Y(1) - 2.0, Y(0) - Y(1)});
}

Nlp cubic_lower_level(double x) {
  const VarSpace ys({{"y", 1}});
  return make_nlp(ys, Y(), {pow(Y(), 3) - x, -Y()}, {});
}

BilevelProblem exploding_multiplier_example() {
  return make_bilevel("exploding-multiplier", 1, 1, X(), {}, -Y(), {X() * Y() - X()});
}

Box multiplier_aware_box(const VarSpace& space, double radius, double step) {
  Box b = Box::uniform(Point::zeros(space), radius, step);
  for (const auto& blk : space.blocks()) {
    if (blk.name != "u" && blk.name != "v") continue;
    for (int i = 0; i < blk.dim; ++i) {
      b.center.values[blk.offset + i] = 0.5;
      b.radius[blk.offset + i] = 0.5;
      b.step[blk.offset + i] = 0.1;
    }
  }
  return b;
}

const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names{"lagrange-running",     "bcq-holds",
                                              "bcq-fails",            "wolfe-running",
                                              "wolfe-counterexample", "mondweir-running"};
  return names;
}

bool ExampleOutcome::passed() const {
  for (const auto& a : assertions) {
    if (!a.passed) return false;
  }
  return true;
}

ExampleOutcome run_example(const std::string& name, const ExampleSettings& settings) {
  auto it = runners().find(name);
  if (it == runners().end()) throw InputError("unknown example '" + name + "'");
  return it->second(settings);
}

}  // namespace bilevel
