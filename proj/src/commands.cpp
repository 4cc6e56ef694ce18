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

#include "bilevel/commands.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "bilevel/cq.hpp"
#include "bilevel/duality.hpp"
#include "bilevel/errors.hpp"
#include "bilevel/examples.hpp"
#include "bilevel/problem_file.hpp"
#include "bilevel/reform.hpp"
#include "bilevel/report.hpp"
#include "bilevel/verify.hpp"

namespace bilevel {

using json = nlohmann::json;

namespace {

constexpr const char* kEnvKeys[][2] = {{"tol", "BILEVEL_TOL"},
                                       {"tol_act", "BILEVEL_TOL_ACT"},
                                       {"step", "BILEVEL_STEP"},
                                       {"radius", "BILEVEL_RADIUS"}};

constexpr double kGlobalRadius = 2.0;
constexpr double kGlobalStep = 1e-3;

double parse_positive(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || p != end || !(v > 0.0)) {
    throw InputError(what + " must be a positive number, got '" + text + "'");
  }
  return v;
}

// --------------------------------------------------------------------------
// Text rendering

std::string scalar_text(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", j.get<double>());
    return buf;
  }
  if (j.is_array()) {
    std::string s = "[";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) s += ", ";
      s += scalar_text(j[i]);
    }
    return s + "]";
  }
  return j.dump();
}

// Scalars, scalar arrays and arrays of scalar arrays print on one line.
bool is_flat(const json& j) {
  if (!j.is_structured()) return true;
  if (!j.is_array()) return false;
  for (const auto& e : j) {
    if (e.is_object()) return false;
    if (e.is_array()) {
      for (const auto& f : e) {
        if (f.is_structured()) return false;
      }
    }
  }
  return true;
}

void render(const json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (is_flat(it.value())) {
        out += pad + it.key() + ": " + scalar_text(it.value()) + "\n";
      } else {
        out += pad + it.key() + ":\n";
        render(it.value(), indent + 2, out);
      }
    }
  } else if (j.is_array()) {
    for (const auto& e : j) {
      if (is_flat(e)) {
        out += pad + "- " + scalar_text(e) + "\n";
      } else {
        out += pad + "-\n";
        render(e, indent + 2, out);
      }
    }
  } else {
    out += pad + scalar_text(j) + "\n";
  }
}

// --------------------------------------------------------------------------
// Shared pieces

struct Outcome {
  int exit_code = 0;
  json result;
  std::string text;  // optional hand-written text rendering
};

int verdict_exit(Verdict v, const std::string& reason) {
  switch (v) {
    case Verdict::kHolds:
      return 0;
    case Verdict::kViolated:
      return 1;
    case Verdict::kNotApplicable:
      break;
  }
  throw CapabilityError("check not applicable: " + reason);
}

json cq_json(const CqReport& r) {
  json j;
  j["condition"] = to_string(r.condition);
  j["verdict"] = to_string(r.verdict);
  if (!r.reason.empty()) j["reason"] = r.reason;
  j["active_set"] = to_json(r.active_set);
  if (r.direction.size()) {
    j["direction"] = to_json(r.direction);
    j["sigma"] = r.sigma;
  }
  if (r.multipliers.size()) j["multipliers"] = to_json(r.multipliers);
  j["certificate_residual"] = r.certificate_residual;
  if (r.point.size()) j["point"] = to_json(r.point);
  if (r.cone_element.size()) j["cone_element"] = to_json(r.cone_element);
  if (r.coefficients.size()) j["coefficients"] = to_json(r.coefficients);
  j["primal_dual_agree"] = r.primal_dual_agree;
  return j;
}

DualKind dual_kind_from(const std::string& kind) {
  if (kind.empty() || kind == "ld") return DualKind::kLagrange;
  if (kind == "wd") return DualKind::kWolfe;
  if (kind == "mwd") return DualKind::kMondWeir;
  return parse_dual_kind(kind);
}

DualOptions lower_dual_options() {
  DualOptions o;
  o.rename = {{"y", "z"}};
  o.multiplier = "u";
  return o;
}

struct Context {
  const CliOptions& opt;
  const ProblemFile& pf;
  const Tolerances& tols;

  const BilevelProblem& bp() const { return pf.problem; }
  CqTolerances cq() const {
    CqTolerances t;
    t.tol = tols.tol;
    t.tol_act = tols.tol_act;
    return t;
  }
  ScanOptions scan() const {
    ScanOptions s;
    s.tol = tols.tol;
    s.workers = opt.workers;
    return s;
  }
  const std::string& require_point() const {
    if (opt.point.empty()) throw InputError("check " + opt.what + " needs --point");
    return opt.point;
  }
  // (x, y) from --point.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> xy() const {
    const VarSpace s = bp().xy_space();
    const Eigen::VectorXd w = parse_point(require_point(), s);
    return {w.segment(s.offset("x"), bp().n), w.segment(s.offset("y"), bp().m)};
  }
  Eigen::VectorXd x_only() const {
    const std::string& p = require_point();
    const VarSpace xs = bp().x_space();
    if (p.find("y=") != std::string::npos) {
      return parse_point(p, bp().xy_space()).head(bp().n);
    }
    return parse_point(p, xs);
  }
  Eigen::VectorXd dual_point(const VarSpace& space) const {
    if (opt.dual.empty()) throw InputError("check " + opt.what + " needs --dual");
    return parse_point(opt.dual, space);
  }
};

// --------------------------------------------------------------------------
// check targets

Outcome check_weak(const Context& c) {
  const auto [x, y] = c.xy();
  const Nlp lower = lower_level(c.bp(), x);
  const DualKind kind = dual_kind_from(c.opt.kind);
  DualOptions o = lower_dual_options();
  Eigen::VectorXd d;
  if (kind == DualKind::kLagrange) {
    if (lower.num_constraints() == 0) throw InputError("lower level has no constraints");
    d = c.dual_point(VarSpace({{"u", lower.num_constraints()}}));
  } else {
    o.allow_uncertified = true;
    const Nlp dual = kind == DualKind::kWolfe ? build_wolfe_dual(lower, o)
                                              : build_mond_weir_dual(lower, o);
    d = c.dual_point(dual.space);
  }
  const DualityReport r = check_weak_duality(lower, y, d, kind, c.tols.tol, o);
  json j;
  j["dual_kind"] = to_string(r.kind);
  j["primal_point"] = to_json(r.primal_point);
  j["primal_value"] = r.primal_value;
  j["dual_point"] = to_json(r.dual_point);
  j["dual_value"] = r.dual_value;
  j["gap"] = r.gap;
  j["primal_violation"] = r.primal_violation;
  j["dual_violation"] = r.dual_violation;
  j["convex_certified"] = r.convex_certified;
  j["weak_duality_ok"] = r.weak_duality_ok;
  j["verdict"] = r.weak_duality_ok ? "holds" : "violated";
  return {r.weak_duality_ok ? 0 : 1, j, ""};
}

Outcome check_strong(const Context& c) {
  const Eigen::VectorXd x = c.x_only();
  const Nlp lower = lower_level(c.bp(), x);
  const DualKind kind = dual_kind_from(c.opt.kind);
  const CqReport slater = check_slater(lower.inequalities, lower.space, c.cq());
  const StrongDualityReport r = check_strong_duality(lower, kind);
  json j;
  j["dual_kind"] = to_string(r.kind);
  j["primal_status"] = to_string(r.primal_status);
  j["primal_point"] = to_json(r.primal_point);
  j["primal_value"] = r.primal_value;
  j["multipliers"] = to_json(r.multipliers);
  j["dual_value"] = r.dual_value;
  j["dual_violation"] = r.dual_violation;
  j["gap"] = r.gap;
  j["slater"] = to_string(slater.verdict);
  j["verdict"] = r.holds ? "holds" : "violated";
  return {r.holds ? 0 : 1, j, ""};
}

Outcome check_saddle(const Context& c) {
  const auto [x, y] = c.xy();
  const Nlp lower = lower_level(c.bp(), x);
  if (lower.num_constraints() == 0) throw InputError("lower level has no constraints");
  const Eigen::VectorXd u = c.dual_point(VarSpace({{"u", lower.num_constraints()}}));
  const SaddleResult r = check_saddle_point(lower, y, u, c.tols.tol);
  json j;
  j["point"] = to_json(y);
  j["multipliers"] = to_json(u);
  j["kkt_residual"] = r.residual;
  j["verdict"] = r.is_saddle ? "holds" : "violated";
  return {r.is_saddle ? 0 : 1, j, ""};
}

Outcome check_mfcq_cmd(const Context& c) {
  CqReport r;
  json j;
  if (c.opt.kind.empty()) {
    const auto [x, y] = c.xy();
    r = check_mfcq(lower_level(c.bp(), x), y, c.cq());
    j["problem"] = "lower level";
  } else {
    const ReformulatedNlp ref = build_reformulation(c.bp(), parse_reform_kind(c.opt.kind));
    const Eigen::VectorXd w = parse_point(c.require_point(), ref.nlp.space);
    r = check_mfcq(ref, w, c.cq());
    j["problem"] = to_string(ref.kind);
  }
  const json body = cq_json(r);
  j.update(body);
  return {verdict_exit(r.verdict, r.reason), j, ""};
}

ReformulatedNlp ld_only(const Context& c) {
  if (!c.opt.kind.empty() && parse_reform_kind(c.opt.kind) != ReformKind::kLd) {
    throw InputError("check " + c.opt.what + " applies to the ld reformulation only");
  }
  return build_ld_ref(c.bp());
}

Outcome check_nsmfcq_cmd(const Context& c) {
  const ReformulatedNlp ref = ld_only(c);
  const CqReport r = check_nsmfcq_ld(ref, parse_point(c.require_point(), ref.nlp.space), c.cq());
  return {verdict_exit(r.verdict, r.reason), cq_json(r), ""};
}

Outcome check_bcq_cmd(const Context& c) {
  const ReformulatedNlp ref = ld_only(c);
  const CqReport r =
      check_bcq_closed_form(ref, parse_point(c.require_point(), ref.nlp.space), c.cq());
  return {verdict_exit(r.verdict, r.reason), cq_json(r), ""};
}

Outcome check_slater_cmd(const Context& c) {
  const Nlp lower = lower_level(c.bp(), c.x_only());
  const CqReport r = check_slater(lower.inequalities, lower.space, c.cq());
  return {verdict_exit(r.verdict, r.reason), cq_json(r), ""};
}

ReformKind scan_kind(const Context& c) {
  return c.opt.kind.empty() ? ReformKind::kVf : parse_reform_kind(c.opt.kind);
}

Outcome check_local(const Context& c) {
  const ReformulatedNlp ref = build_reformulation(c.bp(), scan_kind(c));
  const Eigen::VectorXd w = parse_point(c.require_point(), ref.nlp.space);
  const LocalCertificate cert = local_min_certificate(GridProblem::from(ref), w, c.tols.radius,
                                                      c.tols.step, 1e-6, c.scan());
  json j;
  j["problem"] = to_string(ref.kind);
  j["verdict"] = to_string(cert.verdict);
  j["point"] = to_json(cert.point);
  j["value"] = cert.value;
  j["radius"] = cert.radius;
  j["step"] = cert.step;
  if (cert.verdict == LocalCertificate::Verdict::kCounterexample) {
    j["witness"] = to_json(cert.witness);
    j["witness_value"] = cert.witness_value;
    j["drop"] = cert.drop;
  }
  return {cert.verdict == LocalCertificate::Verdict::kNoBetterPoint ? 0 : 1, j, ""};
}

Outcome check_global(const Context& c) {
  const ReformulatedNlp ref = build_reformulation(c.bp(), scan_kind(c));
  double radius = kGlobalRadius, step = kGlobalStep;
  if (auto it = c.pf.settings.find("box_radius"); it != c.pf.settings.end()) radius = it->second;
  if (auto it = c.pf.settings.find("box_step"); it != c.pf.settings.end()) step = it->second;
  if (c.opt.radius) radius = *c.opt.radius;
  if (c.opt.step) step = *c.opt.step;
  Box box = Box::uniform(Point::zeros(ref.nlp.space), radius, step);
  if (!c.opt.point.empty()) {
    box.center.values = parse_point(c.opt.point, ref.nlp.space);
  } else {
    for (const auto& blk : ref.nlp.space.blocks()) {
      if (blk.name != "u" && blk.name != "v") continue;
      for (int i = 0; i < blk.dim; ++i) {
        box.center.values[blk.offset + i] = radius / 2;
        box.radius[blk.offset + i] = radius / 2;
      }
    }
  }
  const SolveReport r = brute_force_global(GridProblem::from(ref), box, c.scan());
  const bool found = r.status == SolveStatus::kOptimal;
  json j;
  j["problem"] = to_string(ref.kind);
  j["status"] = to_string(r.status);
  if (found) {
    j["point"] = to_json(r.point);
    j["value"] = r.value;
  }
  j["box"] = {{"center", to_json(box.center.values)},
              {"radius", to_json(box.radius)},
              {"step", to_json(box.step)}};
  j["verdict"] = found ? "found" : "no feasible grid point";
  return {found ? 0 : 1, j, ""};
}

Outcome check_enumerate(const Context& c) {
  const auto [x, y] = c.xy();
  const FiberKind kind = c.opt.kind.empty() ? FiberKind::kEll : parse_fiber_kind(c.opt.kind);
  const KFiber k = enumerate_K(c.bp(), kind, x, y);
  json j;
  j["fiber"] = to_string(k.kind);
  j["blocks"] = k.blocks;
  j["vertices"] = to_json(k.description.vertices);
  j["rays"] = to_json(k.description.rays);
  j["lineality"] = to_json(k.description.lineality);
  json edges = json::array();
  for (const auto& [a, b] : k.description.edges) edges.push_back({a, b});
  j["edges"] = edges;
  if (k.checked_against_multipliers) j["matches_multipliers"] = k.matches_multipliers;
  if (!k.notes.empty()) j["notes"] = k.notes;
  j["empty"] = k.description.empty();
  return {k.description.empty() ? 1 : 0, j, ""};
}

Outcome check_ge(const Context& c) {
  const auto [x, y] = c.xy();
  const GeFeasibility r = ge_ref_feasibility(c.bp(), x, y, c.tols.tol, c.tols.tol_act);
  json j;
  j["feasible"] = r.feasible;
  j["multipliers"] = to_json(r.u);
  j["residual"] = r.residual;
  j["active_set"] = to_json(r.active);
  j["gcq_assumed"] = r.gcq_assumed;
  return {r.feasible ? 0 : 1, j, ""};
}

Outcome check_probe(const Context& c) {
  const auto [x, y] = c.xy();
  const FiberKind kind = c.opt.kind.empty() ? FiberKind::kEll : parse_fiber_kind(c.opt.kind);
  const ProbeReport r = inner_semicompactness_probe(c.bp(), kind, x, y, c.tols.radius);
  json samples = json::array();
  for (const auto& s : r.samples) {
    json e;
    e["x"] = to_json(s.x);
    e["y"] = to_json(s.y);
    e["empty"] = s.empty;
    if (!s.empty) {
      e["min_vertex_norm"] = s.min_vertex_norm;
      e["max_vertex_norm"] = s.max_vertex_norm;
      e["has_rays"] = s.has_rays;
      e["has_lineality"] = s.has_lineality;
    }
    samples.push_back(e);
  }
  json j;
  j["fiber"] = to_string(kind);
  j["bounded_evidence"] = r.bounded_evidence;
  j["unbounded_evidence"] = r.unbounded_evidence;
  j["rays_seen"] = r.rays_seen;
  j["max_vertex_norm"] = r.max_vertex_norm;
  j["samples"] = samples;
  if (!r.note.empty()) j["note"] = r.note;
  const bool ok = r.bounded_evidence && !r.unbounded_evidence;
  return {ok ? 0 : 1, j, ""};
}

const std::map<std::string, std::function<Outcome(const Context&)>>& check_table() {
  static const std::map<std::string, std::function<Outcome(const Context&)>> t{
      {"weak-duality", check_weak},     {"strong-duality", check_strong},
      {"saddle", check_saddle},         {"mfcq", check_mfcq_cmd},
      {"nsmfcq", check_nsmfcq_cmd},     {"bcq", check_bcq_cmd},
      {"slater", check_slater_cmd},     {"local", check_local},
      {"global", check_global},         {"enumerate-K", check_enumerate},
      {"ge-feasible", check_ge},        {"probe-isc", check_probe},
  };
  return t;
}

// --------------------------------------------------------------------------
// reformulate / compare / examples

std::string pad_right(const std::string& s, std::size_t w) {
  return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' ');
}

Outcome reformulate(const CliOptions& opt, const ProblemFile& pf) {
  if (opt.kind.empty()) throw InputError("reformulate needs --kind");
  const ReformKind kind = parse_reform_kind(opt.kind);
  if (kind == ReformKind::kGe) {
    json j;
    j["kind"] = "ge";
    j["emitted"] = false;
    j["message"] =
        "ge is a feasibility-test-only reformulation; no constraints are emitted. "
        "Use 'check ge-feasible' at a point.";
    const CountSummary cs = count_summary(pf.problem, kind);
    j["counts"] = {{"variables", cs.n_vars},
                   {"implicit_variables", cs.n_implicit_vars},
                   {"constraints", cs.n_constraints}};
    return {0, j, j["message"].get<std::string>() + "\n"};
  }
  const ReformulatedNlp r = build_reformulation(pf.problem, kind);
  json vars = json::array();
  for (const auto& b : r.nlp.space.blocks()) {
    vars.push_back({{"block", b.name},
                    {"dim", b.dim},
                    {"provenance", to_string(r.provenance.at(b.name))}});
  }
  json cons = json::array();
  std::string text_cons;
  for (const auto& ec : r.constraints) {
    const Expr& e = ec.equality ? r.nlp.equalities[ec.index] : r.nlp.inequalities[ec.index];
    const std::string rel = ec.equality ? "==" : "<=";
    cons.push_back({{"label", ec.label},
                    {"role", to_string(ec.role)},
                    {"group", ec.group},
                    {"relation", rel + " 0"},
                    {"expr", print(e)}});
    text_cons += "  " + pad_right(ec.label, 18) + print(e) + " " + rel + " 0\n";
  }
  json impl = json::array();
  for (const auto& ic : r.implicit_constraints) {
    std::string args;
    for (const auto& a : ic.arg_blocks) args += (args.empty() ? "" : ",") + a;
    const std::string rhs = ic.name + "(" + args + ")";
    impl.push_back({{"name", ic.name}, {"lhs", print(ic.lhs)}, {"rhs", rhs},
                    {"arg_blocks", ic.arg_blocks}});
    text_cons += "  " + pad_right("implicit", 18) + print(ic.lhs) + " <= " + rhs + "\n";
  }
  const CountSummary cs = count_summary(pf.problem, kind);
  json j;
  j["kind"] = to_string(kind);
  j["variables"] = vars;
  j["objective"] = print(r.nlp.objective);
  j["sense"] = to_string(r.nlp.sense);
  j["constraints"] = cons;
  j["implicit_constraints"] = impl;
  j["scan_order"] = r.scan_order;
  j["closed_form"] = r.closed_form;
  j["notes"] = r.notes;
  j["counts"] = {{"variables", cs.n_vars},
                 {"implicit_variables", cs.n_implicit_vars},
                 {"constraints", cs.n_constraints},
                 {"emitted_logical", r.logical_constraint_count()},
                 {"emitted_literal", r.literal_constraint_count()}};

  std::ostringstream t;
  t << "reformulation: " << to_string(kind) << "\n";
  t << "variables:";
  for (const auto& b : r.nlp.space.blocks()) {
    t << " " << b.name << "[" << b.dim << "] (" << to_string(r.provenance.at(b.name)) << ")";
  }
  t << "\nobjective: " << to_string(r.nlp.sense) << " " << print(r.nlp.objective) << "\n";
  t << "constraints:\n" << text_cons;
  t << "counts: variables " << cs.n_vars << ", implicit variables " << cs.n_implicit_vars
    << ", constraints " << cs.n_constraints << " (emitted rows "
    << r.literal_constraint_count() << ")\n";
  for (const auto& n : r.notes) t << "note: " << n << "\n";
  return {0, j, t.str()};
}

std::array<int, 4> dims_of(const CliOptions& opt, const ProblemFile* pf) {
  if (pf) return {pf->problem.n, pf->problem.m, pf->problem.p, pf->problem.q};
  std::array<int, 4> d{};
  std::stringstream ss(opt.dims);
  std::string tok;
  std::size_t i = 0;
  while (std::getline(ss, tok, ',')) {
    if (i >= 4) throw InputError("--dims expects n,m,p,q");
    int v = -1;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || v < 0) {
      throw InputError("invalid dimension '" + tok + "'");
    }
    d[i++] = v;
  }
  if (i != 4 || d[0] < 1 || d[1] < 1) throw InputError("--dims expects n,m,p,q with n,m >= 1");
  return d;
}

Outcome compare(const CliOptions& opt, const ProblemFile* pf) {
  const auto d = dims_of(opt, pf);
  const std::string yes = "✓", no = "×", pyes = "(✓)", pno = "(×)",
                    none = "−";
  struct Table {
    std::string title;
    std::vector<ReformKind> kinds;
    std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  };
  const std::vector<Table> tables{
      {"standard reformulations",
       {ReformKind::kVf, ReformKind::kKkt, ReformKind::kGe},
       {{"lower-level convexity", {no, yes, yes}},
        {"lower-level differentiability", {no, yes, pyes}},
        {"lower-level regularity", {no, yes, no}},
        {"global equivalence", {yes, yes, yes}},
        {"local equivalence", {yes, pno, yes}},
        {"validity of (NS-)MFCQ", {no, no, none}}}},
      {"duality-based reformulations",
       {ReformKind::kLd, ReformKind::kWd, ReformKind::kMwd},
       {{"lower-level convexity", {yes, yes, yes}},
        {"lower-level differentiability", {yes, yes, yes}},
        {"lower-level regularity", {yes, yes, yes}},
        {"global equivalence", {yes, yes, yes}},
        {"local equivalence", {pno, pno, pno}},
        {"validity of MFCQ", {pno, no, no}}}},
  };
  json out = json::array();
  std::ostringstream t;
  t << "dims: n=" << d[0] << " m=" << d[1] << " p=" << d[2] << " q=" << d[3] << "\n";
  for (const auto& tab : tables) {
    json jt;
    jt["title"] = tab.title;
    json cols = json::array();
    std::vector<CountSummary> cs;
    for (auto k : tab.kinds) {
      cols.push_back(to_string(k));
      cs.push_back(count_summary(d[0], d[1], d[2], d[3], k));
    }
    jt["columns"] = cols;
    json rows = json::array();
    auto count_row = [&](const std::string& label, auto getter) {
      json vals = json::array();
      for (const auto& c : cs) vals.push_back(getter(c));
      rows.push_back({{"label", label}, {"values", vals}});
    };
    count_row("# variables", [](const CountSummary& c) { return c.n_vars; });
    count_row("# implicit variables", [](const CountSummary& c) { return c.n_implicit_vars; });
    count_row("# constraints", [](const CountSummary& c) { return c.n_constraints; });
    for (const auto& [label, vals] : tab.rows) rows.push_back({{"label", label}, {"values", vals}});
    jt["rows"] = rows;
    out.push_back(jt);

    t << "\n" << tab.title << "\n";
    t << pad_right("", 32);
    for (auto k : tab.kinds) t << pad_right(to_string(k), 8);
    t << "\n";
    for (const auto& row : rows) {
      t << pad_right(row["label"].get<std::string>(), 32);
      for (const auto& v : row["values"]) {
        const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
        // Pad by code points so the UTF-8 marks line up.
        std::size_t width = 0;
        for (unsigned char ch : s) width += (ch & 0xC0) != 0x80;
        t << s << std::string(width >= 8 ? 1 : 8 - width, ' ');
      }
      t << "\n";
    }
  }
  json j;
  j["dims"] = {{"n", d[0]}, {"m", d[1]}, {"p", d[2]}, {"q", d[3]}};
  j["tables"] = out;
  return {0, j, t.str()};
}

Outcome examples(const CliOptions& opt) {
  std::vector<std::string> names;
  if (opt.name.empty()) {
    names = example_names();
  } else {
    names.push_back(opt.name);
  }
  ExampleSettings settings;
  settings.workers = opt.workers;
  json arr = json::array();
  bool all = true;
  std::ostringstream t;
  for (const auto& n : names) {
    const ExampleOutcome o = run_example(n, settings);
    json as = json::array();
    t << n << ": " << (o.passed() ? "passed" : "FAILED") << "\n";
    for (const auto& a : o.assertions) {
      as.push_back({{"assertion", a.name}, {"passed", a.passed}});
      t << "  [" << (a.passed ? "ok" : "FAIL") << "] " << a.name << "\n";
    }
    arr.push_back({{"name", n}, {"passed", o.passed()}, {"assertions", as},
                   {"details", o.details}});
    all = all && o.passed();
  }
  json j;
  j["examples"] = arr;
  j["passed"] = all;
  return {all ? 0 : 1, j, t.str()};
}

}  // namespace

std::map<std::string, double> Tolerances::as_map() const {
  return {{"radius", radius}, {"step", step}, {"tol", tol}, {"tol_act", tol_act}};
}

Environment process_environment() {
  Environment env;
  for (const auto& kv : kEnvKeys) {
    if (const char* v = std::getenv(kv[1])) env[kv[1]] = v;
  }
  return env;
}

Tolerances resolve_tolerances(const CliOptions& options,
                              const std::map<std::string, double>& file_settings,
                              const Environment& env) {
  Tolerances t;
  const std::map<std::string, std::pair<double*, const std::optional<double>*>> slots{
      {"tol", {&t.tol, &options.tol}},
      {"tol_act", {&t.tol_act, &options.tol_act}},
      {"step", {&t.step, &options.step}},
      {"radius", {&t.radius, &options.radius}},
  };
  for (const auto& kv : kEnvKeys) {
    const auto& [target, flag] = slots.at(kv[0]);
    if (flag->has_value()) {
      if (!(**flag > 0.0)) throw InputError(std::string("--") + kv[0] + " must be positive");
      *target = **flag;
    } else if (auto it = file_settings.find(kv[0]); it != file_settings.end()) {
      *target = it->second;
    } else if (auto e = env.find(kv[1]); e != env.end()) {
      *target = parse_positive(e->second, kv[1]);
    }
  }
  return t;
}

CommandResult run_command(const CliOptions& options, const Environment& env) {
  CommandResult res;
  try {
    std::optional<ProblemFile> pf;
    if (!options.file.empty()) pf = load_problem_file(options.file);
    const Tolerances tols =
        options.command == "examples"
            ? Tolerances{}
            : resolve_tolerances(options, pf ? pf->settings : std::map<std::string, double>{},
                                 env);
    json echo;
    echo["subcommand"] = options.command;
    if (!options.file.empty()) echo["file"] = options.file;
    if (!options.name.empty()) echo["name"] = options.name;
    if (!options.what.empty()) echo["what"] = options.what;
    if (!options.kind.empty()) echo["kind"] = options.kind;
    if (!options.point.empty()) echo["point"] = options.point;
    if (!options.dual.empty()) echo["dual"] = options.dual;
    if (!options.dims.empty()) echo["dims"] = options.dims;

    Outcome oc;
    std::string inputs;
    if (options.command == "reformulate") {
      if (!pf) throw InputError("reformulate needs a problem file");
      oc = reformulate(options, *pf);
      inputs = pf->text;
    } else if (options.command == "compare") {
      if (!pf && options.dims.empty()) throw InputError("compare needs a problem file or --dims");
      oc = compare(options, pf ? &*pf : nullptr);
      inputs = pf ? pf->text : options.dims;
    } else if (options.command == "examples") {
      oc = examples(options);
      inputs = options.name.empty() ? "all" : options.name;
    } else if (options.command == "check") {
      auto it = check_table().find(options.what);
      if (it == check_table().end()) {
        throw InputError("unknown check '" + options.what + "'");
      }
      if (!pf) throw InputError("check needs a problem file");
      oc = it->second(Context{options, *pf, tols});
      inputs = pf->text;
    } else {
      throw InputError("unknown command '" + options.command + "'");
    }
    res.exit_code = oc.exit_code;
    if (options.json) {
      res.out = dump_json(make_report(echo, inputs, oc.result, tols.as_map()));
    } else if (!oc.text.empty()) {
      res.out = oc.text;
    } else {
      render(oc.result, 0, res.out);
    }
  } catch (const CapabilityError& e) {
    res.exit_code = 2;
    res.err = std::string("capability error: ") + e.what() + "\n";
  } catch (const InputError& e) {
    res.exit_code = 2;
    res.err = std::string("input error: ") + e.what() + "\n";
  } catch (const std::exception& e) {
    res.exit_code = 2;
    res.err = std::string("error: ") + e.what() + "\n";
  }
  return res;
}

}  // namespace bilevel
