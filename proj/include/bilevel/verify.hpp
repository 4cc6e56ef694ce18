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

// Grid oracles for global and local minimality, fibers of the intermediate
// mappings and an inner semicompactness probe.

#ifndef BILEVEL_VERIFY_HPP_
#define BILEVEL_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bilevel/model.hpp"
#include "bilevel/polyhedron.hpp"
#include "bilevel/reform.hpp"

namespace bilevel {

// Grid with points center + j * step, |j * step| <= radius, per coordinate.
struct Box {
  Point center;
  Eigen::VectorXd radius;
  Eigen::VectorXd step;

  static Box uniform(const Point& center, double radius, double step);
  std::uint64_t grid_size() const;  // saturates at UINT64_MAX
};

struct GridProblem {
  VarSpace space;
  Expr objective;
  Sense sense = Sense::kMinimize;
  std::vector<Expr> inequalities;
  std::vector<Expr> equalities;
  std::vector<ImplicitConstraint> implicit;
  std::vector<std::string> scan_order;

  static GridProblem from(const Nlp& nlp);
  static GridProblem from(const ReformulatedNlp& r);
  double violation(const Eigen::VectorXd& w) const;
};

struct ScanOptions {
  double tol = 1e-8;
  int workers = 1;
  std::uint64_t max_nodes = std::uint64_t{1} << 25;
};

// Best feasible grid point. Ties are broken by lexicographic flat order.
SolveReport brute_force_global(const GridProblem& prob, const Box& box,
                               const ScanOptions& options = {});

struct LocalCertificate {
  enum class Verdict { kNoBetterPoint, kCounterexample };
  Verdict verdict = Verdict::kNoBetterPoint;
  Eigen::VectorXd point;
  double value = 0.0;
  Eigen::VectorXd witness;
  double witness_value = 0.0;
  double drop = 0.0;
  double radius = 0.0;
  double step = 0.0;
  int visited = 0;
};
const char* to_string(LocalCertificate::Verdict v);

LocalCertificate local_min_certificate(const GridProblem& prob, const Eigen::VectorXd& pt,
                                       double radius, double step,
                                       double tol_obj = 1e-6,
                                       const ScanOptions& options = {});

enum class FiberKind { kEll, kW, kMw };
const char* to_string(FiberKind k);
FiberKind parse_fiber_kind(const std::string& s);
FiberKind fiber_for(ReformKind k);

struct KFiber {
  FiberKind kind = FiberKind::kEll;
  std::vector<std::string> blocks;  // {"u"} or {"z","u"}
  Polyhedron polyhedron;
  PolyhedronDescription description;
  // kEll only: agreement of the vertex set with the multiplier set.
  bool checked_against_multipliers = false;
  bool matches_multipliers = false;
  std::vector<std::string> notes;
};

KFiber enumerate_K(const BilevelProblem& bp, FiberKind kind, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y, int dim_cap = 6, double tol = 1e-9);

struct QuantifiedEntry {
  std::string source;  // vertex, edge-midpoint, ray, lineality
  Eigen::VectorXd fiber_point;
  LocalCertificate certificate;
};

struct QuantifiedReport {
  ReformKind kind = ReformKind::kLd;
  std::vector<QuantifiedEntry> entries;
  bool all_local = true;
  std::string note;
};

QuantifiedReport quantified_local_check(const BilevelProblem& bp, ReformKind kind,
                                        const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                        double radius, double step, int dim_cap = 6,
                                        const ScanOptions& options = {});

struct ProbeSample {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  bool empty = false;
  double min_vertex_norm = 0.0;
  double max_vertex_norm = 0.0;
  bool has_rays = false;
  bool has_lineality = false;
};

struct ProbeReport {
  bool bounded_evidence = false;
  bool unbounded_evidence = false;
  bool rays_seen = false;
  double max_vertex_norm = 0.0;
  std::vector<ProbeSample> samples;
  std::string note;
};

ProbeReport inner_semicompactness_probe(const BilevelProblem& bp, FiberKind kind,
                                        const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                        double radius, int samples = 4);

}  // namespace bilevel

#endif  // BILEVEL_VERIFY_HPP_
