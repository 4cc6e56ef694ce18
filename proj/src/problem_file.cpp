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

#include "bilevel/problem_file.hpp"

#include <charconv>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "bilevel/errors.hpp"

namespace bilevel {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw InputError("line " + std::to_string(line) + ": " + what);
}

double to_number(const std::string& v, int line) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) fail(line, "expected a number, got '" + v + "'");
  return out;
}

int to_int(const std::string& v, int line) {
  int out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) fail(line, "expected an integer, got '" + v + "'");
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

}  // namespace

ProblemFile parse_problem_file(std::string_view text) {
  static const std::regex indexed(R"(^([gG])\[(\d+)\]$)");
  static const std::set<std::string> numeric{"tol",    "tol_act",    "step",
                                             "radius", "box_radius", "box_step"};
  std::map<std::string, Entry> plain;
  std::map<int, Entry> gs, Gs;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    std::string value = trim(std::string_view(s).substr(eq + 1));
    if (!value.empty() && value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') fail(line, "unterminated quoted value");
      value = value.substr(1, value.size() - 2);
    }
    std::smatch mt;
    if (std::regex_match(key, mt, indexed)) {
      auto& target = mt[1] == "g" ? gs : Gs;
      const int idx = std::stoi(mt[2]);
      if (!target.emplace(idx, Entry{value, line}).second) {
        fail(line, "duplicate key '" + key + "'");
      }
      continue;
    }
    static const std::set<std::string> known{"name", "n", "m", "p", "q", "F", "f"};
    if (!known.count(key) && !numeric.count(key)) fail(line, "unknown key '" + key + "'");
    if (!plain.emplace(key, Entry{value, line}).second) {
      fail(line, "duplicate key '" + key + "'");
    }
  }
  auto need = [&](const std::string& k) -> const Entry& {
    auto it = plain.find(k);
    if (it == plain.end()) throw InputError("missing key '" + k + "'");
    return it->second;
  };
  const int n = to_int(need("n").value, need("n").line);
  const int m = to_int(need("m").value, need("m").line);
  if (n < 1 || m < 1) throw InputError("n and m must be positive");
  auto check_dense = [](const std::map<int, Entry>& entries, const char* what) {
    int expect = 0;
    for (const auto& [i, e] : entries) {
      if (i != expect) fail(e.line, std::string("missing ") + what + "[" +
                                        std::to_string(expect) + "]");
      ++expect;
    }
    return expect;
  };
  const int p = check_dense(gs, "g");
  const int q = check_dense(Gs, "G");
  if (plain.count("p") && to_int(plain["p"].value, plain["p"].line) != p) {
    fail(plain["p"].line, "p does not match the number of g[i] entries");
  }
  if (plain.count("q") && to_int(plain["q"].value, plain["q"].line) != q) {
    fail(plain["q"].line, "q does not match the number of G[i] entries");
  }
  const VarSpace xy({{"x", n}, {"y", m}});
  const VarSpace xs({{"x", n}});
  auto parse_at = [](const Entry& e, const VarSpace& space) {
    try {
      return parse(e.value, space);
    } catch (const InputError& err) {
      fail(e.line, err.what());
    }
  };
  const Expr F = parse_at(need("F"), xy);
  const Expr f = parse_at(need("f"), xy);
  std::vector<Expr> g, G;
  for (const auto& [i, e] : gs) g.push_back(parse_at(e, xy));
  for (const auto& [i, e] : Gs) G.push_back(parse_at(e, xs));
  ProblemFile pf;
  pf.text = std::string(text);
  const std::string name = plain.count("name") ? plain["name"].value : "problem";
  pf.problem = make_bilevel(name, n, m, F, std::move(G), f, std::move(g));
  for (const auto& k : numeric) {
    if (plain.count(k)) {
      const double v = to_number(plain[k].value, plain[k].line);
      if (!(v > 0.0)) fail(plain[k].line, k + " must be positive");
      pf.settings[k] = v;
    }
  }
  return pf;
}

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open problem file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_problem_file(ss.str());
}

namespace {

std::vector<double> number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const std::string t = trim(tok);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    auto [p, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || p != end) {
      throw InputError("invalid number '" + t + "' in point");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

Eigen::VectorXd parse_point(const std::string& text, const VarSpace& space) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.total_dim());
  if (text.find('=') == std::string::npos) {
    const auto vals = number_list(text);
    if (static_cast<int>(vals.size()) != space.total_dim()) {
      throw InputError("point has " + std::to_string(vals.size()) + " values but space " +
                       space.describe() + " needs " + std::to_string(space.total_dim()));
    }
    for (std::size_t i = 0; i < vals.size(); ++i) out[static_cast<Eigen::Index>(i)] = vals[i];
    return out;
  }
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (trim(part).empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw InputError("expected 'block=values' in point");
    const std::string name = trim(std::string_view(part).substr(0, eq));
    const auto& blk = space.block(name);
    if (!seen.insert(name).second) throw InputError("block '" + name + "' given twice");
    const auto vals = number_list(part.substr(eq + 1));
    if (static_cast<int>(vals.size()) != blk.dim) {
      throw InputError("block '" + name + "' expects " + std::to_string(blk.dim) + " values");
    }
    for (int i = 0; i < blk.dim; ++i) out[blk.offset + i] = vals[static_cast<std::size_t>(i)];
  }
  for (const auto& blk : space.blocks()) {
    if (!seen.count(blk.name)) throw InputError("point is missing block '" + blk.name + "'");
  }
  return out;
}

std::string write_problem_file(const BilevelProblem& bp) {
  std::ostringstream out;
  out << "name = " << bp.name << "\n";
  out << "n = " << bp.n << "\nm = " << bp.m << "\n";
  out << "F = \"" << print(bp.F) << "\"\n";
  out << "f = \"" << print(bp.f) << "\"\n";
  for (int i = 0; i < bp.q; ++i) out << "G[" << i << "] = \"" << print(bp.G[i]) << "\"\n";
  for (int i = 0; i < bp.p; ++i) out << "g[" << i << "] = \"" << print(bp.g[i]) << "\"\n";
  return out.str();
}

}  // namespace bilevel
