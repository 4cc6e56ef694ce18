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

#include "bilevel/report.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>

namespace bilevel {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write(const nlohmann::json& j, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  const std::string inner(indent + 2, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner;
        out += nlohmann::json(it.key()).dump();
        out += ": ";
        write(it.value(), indent + 2, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalar = true;
      for (const auto& e : j) scalar = scalar && !e.is_structured();
      if (scalar) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write(j[i], indent, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        write(j[i], indent + 2, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isnan(v)) {
        out += "\"nan\"";
      } else if (std::isinf(v)) {
        out += v > 0 ? "\"inf\"" : "\"-inf\"";
      } else {
        out += format_double(v == 0.0 ? 0.0 : v);
      }
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j) {
  std::string out;
  write(j, 0, out);
  out += "\n";
  return out;
}

nlohmann::json number(double v) { return nlohmann::json(v); }

nlohmann::json to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

nlohmann::json to_json(const std::vector<Eigen::VectorXd>& vs) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& v : vs) a.push_back(to_json(v));
  return a;
}

nlohmann::json to_json(const std::vector<int>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i : v) a.push_back(i);
  return a;
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

nlohmann::json make_report(const nlohmann::json& command, const std::string& inputs,
                           const nlohmann::json& result,
                           const std::map<std::string, double>& tolerances) {
  nlohmann::json r;
  r["command"] = command;
  r["inputs_digest"] = fnv1a_hex(inputs);
  r["result"] = result;
  nlohmann::json t = nlohmann::json::object();
  for (const auto& [k, v] : tolerances) t[k] = v;
  r["tolerances"] = t;
  r["version"] = kToolVersion;
  return r;
}

}  // namespace bilevel
