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

// Deterministic JSON reports.

#ifndef BILEVEL_REPORT_HPP_
#define BILEVEL_REPORT_HPP_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace bilevel {

inline constexpr const char* kToolVersion = "1.0.0";

// Sorted keys, two-space indentation, floats as %.17g; non-finite numbers
// become the strings "inf", "-inf" and "nan".
std::string dump_json(const nlohmann::json& j);

// Formats a double as %.17g.
std::string format_double(double v);

nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const std::vector<Eigen::VectorXd>& vs);
nlohmann::json to_json(const std::vector<int>& v);
nlohmann::json number(double v);

// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

nlohmann::json make_report(const nlohmann::json& command, const std::string& inputs,
                           const nlohmann::json& result,
                           const std::map<std::string, double>& tolerances);

}  // namespace bilevel

#endif  // BILEVEL_REPORT_HPP_
