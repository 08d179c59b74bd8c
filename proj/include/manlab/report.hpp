// Copyright 2026 The manlab Authors
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

// Run reports: JSON serialization (lossless, round-trips) and CSV tables.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "manlab/errors.hpp"
#include "manlab/man.hpp"
#include "manlab/protocol.hpp"

namespace manlab {

struct InputRecord {
  std::string label;
  StructuralSummary summary;
};

struct ResultRecord {
  std::string label;   ///< which inputs, e.g. "a:b"
  std::string method;  ///< operation that produced the numbers
  std::optional<double> s;
  std::optional<double> s2;  ///< in the report's log base
  std::optional<double> std_error;
  std::optional<int> samples;
  std::optional<int> shots;
  std::optional<Bounds> bounds;  ///< log bounds in the report's log base
  std::vector<std::pair<std::string, double>> values;
};

struct RunReport {
  std::vector<std::string> command;
  std::string log_base = "2";
  std::uint64_t seed = 0;
  std::vector<InputRecord> inputs;
  std::vector<ResultRecord> results;
  double wall_time_s = 0.0;
};

namespace detail {

using nlohmann::json;

/// Doubles as JSON numbers; non-finite values as the strings "inf", "-inf", "nan".
inline json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::invalid_argument("report: expected a number");
}

inline json optional_number(const std::optional<double>& v) { return v ? number_to_json(*v) : json(nullptr); }

inline std::optional<double> optional_number_from(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return number_from_json(j[key]);
}

inline std::optional<int> optional_int_from(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<int>();
}

inline json pairs_to_json(const std::vector<std::pair<std::string, double>>& v) {
  json out = json::array();
  for (const auto& [k, x] : v) out.push_back({{"name", k}, {"value", number_to_json(x)}});
  return out;
}

inline std::vector<std::pair<std::string, double>> pairs_from_json(const json& j) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& e : j) out.emplace_back(e.at("name").get<std::string>(), number_from_json(e.at("value")));
  return out;
}

inline json bounds_to_json(const Bounds& b) {
  return {{"commutant_bound", number_to_json(b.commutant_bound)},
          {"weak_bound", number_to_json(b.weak_bound)},
          {"intersection_bound", optional_number(b.intersection_bound)},
          {"log_commutant_bound", number_to_json(b.log_commutant_bound)},
          {"log_weak_bound", number_to_json(b.log_weak_bound)},
          {"log_intersection_bound", optional_number(b.log_intersection_bound)}};
}

inline Bounds bounds_from_json(const json& j) {
  Bounds b;
  b.commutant_bound = number_from_json(j.at("commutant_bound"));
  b.weak_bound = number_from_json(j.at("weak_bound"));
  b.intersection_bound = optional_number_from(j, "intersection_bound");
  b.log_commutant_bound = number_from_json(j.at("log_commutant_bound"));
  b.log_weak_bound = number_from_json(j.at("log_weak_bound"));
  b.log_intersection_bound = optional_number_from(j, "log_intersection_bound");
  return b;
}

inline json summary_to_json(const StructuralSummary& s) {
  json blocks = json::array();
  for (auto [n, d] : s.blocks) blocks.push_back({n, d});
  return {{"dim", s.dim},           {"d_center", s.d_center},   {"d_algebra", s.d_algebra},
          {"d_commutant", s.d_commutant}, {"blocks", blocks}, {"collinear", s.collinear},
          {"ratio", optional_number(s.ratio)}};
}

inline StructuralSummary summary_from_json(const json& j) {
  StructuralSummary s;
  s.dim = j.at("dim").get<int>();
  s.d_center = j.at("d_center").get<int>();
  s.d_algebra = j.at("d_algebra").get<int>();
  s.d_commutant = j.at("d_commutant").get<int>();
  for (const auto& b : j.at("blocks")) s.blocks.emplace_back(b.at(0).get<int>(), b.at(1).get<int>());
  s.collinear = j.at("collinear").get<bool>();
  s.ratio = optional_number_from(j, "ratio");
  return s;
}

}  // namespace detail

inline nlohmann::json report_to_json(const RunReport& r) {
  using detail::json;
  json inputs = json::array();
  for (const auto& in : r.inputs) inputs.push_back({{"label", in.label}, {"structure", detail::summary_to_json(in.summary)}});
  json results = json::array();
  for (const auto& res : r.results) {
    results.push_back({{"label", res.label},
                       {"method", res.method},
                       {"S", detail::optional_number(res.s)},
                       {"S2", detail::optional_number(res.s2)},
                       {"std_error", detail::optional_number(res.std_error)},
                       {"samples", res.samples ? json(*res.samples) : json(nullptr)},
                       {"shots", res.shots ? json(*res.shots) : json(nullptr)},
                       {"bounds", res.bounds ? detail::bounds_to_json(*res.bounds) : json(nullptr)},
                       {"values", detail::pairs_to_json(res.values)}});
  }
  return {{"command", r.command}, {"log_base", r.log_base}, {"seed", r.seed},         {"inputs", inputs},
          {"results", results},   {"wall_time_s", detail::number_to_json(r.wall_time_s)}};
}

inline RunReport report_from_json(const nlohmann::json& j) {
  RunReport r;
  r.command = j.at("command").get<std::vector<std::string>>();
  r.log_base = j.at("log_base").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& in : j.at("inputs")) {
    r.inputs.push_back({in.at("label").get<std::string>(), detail::summary_from_json(in.at("structure"))});
  }
  for (const auto& e : j.at("results")) {
    ResultRecord res;
    res.label = e.at("label").get<std::string>();
    res.method = e.at("method").get<std::string>();
    res.s = detail::optional_number_from(e, "S");
    res.s2 = detail::optional_number_from(e, "S2");
    res.std_error = detail::optional_number_from(e, "std_error");
    res.samples = detail::optional_int_from(e, "samples");
    res.shots = detail::optional_int_from(e, "shots");
    if (e.contains("bounds") && !e["bounds"].is_null()) res.bounds = detail::bounds_from_json(e["bounds"]);
    res.values = detail::pairs_from_json(e.at("values"));
    r.results.push_back(std::move(res));
  }
  r.wall_time_s = detail::number_from_json(j.at("wall_time_s"));
  return r;
}

/// Shortest decimal that round-trips; empty for absent values.
inline std::string format_number(const std::optional<double>& v) {
  if (!v) return "";
  if (!std::isfinite(*v)) return std::isnan(*v) ? "nan" : (*v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), *v);
  return std::string(buf, res.ptr);
}

inline constexpr const char* kCsvHeader = "inputs,method,S,S2,commutant_bound,intersection_bound,weak_bound,std_error,samples,seed";

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void write_csv(const RunReport& r, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& res : r.results) {
    std::optional<double> cb;
    std::optional<double> ib;
    std::optional<double> wb;
    if (res.bounds) {
      cb = res.bounds->commutant_bound;
      ib = res.bounds->intersection_bound;
      wb = res.bounds->weak_bound;
    }
    out << detail::csv_field(res.label) << ',' << detail::csv_field(res.method) << ',' << format_number(res.s) << ','
        << format_number(res.s2) << ',' << format_number(cb) << ',' << format_number(ib) << ',' << format_number(wb)
        << ',' << format_number(res.std_error) << ',' << (res.samples ? std::to_string(*res.samples) : "") << ','
        << r.seed << '\n';
  }
}

inline void emit_csv(const RunReport& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write CSV file '" + path + "'");
  write_csv(r, out);
  out.flush();
  if (!out) throw std::runtime_error("error while writing CSV file '" + path + "'");
}

}  // namespace manlab
