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

// JSON algebra specifications.
//
//   {"kind": "full", "dim": 2}
//   {"kind": "trivial", "dim": 3}
//   {"kind": "structural", "dim": 3, "blocks": [[1, 1], [1, 2]], "basis_change": M}
//   {"kind": "masa", "dim": 2, "unitary": M}
//   {"kind": "lattice", "site_dims": [2, 2, 2], "region": [1, 2]}
//   {"kind": "generators", "dim": 4, "generators": [M, ...]}
//
// M is a row-major array of rows; entries are [re, im] pairs (a bare number
// is read as a real entry). Lattice regions are 1-based. An optional "name"
// labels the algebra in reports.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "manlab/algebra.hpp"
#include "manlab/errors.hpp"
#include "manlab/matrix.hpp"

namespace manlab {

inline constexpr int kMaxAmbientDim = 64;

/// Invalid specification, with the offending location.
class SpecError : public std::invalid_argument {
 public:
  SpecError(const std::string& where, const std::string& what)
      : std::invalid_argument(where.empty() ? what : where + ": " + what), where_(where), message_(what) {}
  [[nodiscard]] const std::string& where() const { return where_; }
  [[nodiscard]] const std::string& message() const { return message_; }

 private:
  std::string where_;
  std::string message_;
};

struct GeneratorsPayload {
  std::vector<CMatrix> generators;
};
struct StructuralPayload {
  std::vector<std::pair<int, int>> blocks;  ///< (n_J, d_J)
  std::optional<CMatrix> basis_change;
};
struct MasaPayload {
  CMatrix unitary;  ///< columns are the basis vectors
};
struct LatticePayload {
  std::vector<int> site_dims;
  std::vector<int> region;  ///< 1-based site indices
};
struct FullPayload {};
struct TrivialPayload {};

using SpecPayload =
    std::variant<GeneratorsPayload, StructuralPayload, MasaPayload, LatticePayload, FullPayload, TrivialPayload>;

struct AlgebraSpec {
  int dim = 0;
  std::optional<std::string> name;
  SpecPayload payload;

  [[nodiscard]] std::string kind() const {
    static const char* names[] = {"generators", "structural", "masa", "lattice", "full", "trivial"};
    return names[payload.index()];
  }
};

namespace detail {

inline bool same_matrix(const CMatrix& a, const CMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

inline bool same_payload(const GeneratorsPayload& a, const GeneratorsPayload& b) {
  return std::equal(a.generators.begin(), a.generators.end(), b.generators.begin(), b.generators.end(), same_matrix);
}
inline bool same_payload(const StructuralPayload& a, const StructuralPayload& b) {
  if (a.blocks != b.blocks || a.basis_change.has_value() != b.basis_change.has_value()) return false;
  return !a.basis_change || same_matrix(*a.basis_change, *b.basis_change);
}
inline bool same_payload(const MasaPayload& a, const MasaPayload& b) { return same_matrix(a.unitary, b.unitary); }
inline bool same_payload(const LatticePayload& a, const LatticePayload& b) {
  return a.site_dims == b.site_dims && a.region == b.region;
}
inline bool same_payload(const FullPayload&, const FullPayload&) { return true; }
inline bool same_payload(const TrivialPayload&, const TrivialPayload&) { return true; }

}  // namespace detail

inline bool operator==(const AlgebraSpec& a, const AlgebraSpec& b) {
  if (a.dim != b.dim || a.name != b.name || a.payload.index() != b.payload.index()) return false;
  return std::visit(
      [&](const auto& pa) {
        using T = std::decay_t<decltype(pa)>;
        return detail::same_payload(pa, std::get<T>(b.payload));
      },
      a.payload);
}

namespace detail {

using nlohmann::json;

inline std::string pointer(const std::string& base, const std::string& key) { return base + "/" + key; }
inline std::string pointer(const std::string& base, std::size_t index) { return base + "/" + std::to_string(index); }

inline const json& field(const json& obj, const std::string& base, const std::string& key) {
  if (!obj.contains(key)) throw SpecError(pointer(base, key), "missing required field");
  return obj.at(key);
}

inline int read_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SpecError(where, "expected an integer");
  return j.get<int>();
}

inline std::vector<int> read_int_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw SpecError(where, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_int(j[i], pointer(where, i)));
  return out;
}

inline cplx read_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw SpecError(where, "expected a complex number [re, im]");
}

inline CMatrix read_matrix(const json& j, const std::string& where, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw SpecError(where, "expected " + std::to_string(dim) + " rows");
  }
  CMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    const std::string rw = pointer(where, static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<int>(row.size()) != dim) {
      throw SpecError(rw, "expected " + std::to_string(dim) + " entries");
    }
    for (int c = 0; c < dim; ++c) m(r, c) = read_complex(row[static_cast<std::size_t>(c)], pointer(rw, static_cast<std::size_t>(c)));
  }
  return m;
}

inline json write_matrix(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void check_unitary(const CMatrix& m, const std::string& where) {
  if (unitarity_defect(m) > 1e-9) throw SpecError(where, "matrix is not unitary");
}

/// 1-based line number of a byte offset.
inline std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace detail

struct SpecOptions {
  bool allow_large = false;
};

/// Validates and converts a parsed JSON value; `base` prefixes field pointers.
inline AlgebraSpec spec_from_json(const nlohmann::json& j, const SpecOptions& opts = {}, const std::string& base = "") {
  using detail::field;
  using detail::pointer;
  if (!j.is_object()) throw SpecError(base.empty() ? "/" : base, "specification must be a JSON object");
  const auto& kind_j = field(j, base, "kind");
  if (!kind_j.is_string()) throw SpecError(pointer(base, "kind"), "expected a string");
  const std::string kind = kind_j.get<std::string>();

  AlgebraSpec spec;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw SpecError(pointer(base, "name"), "expected a string");
    spec.name = j["name"].get<std::string>();
  }

  if (kind == "lattice") {
    LatticePayload p;
    p.site_dims = detail::read_int_list(field(j, base, "site_dims"), pointer(base, "site_dims"));
    p.region = detail::read_int_list(field(j, base, "region"), pointer(base, "region"));
    if (p.site_dims.empty()) throw SpecError(pointer(base, "site_dims"), "at least one site is required");
    long long prod = 1;
    for (std::size_t i = 0; i < p.site_dims.size(); ++i) {
      if (p.site_dims[i] < 1) throw SpecError(pointer(pointer(base, "site_dims"), i), "site dimension must be positive");
      prod *= p.site_dims[i];
      if (prod > (1LL << 30)) throw SpecError(pointer(base, "site_dims"), "ambient dimension overflow");
    }
    std::vector<int> seen;
    for (std::size_t i = 0; i < p.region.size(); ++i) {
      const int r = p.region[i];
      if (r < 1 || r > static_cast<int>(p.site_dims.size())) {
        throw SpecError(pointer(pointer(base, "region"), i), "site index out of range (indices are 1-based)");
      }
      if (std::find(seen.begin(), seen.end(), r) != seen.end()) {
        throw SpecError(pointer(pointer(base, "region"), i), "duplicate site index");
      }
      seen.push_back(r);
    }
    spec.dim = static_cast<int>(prod);
    if (j.contains("dim") && detail::read_int(j["dim"], pointer(base, "dim")) != spec.dim) {
      throw SpecError(pointer(base, "dim"), "does not match the product of site_dims");
    }
    spec.payload = std::move(p);
  } else {
    spec.dim = detail::read_int(field(j, base, "dim"), pointer(base, "dim"));
    if (spec.dim < 1) throw SpecError(pointer(base, "dim"), "dimension must be positive");
  }
  if (spec.dim > kMaxAmbientDim && !opts.allow_large) {
    throw SpecError(pointer(base, "dim"), "ambient dimension " + std::to_string(spec.dim) + " exceeds " +
                                              std::to_string(kMaxAmbientDim) + " (use --allow-large)");
  }

  if (kind == "lattice") {
    // done above
  } else if (kind == "full") {
    spec.payload = FullPayload{};
  } else if (kind == "trivial") {
    spec.payload = TrivialPayload{};
  } else if (kind == "structural") {
    StructuralPayload p;
    const auto& blocks = field(j, base, "blocks");
    const std::string bw = pointer(base, "blocks");
    if (!blocks.is_array() || blocks.empty()) throw SpecError(bw, "expected a non-empty array of [n, d] pairs");
    int total = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto pair = detail::read_int_list(blocks[i], pointer(bw, i));
      if (pair.size() != 2 || pair[0] < 1 || pair[1] < 1) {
        throw SpecError(pointer(bw, i), "expected a pair [n, d] of positive integers");
      }
      p.blocks.emplace_back(pair[0], pair[1]);
      total += pair[0] * pair[1];
    }
    if (total != spec.dim) {
      throw SpecError(bw, "sum of n*d over blocks is " + std::to_string(total) + ", expected dim " +
                              std::to_string(spec.dim));
    }
    if (j.contains("basis_change")) {
      p.basis_change = detail::read_matrix(j["basis_change"], pointer(base, "basis_change"), spec.dim);
      detail::check_unitary(*p.basis_change, pointer(base, "basis_change"));
    }
    spec.payload = std::move(p);
  } else if (kind == "masa") {
    MasaPayload p{detail::read_matrix(field(j, base, "unitary"), pointer(base, "unitary"), spec.dim)};
    detail::check_unitary(p.unitary, pointer(base, "unitary"));
    spec.payload = std::move(p);
  } else if (kind == "generators") {
    GeneratorsPayload p;
    const auto& gens = field(j, base, "generators");
    const std::string gw = pointer(base, "generators");
    if (!gens.is_array()) throw SpecError(gw, "expected an array of matrices");
    for (std::size_t i = 0; i < gens.size(); ++i) p.generators.push_back(detail::read_matrix(gens[i], pointer(gw, i), spec.dim));
    spec.payload = std::move(p);
  } else {
    throw SpecError(pointer(base, "kind"), "unknown kind '" + kind + "'");
  }
  return spec;
}

inline nlohmann::json spec_to_json(const AlgebraSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind();
  j["dim"] = spec.dim;
  if (spec.name) j["name"] = *spec.name;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GeneratorsPayload>) {
          j["generators"] = nlohmann::json::array();
          for (const auto& g : p.generators) j["generators"].push_back(detail::write_matrix(g));
        } else if constexpr (std::is_same_v<T, StructuralPayload>) {
          j["blocks"] = nlohmann::json::array();
          for (auto [n, d] : p.blocks) j["blocks"].push_back({n, d});
          if (p.basis_change) j["basis_change"] = detail::write_matrix(*p.basis_change);
        } else if constexpr (std::is_same_v<T, MasaPayload>) {
          j["unitary"] = detail::write_matrix(p.unitary);
        } else if constexpr (std::is_same_v<T, LatticePayload>) {
          j["site_dims"] = p.site_dims;
          j["region"] = p.region;
        }
      },
      spec.payload);
  return j;
}

/// Parses JSON text; syntax errors report the line.
inline nlohmann::json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(source + ":" + std::to_string(detail::line_of(text, e.byte > 0 ? e.byte - 1 : 0)),
                    "malformed JSON: " + std::string(e.what()));
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline AlgebraSpec parse_spec_text(const std::string& text, const std::string& source = "<input>",
                                   const SpecOptions& opts = {}) {
  const auto j = parse_json_text(text, source);
  try {
    return spec_from_json(j, opts);
  } catch (const SpecError& e) {
    throw SpecError(source + ":" + e.where(), e.message());
  }
}

inline AlgebraSpec parse_spec(const std::string& path, const SpecOptions& opts = {}) {
  return parse_spec_text(read_text_file(path), path, opts);
}

/// Builds the algebra a specification describes.
inline OperatorAlgebra build_algebra(const AlgebraSpec& spec) {
  return std::visit(
      [&](const auto& p) -> OperatorAlgebra {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GeneratorsPayload>) {
          return algebra_from_generators(p.generators, spec.dim);
        } else if constexpr (std::is_same_v<T, StructuralPayload>) {
          return structural_algebra(p.blocks, p.basis_change);
        } else if constexpr (std::is_same_v<T, MasaPayload>) {
          return masa_algebra(p.unitary);
        } else if constexpr (std::is_same_v<T, LatticePayload>) {
          std::vector<int> region;
          for (int r : p.region) region.push_back(r - 1);
          return lattice_algebra(p.site_dims, region);
        } else if constexpr (std::is_same_v<T, FullPayload>) {
          return full_algebra(spec.dim);
        } else {
          return trivial_algebra(spec.dim);
        }
      },
      spec.payload);
}

/// Short label: the name if given, else the kind and dimension.
inline std::string spec_label(const AlgebraSpec& spec) {
  if (spec.name) return *spec.name;
  return spec.kind() + "(" + std::to_string(spec.dim) + ")";
}

}  // namespace manlab
