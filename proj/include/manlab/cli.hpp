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

// The `manlab` command line. Every subcommand prints a JSON run report on
// stdout; --csv adds a table. Exit codes: 0 success, 1 numerical failure,
// 2 usage or input error, 3 bound violation found by markov-check.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "manlab/algebra.hpp"
#include "manlab/errors.hpp"
#include "manlab/man.hpp"
#include "manlab/protocol.hpp"
#include "manlab/report.hpp"
#include "manlab/spec_io.hpp"

namespace manlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitViolation = 3;

struct Options {
  std::vector<std::string> specs;
  std::string method = "omega";
  std::optional<int> samples;
  std::optional<int> shots;
  std::optional<std::uint64_t> seed;
  std::vector<double> epsilons;
  int state_samples = 32;
  std::string csv;
  std::string log_base = "2";
  bool quiet = false;
  bool allow_large = false;
  bool exact = false;
  std::vector<int> site_dims;
  std::vector<int> s1;
  std::vector<int> s2;
};

/// Seed from the flag, else MANLAB_SEED, else 1.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MANLAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw SpecError("MANLAB_SEED", "not an unsigned integer");
    }
  }
  return 1;
}

namespace detail {

struct Loaded {
  AlgebraSpec spec;
  std::string label;
  OperatorAlgebra algebra;
};

class Session {
 public:
  Session(Options opts, std::vector<std::string> command)
      : opts_(std::move(opts)), base_(opts_.log_base == "e" ? LogBase::e : LogBase::two) {
    report_.command = std::move(command);
    report_.log_base = opts_.log_base;
    report_.seed = resolve_seed(opts_.seed);
  }

  [[nodiscard]] const Options& opts() const { return opts_; }
  [[nodiscard]] RngStream rng() const { return RngStream(report_.seed); }
  RunReport& report() { return report_; }

  Loaded load_spec(const AlgebraSpec& spec, const std::string& fallback_label) {
    Loaded l{spec, spec.name.value_or(fallback_label), build_algebra(spec)};
    if (!opts_.quiet) report_.inputs.push_back({l.label, summarize(l.algebra)});
    return l;
  }

  Loaded load(const std::string& path) {
    const auto spec = parse_spec(path, {opts_.allow_large});
    return load_spec(spec, std::filesystem::path(path).stem().string());
  }

  std::vector<Loaded> load_specs(std::size_t count, const char* what) {
    if (opts_.specs.size() != count) {
      throw SpecError("", std::string(what) + " expects " + std::to_string(count) + " specification file(s), got " +
                              std::to_string(opts_.specs.size()));
    }
    std::vector<Loaded> out;
    for (const auto& p : opts_.specs) out.push_back(load(p));
    return out;
  }

  [[nodiscard]] double log_value(double bits) const { return from_bits(bits, base_); }

  [[nodiscard]] std::vector<std::pair<std::string, double>> convert_details(
      const std::vector<std::pair<std::string, double>>& in) const {
    auto out = in;
    for (auto& [k, v] : out) {
      if (k.rfind("s2", 0) == 0 || k.rfind("nc2", 0) == 0) v = log_value(v);
    }
    return out;
  }

  [[nodiscard]] Bounds convert(Bounds b) const {
    b.log_commutant_bound = log_value(b.log_commutant_bound);
    b.log_weak_bound = log_value(b.log_weak_bound);
    if (b.log_intersection_bound) b.log_intersection_bound = log_value(*b.log_intersection_bound);
    return b;
  }

  [[nodiscard]] ResultRecord record(const std::string& label, const ManReport& m) const {
    ResultRecord r;
    r.label = label;
    r.method = m.method;
    r.s = m.s;
    r.s2 = log_value(m.s2);
    if (m.bounds) r.bounds = convert(*m.bounds);
    r.values = convert_details(m.details);
    return r;
  }

  [[nodiscard]] ResultRecord record(const std::string& label, const EstimatorResult& e) const {
    ResultRecord r;
    r.label = label;
    r.method = e.method;
    r.s = e.estimate;
    r.s2 = log_value(log_man(std::clamp(e.estimate, 0.0, 1.0)));
    r.std_error = e.std_error;
    if (e.samples > 0) r.samples = e.samples;
    r.shots = e.shots;
    r.values = convert_details(e.details);
    return r;
  }

  void add(ResultRecord r) { report_.results.push_back(std::move(r)); }

 private:
  Options opts_;
  LogBase base_;
  RunReport report_;
};

inline std::string pair_label(const Loaded& a, const Loaded& b) { return a.label + ":" + b.label; }

inline int samples_or(const Options& o, int fallback) { return o.samples.value_or(fallback); }

/// One MAN evaluation by method name, with bounds attached.
inline ResultRecord evaluate_pair(Session& s, const Loaded& a, const Loaded& b, const std::string& method) {
  const std::string label = pair_label(a, b);
  ResultRecord r;
  if (method == "omega") {
    r = s.record(label, man_omega(a.algebra, b.algebra));
  } else if (method == "projection") {
    r = s.record(label, man_projection(a.algebra, b.algebra));
  } else if (method == "collinear") {
    r = s.record(label, man_collinear(a.algebra, b.algebra));
  } else if (method == "entropy") {
    r = s.record(label, entropy_decomposition_man(a.algebra, b.algebra).report);
  } else if (method == "mc") {
    r = s.record(label, mc_man_direct(a.algebra, b.algebra, samples_or(s.opts(), 10000), s.rng()));
  } else {
    throw SpecError("--method", "unknown method '" + method + "'");
  }
  r.bounds = s.convert(man_bounds(a.algebra, b.algebra));
  return r;
}

inline void cmd_analyze(Session& s) {
  if (s.opts().specs.empty()) throw SpecError("", "analyze expects at least one specification file");
  for (const auto& path : s.opts().specs) {
    const auto l = s.load(path);
    const auto sum = summarize(l.algebra);
    ResultRecord r;
    r.label = l.label;
    r.method = "analyze";
    r.values = {{"dim", sum.dim},
                {"d_algebra", sum.d_algebra},
                {"d_commutant", sum.d_commutant},
                {"d_center", sum.d_center},
                {"collinear", sum.collinear ? 1.0 : 0.0}};
    if (sum.ratio) r.values.emplace_back("ratio", *sum.ratio);
    for (std::size_t j = 0; j < sum.blocks.size(); ++j) {
      r.values.emplace_back("block" + std::to_string(j) + "_n", sum.blocks[j].first);
      r.values.emplace_back("block" + std::to_string(j) + "_d", sum.blocks[j].second);
    }
    s.add(std::move(r));
  }
}

inline void cmd_man(Session& s) {
  const auto in = s.load_specs(2, "man");
  s.add(evaluate_pair(s, in[0], in[1], s.opts().method));
}

inline void cmd_selfman(Session& s) {
  if (s.opts().specs.empty()) throw SpecError("", "selfman expects at least one specification file");
  for (const auto& path : s.opts().specs) {
    const auto l = s.load(path);
    s.add(s.record(l.label, self_man(l.algebra)));
  }
}

inline void cmd_bounds(Session& s) {
  const auto in = s.load_specs(2, "bounds");
  ResultRecord r = s.record(pair_label(in[0], in[1]), man_omega(in[0].algebra, in[1].algebra));
  r.method = "bounds";
  r.bounds = s.convert(man_bounds(in[0].algebra, in[1].algebra));
  s.add(std::move(r));
}

inline void cmd_orbit(Session& s) {
  const auto in = s.load_specs(2, "orbit-avg");
  ResultRecord r;
  r.label = pair_label(in[0], in[1]);
  r.method = "orbit-average";
  r.s = orbit_averaged_man(in[0].algebra, in[1].algebra);
  r.s2 = s.log_value(log_man(*r.s));
  s.add(std::move(r));
  if (s.opts().samples && *s.opts().samples > 0) {
    s.add(s.record(pair_label(in[0], in[1]), mc_orbit_average(in[0].algebra, in[1].algebra, *s.opts().samples, s.rng())));
  }
}

inline std::vector<int> zero_based(const std::vector<int>& region, std::size_t sites, const char* what) {
  std::vector<int> out;
  for (int r : region) {
    if (r < 1 || r > static_cast<int>(sites)) throw SpecError(what, "site index out of range (indices are 1-based)");
    out.push_back(r - 1);
  }
  return out;
}

inline void cmd_lattice(Session& s) {
  std::vector<int> dims;
  std::vector<int> r1;
  std::vector<int> r2;
  std::string label;
  if (!s.opts().specs.empty()) {
    const auto in = s.load_specs(2, "lattice");
    const auto* p1 = std::get_if<LatticePayload>(&in[0].spec.payload);
    const auto* p2 = std::get_if<LatticePayload>(&in[1].spec.payload);
    if (p1 == nullptr || p2 == nullptr) throw SpecError("", "lattice expects two specifications of kind lattice");
    if (p1->site_dims != p2->site_dims) throw SpecError("", "lattice specifications use different sites");
    dims = p1->site_dims;
    r1 = zero_based(p1->region, dims.size(), "/region");
    r2 = zero_based(p2->region, dims.size(), "/region");
    label = pair_label(in[0], in[1]);
  } else {
    if (s.opts().site_dims.empty()) throw SpecError("--site-dims", "give two lattice specs or --site-dims with --s1/--s2");
    dims = s.opts().site_dims;
    r1 = zero_based(s.opts().s1, dims.size(), "--s1");
    r2 = zero_based(s.opts().s2, dims.size(), "--s2");
    label = "lattice";
  }
  ResultRecord r = s.record(label, lattice_man(dims, r1, r2));
  long long dim = 1;
  for (int k : dims) dim *= k;
  if (dim <= kMaxAmbientDim || s.opts().allow_large) {
    r.values.emplace_back("omega_form", man_omega(lattice_algebra(dims, r1), lattice_algebra(dims, r2)).s);
  }
  s.add(std::move(r));
}

inline const CMatrix& masa_unitary(const Loaded& l, const char* what) {
  const auto* p = std::get_if<MasaPayload>(&l.spec.payload);
  if (p == nullptr) throw SpecError(l.label, std::string(what) + " expects specifications of kind masa");
  return p->unitary;
}

inline void cmd_masa(Session& s) {
  const auto in = s.load_specs(2, "masa");
  ResultRecord r = s.record(pair_label(in[0], in[1]), masa_man(masa_unitary(in[0], "masa"), masa_unitary(in[1], "masa")));
  r.values.emplace_back("omega_form", man_omega(in[0].algebra, in[1].algebra).s);
  s.add(std::move(r));
}

inline void cmd_quantumness(Session& s) {
  const auto in = s.load_specs(2, "quantumness");
  const auto q = quantumness(masa_unitary(in[0], "quantumness"), masa_unitary(in[1], "quantumness"));
  ResultRecord r;
  r.label = pair_label(in[0], in[1]);
  r.method = "quantumness";
  r.s = q.s;
  r.s2 = s.log_value(log_man(q.s));
  r.values = {{"Q", q.q},
              {"dQ", q.q * in[0].spec.dim},
              {"lower_bound_holds", q.lower_holds ? 1.0 : 0.0},
              {"upper_bound_holds", q.upper_holds ? 1.0 : 0.0}};
  s.add(std::move(r));
}

inline void cmd_aotoc(Session& s) {
  if (s.opts().specs.size() != 2) throw SpecError("", "aotoc expects a specification file and a unitary (file or 'haar')");
  const auto a = s.load(s.opts().specs[0]);
  const std::string& src = s.opts().specs[1];
  CMatrix u;
  std::string ulabel;
  if (src == "haar") {
    RngStream rng = s.rng();
    u = haar_unitary(a.spec.dim, rng);
    ulabel = "haar";
  } else {
    const auto text = read_text_file(src);
    const auto j = parse_json_text(text, src);
    if (!j.is_object() || !j.contains("unitary")) throw SpecError(src + ":/unitary", "missing required field");
    try {
      u = ::manlab::detail::read_matrix(j["unitary"], "/unitary", a.spec.dim);
    } catch (const SpecError& e) {
      throw SpecError(src + ":" + e.where(), e.message());
    }
    ulabel = std::filesystem::path(src).stem().string();
  }
  s.add(s.record(a.label + ":" + ulabel, a_otoc(a.algebra, u)));
}

inline void cmd_protocol(Session& s, const std::string& variant) {
  const auto& specs = s.opts().specs;
  if (specs.empty() || specs.size() > 2) throw SpecError("", "protocol expects one (self) or two specification files");
  const auto a = s.load(specs[0]);
  const bool self = specs.size() == 1;
  std::optional<Loaded> b;
  if (!self) b = s.load(specs[1]);
  const std::string label = self ? a.label : pair_label(a, *b);
  if (variant == "choi") {
    auto e = self ? protocol_choi_self(a.algebra, s.opts().shots, s.rng())
                  : protocol_choi(a.algebra, b->algebra, s.opts().shots, s.rng());
    s.add(s.record(label, e));
  } else {
    const auto mode = s.opts().exact ? ExpectationMode::exact : ExpectationMode::sampled;
    const int n = samples_or(s.opts(), 10000);
    auto e = self ? protocol_stochastic_self(a.algebra, mode, n, s.opts().shots, s.rng())
                  : protocol_stochastic(a.algebra, b->algebra, mode, n, s.opts().shots, s.rng());
    s.add(s.record(label, e));
  }
}

/// Returns true when a bound violation was found.
inline bool cmd_markov(Session& s) {
  const auto in = s.load_specs(2, "markov-check");
  std::vector<double> eps = s.opts().epsilons;
  if (eps.empty()) eps = {0.1, 0.25, 0.5, 1.0, 1.5};
  const auto rep = markov_bound_check(in[0].algebra, in[1].algebra, eps, samples_or(s.opts(), 1000),
                                      s.opts().state_samples, s.rng());
  const std::string label = pair_label(in[0], in[1]);
  ResultRecord head;
  head.label = label;
  head.method = "markov";
  head.s = rep.s;
  head.s2 = s.log_value(log_man(rep.s));
  head.samples = rep.samples;
  head.values = {{"c_derived", rep.constants.derived},
                 {"c_printed", rep.constants.printed},
                 {"state_samples", rep.state_samples},
                 {"mean_distance", rep.mean_distance},
                 {"max_distance", rep.max_distance},
                 {"mean_distance_bound", rep.mean_bound},
                 {"violations", rep.violations}};
  s.add(std::move(head));
  for (const auto& row : rep.rows) {
    ResultRecord r;
    r.label = label;
    r.method = "markov-row";
    r.samples = rep.samples;
    r.values = {{"epsilon", row.epsilon},
                {"probability", row.probability},
                {"exceed", row.exceed},
                {"bound", row.bound},
                {"bound_printed_constant", row.bound_printed},
                {"violated", row.violated ? 1.0 : 0.0}};
    s.add(std::move(r));
  }
  return rep.violations > 0;
}

inline void cmd_sweep(Session& s) {
  if (s.opts().specs.size() != 1) throw SpecError("", "sweep expects one sweep file");
  const std::string& path = s.opts().specs[0];
  const auto j = parse_json_text(read_text_file(path), path);
  const auto dir = std::filesystem::path(path).parent_path();
  if (!j.is_object()) throw SpecError(path + ":/", "sweep file must be a JSON object");

  auto spec_at = [&](const nlohmann::json& v, const std::string& where, const std::string& fallback) {
    if (v.is_string()) return s.load((dir / v.get<std::string>()).string());
    try {
      return s.load_spec(spec_from_json(v, {s.opts().allow_large}, where), fallback);
    } catch (const SpecError& e) {
      throw SpecError(path + ":" + e.where(), e.message());
    }
  };

  if (j.contains("cases")) {
    const auto& cases = j["cases"];
    if (!cases.is_array()) throw SpecError(path + ":/cases", "expected an array");
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto& c = cases[i];
      const std::string where = "/cases/" + std::to_string(i);
      if (!c.is_object() || !c.contains("a")) throw SpecError(path + ":" + where + "/a", "missing required field");
      const std::string method = c.value("method", c.contains("b") ? std::string("omega") : std::string("self"));
      const auto a = spec_at(c["a"], where + "/a", "case" + std::to_string(i) + "a");
      ResultRecord r;
      if (method == "self") {
        r = s.record(a.label, self_man(a.algebra));
      } else {
        if (!c.contains("b")) throw SpecError(path + ":" + where + "/b", "missing required field");
        const auto b = spec_at(c["b"], where + "/b", "case" + std::to_string(i) + "b");
        r = evaluate_pair(s, a, b, method);
      }
      if (c.contains("label") && c["label"].is_string()) r.label = c["label"].get<std::string>();
      s.add(std::move(r));
    }
  } else if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (!g.is_object() || g.value("type", "") != "lattice_overlap") {
      throw SpecError(path + ":/grid/type", "supported grid type: lattice_overlap");
    }
    const int ds = g.value("site_dim", 2);
    const int sites = g.value("sites", 3);
    if (ds < 1 || sites < 1) throw SpecError(path + ":/grid", "site_dim and sites must be positive");
    const std::vector<int> dims(static_cast<std::size_t>(sites), ds);
    std::vector<int> all(static_cast<std::size_t>(sites));
    for (int k = 0; k < sites; ++k) all[static_cast<std::size_t>(k)] = k;
    for (int k = 0; k <= sites; ++k) {
      const std::vector<int> first(all.begin(), all.begin() + k);
      ResultRecord r = s.record("overlap=" + std::to_string(k), lattice_man(dims, all, first));
      s.add(std::move(r));
    }
  } else {
    throw SpecError(path + ":/", "sweep file needs 'cases' or 'grid'");
  }
}

}  // namespace detail

/// Runs the command line `args` (without the program name). Writes the JSON
/// report to `out` and diagnostics to `err`; returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Options o;
  CLI::App app{"Mutual averaged non-commutativity workbench", "manlab"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* sc) {
    sc->add_option("specs", o.specs, "Algebra specification files");
    sc->add_option("--samples", o.samples, "Monte-Carlo sample count")->check(CLI::PositiveNumber);
    sc->add_option("--seed", o.seed, "Random seed (default: MANLAB_SEED or 1)");
    sc->add_option("--csv", o.csv, "Also write a CSV table to this path");
    sc->add_option("--log-base", o.log_base, "Logarithm base for S2 values")->check(CLI::IsMember({"2", "e"}));
    sc->add_flag("--quiet", o.quiet, "Omit structural summaries of the inputs");
    sc->add_flag("--allow-large", o.allow_large, "Accept ambient dimensions above 64");
  };

  auto* analyze = app.add_subcommand("analyze", "Central decomposition and dimensions");
  auto* man = app.add_subcommand("man", "MAN of two algebras");
  auto* selfman = app.add_subcommand("selfman", "Self-MAN of an algebra");
  auto* bounds = app.add_subcommand("bounds", "Upper bounds on the MAN");
  auto* orbit = app.add_subcommand("orbit-avg", "MAN averaged over a unitary orbit");
  auto* lattice = app.add_subcommand("lattice", "Closed forms for local algebras on a lattice");
  auto* masa = app.add_subcommand("masa", "MAN of two maximal abelian algebras");
  auto* quant = app.add_subcommand("quantumness", "Relative quantumness of two bases");
  auto* aotoc = app.add_subcommand("aotoc", "Algebra OTOC of a unitary");
  auto* protocol = app.add_subcommand("protocol", "Simulated measurement protocols");
  auto* choi = protocol->add_subcommand("choi", "Algebra-state swap-test protocol");
  auto* stochastic = protocol->add_subcommand("stochastic", "Random-state protocol");
  protocol->require_subcommand(1);
  auto* markov = app.add_subcommand("markov-check", "Empirical check of the transmission bound");
  auto* sweep = app.add_subcommand("sweep", "Evaluate a list of cases or a parameter grid");

  for (auto* sc : {analyze, man, selfman, bounds, orbit, lattice, masa, quant, aotoc, choi, stochastic, markov, sweep}) {
    common(sc);
  }
  for (auto* sc : {man, sweep}) {
    sc->add_option("--method", o.method, "omega|projection|collinear|entropy|mc")
        ->check(CLI::IsMember({"omega", "projection", "collinear", "entropy", "mc"}));
  }
  for (auto* sc : {choi, stochastic}) sc->add_option("--shots", o.shots, "Shots per swap test")->check(CLI::PositiveNumber);
  stochastic->add_flag("--exact", o.exact, "Use exact Haar expectations instead of sampling");
  markov->add_option("--epsilon", o.epsilons, "Distance threshold(s)")->delimiter(',');
  markov->add_option("--state-samples", o.state_samples, "Random initial states per unitary pair")
      ->check(CLI::PositiveNumber);
  lattice->add_option("--site-dims", o.site_dims, "Local dimensions, e.g. 2,2,2")->delimiter(',');
  lattice->add_option("--s1", o.s1, "First region (1-based sites)")->delimiter(',');
  lattice->add_option("--s2", o.s2, "Second region (1-based sites)")->delimiter(',');

  std::vector<std::string> storage{"manlab"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "manlab: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    detail::Session s(o, storage);
    bool violation = false;
    if (analyze->parsed()) detail::cmd_analyze(s);
    if (man->parsed()) detail::cmd_man(s);
    if (selfman->parsed()) detail::cmd_selfman(s);
    if (bounds->parsed()) detail::cmd_bounds(s);
    if (orbit->parsed()) detail::cmd_orbit(s);
    if (lattice->parsed()) detail::cmd_lattice(s);
    if (masa->parsed()) detail::cmd_masa(s);
    if (quant->parsed()) detail::cmd_quantumness(s);
    if (aotoc->parsed()) detail::cmd_aotoc(s);
    if (choi->parsed()) detail::cmd_protocol(s, "choi");
    if (stochastic->parsed()) detail::cmd_protocol(s, "stochastic");
    if (markov->parsed()) violation = detail::cmd_markov(s);
    if (sweep->parsed()) detail::cmd_sweep(s);

    s.report().wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.csv.empty()) emit_csv(s.report(), o.csv);
    out << report_to_json(s.report()).dump(2) << '\n';
    if (violation) {
      err << "manlab: markov-check found bound violations\n";
      return kExitViolation;
    }
    return kExitOk;
  } catch (const SpecError& e) {
    err << "manlab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ShapeError& e) {
    err << "manlab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "manlab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "manlab: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace manlab::cli
