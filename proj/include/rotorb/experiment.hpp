#pragma once

// Config-driven experiments. A config is line-oriented text:
//
//   # comment
//   key = value            top-level keys
//   [generator]            repeatable section, one per generator
//   center = 0 0           (2D) or base = ... / dir = ... or from = ... / to = ... (3D)
//   angle = pi 1/2         exact tags: pi p/q | acos p/q + | rad x
//   [budget]
//   max_len = 6
//
// Unknown keys or sections raise ConfigError naming the offending key.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rotorb/cloud_io.hpp"
#include "rotorb/geometry.hpp"
#include "rotorb/orbit.hpp"
#include "rotorb/tetra.hpp"
#include "rotorb/tolerances.hpp"
#include "rotorb/words.hpp"

namespace rotorb {

inline constexpr int kReportSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigSection {
  std::string name;  // empty for the top level
  int line = 0;
  std::vector<ConfigEntry> entries;
};

struct ConfigFile {
  std::vector<ConfigSection> sections;  // sections[0] is the top level

  static ConfigFile parse(std::string_view text) {
    ConfigFile cfg;
    cfg.sections.push_back(ConfigSection{});
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string{};
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const std::string where = "line " + std::to_string(lineno);
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError(where, "malformed section header '" + line + "'");
        const auto name = trim(line.substr(1, line.size() - 2));
        if (name.empty()) throw ConfigError(where, "empty section name");
        cfg.sections.push_back(ConfigSection{name, lineno, {}});
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value', got '" + line + "'");
      auto key = trim(line.substr(0, eq));
      auto value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError(where, "missing key");
      auto& sec = cfg.sections.back();
      for (const auto& e : sec.entries) {
        if (e.key == key) throw ConfigError(qualify(sec, cfg, key), "duplicate key");
      }
      sec.entries.push_back(ConfigEntry{key, value, lineno});
    }
    return cfg;
  }

  static ConfigFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  std::vector<const ConfigSection*> named(std::string_view name) const {
    std::vector<const ConfigSection*> out;
    for (std::size_t i = 1; i < sections.size(); ++i)
      if (sections[i].name == name) out.push_back(&sections[i]);
    return out;
  }

  /// Qualified key for messages: "budget.max_len", "generator[2].angle".
  static std::string qualify(const ConfigSection& sec, const ConfigFile& cfg, std::string_view key) {
    if (sec.name.empty()) return std::string(key);
    std::size_t ordinal = 0, total = 0;
    for (std::size_t i = 1; i < cfg.sections.size(); ++i) {
      if (cfg.sections[i].name != sec.name) continue;
      ++total;
      if (&cfg.sections[i] == &sec) ordinal = total;
    }
    std::string head = sec.name;
    if (sec.name == "generator") head += "[" + std::to_string(ordinal) + "]";
    return head + "." + std::string(key);
  }
};

/// Typed, strict access to one section.
class SectionReader {
 public:
  SectionReader(const ConfigFile& cfg, const ConfigSection& sec, const std::vector<std::string_view>& allowed)
      : cfg_(&cfg), sec_(&sec) {
    for (const auto& e : sec.entries) {
      if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end()) {
        throw ConfigError(name(e.key), "unknown key");
      }
    }
  }

  std::string name(std::string_view key) const { return ConfigFile::qualify(*sec_, *cfg_, key); }

  bool has(std::string_view key) const { return find(key) != nullptr; }

  std::string text(std::string_view key) const {
    const auto* e = find(key);
    if (!e) throw ConfigError(name(key), "required key is missing");
    return e->value;
  }

  double real(std::string_view key) const {
    const auto v = text(key);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
      throw ConfigError(name(key), "expected a real number, got '" + v + "'");
    }
    return out;
  }
  double real(std::string_view key, double fallback) const { return has(key) ? real(key) : fallback; }

  std::int64_t integer(std::string_view key) const {
    const auto v = text(key);
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
      throw ConfigError(name(key), "expected an integer, got '" + v + "'");
    }
    return out;
  }
  std::int64_t integer(std::string_view key, std::int64_t fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  std::size_t count(std::string_view key, std::size_t fallback, std::int64_t min_value = 0) const {
    if (!has(key)) return fallback;
    const auto v = integer(key);
    if (v < min_value) throw ConfigError(name(key), "must be >= " + std::to_string(min_value));
    return static_cast<std::size_t>(v);
  }

  bool flag(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto v = text(key);
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError(name(key), "expected true or false, got '" + v + "'");
  }

  std::vector<double> reals(std::string_view key) const {
    auto v = text(key);
    for (char& ch : v)
      if (ch == ',' || ch == '(' || ch == ')') ch = ' ';
    std::istringstream ss(v);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) {
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(x)) {
        throw ConfigError(name(key), "bad number '" + tok + "'");
      }
      out.push_back(x);
    }
    return out;
  }

  template <int D>
  Vec<D> vec(std::string_view key) const {
    const auto xs = reals(key);
    if (xs.size() != static_cast<std::size_t>(D)) {
      throw ConfigError(name(key), "expected " + std::to_string(D) + " components, got " + std::to_string(xs.size()));
    }
    Vec<D> out;
    for (int i = 0; i < D; ++i) out[i] = xs[i];
    return out;
  }

  Angle angle(std::string_view key) const {
    try {
      return Angle::parse(text(key));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(name(key), e.what());
    }
  }

  Rational rational(std::string_view key) const {
    try {
      return Rational::parse(text(key));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(name(key), e.what());
    }
  }

 private:
  const ConfigEntry* find(std::string_view key) const {
    for (const auto& e : sec_->entries)
      if (e.key == key) return &e;
    return nullptr;
  }

  const ConfigFile* cfg_;
  const ConfigSection* sec_;
};

enum class ExperimentKind { Orbit, Density, Ladder, Gaps, Tumble, Hexagon, Conform, Classify };

inline constexpr std::array<std::string_view, 8> kExperimentNames{"orbit",   "density", "ladder",  "gaps",
                                                                  "tumble",  "hexagon", "conform", "classify"};

inline std::string_view kind_name(ExperimentKind k) { return kExperimentNames[static_cast<std::size_t>(k)]; }

inline ExperimentKind parse_kind(std::string_view s) {
  for (std::size_t i = 0; i < kExperimentNames.size(); ++i)
    if (kExperimentNames[i] == s) return static_cast<ExperimentKind>(i);
  throw ConfigError("kind", "unknown experiment kind '" + std::string(s) + "'");
}

struct RunOptions {
  std::filesystem::path out_dir = "rotorb_out";
  std::optional<std::uint64_t> seed;  // overrides the config's seed
};

namespace detail {

using json = nlohmann::ordered_json;

inline json tolerances_json() {
  return json{{"geometric", tol::geometric},
              {"algebraic", tol::algebraic},
              {"unit_direction", tol::unit_direction},
              {"raw_angle_match", tol::raw_angle_match},
              {"raw_angle_max_denominator", tol::raw_angle_max_denominator},
              {"rational_cosine_match", tol::rational_cosine_match},
              {"rational_cosine_max_denominator", tol::rational_cosine_max_denominator},
              {"renormalize_every", tol::renormalize_every},
              {"dedup_cell", tol::dedup_cell},
              {"ladder_integer_guard", tol::ladder_integer_guard},
              {"sphere_confinement", tol::sphere_confinement},
              {"hexagon_slab", tol::hexagon_slab},
              {"trace_audit", 1e-8}};
}

inline json config_echo(const ConfigFile& cfg) {
  json top = json::object();
  for (const auto& e : cfg.sections[0].entries) top[e.key] = e.value;
  json sections = json::array();
  for (std::size_t i = 1; i < cfg.sections.size(); ++i) {
    json s = json::object();
    s["section"] = cfg.sections[i].name;
    for (const auto& e : cfg.sections[i].entries) s[e.key] = e.value;
    sections.push_back(s);
  }
  return json{{"top", top}, {"sections", sections}};
}

template <int D>
json vec_json(const Vec<D>& v) {
  json a = json::array();
  for (int i = 0; i < D; ++i) a.push_back(v[i]);
  return a;
}

inline json angle_class_json(const AngleClass& c) {
  json j{{"verdict", verdict_name(c.verdict)}};
  j["order"] = c.finite() ? json(c.order) : json(nullptr);
  return j;
}

inline void check_sections(const ConfigFile& cfg, const std::vector<std::string_view>& allowed) {
  for (std::size_t i = 1; i < cfg.sections.size(); ++i) {
    const auto& name = cfg.sections[i].name;
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      throw ConfigError("[" + name + "]", "unknown section for this experiment");
    }
  }
  for (const auto name : allowed) {
    if (name != "generator" && cfg.named(name).size() > 1) {
      throw ConfigError("[" + std::string(name) + "]", "section may appear at most once");
    }
  }
}

inline std::optional<SectionReader> optional_section(const ConfigFile& cfg, std::string_view name,
                                                     const std::vector<std::string_view>& keys) {
  const auto secs = cfg.named(name);
  if (secs.empty()) return std::nullopt;
  return SectionReader(cfg, *secs[0], keys);
}

inline int read_dim(const SectionReader& top) {
  const auto d = top.integer("dim");
  if (d != 2 && d != 3) throw ConfigError(top.name("dim"), "must be 2 or 3");
  return static_cast<int>(d);
}

template <int D>
GeneratorSet<D> read_generators(const ConfigFile& cfg) {
  const auto secs = cfg.named("generator");
  if (secs.empty()) throw ConfigError("[generator]", "at least one generator section is required");
  std::vector<std::pair<Axis<D>, Angle>> specs;
  for (const auto* sec : secs) {
    const SectionReader r(cfg, *sec, {"center", "base", "dir", "from", "to", "angle"});
    const auto angle = r.angle("angle");
    if constexpr (D == 2) {
      for (const auto* k : {"base", "dir", "from", "to"})
        if (r.has(k)) throw ConfigError(r.name(k), "not valid for dim 2; use center");
      specs.emplace_back(Axis<2>{r.vec<2>("center")}, angle);
    } else {
      if (r.has("center")) throw ConfigError(r.name("center"), "not valid for dim 3; use base/dir or from/to");
      const bool by_dir = r.has("base") || r.has("dir");
      const bool by_points = r.has("from") || r.has("to");
      if (by_dir == by_points) throw ConfigError(r.name("axis"), "give either base and dir or from and to");
      try {
        if (by_dir) {
          const auto d = r.vec<3>("dir");
          if (norm(d) == 0.0) throw ConfigError(r.name("dir"), "direction is zero");
          specs.emplace_back(Line3{r.vec<3>("base"), d / norm(d)}, angle);
        } else {
          specs.emplace_back(Line3::through(r.vec<3>("from"), r.vec<3>("to")), angle);
        }
      } catch (const std::invalid_argument& e) {
        throw ConfigError(r.name(by_dir ? "dir" : "to"), e.what());
      }
    }
  }
  try {
    return GeneratorSet<D>::make(specs);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("[generator]", e.what());
  }
}

struct BudgetConfig {
  SamplerBudget budget;
  double dedup_cell = tol::dedup_cell;
};

inline BudgetConfig read_budget(const ConfigFile& cfg) {
  BudgetConfig out;
  if (const auto r = optional_section(cfg, "budget", {"max_len", "max_exp", "max_points", "dedup_cell"})) {
    out.budget.max_len = r->count("max_len", out.budget.max_len);
    out.budget.max_exp = static_cast<std::int64_t>(r->count("max_exp", 1, 1));
    out.budget.max_points = r->count("max_points", out.budget.max_points, 1);
    out.dedup_cell = r->real("dedup_cell", out.dedup_cell);
    if (!(out.dedup_cell > 0.0)) throw ConfigError(r->name("dedup_cell"), "must be positive");
  }
  return out;
}

inline json budget_json(const BudgetConfig& b) {
  return json{{"max_len", b.budget.max_len},
              {"max_exp", b.budget.max_exp},
              {"max_points", b.budget.max_points},
              {"dedup_cell", b.dedup_cell}};
}

template <int D>
struct ProbeConfig {
  Ball<D> ball;
  int grid_res = 32;
  int coverage_cells = 20;
};

template <int D>
std::optional<ProbeConfig<D>> read_probe(const ConfigFile& cfg) {
  const auto r = optional_section(cfg, "probe", {"center", "radius", "grid_res", "coverage_cells"});
  if (!r) return std::nullopt;
  ProbeConfig<D> p;
  p.ball.center = r->vec<D>("center");
  p.ball.radius = r->real("radius");
  if (!(p.ball.radius > 0.0)) throw ConfigError(r->name("radius"), "must be positive");
  p.grid_res = static_cast<int>(r->count("grid_res", 32, 1));
  p.coverage_cells = static_cast<int>(r->count("coverage_cells", 20, 1));
  return p;
}

template <int D>
json probe_json(const ProbeConfig<D>& p) {
  return json{{"center", vec_json(p.ball.center)},
              {"radius", p.ball.radius},
              {"grid_res", p.grid_res},
              {"coverage_cells", p.coverage_cells}};
}

inline Mode read_mode(const SectionReader& top) {
  if (!top.has("mode")) return Mode::Peripatetic;
  try {
    return parse_mode(top.text("mode"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(top.name("mode"), e.what());
  }
}

inline std::uint64_t read_seed(const SectionReader& top, const RunOptions& opts) {
  if (opts.seed) return *opts.seed;
  const auto s = top.integer("seed", 0);
  if (s < 0) throw ConfigError(top.name("seed"), "must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }
  std::string path(const std::string& name) {
    artifacts_.push_back(name);
    return (dir_ / name).string();
  }
  template <int D>
  void cloud(const OrbitCloud<D>& c) {
    write_cloud_csv(c, path("cloud.csv"));
    write_cloud_ply(c, path("cloud.ply"));
  }
  const std::vector<std::string>& artifacts() const { return artifacts_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> artifacts_;
};

/// Recomputes a seeded 1% sample (at least one point) of the cloud from its words.
template <int D>
json trace_audit(const GeneratorSet<D>& gens, const Vec<D>& p, Mode mode, const OrbitCloud<D>& cloud,
                 std::uint64_t seed) {
  std::mt19937_64 rng{seed};
  const std::size_t n = cloud.size();
  const std::size_t want = std::max<std::size_t>(1, n / 100);
  std::set<std::size_t> picks;
  while (picks.size() < want) picks.insert(static_cast<std::size_t>(rng() % n));
  double worst = 0.0;
  for (const auto i : picks) {
    const std::span<const Letter> w{cloud.words()[i]};
    const auto f = mode == Mode::Stationary ? stationary_eval(gens, w) : peripatetic_eval(gens, w).total;
    worst = std::max(worst, distance(f.apply(p), cloud.points()[i]));
  }
  return json{{"sampled", picks.size()}, {"max_deviation", worst}, {"pass", worst < 1e-8}};
}

template <int D>
json orbit_common_metrics(const OrbitCloud<D>& cloud) {
  const auto disc = discreteness_report(cloud);
  return json{{"points", cloud.size()},
              {"truncated", cloud.truncated()},
              {"max_word_len", cloud.max_word_len()},
              {"min_pairwise_distance", disc.min_distance}};
}

template <int D>
json run_orbit_like(ExperimentKind kind, const ConfigFile& cfg, const SectionReader& top, const RunOptions& opts,
                    json& report) {
  // validation
  const auto gens = read_generators<D>(cfg);
  const auto p = top.vec<D>("point");
  const auto mode = read_mode(top);
  const auto budget = read_budget(cfg);
  const auto seed = read_seed(top, opts);
  const auto probe = read_probe<D>(cfg);
  if (kind == ExperimentKind::Density && !probe) throw ConfigError("[probe]", "density needs a probe section");
  std::optional<Vec3> sphere_center;
  if (const auto r = optional_section(cfg, "sphere", {"center"})) {
    if constexpr (D == 3) {
      sphere_center = r->vec<3>("center");
    } else {
      throw ConfigError("[sphere]", "sphere confinement needs dim 3");
    }
  }
  report["seed"] = seed;
  report["effective"] = json{{"dim", D}, {"mode", mode_name(mode)}, {"point", vec_json(p)}, {"budget", budget_json(budget)}};
  if (probe) report["effective"]["probe"] = probe_json(*probe);

  // execution
  Outputs out(opts.out_dir);
  const auto cloud = bfs_orbit(gens, p, mode, budget.budget, BfsOptions{budget.dedup_cell, true});
  json m = orbit_common_metrics(cloud);
  m["trace_audit"] = trace_audit(gens, p, mode, cloud, seed);
  if constexpr (D == 3) {
    if (sphere_center) {
      const double r0 = distance(p, *sphere_center);
      const auto sc = sphere_confinement_check(cloud, *sphere_center, r0);
      m["sphere"] = json{{"center", vec_json(*sphere_center)},
                         {"radius", r0},
                         {"max_abs_deviation", sc.max_abs_deviation},
                         {"pass", sc.pass}};
    }
  }
  if (probe) {
    m["mesh"] = mesh_estimate(cloud, probe->ball, probe->grid_res);
    m["coverage"] = coverage(cloud, probe->ball, probe->coverage_cells);
    // coverage of each smaller word-length budget, read off the depth-ordered cloud
    json by_len = json::array();
    for (std::size_t len = 0; len <= budget.budget.max_len; ++len) {
      OrbitCloud<D> sub{budget.dedup_cell};
      for (std::size_t i = 0; i < cloud.size(); ++i)
        if (static_cast<std::size_t>(cloud.word_len()[i]) <= len) sub.insert(cloud.points()[i], cloud.word_len()[i]);
      by_len.push_back(json{{"max_len", len}, {"points", sub.size()}, {"coverage", coverage(sub, probe->ball, probe->coverage_cells)}});
    }
    m["coverage_by_max_len"] = by_len;
  }
  out.cloud(cloud);
  report["metrics"] = m;
  return out.artifacts();
}

template <int D>
json run_ladder(const ConfigFile& cfg, const SectionReader& top, const RunOptions& opts, json& report) {
  const auto gens = read_generators<D>(cfg);
  const auto p = top.vec<D>("point");
  const auto stages = top.count("stages", 3, 1);
  const double dedup = top.real("dedup_cell", tol::dedup_cell);
  if (!(dedup > 0.0)) throw ConfigError(top.name("dedup_cell"), "must be positive");
  const auto max_points = top.count("max_points", 5'000'000, 1);
  const auto probe = read_probe<D>(cfg);
  if (gens.size() != 2) throw ConfigError("[generator]", "ladder needs exactly two generators");
  for (std::size_t i = 0; i < 2; ++i) {
    if (gens[i].order.finite()) {
      throw ConfigError("generator[" + std::to_string(i + 1) + "].angle", "ladder needs an irrational angle");
    }
    try {
      ladder_k(gens[i].angle.size() / std::numbers::pi);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("generator[" + std::to_string(i + 1) + "].angle", e.what());
    }
  }
  report["seed"] = read_seed(top, opts);
  report["effective"] = json{{"dim", D}, {"point", vec_json(p)}, {"stages", stages}, {"dedup_cell", dedup},
                             {"max_points", max_points}};
  if (probe) report["effective"]["probe"] = probe_json(*probe);

  Outputs out(opts.out_dir);
  const auto lad = ladder_orbit(gens, p, stages, dedup, max_points);
  json st = json::array();
  for (const auto& s : lad.stages) {
    json j{{"stage", s.stage}, {"axis", s.axis_used + 1}, {"exp_bound", s.exp_bound}, {"points", s.points.size()}};
    if (probe) j["mesh"] = mesh_estimate(s.points, probe->ball, probe->grid_res);
    st.push_back(j);
  }
  report["metrics"] = json{{"rho", {lad.rho[0], lad.rho[1]}},
                           {"k", {lad.k[0], lad.k[1]}},
                           {"truncated", lad.truncated},
                           {"stages", st}};
  out.cloud(lad.stages.back().points);
  return out.artifacts();
}

inline json gap_json(const GapReport& g) {
  json gaps = json::array();
  for (const auto& [len, mult] : g.gaps) gaps.push_back(json{{"length", len}, {"count", mult}});
  return json{{"n", g.n},
              {"distinct_points", g.distinct_points},
              {"distinct_gaps", g.distinct_gap_count()},
              {"gaps", gaps},
              {"max_gap", g.max_gap},
              {"min_gap", g.min_gap},
              {"total", g.total()},
              {"exact", g.exact}};
}

inline json run_gaps(const SectionReader& top, const RunOptions& opts, json& report) {
  if (top.has("angle") == top.has("x")) throw ConfigError(top.name("angle"), "give exactly one of angle or x");
  const auto n = top.count("n", 1000, 1);
  std::optional<Angle> angle;
  double x = 0.0;
  if (top.has("angle")) {
    angle = top.angle("angle");
  } else {
    x = top.real("x");
  }
  report["seed"] = read_seed(top, opts);
  Outputs out(opts.out_dir);
  report["metrics"] = gap_json(angle ? circle_gap_stats(*angle, n) : circle_gap_stats_turns(x, n));
  return out.artifacts();
}

inline json run_classify(const SectionReader& top, const RunOptions& opts, json& report) {
  if (top.has("angle") == top.has("cos")) throw ConfigError(top.name("angle"), "give exactly one of angle or cos");
  Angle a = Angle::pi_multiple(0, 1);
  if (top.has("angle")) {
    a = top.angle("angle");
  } else {
    const auto c = top.rational("cos");
    try {
      a = Angle::acos_of(c, 1);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(top.name("cos"), e.what());
    }
  }
  report["seed"] = read_seed(top, opts);
  Outputs out(opts.out_dir);
  auto m = angle_class_json(classify_angle(a));
  m["angle"] = a.to_string();
  m["radians"] = a.radians();
  m["cosine"] = std::cos(a.radians());
  report["metrics"] = m;
  return out.artifacts();
}

template <int D>
json conform_impl(const SectionReader& top) {
  const auto d1 = top.vec<D>("dir1");
  const auto d2 = top.vec<D>("dir2");
  if (norm(d1) == 0.0) throw ConfigError(top.name("dir1"), "direction is zero");
  if (norm(d2) == 0.0) throw ConfigError(top.name("dir2"), "direction is zero");
  Conformity c;
  try {
    c = conform_rationally(d1, d2);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(top.name("dir2"), e.what());
  }
  auto m = angle_class_json(c.angle_class);
  m["dim"] = D;
  m["cosine"] = c.cosine;
  m["exact_cosine"] = c.exact_cosine ? json(c.exact_cosine->to_string()) : json(nullptr);
  m["rationally_conformal"] = c.angle_class.finite();
  return m;
}

inline json run_conform(const SectionReader& top, const RunOptions& opts, json& report) {
  const auto n = top.reals("dir1").size();
  json m;
  if (n == 2) {
    m = conform_impl<2>(top);
  } else if (n == 3) {
    m = conform_impl<3>(top);
  } else {
    throw ConfigError(top.name("dir1"), "expected 2 or 3 components");
  }
  report["seed"] = read_seed(top, opts);
  Outputs out(opts.out_dir);
  report["metrics"] = m;
  return out.artifacts();
}

inline Tetrahedron read_tetrahedron(const SectionReader& top) {
  const double edge = top.real("edge_length", std::sqrt(6.0));
  if (!(edge > 0.0)) throw ConfigError(top.name("edge_length"), "must be positive");
  return regular_tetrahedron(edge);
}

inline std::vector<Letter> read_steps(const SectionReader& top, std::string_view key) {
  try {
    return parse_tumble_steps(top.has(key) ? top.text(key) : std::string{});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(top.name(key), e.what());
  }
}

inline json run_tumble(const SectionReader& top, const RunOptions& opts, json& report) {
  const auto t = read_tetrahedron(top);
  const auto steps = read_steps(top, "edges");
  const auto p = top.has("point") ? top.vec<3>("point") : t.barycenter();
  const bool flip = top.flag("reverse_senses", false);
  report["seed"] = read_seed(top, opts);
  report["effective"] = json{{"edge_length", t.edge_length()}, {"point", vec_json(p)}, {"steps", steps.size()},
                             {"reverse_senses", flip}};

  Outputs out(opts.out_dir);
  auto rotations = edge_rotations(t);
  if (flip) rotations = rotations.reversed();
  const auto trace = tumble(t, p, steps, rotations);
  double edge_err = 0.0;
  OrbitCloud<3> path{tol::dedup_cell};
  for (const auto& f : trace.frames) {
    for (const auto& [i, j] : kEdges)
      edge_err = std::max(edge_err, std::abs(distance(f.vertices[i], f.vertices[j]) - t.edge_length()));
    path.insert(f.point, static_cast<int>(f.step));
  }
  json last = json::object();
  for (std::size_t i = 0; i < 4; ++i)
    last[std::string(1, kVertexLabels[i])] = vec_json(trace.frames.back().vertices[i]);
  json senses = json::array();
  for (const auto& e : rotations.edges)
    senses.push_back(json{{"edge", edge_name(static_cast<std::size_t>(&e - rotations.edges.data()))}, {"direction_sign", e.direction_sign}});
  report["metrics"] = json{{"frames", trace.frames.size()},
                           {"max_edge_length_error", edge_err},
                           {"final_vertices", last},
                           {"final_point", vec_json(trace.frames.back().point)},
                           {"distinct_point_positions", path.size()},
                           {"edge_senses", senses}};
  write_tumble_csv(trace, out.path("tumble.csv"));
  out.cloud(path);
  return out.artifacts();
}

inline json run_hexagon(const ConfigFile& cfg, const SectionReader& top, const RunOptions& opts, json& report) {
  const auto t = read_tetrahedron(top);
  const auto word = read_steps(top, "word");
  auto budget = read_budget(cfg);
  report["seed"] = read_seed(top, opts);
  report["effective"] = json{{"edge_length", t.edge_length()}, {"word_letters", word.size()},
                             {"budget", budget_json(budget)}};

  Outputs out(opts.out_dir);
  const auto rep = hexagon_report(t, word, budget.budget, BfsOptions{budget.dedup_cell, false});
  json seeds = json::array();
  for (const auto& s : rep.seeds) seeds.push_back(vec_json(s));
  json hist = json::array();
  for (const auto& [d, c] : rep.nn_histogram) hist.push_back(json{{"distance", d}, {"count", c}});
  json m{{"degenerate", rep.degenerate}, {"seeds", seeds}};
  if (!rep.degenerate) m["plane"] = json{{"point", vec_json(rep.plane_point)}, {"normal", vec_json(rep.plane_normal)}};
  m["slab"] = rep.slab;
  m["cloud_points"] = rep.cloud_points;
  m["cloud_truncated"] = rep.cloud_truncated;
  m["in_plane_points"] = rep.in_plane.size();
  m["min_nn_distance"] = rep.min_nn_distance;
  m["nn_histogram"] = hist;
  m["warnings"] = rep.warnings;
  report["metrics"] = m;
  OrbitCloud<3> plane{budget.dedup_cell};
  for (const auto& q : rep.in_plane) plane.insert(q, 0);
  out.cloud(plane);
  return out.artifacts();
}

}  // namespace detail

/// Validates the config, runs the experiment, writes its files under
/// opts.out_dir and returns the report (also written as report.json).
/// Throws ConfigError for invalid configs before anything is written.
inline nlohmann::ordered_json run_experiment(ExperimentKind kind, const ConfigFile& cfg, const RunOptions& opts) {
  using detail::json;
  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["kind"] = kind_name(kind);
  report["seed"] = nullptr;
  report["config"] = detail::config_echo(cfg);
  report["tolerances"] = detail::tolerances_json();

  const auto top_keys = [&]() -> std::vector<std::string_view> {
    switch (kind) {
      case ExperimentKind::Orbit:
      case ExperimentKind::Density: return {"kind", "seed", "dim", "mode", "point"};
      case ExperimentKind::Ladder: return {"kind", "seed", "dim", "point", "stages", "dedup_cell", "max_points"};
      case ExperimentKind::Gaps: return {"kind", "seed", "angle", "x", "n"};
      case ExperimentKind::Classify: return {"kind", "seed", "angle", "cos"};
      case ExperimentKind::Conform: return {"kind", "seed", "dir1", "dir2"};
      case ExperimentKind::Tumble: return {"kind", "seed", "edge_length", "edges", "point", "reverse_senses"};
      case ExperimentKind::Hexagon: return {"kind", "seed", "edge_length", "word"};
    }
    return {};
  }();
  const SectionReader top(cfg, cfg.sections[0], top_keys);
  if (top.has("kind") && top.text("kind") != kind_name(kind)) {
    throw ConfigError("kind", "config is for '" + top.text("kind") + "', not '" + std::string(kind_name(kind)) + "'");
  }

  json artifacts;
  switch (kind) {
    case ExperimentKind::Orbit:
    case ExperimentKind::Density:
      detail::check_sections(cfg, {"generator", "budget", "probe", "sphere"});
      artifacts = detail::read_dim(top) == 2 ? detail::run_orbit_like<2>(kind, cfg, top, opts, report)
                                             : detail::run_orbit_like<3>(kind, cfg, top, opts, report);
      break;
    case ExperimentKind::Ladder:
      detail::check_sections(cfg, {"generator", "probe"});
      artifacts = detail::read_dim(top) == 2 ? detail::run_ladder<2>(cfg, top, opts, report)
                                             : detail::run_ladder<3>(cfg, top, opts, report);
      break;
    case ExperimentKind::Gaps:
      detail::check_sections(cfg, {});
      artifacts = detail::run_gaps(top, opts, report);
      break;
    case ExperimentKind::Classify:
      detail::check_sections(cfg, {});
      artifacts = detail::run_classify(top, opts, report);
      break;
    case ExperimentKind::Conform:
      detail::check_sections(cfg, {});
      artifacts = detail::run_conform(top, opts, report);
      break;
    case ExperimentKind::Tumble:
      detail::check_sections(cfg, {});
      artifacts = detail::run_tumble(top, opts, report);
      break;
    case ExperimentKind::Hexagon:
      detail::check_sections(cfg, {"budget"});
      artifacts = detail::run_hexagon(cfg, top, opts, report);
      break;
  }
  artifacts.push_back("report.json");
  report["artifacts"] = artifacts;

  const auto path = (opts.out_dir / "report.json").string();
  auto out = detail::open_for_write(path);
  out << report.dump(2) << '\n';
  detail::finish(out, path);
  return report;
}

}  // namespace rotorb
