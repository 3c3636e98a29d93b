#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "inls/error.hpp"
#include "inls/harness.hpp"

namespace inls::harness {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"", {"action", "seed"}},
      {"params", {"d", "b", "sigma", "c"}},
      {"grid", {"N", "R_max", "mapping", "exponent"}},
      {"initial_data", {"family", "lambda", "mode", "amplitude", "width", "chirp"}},
      {"evolution",
       {"dt", "t_final", "snapshot_stride", "blowup_growth_factor", "min_dt", "boundary_mass_limit",
        "step_change_limit", "drift_budget"}},
      {"classify", {"symmetry", "band"}},
      {"sweep", {"action"}},
      {"output", {"dir", "summary", "csv", "report"}},
      {"cache", {"dir", "require_cached_groundstate"}},
      {"verify", {"checks", "samples", "order_table"}},
  };
  return keys;
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ConfigParseError, what); }

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) bad(key + ": not a number: '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) bad(key + ": not an integer: '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  bad(key + ": not a boolean: '" + v + "'");
}

Action parse_action(const std::string& key, const std::string& v) {
  if (v == "ground-state") return Action::ground_state;
  if (v == "classify") return Action::classify;
  if (v == "evolve") return Action::evolve;
  if (v == "verify") return Action::verify;
  if (v == "sweep") return Action::sweep;
  bad(key + ": unknown action '" + v + "'");
}

Family parse_family(const std::string& v) {
  if (v == "ground_state") return Family::ground_state;
  if (v == "scaled_ground_state") return Family::scaled_ground_state;
  if (v == "gaussian") return Family::gaussian;
  if (v == "chirped_gaussian") return Family::chirped_gaussian;
  bad("initial_data.family: unknown family '" + v + "'");
}

// Reads entries with a typed accessor; anything absent keeps its default.
class Reader {
 public:
  explicit Reader(const std::map<std::string, std::string>& e) : e_(e) {}

  const std::string* find(const std::string& key) const {
    auto it = e_.find(key);
    return it == e_.end() ? nullptr : &it->second;
  }
  void num(const std::string& key, double& x) const {
    if (auto v = find(key)) x = to_double(key, *v);
  }
  template <class I>
  void integer(const std::string& key, I& x, long long lo) const {
    if (auto v = find(key)) {
      const long long n = to_int(key, *v);
      if (n < lo) bad(key + " must be at least " + std::to_string(lo));
      x = static_cast<I>(n);
    }
  }
  void boolean(const std::string& key, bool& x) const {
    if (auto v = find(key)) x = to_bool(key, *v);
  }
  void text(const std::string& key, std::string& x) const {
    if (auto v = find(key)) x = *v;
  }

 private:
  const std::map<std::string, std::string>& e_;
};

bool is_axis_key(const std::string& key) {
  const auto dot = key.find('.');
  if (dot == std::string::npos) return false;
  const std::string section = key.substr(0, dot), name = key.substr(dot + 1);
  if (section == "sweep" || section == "output" || section == "cache") return false;
  auto it = known_keys().find(section);
  return it != known_keys().end() && it->second.count(name) > 0;
}

}  // namespace

std::string to_string(Action a) {
  switch (a) {
    case Action::ground_state: return "ground-state";
    case Action::classify: return "classify";
    case Action::evolve: return "evolve";
    case Action::verify: return "verify";
    case Action::sweep: return "sweep";
  }
  return "?";
}

std::string to_string(Family f) {
  switch (f) {
    case Family::ground_state: return "ground_state";
    case Family::scaled_ground_state: return "scaled_ground_state";
    case Family::gaussian: return "gaussian";
    case Family::chirped_gaussian: return "chirped_gaussian";
  }
  return "?";
}

std::vector<std::string> all_checks() {
  return {"hardy", "pohozaev", "gn_constant", "thresholds", "virial_identity",
          "cutoff", "uncertainty", "momentum_bound", "x0"};
}

ExperimentConfig config_from_entries(const std::map<std::string, std::string>& entries) {
  for (const auto& [key, value] : entries) {
    const auto dot = key.find('.');
    const std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
    const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    auto it = known_keys().find(section);
    if (it == known_keys().end()) bad("unknown section [" + section + "]");
    if (section == "sweep" && name != "action") {
      if (!is_axis_key(name)) bad("sweep axis must name a params/grid/initial_data/evolution/classify/verify key: " + name);
      continue;
    }
    if (!it->second.count(name)) bad("unknown key '" + key + "'");
  }

  ExperimentConfig cfg;
  cfg.entries = entries;
  const Reader in(entries);

  if (auto v = in.find("action")) cfg.action = parse_action("action", *v);
  if (auto v = in.find("seed")) {
    const long long s = to_int("seed", *v);
    if (s < 0) bad("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }

  double d = 3, b = 0.5, sigma = 2.0, c = 0.0;
  in.num("params.d", d);
  in.num("params.b", b);
  in.num("params.sigma", sigma);
  in.num("params.c", c);
  cfg.params = Params::validate(d, b, sigma, c);

  in.integer("grid.N", cfg.grid.N, 1);
  in.num("grid.R_max", cfg.grid.R_max);
  if (auto v = in.find("grid.mapping")) {
    if (*v == "graded") cfg.grid.mapping.kind = MappingKind::graded;
    else if (*v == "uniform") cfg.grid.mapping.kind = MappingKind::uniform;
    else bad("grid.mapping: expected graded or uniform");
  }
  in.num("grid.exponent", cfg.grid.mapping.exponent);
  if (cfg.grid.mapping.kind == MappingKind::uniform) cfg.grid.mapping.exponent = 1.0;
  if (!(cfg.grid.R_max > 0.0)) bad("grid.R_max must be positive");
  if (!(cfg.grid.mapping.exponent >= 1.0)) bad("grid.exponent must be at least 1");

  if (auto v = in.find("initial_data.family")) cfg.data.family = parse_family(*v);
  in.num("initial_data.lambda", cfg.data.lambda);
  if (auto v = in.find("initial_data.mode")) {
    if (*v == "amplitude") cfg.data.mode = ScaleMode::amplitude;
    else if (*v == "symmetry") cfg.data.mode = ScaleMode::symmetry;
    else bad("initial_data.mode: expected amplitude or symmetry");
  }
  in.num("initial_data.amplitude", cfg.data.amplitude);
  in.num("initial_data.width", cfg.data.width);
  in.num("initial_data.chirp", cfg.data.chirp);
  if (!(cfg.data.lambda > 0.0)) bad("initial_data.lambda must be positive");
  if (!(cfg.data.width > 0.0)) bad("initial_data.width must be positive");

  EvolutionConfig& ev = cfg.evolution;
  in.num("evolution.dt", ev.dt);
  in.num("evolution.t_final", ev.t_final);
  in.integer("evolution.snapshot_stride", ev.snapshot_stride, 1);
  in.num("evolution.blowup_growth_factor", ev.blowup_growth_factor);
  in.num("evolution.min_dt", ev.min_dt);
  in.num("evolution.boundary_mass_limit", ev.boundary_mass_limit);
  in.num("evolution.step_change_limit", ev.step_change_limit);
  in.num("evolution.drift_budget", ev.drift_budget);
  ev.validate();

  if (auto v = in.find("classify.symmetry")) {
    try {
      cfg.classify.symmetry = parse_symmetry(*v);
    } catch (const Error&) {
      bad("classify.symmetry: unknown symmetry '" + *v + "'");
    }
  }
  in.num("classify.band", cfg.classify.band);
  if (!(cfg.classify.band >= 0.0)) bad("classify.band must be non-negative");

  if (auto v = in.find("output.dir")) cfg.output.dir = *v;
  in.text("output.summary", cfg.output.summary);
  in.text("output.csv", cfg.output.csv);
  in.text("output.report", cfg.output.report);
  for (const std::string* name : {&cfg.output.summary, &cfg.output.csv, &cfg.output.report})
    if (name->empty() || fs::path(*name).has_parent_path()) bad("output file names must be plain names");

  if (auto v = in.find("cache.dir")) cfg.cache.dir = *v;
  in.boolean("cache.require_cached_groundstate", cfg.cache.require_cached_groundstate);

  cfg.verify.checks = all_checks();
  if (auto v = in.find("verify.checks")) {
    cfg.verify.checks = split_list(*v);
    const auto known = all_checks();
    for (const auto& name : cfg.verify.checks)
      if (std::find(known.begin(), known.end(), name) == known.end()) bad("verify.checks: unknown check '" + name + "'");
  }
  in.integer("verify.samples", cfg.verify.samples, 1);
  in.boolean("verify.order_table", cfg.verify.order_table);

  if (auto v = in.find("sweep.action")) {
    cfg.sweep.action = parse_action("sweep.action", *v);
    if (cfg.sweep.action == Action::sweep) bad("sweep.action cannot be sweep");
  }
  for (const auto& [key, value] : entries) {
    if (key.rfind("sweep.", 0) != 0 || key == "sweep.action") continue;
    auto values = split_list(value);
    if (values.empty()) bad(key + ": empty sweep list");
    cfg.sweep.axes.emplace_back(key.substr(6), std::move(values));
  }
  if (cfg.action == Action::sweep && cfg.sweep.axes.empty()) bad("action = sweep needs at least one sweep list");
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    bad(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  std::map<std::string, std::string> entries;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      entries[name] = trim(node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) entries[name + "." + key] = trim(leaf.data());
  }
  ExperimentConfig cfg = config_from_entries(entries);
  if (cfg.action == Action::sweep) {
    // Catch bad sweep values now rather than inside a worker.
    for (const auto& [key, values] : cfg.sweep.axes)
      for (const auto& v : values) {
        auto e = entries;
        e[key] = v;
        e["action"] = to_string(cfg.sweep.action);
        config_from_entries(e);
      }
  }
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot read config " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return parse_config(s.str());
}

json config_echo(const ExperimentConfig& cfg) {
  json j;
  j["action"] = to_string(cfg.action);
  j["seed"] = cfg.seed;
  j["params"] = {{"d", cfg.params.d}, {"b", cfg.params.b}, {"sigma", cfg.params.sigma}, {"c", cfg.params.c}};
  j["grid"] = {{"N", cfg.grid.N},
               {"R_max", cfg.grid.R_max},
               {"mapping", cfg.grid.mapping.kind == MappingKind::uniform ? "uniform" : "graded"},
               {"exponent", cfg.grid.mapping.exponent}};
  j["initial_data"] = {{"family", to_string(cfg.data.family)},
                       {"lambda", cfg.data.lambda},
                       {"mode", cfg.data.mode == ScaleMode::amplitude ? "amplitude" : "symmetry"},
                       {"amplitude", cfg.data.amplitude},
                       {"width", cfg.data.width},
                       {"chirp", cfg.data.chirp}};
  const EvolutionConfig& ev = cfg.evolution;
  j["evolution"] = {{"dt", ev.dt},
                    {"t_final", ev.t_final},
                    {"snapshot_stride", ev.snapshot_stride},
                    {"blowup_growth_factor", ev.blowup_growth_factor},
                    {"min_dt", ev.min_dt},
                    {"boundary_mass_limit", ev.boundary_mass_limit},
                    {"step_change_limit", ev.step_change_limit},
                    {"drift_budget", ev.drift_budget}};
  j["classify"] = {{"symmetry", to_string(cfg.classify.symmetry)}, {"band", cfg.classify.band}};
  json axes = json::object();
  for (const auto& [key, values] : cfg.sweep.axes) axes[key] = values;
  j["sweep"] = {{"action", to_string(cfg.sweep.action)}, {"axes", axes}};
  j["verify"] = {{"checks", cfg.verify.checks}, {"samples", cfg.verify.samples}, {"order_table", cfg.verify.order_table}};
  j["cache"] = {{"require_cached_groundstate", cfg.cache.require_cached_groundstate}};
  return j;
}

}  // namespace inls::harness
