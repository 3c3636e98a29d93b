#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <thread>

#include "inls/error.hpp"
#include "inls/harness.hpp"
#include "inls/virial.hpp"

namespace inls::harness {

namespace {

std::mutex log_mutex;

void note(const ExperimentConfig& cfg, const std::string& msg) {
  if (cfg.quiet) return;
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "inls: " << msg << "\n";
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::string profile_text(const Profile& Q) {
  std::string out;
  char buf[40];
  for (double q : Q) {
    std::snprintf(buf, sizeof buf, "%.17g\n", q);
    out += buf;
  }
  return out;
}

json grid_json(const RadialGrid& g) {
  return {{"N", g.N},
          {"R_max", g.R_max},
          {"mapping", g.mapping_label()},
          {"exponent", g.exponent},
          {"r_min", g.r.front()},
          {"hardy_ratio", g.hardy_ratio}};
}

void prepare_output(const ExperimentConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output.dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + cfg.output.dir.string());
}

json header(const ExperimentConfig& cfg) {
  json echo = config_echo(cfg);
  json j;
  j["action"] = to_string(cfg.action);
  j["input_hash"] = git_blob_hash(echo.dump());
  j["config"] = std::move(echo);
  return j;
}

GroundStateBundle ground_state_for(const ExperimentConfig& cfg) {
  bool hit = false;
  GroundStateBundle gs = GroundStateCache(cfg.cache.dir).obtain(cfg.params, cfg.grid, cfg.cache.require_cached_groundstate, &hit);
  note(cfg, std::string("ground state ") + (hit ? "loaded from cache" : "solved and cached") + " [" +
                GroundStateCache::key(cfg.params, cfg.grid) + "]");
  return gs;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::string out = "t,mass,h1c_sq,energy,potential,g_value,variance,variance_rate,dt\n";
  char buf[512];
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    const InvariantSnapshot& s = tr.snapshots[i];
    const double dt = i < tr.step_sizes.size() ? tr.step_sizes[i] : 0.0;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.t, s.mass, s.h1c_sq,
                  s.energy, s.potential, s.g_value, s.variance, s.variance_rate, dt);
    out += buf;
  }
  return out;
}

json trajectory_json(const Trajectory& tr) {
  json j;
  j["status"] = to_string(tr.status.kind);
  j["status_time"] = tr.status.t;
  j["T_star_estimate"] = optional_number(tr.T_star_estimate);
  j["boundary_time"] = optional_number(tr.boundary_time);
  j["initial_h1c_sq"] = tr.initial_h1c_sq;
  j["final_h1c_sq"] = tr.final_h1c_sq;
  j["peak_h1c_sq"] = tr.peak_h1c_sq;
  j["h1c_norm_growth"] = tr.initial_h1c_sq > 0.0 ? std::sqrt(tr.peak_h1c_sq / tr.initial_h1c_sq) : 0.0;
  j["final_time"] = tr.snapshots.empty() ? 0.0 : tr.snapshots.back().t;
  j["final_dt"] = tr.final_dt;
  j["floor_hit"] = tr.floor_hit;
  j["grid_exhausted"] = tr.grid_exhausted;
  j["mass_drift"] = tr.mass_drift;
  j["energy_drift"] = tr.energy_drift;
  j["energy_drift_vs_h"] = tr.energy_drift_vs_h;
  j["steps"] = tr.steps;
  j["rejected"] = tr.rejected;
  j["snapshots"] = tr.snapshots.size();
  try {
    const VirialConsistency v = check_virial_consistency(tr);
    j["virial"] = {{"max_second_mismatch", v.max_second_mismatch},
                   {"max_second_relative", v.max_second_relative},
                   {"max_first_mismatch", v.max_first_mismatch},
                   {"spacing", v.spacing},
                   {"points", v.points}};
  } catch (const Error& e) {
    // Adaptive steps leave the snapshots unevenly spaced.
    j["virial"] = {{"skipped", std::string(to_string(e.code()))}};
  }
  return j;
}

RunResult run_ground_state(const ExperimentConfig& cfg) {
  prepare_output(cfg);
  const GroundStateBundle gs = ground_state_for(cfg);
  RunResult res;
  json s = header(cfg);
  s["grid"] = grid_json(*gs.grid);
  s["ground_state"] = to_json(gs);
  const DerivedExponents ex = derived_exponents(cfg.params);
  s["derived"] = {{"c_crit", ex.c_crit}, {"s_c", ex.s_c}, {"sigma_c", ex.sigma_c}};
  res.summary = std::move(s);
  return res;
}

RunResult run_classify(const ExperimentConfig& cfg) {
  prepare_output(cfg);
  const GroundStateBundle gs = ground_state_for(cfg);
  const Field u0 = initial_field(cfg, gs);
  RunResult res;
  json s = header(cfg);
  s["grid"] = grid_json(*gs.grid);
  s["ground_state"] = to_json(gs);
  s["initial_data"] = to_json(snapshot(*gs.grid, cfg.params, u0, 0.0));
  const Classification c = classify(u0, gs, cfg.classify.symmetry, cfg.classify.band);
  s["classification"] = to_json(c);
  note(cfg, "regime " + to_string(c.regime));
  res.summary = std::move(s);
  return res;
}

RunResult run_evolve(const ExperimentConfig& cfg) {
  prepare_output(cfg);
  const GroundStateBundle gs = ground_state_for(cfg);
  const Field u0 = initial_field(cfg, gs);
  const Trajectory tr = evolve(u0, cfg.params, *gs.grid, cfg.evolution);
  note(cfg, "evolution " + to_string(tr.status.kind) + " after " + std::to_string(tr.steps) + " steps");

  RunResult res;
  const fs::path csv = cfg.output.dir / cfg.output.csv;
  write_text(csv, trajectory_csv(tr));
  res.artifacts.push_back(csv);

  json s = header(cfg);
  s["grid"] = grid_json(*gs.grid);
  s["ground_state"] = to_json(gs);
  s["initial_data"] = to_json(snapshot(*gs.grid, cfg.params, u0, 0.0));
  s["classification"] = to_json(classify(u0, gs, cfg.classify.symmetry, cfg.classify.band));
  s["trajectory"] = trajectory_json(tr);
  const TrajectoryCriteria crit = trajectory_criteria(tr, gs);
  s["criteria"] = {{"sup_potential_ratio", crit.sup_potential_ratio},
                   {"sup_g", crit.sup_g},
                   {"delta", crit.delta},
                   {"label", crit.label}};
  s["csv"] = cfg.output.csv;
  res.summary = std::move(s);
  return res;
}

std::string job_name(const std::vector<std::pair<std::string, std::string>>& values) {
  std::string name;
  for (const auto& [key, v] : values) {
    if (!name.empty()) name += "__";
    name += key + "=" + v;
  }
  std::replace(name.begin(), name.end(), '/', '_');
  return name;
}

RunResult run_sweep(const ExperimentConfig& cfg) {
  prepare_output(cfg);
  // Cartesian product of the axes, first axis slowest.
  std::vector<std::vector<std::pair<std::string, std::string>>> jobs(1);
  for (const auto& [key, values] : cfg.sweep.axes) {
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& partial : jobs)
      for (const auto& v : values) {
        auto j = partial;
        j.emplace_back(key, v);
        next.push_back(std::move(j));
      }
    jobs = std::move(next);
  }

  std::vector<json> records(jobs.size());
  std::vector<int> codes(jobs.size(), 0);
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t k = cursor++; k < jobs.size(); k = cursor++) {
      auto entries = cfg.entries;
      for (auto it = entries.begin(); it != entries.end();)
        it = it->first.rfind("sweep.", 0) == 0 ? entries.erase(it) : std::next(it);
      for (const auto& [key, v] : jobs[k]) entries[key] = v;
      entries["action"] = to_string(cfg.sweep.action);
      json rec;
      rec["dir"] = job_name(jobs[k]);
      json vals = json::object();
      for (const auto& [key, v] : jobs[k]) vals[key] = v;
      rec["values"] = vals;
      try {
        ExperimentConfig job = config_from_entries(entries);
        job.seed = cfg.seed;
        job.quiet = true;
        job.cache = cfg.cache;
        job.output = cfg.output;
        job.output.dir = cfg.output.dir / job_name(jobs[k]);
        const RunResult r = run_experiment(job);
        codes[k] = r.exit_code;
        rec["exit_code"] = r.exit_code;
        rec["input_hash"] = r.summary.value("input_hash", "");
        if (r.summary.contains("classification")) rec["regime"] = r.summary["classification"]["regime"];
        if (r.summary.contains("trajectory")) rec["status"] = r.summary["trajectory"]["status"];
        if (r.summary.contains("all_passed")) rec["all_passed"] = r.summary["all_passed"];
      } catch (const Error& e) {
        codes[k] = exit_code_for(e.code());
        rec["exit_code"] = codes[k];
        rec["error"] = std::string(e.what());
      }
      note(cfg, "sweep job " + rec["dir"].get<std::string>() + " exit " + std::to_string(codes[k]));
      records[k] = std::move(rec);
    }
  };
  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min<std::size_t>(jobs.size(), std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  RunResult res;
  json s = header(cfg);
  s["jobs"] = records;
  res.exit_code = *std::max_element(codes.begin(), codes.end());
  s["exit_code"] = res.exit_code;
  res.summary = std::move(s);
  return res;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigParseError:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::DimensionTooSmall:
    case ErrorCode::BOutOfRange:
    case ErrorCode::SigmaNotIntercritical:
    case ErrorCode::CouplingBelowHardy:
    case ErrorCode::InvalidResolution:
    case ErrorCode::ScaleOutOfRange:
    case ErrorCode::CutoffInfeasible:
      return 2;
    case ErrorCode::IoError:
    case ErrorCode::CacheMiss:
      return 3;
    default:
      return 1;
  }
}

Field initial_field(const ExperimentConfig& cfg, const GroundStateBundle& gs) {
  const RadialGrid& g = *gs.grid;
  const InitialData& d = cfg.data;
  switch (d.family) {
    case Family::ground_state:
      return gs.field();
    case Family::scaled_ground_state:
      return rescale_data(g, cfg.params, gs.field(), d.lambda, d.mode);
    case Family::gaussian:
    case Family::chirped_gaussian: {
      const double chirp = d.family == Family::chirped_gaussian ? d.chirp : 0.0;
      Field u(g.N);
      for (std::size_t j = 0; j < g.N; ++j) {
        const double r = g.r[j];
        u[j] = d.amplitude * std::exp(-0.5 * r * r / (d.width * d.width)) * std::polar(1.0, chirp * r * r);
      }
      return u;
    }
  }
  return {};
}

json to_json(const GroundStateBundle& gs) {
  const ThresholdRecord t = thresholds(gs);
  json j;
  j["M_G"] = gs.M_G;
  j["E_G"] = gs.E_G;
  j["S_G"] = gs.S_G;
  j["P_G"] = gs.P_G;
  j["C_GN"] = gs.C_GN;
  j["K_G"] = gs.K_G;
  j["H_G"] = gs.H_G;
  j["Q0"] = gs.Q.front();
  j["residual_elliptic"] = gs.residual_elliptic;
  j["residual_strong"] = gs.residual_strong;
  j["residuals_pohozaev"] = gs.residuals_pohozaev;
  j["thresholds"] = {{"C_GN_pohozaev", t.C_GN_pohozaev}, {"C_GN_direct", t.C_GN_direct},
                     {"C_GN_rel_diff", t.C_GN_rel_diff}, {"H_G_energy", t.H_G_energy},
                     {"H_G_pohozaev", t.H_G_pohozaev},   {"H_G_rel_diff", t.H_G_rel_diff},
                     {"PM_lhs", t.PM_lhs},               {"PM_rhs", t.PM_rhs},
                     {"PM_rel_diff", t.PM_rel_diff}};
  j["seed"] = gs.seed;
  j["iterations"] = gs.iterations;
  j["newton_iterations"] = gs.newton_iterations;
  j["profile_hash"] = git_blob_hash(profile_text(gs.Q));
  return j;
}

json to_json(const InvariantSnapshot& s) {
  return {{"t", s.t},           {"mass", s.mass},         {"h1c_sq", s.h1c_sq},
          {"energy", s.energy}, {"potential", s.potential}, {"g_value", s.g_value},
          {"variance", s.variance}, {"variance_rate", s.variance_rate}};
}

json to_json(const Classification& c) {
  const Certificates& k = c.certificates;
  const ThresholdAnalysis& a = c.analysis;
  json j;
  j["regime"] = to_string(c.regime);
  j["basis"] = c.theorem_tag;
  j["strength"] = to_string(c.strength);
  j["band"] = c.band;
  j["certificates"] = {{"energy", k.energy},       {"gradient", k.gradient},
                       {"potential", k.potential}, {"variance", k.variance},
                       {"variance_rate", k.variance_rate}, {"x0", k.x0},
                       {"zprime_sq", k.zprime_sq}, {"half_x0", k.half_x0},
                       {"composite", k.composite}};
  j["analysis"] = {{"x0", a.x0},
                   {"f_at_x0", a.f_at_x0},
                   {"fprime_at_x0", a.fprime_at_x0},
                   {"sixteenE", a.sixteenE},
                   {"energy_at_or_above", a.energy_at_or_above},
                   {"x0_nonnegative", a.x0_nonnegative},
                   {"composite_holds", a.composite_holds},
                   {"derivative_dominates", a.derivative_dominates}};
  return j;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult res;
  switch (cfg.action) {
    case Action::ground_state: res = run_ground_state(cfg); break;
    case Action::classify: res = run_classify(cfg); break;
    case Action::evolve: res = run_evolve(cfg); break;
    case Action::sweep: res = run_sweep(cfg); break;
    case Action::verify: return verify_suite(cfg);
  }
  const fs::path path = cfg.output.dir / cfg.output.summary;
  write_text(path, dump(res.summary));
  res.artifacts.insert(res.artifacts.begin(), path);
  return res;
}

int run_guarded(const ExperimentConfig& cfg, std::string* message) {
  try {
    return run_experiment(cfg).exit_code;
  } catch (const Error& e) {
    if (message) *message = std::string(e.what());
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    if (message) *message = std::string("IoError: ") + e.what();
    return 3;
  }
}

}  // namespace inls::harness
