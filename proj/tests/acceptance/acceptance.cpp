// Desk-scale acceptance criteria. Each criterion prints its measurements and
// one PASS/FAIL line; `--criterion N` runs a single one.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "inls/classifier.hpp"
#include "inls/evolution.hpp"
#include "inls/harness.hpp"
#include "inls/virial.hpp"
#include "support.hpp"

using namespace inls;
using namespace inls::testing;

namespace {

class Criterion {
 public:
  explicit Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

  // Records one measurement; the criterion passes only if every one does.
  bool expect(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    std::printf("  [%s] %s\n", ok ? "ok" : "FAIL", buf);
    std::fflush(stdout);
    pass_ = pass_ && ok;
    return ok;
  }
  void info(const std::string& s) const {
    std::printf("  note: %s\n", s.c_str());
    std::fflush(stdout);
  }
  bool finish() const {
    std::printf("criterion %d: %s (%s)\n", id_, pass_ ? "PASS" : "FAIL", title_.c_str());
    std::fflush(stdout);
    return pass_;
  }

 private:
  int id_;
  std::string title_;
  bool pass_ = true;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const double kCouplings[] = {-0.2, 0.0, 0.5};

Field scaled(const GroundStateBundle& gs, double lambda) {
  Field u = gs.field();
  for (auto& x : u) x *= lambda;
  return u;
}

double eight_g(const RadialGrid& g, const Params& p, const Field& u) { return 8.0 * snapshot(g, p, u, 0.0).g_value; }

Trajectory fixed_step_run(const Field& u0, const Params& p, const RadialGrid& g, double dt, double t_final, int stride) {
  EvolutionConfig cfg;
  cfg.dt = dt;
  cfg.t_final = t_final;
  cfg.snapshot_stride = stride;
  cfg.step_change_limit = 1e6;
  return evolve(u0, p, g, cfg);
}

bool pohozaev_suite() {
  Criterion c(1, "Pohozaev suite");
  std::vector<Params> cases;
  for (double cc : kCouplings) cases.push_back(reference_params(cc));
  cases.push_back(Params::validate(4, 0.5, 1.2, 0.0));
  for (const Params& p : cases) {
    auto grid = make_grid(p);
    const auto t0 = std::chrono::steady_clock::now();
    const GroundStateBundle gs = solve_ground_state(p, grid);
    const double secs = seconds_since(t0);
    const auto& r = gs.residuals_pohozaev;
    const double worst = *std::max_element(r.begin(), r.end());
    c.expect(worst <= 1e-5, "d=%d c=%g: max residual %.3e (limit 1e-5) [%.2e %.2e %.2e %.2e], %s", p.d, p.c, worst, r[0],
             r[1], r[2], r[3], grid->mapping_label().c_str());
    c.expect(secs <= 60.0, "d=%d c=%g: solve time %.3f s (limit 60 s)", p.d, p.c, secs);
  }
  return c.finish();
}

bool sharp_constants() {
  Criterion c(2, "sharp-constant consistency");
  for (double cc : kCouplings) {
    const GroundStateBundle& gs = cached_ground_state(reference_params(cc));
    const ThresholdRecord t = thresholds(gs);
    c.expect(t.C_GN_rel_diff <= 1e-5, "c=%g: C_GN Pohozaev form vs quotient of Q, rel diff %.3e", cc, t.C_GN_rel_diff);
    c.expect(t.H_G_rel_diff <= 1e-5, "c=%g: H_G energy form vs gradient form, rel diff %.3e", cc, t.H_G_rel_diff);
    std::mt19937_64 rng(100 + static_cast<int>(10 * cc));
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) worst = std::max(worst, gn_quotient(*gs.grid, gs.params, random_bumps(*gs.grid, rng)) / gs.C_GN);
    c.expect(worst <= 1.0 + 1e-6, "c=%g: 50 random fields, max quotient / C_GN = %.6f", cc, worst);
  }
  return c.finish();
}

bool hardy_sweep() {
  Criterion c(3, "Hardy sweep");
  for (double cc : {0.0, -0.2}) {
    const Params p = reference_params(cc);
    const auto g = make_grid(p);
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) worst = std::max(worst, hardy_ratio(*g, random_bumps(*g, rng)));
    c.expect(worst <= 1.0 + 1e-6, "%s: 100 random fields, max ratio %.6f", g->mapping_label().c_str(), worst);
    const double gr = hardy_ratio(*g, gaussian(*g));
    c.expect(std::abs(gr - 1.0 / 3.0) <= 1e-8, "%s: Gaussian ratio %.12f vs 1/3 (|diff| %.2e)", g->mapping_label().c_str(), gr,
             std::abs(gr - 1.0 / 3.0));
  }
  return c.finish();
}

bool virial_identity() {
  Criterion c(4, "virial identity");
  for (double cc : kCouplings) {
    const Params p = reference_params(cc);
    const auto g = make_grid(p);
    std::mt19937_64 rng(41);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const Field u = random_bumps(*g, rng);
      const double ref = eight_g(*g, p, u);
      worst = std::max(worst, std::abs(virial_acceleration(*g, p, u, VirialWeight::exact()) - ref) / std::max(1.0, std::abs(ref)));
    }
    c.expect(worst <= 1e-8, "c=%g: 50 random fields, max |V''_exact - 8G| / max(1,|8G|) = %.3e", cc, worst);
  }
  const Params p = reference_params();
  const GroundStateBundle& gs = cached_ground_state(p);
  // Collapsing data while the grid still resolves it.
  const double T = 0.015;
  const Trajectory coarse = fixed_step_run(scaled(gs, 1.1), p, *gs.grid, T / 80.0, T, 1);
  const Trajectory fine = fixed_step_run(scaled(gs, 1.1), p, *gs.grid, T / 160.0, T, 1);
  const double ratio = virial_refinement_ratio(coarse, fine);
  c.expect(ratio >= 3.0 && ratio <= 5.0, "1.1 Q on [0, %.3f]: mismatch ratio dt=T/80 vs T/160 = %.3f (want [3,5])", T, ratio);
  // Dispersing data, before the tail reaches the wall.
  const Trajectory sub_c = fixed_step_run(scaled(gs, 0.9), p, *gs.grid, 2.5e-4, 0.15, 1);
  const Trajectory sub_f = fixed_step_run(scaled(gs, 0.9), p, *gs.grid, 1.25e-4, 0.15, 1);
  const double sub_ratio = virial_refinement_ratio(sub_c, sub_f);
  c.expect(sub_ratio >= 3.0 && sub_ratio <= 5.0, "0.9 Q on [0, 0.15]: mismatch ratio dt=2.5e-4 vs 1.25e-4 = %.3f (want [3,5])",
           sub_ratio);
  const VirialConsistency rep = check_virial_consistency(sub_f);
  c.expect(rep.max_second_relative <= 1e-4, "0.9 Q: max |V''_fd - 8G| / max|8G| = %.3e at spacing %.2e", rep.max_second_relative,
           rep.spacing);
  c.info("the 0.9 Q window stops at t = 0.15: with R_max = 20 the fastest radiation meets the Dirichlet wall soon "
         "after (the outer-mass flag trips at t = 0.42) and the identity then picks up a boundary flux");
  return c.finish();
}

bool soliton_propagation() {
  Criterion c(5, "soliton propagation");
  const GroundStateBundle& gs = cached_ground_state(reference_params());
  EvolutionConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 2.0 * std::numbers::pi;
  const auto t0 = std::chrono::steady_clock::now();
  const SolitonErrors e = soliton_error(gs, cfg);
  const double secs = seconds_since(t0);
  c.expect(e.modulus_error <= 1e-4, "sup modulus error %.3e (limit 1e-4)", e.modulus_error);
  c.expect(e.phase_error <= 1e-3, "phase error %.3e (limit 1e-3)", e.phase_error);
  c.expect(e.mass_drift <= 1e-8, "mass drift %.3e (limit 1e-8)", e.mass_drift);
  c.expect(e.energy_drift <= 1e-6, "energy drift %.3e (limit 1e-6)", e.energy_drift);
  c.expect(secs <= 300.0, "runtime %.1f s (limit 300 s), %ld steps", secs, e.steps);
  if (e.first_exceed_time) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "modulus error first exceeds 1e-4 at t = %.4f; status %s", *e.first_exceed_time,
                  to_string(e.status.kind).c_str());
    c.info(buf);
  }
  c.info("Q is linearly unstable in this supercritical regime (growth rate about 34 for c = 0). The scheme seeds "
         "the unstable mode at about 1e-11, which reaches 1e-4 after ln(1e7)/34 = 0.47 time units; holding the "
         "profile to t = 2 pi would need a seed below 1e-96");
  return c.finish();
}

bool dichotomy() {
  Criterion c(6, "dichotomy at desk scale");
  const Params p = reference_params();
  const GroundStateBundle& gs = cached_ground_state(p);
  const double threshold = thresholds(gs).PM_lhs;

  const Classification below = classify(scaled(gs, 0.9), gs, DataSymmetry::radial);
  c.expect(below.regime == Regime::below_global, "0.9 Q classifies %s", to_string(below.regime).c_str());
  EvolutionConfig cfg;
  cfg.t_final = 5.0;
  cfg.snapshot_stride = 20;
  const Trajectory tr = evolve(scaled(gs, 0.9), p, *gs.grid, cfg);
  const TrajectoryCriteria crit = trajectory_criteria(tr, gs);
  const double t_end = tr.snapshots.back().t;
  const bool reached = std::abs(t_end - 5.0) < 1e-9 && tr.status.kind != StatusKind::blowup_detected &&
                       tr.status.kind != StatusKind::resolution_exhausted;
  c.expect(reached, "0.9 Q runs to t = %.6f, status %s (wall reached at t = %.4f)", t_end, to_string(tr.status.kind).c_str(),
           tr.boundary_time.value_or(-1.0));
  c.expect(crit.sup_potential_ratio < 1.0, "0.9 Q: sup_t P M^sigma_c / (P_G M_G^sigma_c) = %.6f < 1 (P_G M_G^sigma_c = %.6f)",
           crit.sup_potential_ratio, threshold);
  // Same run on a domain four times wider: the sup must not depend on the wall.
  {
    const Params q = p;
    auto wide = make_grid(q, 8192, 80.0);
    const GroundStateBundle gw = solve_ground_state(q, wide);
    const Trajectory tw = evolve(scaled(gw, 0.9), q, *wide, cfg);
    const double sw = trajectory_criteria(tw, gw).sup_potential_ratio;
    c.expect(std::abs(sw - crit.sup_potential_ratio) <= 1e-6 && std::abs(tw.snapshots.back().t - 5.0) < 1e-9,
             "R_max = 80, N = 8192: sup ratio %.9f (|diff| %.2e), wall reached at t = %.4f", sw,
             std::abs(sw - crit.sup_potential_ratio), tw.boundary_time.value_or(-1.0));
  }

  const Classification above = classify(scaled(gs, 1.1), gs, DataSymmetry::radial);
  c.expect(above.regime == Regime::below_blowup && above.strength == BlowupStrength::finite_time,
           "1.1 Q classifies %s, strength %s", to_string(above.regime).c_str(), to_string(above.strength).c_str());

  // Collapse needs the steeper p = 5 grading: the core contracts by ~1e16.
  std::vector<double> times;
  for (const auto& [n, dt] : std::vector<std::pair<std::size_t, double>>{{2048, 1e-3}, {2048, 5e-4}, {4096, 1e-3}}) {
    const GroundStateBundle& g5 = cached_ground_state(p, n, 20.0, 5.0);
    EvolutionConfig bc;
    bc.dt = dt;
    bc.t_final = 0.1;
    bc.snapshot_stride = 50;
    const Trajectory tb = evolve(scaled(g5, 1.1), p, *g5.grid, bc);
    const double growth = std::sqrt(tb.peak_h1c_sq / tb.initial_h1c_sq);
    c.expect(tb.status.kind == StatusKind::blowup_detected && growth >= 100.0,
             "1.1 Q, N=%zu dt=%g: %s, H^1_c norm growth %.1f, T* = %.6f", n, dt, to_string(tb.status.kind).c_str(), growth,
             tb.T_star_estimate.value_or(-1.0));
    if (tb.T_star_estimate) times.push_back(*tb.T_star_estimate);
  }
  if (times.size() == 3) {
    const double lo = *std::min_element(times.begin(), times.end()), hi = *std::max_element(times.begin(), times.end());
    c.expect((hi - lo) / lo <= 0.1, "detection time spread under dt and N refinement %.3e (limit 0.1)", (hi - lo) / lo);
  } else {
    c.expect(false, "detection time unavailable for some runs");
  }
  return c.finish();
}

bool at_threshold() {
  Criterion c(7, "at-threshold fixed point");
  for (double cc : kCouplings) {
    const GroundStateBundle& gs = cached_ground_state(reference_params(cc));
    const Classification k = classify(gs.field(), gs, DataSymmetry::radial);
    const Certificates& q = k.certificates;
    const double worst = std::max({std::abs(q.energy - 1.0), std::abs(q.gradient - 1.0), std::abs(q.potential - 1.0)});
    c.expect(k.regime == Regime::at_soliton && worst <= 1e-5, "c=%g: %s, certificates %.10f %.10f %.10f (max |.-1| %.2e)", cc,
             to_string(k.regime).c_str(), q.energy, q.gradient, q.potential, worst);
  }
  return c.finish();
}

bool x0_machinery() {
  Criterion c(8, "x0 machinery");
  const GroundStateBundle& gs = cached_ground_state(reference_params());
  const RadialGrid& g = *gs.grid;
  std::mt19937_64 rng(88);
  double root = 0.0, fixed = 0.0;
  int sign_bad = 0, composite_bad = 0, above = 0;
  for (int k = 0; k < 20; ++k) {
    const InvariantSnapshot s = snapshot(g, gs.params, random_bumps(g, rng), 0.0);
    const ThresholdAnalysis t = threshold_x0(s, gs);
    const double scale = std::max(1.0, std::abs(t.sixteenE));
    root = std::max(root, std::abs(x0_by_root_finding(s, gs) - t.x0) / scale);
    fixed = std::max(fixed, std::abs(t.f_at_x0 - t.x0 / 8.0) / scale);
    if (t.energy_at_or_above != t.x0_nonnegative) ++sign_bad;
    if (s.energy > 0.0 && t.composite_holds != t.derivative_dominates) ++composite_bad;
    if (t.x0_nonnegative) ++above;
  }
  c.expect(root <= 1e-8, "closed form vs root of f': max scaled |diff| %.3e", root);
  c.expect(fixed <= 1e-8, "f(x0) = x0/8: max scaled |diff| %.3e", fixed);
  c.expect(sign_bad == 0, "energy-threshold vs x0 sign disagreements: %d of 20 (%d at or above)", sign_bad, above);
  c.expect(composite_bad == 0, "composite vs derivative condition disagreements: %d", composite_bad);
  return c.finish();
}

bool inequality_sweeps() {
  Criterion c(9, "inequality sweeps");
  const GroundStateBundle& gs = cached_ground_state(reference_params());
  const RadialGrid& g = *gs.grid;
  std::mt19937_64 rng(99);
  int bad_u = 0, bad_m = 0;
  double worst_u = -1.0, worst_m = -1e300;
  for (int k = 0; k < 100; ++k) {
    const Field u = random_bumps(g, rng);
    const auto [lu, ru] = check_uncertainty(g, u);
    const auto [lm, rm] = check_momentum_bound(g, gs.params, u, &gs);
    if (!within_slack(lu, ru)) ++bad_u;
    if (!within_slack(lm, rm)) ++bad_m;
    worst_u = std::max(worst_u, (lu - ru) / ru);
    worst_m = std::max(worst_m, (lm - rm) / std::max(std::abs(rm), 1e-300));
  }
  c.expect(bad_u == 0, "uncertainty bound: %d violations in 100, max relative excess %.3e", bad_u, worst_u);
  c.expect(bad_m == 0, "momentum bound: %d violations in 100, max relative excess %.3e", bad_m, worst_m);
  const auto [l0, r0] = check_uncertainty(g, gaussian(g));
  c.expect(std::abs(l0 - r0) / l0 <= 1e-8, "Gaussian saturates the uncertainty bound: rel gap %.3e", std::abs(l0 - r0) / l0);
  return c.finish();
}

bool cutoff_construction() {
  Criterion c(10, "cutoff construction");
  const Params p = reference_params();
  const auto g = make_grid(p);
  for (double R : {2.0, 5.0, 10.0, 20.0}) {
    const VirialCutoff cut = build_cutoff(R, *g);
    double branch = 0.0, i1 = -1e300, i2 = -1e300, i3 = -1e300;
    for (std::size_t j = 0; j < g->N; ++j) {
      const double r = g->r[j];
      if (r <= R) branch = std::max(branch, std::abs(cut.phi[j] - r * r));
      if (r >= 2.0 * R) branch = std::max(branch, std::abs(cut.phi[j]));
      i1 = std::max(i1, cut.d2phi[j] - 2.0);
      i2 = std::max(i2, cut.dphi[j] / r - 2.0);
      i3 = std::max(i3, cut.laplacian[j] - 2.0 * p.d);
    }
    c.expect(branch == 0.0 && i1 <= 1e-12 && i2 <= 1e-12 && i3 <= 1e-12,
             "R=%g: branch error %.1e, max(phi''-2) %.1e, max(phi'/r-2) %.1e, max(lap phi-2d) %.1e", R, branch, i1, i2, i3);
  }
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> chirp(-0.5, 0.5), width(1.0, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Field u = compact_bump(*g, width(rng), chirp(rng));
    const double ref = eight_g(*g, p, u);
    worst = std::max(worst, std::abs(virial_acceleration(*g, p, u, VirialWeight::cutoff(20.0)) - ref) / std::max(1.0, std::abs(ref)));
  }
  c.expect(worst <= 1e-4, "R=20, 20 fields supported in r <= 2: max |V''_phiR - 8G| / max(1,|8G|) = %.3e", worst);
  return c.finish();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

bool reproducibility() {
  namespace h = inls::harness;
  Criterion c(11, "reproducibility");
  std::random_device rd;
  const auto root = std::filesystem::temp_directory_path() / ("inls-accept-" + std::to_string(rd()));
  std::filesystem::create_directories(root);
  const std::pair<const char*, const char*> experiments[] = {
      {"ground-state", "action = ground-state\n[params]\nc = -0.2\n"},
      {"classify", "action = classify\n[initial_data]\nfamily = scaled_ground_state\nlambda = 0.9\n"},
      {"evolve", "action = evolve\n[initial_data]\nfamily = chirped_gaussian\namplitude = 2\nchirp = 0.2\n"
                 "[evolution]\nt_final = 0.2\n"},
      {"verify", "action = verify\n[grid]\nN = 1024\n[verify]\nsamples = 20\n"},
      {"sweep", "action = sweep\n[grid]\nN = 512\n[initial_data]\nfamily = scaled_ground_state\n"
                "[sweep]\naction = classify\nparams.c = 0, 0.5\ninitial_data.lambda = 0.9, 1.1\n"},
  };
  for (const auto& [name, text] : experiments) {
    h::ExperimentConfig cfg = h::parse_config(text);
    cfg.quiet = true;
    cfg.cache.dir = root / "cache";
    std::string runs[3];
    for (int k = 0; k < 3; ++k) {
      cfg.output.dir = root / name / std::to_string(k);
      const h::RunResult r = h::run_experiment(cfg);
      runs[k] = slurp(r.artifacts.front());
      for (std::size_t a = 1; a < r.artifacts.size(); ++a) runs[k] += slurp(r.artifacts[a]);
    }
    // Run 0 starts cold for its ground state; runs 1 and 2 hit the warm cache.
    c.expect(runs[1] == runs[2] && runs[0] == runs[1] && !runs[0].empty(), "%s: cold, warm and warm outputs byte-identical (%zu bytes)",
             name, runs[0].size());
  }
  std::error_code ec;
  std::filesystem::remove_all(root, ec);
  return c.finish();
}

}  // namespace

int main(int argc, char** argv) {
  const std::function<bool()> criteria[] = {pohozaev_suite,   sharp_constants,  hardy_sweep, virial_identity,
                                            soliton_propagation, dichotomy,     at_threshold, x0_machinery,
                                            inequality_sweeps, cutoff_construction, reproducibility};
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > 11) {
    std::fprintf(stderr, "criterion must be 1..11\n");
    return 2;
  }
  int failed = 0;
  for (int k = 1; k <= 11; ++k) {
    if (only != 0 && k != only) continue;
    try {
      if (!criteria[k - 1]()) ++failed;
    } catch (const std::exception& e) {
      std::printf("  [FAIL] exception: %s\ncriterion %d: FAIL\n", e.what(), k);
      ++failed;
    }
  }
  return failed == 0 ? 0 : 1;
}
