#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>

#include "inls/error.hpp"
#include "inls/harness.hpp"
#include "inls/virial.hpp"

namespace inls::harness {

namespace {

struct Check {
  std::string name;
  json measurements = json::array();
  bool passed = true;

  // value <= limit passes unless an explicit verdict is given.
  void measure(const std::string& what, double value, double limit, std::optional<bool> verdict = std::nullopt) {
    const bool ok = verdict ? *verdict : (std::isfinite(value) && value <= limit);
    passed = passed && ok;
    measurements.push_back({{"name", what}, {"value", value}, {"limit", limit}, {"passed", ok}});
  }
};

// Smooth random field: a few Gaussian bumps with optional chirp.
Field random_bumps(const RadialGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.2, 2.0), centre(0.0, 3.0), width(0.3, 1.5), chirp(-0.5, 0.5);
  std::uniform_int_distribution<int> count(1, 4);
  Field u(g.N, 0.0);
  const int n = count(rng);
  for (int k = 0; k < n; ++k) {
    const double a = amp(rng), c0 = centre(rng), w = width(rng), ch = chirp(rng);
    for (std::size_t j = 0; j < g.N; ++j) {
      const double r = g.r[j];
      const double env = std::exp(-0.5 * (r - c0) * (r - c0) / (w * w)) + std::exp(-0.5 * (r + c0) * (r + c0) / (w * w));
      u[j] += a * env * std::polar(1.0, ch * r * r);
    }
  }
  return u;
}

Field gaussian(const RadialGrid& g, double chirp = 0.0) {
  Field u(g.N);
  for (std::size_t j = 0; j < g.N; ++j) u[j] = std::exp(-0.5 * g.r[j] * g.r[j]) * std::polar(1.0, chirp * g.r[j] * g.r[j]);
  return u;
}

Field compact_bump(const RadialGrid& g, double s, double chirp) {
  Field u(g.N, 0.0);
  for (std::size_t j = 0; j < g.N; ++j) {
    const double x = g.r[j] / s;
    if (x < 1.0) u[j] = std::pow(1.0 - x * x, 6) * std::polar(1.0, chirp * g.r[j] * g.r[j]);
  }
  return u;
}

double eight_g(const RadialGrid& g, const Params& p, const Field& u) { return 8.0 * snapshot(g, p, u, 0.0).g_value; }

double relative_excess(double lhs, double rhs) { return (lhs - rhs) / std::max(std::abs(rhs), 1e-300); }

struct Context {
  const ExperimentConfig& cfg;
  const GroundStateBundle& gs;
  const RadialGrid& g;
  const Params& p;
  std::uint64_t seed;
  int samples;
};

Check check_hardy(const Context& cx) {
  Check c{"hardy"};
  const double d = cx.p.d;
  c.measure("gaussian ratio vs (d-2)/d", std::abs(hardy_ratio(cx.g, gaussian(cx.g)) - (d - 2.0) / d), 1e-8);
  c.measure("worst probe ratio - 1", cx.g.hardy_ratio - 1.0, 1e-6);
  std::mt19937_64 rng(cx.seed);
  double worst = -1.0;
  for (int k = 0; k < cx.samples; ++k) worst = std::max(worst, hardy_ratio(cx.g, random_bumps(cx.g, rng)) - 1.0);
  c.measure("random fields max ratio - 1", worst, 1e-6);
  return c;
}

Check check_pohozaev(const Context& cx) {
  Check c{"pohozaev"};
  const char* names[4] = {"mass vs gradient", "mass vs potential", "energy vs gradient", "energy vs potential"};
  for (int i = 0; i < 4; ++i) c.measure(names[i], cx.gs.residuals_pohozaev[i], 1e-5);
  c.measure("elliptic backward error", cx.gs.residual_elliptic, 1e-8);
  return c;
}

Check check_gn(const Context& cx) {
  Check c{"gn_constant"};
  const ThresholdRecord t = thresholds(cx.gs);
  c.measure("C_GN closed form vs quotient of Q", t.C_GN_rel_diff, 1e-5);
  std::mt19937_64 rng(cx.seed + 1);
  double worst = -1.0;
  for (int k = 0; k < cx.samples; ++k)
    worst = std::max(worst, gn_quotient(cx.g, cx.p, random_bumps(cx.g, rng)) / cx.gs.C_GN - 1.0);
  c.measure("random fields max quotient / C_GN - 1", worst, 1e-6);
  return c;
}

Check check_thresholds(const Context& cx) {
  Check c{"thresholds"};
  const ThresholdRecord t = thresholds(cx.gs);
  c.measure("H_G energy vs gradient form", t.H_G_rel_diff, 1e-5);
  c.measure("P_G M_G^sigma_c vs K_G form", t.PM_rel_diff, 1e-5);
  return c;
}

Check check_virial(const Context& cx) {
  Check c{"virial_identity"};
  std::mt19937_64 rng(cx.seed + 2);
  double worst = 0.0;
  for (int k = 0; k < cx.samples; ++k) {
    const Field u = random_bumps(cx.g, rng);
    const double ref = eight_g(cx.g, cx.p, u);
    worst = std::max(worst, std::abs(virial_acceleration(cx.g, cx.p, u, VirialWeight::exact()) - ref) /
                                std::max(1.0, std::abs(ref)));
  }
  c.measure("exact weight acceleration vs 8G", worst, 1e-8);
  const double q = virial_acceleration(cx.g, cx.p, cx.gs.field(), VirialWeight::exact());
  c.measure("acceleration of Q / S_G^2", std::abs(q) / (cx.gs.S_G * cx.gs.S_G), 1e-6);
  return c;
}

Check check_cutoff(const Context& cx) {
  Check c{"cutoff"};
  for (double R : {2.0, 5.0, 10.0, 20.0}) {
    const VirialCutoff cut = build_cutoff(R, cx.g);
    double branch = 0.0, ineq = 0.0;
    for (std::size_t j = 0; j < cx.g.N; ++j) {
      const double r = cx.g.r[j];
      if (r <= R) branch = std::max(branch, std::abs(cut.phi[j] - r * r));
      if (r >= 2.0 * R) branch = std::max(branch, std::abs(cut.phi[j]));
      ineq = std::max({ineq, cut.d2phi[j] - 2.0, cut.dphi[j] / r - 2.0, cut.laplacian[j] - 2.0 * cx.p.d});
    }
    char label[64];
    std::snprintf(label, sizeof label, "R=%g branch error", R);
    c.measure(label, branch, 0.0);
    std::snprintf(label, sizeof label, "R=%g inequality excess", R);
    c.measure(label, ineq, 1e-12);
  }
  double worst = 0.0;
  for (double chirp : {0.0, 0.4}) {
    const Field u = compact_bump(cx.g, 2.0, chirp);
    const double ref = eight_g(cx.g, cx.p, u);
    worst = std::max(worst, std::abs(virial_acceleration(cx.g, cx.p, u, VirialWeight::cutoff(20.0)) - ref) /
                                std::max(1.0, std::abs(ref)));
  }
  c.measure("R=20 acceleration vs 8G, support r<=2", worst, 1e-4);
  return c;
}

Check check_uncertainty(const Context& cx) {
  Check c{"uncertainty"};
  const auto [l0, r0] = check_uncertainty(cx.g, gaussian(cx.g));
  c.measure("gaussian saturation", std::abs(l0 - r0) / l0, 1e-8);
  std::mt19937_64 rng(cx.seed + 3);
  double worst = -1.0;
  bool ok = true;
  for (int k = 0; k < cx.samples; ++k) {
    const auto [l, r] = check_uncertainty(cx.g, random_bumps(cx.g, rng));
    worst = std::max(worst, relative_excess(l, r));
    ok = ok && within_slack(l, r);
  }
  c.measure("random fields max relative excess", worst, 1e-6, ok);
  return c;
}

Check check_momentum(const Context& cx) {
  Check c{"momentum_bound"};
  std::mt19937_64 rng(cx.seed + 4);
  double worst = -1e300;
  bool ok = true;
  auto probe = [&](const Field& u) {
    const auto [l, r] = check_momentum_bound(cx.g, cx.p, u, &cx.gs);
    worst = std::max(worst, relative_excess(l, r));
    ok = ok && within_slack(l, r);
  };
  for (int k = 0; k < cx.samples; ++k) probe(random_bumps(cx.g, rng));
  for (double chirp : {0.1, 0.5, 2.0}) probe(gaussian(cx.g, chirp));
  c.measure("max relative excess", worst, 1e-6, ok);
  return c;
}

Check check_x0(const Context& cx) {
  Check c{"x0"};
  std::mt19937_64 rng(cx.seed + 5);
  double root = 0.0, fixed = 0.0;
  int sign_mismatch = 0, composite_mismatch = 0;
  for (int k = 0; k < cx.samples; ++k) {
    const InvariantSnapshot s = snapshot(cx.g, cx.p, random_bumps(cx.g, rng), 0.0);
    const ThresholdAnalysis t = threshold_x0(s, cx.gs);
    const double scale = std::max(1.0, std::abs(t.sixteenE));
    root = std::max(root, std::abs(x0_by_root_finding(s, cx.gs) - t.x0) / scale);
    fixed = std::max(fixed, std::abs(t.f_at_x0 - t.x0 / 8.0) / scale);
    if (t.energy_at_or_above != t.x0_nonnegative) ++sign_mismatch;
    if (s.energy > 0.0 && t.composite_holds != t.derivative_dominates) ++composite_mismatch;
  }
  c.measure("closed form vs root of f'", root, 1e-8);
  c.measure("f(x0) - x0/8", fixed, 1e-8);
  c.measure("energy sign vs x0 sign disagreements", sign_mismatch, 0.0);
  c.measure("composite vs derivative disagreements", composite_mismatch, 0.0);
  return c;
}

// Ground-state constants at N/4, N/2, N with observed orders.
json order_table(const ExperimentConfig& cfg) {
  json rows = json::array();
  std::vector<GroundStateBundle> bundles;
  for (std::size_t div : {4u, 2u, 1u}) {
    GridConfig grid = cfg.grid;
    grid.N = cfg.grid.N / div;
    if (grid.N < 64) continue;
    GroundStateBundle gs = GroundStateCache(cfg.cache.dir).obtain(cfg.params, grid, false);
    const auto& r = gs.residuals_pohozaev;
    rows.push_back({{"N", grid.N},
                    {"M_G", gs.M_G},
                    {"E_G", gs.E_G},
                    {"C_GN", gs.C_GN},
                    {"max_pohozaev", *std::max_element(r.begin(), r.end())}});
    bundles.push_back(std::move(gs));
  }
  json orders = json::object();
  if (bundles.size() == 3) {
    auto order = [&](std::function<double(const GroundStateBundle&)> q) -> json {
      const double a = std::abs(q(bundles[0]) - q(bundles[1])), b = std::abs(q(bundles[1]) - q(bundles[2]));
      if (!(a > 0.0) || !(b > 0.0)) return nullptr;
      return std::log2(a / b);
    };
    orders["M_G"] = order([](const GroundStateBundle& g) { return g.M_G; });
    orders["E_G"] = order([](const GroundStateBundle& g) { return g.E_G; });
    orders["C_GN"] = order([](const GroundStateBundle& g) { return g.C_GN; });
  }
  return {{"rows", rows}, {"observed_order", orders}};
}

}  // namespace

RunResult verify_suite(const ExperimentConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output.dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + cfg.output.dir.string());

  json echo = config_echo(cfg);
  json report;
  report["action"] = "verify";
  report["input_hash"] = git_blob_hash(echo.dump());
  report["config"] = echo;

  std::vector<Check> checks;
  if (!cfg.verify.checks.empty()) {
    const GroundStateBundle gs = GroundStateCache(cfg.cache.dir).obtain(cfg.params, cfg.grid, cfg.cache.require_cached_groundstate);
    const Context cx{cfg, gs, *gs.grid, cfg.params, cfg.seed, cfg.verify.samples};
    const std::map<std::string, std::function<Check(const Context&)>> table = {
        {"hardy", check_hardy},           {"pohozaev", check_pohozaev},   {"gn_constant", check_gn},
        {"thresholds", check_thresholds}, {"virial_identity", check_virial}, {"cutoff", check_cutoff},
        {"uncertainty", check_uncertainty}, {"momentum_bound", check_momentum}, {"x0", check_x0}};
    for (const auto& name : cfg.verify.checks) {
      Check c;
      try {
        c = table.at(name)(cx);
      } catch (const Error& e) {
        c = Check{name};
        c.passed = false;
        c.measurements.push_back({{"name", "error"}, {"message", std::string(e.what())},
                                  {"passed", false}});
      }
      if (!cfg.quiet) std::cerr << "inls: check " << name << (c.passed ? " passed" : " FAILED") << "\n";
      checks.push_back(std::move(c));
    }
    report["grid"] = {{"N", gs.grid->N}, {"R_max", gs.grid->R_max}, {"mapping", gs.grid->mapping_label()}};
    if (cfg.verify.order_table) report["order_table"] = order_table(cfg);
  }

  json list = json::array();
  int failed = 0;
  for (const auto& c : checks) {
    if (!c.passed) ++failed;
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"measurements", c.measurements}});
  }
  report["checks"] = list;
  report["passed"] = static_cast<int>(checks.size()) - failed;
  report["failed"] = failed;
  report["all_passed"] = failed == 0;

  RunResult res;
  res.exit_code = failed == 0 ? 0 : 1;
  const fs::path path = cfg.output.dir / cfg.output.report;
  write_text(path, dump(report));
  res.artifacts.push_back(path);
  res.summary = std::move(report);
  return res;
}

}  // namespace inls::harness
