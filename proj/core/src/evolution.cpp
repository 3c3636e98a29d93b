#include "inls/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "inls/banded.hpp"
#include "inls/error.hpp"

namespace inls {

namespace {

// Compensated time: near collapse dt is many orders below ulp(t).
struct Clock {
  double hi = 0.0;
  double lo = 0.0;

  void add(double x) {
    const double s = hi + x;
    const double bp = s - hi;
    const double err = (hi - (s - bp)) + (x - bp);
    const double t = s + (lo + err);
    lo = (lo + err) - (t - s);
    hi = t;
  }
  double value() const { return hi + lo; }
  double minus(const Clock& o) const { return (hi - o.hi) + (lo - o.lo); }
};

struct StepRecord {
  Clock t;
  double h;
};

std::optional<double> fit_blowup_time(const std::vector<StepRecord>& hist, const Clock& last) {
  if (hist.size() < 3) return std::nullopt;
  const double floor_norm = std::sqrt(hist.back().h) / 10.0;
  std::size_t first = hist.size();
  while (first > 0 && std::sqrt(hist[first - 1].h) >= floor_norm) --first;
  if (hist.size() - first < 3) first = hist.size() >= 3 ? hist.size() - 3 : 0;
  const Clock ref = hist[first].t;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(hist.size() - first);
  for (std::size_t i = first; i < hist.size(); ++i) {
    const double x = hist[i].t.minus(ref);
    const double y = 1.0 / std::sqrt(hist[i].h);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  const double tail = last.minus(ref);
  if (!(den > 0.0)) return ref.value() + tail;
  const double slope = (n * sxy - sx * sy) / den;
  const double icept = (sy - slope * sx) / n;
  if (!(slope < 0.0)) return ref.value() + tail;
  const double zero = -icept / slope;
  return ref.value() + std::max(zero, tail);
}

double pow_abs(const Complex& z, double s) { return std::pow(std::abs(z), s); }

}  // namespace

void EvolutionConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::ConfigInvalid, "dt must be positive");
  if (!(min_dt > 0.0) || !(min_dt < dt)) throw Error(ErrorCode::ConfigInvalid, "need 0 < min_dt < dt");
  if (!(blowup_growth_factor > 1.0)) throw Error(ErrorCode::ConfigInvalid, "blowup_growth_factor must exceed 1");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw Error(ErrorCode::ConfigInvalid, "t_final must be >= 0");
  if (snapshot_stride < 1) throw Error(ErrorCode::ConfigInvalid, "snapshot_stride must be >= 1");
  if (!(boundary_mass_limit > 0.0)) throw Error(ErrorCode::ConfigInvalid, "boundary_mass_limit must be positive");
  if (!(step_change_limit > 0.0)) throw Error(ErrorCode::ConfigInvalid, "step_change_limit must be positive");
  if (!(drift_budget > 0.0)) throw Error(ErrorCode::ConfigInvalid, "drift_budget must be positive");
  if (field_stride < 0) throw Error(ErrorCode::ConfigInvalid, "field_stride must be >= 0");
}

std::string to_string(StatusKind kind) {
  switch (kind) {
    case StatusKind::completed: return "completed";
    case StatusKind::blowup_detected: return "blowup_detected";
    case StatusKind::resolution_exhausted: return "resolution_exhausted";
    case StatusKind::boundary_contaminated: return "boundary_contaminated";
  }
  return "unknown";
}

RelaxationStepper::RelaxationStepper(const RadialGrid& g, const Params& p, Field u0)
    : g_(g), p_(p), u_(std::move(u0)), phi_(g.N), rb_(g.N), cr_(g.N) {
  if (u_.size() != g.N) throw Error(ErrorCode::SizeMismatch, "initial field");
  for (std::size_t j = 0; j < g.N; ++j) {
    phi_[j] = pow_abs(u_[j], p.sigma);
    rb_[j] = std::pow(g.r[j], -p.b);
    cr_[j] = p.c / (g.r[j] * g.r[j]);
  }
}

Field RelaxationStepper::solve(const Field& u, const std::vector<double>& phi, double dt) const {
  const std::size_t n = g_.N;
  const Complex half(0.0, 0.5 * dt);
  // H = K + W (c r^{-2} - r^{-b} phi); solve (W + i dt/2 H) v = (W - i dt/2 H) u.
  Field hu = stiffness_apply(g_, u);
  std::vector<double> diag(n);
  for (std::size_t j = 0; j < n; ++j) {
    diag[j] = g_.w[j] * (cr_[j] - rb_[j] * phi[j]);
    hu[j] += diag[j] * u[j];
  }
  Field rhs(n);
  for (std::size_t j = 0; j < n; ++j) rhs[j] = g_.w[j] * u[j] - half * hu[j];

  BandMatrix<Complex> a(n, 3, 3);
  for (std::size_t j = 0; j < n; ++j) {
    a(j, j) = g_.w[j] + half * (g_.kband[j][0] + diag[j]);
    for (std::size_t m = 1; m <= 3 && j + m < n; ++m) {
      a(j, j + m) = half * g_.kband[j][m];
      a(j + m, j) = half * g_.kband[j][m];
    }
  }
  a.factor();
  a.solve_in_place(rhs);
  return rhs;
}

Field RelaxationStepper::trial(double dt) const { return solve(u_, phi_, dt); }

void RelaxationStepper::commit(Field next) {
  u_ = std::move(next);
  for (std::size_t j = 0; j < g_.N; ++j) phi_[j] = 2.0 * pow_abs(u_[j], p_.sigma) - phi_[j];
}

void RelaxationStepper::step_back(double dt) {
  for (std::size_t j = 0; j < g_.N; ++j) phi_[j] = 2.0 * pow_abs(u_[j], p_.sigma) - phi_[j];
  u_ = solve(u_, phi_, -dt);
}

void RelaxationStepper::rescale_step(double ratio) {
  for (std::size_t j = 0; j < g_.N; ++j) {
    const double a = pow_abs(u_[j], p_.sigma);
    phi_[j] = a + ratio * (phi_[j] - a);
  }
}

namespace {

// Share of the gradient energy carried by the innermost interfaces. Once a
// collapsing core sits on a handful of cells the grid, not dt, is the limit.
constexpr int kCoreEdges = 8;
constexpr double kCoreShareLimit = 0.05;

double core_share(const RadialGrid& g, const Field& u) {
  const Field du = gradient(g, u);
  double inner = 0.0, total = 0.0;
  for (std::size_t e = 0; e < g.N; ++e) {
    const double c = g.we[e] * std::norm(du[e]);
    total += c;
    if (e < static_cast<std::size_t>(kCoreEdges)) inner += c;
  }
  return total > 0.0 ? inner / total : 0.0;
}

}  // namespace

Status detect_blowup(const Trajectory& traj, const EvolutionConfig& cfg) {
  const double t_last = traj.snapshots.empty() ? 0.0 : traj.snapshots.back().t;
  if (traj.floor_hit || traj.grid_exhausted) {
    const double growth = traj.initial_h1c_sq > 0.0 ? traj.final_h1c_sq / traj.initial_h1c_sq : 0.0;
    const double need = cfg.blowup_growth_factor * cfg.blowup_growth_factor;
    if (growth >= need && traj.energy_drift_vs_h <= cfg.drift_budget)
      return {StatusKind::blowup_detected, traj.T_star_estimate.value_or(t_last)};
    return {StatusKind::resolution_exhausted, t_last};
  }
  if (traj.boundary_time) return {StatusKind::boundary_contaminated, *traj.boundary_time};
  return {StatusKind::completed, t_last};
}

Trajectory evolve(const Field& u0, const Params& p, const RadialGrid& g, const EvolutionConfig& cfg,
                  const StepObserver& observer) {
  cfg.validate();
  if (u0.size() != g.N) throw Error(ErrorCode::SizeMismatch, "evolve");
  if (!g.hardy_ok(p)) throw Error(ErrorCode::ConfigInvalid, "discrete Hardy check failed for this coupling");

  Trajectory traj;
  RelaxationStepper stepper(g, p, u0);
  const InvariantSnapshot s0 = snapshot(g, p, u0, 0.0);
  traj.snapshots.push_back(s0);
  traj.step_sizes.push_back(cfg.dt);
  if (cfg.field_stride > 0) traj.field_dumps.emplace_back(0.0, u0);
  traj.initial_h1c_sq = s0.h1c_sq;
  traj.peak_h1c_sq = s0.h1c_sq;
  if (observer) observer(0.0, u0);

  double dt = cfg.dt;
  double h = s0.h1c_sq;
  Clock clock;
  std::vector<StepRecord> history;
  int calm = 0;
  long snaps_taken = 1;

  auto record = [&](bool terminal) {
    const double t = clock.value();
    InvariantSnapshot s = snapshot(g, p, stepper.state(), t);
    const bool later = t > traj.snapshots.back().t;
    if (!later && !terminal) return;
    if (later) {
      traj.snapshots.push_back(s);
      traj.step_sizes.push_back(dt);
    } else {
      if (traj.snapshots.size() == 1) return;  // never overwrite the initial state
      traj.snapshots.back() = s;
      traj.step_sizes.back() = dt;
    }
    ++snaps_taken;
    traj.mass_drift = std::max(traj.mass_drift, std::abs(s.mass - s0.mass) / s0.mass);
    if (s0.energy != 0.0)
      traj.energy_drift = std::max(traj.energy_drift, std::abs(s.energy - s0.energy) / std::abs(s0.energy));
    if (!traj.boundary_time && outer_mass_fraction(g, stepper.state()) > cfg.boundary_mass_limit)
      traj.boundary_time = t;
    if (cfg.field_stride > 0 && later && (snaps_taken - 1) % cfg.field_stride == 0)
      traj.field_dumps.emplace_back(t, stepper.state());
  };

  const double eps_t = 1e-14 * std::max(1.0, cfg.t_final);
  while (true) {
    const double remaining = (cfg.t_final - clock.hi) - clock.lo;
    if (remaining <= eps_t) break;
    double use = dt;
    if (remaining < dt) {
      use = remaining;
      stepper.rescale_step(use / dt);
      dt = use;
    }
    Field next = stepper.trial(use);
    const double hn = h1c_sq(g, p, next);
    const double change = std::abs(hn - h) / h;
    if (!(change <= cfg.step_change_limit)) {
      if (dt * 0.5 < cfg.min_dt) {
        traj.floor_hit = true;
        break;
      }
      stepper.rescale_step(0.5);
      dt *= 0.5;
      ++traj.rejected;
      calm = 0;
      continue;
    }
    stepper.commit(std::move(next));
    clock.add(use);
    h = hn;
    ++traj.steps;
    traj.peak_h1c_sq = std::max(traj.peak_h1c_sq, h);
    if (h >= 4.0 * traj.initial_h1c_sq) {
      history.push_back({clock, h});
      if (core_share(g, stepper.state()) > kCoreShareLimit) {
        traj.grid_exhausted = true;
        if (observer) observer(clock.value(), stepper.state());
        break;
      }
    }
    if (observer) observer(clock.value(), stepper.state());
    if (traj.steps % cfg.snapshot_stride == 0) record(false);

    // Recover the step size once the dynamics calm down again.
    calm = change < 0.125 * cfg.step_change_limit ? calm + 1 : 0;
    if (calm >= 8 && 2.0 * dt <= cfg.dt) {
      stepper.rescale_step(2.0);
      dt *= 2.0;
      calm = 0;
    }
  }
  record(true);

  traj.final_dt = dt;
  traj.final_h1c_sq = h;
  const InvariantSnapshot& last = traj.snapshots.back();
  traj.energy_drift_vs_h = std::abs(last.energy - s0.energy) / std::max(last.h1c_sq, 1e-300);
  const double g2 = cfg.blowup_growth_factor * cfg.blowup_growth_factor;
  if (h >= g2 * traj.initial_h1c_sq) traj.T_star_estimate = fit_blowup_time(history, clock);
  traj.status = detect_blowup(traj, cfg);
  return traj;
}

SolitonErrors soliton_error(const GroundStateBundle& gs, const EvolutionConfig& cfg) {
  if (!gs.grid) throw Error(ErrorCode::MissingGroundState, "soliton_error");
  const RadialGrid& g = *gs.grid;
  std::size_t probe = 0;
  for (std::size_t j = 1; j < g.N; ++j)
    if (gs.Q[j] > gs.Q[probe]) probe = j;

  SolitonErrors out;
  const Field q = gs.field();
  auto observe = [&](double t, const Field& u) {
    double mod = 0.0;
    for (std::size_t j = 0; j < g.N; ++j) mod = std::max(mod, std::abs(std::abs(u[j]) - gs.Q[j]));
    const double ph = std::abs(std::remainder(std::arg(u[probe] / gs.Q[probe]) - t, 2.0 * std::numbers::pi));
    out.modulus_error = std::max(out.modulus_error, mod);
    out.phase_error = std::max(out.phase_error, ph);
    if (!out.first_exceed_time && mod > 1e-4) out.first_exceed_time = t;
  };
  const Trajectory traj = evolve(q, gs.params, g, cfg, observe);
  out.mass_drift = traj.mass_drift;
  out.energy_drift = traj.energy_drift;
  out.steps = traj.steps;
  out.status = traj.status;
  return out;
}

}  // namespace inls
