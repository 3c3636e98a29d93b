#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "inls/functionals.hpp"
#include "inls/ground_state.hpp"

namespace inls {

struct EvolutionConfig {
  double dt = 1e-3;
  double t_final = 5.0;
  int snapshot_stride = 10;
  double blowup_growth_factor = 100.0;
  double min_dt = 1e-22;
  double boundary_mass_limit = 1e-6;
  // Largest relative change of h1c_sq accepted in one step; larger changes halve dt.
  double step_change_limit = 2e-3;
  // |E - E0| / h1c_sq allowed when blow-up is declared.
  double drift_budget = 1e-3;
  // Keep every field_stride-th snapshot field (0: none).
  int field_stride = 0;

  void validate() const;  // throws ConfigInvalid
};

enum class StatusKind { completed, blowup_detected, resolution_exhausted, boundary_contaminated };

std::string to_string(StatusKind kind);

struct Status {
  StatusKind kind = StatusKind::completed;
  double t = 0.0;  // t_est for blow-up, event time otherwise
};

struct Trajectory {
  std::vector<InvariantSnapshot> snapshots;
  std::vector<double> step_sizes;  // dt in force at each snapshot
  std::vector<std::pair<double, Field>> field_dumps;
  Status status;
  std::optional<double> T_star_estimate;
  std::optional<double> boundary_time;

  double initial_h1c_sq = 0.0;
  double final_h1c_sq = 0.0;
  double peak_h1c_sq = 0.0;
  double final_dt = 0.0;
  bool floor_hit = false;
  bool grid_exhausted = false;  // collapsing core reached the innermost cells

  double mass_drift = 0.0;         // max |M - M0| / M0
  double energy_drift = 0.0;       // max |E - E0| / |E0|
  double energy_drift_vs_h = 0.0;  // |E - E0| / h1c_sq at the end
  long steps = 0;
  long rejected = 0;
};

// Relaxation Crank-Nicolson: the cubic-type nonlinearity is frozen through an
// auxiliary phi^{n+1/2} = 2|u^{n+1}|^sigma - phi^{n-1/2}, so each step is one
// banded complex solve. Mass is conserved to rounding and the scheme is
// symmetric in time.
class RelaxationStepper {
 public:
  RelaxationStepper(const RadialGrid& g, const Params& p, Field u0);

  const Field& state() const { return u_; }
  // Candidate u^{n+1} without committing it.
  Field trial(double dt) const;
  void commit(Field next);
  void step(double dt) { commit(trial(dt)); }
  // Exact inverse of step(dt).
  void step_back(double dt);
  // Re-centre the auxiliary variable for a step size ratio dt_new / dt_old.
  void rescale_step(double ratio);

 private:
  Field solve(const Field& u, const std::vector<double>& phi, double dt) const;

  const RadialGrid& g_;
  Params p_;
  Field u_;
  std::vector<double> phi_;
  std::vector<double> rb_;  // r^{-b}
  std::vector<double> cr_;  // c r^{-2}
};

using StepObserver = std::function<void(double t, const Field& u)>;

Trajectory evolve(const Field& u0, const Params& p, const RadialGrid& g, const EvolutionConfig& cfg,
                  const StepObserver& observer = {});

Status detect_blowup(const Trajectory& traj, const EvolutionConfig& cfg);

struct SolitonErrors {
  double modulus_error = 0.0;  // sup over steps of max_j ||u| - Q|
  double phase_error = 0.0;    // sup over steps of |arg(u(r0)/Q(r0)) - t| mod 2 pi
  std::optional<double> first_exceed_time;  // first t with modulus error above 1e-4
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  long steps = 0;
  Status status;
};

SolitonErrors soliton_error(const GroundStateBundle& gs, const EvolutionConfig& cfg);

}  // namespace inls
