#pragma once

#include <string>

#include "inls/evolution.hpp"
#include "inls/functionals.hpp"
#include "inls/ground_state.hpp"

namespace inls {

enum class DataSymmetry { finite_variance, radial, cylindrical_sigma_d, general };

enum class Regime {
  below_global,
  below_blowup,
  at_global,
  at_soliton,
  at_blowup_side,
  above_global,
  above_blowup,
  indeterminate,
};

enum class BlowupStrength { finite_time, unbounded_or_finite_time, none };

std::string to_string(DataSymmetry s);
std::string to_string(Regime r);
std::string to_string(BlowupStrength s);
DataSymmetry parse_symmetry(const std::string& text);

struct ThresholdAnalysis {
  double x0 = 0.0;
  double f_at_x0 = 0.0;
  double fprime_at_x0 = 0.0;
  double sixteenE = 0.0;
  // Paired formulations that must agree.
  bool energy_at_or_above = false;  // E M^{sigma_c} >= H_G
  bool x0_nonnegative = false;
  bool composite_holds = false;     // E M^{sigma_c} (1 - V'^2/(32 E V)) <= H_G
  bool derivative_dominates = false;  // z'(0)^2 >= x0 / 2
  double zprime_sq = 0.0;             // V'^2 / (4 V)
};

struct Certificates {
  double energy = 0.0;     // E M^{sigma_c} / H_G
  double gradient = 0.0;   // ||u||_{H^1_c} ||u||_2^{sigma_c} / K_G
  double potential = 0.0;  // P M^{sigma_c} / (P_G M_G^{sigma_c})
  double variance = 0.0;
  double variance_rate = 0.0;
  double x0 = 0.0;
  double zprime_sq = 0.0;
  double half_x0 = 0.0;
  double composite = 0.0;  // E M^{sigma_c} (1 - V'^2/(32 E V)) / H_G
};

struct Classification {
  Regime regime = Regime::indeterminate;
  std::string theorem_tag;
  Certificates certificates;
  BlowupStrength strength = BlowupStrength::none;
  double band = 1e-6;
  ThresholdAnalysis analysis;
};

Classification classify(const Field& u0, const GroundStateBundle& gs, DataSymmetry sym, double band = 1e-6);

// f from the proof of the above-threshold result and its derivative.
double threshold_f(double x, const InvariantSnapshot& s, const GroundStateBundle& gs);
double threshold_fprime(double x, const InvariantSnapshot& s, const GroundStateBundle& gs);

ThresholdAnalysis threshold_x0(const InvariantSnapshot& snap, const GroundStateBundle& gs);

// Root of f' on (-inf, 16E) by bracketing; independent of the closed form.
double x0_by_root_finding(const InvariantSnapshot& snap, const GroundStateBundle& gs);

// Recover (h1c_sq, P) from (E, V'') using V'' = 8G.
std::pair<double, double> reconstruct_from_virial(const Params& p, double energy, double vpp);

struct TrajectoryCriteria {
  double sup_potential_ratio = 0.0;  // sup P M^{sigma_c} / (P_G M_G^{sigma_c})
  double sup_g = 0.0;
  double delta = 0.0;  // largest delta with G <= -delta throughout (0 if none)
  std::string label;   // "global-existence criterion certified so far" / "blow-up criterion certified so far" / "neither"
};

TrajectoryCriteria trajectory_criteria(const Trajectory& traj, const GroundStateBundle& gs);

}  // namespace inls
