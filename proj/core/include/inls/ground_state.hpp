#pragma once

#include <array>
#include <memory>
#include <string>

#include "inls/functionals.hpp"
#include "inls/params.hpp"
#include "inls/radial_grid.hpp"

namespace inls {

struct SolverOptions {
  double tol = 1e-10;              // successive-iterate sup distance, relative to max Q
  int max_iter = 5000;
  double newton_switch = 1e-4;     // hand over to Newton below this fixed-point change
  double residual_tol = 1e-8;      // required relative backward error
  std::string seed = "gaussian";   // e^{-r^2/2}, unit maximum
};

struct GroundStateBundle {
  Profile Q;
  double M_G = 0.0;
  double E_G = 0.0;
  double S_G = 0.0;  // ||Q||_{H^1_c}, not squared
  double P_G = 0.0;
  double C_GN = 0.0;
  double K_G = 0.0;
  double H_G = 0.0;
  Params params;
  std::shared_ptr<const RadialGrid> grid;
  // max_j |F_j| / (sum_k |A_jk||Q_k| + w_j r_j^{-b} Q_j^{sigma+1}): componentwise backward error.
  double residual_elliptic = 0.0;
  // max_j |F_j| / w_j: the strong nodal residual, rounding-limited near the origin.
  double residual_strong = 0.0;
  std::array<double, 4> residuals_pohozaev{};
  std::string seed;
  int iterations = 0;
  int newton_iterations = 0;

  Field field() const { return to_field(Q); }
};

GroundStateBundle solve_ground_state(const Params& p, std::shared_ptr<const RadialGrid> grid,
                                     const SolverOptions& opts = {});

// Rebuild every derived constant from a stored profile (used by the cache).
GroundStateBundle bundle_from_profile(const Params& p, std::shared_ptr<const RadialGrid> grid, Profile Q,
                                      std::string seed, int iterations, int newton_iterations);

std::array<double, 4> pohozaev_report(const GroundStateBundle& gs);

struct ThresholdRecord {
  double C_GN_pohozaev;  // from K_G
  double C_GN_direct;    // gn_quotient(Q)
  double C_GN_rel_diff;
  double H_G_energy;     // E_G M_G^{sigma_c}
  double H_G_pohozaev;   // from K_G
  double H_G_rel_diff;
  double PM_lhs;         // P_G M_G^{sigma_c}
  double PM_rhs;         // 2(sigma+2)/(d sigma+2b) K_G^2
  double PM_rel_diff;
};

ThresholdRecord thresholds(const GroundStateBundle& gs);

enum class ScaleMode { amplitude, symmetry };

Field rescale_data(const RadialGrid& g, const Params& p, const Field& u, double lambda, ScaleMode mode);

}  // namespace inls
