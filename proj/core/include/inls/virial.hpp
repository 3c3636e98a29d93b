#pragma once

#include <optional>
#include <vector>

#include "inls/evolution.hpp"
#include "inls/functionals.hpp"

namespace inls {

// Profile theta: r^2 on [0,1], (r-2)^2 on [1,2], 0 beyond. This is the only
// profile with theta'' <= 2 that meets both branches; it has a corner at r = 1.
double cutoff_theta(double s);
double cutoff_theta_d1(double s);
double cutoff_theta_d2(double s);

// Virial weight a(x) = phi(|x|): either the exact |x|^2 or phi_R = R^2 theta(r/R).
class VirialWeight {
 public:
  static VirialWeight exact();
  static VirialWeight cutoff(double R);

  bool is_exact() const { return exact_; }
  double R() const { return R_; }

  double phi(double r) const;
  double dphi(double r) const;
  double d2phi(double r) const;
  double laplacian(double r, int d) const;
  double bilaplacian(double r, int d) const;

 private:
  bool exact_ = true;
  double R_ = 0.0;
};

struct VirialCutoff {
  double R = 0.0;
  VirialWeight weight;
  std::vector<double> phi, dphi, d2phi, laplacian, bilaplacian;  // at the nodes
  std::vector<double> d2phi_edge;                                // at the interfaces
};

VirialCutoff build_cutoff(double R, const RadialGrid& g);

// 2 int phi'(r) Im(conj(u) u_r) dx.
double virial_rate(const RadialGrid& g, const Params& p, const Field& u, const VirialWeight& weight);

// Term-by-term evaluation of the second-derivative virial identity.
struct VirialTerms {
  double bilaplacian = 0.0;
  double hessian = 0.0;
  double inverse_square = 0.0;
  double nonlinear_laplacian = 0.0;
  double nonlinear_gradient = 0.0;
  double total() const { return bilaplacian + hessian + inverse_square + nonlinear_laplacian + nonlinear_gradient; }
};

VirialTerms virial_terms(const RadialGrid& g, const Params& p, const Field& u, const VirialWeight& weight);
double virial_acceleration(const RadialGrid& g, const Params& p, const Field& u, const VirialWeight& weight);

struct VirialConsistency {
  double max_second_mismatch = 0.0;   // max |V''_fd - 8G|
  double max_second_relative = 0.0;   // relative to max |8G| (or 1 if tiny)
  double max_first_mismatch = 0.0;    // max |V'_fd - V'|
  double spacing = 0.0;
  std::size_t points = 0;
};

VirialConsistency check_virial_consistency(const Trajectory& traj);

// Ratio of coarse to fine second-derivative mismatch (about 4 for a dt^2 scheme).
double virial_refinement_ratio(const Trajectory& coarse, const Trajectory& fine);

}  // namespace inls
