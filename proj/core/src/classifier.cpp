#include "inls/classifier.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "inls/error.hpp"

namespace inls {

std::string to_string(DataSymmetry s) {
  switch (s) {
    case DataSymmetry::finite_variance: return "finite_variance";
    case DataSymmetry::radial: return "radial";
    case DataSymmetry::cylindrical_sigma_d: return "cylindrical_sigma_d";
    case DataSymmetry::general: return "general";
  }
  return "unknown";
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::below_global: return "below_global";
    case Regime::below_blowup: return "below_blowup";
    case Regime::at_global: return "at_global";
    case Regime::at_soliton: return "at_soliton";
    case Regime::at_blowup_side: return "at_blowup_side";
    case Regime::above_global: return "above_global";
    case Regime::above_blowup: return "above_blowup";
    case Regime::indeterminate: return "indeterminate";
  }
  return "unknown";
}

std::string to_string(BlowupStrength s) {
  switch (s) {
    case BlowupStrength::finite_time: return "finite_time";
    case BlowupStrength::unbounded_or_finite_time: return "unbounded_or_finite_time";
    case BlowupStrength::none: return "none";
  }
  return "unknown";
}

DataSymmetry parse_symmetry(const std::string& text) {
  if (text == "finite_variance") return DataSymmetry::finite_variance;
  if (text == "radial") return DataSymmetry::radial;
  if (text == "cylindrical_sigma_d") return DataSymmetry::cylindrical_sigma_d;
  if (text == "general") return DataSymmetry::general;
  throw Error(ErrorCode::ConfigInvalid, "unknown symmetry '" + text + "'");
}

namespace {

struct Exponents {
  double k, a, sigma_c;
};

Exponents exps(const Params& p) { return {p.kappa(), p.subcritical_gap(), derived_exponents(p).sigma_c}; }

// C_GN^{4/k} M^{a/k}
double gn_denominator(const InvariantSnapshot& s, const GroundStateBundle& gs) {
  const Exponents e = exps(gs.params);
  return std::pow(gs.C_GN, 4.0 / e.k) * std::pow(s.mass, e.a / e.k);
}

double closed_form_x0(const InvariantSnapshot& s, const GroundStateBundle& gs) {
  const double sigma_c = exps(gs.params).sigma_c;
  return 16.0 * s.energy - 16.0 * gs.E_G * std::pow(gs.M_G / s.mass, sigma_c);
}

}  // namespace

double threshold_f(double x, const InvariantSnapshot& s, const GroundStateBundle& gs) {
  const Params& p = gs.params;
  const double k = p.kappa();
  const double y = 16.0 * s.energy - x;
  const double inner = (p.sigma + 2.0) * y / (4.0 * k - 16.0);
  return -x / (2.0 * k - 8.0) + 2.0 * k * s.energy / (k - 4.0) - std::pow(inner, 4.0 / k) / gn_denominator(s, gs);
}

namespace {
// f' written in y = 16E - x, which avoids cancellation when y << 16E.
double fprime_of_y(double y, const InvariantSnapshot& s, const GroundStateBundle& gs) {
  const Params& p = gs.params;
  const double k = p.kappa();
  const double coef = (4.0 / k) * std::pow((p.sigma + 2.0) / (4.0 * k - 16.0), 4.0 / k);
  return -1.0 / (2.0 * k - 8.0) + coef * std::pow(y, (4.0 - k) / k) / gn_denominator(s, gs);
}
}  // namespace

double threshold_fprime(double x, const InvariantSnapshot& s, const GroundStateBundle& gs) {
  return fprime_of_y(16.0 * s.energy - x, s, gs);
}

double x0_by_root_finding(const InvariantSnapshot& snap, const GroundStateBundle& gs) {
  // f' is increasing in x, so decreasing in y = 16E - x = exp(z).
  const double sixteen_e = 16.0 * snap.energy;
  auto g = [&](double z) { return fprime_of_y(std::exp(z), snap, gs); };
  double lo = -50.0, hi = 50.0;
  while (g(lo) < 0.0 && lo > -700.0) lo -= 50.0;
  while (g(hi) > 0.0 && hi < 700.0) hi += 50.0;
  std::uintmax_t iters = 400;
  auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2);
  const auto bracket = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
  const double z = 0.5 * (bracket.first + bracket.second);
  return sixteen_e - std::exp(z);
}

ThresholdAnalysis threshold_x0(const InvariantSnapshot& snap, const GroundStateBundle& gs) {
  ThresholdAnalysis t;
  t.sixteenE = 16.0 * snap.energy;
  t.x0 = closed_form_x0(snap, gs);
  t.f_at_x0 = threshold_f(t.x0, snap, gs);
  t.fprime_at_x0 = threshold_fprime(t.x0, snap, gs);
  const double sigma_c = exps(gs.params).sigma_c;
  const double e_cert = snap.energy * std::pow(snap.mass, sigma_c) / gs.H_G;
  t.energy_at_or_above = e_cert >= 1.0;
  t.x0_nonnegative = t.x0 >= 0.0;
  t.zprime_sq = snap.variance > 0.0 ? snap.variance_rate * snap.variance_rate / (4.0 * snap.variance) : 0.0;
  t.derivative_dominates = t.zprime_sq >= 0.5 * t.x0;
  if (snap.energy > 0.0 && snap.variance > 0.0) {
    const double comp = e_cert * (1.0 - snap.variance_rate * snap.variance_rate / (32.0 * snap.energy * snap.variance));
    t.composite_holds = comp <= 1.0;
  }
  return t;
}

std::pair<double, double> reconstruct_from_virial(const Params& p, double energy, double vpp) {
  const double k = p.kappa();
  const double h = (4.0 * k * energy - vpp) / (2.0 * (k - 4.0));
  const double pot = (16.0 * energy - vpp) * (p.sigma + 2.0) / (4.0 * (k - 4.0));
  return {h, pot};
}

Classification classify(const Field& u0, const GroundStateBundle& gs, DataSymmetry sym, double band) {
  if (!gs.grid) throw Error(ErrorCode::MissingGroundState, "classify");
  const RadialGrid& g = *gs.grid;
  const Params& p = gs.params;
  const InvariantSnapshot s = snapshot(g, p, u0, 0.0);
  if (!std::isfinite(s.energy) || !std::isfinite(s.h1c_sq) || !(s.mass > 0.0))
    throw Error(ErrorCode::ZeroField, "initial data must be finite and nonzero");

  const double sigma_c = derived_exponents(p).sigma_c;
  Classification out;
  out.band = band;
  Certificates& c = out.certificates;
  c.energy = s.energy * std::pow(s.mass, sigma_c) / gs.H_G;
  c.gradient = std::sqrt(s.h1c_sq) * std::pow(s.mass, 0.5 * sigma_c) / gs.K_G;
  c.potential = s.potential * std::pow(s.mass, sigma_c) / (gs.P_G * std::pow(gs.M_G, sigma_c));
  c.variance = s.variance;
  c.variance_rate = s.variance_rate;
  out.analysis = threshold_x0(s, gs);
  c.x0 = out.analysis.x0;
  c.zprime_sq = out.analysis.zprime_sq;
  c.half_x0 = 0.5 * out.analysis.x0;
  c.composite = (s.energy > 0.0 && s.variance > 0.0)
                    ? c.energy * (1.0 - s.variance_rate * s.variance_rate / (32.0 * s.energy * s.variance))
                    : std::numeric_limits<double>::quiet_NaN();

  const bool symmetric_blowup = sym == DataSymmetry::finite_variance || sym == DataSymmetry::radial ||
                                (sym == DataSymmetry::cylindrical_sigma_d && p.sigma <= 2.0);
  auto below = [&](double v) { return v < 1.0 - band; };
  auto above = [&](double v) { return v > 1.0 + band; };

  if (below(c.energy)) {
    out.theorem_tag = "below_threshold";
    if (below(c.gradient)) {
      out.regime = Regime::below_global;
    } else if (above(c.gradient)) {
      out.regime = Regime::below_blowup;
      out.strength = symmetric_blowup ? BlowupStrength::finite_time : BlowupStrength::unbounded_or_finite_time;
    } else {
      out.regime = Regime::indeterminate;
    }
    return out;
  }
  if (!above(c.energy)) {
    out.theorem_tag = "at_threshold";
    if (below(c.gradient))
      out.regime = Regime::at_global;
    else if (above(c.gradient))
      out.regime = Regime::at_blowup_side;  // convergence to the soliton orbit remains possible
    else
      out.regime = Regime::at_soliton;
    return out;
  }

  out.theorem_tag = "above_threshold";
  if (sym != DataSymmetry::finite_variance && sym != DataSymmetry::radial)
    throw Error(ErrorCode::MissingVariance, "above-threshold criteria need finite-variance data");
  if (!(c.composite <= 1.0 + band)) {
    out.regime = Regime::indeterminate;
    return out;
  }
  if (below(c.potential) && s.variance_rate >= 0.0) {
    out.regime = Regime::above_global;
  } else if (above(c.potential) && s.variance_rate <= 0.0) {
    out.regime = Regime::above_blowup;
    out.strength = BlowupStrength::finite_time;
  } else {
    out.regime = Regime::indeterminate;
  }
  return out;
}

TrajectoryCriteria trajectory_criteria(const Trajectory& traj, const GroundStateBundle& gs) {
  if (traj.snapshots.empty()) throw Error(ErrorCode::EmptyTrajectory, "trajectory_criteria");
  const double sigma_c = derived_exponents(gs.params).sigma_c;
  const double ref = gs.P_G * std::pow(gs.M_G, sigma_c);
  TrajectoryCriteria out;
  out.sup_g = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.snapshots) {
    out.sup_potential_ratio = std::max(out.sup_potential_ratio, s.potential * std::pow(s.mass, sigma_c) / ref);
    out.sup_g = std::max(out.sup_g, s.g_value);
  }
  out.delta = out.sup_g < 0.0 ? -out.sup_g : 0.0;
  // Ground-state equality counts as neither; use a small band.
  const double band = 1e-6;
  if (out.sup_potential_ratio < 1.0 - band)
    out.label = "global_criterion_certified";
  else if (out.sup_g < -band * std::max(1.0, std::abs(traj.snapshots.front().h1c_sq)))
    out.label = "blowup_criterion_certified";
  else
    out.label = "neither";
  return out;
}

}  // namespace inls
