#include "inls/virial.hpp"

#include <algorithm>
#include <cmath>

#include "inls/error.hpp"

namespace inls {

double cutoff_theta(double s) {
  if (s <= 1.0) return s * s;
  if (s < 2.0) return (s - 2.0) * (s - 2.0);
  return 0.0;
}

double cutoff_theta_d1(double s) {
  if (s <= 1.0) return 2.0 * s;
  if (s < 2.0) return 2.0 * (s - 2.0);
  return 0.0;
}

double cutoff_theta_d2(double s) { return s < 2.0 ? 2.0 : 0.0; }

VirialWeight VirialWeight::exact() { return VirialWeight{}; }

VirialWeight VirialWeight::cutoff(double R) {
  if (!(R > 1.0)) throw Error(ErrorCode::ConfigInvalid, "cutoff radius must exceed 1");
  VirialWeight w;
  w.exact_ = false;
  w.R_ = R;
  return w;
}

// Branches in physical units so that phi = r^2 holds exactly for r <= R.
double VirialWeight::phi(double r) const {
  if (exact_ || r <= R_) return r * r;
  if (r < 2.0 * R_) return (r - 2.0 * R_) * (r - 2.0 * R_);
  return 0.0;
}
double VirialWeight::dphi(double r) const {
  if (exact_ || r <= R_) return 2.0 * r;
  if (r < 2.0 * R_) return 2.0 * (r - 2.0 * R_);
  return 0.0;
}
double VirialWeight::d2phi(double r) const {
  if (exact_ || r < 2.0 * R_) return 2.0;
  return 0.0;
}

double VirialWeight::laplacian(double r, int d) const {
  if (exact_) return 2.0 * d;
  if (r <= R_) return 2.0 * d;
  if (r < 2.0 * R_) return 2.0 * d - 4.0 * R_ * (d - 1.0) / r;
  return 0.0;
}

double VirialWeight::bilaplacian(double r, int d) const {
  if (exact_) return 0.0;
  if (r > R_ && r < 2.0 * R_) return 4.0 * R_ * (d - 1.0) * (d - 3.0) / (r * r * r);
  return 0.0;
}

VirialCutoff build_cutoff(double R, const RadialGrid& g) {
  VirialCutoff c;
  c.R = R;
  c.weight = VirialWeight::cutoff(R);
  const std::size_t n = g.N;
  c.phi.resize(n);
  c.dphi.resize(n);
  c.d2phi.resize(n);
  c.laplacian.resize(n);
  c.bilaplacian.resize(n);
  c.d2phi_edge.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double r = g.r[j];
    c.phi[j] = c.weight.phi(r);
    c.dphi[j] = c.weight.dphi(r);
    c.d2phi[j] = c.weight.d2phi(r);
    c.laplacian[j] = c.weight.laplacian(r, g.d);
    c.bilaplacian[j] = c.weight.bilaplacian(r, g.d);
    c.d2phi_edge[j] = c.weight.d2phi(g.re[j]);
    const bool ok = c.phi[j] >= 0.0 && 2.0 - c.d2phi[j] >= 0.0 && 2.0 - c.dphi[j] / r >= 0.0 &&
                    2.0 * g.d - c.laplacian[j] >= 0.0 && 2.0 - c.d2phi_edge[j] >= 0.0;
    if (!ok) throw Error(ErrorCode::CutoffInfeasible, "cutoff inequality violated at node " + std::to_string(j));
    if (r <= R && c.phi[j] != r * r) throw Error(ErrorCode::CutoffInfeasible, "inner branch mismatch");
    if (r >= 2.0 * R && c.phi[j] != 0.0) throw Error(ErrorCode::CutoffInfeasible, "outer branch mismatch");
  }
  return c;
}

namespace {

Complex edge_value(const RadialGrid& g, const Field& u, std::size_t e) {
  const long n = static_cast<long>(g.N);
  const long j = static_cast<long>(e);
  auto at = [&](long m) -> Complex {
    if (m < 0) return u[-1 - m];
    if (m >= n) return -u[2 * n - 1 - m];
    return u[m];
  };
  return (9.0 * (at(j) + at(j + 1)) - (at(j - 1) + at(j + 2))) / 16.0;
}

}  // namespace

double virial_rate(const RadialGrid& g, const Params&, const Field& u, const VirialWeight& weight) {
  if (u.size() != g.N) throw Error(ErrorCode::SizeMismatch, "virial_rate");
  const Field du = gradient(g, u);
  double acc = 0.0;
  for (std::size_t e = 0; e < g.N; ++e)
    acc += g.we[e] * weight.dphi(g.re[e]) * std::imag(std::conj(edge_value(g, u, e)) * du[e]);
  return 2.0 * g.omega * acc;
}

VirialTerms virial_terms(const RadialGrid& g, const Params& p, const Field& u, const VirialWeight& weight) {
  if (u.size() != g.N) throw Error(ErrorCode::SizeMismatch, "virial_acceleration");
  const Field du = gradient(g, u);
  VirialTerms t;
  double bil = 0.0, hes = 0.0, inv = 0.0, nl = 0.0, ng = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) {
    const double r = g.r[j];
    const double m2 = std::norm(u[j]);
    const double nonlin = std::pow(r, -p.b) * std::pow(std::abs(u[j]), p.sigma + 2.0);
    const double dphi = weight.dphi(r);
    bil += g.w[j] * weight.bilaplacian(r, g.d) * m2;
    inv += g.w[j] * dphi / (r * r * r) * m2;
    nl += g.w[j] * weight.laplacian(r, g.d) * nonlin;
    ng += g.w[j] * dphi * (-p.b / r) * nonlin;
    hes += g.we[j] * weight.d2phi(g.re[j]) * std::norm(du[j]);
  }
  const double om = g.omega;
  t.bilaplacian = -om * bil;
  t.hessian = 4.0 * om * hes;
  t.inverse_square = 4.0 * p.c * om * inv;
  t.nonlinear_laplacian = -2.0 * p.sigma / (p.sigma + 2.0) * om * nl;
  t.nonlinear_gradient = 4.0 / (p.sigma + 2.0) * om * ng;
  return t;
}

double virial_acceleration(const RadialGrid& g, const Params& p, const Field& u, const VirialWeight& weight) {
  return virial_terms(g, p, u, weight).total();
}

VirialConsistency check_virial_consistency(const Trajectory& traj) {
  const auto& s = traj.snapshots;
  if (s.size() < 5) throw Error(ErrorCode::InsufficientSnapshots, "need at least 5 snapshots");
  const double dt = s[1].t - s[0].t;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double gap = s[i].t - s[i - 1].t;
    if (std::abs(gap - dt) > 1e-9 * std::max(dt, 1e-300) + 1e-13 * std::abs(s[i].t))
      throw Error(ErrorCode::InsufficientSnapshots, "snapshots are not uniformly spaced");
  }
  VirialConsistency rep;
  rep.spacing = dt;
  double scale = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double v2 = (s[i + 1].variance - 2.0 * s[i].variance + s[i - 1].variance) / (dt * dt);
    const double v1 = (s[i + 1].variance - s[i - 1].variance) / (2.0 * dt);
    rep.max_second_mismatch = std::max(rep.max_second_mismatch, std::abs(v2 - 8.0 * s[i].g_value));
    rep.max_first_mismatch = std::max(rep.max_first_mismatch, std::abs(v1 - s[i].variance_rate));
    scale = std::max(scale, std::abs(8.0 * s[i].g_value));
    ++rep.points;
  }
  rep.max_second_relative = rep.max_second_mismatch / std::max(scale, 1.0);
  return rep;
}

double virial_refinement_ratio(const Trajectory& coarse, const Trajectory& fine) {
  const double a = check_virial_consistency(coarse).max_second_mismatch;
  const double b = check_virial_consistency(fine).max_second_mismatch;
  return b > 0.0 ? a / b : 0.0;
}

}  // namespace inls
