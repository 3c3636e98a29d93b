#include "inls/functionals.hpp"

#include <cmath>

#include "inls/error.hpp"
#include "inls/ground_state.hpp"

namespace inls {

namespace {

void check_size(const RadialGrid& g, const Field& u, const char* what) {
  if (u.size() != g.N) throw Error(ErrorCode::SizeMismatch, what);
}

// 4th-order interpolation of nodal samples to interface e.
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

double mass(const RadialGrid& g, const Field& u) {
  check_size(g, u, "mass");
  double acc = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) acc += g.w[j] * std::norm(u[j]);
  return g.omega * acc;
}

double gradient_sq(const RadialGrid& g, const Field& u) {
  check_size(g, u, "gradient_sq");
  const Field du = gradient(g, u);
  double acc = 0.0;
  for (std::size_t e = 0; e < g.N; ++e) acc += g.we[e] * std::norm(du[e]);
  return g.omega * acc;
}

double h1c_sq(const RadialGrid& g, const Params& p, const Field& u) {
  double acc = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) acc += g.w[j] * std::norm(u[j]) / (g.r[j] * g.r[j]);
  return gradient_sq(g, u) + p.c * g.omega * acc;
}

double potential(const RadialGrid& g, const Params& p, const Field& u) {
  check_size(g, u, "potential");
  double acc = 0.0;
  for (std::size_t j = 0; j < g.N; ++j)
    acc += g.w[j] * std::pow(g.r[j], -p.b) * std::pow(std::abs(u[j]), p.sigma + 2.0);
  return g.omega * acc;
}

double energy(const RadialGrid& g, const Params& p, const Field& u) {
  return 0.5 * h1c_sq(g, p, u) - potential(g, p, u) / (p.sigma + 2.0);
}

double variance(const RadialGrid& g, const Field& u) {
  check_size(g, u, "variance");
  double acc = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) acc += g.w[j] * g.r[j] * g.r[j] * std::norm(u[j]);
  return g.omega * acc;
}

double variance_rate(const RadialGrid& g, const Field& u) {
  check_size(g, u, "variance_rate");
  const Field du = gradient(g, u);
  double acc = 0.0;
  for (std::size_t e = 0; e < g.N; ++e) acc += g.we[e] * g.re[e] * std::imag(std::conj(edge_value(g, u, e)) * du[e]);
  return 4.0 * g.omega * acc;
}

InvariantSnapshot snapshot(const RadialGrid& g, const Params& p, const Field& u, double t) {
  check_size(g, u, "snapshot");
  InvariantSnapshot s;
  s.t = t;
  s.mass = mass(g, u);
  s.h1c_sq = h1c_sq(g, p, u);
  s.potential = potential(g, p, u);
  s.energy = 0.5 * s.h1c_sq - s.potential / (p.sigma + 2.0);
  s.g_value = s.h1c_sq - p.kappa() / (2.0 * (p.sigma + 2.0)) * s.potential;
  s.variance = variance(g, u);
  s.variance_rate = variance_rate(g, u);
  return s;
}

double gn_quotient(const RadialGrid& g, const Params& p, const Field& u) {
  const double m = mass(g, u);
  const double h = h1c_sq(g, p, u);
  if (!(m > 0.0) || !(h > 0.0)) throw Error(ErrorCode::ZeroField, "gn_quotient");
  return potential(g, p, u) / (std::pow(h, p.kappa() / 4.0) * std::pow(m, p.subcritical_gap() / 4.0));
}

std::pair<double, double> check_uncertainty(const RadialGrid& g, const Field& u) {
  const double m = mass(g, u);
  if (!(m > 0.0)) throw Error(ErrorCode::ZeroField, "check_uncertainty");
  return {m, 2.0 / g.d * std::sqrt(variance(g, u)) * std::sqrt(gradient_sq(g, u))};
}

std::pair<double, double> check_momentum_bound(const RadialGrid& g, const Params& p, const Field& u,
                                               const GroundStateBundle* gs) {
  if (gs == nullptr) throw Error(ErrorCode::MissingGroundState, "check_momentum_bound needs C_GN");
  const InvariantSnapshot s = snapshot(g, p, u, 0.0);
  if (!(s.mass > 0.0)) throw Error(ErrorCode::ZeroField, "check_momentum_bound");
  const double k = p.kappa();
  const double lhs = 0.25 * s.variance_rate * 0.25 * s.variance_rate;
  const double sub = std::pow(s.potential, 4.0 / k) /
                     (std::pow(gs->C_GN, 4.0 / k) * std::pow(s.mass, p.subcritical_gap() / k));
  return {lhs, s.variance * (s.h1c_sq - sub)};
}

bool within_slack(double lhs, double rhs, double rel, double abs) {
  return lhs <= rhs + std::abs(rhs) * rel + abs;
}

}  // namespace inls
