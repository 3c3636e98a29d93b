#pragma once

#include <utility>

#include "inls/params.hpp"
#include "inls/radial_grid.hpp"

namespace inls {

struct GroundStateBundle;

struct InvariantSnapshot {
  double t = 0.0;
  double mass = 0.0;
  double h1c_sq = 0.0;
  double energy = 0.0;
  double potential = 0.0;
  double g_value = 0.0;
  double variance = 0.0;
  double variance_rate = 0.0;
};

double mass(const RadialGrid& g, const Field& u);
// int |u'|^2 dx (no c term).
double gradient_sq(const RadialGrid& g, const Field& u);
// int |u'|^2 + c int r^{-2}|u|^2.
double h1c_sq(const RadialGrid& g, const Params& p, const Field& u);
double potential(const RadialGrid& g, const Params& p, const Field& u);
double energy(const RadialGrid& g, const Params& p, const Field& u);
double variance(const RadialGrid& g, const Field& u);
// 4 Im int r conj(u) u_r dx, evaluated on the interfaces.
double variance_rate(const RadialGrid& g, const Field& u);

InvariantSnapshot snapshot(const RadialGrid& g, const Params& p, const Field& u, double t);

double gn_quotient(const RadialGrid& g, const Params& p, const Field& u);

// (lhs, rhs) = (M, (2/d) sqrt(V) sqrt(int |u'|^2)).
std::pair<double, double> check_uncertainty(const RadialGrid& g, const Field& u);

// (lhs, rhs) = ((V'/4)^2, V [h - P^{4/k} / (C_GN^{4/k} M^{a/k})]).
std::pair<double, double> check_momentum_bound(const RadialGrid& g, const Params& p, const Field& u,
                                               const GroundStateBundle* gs);

// Slack used by inequality property checks: lhs <= rhs (1 + rel) + abs.
bool within_slack(double lhs, double rhs, double rel = 1e-6, double abs = 1e-9);

}  // namespace inls
