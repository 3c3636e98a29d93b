#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <tuple>

#include "inls/ground_state.hpp"
#include "inls/radial_grid.hpp"

namespace inls::testing {

inline Params reference_params(double c = 0.0) { return Params::validate(3, 0.5, 2.0, c); }

inline std::shared_ptr<const RadialGrid> make_grid(const Params& p, std::size_t N = 2048, double R = 20.0,
                                                   Mapping m = {MappingKind::graded, 3.0}) {
  return std::make_shared<const RadialGrid>(build_grid(p, N, R, m));
}

// Ground states are reused across tests in one binary.
inline const GroundStateBundle& cached_ground_state(const Params& p, std::size_t N = 2048, double R = 20.0,
                                                    double exponent = 3.0) {
  static std::mutex mu;
  static std::map<std::tuple<int, double, double, double, std::size_t, double, double>,
                  std::unique_ptr<GroundStateBundle>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(p.d, p.b, p.sigma, p.c, N, R, exponent);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto grid = make_grid(p, N, R, {MappingKind::graded, exponent});
    it = cache.emplace(key, std::make_unique<GroundStateBundle>(solve_ground_state(p, grid))).first;
  }
  return *it->second;
}

inline Field gaussian(const RadialGrid& g, double amp = 1.0, double width = 1.0, double chirp = 0.0) {
  Field u(g.N);
  for (std::size_t j = 0; j < g.N; ++j) {
    const double r = g.r[j];
    u[j] = amp * std::exp(-0.5 * r * r / (width * width)) * std::polar(1.0, chirp * r * r);
  }
  return u;
}

// Smooth random field: sum of a few Gaussian bumps, optionally chirped.
inline Field random_bumps(const RadialGrid& g, std::mt19937_64& rng, bool complex_phase = true) {
  std::uniform_real_distribution<double> amp(0.2, 2.0), centre(0.0, 3.0), width(0.3, 1.5), chirp(-0.5, 0.5);
  std::uniform_int_distribution<int> count(1, 4);
  Field u(g.N, 0.0);
  const int n = count(rng);
  for (int k = 0; k < n; ++k) {
    const double a = amp(rng), c0 = centre(rng), w = width(rng), ch = complex_phase ? chirp(rng) : 0.0;
    for (std::size_t j = 0; j < g.N; ++j) {
      const double r = g.r[j];
      const double env = std::exp(-0.5 * (r - c0) * (r - c0) / (w * w)) + std::exp(-0.5 * (r + c0) * (r + c0) / (w * w));
      u[j] += a * env * std::polar(1.0, ch * r * r);
    }
  }
  return u;
}

// Compactly supported bump (1 - r^2/s^2)^6 on r < s.
inline Field compact_bump(const RadialGrid& g, double s, double chirp = 0.0) {
  Field u(g.N, 0.0);
  for (std::size_t j = 0; j < g.N; ++j) {
    const double x = g.r[j] / s;
    if (x < 1.0) u[j] = std::pow(1.0 - x * x, 6) * std::polar(1.0, chirp * g.r[j] * g.r[j]);
  }
  return u;
}

}  // namespace inls::testing
