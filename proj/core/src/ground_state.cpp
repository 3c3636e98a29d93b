#include "inls/ground_state.hpp"

#include <algorithm>
#include <cmath>

#include "inls/banded.hpp"
#include "inls/error.hpp"

namespace inls {

namespace {

// A = K + W (c r^{-2} + 1), the discrete P_c + 1 in weighted form.
BandMatrix<double> assemble_shifted(const RadialGrid& g, const Params& p) {
  const std::size_t n = g.N;
  BandMatrix<double> a(n, 3, 3);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t m = 0; m <= 3 && j + m < n; ++m) {
      a(j, j + m) = g.kband[j][m];
      a(j + m, j) = g.kband[j][m];
    }
    a(j, j) += g.w[j] * (p.c / (g.r[j] * g.r[j]) + 1.0);
  }
  return a;
}

double sup_abs(const Profile& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Nonlinear source w r^{-b} |Q|^sigma Q.
Profile source(const RadialGrid& g, const Params& p, const Profile& q) {
  Profile s(g.N);
  for (std::size_t j = 0; j < g.N; ++j) s[j] = g.w[j] * std::pow(g.r[j], -p.b) * std::pow(std::abs(q[j]), p.sigma) * q[j];
  return s;
}

struct Residual {
  double backward;
  double strong;
  double norm;
};

Residual residual(const RadialGrid& g, const Params& p, const BandMatrix<double>& a, const Profile& q) {
  const Profile aq = a.multiply(q);
  const Profile s = source(g, p, q);
  Profile absq(q.size());
  for (std::size_t j = 0; j < q.size(); ++j) absq[j] = std::abs(q[j]);
  // |A| |Q| with the entrywise absolute matrix.
  Profile scale(q.size(), 0.0);
  const std::size_t n = g.N;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t lo = j >= 3 ? j - 3 : 0;
    const std::size_t hi = std::min(n - 1, j + 3);
    for (std::size_t k = lo; k <= hi; ++k) scale[j] += std::abs(a(j, k)) * absq[k];
  }
  Residual r{0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    const double f = aq[j] - s[j];
    const double den = scale[j] + std::abs(s[j]);
    if (den > 0.0) r.backward = std::max(r.backward, std::abs(f) / den);
    r.strong = std::max(r.strong, std::abs(f) / g.w[j]);
    r.norm = std::max(r.norm, std::abs(f));
  }
  return r;
}

double rel_diff(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m > 0.0 ? std::abs(a - b) / m : 0.0;
}

}  // namespace

GroundStateBundle bundle_from_profile(const Params& p, std::shared_ptr<const RadialGrid> grid, Profile Q,
                                      std::string seed, int iterations, int newton_iterations) {
  if (!grid) throw Error(ErrorCode::InvalidResolution, "missing grid");
  const RadialGrid& g = *grid;
  if (Q.size() != g.N) throw Error(ErrorCode::SizeMismatch, "ground-state profile");
  for (double q : Q)
    if (!(q > 0.0)) throw Error(ErrorCode::NegativeProfile, "profile must be strictly positive");

  GroundStateBundle gs;
  gs.params = p;
  gs.grid = grid;
  gs.Q = std::move(Q);
  gs.seed = std::move(seed);
  gs.iterations = iterations;
  gs.newton_iterations = newton_iterations;

  const Field u = gs.field();
  const double sigma_c = derived_exponents(p).sigma_c;
  gs.M_G = mass(g, u);
  const double s2 = h1c_sq(g, p, u);
  gs.S_G = std::sqrt(s2);
  gs.P_G = potential(g, p, u);
  gs.E_G = 0.5 * s2 - gs.P_G / (p.sigma + 2.0);
  gs.C_GN = gn_quotient(g, p, u);
  gs.K_G = gs.S_G * std::pow(gs.M_G, 0.5 * sigma_c);
  gs.H_G = gs.E_G * std::pow(gs.M_G, sigma_c);

  const BandMatrix<double> a = assemble_shifted(g, p);
  const Residual res = residual(g, p, a, gs.Q);
  gs.residual_elliptic = res.backward;
  gs.residual_strong = res.strong;
  gs.residuals_pohozaev = pohozaev_report(gs);
  return gs;
}

GroundStateBundle solve_ground_state(const Params& p, std::shared_ptr<const RadialGrid> grid,
                                     const SolverOptions& opts) {
  if (!grid) throw Error(ErrorCode::InvalidResolution, "missing grid");
  const RadialGrid& g = *grid;
  const std::size_t n = g.N;

  const BandMatrix<double> a = assemble_shifted(g, p);
  BandMatrix<double> lu = a;
  lu.factor();

  Profile q(n);
  for (std::size_t j = 0; j < n; ++j) q[j] = std::exp(-0.5 * g.r[j] * g.r[j]);

  int it = 0;
  bool converged = false;
  // Spectral renormalization: Q <- gamma (P_c + 1)^{-1} [r^{-b} Q^{sigma+1}].
  for (; it < opts.max_iter; ++it) {
    Profile v = source(g, p, q);
    lu.solve_in_place(v);
    const Profile av = a.multiply(v);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      num += av[j] * v[j];
      den += g.w[j] * std::pow(g.r[j], -p.b) * std::pow(std::abs(v[j]), p.sigma + 2.0);
    }
    if (!(num > 0.0) || !(den > 0.0)) throw Error(ErrorCode::NoConvergence, "renormalization degenerated");
    const double gamma = std::pow(num / den, 1.0 / p.sigma);
    double change = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double next = gamma * v[j];
      change = std::max(change, std::abs(next - q[j]));
      q[j] = next;
    }
    change /= sup_abs(q);
    if (change < opts.tol) {
      converged = true;
      ++it;
      break;
    }
    if (change < opts.newton_switch) {
      ++it;
      break;
    }
  }
  if (it >= opts.max_iter && !converged)
    throw Error(ErrorCode::NoConvergence, "fixed point did not reach the Newton switch");

  // Damped Newton on F(Q) = A Q - W r^{-b} |Q|^sigma Q.
  int newton = 0;
  const int newton_cap = std::min(100, opts.max_iter);
  while (!converged && newton < newton_cap && it + newton < opts.max_iter) {
    ++newton;
    const Profile aq = a.multiply(q);
    const Profile s = source(g, p, q);
    Profile f(n);
    for (std::size_t j = 0; j < n; ++j) f[j] = aq[j] - s[j];
    BandMatrix<double> jac = a;
    for (std::size_t j = 0; j < n; ++j)
      jac(j, j) -= g.w[j] * (p.sigma + 1.0) * std::pow(g.r[j], -p.b) * std::pow(std::abs(q[j]), p.sigma);
    jac.factor();
    jac.solve_in_place(f);
    double step = 1.0;
    Profile trial(n);
    for (int halving = 0;; ++halving) {
      bool positive = true;
      for (std::size_t j = 0; j < n; ++j) {
        trial[j] = q[j] - step * f[j];
        if (!(trial[j] > 0.0)) positive = false;
      }
      if (positive) break;
      if (halving >= 40) throw Error(ErrorCode::NegativeProfile, "Newton iterate lost positivity");
      step *= 0.5;
    }
    double change = 0.0;
    for (std::size_t j = 0; j < n; ++j) change = std::max(change, std::abs(trial[j] - q[j]));
    q = trial;
    if (change / sup_abs(q) < opts.tol) converged = true;
  }
  if (!converged) throw Error(ErrorCode::NoConvergence, "iteration budget exhausted");
  for (double x : q)
    if (!(x > 0.0)) throw Error(ErrorCode::NegativeProfile, "converged profile is not positive");

  GroundStateBundle gs = bundle_from_profile(p, grid, std::move(q), opts.seed, it, newton);
  if (!(gs.residual_elliptic <= opts.residual_tol))
    throw Error(ErrorCode::NoConvergence, "elliptic residual above tolerance");
  return gs;
}

std::array<double, 4> pohozaev_report(const GroundStateBundle& gs) {
  const Params& p = gs.params;
  const double k = p.kappa();
  const double a = p.subcritical_gap();
  const double s2 = gs.S_G * gs.S_G;
  return {rel_diff(gs.M_G, a / k * s2), rel_diff(gs.M_G, a / (2.0 * (p.sigma + 2.0)) * gs.P_G),
          rel_diff(gs.E_G, (k - 4.0) / (2.0 * k) * s2), rel_diff(gs.E_G, (k - 4.0) / (4.0 * (p.sigma + 2.0)) * gs.P_G)};
}

ThresholdRecord thresholds(const GroundStateBundle& gs) {
  const Params& p = gs.params;
  const double k = p.kappa();
  const double sigma_c = derived_exponents(p).sigma_c;
  ThresholdRecord t{};
  t.C_GN_pohozaev = 2.0 * (p.sigma + 2.0) / k * std::pow(gs.K_G, -(k - 4.0) / 2.0);
  t.C_GN_direct = gn_quotient(*gs.grid, p, gs.field());
  t.C_GN_rel_diff = rel_diff(t.C_GN_pohozaev, t.C_GN_direct);
  t.H_G_energy = gs.E_G * std::pow(gs.M_G, sigma_c);
  t.H_G_pohozaev = (k - 4.0) / (2.0 * k) * gs.K_G * gs.K_G;
  t.H_G_rel_diff = rel_diff(t.H_G_energy, t.H_G_pohozaev);
  t.PM_lhs = gs.P_G * std::pow(gs.M_G, sigma_c);
  t.PM_rhs = 2.0 * (p.sigma + 2.0) / k * gs.K_G * gs.K_G;
  t.PM_rel_diff = rel_diff(t.PM_lhs, t.PM_rhs);
  return t;
}

Field rescale_data(const RadialGrid& g, const Params& p, const Field& u, double lambda, ScaleMode mode) {
  if (u.size() != g.N) throw Error(ErrorCode::SizeMismatch, "rescale_data");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::ScaleOutOfRange, "lambda must be positive");
  Field out(g.N);
  if (mode == ScaleMode::amplitude) {
    for (std::size_t j = 0; j < g.N; ++j) out[j] = lambda * u[j];
    return out;
  }
  if (lambda == 1.0) return u;
  if (lambda < 1.0) {
    // Mass beyond lambda R_max would be pushed outside the domain.
    double outside = 0.0, total = 0.0;
    for (std::size_t j = 0; j < g.N; ++j) {
      const double m = g.w[j] * std::norm(u[j]);
      total += m;
      if (g.r[j] > lambda * g.R_max) outside += m;
    }
    if (total > 0.0 && outside > 1e-12 * total)
      throw Error(ErrorCode::ScaleOutOfRange, "rescaled profile leaves the grid");
  }
  const double amp = std::pow(lambda, (2.0 - p.b) / p.sigma);
  for (std::size_t j = 0; j < g.N; ++j) out[j] = amp * g.interpolate(u, lambda * g.r[j]);
  return out;
}

}  // namespace inls
