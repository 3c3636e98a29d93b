#include "inls/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "inls/error.hpp"

namespace inls {

namespace {

// Reflect a node index that falls outside [0, N): even about the origin,
// odd about R_max. Returns the sign of the reflected sample.
double reflect(long& m, long n) {
  if (m < 0) {
    m = -1 - m;
    return 1.0;
  }
  if (m >= n) {
    m = 2 * n - 1 - m;
    return -1.0;
  }
  return 1.0;
}

template <class T>
std::vector<T> gradient_impl(const RadialGrid& g, const std::vector<T>& u) {
  if (u.size() != g.N) throw Error(ErrorCode::SizeMismatch, "gradient");
  std::vector<T> du(g.N);
  for (std::size_t e = 0; e < g.N; ++e) {
    const EdgeStencil& s = g.stencil[e];
    T acc{};
    for (int k = 0; k < s.count; ++k) acc += s.coef[k] * u[s.node[k]];
    du[e] = acc;
  }
  return du;
}

template <class T>
std::vector<T> stiffness_impl(const RadialGrid& g, const std::vector<T>& u) {
  if (u.size() != g.N) throw Error(ErrorCode::SizeMismatch, "stiffness_apply");
  const std::size_t n = g.N;
  std::vector<T> y(n, T{});
  for (std::size_t j = 0; j < n; ++j) {
    y[j] += g.kband[j][0] * u[j];
    for (std::size_t m = 1; m <= 3 && j + m < n; ++m) {
      y[j] += g.kband[j][m] * u[j + m];
      y[j + m] += g.kband[j][m] * u[j];
    }
  }
  return y;
}

template <class T>
std::vector<T> pc_impl(const RadialGrid& g, const Params& p, const std::vector<T>& u) {
  std::vector<T> y = stiffness_impl(g, u);
  for (std::size_t j = 0; j < g.N; ++j) y[j] = y[j] / g.w[j] + p.c * u[j] / (g.r[j] * g.r[j]);
  return y;
}

double probe_ratio(const RadialGrid& g, const std::vector<double>& u) {
  const auto du = gradient(g, u);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) {
    num += g.w[j] * u[j] * u[j] / (g.r[j] * g.r[j]);
    den += g.we[j] * du[j] * du[j];
  }
  const double cd = 0.25 * (g.d - 2.0) * (g.d - 2.0);
  return cd * num / den;
}

// Worst Hardy ratio over Gaussians of many widths and near-extremal
// (r^2 + s^2)^{-(d-2)/4} profiles with a Gaussian envelope.
double measure_hardy(const RadialGrid& g) {
  double worst = 0.0;
  const double lo = std::max(4.0 * g.r.front(), 1e-6 * g.R_max);
  const double hi = 0.25 * g.R_max;
  const int count = 24;
  std::vector<double> u(g.N);
  for (int k = 0; k < count; ++k) {
    const double s = lo * std::pow(hi / lo, k / double(count - 1));
    for (std::size_t j = 0; j < g.N; ++j) u[j] = std::exp(-(g.r[j] / s) * (g.r[j] / s));
    worst = std::max(worst, probe_ratio(g, u));
    const double env = 0.2 * g.R_max;
    for (std::size_t j = 0; j < g.N; ++j)
      u[j] = std::pow(g.r[j] * g.r[j] + s * s, -(g.d - 2.0) / 4.0) * std::exp(-(g.r[j] / env) * (g.r[j] / env));
    worst = std::max(worst, probe_ratio(g, u));
  }
  return worst;
}

}  // namespace

namespace {
std::string graded_label(double exponent) {
  std::ostringstream os;
  os.precision(17);
  os << "graded(p=" << exponent << ")";
  return os.str();
}
}  // namespace

std::string Mapping::describe() const {
  if (kind == MappingKind::uniform) return "uniform";
  return graded_label(exponent);
}

std::string RadialGrid::mapping_label() const {
  if (mapping.kind == MappingKind::uniform) return "uniform";
  return graded_label(exponent);
}

bool RadialGrid::hardy_ok(const Params& p) const {
  if (p.c >= 0.0) return true;
  return -p.c * hardy_ratio / p.hardy_constant() < 1.0;
}

double effective_exponent(const Params& p, const Mapping& mapping) {
  if (mapping.kind == MappingKind::uniform) return 1.0;
  double e = mapping.exponent;
  if (p.c < 0.0) {
    // Q ~ r^alpha near 0 with 2 alpha + d - 2 = 2 sqrt(c(d) + c); the energy
    // integrand then behaves like xi^{p*gamma - 1} in the mapped coordinate.
    const double gamma = 2.0 * std::sqrt(p.hardy_constant() + p.c);
    double want = 2.2 / gamma;
    want = 2.0 * std::ceil((want - 1.0) / 2.0) + 1.0;  // next odd integer
    e = std::max(e, std::min(want, 15.0));
  }
  return e;
}

RadialGrid build_grid(const Params& p, std::size_t N, double R_max, Mapping mapping) {
  if (N < 16) throw Error(ErrorCode::InvalidResolution, "N must be at least 16");
  if (!(R_max > 0.0) || !std::isfinite(R_max)) throw Error(ErrorCode::InvalidResolution, "R_max must be positive");
  if (mapping.kind == MappingKind::graded && !(mapping.exponent >= 1.0 && mapping.exponent <= 15.0))
    throw Error(ErrorCode::InvalidResolution, "grading exponent must lie in [1, 15]");

  RadialGrid g;
  g.d = p.d;
  g.N = N;
  g.R_max = R_max;
  g.mapping = mapping;
  g.exponent = effective_exponent(p, mapping);
  g.omega = 2.0 * std::pow(std::numbers::pi, 0.5 * p.d) / std::tgamma(0.5 * p.d);

  const double h = 1.0 / static_cast<double>(N);
  const double q = g.exponent;
  auto radius = [&](double xi) { return R_max * std::pow(xi, q); };
  auto jac = [&](double xi) { return R_max * q * std::pow(xi, q - 1.0); };

  g.r.resize(N);
  g.w.resize(N);
  g.re.resize(N);
  g.we.resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double xi = (j + 0.5) * h;
    g.r[j] = radius(xi);
    g.w[j] = std::pow(g.r[j], p.d - 1) * jac(xi) * h;
    const double xe = (j + 1.0) * h;
    g.re[j] = (j + 1 == N) ? R_max : radius(xe);
    g.we[j] = std::pow(g.re[j], p.d - 1) * jac(xe) * h;
  }
  g.we[N - 1] *= 0.5;  // trapezoid end weight at xi = 1

  for (std::size_t j = 1; j < N; ++j)
    if (!(g.r[j] > g.r[j - 1]) || !(g.r[0] > 0.0))
      throw Error(ErrorCode::InvalidResolution, "nodes not strictly increasing and positive");

  // Fourth-order staggered derivative in xi, divided by dr/dxi.
  static constexpr double base[4] = {1.0 / 24.0, -27.0 / 24.0, 27.0 / 24.0, -1.0 / 24.0};
  g.stencil.resize(N);
  const long n = static_cast<long>(N);
  for (long e = 0; e < n; ++e) {
    const double scale = 1.0 / (h * jac((e + 1.0) * h));
    EdgeStencil s;
    for (int k = 0; k < 4; ++k) {
      long m = e - 1 + k;
      const double sign = reflect(m, n);
      const double cf = sign * base[k] * scale;
      int slot = -1;
      for (int t = 0; t < s.count; ++t)
        if (s.node[t] == m) slot = t;
      if (slot < 0) {
        slot = s.count++;
        s.node[slot] = static_cast<int>(m);
        s.coef[slot] = 0.0;
      }
      s.coef[slot] += cf;
    }
    g.stencil[e] = s;
  }

  g.kband.assign(N, {0.0, 0.0, 0.0, 0.0});
  for (std::size_t e = 0; e < N; ++e) {
    const EdgeStencil& s = g.stencil[e];
    for (int a = 0; a < s.count; ++a)
      for (int b = 0; b < s.count; ++b) {
        const int i = s.node[a], j = s.node[b];
        if (j < i) continue;
        g.kband[i][j - i] += g.we[e] * s.coef[a] * s.coef[b];
      }
  }

  g.hardy_ratio = measure_hardy(g);
  return g;
}

template <class T>
T RadialGrid::interpolate(const std::vector<T>& u, double radius) const {
  if (u.size() != N) throw Error(ErrorCode::SizeMismatch, "interpolate");
  if (radius >= R_max) return T{};
  if (radius < 0.0) radius = -radius;
  const double xi = std::pow(radius / R_max, 1.0 / exponent);
  const double s = xi * static_cast<double>(N) - 0.5;
  const long i0 = static_cast<long>(std::floor(s)) - 1;
  const double t = s - static_cast<double>(i0);
  // Cubic Lagrange weights for nodes at offsets 0..3 evaluated at t.
  const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  const double lw[4] = {l0, l1, l2, l3};
  T acc{};
  const long n = static_cast<long>(N);
  for (int k = 0; k < 4; ++k) {
    long m = i0 + k;
    const double sign = reflect(m, n);
    acc += (sign * lw[k]) * u[m];
  }
  return acc;
}

template double RadialGrid::interpolate<double>(const std::vector<double>&, double) const;
template Complex RadialGrid::interpolate<Complex>(const std::vector<Complex>&, double) const;

double integrate(const RadialGrid& g, const std::vector<double>& f) {
  if (f.size() != g.N) throw Error(ErrorCode::SizeMismatch, "integrate");
  double acc = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) acc += g.w[j] * f[j];
  return g.omega * acc;
}

std::vector<double> gradient(const RadialGrid& g, const std::vector<double>& u) { return gradient_impl(g, u); }
Field gradient(const RadialGrid& g, const Field& u) { return gradient_impl(g, u); }

std::vector<double> stiffness_apply(const RadialGrid& g, const std::vector<double>& u) {
  return stiffness_impl(g, u);
}
Field stiffness_apply(const RadialGrid& g, const Field& u) { return stiffness_impl(g, u); }

Field apply_Pc(const RadialGrid& g, const Params& p, const Field& u) { return pc_impl(g, p, u); }
std::vector<double> apply_Pc(const RadialGrid& g, const Params& p, const std::vector<double>& u) {
  return pc_impl(g, p, u);
}

double hardy_ratio(const RadialGrid& g, const Field& u) {
  if (u.size() != g.N) throw Error(ErrorCode::SizeMismatch, "hardy_ratio");
  const Field du = gradient(g, u);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < g.N; ++j) {
    num += g.w[j] * std::norm(u[j]) / (g.r[j] * g.r[j]);
    den += g.we[j] * std::norm(du[j]);
  }
  if (!(den > 0.0)) throw Error(ErrorCode::ZeroField, "hardy_ratio of a constant-zero gradient");
  return 0.25 * (g.d - 2.0) * (g.d - 2.0) * num / den;
}

Complex inner(const RadialGrid& g, const Field& u, const Field& v) {
  if (u.size() != g.N || v.size() != g.N) throw Error(ErrorCode::SizeMismatch, "inner");
  Complex acc{};
  for (std::size_t j = 0; j < g.N; ++j) acc += g.w[j] * u[j] * std::conj(v[j]);
  return g.omega * acc;
}

double outer_mass_fraction(const RadialGrid& g, const Field& u) {
  if (u.size() != g.N) throw Error(ErrorCode::SizeMismatch, "outer_mass_fraction");
  double outer = 0.0, total = 0.0;
  const double edge = 0.9 * g.R_max;
  for (std::size_t j = 0; j < g.N; ++j) {
    const double m = g.w[j] * std::norm(u[j]);
    total += m;
    if (g.r[j] > edge) outer += m;
  }
  return total > 0.0 ? outer / total : 0.0;
}

Field to_field(const std::vector<double>& u) { return Field(u.begin(), u.end()); }

}  // namespace inls
