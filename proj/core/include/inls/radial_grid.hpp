#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "inls/params.hpp"

namespace inls {

using Complex = std::complex<double>;
using Field = std::vector<Complex>;  // samples u(r_j)
using Profile = std::vector<double>;  // real samples

enum class MappingKind { uniform, graded };

// r = R_max * xi^exponent on cell centres xi_j = (j + 1/2)/N. Odd exponents
// keep the quadrature integrands even in xi for odd d.
struct Mapping {
  MappingKind kind = MappingKind::graded;
  double exponent = 3.0;

  std::string describe() const;
};

// Derivative at one cell interface: up to four node contributions.
struct EdgeStencil {
  std::array<int, 4> node{};
  std::array<double, 4> coef{};
  int count = 0;
};

// Immutable radial grid. Nodes sit at cell centres of a power-graded mapping,
// interfaces at the cell edges; the last interface is r = R_max (Dirichlet).
// Radial derivatives live on interfaces (fourth-order staggered stencil with
// even reflection at the origin and odd reflection at R_max).
class RadialGrid {
 public:
  int d = 3;
  std::size_t N = 0;
  double R_max = 0.0;
  Mapping mapping;           // as requested
  double exponent = 1.0;     // effective grading exponent actually used
  double omega = 0.0;        // area of the unit sphere in R^d
  double hardy_ratio = 0.0;  // worst discrete Hardy ratio over the probe basis

  std::vector<double> r;   // nodes
  std::vector<double> w;   // node weights, r^{d-1} dr (omega applied separately)
  std::vector<double> re;  // interface radii, e = 0..N-1 at xi = (e+1)/N
  std::vector<double> we;  // interface weights
  std::vector<EdgeStencil> stencil;

  // Upper band of the stiffness matrix K = D^T diag(we) D: kband[j][m] = K(j, j+m).
  std::vector<std::array<double, 4>> kband;

  static constexpr int bandwidth = 3;

  std::size_t size() const { return N; }
  // Effective mapping description, e.g. "graded(p=5)".
  std::string mapping_label() const;
  bool hardy_ok(const Params& p) const;

  // Interpolate samples at an arbitrary radius (cubic in the mapped coordinate).
  template <class T>
  T interpolate(const std::vector<T>& u, double radius) const;
};

RadialGrid build_grid(const Params& p, std::size_t N, double R_max, Mapping mapping);

// Grading exponent actually used for these parameters.
double effective_exponent(const Params& p, const Mapping& mapping);

double integrate(const RadialGrid& g, const std::vector<double>& f);

// Radial derivative at every interface.
std::vector<double> gradient(const RadialGrid& g, const std::vector<double>& u);
Field gradient(const RadialGrid& g, const Field& u);

// K u (stiffness action, without the node weights).
std::vector<double> stiffness_apply(const RadialGrid& g, const std::vector<double>& u);
Field stiffness_apply(const RadialGrid& g, const Field& u);

// P_c u = -(u'' + (d-1)/r u') + c r^{-2} u at every node.
Field apply_Pc(const RadialGrid& g, const Params& p, const Field& u);
std::vector<double> apply_Pc(const RadialGrid& g, const Params& p, const std::vector<double>& u);

// c(d) * int r^{-2}|u|^2 / int |u'|^2.
double hardy_ratio(const RadialGrid& g, const Field& u);

// Discrete inner product <u, v> = omega * sum w_j u_j conj(v_j).
Complex inner(const RadialGrid& g, const Field& u, const Field& v);

// Fraction of the mass in r > 0.9 R_max.
double outer_mass_fraction(const RadialGrid& g, const Field& u);

Field to_field(const std::vector<double>& u);

}  // namespace inls
