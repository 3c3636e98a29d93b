#include "inls/params.hpp"

#include <cmath>
#include <sstream>

#include "inls/error.hpp"

namespace inls {

namespace {
std::string fmt_range(double lo, double hi, double v) {
  std::ostringstream os;
  os.precision(17);
  os << "need " << lo << " < " << v << " < " << hi;
  return os.str();
}
}  // namespace

Params Params::validate(double d, double b, double sigma, double c) {
  if (!std::isfinite(d) || d != std::floor(d) || d < 3)
    throw Error(ErrorCode::DimensionTooSmall, "d must be an integer >= 3");
  if (!std::isfinite(b) || !(b > 0.0 && b < 2.0))
    throw Error(ErrorCode::BOutOfRange, fmt_range(0.0, 2.0, b));
  const double lo = (4.0 - 2.0 * b) / d;
  const double hi = (4.0 - 2.0 * b) / (d - 2.0);
  if (!std::isfinite(sigma) || !(sigma > lo && sigma < hi))
    throw Error(ErrorCode::SigmaNotIntercritical, fmt_range(lo, hi, sigma));
  const double cd = 0.25 * (d - 2.0) * (d - 2.0);
  if (!std::isfinite(c) || !(c > -cd))
    throw Error(ErrorCode::CouplingBelowHardy, "c must exceed -" + std::to_string(cd));
  Params p{static_cast<int>(d), b, sigma, c};
  // Both gaps follow from the range check, but rounding at the edges is possible.
  if (!(p.supercritical_gap() > 0.0) || !(p.subcritical_gap() > 0.0))
    throw Error(ErrorCode::SigmaNotIntercritical, "sigma numerically at an endpoint");
  return p;
}

double Params::hardy_constant() const { return 0.25 * (d - 2.0) * (d - 2.0); }
double Params::kappa() const { return d * sigma + 2.0 * b; }
double Params::supercritical_gap() const { return d * sigma - 4.0 + 2.0 * b; }
double Params::subcritical_gap() const { return 4.0 - 2.0 * b - (d - 2.0) * sigma; }

DerivedExponents derived_exponents(const Params& p) {
  const double s_c = 0.5 * p.d - (2.0 - p.b) / p.sigma;
  return {p.hardy_constant(), s_c, p.subcritical_gap() / p.supercritical_gap()};
}

}  // namespace inls
