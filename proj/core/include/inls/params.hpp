#pragma once

namespace inls {

// Physical parameters (d, b, sigma, c). Stored exactly as given; everything
// else is derived on demand.
struct Params {
  int d = 3;
  double b = 0.5;
  double sigma = 2.0;
  double c = 0.0;

  // Throws inls::Error naming the first violated constraint.
  static Params validate(double d, double b, double sigma, double c);

  double hardy_constant() const;  // ((d-2)/2)^2
  double kappa() const;           // d*sigma + 2b
  double supercritical_gap() const;  // d*sigma - 4 + 2b  (> 0)
  double subcritical_gap() const;    // 4 - 2b - (d-2)*sigma  (> 0)
};

struct DerivedExponents {
  double c_crit;
  double s_c;
  double sigma_c;
};

DerivedExponents derived_exponents(const Params& p);

}  // namespace inls
