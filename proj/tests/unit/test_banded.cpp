#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "inls/banded.hpp"
#include "inls/error.hpp"

using namespace inls;

namespace {
// S T S with T = tridiag(-1, 2.5, -1) and S spanning forty decades, the row
// structure a strongly graded grid produces.
template <class T>
BandMatrix<T> graded_system(std::size_t n, T shift) {
  BandMatrix<T> a(n, 1, 1);
  auto s = [&](std::size_t j) { return std::pow(10.0, -40.0 * (1.0 - double(j) / double(n - 1))); };
  for (std::size_t j = 0; j < n; ++j) {
    a(j, j) = (T(2.5) + shift) * s(j) * s(j);
    if (j + 1 < n) {
      a(j, j + 1) = T(-1.0) * s(j) * s(j + 1);
      a(j + 1, j) = T(-1.0) * s(j) * s(j + 1);
    }
  }
  return a;
}
}  // namespace

TEST(Banded, ComponentwiseAccurateOnGradedRows) {
  const std::size_t n = 200;
  BandMatrix<double> a = graded_system<double>(n, 0.0);
  std::vector<double> x(n, 1.0);
  std::vector<double> b = a.multiply(x);
  a.factor();
  a.solve_in_place(b);
  for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(b[j], 1.0, 1e-12) << j;
}

TEST(Banded, ComplexShiftedSystem) {
  using C = std::complex<double>;
  const std::size_t n = 200;
  BandMatrix<C> a = graded_system<C>(n, C(0.0, 3.0));
  std::vector<C> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = std::polar(1.0, 0.1 * double(j));
  std::vector<C> b = a.multiply(x);
  a.factor();
  a.solve_in_place(b);
  for (std::size_t j = 0; j < n; ++j) EXPECT_LT(std::abs(b[j] - x[j]), 1e-12) << j;
}

TEST(Banded, Errors) {
  BandMatrix<double> a(4, 1, 1);
  std::vector<double> b(4, 1.0);
  EXPECT_THROW(a.solve_in_place(b), Error);
  try {
    a.factor();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LinearSolveFailed);
  }
  BandMatrix<double> ok(4, 1, 1);
  for (std::size_t j = 0; j < 4; ++j) ok(j, j) = 1.0;
  ok.factor();
  std::vector<double> wrong(3, 1.0);
  EXPECT_THROW(ok.solve_in_place(wrong), Error);
}
