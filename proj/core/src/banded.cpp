#include "inls/banded.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "inls/error.hpp"

namespace inls {

template <class T>
BandMatrix<T>::BandMatrix(std::size_t n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1), ab_(n * (2 * kl + ku + 1), T{}), ipiv_(n) {}

template <class T>
std::vector<T> BandMatrix<T>::multiply(const std::vector<T>& x) const {
  std::vector<T> y(n_, T{});
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t i0 = j >= static_cast<std::size_t>(ku_) ? j - ku_ : 0;
    const std::size_t i1 = std::min(n_ - 1, j + kl_);
    for (std::size_t i = i0; i <= i1; ++i) y[i] += (*this)(i, j) * x[j];
  }
  return y;
}

namespace {
lapack_int gbtrf(lapack_int n, lapack_int kl, lapack_int ku, double* ab, lapack_int ldab, lapack_int* ipiv) {
  return LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab, ldab, ipiv);
}
lapack_int gbtrf(lapack_int n, lapack_int kl, lapack_int ku, std::complex<double>* ab, lapack_int ldab,
                 lapack_int* ipiv) {
  return LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab, ldab, ipiv);
}
lapack_int gbtrs(lapack_int n, lapack_int kl, lapack_int ku, const double* ab, lapack_int ldab,
                 const lapack_int* ipiv, double* b) {
  return LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1, ab, ldab, ipiv, b, n);
}
lapack_int gbtrs(lapack_int n, lapack_int kl, lapack_int ku, const std::complex<double>* ab, lapack_int ldab,
                 const lapack_int* ipiv, std::complex<double>* b) {
  return LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1, ab, ldab, ipiv, b, n);
}
}  // namespace

template <class T>
void BandMatrix<T>::factor() {
  scale_.assign(n_, 1.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const double d = std::abs((*this)(j, j));
    if (d > 0.0 && std::isfinite(d)) scale_[j] = 1.0 / std::sqrt(d);
  }
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t i0 = j >= static_cast<std::size_t>(ku_) ? j - ku_ : 0;
    const std::size_t i1 = std::min(n_ - 1, j + kl_);
    for (std::size_t i = i0; i <= i1; ++i) (*this)(i, j) *= scale_[i] * scale_[j];
  }
  const lapack_int info = gbtrf(static_cast<lapack_int>(n_), kl_, ku_, ab_.data(), ldab_, ipiv_.data());
  if (info != 0) throw Error(ErrorCode::LinearSolveFailed, "band LU failed, info=" + std::to_string(info));
  factored_ = true;
}

template <class T>
void BandMatrix<T>::solve_in_place(std::vector<T>& rhs) const {
  if (!factored_) throw Error(ErrorCode::LinearSolveFailed, "solve before factor");
  if (rhs.size() != n_) throw Error(ErrorCode::SizeMismatch, "band solve rhs");
  for (std::size_t i = 0; i < n_; ++i) rhs[i] *= scale_[i];
  const lapack_int info =
      gbtrs(static_cast<lapack_int>(n_), kl_, ku_, ab_.data(), ldab_, ipiv_.data(), rhs.data());
  if (info != 0) throw Error(ErrorCode::LinearSolveFailed, "band solve failed, info=" + std::to_string(info));
  for (std::size_t i = 0; i < n_; ++i) rhs[i] *= scale_[i];
}

template class BandMatrix<double>;
template class BandMatrix<std::complex<double>>;

}  // namespace inls
