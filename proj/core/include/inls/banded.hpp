#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace inls {

// General band matrix in LAPACK storage (column major, room for pivoting),
// solved by LU with partial pivoting after symmetric diagonal scaling
// s_j = |a_jj|^{-1/2}. Graded grids give rows of wildly different size and
// plain pivoting only keeps the small ones normwise accurate.
template <class T>
class BandMatrix {
 public:
  BandMatrix(std::size_t n, int kl, int ku);

  std::size_t size() const { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return ab_[j * ldab_ + (kl_ + ku_ + i - j)]; }
  T operator()(std::size_t i, std::size_t j) const { return ab_[j * ldab_ + (kl_ + ku_ + i - j)]; }

  // y = A x; only valid before factor().
  std::vector<T> multiply(const std::vector<T>& x) const;

  void factor();
  void solve_in_place(std::vector<T>& rhs) const;
  bool factored() const { return factored_; }

 private:
  std::size_t n_;
  int kl_, ku_, ldab_;
  std::vector<T> ab_;
  std::vector<int> ipiv_;
  std::vector<double> scale_;
  bool factored_ = false;
};

extern template class BandMatrix<double>;
extern template class BandMatrix<std::complex<double>>;

}  // namespace inls
