#include "subdiff/linsolve.hpp"

#include <cmath>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "subdiff/error.hpp"

namespace subdiff {

bool Tridiag::diagonally_dominant() const {
  const int m = size();
  for (int i = 0; i < m; ++i) {
    double off = 0.0;
    if (i > 0) off += std::abs(sub[i - 1]);
    if (i + 1 < m) off += std::abs(sup[i]);
    if (std::abs(diag[i]) < off) return false;
  }
  return true;
}

std::vector<cplx> Tridiag::multiply(std::span<const cplx> x) const {
  const int m = size();
  std::vector<cplx> y(m);
  for (int i = 0; i < m; ++i) {
    cplx s = diag[i] * x[i];
    if (i > 0) s += sub[i - 1] * x[i - 1];
    if (i + 1 < m) s += sup[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

std::vector<cplx> thomas_solve(const Tridiag& A, std::span<const cplx> rhs) {
  const int m = A.size();
  if (static_cast<int>(rhs.size()) != m || static_cast<int>(A.sub.size()) != std::max(m - 1, 0) ||
      static_cast<int>(A.sup.size()) != std::max(m - 1, 0))
    throw ParameterError("tridiagonal system has inconsistent sizes");
  if (m == 0) return {};

  if (!A.diagonally_dominant()) {
    BandedMatrix B(m, 1, 1);
    for (int i = 0; i < m; ++i) {
      B.set(i, i, A.diag[i]);
      if (i + 1 < m) {
        B.set(i + 1, i, A.sub[i]);
        B.set(i, i + 1, A.sup[i]);
      }
    }
    return banded_solve(banded_factor(std::move(B)), rhs);
  }

  std::vector<cplx> c(m), x(m);
  cplx beta = A.diag[0];
  if (beta == cplx{}) throw SingularMatrixError("zero pivot in tridiagonal solve", 0);
  x[0] = rhs[0] / beta;
  for (int i = 1; i < m; ++i) {
    c[i] = A.sup[i - 1] / beta;
    beta = A.diag[i] - A.sub[i - 1] * c[i];
    if (beta == cplx{}) throw SingularMatrixError("zero pivot in tridiagonal solve", i);
    x[i] = (rhs[i] - A.sub[i - 1] * x[i - 1]) / beta;
  }
  for (int i = m - 2; i >= 0; --i) x[i] -= c[i + 1] * x[i + 1];
  return x;
}

BandedMatrix::BandedMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku) {
  if (n < 1 || kl < 0 || ku < 0) throw ParameterError("invalid band matrix shape");
  ab_.assign(static_cast<std::size_t>(ldab()) * n, cplx{});
}

cplx BandedMatrix::get(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw ParameterError("band index out of range");
  return in_band(i, j) ? ab_[index(i, j)] : cplx{};
}

void BandedMatrix::set(int i, int j, cplx v) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || !in_band(i, j))
    throw ParameterError("entry outside the band");
  ab_[index(i, j)] = v;
}

void BandedMatrix::add(int i, int j, cplx v) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || !in_band(i, j))
    throw ParameterError("entry outside the band");
  ab_[index(i, j)] += v;
}

std::vector<cplx> BandedMatrix::multiply(std::span<const cplx> x) const {
  if (static_cast<int>(x.size()) != n_) throw ParameterError("vector length mismatch");
  std::vector<cplx> y(n_);
  for (int j = 0; j < n_; ++j) {
    const int i0 = std::max(0, j - ku_);
    const int i1 = std::min(n_ - 1, j + kl_);
    for (int i = i0; i <= i1; ++i) y[i] += ab_[index(i, j)] * x[j];
  }
  return y;
}

BandedFactor banded_factor(BandedMatrix A) {
  BandedFactor F;
  const int n = A.rows();
  F.ipiv_.resize(n);
  const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, A.kl(), A.ku(),
                                         A.data().data(), A.ldab(), F.ipiv_.data());
  if (info > 0) {
    std::ostringstream os;
    os << "band matrix is singular at pivot " << info;
    throw SingularMatrixError(os.str(), info - 1);
  }
  if (info < 0) throw ParameterError("invalid argument to band factorization");
  F.lu_ = std::move(A);
  return F;
}

std::vector<cplx> banded_solve(const BandedFactor& F, std::span<const cplx> rhs) {
  const int n = F.lu_.rows();
  if (static_cast<int>(rhs.size()) != n) throw ParameterError("right-hand side length mismatch");
  std::vector<cplx> x(rhs.begin(), rhs.end());
  const lapack_int info =
      LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, F.lu_.kl(), F.lu_.ku(), 1, F.lu_.data().data(),
                     F.lu_.ldab(), F.ipiv_.data(), x.data(), n);
  if (info != 0) throw ParameterError("band solve rejected its arguments");
  return x;
}

} // namespace subdiff
