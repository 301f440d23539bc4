#pragma once

#include <span>
#include <vector>

#include "subdiff/types.hpp"

namespace subdiff {

/// Tridiagonal matrix: sub[i] = A(i+1, i), sup[i] = A(i, i+1).
struct Tridiag {
  std::vector<cplx> sub;
  std::vector<cplx> diag;
  std::vector<cplx> sup;

  int size() const { return static_cast<int>(diag.size()); }
  bool diagonally_dominant() const;
  std::vector<cplx> multiply(std::span<const cplx> x) const;
};

/// Thomas algorithm; falls back to pivoted band LU when the matrix is not
/// diagonally dominant.
std::vector<cplx> thomas_solve(const Tridiag& A, std::span<const cplx> rhs);

/// Square band matrix with kl sub- and ku super-diagonals, LAPACK band layout.
class BandedMatrix {
public:
  BandedMatrix() = default;
  BandedMatrix(int n, int kl, int ku);

  int rows() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }
  bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }

  cplx get(int i, int j) const;
  void set(int i, int j, cplx v);
  void add(int i, int j, cplx v);

  std::vector<cplx> multiply(std::span<const cplx> x) const;

  // Storage has kl extra rows of headroom for the LU fill-in.
  int ldab() const { return 2 * kl_ + ku_ + 1; }
  std::vector<cplx>& data() { return ab_; }
  const std::vector<cplx>& data() const { return ab_; }

private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * ldab() + (kl_ + ku_ + i - j);
  }

  int n_ = 0;
  int kl_ = 0;
  int ku_ = 0;
  std::vector<cplx> ab_;
};

/// LU factors with partial pivoting; immutable and shareable across solves.
class BandedFactor {
public:
  int rows() const { return lu_.rows(); }

private:
  friend BandedFactor banded_factor(BandedMatrix A);
  friend std::vector<cplx> banded_solve(const BandedFactor& F, std::span<const cplx> rhs);

  BandedMatrix lu_;
  std::vector<int> ipiv_;
};

BandedFactor banded_factor(BandedMatrix A);
std::vector<cplx> banded_solve(const BandedFactor& F, std::span<const cplx> rhs);

} // namespace subdiff
