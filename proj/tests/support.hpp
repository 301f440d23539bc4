#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "subdiff/types.hpp"

namespace testing_support {

using subdiff::cplx;

inline double rate(double coarse, double fine) { return std::log2(coarse / fine); }

inline std::vector<cplx> random_vector(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& z : v) z = {u(rng), u(rng)};
  return v;
}

inline Eigen::VectorXcd to_eigen(const std::vector<cplx>& v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

// (1, 10, 1)/12 and (1, -2, 1)/h^2 on m interior nodes.
inline Eigen::MatrixXd average_matrix(int m) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    A(i, i) = 10.0 / 12;
    if (i > 0) A(i, i - 1) = 1.0 / 12;
    if (i + 1 < m) A(i, i + 1) = 1.0 / 12;
  }
  return A;
}

inline Eigen::MatrixXd difference_matrix(int m, double h) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    D(i, i) = -2.0 / (h * h);
    if (i > 0) D(i, i - 1) = 1.0 / (h * h);
    if (i + 1 < m) D(i, i + 1) = 1.0 / (h * h);
  }
  return D;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

} // namespace testing_support
