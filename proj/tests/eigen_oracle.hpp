#pragma once

// Independent nilpotency oracle: eigenvalues in 50-digit binary floating point,
// and random 4x4 operators that are nilpotent by construction.

#include <algorithm>
#include <complex>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include "support.hpp"

namespace testing {

using Wide = boost::multiprecision::cpp_bin_float_50;
using WideMatrix = Eigen::Matrix<Wide, Eigen::Dynamic, Eigen::Dynamic>;

/// Largest eigenvalue modulus, computed in 50-digit arithmetic.
inline double spectral_radius(const Eigen::MatrixXd& m) {
  const WideMatrix wide = m.cast<Wide>();
  Eigen::EigenSolver<WideMatrix> solver(wide, false);
  Wide largest = 0;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const auto& z = solver.eigenvalues()[k];
    largest = std::max(largest, Wide(sqrt(z.real() * z.real() + z.imag() * z.imag())));
  }
  return static_cast<double>(largest);
}

/// Oracle verdict: every eigenvalue is below 1e-6 ||N||_F.
inline bool oracle_nilpotent(const Eigen::MatrixXd& m) { return spectral_radius(m) <= 1e-6 * m.norm(); }

/// S T S^-1 with T strictly upper triangular and S unimodular, so every entry is an exact integer.
inline Eigen::MatrixXd nilpotent_operator(Gen& gen, int n) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) t(i, j) = gen.integer(-3, 3);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd s_inv = Eigen::MatrixXd::Identity(n, n);
  for (int step = 0; step < 3; ++step) {
    const int i = gen.integer(0, n - 1);
    int j = gen.integer(0, n - 2);
    if (j >= i) ++j;
    const int c = gen.integer(-2, 2);
    // Elementary row operation E = I + c e_i e_j^T, with E^-1 = I - c e_i e_j^T.
    Eigen::MatrixXd e = Eigen::MatrixXd::Identity(n, n);
    e(i, j) = c;
    Eigen::MatrixXd e_inv = Eigen::MatrixXd::Identity(n, n);
    e_inv(i, j) = -c;
    s = e * s;
    s_inv = s_inv * e_inv;
  }
  return s * t * s_inv;
}

/// Entries uniform in [-1, 1]; nilpotent with probability zero.
inline Eigen::MatrixXd generic_operator(Gen& gen, int n) {
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = gen.uniform(-1.0, 1.0);
  return m;
}

}  // namespace testing
