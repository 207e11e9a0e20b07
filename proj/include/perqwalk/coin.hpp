#pragma once

// Coin operators, the coin-space reflection, and the local eigenproblem of
// the reflected coin RC that fixes the possible common-eigenstate spectrum.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace perqwalk {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix4 = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4cd;

constexpr double kUnitaryTol = 1e-12;

enum class CoinKind { hadamard2d, grover, fourier, custom };

inline const char* to_string(CoinKind k) {
  switch (k) {
    case CoinKind::hadamard2d: return "hadamard2d";
    case CoinKind::grover: return "grover";
    case CoinKind::fourier: return "fourier";
    case CoinKind::custom: return "custom";
  }
  return "?";
}

inline CoinKind coin_kind_from_string(const std::string& s) {
  if (s == "hadamard2d" || s == "hadamard") return CoinKind::hadamard2d;
  if (s == "grover") return CoinKind::grover;
  if (s == "fourier") return CoinKind::fourier;
  throw std::invalid_argument("unknown coin kind: " + s);
}

struct CoinOperator {
  CoinKind kind = CoinKind::custom;
  Matrix4 matrix = Matrix4::Identity();
};

// Coin-space transposition sigma_x (x) sigma_x: L<->R, D<->U.
inline Matrix4 reflection_matrix() {
  Matrix4 r = Matrix4::Zero();
  r(0, 3) = r(1, 2) = r(2, 1) = r(3, 0) = 1.0;
  return r;
}

inline double unitarity_residual(const Matrix4& c) {
  return (c.adjoint() * c - Matrix4::Identity()).cwiseAbs().maxCoeff();
}

inline CoinOperator make_custom_coin(const Matrix4& m) {
  double res = unitarity_residual(m);
  if (res > kUnitaryTol)
    throw std::invalid_argument(
        "custom coin is not unitary: max |C^dag C - I| = " +
        std::to_string(res));
  return {CoinKind::custom, m};
}

inline CoinOperator make_coin(CoinKind kind) {
  const Complex I(0.0, 1.0);
  Matrix4 m;
  switch (kind) {
    case CoinKind::hadamard2d:
      m << 1, 1, 1, 1,
           1, -1, 1, -1,
           1, 1, -1, -1,
           1, -1, -1, 1;
      m *= 0.5;
      break;
    case CoinKind::grover:
      m = 0.5 * Matrix4::Ones() - Matrix4::Identity();
      break;
    case CoinKind::fourier: {
      const Complex pow_mi[4] = {1.0, -I, -1.0, I};  // (-i)^k
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) m(k, l) = 0.5 * pow_mi[(k * l) % 4];
      break;
    }
    case CoinKind::custom:
      throw std::invalid_argument("custom coin requires an explicit matrix");
  }
  return {kind, m};
}

struct LocalEigenpair {
  Complex alpha;      // unit modulus
  Vector4 vec;        // normalized coin-space eigenvector of R*C
};

inline double phase_in_2pi(Complex z) {
  double ph = std::arg(z);
  if (ph < 0) ph += 2 * std::numbers::pi;
  // Collapse phases within rounding of 2*pi back to 0.
  if (ph > 2 * std::numbers::pi - 1e-12) ph = 0.0;
  return ph;
}

// Global-phase convention: first component above tolerance made real-positive.
inline void fix_phase(Eigen::Ref<Vector> v) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-9) {
      v *= std::conj(v(i)) / std::abs(v(i));
      return;
    }
  }
}

// Eigen-decomposition of the 4x4 reflected coin RC. Degenerate eigenvalues
// (phase distance below 1e-9) are clustered and returned with an orthonormal
// eigenbasis; pairs are sorted by eigenvalue phase in [0, 2pi).
inline std::vector<LocalEigenpair> rc_spectrum(const CoinOperator& coin) {
  Matrix4 rc = reflection_matrix() * coin.matrix;
  Eigen::ComplexEigenSolver<Matrix4> es(rc);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("rc_spectrum: eigensolver failed");

  std::vector<int> order = {0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return phase_in_2pi(es.eigenvalues()(a)) < phase_in_2pi(es.eigenvalues()(b));
  });

  std::vector<LocalEigenpair> out;
  int i = 0;
  while (i < 4) {
    int j = i + 1;
    while (j < 4 && std::abs(phase_in_2pi(es.eigenvalues()(order[j])) -
                             phase_in_2pi(es.eigenvalues()(order[i]))) < 1e-9)
      ++j;
    // Orthonormalize the cluster (RC is unitary, so distinct eigenvalues are
    // already orthogonal; only the cluster needs Gram-Schmidt).
    std::vector<Vector4> basis;
    for (int k = i; k < j; ++k) {
      Vector4 v = es.eigenvectors().col(order[k]);
      for (const auto& b : basis) v -= b * (b.dot(v));
      if (v.norm() < 1e-8) continue;
      v.normalize();
      basis.push_back(v);
    }
    Complex alpha = es.eigenvalues()(order[i]);
    alpha /= std::abs(alpha);
    for (auto& v : basis) {
      fix_phase(v);
      out.push_back({alpha, v});
    }
    i = j;
  }
  return out;
}

}  // namespace perqwalk
