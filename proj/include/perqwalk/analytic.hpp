#pragma once

// Closed-form common eigenstates for the Hadamard, Grover and Fourier
// walks, with per-axis boundary/parity availability rules. Output families
// are orthonormal and rank-filtered; the test suite cross-validates every
// family against the numeric finder.

#include <cmath>
#include <numbers>

#include "perqwalk/eigenstates.hpp"

namespace perqwalk {

namespace detail {

inline void add_amplitude(Vector& state, Site m, const Vector4& coin_vec,
                          Complex coeff, const LatticeSpec& spec) {
  for (int c = 0; c < 4; ++c)
    state(4 * (m.s * spec.extent_t() + m.t) + c) += coeff * coin_vec(c);
}

inline Vector product_state(const LatticeSpec& spec, const Vector4& coin_vec,
                            const Matrix& site_amp) {
  Vector state = Vector::Zero(spec.dim());
  for (int s = 0; s < spec.extent_s(); ++s)
    for (int t = 0; t < spec.extent_t(); ++t)
      add_amplitude(state, Site{s, t}, coin_vec, site_amp(s, t), spec);
  return state;
}

}  // namespace detail

inline CommonEigenstates hadamard_states(const LatticeSpec& spec) {
  const Complex I(0, 1);
  const int M = spec.extent_s(), N = spec.extent_t();
  const bool sign_flip_s_ok =
      spec.boundary_s() == Boundary::open || M % 2 == 0;
  const bool sign_flip_t_ok =
      spec.boundary_t() == Boundary::open || N % 2 == 0;

  Vector4 v1, v2, v3, v4;
  v1 << 1, -I, -I, -1;
  v1 *= 0.5;
  v2 << 1, I, I, -1;
  v2 *= 0.5;
  v3 << 1, 0, 0, 1;
  v3 /= std::sqrt(2.0);
  v4 << 0, 1, -1, 0;
  v4 /= std::sqrt(2.0);

  std::vector<Vector> cols;
  std::vector<Complex> alphas;

  if (sign_flip_s_ok) {
    Matrix amp(M, N);
    for (int s = 0; s < M; ++s)
      for (int t = 0; t < N; ++t)
        amp(s, t) = (s % 2 == 0 ? 1.0 : -1.0) / std::sqrt(double(M * N));
    cols.push_back(detail::product_state(spec, v1, amp));
    alphas.push_back(I);
    cols.push_back(detail::product_state(spec, v2, amp));
    alphas.push_back(-I);
  }
  for (int t0 = 0; t0 < N; ++t0) {
    Matrix amp = Matrix::Zero(M, N);
    for (int s = 0; s < M; ++s) amp(s, t0) = 1.0 / std::sqrt(double(M));
    cols.push_back(detail::product_state(spec, v3, amp));
    alphas.push_back(1.0);
  }
  if (sign_flip_t_ok) {
    for (int s0 = 0; s0 < M; ++s0) {
      Matrix amp = Matrix::Zero(M, N);
      for (int t = 0; t < N; ++t)
        amp(s0, t) = (t % 2 == 0 ? 1.0 : -1.0) / std::sqrt(double(N));
      cols.push_back(detail::product_state(spec, v4, amp));
      alphas.push_back(1.0);
    }
  }

  CommonEigenstates out;
  out.states.resize(spec.dim(), cols.size());
  out.alpha = alphas;
  for (size_t i = 0; i < cols.size(); ++i) out.states.col(i) = cols[i];
  return out;
}

inline CommonEigenstates grover_states(const LatticeSpec& spec) {
  const int M = spec.extent_s(), N = spec.extent_t();
  Vector4 v1, v2, v3, v4;
  v1 << 1, -1, -1, 1;
  v2 << 1, 1, 0, 0;
  v3 << 0, -1, 1, 0;
  v4 << -1, 0, 0, 1;

  CommonEigenstates out;

  // alpha = -1: the uniform state over v1.
  Matrix uniform = Matrix::Constant(M, N, 1.0);
  Vector phi1 = detail::product_state(spec, v1, uniform);
  phi1.normalize();

  // alpha = 1 candidates: the finite-support plaquette states plus the
  // alternating stripes, then rank filtering (stripes are dependent on the
  // plaquette family on tori).
  std::vector<Vector> cand;
  for (int s = 0; s < M; ++s)
    for (int t = 0; t < N; ++t) {
      Vector phi = Vector::Zero(spec.dim());
      auto place = [&](int ds, int dt, const Vector4& cv) {
        int ss = s + ds, tt = t + dt;
        if (ss >= M) {
          if (spec.boundary_s() == Boundary::open) return;
          ss %= M;
        }
        if (tt >= N) {
          if (spec.boundary_t() == Boundary::open) return;
          tt %= N;
        }
        detail::add_amplitude(phi, Site{ss, tt}, cv, 1.0, spec);
      };
      place(0, 0, v2);
      place(0, 1, v2 + v3);
      place(1, 0, v2 + v4);
      place(1, 1, v2 + v3 + v4);
      phi.normalize();
      cand.push_back(phi);
    }
  if (spec.boundary_t() == Boundary::open || N % 2 == 0) {
    for (int s0 = 0; s0 < M; ++s0) {
      Matrix amp = Matrix::Zero(M, N);
      for (int t = 0; t < N; ++t) amp(s0, t) = (t % 2 == 0 ? 1.0 : -1.0);
      Vector phi = detail::product_state(spec, v3, amp);
      phi.normalize();
      cand.push_back(phi);
    }
  }
  if (spec.boundary_s() == Boundary::open || M % 2 == 0) {
    for (int t0 = 0; t0 < N; ++t0) {
      Matrix amp = Matrix::Zero(M, N);
      for (int s = 0; s < M; ++s) amp(s, t0) = (s % 2 == 0 ? 1.0 : -1.0);
      Vector phi = detail::product_state(spec, v4, amp);
      phi.normalize();
      cand.push_back(phi);
    }
  }

  Matrix cand_mat(spec.dim(), cand.size());
  for (size_t i = 0; i < cand.size(); ++i) cand_mat.col(i) = cand[i];
  Matrix span = orthonormal_span(cand_mat);

  out.states.resize(spec.dim(), 1 + span.cols());
  out.states.col(0) = phi1;
  out.states.rightCols(span.cols()) = span;
  out.alpha.assign(1, Complex(-1.0));
  out.alpha.insert(out.alpha.end(), span.cols(), Complex(1.0));
  return out;
}

inline CommonEigenstates fourier_states(const LatticeSpec& spec) {
  const Complex I(0, 1);
  const int M = spec.extent_s(), N = spec.extent_t();
  CommonEigenstates out;
  out.states.resize(spec.dim(), 0);

  std::vector<Vector> cols;
  std::vector<Complex> alphas;
  for (int n = 0; n < 4; ++n) {
    double mu = std::numbers::pi / 8.0 * (3 + 4 * n);
    Complex alpha = std::exp(I * mu);
    // Component order reversed relative to the (L,D,U,R) basis used here;
    // the reversed vector is the genuine RC eigenvector for alpha_n.
    Vector4 v;
    v << 2.0 * alpha * alpha * alpha + alpha * alpha - I, alpha * alpha - 1.0,
        alpha * alpha + I, (alpha + 1.0) * (alpha + 1.0);
    v /= std::sqrt(16.0 + 12.0 * std::cos(mu) - 4.0 * std::sin(3.0 * mu));
    Complex x = v(1) / v(2);
    Complex y = v(0) / v(3);

    // Periodic axes require the geometric phase factor to close around the
    // lattice (it does iff the extent is a multiple of 16).
    if (spec.boundary_s() == Boundary::periodic &&
        std::abs(std::pow(y, M) - 1.0) > 1e-9)
      continue;
    if (spec.boundary_t() == Boundary::periodic &&
        std::abs(std::pow(x, N) - 1.0) > 1e-9)
      continue;

    Matrix amp(M, N);
    for (int s = 0; s < M; ++s)
      for (int t = 0; t < N; ++t)
        amp(s, t) = std::pow(x, t) * std::pow(y, s);
    Vector phi = detail::product_state(spec, v, amp);
    phi.normalize();
    cols.push_back(phi);
    alphas.push_back(alpha);
  }

  out.states.resize(spec.dim(), cols.size());
  for (size_t i = 0; i < cols.size(); ++i) out.states.col(i) = cols[i];
  out.alpha = alphas;
  return out;
}

inline bool has_analytic_states(CoinKind kind) {
  return kind == CoinKind::hadamard2d || kind == CoinKind::grover ||
         kind == CoinKind::fourier;
}

inline CommonEigenstates analytic_states(CoinKind kind,
                                         const LatticeSpec& spec) {
  switch (kind) {
    case CoinKind::hadamard2d: return hadamard_states(spec);
    case CoinKind::grover: return grover_states(spec);
    case CoinKind::fourier: return fourier_states(spec);
    case CoinKind::custom: break;
  }
  throw std::invalid_argument("no analytic state family for this coin");
}

}  // namespace perqwalk
