#pragma once

// Common-eigenstate containers and verification utilities shared by the
// numeric attractor engine and the closed-form state families.

#include <vector>

#include "perqwalk/channel.hpp"

namespace perqwalk {

// Orthonormal set of simultaneous eigenvectors of every configuration
// unitary U_K, with their unit-modulus eigenvalues.
struct CommonEigenstates {
  Matrix states;               // d x n, orthonormal columns
  std::vector<Complex> alpha;  // per column
  int discarded = 0;           // candidates that failed verification

  int count() const { return static_cast<int>(states.cols()); }
};

// {full} + {full minus one edge, for every edge} + {empty}. Pairwise shift
// conditions between the full and one-edge-removed configurations generate
// the conditions of every configuration pair, since the shift factorizes
// per directed slot.
inline std::vector<EdgeConfiguration> generator_configs(
    const LatticeSpec& spec) {
  std::vector<EdgeConfiguration> gens;
  gens.push_back(full_config(spec));
  for (int e = 0; e < spec.num_edges(); ++e) {
    EdgeConfiguration cfg = full_config(spec);
    cfg[e] = 0;
    gens.push_back(std::move(cfg));
  }
  gens.push_back(empty_config(spec));
  return gens;
}

// max_K || U_K phi - alpha phi || over the given configurations.
inline double eigenstate_residual(const PercolationChannel& ch,
                                  const Vector& phi, Complex alpha,
                                  const std::vector<EdgeConfiguration>& cfgs) {
  double worst = 0.0;
  for (const auto& cfg : cfgs) {
    double r = (ch.step_unitary(cfg).apply(phi) - alpha * phi).norm();
    worst = std::max(worst, r);
  }
  return worst;
}

inline std::vector<EdgeConfiguration> random_configs(const LatticeSpec& spec,
                                                     double p, int count,
                                                     std::uint64_t seed) {
  RngStream rng(seed);
  PercolationModel model(p);
  std::vector<EdgeConfiguration> cfgs;
  cfgs.reserve(count);
  for (int i = 0; i < count; ++i)
    cfgs.push_back(sample_config(model, spec, rng));
  return cfgs;
}

// Orthonormal basis of the column span, discarding directions with singular
// value below rel_tol * sigma_max.
inline Matrix orthonormal_span(const Matrix& cols, double rel_tol = 1e-9) {
  if (cols.cols() == 0) return cols;
  Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU);
  double smax = svd.singularValues()(0);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > rel_tol * smax) ++rank;
  return svd.matrixU().leftCols(rank);
}

// Largest principal angle between the spans of two orthonormal column sets,
// measured as ||(I - A A^dag) B||_2 (the sine, accurate near zero). Returns
// a value > 1 when the dimensions differ.
inline double span_distance(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) return 2.0;
  if (a.cols() == 0) return 0.0;
  Matrix residual = b - a * (a.adjoint() * b);
  Eigen::JacobiSVD<Matrix> svd(residual);
  return svd.singularValues()(0);
}

}  // namespace perqwalk
