#pragma once

// The asymptotic engine: numeric common-eigenstate extraction from the
// averaged step operator, p-attractor construction, the general attractor
// solver (shift conditions + local coin condition), basis completion with
// the identity complement, and asymptotic-state evaluation.
//
// Eigenvalue convention: every attractor X is labelled by the superoperator
// eigenvalue, Phi(X) = lambda X, equivalently U_K X U_K^dag = lambda X for
// every configuration. For an eigenstate pair |phi_i><phi_j| this gives
// lambda = alpha_i * conj(alpha_j); lambdas are measured against the
// full-configuration unitary rather than taken from a formula.

#include <algorithm>
#include <numeric>
#include <vector>

#include "perqwalk/analytic.hpp"
#include "perqwalk/eigenstates.hpp"
#include "perqwalk/evolution.hpp"

namespace perqwalk {

struct guard_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct certification_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense eigenproblems on the Hilbert space (finder, exact evolution).
constexpr int kDenseGuard = 4096;
// Dense linear algebra on operator space (general attractor solver).
constexpr int kGeneralSolverGuard = 80;

namespace detail {

// Cluster complex values on the unit circle; tolerance in absolute distance.
inline std::vector<std::vector<int>> cluster_values(
    const std::vector<Complex>& vals, double tol = 1e-6) {
  std::vector<int> order(vals.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return phase_in_2pi(vals[a]) < phase_in_2pi(vals[b]);
  });
  std::vector<std::vector<int>> clusters;
  for (int idx : order) {
    if (!clusters.empty() &&
        std::abs(vals[clusters.back().back()] - vals[idx]) < tol)
      clusters.back().push_back(idx);
    else
      clusters.push_back({idx});
  }
  // The phase seam at 0/2pi can split one cluster in two.
  if (clusters.size() > 1 &&
      std::abs(vals[clusters.front().front()] - vals[clusters.back().back()]) <
          tol) {
    for (int idx : clusters.back()) clusters.front().push_back(idx);
    clusters.pop_back();
  }
  return clusters;
}

}  // namespace detail

// Extracts the common eigenstates as the unit-modulus eigenvectors of the
// averaged step B, re-verified (and orthonormalized) as the joint null space
// of U_K - alpha over the generator configurations. Candidates that fail
// verification are dropped and counted in `discarded`.
inline CommonEigenstates find_common_eigenstates_numeric(
    const PercolationChannel& ch) {
  const LatticeSpec& spec = ch.spec();
  const int d = spec.dim();
  if (d > kDenseGuard)
    throw guard_error("lattice too large for the dense eigenstate finder (d=" +
                      std::to_string(d) + " > " + std::to_string(kDenseGuard) +
                      ")");
  if (!(ch.p() > 0.0 && ch.p() < 1.0))
    throw std::invalid_argument(
        "common-eigenstate extraction requires 0 < p < 1");

  const Matrix b = ch.averaged_step().dense();
  Eigen::ComplexEigenSolver<Matrix> es(b, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("averaged-step eigensolve failed");

  std::vector<Complex> unit_vals;
  for (int i = 0; i < d; ++i)
    if (std::abs(es.eigenvalues()(i)) >= 1.0 - 1e-8)
      unit_vals.push_back(es.eigenvalues()(i));

  CommonEigenstates out;
  out.states.resize(d, 0);
  if (unit_vals.empty()) return out;

  auto gens = generator_configs(spec);
  std::vector<Vector> verified;
  std::vector<Complex> alphas;

  for (const auto& cluster : detail::cluster_values(unit_vals)) {
    Complex alpha(0, 0);
    for (int idx : cluster) alpha += unit_vals[idx];
    alpha /= std::abs(alpha);

    // Geometric eigenspace of B at alpha via an SVD null space; B is not
    // normal, so eigensolver eigenvectors can be nearly parallel inside a
    // degenerate cluster and would under-count the space.
    Eigen::JacobiSVD<Matrix> null_svd(
        b - alpha * Matrix::Identity(d, d), Eigen::ComputeThinV);
    std::vector<int> null_idx;
    for (int j = 0; j < d; ++j)
      if (null_svd.singularValues()(j) <= 1e-8) null_idx.push_back(j);
    Matrix q(d, null_idx.size());
    for (size_t j = 0; j < null_idx.size(); ++j)
      q.col(j) = null_svd.matrixV().col(null_idx[j]);
    const int m = static_cast<int>(q.cols());
    if (m == 0) continue;

    // Joint null space of the stacked generator residuals within span(q).
    Matrix stack(static_cast<int>(gens.size()) * d, m);
    for (size_t g = 0; g < gens.size(); ++g) {
      StepUnitary u = ch.step_unitary(gens[g]);
      for (int j = 0; j < m; ++j)
        stack.block(static_cast<int>(g) * d, j, d, 1) =
            u.apply(q.col(j)) - alpha * q.col(j);
    }
    Eigen::JacobiSVD<Matrix> svd(stack, Eigen::ComputeThinV);
    std::vector<int> null_cols;
    for (int j = 0; j < m; ++j)
      if (svd.singularValues()(j) <= 1e-10) null_cols.push_back(j);
    out.discarded += m - static_cast<int>(null_cols.size());
    for (int j : null_cols) {
      Vector phi = q * svd.matrixV().col(j);
      fix_phase(phi);
      verified.push_back(phi);
      alphas.push_back(alpha);
    }
  }

  out.states.resize(d, verified.size());
  for (size_t i = 0; i < verified.size(); ++i) out.states.col(i) = verified[i];
  out.alpha = alphas;
  return out;
}

// ---------------------------------------------------------------------------
// Attractor basis
// ---------------------------------------------------------------------------

struct Attractor {
  enum class Kind { pair, complement, dense_op };
  Complex lambda{1.0, 0.0};
  Kind kind = Kind::pair;
  int i = -1, j = -1;  // pair: X = |phi_i><phi_j|
  Matrix op;           // dense_op only
};

struct AttractorBasis {
  explicit AttractorBasis(const LatticeSpec& s) : spec(s) {}

  LatticeSpec spec;
  Matrix states;               // d x n common eigenstates backing the pairs
  std::vector<Complex> alpha;  // eigenvalue per state, measured vs U_full
  std::vector<Attractor> entries;
  bool certified_complete = false;

  int dimension() const { return static_cast<int>(entries.size()); }
  int eigenstate_count() const { return static_cast<int>(states.cols()); }
};

// Eigenvalues measured against the full-configuration unitary.
inline std::vector<Complex> measure_alphas(const PercolationChannel& ch,
                                           const Matrix& states) {
  StepUnitary u_full = ch.step_unitary(full_config(ch.spec()));
  std::vector<Complex> alphas;
  for (int i = 0; i < states.cols(); ++i) {
    Complex a = states.col(i).dot(u_full.apply(states.col(i)));
    if (std::abs(std::abs(a) - 1.0) > 1e-8)
      throw std::runtime_error(
          "state is not an eigenvector of the full-configuration unitary");
    alphas.push_back(a / std::abs(a));
  }
  return alphas;
}

// All n^2 ordered eigenstate pairs; automatically HS-orthonormal.
inline std::vector<Attractor> p_attractor_basis(
    const std::vector<Complex>& alphas) {
  std::vector<Attractor> out;
  const int n = static_cast<int>(alphas.size());
  out.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Attractor a;
      a.kind = Attractor::Kind::pair;
      a.i = i;
      a.j = j;
      a.lambda = alphas[i] * std::conj(alphas[j]);
      out.push_back(a);
    }
  std::stable_sort(out.begin(), out.end(), [](const Attractor& a,
                                              const Attractor& b) {
    return phase_in_2pi(a.lambda) < phase_in_2pi(b.lambda);
  });
  return out;
}

struct GeneralAttractorBasis {
  std::vector<Complex> lambda;
  std::vector<Matrix> ops;  // HS-orthonormal
  int dimension() const { return static_cast<int>(ops.size()); }
};

GeneralAttractorBasis general_attractor_basis(const PercolationChannel& ch);

// p-attractors plus the identity complement. On instances within the general
// solver guard the completeness is checked by dimension comparison (a hard
// error on mismatch); beyond the guard the basis is certified only for the
// three analyzed coins and otherwise flagged minimal-assumed-complete.
inline AttractorBasis complete_basis(const CommonEigenstates& ces,
                                     const PercolationChannel& ch,
                                     bool run_dimension_check = true) {
  AttractorBasis basis(ch.spec());
  basis.states = ces.states;
  basis.alpha = ces.count() > 0 ? measure_alphas(ch, ces.states)
                                : std::vector<Complex>{};
  basis.entries = p_attractor_basis(basis.alpha);

  const int d = ch.spec().dim();
  const int n = ces.count();
  if (n < d) {
    Attractor ident;
    ident.kind = Attractor::Kind::complement;
    ident.lambda = 1.0;
    basis.entries.push_back(ident);
  }

  if (run_dimension_check && d <= kGeneralSolverGuard) {
    int general_dim = general_attractor_basis(ch).dimension();
    if (general_dim != basis.dimension())
      throw std::runtime_error(
          "attractor space exceeds the p-attractor + identity subspace: "
          "general solver found " +
          std::to_string(general_dim) + ", minimal basis has " +
          std::to_string(basis.dimension()));
    basis.certified_complete = true;
  } else {
    basis.certified_complete = has_analytic_states(ch.coin().kind);
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Asymptotic states
// ---------------------------------------------------------------------------

namespace detail {

inline Complex unit_pow(Complex z, long t) {
  if (t == 0) return 1.0;
  return std::pow(z, static_cast<double>(t));
}

}  // namespace detail

// rho_as(t) = sum lambda^t X Tr(rho0 X^dag), evaluated in factored form for
// the eigenstate pairs (per-pair outer products are never materialized).
inline Matrix asymptotic_state(const AttractorBasis& basis, const Matrix& rho0,
                               long t = 0) {
  const int d = basis.spec.dim();
  if (rho0.rows() != d || rho0.cols() != d)
    throw std::invalid_argument("density operator dimension mismatch");
  const int n = basis.eigenstate_count();
  Matrix overlaps =
      n > 0 ? Matrix(basis.states.adjoint() * rho0 * basis.states) : Matrix();

  Matrix coeff = Matrix::Zero(n, n);
  Matrix rho = Matrix::Zero(d, d);
  for (const auto& entry : basis.entries) {
    switch (entry.kind) {
      case Attractor::Kind::pair:
        coeff(entry.i, entry.j) +=
            detail::unit_pow(entry.lambda, t) * overlaps(entry.i, entry.j);
        break;
      case Attractor::Kind::complement: {
        double w = (rho0.trace().real() -
                    (n > 0 ? overlaps.trace().real() : 0.0)) /
                   static_cast<double>(d - n);
        rho += w * Matrix::Identity(d, d);
        if (n > 0) rho -= w * basis.states * basis.states.adjoint();
        break;
      }
      case Attractor::Kind::dense_op: {
        Complex c = detail::unit_pow(entry.lambda, t) *
                    (rho0 * entry.op.adjoint()).trace();
        rho += c * entry.op;
        break;
      }
    }
  }
  if (n > 0) rho += basis.states * coeff * basis.states.adjoint();
  return rho;
}

// Stationary position marginal of the asymptotic state, computed without a
// dense density operator. Works for pure initial states.
inline PositionDistribution asymptotic_marginal(const AttractorBasis& basis,
                                                const Vector& psi0,
                                                long t = 0) {
  const LatticeSpec& spec = basis.spec;
  const int d = spec.dim();
  if (psi0.size() != d)
    throw std::invalid_argument("state vector dimension mismatch");
  const int n = basis.eigenstate_count();
  Vector o = n > 0 ? Vector(basis.states.adjoint() * psi0) : Vector();

  Matrix coeff = Matrix::Zero(n, n);
  double complement_w = 0.0;
  bool has_complement = false;
  std::vector<std::pair<Complex, const Matrix*>> dense_terms;
  for (const auto& entry : basis.entries) {
    switch (entry.kind) {
      case Attractor::Kind::pair:
        coeff(entry.i, entry.j) += detail::unit_pow(entry.lambda, t) *
                                   o(entry.i) * std::conj(o(entry.j));
        break;
      case Attractor::Kind::complement:
        has_complement = true;
        complement_w = (1.0 - (n > 0 ? o.squaredNorm() : 0.0)) /
                       static_cast<double>(d - n);
        break;
      case Attractor::Kind::dense_op:
        dense_terms.emplace_back(detail::unit_pow(entry.lambda, t) *
                                     (entry.op.adjoint() * psi0).dot(psi0),
                                 &entry.op);
        break;
    }
  }

  PositionDistribution dist;
  dist.M = spec.extent_s();
  dist.N = spec.extent_t();
  dist.prob.assign(spec.num_sites(), 0.0);

  Matrix g;
  if (n > 0) g = basis.states * coeff;  // d x n
  for (int site = 0; site < spec.num_sites(); ++site) {
    double v = 0.0;
    for (int c = 0; c < 4; ++c) {
      int x = 4 * site + c;
      if (n > 0)
        v += (g.row(x) * basis.states.row(x).adjoint())(0, 0).real();
      if (has_complement)
        v += complement_w *
             (1.0 - (n > 0 ? basis.states.row(x).squaredNorm() : 0.0));
      for (auto& [cw, op] : dense_terms) v += (cw * (*op)(x, x)).real();
    }
    dist.prob[site] = v;
  }
  return dist;
}

inline PositionDistribution asymptotic_marginal(const AttractorBasis& basis,
                                                const Matrix& rho0,
                                                long t = 0) {
  return position_marginal(asymptotic_state(basis, rho0, t), basis.spec);
}

// Orthogonal projector onto the common-eigenstate subspace, kept factored.
struct AsymptoticDecomposition {
  Matrix states;  // d x n
  int complement_rank = 0;
};

inline AsymptoticDecomposition decomposition(const AttractorBasis& basis) {
  if (!basis.certified_complete)
    throw certification_error(
        "asymptotic fastpath requires a certified-complete attractor basis");
  AsymptoticDecomposition dec;
  dec.states = basis.states;
  dec.complement_rank = basis.spec.dim() - basis.eigenstate_count();
  return dec;
}

// rho(t) = U^t P rho0 P (U^dag)^t + Ptilde Tr(rho0 Ptilde) / Tr Ptilde,
// with U the (cheapest) empty-configuration step unitary.
inline Matrix asymptotic_fastpath(const AsymptoticDecomposition& dec,
                                  const PercolationChannel& ch,
                                  const Matrix& rho0, long t = 0) {
  const int d = ch.spec().dim();
  const int n = static_cast<int>(dec.states.cols());
  StepUnitary u = ch.step_unitary(empty_config(ch.spec()));

  Matrix rho = Matrix::Zero(d, d);
  double p_weight = rho0.trace().real();
  if (n > 0) {
    Matrix a = dec.states.adjoint() * rho0 * dec.states;
    Matrix psi_t = dec.states;
    for (long s = 0; s < t; ++s)
      for (int j = 0; j < n; ++j) psi_t.col(j) = u.apply(psi_t.col(j));
    rho = psi_t * a * psi_t.adjoint();
    p_weight -= a.trace().real();
  }
  double w = p_weight / static_cast<double>(dec.complement_rank);
  rho += w * Matrix::Identity(d, d);
  if (n > 0) rho -= w * dec.states * dec.states.adjoint();
  return rho;
}

// ---------------------------------------------------------------------------
// General attractor solver (shift conditions + local coin condition)
// ---------------------------------------------------------------------------

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

// Two-step solve: (1) equivalence classes of matrix elements under the shift
// conditions (elements that every S_K^dag X S_K maps onto each other must be
// equal; equations at Walls are omitted since a Wall admits only the
// reflection branch); (2) the local coin map X -> (I(x)RC) X (I(x)RC)^dag
// compressed to the class basis, whose unit-modulus eigenvectors are exactly
// the attractors (the compression of a unitary reaches the unit circle only
// on leak-free vectors).
inline GeneralAttractorBasis general_attractor_basis(
    const PercolationChannel& ch) {
  const LatticeSpec& spec = ch.spec();
  const int d = spec.dim();
  if (d > kGeneralSolverGuard)
    throw guard_error("lattice too large for the general attractor solver (d=" +
                      std::to_string(d) + " > " +
                      std::to_string(kGeneralSolverGuard) + ")");

  const SlotMaps& maps = ch.slot_maps();
  const auto el = [d](int u, int v) { return u * d + v; };

  detail::UnionFind uf(d * d);
  for (int x = 0; x < d; ++x) {
    const int ex = maps.edge_id[x];
    const int ax = maps.step_image[x], rx = maps.reflect_image[x];
    for (int y = 0; y < d; ++y) {
      const int ey = maps.edge_id[y];
      const int ay = maps.step_image[y], ry = maps.reflect_image[y];
      if (ex < 0 && ey < 0) continue;
      if (ex >= 0 && ex == ey) {
        uf.unite(el(ax, ay), el(rx, ry));
      } else {
        // Independent indicators: every reachable image pair is equal.
        const int us[2] = {ax, rx};
        const int vs[2] = {ay, ry};
        const int nu = ex >= 0 ? 2 : 1;  // wall: only the reflect branch
        const int nv = ey >= 0 ? 2 : 1;
        const int base = el(us[nu - 1], vs[nv - 1]);
        for (int a = 0; a < nu; ++a)
          for (int b = 0; b < nv; ++b) uf.unite(base, el(us[a], vs[b]));
      }
    }
  }

  std::vector<int> class_of(d * d, -1);
  std::vector<std::vector<int>> members;
  for (int e = 0; e < d * d; ++e) {
    int root = uf.find(e);
    if (class_of[root] < 0) {
      class_of[root] = static_cast<int>(members.size());
      members.emplace_back();
    }
    class_of[e] = class_of[root];
    members[class_of[e]].push_back(e);
  }
  const int k = static_cast<int>(members.size());

  // Compression of the coin conjugation to the class basis.
  const Matrix4 v4 = reflection_matrix() * ch.coin().matrix;
  Matrix comp = Matrix::Zero(k, k);
  std::vector<Complex> acc(d * d, Complex(0, 0));
  std::vector<int> touched;
  for (int j = 0; j < k; ++j) {
    touched.clear();
    for (int e : members[j]) {
      const int u = e / d, v = e % d;
      const int m1 = u / 4, c1 = u % 4, m2 = v / 4, c2 = v % 4;
      for (int c1p = 0; c1p < 4; ++c1p) {
        Complex lhs = v4(c1p, c1);
        if (lhs == Complex(0, 0)) continue;
        for (int c2p = 0; c2p < 4; ++c2p) {
          Complex w = lhs * std::conj(v4(c2p, c2));
          if (w == Complex(0, 0)) continue;
          int target = el(4 * m1 + c1p, 4 * m2 + c2p);
          if (acc[target] == Complex(0, 0)) touched.push_back(target);
          acc[target] += w;
        }
      }
    }
    const double nj = std::sqrt(static_cast<double>(members[j].size()));
    for (int target : touched) {
      int i = class_of[target];
      comp(i, j) +=
          acc[target] / (nj * std::sqrt(static_cast<double>(members[i].size())));
      acc[target] = Complex(0, 0);
    }
  }

  Eigen::ComplexEigenSolver<Matrix> es(comp);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("coin-condition eigensolve failed");

  std::vector<Complex> unit_vals;
  for (int i = 0; i < k; ++i)
    if (std::abs(es.eigenvalues()(i)) >= 1.0 - 1e-8)
      unit_vals.push_back(es.eigenvalues()(i));

  GeneralAttractorBasis out;
  if (unit_vals.empty()) return out;

  auto gens = generator_configs(spec);
  std::vector<Complex> lambda_reps;
  for (const auto& cluster : detail::cluster_values(unit_vals)) {
    Complex lam(0, 0);
    for (int idx : cluster) lam += unit_vals[idx];
    lam /= std::abs(lam);
    lambda_reps.push_back(lam);
  }

  for (Complex lam : lambda_reps) {
    Matrix shifted = comp - lam * Matrix::Identity(k, k);
    Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeThinV);
    for (int c = 0; c < k; ++c) {
      if (svd.singularValues()(c) > 1e-8) continue;
      Vector coeffs = svd.matrixV().col(c);
      Matrix x = Matrix::Zero(d, d);
      for (int j = 0; j < k; ++j) {
        Complex w =
            coeffs(j) / std::sqrt(static_cast<double>(members[j].size()));
        if (w == Complex(0, 0)) continue;
        for (int e : members[j]) x(e / d, e % d) += w;
      }
      // Safety net: the attractor relation on every generator configuration.
      double worst = 0.0;
      for (const auto& cfg : gens) {
        Matrix u = ch.step_unitary(cfg).dense();
        worst = std::max(
            worst, (u * x * u.adjoint() - lam * x).cwiseAbs().maxCoeff());
      }
      if (worst > 1e-8)
        throw std::runtime_error(
            "general attractor failed verification, residual " +
            std::to_string(worst));
      out.lambda.push_back(lam);
      out.ops.push_back(std::move(x));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dimension accounting
// ---------------------------------------------------------------------------

struct DimensionReport {
  int analytic_count = 0;
  int numeric_count = 0;
  bool match = false;
};

inline int analytic_dimension(const LatticeSpec& spec, CoinKind kind) {
  const int M = spec.extent_s(), N = spec.extent_t();
  const bool s_open = spec.boundary_s() == Boundary::open;
  const bool t_open = spec.boundary_t() == Boundary::open;
  switch (kind) {
    case CoinKind::hadamard2d: {
      int n12 = (s_open || M % 2 == 0) ? 2 : 0;
      int n4 = (t_open || N % 2 == 0) ? M : 0;
      int n = n12 + N + n4;
      return n * n + 1;
    }
    case CoinKind::grover: {
      if (s_open && t_open) {
        int n = M * N + M + N + 1;
        return n * n + 1;
      }
      if (!s_open && !t_open) {
        int n = (M % 2 == 0 && N % 2 == 0) ? M * N + 2 : M * N + 1;
        return n * n + 1;
      }
      // Mixed boundaries: no closed form in the tables; count the
      // rank-filtered analytic family.
      int n = grover_states(spec).count();
      return n * n + 1;
    }
    case CoinKind::fourier: {
      bool avail = (s_open || M % 16 == 0) && (t_open || N % 16 == 0);
      return avail ? 17 : 1;
    }
    case CoinKind::custom: break;
  }
  throw std::invalid_argument("no analytic dimension formula for this coin");
}

inline DimensionReport dimension_report(const LatticeSpec& spec, CoinKind kind,
                                        double p = 0.5) {
  DimensionReport rep;
  rep.analytic_count = analytic_dimension(spec, kind);
  PercolationChannel ch(spec, make_coin(kind), PercolationModel(p));
  int n = find_common_eigenstates_numeric(ch).count();
  rep.numeric_count = n * n + 1;
  rep.match = rep.analytic_count == rep.numeric_count;
  return rep;
}

}  // namespace perqwalk
