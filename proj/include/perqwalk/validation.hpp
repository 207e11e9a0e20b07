#pragma once

// Named property suites runnable from the CLI, and the exhaustive
// configuration-sum oracle they check the fast channel against.

#include <bit>
#include <functional>
#include <string>
#include <vector>

#include "perqwalk/attractors.hpp"

namespace perqwalk {

// Literal sum over all 2^|E| edge configurations. Independent of the
// pairwise-averaged fast path; used as its correctness oracle.
inline Matrix exhaustive_channel_apply(const LatticeSpec& spec,
                                       const CoinOperator& coin, double p,
                                       const Matrix& rho) {
  const int ne = spec.num_edges();
  if (ne > 20)
    throw guard_error("exhaustive oracle limited to 20 edges, got " +
                      std::to_string(ne));
  const int d = spec.dim();
  SlotMaps maps = build_slot_maps(spec);

  Matrix mid(d, d);
  for (int site = 0; site < d / 4; ++site)
    mid.middleRows<4>(4 * site) = coin.matrix * rho.middleRows<4>(4 * site);
  for (int site = 0; site < d / 4; ++site)
    mid.middleCols<4>(4 * site) =
        mid.middleCols<4>(4 * site) * coin.matrix.adjoint();

  Matrix out = Matrix::Zero(d, d);
  std::vector<int> img(d);
  for (std::uint64_t mask = 0; mask < (1ull << ne); ++mask) {
    int bits = std::popcount(mask);
    double w = std::pow(p, bits) * std::pow(1.0 - p, ne - bits);
    if (w == 0.0) continue;
    for (int x = 0; x < d; ++x) {
      int e = maps.edge_id[x];
      img[x] = (e >= 0 && (mask >> e) & 1) ? maps.step_image[x]
                                           : maps.reflect_image[x];
    }
    for (int y = 0; y < d; ++y)
      for (int x = 0; x < d; ++x) out(img[x], img[y]) += w * mid(x, y);
  }
  return out;
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline Matrix random_density(int d, RngStream& rng) {
  Matrix a(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      a(i, j) = Complex(rng.next_double() - 0.5, rng.next_double() - 0.5);
  Matrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline Vector random_state(int d, RngStream& rng) {
  Vector v(d);
  for (int i = 0; i < d; ++i)
    v(i) = Complex(rng.next_double() - 0.5, rng.next_double() - 0.5);
  v.normalize();
  return v;
}

inline CheckResult check(const std::string& name, double value, double bound) {
  return {name, value <= bound,
          "value " + std::to_string(value) + " bound " + std::to_string(bound)};
}

}  // namespace detail

inline std::vector<CheckResult> validate_cptp() {
  std::vector<CheckResult> out;
  LatticeSpec spec(3, 3, Boundary::open, Boundary::open);
  PercolationChannel ch(spec, make_coin(CoinKind::hadamard2d),
                        PercolationModel(0.5));
  RngStream rng(2024);
  Matrix rho = detail::random_density(spec.dim(), rng);
  double trace_drift = 0, herm = 0, min_eig = 0;
  for (int t = 0; t < 1000; ++t) {
    rho = ch.apply(rho);
    trace_drift = std::max(trace_drift, std::abs(rho.trace().real() - 1.0));
    if (t % 200 == 199) {
      herm = std::max(herm, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
      Eigen::SelfAdjointEigenSolver<Matrix> es(
          (rho + rho.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
  }
  out.push_back(detail::check("trace-preservation", trace_drift, 1e-12));
  out.push_back(detail::check("hermiticity-preservation", herm, 1e-12));
  out.push_back(detail::check("positivity", -min_eig, 1e-10));
  return out;
}

inline std::vector<CheckResult> validate_oracle() {
  std::vector<CheckResult> out;
  LatticeSpec spec(3, 3, Boundary::open, Boundary::open);
  CoinOperator coin = make_coin(CoinKind::hadamard2d);
  PercolationChannel ch(spec, coin, PercolationModel(0.5));
  RngStream rng(7);
  double worst = 0;
  for (int trial = 0; trial < 2; ++trial) {
    Matrix rho = detail::random_density(spec.dim(), rng);
    Matrix fast = ch.apply(rho);
    Matrix exact = exhaustive_channel_apply(spec, coin, 0.5, rho);
    worst = std::max(worst, (fast - exact).cwiseAbs().maxCoeff());
  }
  out.push_back(detail::check("pairwise-vs-exhaustive", worst, 1e-12));
  return out;
}

inline std::vector<CheckResult> validate_eigenstates() {
  std::vector<CheckResult> out;
  LatticeSpec spec(3, 3, Boundary::periodic, Boundary::open);
  for (CoinKind kind :
       {CoinKind::hadamard2d, CoinKind::grover, CoinKind::fourier}) {
    PercolationChannel ch(spec, make_coin(kind), PercolationModel(0.5));
    CommonEigenstates analytic = analytic_states(kind, spec);
    auto cfgs = random_configs(spec, 0.5, 50, 99);
    double worst = 0;
    for (int i = 0; i < analytic.count(); ++i)
      worst = std::max(worst, eigenstate_residual(ch, analytic.states.col(i),
                                                  analytic.alpha[i], cfgs));
    out.push_back(detail::check(std::string("residual-") + to_string(kind),
                                worst, 1e-10));
    CommonEigenstates numeric = find_common_eigenstates_numeric(ch);
    out.push_back(detail::check(std::string("span-") + to_string(kind),
                                span_distance(numeric.states, analytic.states),
                                1e-8));
  }
  return out;
}

inline std::vector<CheckResult> validate_stationarity() {
  std::vector<CheckResult> out;
  LatticeSpec spec(3, 3, Boundary::open, Boundary::open);
  for (CoinKind kind : {CoinKind::hadamard2d, CoinKind::grover}) {
    PercolationChannel ch(spec, make_coin(kind), PercolationModel(0.5));
    AttractorBasis basis =
        complete_basis(find_common_eigenstates_numeric(ch), ch, false);
    RngStream rng(11);
    Matrix rho0 = detail::random_density(spec.dim(), rng);
    Matrix rho_as = asymptotic_state(basis, rho0);
    double delta = l1_distance(position_marginal(ch.apply(rho_as), spec),
                               position_marginal(rho_as, spec));
    out.push_back(detail::check(std::string("stationary-") + to_string(kind),
                                delta, 1e-8));
  }
  return out;
}

inline std::vector<CheckResult> validate_pindep() {
  std::vector<CheckResult> out;
  LatticeSpec spec(3, 3, Boundary::open, Boundary::open);
  CoinOperator coin = make_coin(CoinKind::hadamard2d);
  RngStream rng(5);
  Vector psi0 = detail::random_state(spec.dim(), rng);
  PositionDistribution ref;
  bool first = true;
  double worst = 0;
  for (double p : {0.3, 0.7}) {
    PercolationChannel ch(spec, coin, PercolationModel(p));
    AttractorBasis basis =
        complete_basis(find_common_eigenstates_numeric(ch), ch, false);
    PositionDistribution dist = asymptotic_marginal(basis, psi0);
    if (first) {
      ref = dist;
      first = false;
    } else {
      worst = std::max(worst, l1_distance(ref, dist));
    }
  }
  out.push_back(detail::check("p-independence", worst, 1e-10));
  return out;
}

inline std::vector<CheckResult> run_validation_suite(const std::string& name) {
  if (name == "cptp") return validate_cptp();
  if (name == "oracle") return validate_oracle();
  if (name == "eigenstates") return validate_eigenstates();
  if (name == "stationarity") return validate_stationarity();
  if (name == "pindep") return validate_pindep();
  if (name == "all") {
    std::vector<CheckResult> out;
    for (const char* suite :
         {"cptp", "oracle", "eigenstates", "stationarity", "pindep"})
      for (auto& r : run_validation_suite(suite)) out.push_back(std::move(r));
    return out;
  }
  throw std::invalid_argument("unknown validation suite: " + name);
}

}  // namespace perqwalk
