#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "perqwalk/validation.hpp"

using namespace perqwalk;

TEST_CASE("evolve_exact with zero steps is the identity") {
  LatticeSpec spec(3, 3, Boundary::open, Boundary::open);
  PercolationChannel ch(spec, make_coin(CoinKind::hadamard2d),
                        PercolationModel(0.5));
  RngStream rng(1);
  Matrix rho = detail::random_density(spec.dim(), rng);
  CHECK((evolve_exact(ch, rho, 0) - rho).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exact channel at p=1 agrees with the unitary fast path") {
  LatticeSpec spec(3, 3, Boundary::periodic, Boundary::periodic);
  CoinOperator coin = make_coin(CoinKind::fourier);
  PercolationChannel ch(spec, coin, PercolationModel(1.0));
  RngStream rng(2);
  Vector psi0 = detail::random_state(spec.dim(), rng);
  Matrix rho = evolve_exact(ch, psi0 * psi0.adjoint(), 7);
  Vector psi = evolve_unitary(spec, coin, full_config(spec), psi0, 7);
  CHECK((rho - psi * psi.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("three exact steps equal three oracle applications") {
  LatticeSpec spec(3, 3, Boundary::open, Boundary::open);
  CoinOperator coin = make_coin(CoinKind::hadamard2d);
  PercolationChannel ch(spec, coin, PercolationModel(0.5));
  RngStream rng(3);
  Matrix rho = detail::random_density(spec.dim(), rng);
  Matrix fast = evolve_exact(ch, rho, 3);
  Matrix slow = rho;
  for (int i = 0; i < 3; ++i)
    slow = exhaustive_channel_apply(spec, coin, 0.5, slow);
  CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("evolve_unitary basics") {
  LatticeSpec spec(3, 4, Boundary::open, Boundary::periodic);
  CoinOperator coin = make_coin(CoinKind::grover);
  RngStream rng(4);
  Vector psi0 = detail::random_state(spec.dim(), rng);
  CHECK((evolve_unitary(spec, coin, full_config(spec), psi0, 0) - psi0)
            .norm() == 0.0);

  // No transport without edges: the position marginal never changes.
  Vector psi2 = evolve_unitary(spec, coin, empty_config(spec), psi0, 2);
  CHECK(l1_distance(position_marginal(psi2, spec),
                    position_marginal(psi0, spec)) <= 1e-12);
}

TEST_CASE("position marginal basics") {
  LatticeSpec spec(3, 3, Boundary::open, Boundary::open);
  const int d = spec.dim();
  PositionDistribution uniform =
      position_marginal(Matrix(Matrix::Identity(d, d) / double(d)), spec);
  for (double v : uniform.prob) CHECK(v == doctest::Approx(1.0 / 9).epsilon(1e-12));
  CHECK(uniform.sum() == doctest::Approx(1.0).epsilon(1e-12));

  Vector psi = Vector::Zero(d);
  psi(basis_index({1, 2}, Direction::U, spec)) = 1.0;
  PositionDistribution delta = position_marginal(psi, spec);
  CHECK(delta.at(1, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(delta.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("trace is preserved over a thousand steps") {
  LatticeSpec spec(3, 3, Boundary::periodic, Boundary::open);
  PercolationChannel ch(spec, make_coin(CoinKind::grover),
                        PercolationModel(0.4));
  RngStream rng(5);
  Matrix rho = detail::random_density(spec.dim(), rng);
  rho = evolve_exact(ch, rho, 1000);
  CHECK(std::abs(rho.trace().real() - 1.0) <= 1e-10);
}

TEST_CASE("monte carlo degenerate cases") {
  LatticeSpec spec(3, 3, Boundary::periodic, Boundary::periodic);
  CoinOperator coin = make_coin(CoinKind::hadamard2d);
  RngStream rng(6);
  Vector psi0 = detail::random_state(spec.dim(), rng);

  // p=1: every trajectory is the same unitary orbit, zero variance.
  PercolationChannel ch1(spec, coin, PercolationModel(1.0));
  PositionDistribution mc = evolve_mc(ch1, psi0, 10, 8, 42);
  PositionDistribution exact = position_marginal(
      evolve_unitary(spec, coin, full_config(spec), psi0, 10), spec);
  CHECK(l1_distance(mc, exact) <= 1e-12);
  // Zero variance up to cancellation error in the sum-of-squares update.
  for (double e : mc.stderr_) CHECK(e <= 1e-8);

  // p=0: no transport, the marginal stays at its initial value.
  PercolationChannel ch0(spec, coin, PercolationModel(0.0));
  PositionDistribution frozen = evolve_mc(ch0, psi0, 25, 8, 42);
  CHECK(l1_distance(frozen, position_marginal(psi0, spec)) <= 1e-12);
}

TEST_CASE("monte carlo is bitwise reproducible across thread counts") {
  LatticeSpec spec(3, 3, Boundary::periodic, Boundary::periodic);
  PercolationChannel ch(spec, make_coin(CoinKind::hadamard2d),
                        PercolationModel(0.5));
  RngStream rng(7);
  Vector psi0 = detail::random_state(spec.dim(), rng);

  setenv("PERQWALK_THREADS", "1", 1);
  PositionDistribution a = evolve_mc(ch, psi0, 12, 9000, 2024);
  setenv("PERQWALK_THREADS", "4", 1);
  PositionDistribution b = evolve_mc(ch, psi0, 12, 9000, 2024);
  unsetenv("PERQWALK_THREADS");

  REQUIRE(a.prob.size() == b.prob.size());
  for (size_t i = 0; i < a.prob.size(); ++i) {
    CHECK(a.prob[i] == b.prob[i]);
    CHECK(a.stderr_[i] == b.stderr_[i]);
  }
}

TEST_CASE("monte carlo agrees with the exact channel within 3 sigma") {
  LatticeSpec spec(3, 3, Boundary::periodic, Boundary::periodic);
  PercolationChannel ch(spec, make_coin(CoinKind::grover),
                        PercolationModel(0.5));
  RngStream rng(8);
  Vector psi0 = detail::random_state(spec.dim(), rng);
  const int steps = 12;
  PositionDistribution mc = evolve_mc(ch, psi0, steps, 20000, 99);
  PositionDistribution exact =
      position_marginal(evolve_exact(ch, psi0 * psi0.adjoint(), steps), spec);
  double err_budget = 0;
  for (double e : mc.stderr_) err_budget += e;
  CHECK(tv_distance(mc, exact) <= 3.0 * 0.5 * err_budget);
}

TEST_CASE("stationary iteration converges on a small instance") {
  LatticeSpec spec(3, 3, Boundary::open, Boundary::open);
  PercolationChannel ch(spec, make_coin(CoinKind::hadamard2d),
                        PercolationModel(0.5));
  RngStream rng(9);
  Matrix rho = detail::random_density(spec.dim(), rng);
  StationaryResult res = evolve_to_stationary(ch, rho);
  CHECK(res.converged);
  // Converged in the period-4 sense: one more period changes nothing.
  Matrix next = res.rho;
  for (int i = 0; i < 4; ++i) next = ch.apply(next);
  CHECK((next - res.rho).cwiseAbs().maxCoeff() <= 1e-9);
}
