#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "perqwalk/attractors.hpp"

using namespace perqwalk;

namespace {

const Complex I(0.0, 1.0);

void check_family(const LatticeSpec& spec, CoinKind kind) {
  CAPTURE(spec.to_string());
  CAPTURE(to_string(kind));
  PercolationChannel ch(spec, make_coin(kind), PercolationModel(0.5));
  CommonEigenstates analytic = analytic_states(kind, spec);

  // Orthonormal family.
  if (analytic.count() > 0) {
    Matrix gram = analytic.states.adjoint() * analytic.states;
    CHECK((gram - Matrix::Identity(analytic.count(), analytic.count()))
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
  }

  // Every state is a common eigenstate on random configurations.
  auto cfgs = random_configs(spec, 0.5, 50, 4242);
  for (int i = 0; i < analytic.count(); ++i)
    CHECK(eigenstate_residual(ch, analytic.states.col(i), analytic.alpha[i],
                              cfgs) <= 1e-10);

  // Span equality with the numeric finder.
  CommonEigenstates numeric = find_common_eigenstates_numeric(ch);
  CHECK(numeric.count() == analytic.count());
  CHECK(span_distance(numeric.states, analytic.states) <= 1e-8);
}

}  // namespace

TEST_CASE("hadamard inventory counts") {
  CHECK(hadamard_states(
            LatticeSpec(4, 4, Boundary::periodic, Boundary::periodic))
            .count() == 10);
  CHECK(hadamard_states(
            LatticeSpec(3, 4, Boundary::periodic, Boundary::periodic))
            .count() == 7);
  CHECK(hadamard_states(
            LatticeSpec(3, 3, Boundary::periodic, Boundary::periodic))
            .count() == 3);
  CHECK(hadamard_states(LatticeSpec(4, 4, Boundary::open, Boundary::open))
            .count() == 10);
}

TEST_CASE("grover inventory counts") {
  CHECK(grover_states(LatticeSpec(3, 3, Boundary::open, Boundary::open))
            .count() == 16);
  CHECK(grover_states(
            LatticeSpec(3, 3, Boundary::periodic, Boundary::periodic))
            .count() == 10);
  CHECK(grover_states(
            LatticeSpec(4, 4, Boundary::periodic, Boundary::periodic))
            .count() == 18);
}

TEST_CASE("fourier inventory counts and spectrum") {
  CommonEigenstates carpet =
      fourier_states(LatticeSpec(3, 3, Boundary::open, Boundary::open));
  CHECK(carpet.count() == 4);
  CHECK(std::abs(carpet.alpha[0] -
                 std::exp(I * (3.0 * std::numbers::pi / 8.0))) <= 1e-12);
  CHECK(fourier_states(
            LatticeSpec(3, 3, Boundary::periodic, Boundary::periodic))
            .count() == 0);
}

TEST_CASE("analytic families verify and span the numeric space on all 3x3 "
          "boundary variants") {
  for (CoinKind kind :
       {CoinKind::hadamard2d, CoinKind::grover, CoinKind::fourier})
    for (Boundary bs : {Boundary::periodic, Boundary::open})
      for (Boundary bt : {Boundary::periodic, Boundary::open})
        check_family(LatticeSpec(3, 3, bs, bt), kind);
}

TEST_CASE("analytic families verify on rectangular instances") {
  check_family(LatticeSpec(3, 4, Boundary::periodic, Boundary::periodic),
               CoinKind::hadamard2d);
  check_family(LatticeSpec(4, 3, Boundary::open, Boundary::periodic),
               CoinKind::grover);
  check_family(LatticeSpec(4, 5, Boundary::open, Boundary::open),
               CoinKind::fourier);
}

TEST_CASE("hadamard ridge states concentrate on one lattice column") {
  LatticeSpec spec(4, 4, Boundary::periodic, Boundary::periodic);
  CommonEigenstates states = hadamard_states(spec);
  // Columns 2..2+N-1 are the phi3(t0) family (after phi1, phi2).
  const int t0 = 1;
  Vector phi = states.states.col(2 + t0);
  PositionDistribution dist = position_marginal(phi, spec);
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) {
      if (t == t0)
        CHECK(dist.at(s, t) == doctest::Approx(0.25).epsilon(1e-10));
      else
        CHECK(dist.at(s, t) <= 1e-12);
    }
}

TEST_CASE("fourier states have position-uniform modulus") {
  LatticeSpec spec(3, 4, Boundary::open, Boundary::open);
  CommonEigenstates states = fourier_states(spec);
  REQUIRE(states.count() == 4);
  for (int i = 0; i < 4; ++i) {
    PositionDistribution dist =
        position_marginal(Vector(states.states.col(i)), spec);
    for (double v : dist.prob)
      CHECK(v == doctest::Approx(1.0 / 12).epsilon(1e-10));
  }
}

TEST_CASE("grover plaquette states ignore far-away boundary changes") {
  // The interior plaquette at (1,1) has finite support away from every
  // boundary, so it must lie in the analytic family on the carpet and the
  // torus alike, with identical amplitudes.
  LatticeSpec carpet(4, 4, Boundary::open, Boundary::open);
  LatticeSpec torus(4, 4, Boundary::periodic, Boundary::periodic);
  for (const LatticeSpec* spec : {&carpet, &torus}) {
    Vector4 v2, v3, v4;
    v2 << 1, 1, 0, 0;
    v3 << 0, -1, 1, 0;
    v4 << -1, 0, 0, 1;
    Vector phi = Vector::Zero(spec->dim());
    auto add = [&](int s, int t, const Vector4& cv) {
      for (int c = 0; c < 4; ++c)
        phi(basis_index({s, t}, static_cast<Direction>(c), *spec)) += cv(c);
    };
    add(1, 1, v2);
    add(1, 2, v2 + v3);
    add(2, 1, v2 + v4);
    add(2, 2, v2 + v3 + v4);
    phi.normalize();
    Matrix span = grover_states(*spec).states;
    Vector residual = phi - span * (span.adjoint() * phi);
    CHECK(residual.norm() <= 1e-10);
  }
}
