#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "perqwalk/validation.hpp"

using namespace perqwalk;

namespace {

Matrix coin_conjugation(const LatticeSpec& spec, const Matrix4& op,
                        const Matrix& rho) {
  int d = spec.dim();
  Matrix full = Matrix::Zero(d, d);
  for (int site = 0; site < d / 4; ++site)
    full.block<4, 4>(4 * site, 4 * site) = op;
  return full * rho * full.adjoint();
}

}  // namespace

TEST_CASE("full configuration shifts every directed state") {
  LatticeSpec spec(3, 3, Boundary::periodic, Boundary::periodic);
  CoinOperator coin = make_coin(CoinKind::hadamard2d);
  StepUnitary u(spec, coin, full_config(spec));
  for (int x = 0; x < spec.dim(); ++x) {
    auto [m, c] = basis_state(x, spec);
    CHECK(u.image(x) == basis_index(*neighbor(m, c, spec), c, spec));
  }
}

TEST_CASE("empty configuration reflects every directed state") {
  for (Boundary bs : {Boundary::periodic, Boundary::open}) {
    LatticeSpec spec(3, 4, bs, Boundary::open);
    StepUnitary u(spec, make_coin(CoinKind::grover), empty_config(spec));
    for (int x = 0; x < spec.dim(); ++x) {
      auto [m, c] = basis_state(x, spec);
      CHECK(u.image(x) == basis_index(m, reflect_dir(c), spec));
    }
  }
}

TEST_CASE("dense step unitaries are unitary for random configurations") {
  LatticeSpec spec(3, 3, Boundary::periodic, Boundary::periodic);
  CoinOperator coin = make_coin(CoinKind::fourier);
  for (const auto& cfg : random_configs(spec, 0.5, 20, 31)) {
    Matrix u = StepUnitary(spec, coin, cfg).dense();
    CHECK((u.adjoint() * u - Matrix::Identity(spec.dim(), spec.dim()))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
  }
}

TEST_CASE("sample_config degenerate probabilities") {
  LatticeSpec spec(3, 3, Boundary::open, Boundary::open);
  RngStream rng(1);
  CHECK(sample_config(PercolationModel(1.0), spec, rng) == full_config(spec));
  CHECK(sample_config(PercolationModel(0.0), spec, rng) == empty_config(spec));
  CHECK_THROWS_AS(PercolationModel(1.5), std::invalid_argument);
}

TEST_CASE("sample_config edge frequency at p=0.5") {
  LatticeSpec spec(3, 3, Boundary::open, Boundary::open);
  PercolationModel model(0.5);
  RngStream rng(12345);
  std::vector<int> hits(spec.num_edges(), 0);
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) {
    EdgeConfiguration cfg = sample_config(model, spec, rng);
    for (int e = 0; e < spec.num_edges(); ++e) hits[e] += cfg[e];
  }
  for (int e = 0; e < spec.num_edges(); ++e) {
    double freq = double(hits[e]) / samples;
    CHECK(std::abs(freq - 0.5) <= 0.01);  // ~6 sigma of the binomial
  }
}

TEST_CASE("channel degenerates to conjugation at p=0 and p=1") {
  LatticeSpec spec(3, 3, Boundary::periodic, Boundary::open);
  CoinOperator coin = make_coin(CoinKind::hadamard2d);
  RngStream rng(3);
  Matrix rho = detail::random_density(spec.dim(), rng);

  PercolationChannel ch1(spec, coin, PercolationModel(1.0));
  Matrix u = ch1.step_unitary(full_config(spec)).dense();
  CHECK((ch1.apply(rho) - u * rho * u.adjoint()).cwiseAbs().maxCoeff() <=
        1e-12);

  PercolationChannel ch0(spec, coin, PercolationModel(0.0));
  Matrix expect =
      coin_conjugation(spec, reflection_matrix() * coin.matrix, rho);
  CHECK((ch0.apply(rho) - expect).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("pairwise averaging equals the exhaustive configuration sum on "
          "every 3x3 boundary variant") {
  CoinOperator coin = make_coin(CoinKind::grover);
  RngStream rng(17);
  for (Boundary bs : {Boundary::periodic, Boundary::open})
    for (Boundary bt : {Boundary::periodic, Boundary::open}) {
      LatticeSpec spec(3, 3, bs, bt);
      PercolationChannel ch(spec, coin, PercolationModel(0.37));
      Matrix rho = detail::random_density(spec.dim(), rng);
      Matrix fast = ch.apply(rho);
      Matrix exact = exhaustive_channel_apply(spec, coin, 0.37, rho);
      CHECK((fast - exact).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("channel preserves trace and hermiticity") {
  LatticeSpec spec(3, 4, Boundary::open, Boundary::periodic);
  PercolationChannel ch(spec, make_coin(CoinKind::fourier),
                        PercolationModel(0.5));
  RngStream rng(9);
  Matrix rho = detail::random_density(spec.dim(), rng);
  for (int t = 0; t < 20; ++t) rho = ch.apply(rho);
  CHECK(std::abs(rho.trace().real() - 1.0) <= 1e-12);
  CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("averaged step reduces to unitaries at p=0 and p=1") {
  LatticeSpec spec(3, 3, Boundary::periodic, Boundary::periodic);
  CoinOperator coin = make_coin(CoinKind::hadamard2d);
  SlotMaps maps = build_slot_maps(spec);

  Matrix b1 = AveragedStep(spec, coin, 1.0, maps).dense();
  Matrix u_full = StepUnitary(spec, coin, full_config(spec)).dense();
  CHECK((b1 - u_full).cwiseAbs().maxCoeff() <= 1e-12);

  Matrix b0 = AveragedStep(spec, coin, 0.0, maps).dense();
  Matrix u_empty = StepUnitary(spec, coin, empty_config(spec)).dense();
  CHECK((b0 - u_empty).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("averaged step spectral radius is one, attained by common "
          "eigenstates") {
  LatticeSpec spec(3, 3, Boundary::periodic, Boundary::periodic);
  CoinOperator coin = make_coin(CoinKind::hadamard2d);
  PercolationChannel ch(spec, coin, PercolationModel(0.5));
  Matrix b = ch.averaged_step().dense();

  Eigen::ComplexEigenSolver<Matrix> es(b);
  double rmax = es.eigenvalues().cwiseAbs().maxCoeff();
  CHECK(rmax <= 1.0 + 1e-10);
  CHECK(rmax >= 1.0 - 1e-10);

  // Unit-modulus eigenvectors of B are common eigenstates of every U_K.
  auto cfgs = random_configs(spec, 0.5, 50, 77);
  int unit_count = 0;
  for (int i = 0; i < spec.dim(); ++i) {
    if (std::abs(es.eigenvalues()(i)) < 1.0 - 1e-8) continue;
    ++unit_count;
    Vector phi = es.eigenvectors().col(i);
    phi.normalize();
    CHECK(eigenstate_residual(ch, phi, es.eigenvalues()(i), cfgs) <= 1e-10);
  }
  CHECK(unit_count > 0);
}

TEST_CASE("averaged step matches the factored apply") {
  LatticeSpec spec(3, 4, Boundary::open, Boundary::open);
  PercolationChannel ch(spec, make_coin(CoinKind::grover),
                        PercolationModel(0.31));
  AveragedStep b = ch.averaged_step();
  Matrix dense = b.dense();
  RngStream rng(4);
  Vector psi = detail::random_state(spec.dim(), rng);
  CHECK((b.apply(psi) - dense * psi).norm() <= 1e-12);
}
