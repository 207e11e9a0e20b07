#pragma once

// Percolation configurations, configuration-dependent step unitaries, the
// exact percolation channel, and the probability-averaged step operator.
//
// The channel is applied without enumerating the 2^|E| edge configurations:
// every directed basis state is moved by the shift as a function of exactly
// one independent edge indicator, so matrix elements average pairwise.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "perqwalk/coin.hpp"
#include "perqwalk/lattice.hpp"
#include "perqwalk/rng.hpp"

namespace perqwalk {

// Membership bit per undirected edge, indexed by edge_index().
using EdgeConfiguration = std::vector<std::uint8_t>;

struct PercolationModel {
  double p = 0.5;
  explicit PercolationModel(double prob) : p(prob) {
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("edge probability must lie in [0, 1]");
  }
};

inline EdgeConfiguration full_config(const LatticeSpec& spec) {
  return EdgeConfiguration(spec.num_edges(), 1);
}

inline EdgeConfiguration empty_config(const LatticeSpec& spec) {
  return EdgeConfiguration(spec.num_edges(), 0);
}

inline EdgeConfiguration sample_config(const PercolationModel& model,
                                       const LatticeSpec& spec,
                                       RngStream& rng) {
  EdgeConfiguration cfg(spec.num_edges());
  for (auto& bit : cfg) bit = rng.next_double() < model.p ? 1 : 0;
  return cfg;
}

// Per directed basis state: the controlling edge (-1 at a Wall), the image
// under a perfect hop, and the image under reflection.
struct SlotMaps {
  std::vector<int> edge_id;
  std::vector<int> step_image;
  std::vector<int> reflect_image;
};

inline SlotMaps build_slot_maps(const LatticeSpec& spec) {
  SlotMaps maps;
  int d = spec.dim();
  maps.edge_id.resize(d);
  maps.step_image.resize(d);
  maps.reflect_image.resize(d);
  for (int x = 0; x < d; ++x) {
    auto [m, c] = basis_state(x, spec);
    maps.reflect_image[x] = basis_index(m, reflect_dir(c), spec);
    auto e = edge_of(m, c, spec);
    if (e) {
      maps.edge_id[x] = edge_index(*e, spec);
      maps.step_image[x] = basis_index(*neighbor(m, c, spec), c, spec);
    } else {
      maps.edge_id[x] = -1;
      maps.step_image[x] = maps.reflect_image[x];
    }
  }
  return maps;
}

// U_K = S_K (I (x) C) for one fixed edge configuration, kept in factored
// permutation + coin form.
class StepUnitary {
 public:
  StepUnitary(const LatticeSpec& spec, const CoinOperator& coin,
              EdgeConfiguration config)
      : spec_(spec), coin_(coin), config_(std::move(config)),
        maps_(build_slot_maps(spec)) {
    if (static_cast<int>(config_.size()) != spec.num_edges())
      throw std::invalid_argument("edge configuration size mismatch");
  }

  StepUnitary(const LatticeSpec& spec, const CoinOperator& coin,
              EdgeConfiguration config, const SlotMaps& maps)
      : spec_(spec), coin_(coin), config_(std::move(config)), maps_(maps) {}

  const LatticeSpec& spec() const { return spec_; }
  const EdgeConfiguration& config() const { return config_; }

  int image(int x) const {
    int e = maps_.edge_id[x];
    return (e >= 0 && config_[e]) ? maps_.step_image[x]
                                  : maps_.reflect_image[x];
  }

  // |psi> -> U_K |psi>
  Vector apply(const Vector& psi) const {
    Vector tmp = apply_coin(psi);
    Vector out(psi.size());
    for (int x = 0; x < psi.size(); ++x) out(image(x)) = tmp(x);
    return out;
  }

  Matrix dense() const {
    int d = spec_.dim();
    Matrix u = Matrix::Zero(d, d);
    Matrix cfull = coin_block(d);
    for (int x = 0; x < d; ++x) u.row(image(x)) = cfull.row(x);
    return u;
  }

  Matrix coin_block(int d) const {
    Matrix cfull = Matrix::Zero(d, d);
    for (int site = 0; site < d / 4; ++site)
      cfull.block<4, 4>(4 * site, 4 * site) = coin_.matrix;
    return cfull;
  }

 private:
  Vector apply_coin(const Vector& psi) const {
    Vector tmp(psi.size());
    for (int site = 0; site < psi.size() / 4; ++site)
      tmp.segment<4>(4 * site) = coin_.matrix * psi.segment<4>(4 * site);
    return tmp;
  }

  LatticeSpec spec_;
  CoinOperator coin_;
  EdgeConfiguration config_;
  SlotMaps maps_;
};

// B = sum_K pi_K(p) U_K, factored as E[S_K] (I (x) C) where the averaged
// shift sends |m,c> to p|m+c,c> + (1-p)|m,~c>, with p replaced by 0 at Walls.
class AveragedStep {
 public:
  AveragedStep(const LatticeSpec& spec, const CoinOperator& coin, double p,
               const SlotMaps& maps)
      : spec_(spec), coin_(coin), p_(p), maps_(maps) {}

  Vector apply(const Vector& psi) const {
    int d = spec_.dim();
    Vector tmp(d);
    for (int site = 0; site < d / 4; ++site)
      tmp.segment<4>(4 * site) = coin_.matrix * psi.segment<4>(4 * site);
    Vector out = Vector::Zero(d);
    for (int x = 0; x < d; ++x) {
      double pe = maps_.edge_id[x] >= 0 ? p_ : 0.0;
      out(maps_.step_image[x]) += pe * tmp(x);
      out(maps_.reflect_image[x]) += (1.0 - pe) * tmp(x);
    }
    return out;
  }

  Matrix dense() const {
    int d = spec_.dim();
    Matrix b = Matrix::Zero(d, d);
    Matrix cfull = Matrix::Zero(d, d);
    for (int site = 0; site < d / 4; ++site)
      cfull.block<4, 4>(4 * site, 4 * site) = coin_.matrix;
    for (int x = 0; x < d; ++x) {
      double pe = maps_.edge_id[x] >= 0 ? p_ : 0.0;
      b.row(maps_.step_image[x]) += pe * cfull.row(x);
      b.row(maps_.reflect_image[x]) += (1.0 - pe) * cfull.row(x);
    }
    return b;
  }

 private:
  LatticeSpec spec_;
  CoinOperator coin_;
  double p_;
  SlotMaps maps_;
};

// The exact percolation channel rho -> sum_K pi_K(p) U_K rho U_K^dag.
class PercolationChannel {
 public:
  PercolationChannel(const LatticeSpec& spec, const CoinOperator& coin,
                     PercolationModel model)
      : spec_(spec), coin_(coin), model_(model), maps_(build_slot_maps(spec)) {}

  const LatticeSpec& spec() const { return spec_; }
  const CoinOperator& coin() const { return coin_; }
  double p() const { return model_.p; }
  const SlotMaps& slot_maps() const { return maps_; }

  AveragedStep averaged_step() const {
    return AveragedStep(spec_, coin_, model_.p, maps_);
  }

  StepUnitary step_unitary(const EdgeConfiguration& cfg) const {
    return StepUnitary(spec_, coin_, cfg, maps_);
  }

  // Exact Phi(rho). Matrix-element pairs of directed states average over the
  // joint distribution of their controlling edge indicators: a shared edge
  // couples the two branches, distinct edges factorize, a Wall reflects with
  // probability one.
  Matrix apply(const Matrix& rho) const {
    int d = spec_.dim();
    if (rho.rows() != d || rho.cols() != d)
      throw std::invalid_argument("density operator dimension mismatch");

    // Conjugate by I (x) C first.
    Matrix mid(d, d);
    for (int site = 0; site < d / 4; ++site)
      mid.middleRows<4>(4 * site) =
          coin_.matrix * rho.middleRows<4>(4 * site);
    for (int site = 0; site < d / 4; ++site)
      mid.middleCols<4>(4 * site) =
          mid.middleCols<4>(4 * site) * coin_.matrix.adjoint();

    const double p = model_.p, q = 1.0 - p;
    const auto& eid = maps_.edge_id;
    const auto& stp = maps_.step_image;
    const auto& ref = maps_.reflect_image;

    Matrix out = Matrix::Zero(d, d);
    for (int y = 0; y < d; ++y) {
      int ey = eid[y], ay = stp[y], ry = ref[y];
      double py = ey >= 0 ? p : 0.0;
      for (int x = 0; x < d; ++x) {
        Complex v = mid(x, y);
        int ex = eid[x], ax = stp[x], rx = ref[x];
        if (ex >= 0 && ex == ey) {
          out(ax, ay) += p * v;
          out(rx, ry) += q * v;
        } else {
          double px = ex >= 0 ? p : 0.0;
          if (px > 0.0) {
            if (py > 0.0) out(ax, ay) += px * py * v;
            if (py < 1.0) out(ax, ry) += px * (1.0 - py) * v;
          }
          if (px < 1.0) {
            if (py > 0.0) out(rx, ay) += (1.0 - px) * py * v;
            if (py < 1.0) out(rx, ry) += (1.0 - px) * (1.0 - py) * v;
          }
        }
      }
    }
    return out;
  }

 private:
  LatticeSpec spec_;
  CoinOperator coin_;
  PercolationModel model_;
  SlotMaps maps_;
};

}  // namespace perqwalk
