#pragma once

// Time evolution engines: exact channel iteration, fixed-configuration
// unitary evolution, and Monte Carlo trajectory sampling, plus position
// marginals.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

#include "perqwalk/channel.hpp"

namespace perqwalk {

// P(s,t) stored row-major in site order (s*N + t), matching basis_index.
struct PositionDistribution {
  int M = 0, N = 0;
  std::vector<double> prob;
  std::vector<double> stderr_;  // empty unless estimated

  double& at(int s, int t) { return prob[s * N + t]; }
  double at(int s, int t) const { return prob[s * N + t]; }
  double sum() const {
    double acc = 0;
    for (double v : prob) acc += v;
    return acc;
  }
};

inline double l1_distance(const PositionDistribution& a,
                          const PositionDistribution& b) {
  double acc = 0;
  for (size_t i = 0; i < a.prob.size(); ++i)
    acc += std::abs(a.prob[i] - b.prob[i]);
  return acc;
}

inline double tv_distance(const PositionDistribution& a,
                          const PositionDistribution& b) {
  return 0.5 * l1_distance(a, b);
}

inline PositionDistribution position_marginal(const Matrix& rho,
                                              const LatticeSpec& spec) {
  PositionDistribution dist;
  dist.M = spec.extent_s();
  dist.N = spec.extent_t();
  dist.prob.resize(spec.num_sites());
  for (int site = 0; site < spec.num_sites(); ++site) {
    double v = 0;
    for (int c = 0; c < 4; ++c) v += rho(4 * site + c, 4 * site + c).real();
    dist.prob[site] = v;
  }
  return dist;
}

inline PositionDistribution position_marginal(const Vector& psi,
                                              const LatticeSpec& spec) {
  PositionDistribution dist;
  dist.M = spec.extent_s();
  dist.N = spec.extent_t();
  dist.prob.resize(spec.num_sites());
  for (int site = 0; site < spec.num_sites(); ++site)
    dist.prob[site] = psi.segment<4>(4 * site).squaredNorm();
  return dist;
}

inline Matrix evolve_exact(const PercolationChannel& ch, Matrix rho,
                           int steps) {
  for (int i = 0; i < steps; ++i) rho = ch.apply(rho);
  return rho;
}

// Iterate until rho(t) and rho(t + period) agree to `tol` in max-element
// norm, where `period` should be a multiple of every attractor phase period
// (4 covers the coins considered here). Returns the state and step count;
// steps == cap signals non-convergence.
struct StationaryResult {
  Matrix rho;
  int steps = 0;
  bool converged = false;
};

inline StationaryResult evolve_to_stationary(const PercolationChannel& ch,
                                             Matrix rho, int period = 4,
                                             double tol = 1e-10,
                                             int cap = 100000) {
  StationaryResult res;
  int t = 0;
  while (t < cap) {
    Matrix next = rho;
    for (int i = 0; i < period; ++i) next = ch.apply(next);
    t += period;
    double delta = (next - rho).cwiseAbs().maxCoeff();
    rho = std::move(next);
    if (delta < tol) {
      res.converged = true;
      break;
    }
  }
  res.rho = std::move(rho);
  res.steps = t;
  return res;
}

inline Vector evolve_unitary(const LatticeSpec& spec, const CoinOperator& coin,
                             const EdgeConfiguration& config, Vector psi,
                             int steps) {
  StepUnitary u(spec, coin, config);
  for (int i = 0; i < steps; ++i) psi = u.apply(psi);
  return psi;
}

inline int worker_count() {
  if (const char* env = std::getenv("PERQWALK_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Monte Carlo estimate of the position marginal after `steps` steps of
// dynamical percolation. Each trajectory samples one configuration per step
// from its own substream; the per-block accumulation order is fixed, so the
// result is bitwise identical for a given master seed at any thread count.
inline PositionDistribution evolve_mc(const PercolationChannel& ch,
                                      const Vector& psi0, int steps,
                                      int trials, std::uint64_t master_seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const LatticeSpec& spec = ch.spec();
  const PercolationModel model(ch.p());
  const int cells = spec.num_sites();
  const int block_size = 4096;
  const int blocks = (trials + block_size - 1) / block_size;

  std::vector<std::vector<double>> block_sum(blocks),
      block_sumsq(blocks);

  auto run_block = [&](int b) {
    std::vector<double> sum(cells, 0.0), sumsq(cells, 0.0);
    int lo = b * block_size;
    int hi = std::min(trials, lo + block_size);
    EdgeConfiguration cfg(spec.num_edges());
    for (int traj = lo; traj < hi; ++traj) {
      Vector psi = psi0;
      for (int step = 0; step < steps; ++step) {
        RngStream rng = substream(master_seed, traj, step);
        for (auto& bit : cfg) bit = rng.next_double() < model.p ? 1 : 0;
        psi = ch.step_unitary(cfg).apply(psi);
      }
      for (int site = 0; site < cells; ++site) {
        double q = psi.segment<4>(4 * site).squaredNorm();
        sum[site] += q;
        sumsq[site] += q * q;
      }
    }
    block_sum[b] = std::move(sum);
    block_sumsq[b] = std::move(sumsq);
  };

  int workers = std::min(worker_count(), blocks);
  if (workers <= 1) {
    for (int b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next_block{0};
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int b = next_block.fetch_add(1); b < blocks;
             b = next_block.fetch_add(1))
          run_block(b);
      });
    for (auto& th : pool) th.join();
  }

  PositionDistribution dist;
  dist.M = spec.extent_s();
  dist.N = spec.extent_t();
  dist.prob.assign(cells, 0.0);
  dist.stderr_.assign(cells, 0.0);
  std::vector<double> sumsq(cells, 0.0);
  for (int b = 0; b < blocks; ++b)
    for (int i = 0; i < cells; ++i) {
      dist.prob[i] += block_sum[b][i];
      sumsq[i] += block_sumsq[b][i];
    }
  const double T = trials;
  for (int i = 0; i < cells; ++i) {
    double mean = dist.prob[i] / T;
    double var = trials > 1 ? (sumsq[i] - T * mean * mean) / (T - 1.0) : 0.0;
    dist.prob[i] = mean;
    dist.stderr_[i] = std::sqrt(std::max(var, 0.0) / T);
  }
  return dist;
}

}  // namespace perqwalk
