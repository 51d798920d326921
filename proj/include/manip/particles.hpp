#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "manip/parallel.hpp"
#include "manip/rng.hpp"

namespace manip {

/// Raised when a measurement zeroes out every particle weight.
struct FilterDivergence : std::runtime_error {
  FilterDivergence() : std::runtime_error("particle filter diverged: all posterior weights are zero") {}
};

/// Weighted hypotheses over an arbitrary state type. The set is immutable
/// between filter steps; updates return a new set with generation + 1.
template <class State>
struct ParticleSet {
  struct Particle {
    State state;
    double weight = 0.0;
  };

  std::vector<Particle> particles;
  std::uint64_t generation = 0;

  std::size_t size() const { return particles.size(); }

  double total_weight() const {
    double s = 0.0;
    for (const auto& p : particles) s += p.weight;
    return s;
  }

  bool is_normalized(double tol = 1e-9) const { return std::abs(total_weight() - 1.0) <= tol; }

  void normalize() {
    const double s = total_weight();
    if (!(s > 0.0)) throw FilterDivergence();
    for (auto& p : particles) p.weight /= s;
  }

  static ParticleSet uniform(std::vector<State> states) {
    if (states.empty()) throw std::invalid_argument("ParticleSet: empty state list");
    ParticleSet set;
    set.particles.reserve(states.size());
    const double w = 1.0 / static_cast<double>(states.size());
    for (auto& s : states) set.particles.push_back({std::move(s), w});
    return set;
  }
};

/// One Bayes step: posterior weight_i is proportional to weight_i *
/// likelihood(state_i). Poses are unchanged; the normalizer is absorbed by
/// normalize(). Likelihood evaluation is the data-parallel kernel.
template <class State, class Likelihood>
ParticleSet<State> bayes_update(const ParticleSet<State>& prior, Likelihood&& likelihood,
                                ExecMode mode = ExecMode::Parallel) {
  if (prior.particles.empty()) throw std::invalid_argument("bayes_update: empty particle set");
  ParticleSet<State> post = prior;
  std::vector<double> lik(prior.size());
  parallel_for(prior.size(), mode, [&](std::size_t i) {
    lik[i] = likelihood(prior.particles[i].state);
  });
  for (std::size_t i = 0; i < post.size(); ++i) {
    const double l = lik[i];
    if (!(l >= 0.0) || !std::isfinite(l))
      throw std::invalid_argument("bayes_update: likelihood must be finite and nonnegative");
    post.particles[i].weight *= l;
  }
  post.normalize();
  post.generation = prior.generation + 1;
  return post;
}

/// 1 / sum w_i^2 for normalized weights; in [1, n].
template <class State>
double effective_sample_size(const ParticleSet<State>& set) {
  if (!set.is_normalized()) throw std::invalid_argument("effective_sample_size: weights not normalized");
  double s2 = 0.0;
  for (const auto& p : set.particles) s2 += p.weight * p.weight;
  return 1.0 / s2;
}

/// Systematic (low-variance) resampling: one uniform offset, n equally spaced
/// pointers on the cumulative weights. Copy counts differ from n*w_i by < 1.
/// target_n == 0 keeps the input count.
template <class State>
ParticleSet<State> systematic_resample(const ParticleSet<State>& set, const RngStream& rng,
                                       std::size_t target_n = 0) {
  const std::size_t m = set.size();
  if (m == 0) throw std::invalid_argument("systematic_resample: empty particle set");
  const std::size_t n = target_n == 0 ? m : target_n;
  const double total = set.total_weight();
  if (!(total > 0.0)) throw FilterDivergence();

  auto eng = rng.at(0);
  const double u0 = uniform(eng, 0.0, 1.0) / static_cast<double>(n);

  ParticleSet<State> out;
  out.generation = set.generation;
  out.particles.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  double cum = 0.0;
  std::size_t i = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double pointer = (u0 + static_cast<double>(k) / static_cast<double>(n)) * total;
    while (cum + set.particles[i].weight < pointer && i + 1 < m) {
      cum += set.particles[i].weight;
      ++i;
    }
    out.particles.push_back({set.particles[i].state, w});
  }
  return out;
}

}  // namespace manip
