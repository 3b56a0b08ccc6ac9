#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "crnkit/error.hpp"
#include "crnkit/fock.hpp"
#include "crnkit/network.hpp"
#include "crnkit/structure.hpp"

namespace crn {

/// r(τ) times the number of ordered ways to draw the input complex from n.
inline double propensity(const Network& net, const CountVector& n, std::size_t transition) {
  const auto& t = net.transitions().at(transition);
  return t.rate * falling_factorial(n, t.input);
}

struct SsaOptions {
  std::int64_t safety_cap = 1'000'000;  // per-species count that triggers E_EXPLODE
};

/// Gillespie direct method over a single trajectory.
class DirectMethod {
 public:
  DirectMethod(const Network& net, CountVector n0, std::uint64_t seed, SsaOptions opts = {})
      : net_(net), state_(std::move(n0)), rng_(seed), opts_(opts), props_(net.num_transitions()) {
    if (state_.size() != net.num_species()) throw Error(ErrorCode::Dim, "initial state length mismatch");
  }

  double time() const noexcept { return time_; }
  const CountVector& state() const noexcept { return state_; }
  std::uint64_t jumps() const noexcept { return jumps_; }

  /// Fires the next transition if it happens by t_limit and returns its index.
  /// Otherwise moves the clock to t_limit (exponential waiting times are
  /// memoryless, so the pending draw can be discarded) and returns nullopt.
  std::optional<std::size_t> step(double t_limit) {
    double total = 0.0;
    for (std::size_t j = 0; j < props_.size(); ++j) {
      props_[j] = propensity(net_, state_, j);
      total += props_[j];
    }
    if (total <= 0.0) {
      time_ = std::max(time_, t_limit);
      return std::nullopt;
    }
    const double wait = -std::log(1.0 - unit_(rng_)) / total;
    if (time_ + wait > t_limit) {
      time_ = t_limit;
      return std::nullopt;
    }
    time_ += wait;
    const double target = unit_(rng_) * total;
    std::size_t chosen = props_.size() - 1;
    double acc = 0.0;
    for (std::size_t j = 0; j < props_.size(); ++j) {
      acc += props_[j];
      if (target < acc && props_[j] > 0.0) {
        chosen = j;
        break;
      }
    }
    while (props_[chosen] <= 0.0) --chosen;  // guard the rounding edge at acc == total
    fire(chosen);
    return chosen;
  }

 private:
  void fire(std::size_t j) {
    const auto& t = net_.transitions()[j];
    for (std::size_t i = 0; i < state_.size(); ++i) {
      const auto v = state_[i] - t.input[i] + t.output[i];
      if (v > opts_.safety_cap)
        throw Error(ErrorCode::Explode, "species '" + net_.species()[i] + "' exceeded " +
                                            std::to_string(opts_.safety_cap) + " at t=" + std::to_string(time_));
      state_.set(i, v);
    }
    ++jumps_;
  }

  const Network& net_;
  CountVector state_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  SsaOptions opts_;
  std::vector<double> props_;
  double time_ = 0.0;
  std::uint64_t jumps_ = 0;
};

struct JumpTrajectory {
  std::vector<double> times;
  std::vector<CountVector> states;
  std::uint64_t seed = 0;
};

inline JumpTrajectory simulate(const Network& net, const CountVector& n0, double t_end, std::uint64_t seed,
                               const SsaOptions& opts = {}) {
  if (!(t_end > 0.0)) throw Error(ErrorCode::Dim, "t_end must be positive");
  DirectMethod sim(net, n0, seed, opts);
  JumpTrajectory traj{{0.0}, {n0}, seed};
  while (sim.step(t_end)) {
    traj.times.push_back(sim.time());
    traj.states.push_back(sim.state());
  }
  return traj;
}

/// Sparse count of sampled states. Merging is associative and commutative.
class Histogram {
 public:
  Histogram() = default;
  explicit Histogram(std::size_t num_species) : num_species_(num_species) {}

  void add(const CountVector& n, std::uint64_t count = 1) {
    counts_[n] += count;
    total_ += count;
  }

  void merge(const Histogram& other) {
    if (other.num_species_ != num_species_) throw Error(ErrorCode::Dim, "histogram species mismatch");
    for (const auto& [n, c] : other.counts_) add(n, c);
  }

  std::uint64_t total_samples() const noexcept { return total_; }
  std::size_t num_species() const noexcept { return num_species_; }
  const std::map<CountVector, std::uint64_t>& counts() const noexcept { return counts_; }

  std::uint64_t count(const CountVector& n) const {
    auto it = counts_.find(n);
    return it == counts_.end() ? 0 : it->second;
  }
  double frequency(const CountVector& n) const {
    return total_ == 0 ? 0.0 : static_cast<double>(count(n)) / static_cast<double>(total_);
  }

  /// Smallest box holding every sampled state (caps at least 1).
  TruncationBox box() const {
    std::vector<std::int64_t> caps(num_species_, 1);
    for (const auto& [n, c] : counts_)
      for (std::size_t i = 0; i < num_species_; ++i) caps[i] = std::max(caps[i], n[i]);
    return TruncationBox(std::move(caps));
  }

  std::vector<double> means() const {
    std::vector<double> m(num_species_, 0.0);
    for (const auto& [n, c] : counts_)
      for (std::size_t i = 0; i < num_species_; ++i) m[i] += static_cast<double>(n[i]) * static_cast<double>(c);
    for (auto& v : m) v /= std::max<double>(1.0, static_cast<double>(total_));
    return m;
  }

 private:
  std::size_t num_species_ = 0;
  std::map<CountVector, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct SamplingPlan {
  double burn_in = 50.0;
  std::size_t samples = 100'000;
  double interval = 1.0;
};

/// Snapshots the state at burn_in, burn_in + interval, ... (sample_count times).
inline Histogram stationary_histogram(const Network& net, const CountVector& n0, const SamplingPlan& plan,
                                      std::uint64_t seed, const SsaOptions& opts = {}) {
  if (plan.burn_in < 0.0 || !(plan.interval > 0.0) || plan.samples == 0)
    throw Error(ErrorCode::Dim, "sampling parameters must be positive");
  DirectMethod sim(net, n0, seed, opts);
  Histogram h(net.num_species());
  for (std::size_t s = 0; s < plan.samples; ++s) {
    const double at = plan.burn_in + static_cast<double>(s) * plan.interval;
    while (sim.step(at)) {
    }
    h.add(sim.state());
  }
  return h;
}

/// Total-variation distance between the histogram and ψ, both renormalized on ψ's box.
/// Sampled states outside the box count fully toward the distance.
inline double tv_distance(const Histogram& h, const MixedState& psi) {
  const auto& box = psi.box;
  const double mass = psi.total();
  if (!(mass > 0.0)) throw Error(ErrorCode::EmptySector, "reference distribution has no mass");
  const double total = static_cast<double>(h.total_samples());
  double tv = 0.0;
  double outside = 0.0;
  std::vector<double> empirical(box.size(), 0.0);
  for (const auto& [n, c] : h.counts()) {
    if (box.contains(n))
      empirical[box.index(n)] = static_cast<double>(c) / total;
    else
      outside += static_cast<double>(c) / total;
  }
  for (std::size_t idx = 0; idx < box.size(); ++idx) tv += std::abs(empirical[idx] - psi.weights[idx] / mass);
  return 0.5 * (tv + outside);
}

struct PoissonComparison {
  double tv_distance = 0.0;
  std::vector<double> means;
};

/// Compares against the product-Poisson law with means c on the histogram's box,
/// widened to `min_caps` when given.
inline PoissonComparison compare_to_poisson(const Histogram& h, std::span<const double> c,
                                            std::vector<std::int64_t> min_caps = {}) {
  if (c.size() != h.num_species()) throw Error(ErrorCode::Dim, "state length mismatch");
  auto caps = h.box().caps();
  for (std::size_t i = 0; i < min_caps.size() && i < caps.size(); ++i) caps[i] = std::max(caps[i], min_caps[i]);
  const TruncationBox box(caps);
  const auto reference = coherent_state(c, box);
  return {tv_distance(h, reference.state), h.means()};
}

}  // namespace crn
