#pragma once

// Empirical discounted-return samples of a policy for groups of simulated
// users sharing the same top-interest category.

#include <cstdint>
#include <span>
#include <vector>

#include "bcd4rec/policies.hpp"
#include "bcd4rec/sim_env.hpp"

namespace bcd4rec::agents {

struct ReturnSample {
  double value = 0.0;
  int group = 0;  // top-interest category of the user
  int horizon = 0;
};

/// sum_{t < horizon} gamma^t r_t.
double discounted_return(std::span<const double> rewards, double gamma, int horizon);

/// `count` distinct categories drawn with `seed`, ascending.
std::vector<int> random_categories(int num_categories, int count, std::uint64_t seed);

struct ReturnSampling {
  int n_users = 50;
  int horizon = 20;
  double gamma = 0.9;
  /// Shared first recommendation; the initial state is the empty session.
  ItemId first_action = 0;
  std::uint64_t seed = 0;
};

/// For each group category, the first n_users users (from a stream of
/// `seed`) whose top interest is that category play `policy` after the shared
/// first action. Samples are grouped in the order of `groups`.
/// Throws std::domain_error when the horizon exceeds the episode length.
std::vector<ReturnSample> collect_return_samples(const policies::Policy& policy, const sim::EnvConfig& env_config,
                                                 std::span<const int> groups, const ReturnSampling& sampling);

}  // namespace bcd4rec::agents
