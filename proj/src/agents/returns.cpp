#include "bcd4rec/agents/returns.hpp"

#include <algorithm>
#include <stdexcept>

namespace bcd4rec::agents {

double discounted_return(std::span<const double> rewards, double gamma, int horizon) {
  double total = 0.0, discount = 1.0;
  const std::size_t n = std::min(rewards.size(), static_cast<std::size_t>(std::max(horizon, 0)));
  for (std::size_t t = 0; t < n; ++t) {
    total += discount * rewards[t];
    discount *= gamma;
  }
  return total;
}

std::vector<int> random_categories(int num_categories, int count, std::uint64_t seed) {
  if (count > num_categories || count < 0) throw std::domain_error("random_categories: invalid count");
  std::vector<int> all(static_cast<std::size_t>(num_categories));
  for (int i = 0; i < num_categories; ++i) all[static_cast<std::size_t>(i)] = i;
  Rng rng = Rng::stream(seed, "return-groups");
  for (int i = 0; i < count; ++i) {
    const std::size_t j = static_cast<std::size_t>(i) + rng.below(all.size() - static_cast<std::size_t>(i));
    std::swap(all[static_cast<std::size_t>(i)], all[j]);
  }
  all.resize(static_cast<std::size_t>(count));
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<ReturnSample> collect_return_samples(const policies::Policy& policy, const sim::EnvConfig& env_config,
                                                 std::span<const int> groups, const ReturnSampling& sampling) {
  env_config.validate();
  if (sampling.horizon > env_config.max_episode_len)
    throw std::domain_error("return horizon exceeds the episode length");
  sim::Environment env(env_config, Rng::stream(sampling.seed, "return-users").next_u64());
  policies::EpisodeOptions opt;
  opt.policy_seed = Rng::stream(sampling.seed, "return-policy").next_u64();
  opt.first_action = sampling.first_action;

  std::vector<ReturnSample> out;
  for (int g : groups) {
    if (g < 0 || g >= env_config.num_categories) throw std::domain_error("return group outside the categories");
    int found = 0;
    for (std::uint64_t ep = 0; found < sampling.n_users; ++ep) {
      if (env.reset(ep).top_category() != g) continue;
      const data::SessionLog log = policies::run_episode(env, policy, ep, opt);
      std::vector<double> rewards;
      for (const auto& s : log.steps) rewards.push_back(s.reward);
      out.push_back({discounted_return(rewards, sampling.gamma, sampling.horizon), g, sampling.horizon});
      ++found;
    }
  }
  return out;
}

}  // namespace bcd4rec::agents
