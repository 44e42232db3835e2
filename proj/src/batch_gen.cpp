#include "bcd4rec/batch_gen.hpp"

#include <stdexcept>

namespace bcd4rec::data {

std::vector<SessionLog> generate_batch(const sim::EnvConfig& env_config, const policies::Policy& policy,
                                       int sessions, std::uint64_t seed, int history_len) {
  if (sessions < 0) throw std::domain_error("generate_batch: negative session count");
  env_config.validate();
  sim::Environment env(env_config, Rng::stream(seed, "batch-users").next_u64());
  policies::EpisodeOptions opt;
  opt.history_len = history_len;
  opt.policy_seed = Rng::stream(seed, "batch-policy").next_u64();
  std::vector<SessionLog> out;
  out.reserve(static_cast<std::size_t>(sessions));
  for (int i = 0; i < sessions; ++i) out.push_back(policies::run_episode(env, policy, static_cast<std::uint64_t>(i), opt));
  return out;
}

}  // namespace bcd4rec::data
