#pragma once

// Online epsilon-greedy IQN training against the simulator; snapshots taken
// along the way serve as behavior policies for batch generation.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bcd4rec/agents/config.hpp"
#include "bcd4rec/nn/checkpoint.hpp"
#include "bcd4rec/policies.hpp"
#include "bcd4rec/sim_env.hpp"

namespace bcd4rec::policies {

struct OnlineTrainConfig {
  agents::AgentConfig agent = agents::AgentConfig::defaults_for(agents::AgentKind::iqn);
  int episodes = 1000;
  /// Episode counts after which a snapshot is kept; ascending, each <= episodes.
  std::vector<int> checkpoint_episodes;
  /// Defaults to 1.0 -> 0.05 over the first half of all environment steps.
  std::optional<EpsilonSchedule> epsilon;
  int train_every = 1;
  int warmup_transitions = 64;

  void validate() const;
  EpsilonSchedule schedule(int max_episode_len) const;
};

struct OnlineCheckpoint {
  int episode = 0;
  std::int64_t env_steps = 0;
  double epsilon = 0.0;
  std::string id;
  nn::Checkpoint checkpoint;
};

/// Training users come from a dedicated stream of `seed`, disjoint from the
/// evaluation users. `progress(episode, ctr)` reports each finished episode.
std::vector<OnlineCheckpoint> online_train_iqn(const sim::EnvConfig& env_config, const OnlineTrainConfig& config,
                                               std::uint64_t seed,
                                               const std::function<void(int, double)>& progress = {});

}  // namespace bcd4rec::policies
