#include "bcd4rec/online_train.hpp"

#include <cmath>

#include "bcd4rec/agents/learner.hpp"
#include "bcd4rec/errors.hpp"

namespace bcd4rec::policies {

void OnlineTrainConfig::validate() const {
  agent.validate();
  if (agent.kind != agents::AgentKind::iqn) throw ConfigError("online training expects an IQN agent");
  if (episodes < 0) throw ConfigError("episodes must be >= 0");
  if (train_every < 1) throw ConfigError("train_every must be >= 1");
  if (warmup_transitions < 1) throw ConfigError("warmup_transitions must be >= 1");
  int prev = -1;
  for (int c : checkpoint_episodes) {
    if (c < prev) throw ConfigError("checkpoint episodes must be ascending");
    if (c < 0 || c > episodes) throw ConfigError("checkpoint episode outside the training run");
    prev = c;
  }
  if (epsilon) epsilon->validate();
}

EpsilonSchedule OnlineTrainConfig::schedule(int max_episode_len) const {
  if (epsilon) return *epsilon;
  const std::int64_t total = static_cast<std::int64_t>(episodes) * max_episode_len;
  return EpsilonSchedule{1.0, 0.05, std::max<std::int64_t>(1, total / 2)};
}

std::vector<OnlineCheckpoint> online_train_iqn(const sim::EnvConfig& env_config, const OnlineTrainConfig& config,
                                               std::uint64_t seed, const std::function<void(int, double)>& progress) {
  env_config.validate();
  config.validate();
  std::vector<OnlineCheckpoint> out;
  if (config.checkpoint_episodes.empty()) return out;

  sim::Environment env(env_config, Rng::stream(seed, "online-users").next_u64());
  const EpsilonSchedule eps = config.schedule(env_config.max_episode_len);
  const int L = config.agent.history_len;
  const int n_items = env_config.num_items;

  data::BatchDataset buffer;
  buffer.num_items = n_items;
  buffer.history_len = L;
  agents::Learner learner(buffer, config.agent, seed);
  const auto eval_taus = nn::quantile_midpoints(config.agent.num_quantiles);

  std::int64_t env_steps = 0;
  std::size_t next_ckpt = 0;
  auto snapshot = [&](int episode) {
    while (next_ckpt < config.checkpoint_episodes.size() && config.checkpoint_episodes[next_ckpt] == episode) {
      OnlineCheckpoint c;
      c.episode = episode;
      c.env_steps = env_steps;
      c.epsilon = epsilon_at(eps, env_steps);
      c.id = "iqn-ep" + std::to_string(episode);
      c.checkpoint = learner.checkpoint();
      c.checkpoint.meta["epsilon"] = c.epsilon;
      c.checkpoint.meta["episode"] = episode;
      out.push_back(std::move(c));
      ++next_ckpt;
    }
  };
  snapshot(0);

  for (int ep = 0; ep < config.episodes && next_ckpt < config.checkpoint_episodes.size(); ++ep) {
    sim::UserState user = env.reset(static_cast<std::uint64_t>(ep));
    std::vector<ItemId> positives;
    int clicks = 0, steps = 0;
    for (;;) {
      auto state_of = [&] {
        const std::size_t from = positives.size() > static_cast<std::size_t>(L) ? positives.size() - L : 0;
        return std::vector<ItemId>(positives.begin() + static_cast<std::ptrdiff_t>(from), positives.end());
      };
      const std::vector<ItemId> state = state_of();
      std::vector<ItemId> available;
      for (ItemId i = 0; i < n_items; ++i)
        if (!user.clicked_items.contains(i)) available.push_back(i);

      Rng rng = Rng::stream(seed, "explore", static_cast<std::uint64_t>(env_steps));
      ItemId action;
      if (rng.bernoulli(epsilon_at(eps, env_steps))) {
        action = available[static_cast<std::size_t>(rng.below(available.size()))];
      } else {
        const agents::Matrix q = agents::mean_q_values(learner.online(), std::span(&state, 1), eval_taus);
        action = agents::argmax_over(q.col(0), available);
      }
      const sim::StepOutcome o = env.step(user, action);
      if (is_positive(o.choice)) {
        positives.push_back(action);
        ++clicks;
      }
      ++steps;
      ++env_steps;
      buffer.train.push_back({state, action, o.reward, state_of(), o.done});

      if (static_cast<int>(buffer.train.size()) >= config.warmup_transitions && env_steps % config.train_every == 0)
        learner.step();
      if (o.done) break;
    }
    if (progress) progress(ep + 1, 100.0 * clicks / steps);
    snapshot(ep + 1);
  }
  return out;
}

}  // namespace bcd4rec::policies
