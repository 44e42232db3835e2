#pragma once

// Recommendation policies (random, most-popular, oracle, epsilon-greedy agent)
// and the episode runner that plays them against the simulator.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "bcd4rec/agents/q_network.hpp"
#include "bcd4rec/session.hpp"
#include "bcd4rec/sim_env.hpp"

namespace bcd4rec::policies {

struct Observation {
  /// Most recent positive items of the session, oldest first.
  std::span<const ItemId> history;
  /// True user state; only the oracle may read it.
  const sim::UserState* user = nullptr;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;

  /// Up to `count` distinct items of `available`, best first.
  /// Throws std::domain_error for an empty `available`.
  std::vector<ItemId> recommend(const Observation& obs, std::span<const ItemId> available, Rng& rng,
                                std::size_t count) const;
  ItemId act(const Observation& obs, std::span<const ItemId> available, Rng& rng) const {
    return recommend(obs, available, rng, 1).front();
  }

 protected:
  virtual std::vector<ItemId> rank(const Observation& obs, std::span<const ItemId> available, Rng& rng,
                                   std::size_t count) const = 0;
};

class RandomPolicy final : public Policy {
 public:
  std::string name() const override { return "random"; }

 protected:
  std::vector<ItemId> rank(const Observation&, std::span<const ItemId> available, Rng& rng,
                           std::size_t count) const override;
};

class MostPopPolicy final : public Policy {
 public:
  explicit MostPopPolicy(std::vector<double> frequencies) : freq_(std::move(frequencies)) {}
  std::string name() const override { return "mostpop"; }

 protected:
  std::vector<ItemId> rank(const Observation&, std::span<const ItemId> available, Rng&,
                           std::size_t count) const override;

 private:
  std::vector<double> freq_;
};

/// Ranks by true relevance u^T i; requires Observation::user.
class OraclePolicy final : public Policy {
 public:
  explicit OraclePolicy(std::vector<sim::Item> catalog) : catalog_(std::move(catalog)) {}
  std::string name() const override { return "oracle"; }

 protected:
  std::vector<ItemId> rank(const Observation& obs, std::span<const ItemId> available, Rng&,
                           std::size_t count) const override;

 private:
  std::vector<sim::Item> catalog_;
};

/// With probability epsilon a uniformly random ranking, otherwise the
/// agent's greedy ranking by mean quantile value.
class AgentPolicy final : public Policy {
 public:
  AgentPolicy(std::shared_ptr<const agents::QAgent> agent, double epsilon, std::string label = "agent");
  std::string name() const override { return label_; }
  double epsilon() const { return epsilon_; }
  const agents::QAgent& agent() const { return *agent_; }

 protected:
  std::vector<ItemId> rank(const Observation& obs, std::span<const ItemId> available, Rng& rng,
                           std::size_t count) const override;

 private:
  std::shared_ptr<const agents::QAgent> agent_;
  double epsilon_;
  std::string label_;
};

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  std::int64_t decay_steps = 1;

  /// Throws ConfigError unless 0 <= end <= start <= 1 and decay_steps > 0.
  void validate() const;
};

/// Linear from start to end over decay_steps, then constant at end.
double epsilon_at(const EpsilonSchedule& schedule, std::int64_t step);

enum class PolicyKind { random, mostpop, oracle, agent_checkpoint };

struct PolicyHandle {
  PolicyKind kind = PolicyKind::random;
  std::optional<std::string> checkpoint_ref;
  std::optional<EpsilonSchedule> epsilon_schedule;
  /// Exploration rate used when acting; defaults to the one stored with the checkpoint.
  std::optional<double> epsilon;

  void validate() const;
};

void to_json(nlohmann::json& j, const EpsilonSchedule& s);
void from_json(const nlohmann::json& j, EpsilonSchedule& s);
void to_json(nlohmann::json& j, const PolicyHandle& h);
void from_json(const nlohmann::json& j, PolicyHandle& h);

struct PolicyContext {
  std::vector<sim::Item> catalog;
  /// Per-item positive counts from the training log (most-popular policy).
  std::vector<double> item_frequencies;
  /// Directory against which relative checkpoint references are resolved.
  std::filesystem::path checkpoint_root;
};

std::unique_ptr<Policy> make_policy(const PolicyHandle& handle, const PolicyContext& context);

/// Per-step view handed to episode observers before the step is applied.
struct StepView {
  std::uint64_t episode = 0;
  int step = 0;
  const sim::UserState* user = nullptr;
  std::span<const ItemId> recommended;
  const sim::StepOutcome* outcome = nullptr;  // filled after the step
};

struct EpisodeOptions {
  int history_len = 10;
  /// Length of the ranked list requested at every step (the first is shown).
  std::size_t list_size = 1;
  std::uint64_t policy_seed = 0;
  /// Forces the first recommendation (shared initial action of return rollouts).
  std::optional<ItemId> first_action;
};

/// Plays one episode with user `episode` of `env`. Policy randomness comes
/// from a stream per (policy_seed, episode, step).
data::SessionLog run_episode(sim::Environment& env, const Policy& policy, std::uint64_t episode,
                             const EpisodeOptions& options,
                             const std::function<void(const StepView&)>& observer = {});

}  // namespace bcd4rec::policies
