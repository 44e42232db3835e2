#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

namespace bcd4rec::agents {

/// Agent family: batch-constrained (BC) or not, distributional or not.
///
///   kind     BC   distributional   quantiles
///   DQN      no   no               1, tau = 0.5
///   QRDQN    no   yes              K fixed midpoints
///   IQN      no   yes              K sampled
///   BCQ      yes  no               1, tau = 0.5
///   QRBCQ    yes  yes              K fixed midpoints
///   BCD4Rec  yes  yes              K sampled
enum class AgentKind { dqn, qrdqn, iqn, bcq, qrbcq, bcd4rec };

inline constexpr AgentKind kAllAgentKinds[] = {AgentKind::dqn, AgentKind::qrdqn, AgentKind::iqn,
                                               AgentKind::bcq, AgentKind::qrbcq, AgentKind::bcd4rec};

std::string_view to_string(AgentKind kind);
/// Case-insensitive; throws ConfigError for unknown names.
AgentKind agent_kind_from_string(std::string_view name);

bool is_batch_constrained(AgentKind kind);
bool is_distributional(AgentKind kind);

enum class TauMode { fixed_midpoints, sampled_uniform };

/// How the behavior model of BC agents is trained: updated on every
/// minibatch alongside the Q-network, or trained beforehand and frozen.
enum class BehaviorMode { joint, frozen };

struct AgentConfig {
  AgentKind kind = AgentKind::bcd4rec;
  int num_quantiles = 10;
  TauMode tau_mode = TauMode::sampled_uniform;
  int num_cosines = 128;
  double beta = 0.5;
  double gamma = 0.9;
  double kappa = 1.0;
  double lr = 0.003;
  double behavior_lr = 0.003;
  int batch_size = 64;
  int target_update_rate = 100;
  std::int64_t iterations = 10000;
  int eval_interval = 500;
  /// Validation states used for the training-curve Q estimate (0 = all).
  int eval_states = 1000;
  int embedding_dim = 100;
  int gru_layers = 2;
  int history_len = 10;
  BehaviorMode behavior_mode = BehaviorMode::joint;

  /// Tuned defaults for each kind (K, beta, tau mode) on the simulator.
  static AgentConfig defaults_for(AgentKind kind);

  bool batch_constrained() const { return is_batch_constrained(kind); }
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
  std::string hash() const;
};

void to_json(nlohmann::json& j, const AgentConfig& c);
/// Missing keys fall back to defaults_for(kind).
void from_json(const nlohmann::json& j, AgentConfig& c);

}  // namespace bcd4rec::agents
