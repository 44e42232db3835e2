#pragma once

#include <span>
#include <vector>

#include "bcd4rec/agents/config.hpp"
#include "bcd4rec/agents/q_network.hpp"
#include "bcd4rec/behavior_model.hpp"
#include "bcd4rec/session.hpp"

namespace bcd4rec::agents {

struct TdLossResult {
  double loss = 0.0;
  std::vector<ItemId> target_actions;
};

/// Quantile TD loss averaged over the batch and over all (tau, tau') pairs:
///   delta = r + gamma (1 - done) Q'^{tau'_j}(s', a') - Q^{tau_k}(s, a)
/// with a' chosen by select_target_action on the online network's mean value
/// over `taus` and evaluated by the target network. The available actions at
/// s' are the catalog items not already in s'. For batch-constrained kinds
/// `behavior` supplies p_M(.|s'). Gradients with respect to the online
/// network are accumulated into `grad` when given.
/// Throws DivergenceError when the loss is not finite.
TdLossResult td_loss(const QNetworkParams& online, const QNetworkParams& target,
                     std::span<const data::Transition* const> batch, const AgentConfig& config,
                     std::span<const double> taus, std::span<const double> target_taus,
                     const behavior::BehaviorModelParams* behavior, QNetworkParams* grad = nullptr);

TdLossResult td_loss(const QNetworkParams& online, const QNetworkParams& target,
                     std::span<const data::Transition> batch, const AgentConfig& config,
                     std::span<const double> taus, std::span<const double> target_taus,
                     const behavior::BehaviorModelParams* behavior, QNetworkParams* grad = nullptr);

}  // namespace bcd4rec::agents
