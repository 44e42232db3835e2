#include "bcd4rec/agents/td_loss.hpp"

#include <cmath>
#include <stdexcept>

#include "bcd4rec/agents/losses.hpp"
#include "bcd4rec/errors.hpp"

namespace bcd4rec::agents {

TdLossResult td_loss(const QNetworkParams& online, const QNetworkParams& target,
                     std::span<const data::Transition* const> batch, const AgentConfig& config,
                     std::span<const double> taus, std::span<const double> target_taus,
                     const behavior::BehaviorModelParams* behavior, QNetworkParams* grad) {
  if (batch.empty()) throw std::invalid_argument("td_loss: empty batch");
  if (taus.empty() || target_taus.empty()) throw std::invalid_argument("td_loss: empty quantile list");
  const bool constrained = config.batch_constrained() && config.beta > 0.0;
  if (constrained && !behavior) throw ConfigError("td_loss: batch-constrained agent without a behavior model");

  const int n_items = online.num_items();
  const auto B = static_cast<Eigen::Index>(batch.size());
  std::vector<std::vector<ItemId>> states, next_states;
  states.reserve(batch.size());
  next_states.reserve(batch.size());
  for (const auto* t : batch) {
    if (t->action < 0 || t->action >= n_items) throw std::domain_error("td_loss: invalid action");
    states.push_back(t->state);
    next_states.push_back(t->next_state);
  }

  // Online values Q^{tau_k}(s, a) = phi_k^T (s ⊙ e_a).
  nn::EncoderTape tape;
  const Matrix s = nn::encode_states(online.encoder, online.items, states, grad ? &tape : nullptr);
  Matrix pre;
  const Matrix phi = nn::quantile_embedding(taus, online.quantile, &pre);
  Matrix u(s.rows(), B);
  for (Eigen::Index b = 0; b < B; ++b)
    u.col(b) = s.col(b).cwiseProduct(online.items.table.row(batch[static_cast<std::size_t>(b)]->action + 1).transpose());
  const Matrix q = phi.transpose() * u;  // K x B

  // Target action from the online network, value from the target network.
  const Matrix next_mean_q = mean_q_values(online, next_states, taus);
  Matrix probs;
  if (constrained) probs = behavior::behavior_probabilities(*behavior, next_states);
  const Matrix s_next = nn::encode_states(target.encoder, target.items, next_states);
  const Matrix phi_next = nn::quantile_embedding(target_taus, target.quantile);

  TdLossResult result;
  result.target_actions.resize(batch.size());
  const auto K = static_cast<Eigen::Index>(taus.size());
  const auto Kp = static_cast<Eigen::Index>(target_taus.size());
  const double scale = 1.0 / (static_cast<double>(B) * static_cast<double>(K) * static_cast<double>(Kp));
  Matrix d_q = Matrix::Zero(K, B);
  double loss = 0.0;
  for (Eigen::Index b = 0; b < B; ++b) {
    const auto& t = *batch[static_cast<std::size_t>(b)];
    const auto avail = available_items(n_items, t.next_state);
    Vector pcol;
    if (constrained) pcol = probs.col(b);
    const ItemId a_next = select_target_action(next_mean_q.col(b), avail, constrained ? &pcol : nullptr, config.beta);
    result.target_actions[static_cast<std::size_t>(b)] = a_next;
    const Vector su = s_next.col(b).cwiseProduct(target.items.table.row(a_next + 1).transpose());
    const Vector q_next = phi_next.transpose() * su;  // K' values
    const double bootstrap = t.done ? 0.0 : config.gamma;
    for (Eigen::Index k = 0; k < K; ++k) {
      const double tau = taus[static_cast<std::size_t>(k)];
      for (Eigen::Index j = 0; j < Kp; ++j) {
        const double delta = t.reward + bootstrap * q_next(j) - q(k, b);
        loss += quantile_huber(tau, delta, config.kappa);
        d_q(k, b) -= quantile_huber_derivative(tau, delta, config.kappa);
      }
    }
  }
  result.loss = loss * scale;
  if (!std::isfinite(result.loss)) throw DivergenceError("td_loss: non-finite loss");

  if (grad) {
    d_q *= scale;
    const Matrix d_u = phi * d_q;               // d x B
    const Matrix d_phi = u * d_q.transpose();   // d x K
    Matrix d_s(s.rows(), B);
    for (Eigen::Index b = 0; b < B; ++b) {
      const ItemId row = batch[static_cast<std::size_t>(b)]->action + 1;
      d_s.col(b) = d_u.col(b).cwiseProduct(online.items.table.row(row).transpose());
      grad->items.table.row(row) += d_u.col(b).cwiseProduct(s.col(b)).transpose();
    }
    nn::quantile_embedding_backward(taus, pre, d_phi, grad->quantile);
    nn::encode_states_backward(online.encoder, online.items, tape, d_s, grad->encoder, grad->items);
  }
  return result;
}

TdLossResult td_loss(const QNetworkParams& online, const QNetworkParams& target,
                     std::span<const data::Transition> batch, const AgentConfig& config,
                     std::span<const double> taus, std::span<const double> target_taus,
                     const behavior::BehaviorModelParams* behavior, QNetworkParams* grad) {
  std::vector<const data::Transition*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& t : batch) ptrs.push_back(&t);
  return td_loss(online, target, ptrs, config, taus, target_taus, behavior, grad);
}

}  // namespace bcd4rec::agents
