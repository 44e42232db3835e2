#include "bcd4rec/agents/q_network.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "bcd4rec/behavior_model.hpp"

namespace bcd4rec::agents {

QNetworkParams init_q_network(int num_items, int dim, int layers, int num_cosines, Rng& rng) {
  QNetworkParams p;
  p.items = nn::init_embeddings(num_items, dim, rng);
  p.encoder = nn::init_encoder(dim, layers, rng);
  p.quantile = nn::init_quantile_embedding(num_cosines, dim, rng);
  return p;
}

Matrix mean_q_values(const QNetworkParams& params, std::span<const std::vector<ItemId>> states,
                     std::span<const double> taus) {
  const Matrix s = nn::encode_states(params.encoder, params.items, states);
  const Vector mean_phi = nn::quantile_embedding(taus, params.quantile).rowwise().mean();
  const Matrix scaled = s.array().colwise() * mean_phi.array();
  return params.items.items() * scaled;
}

std::vector<ItemId> available_items(int num_items, std::span<const ItemId> exclude) {
  std::vector<char> taken(static_cast<std::size_t>(num_items), 0);
  for (ItemId i : exclude)
    if (i >= 0 && i < num_items) taken[static_cast<std::size_t>(i)] = 1;
  std::vector<ItemId> out;
  out.reserve(static_cast<std::size_t>(num_items));
  for (ItemId i = 0; i < num_items; ++i)
    if (!taken[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

ItemId argmax_over(const Eigen::Ref<const Vector>& values, std::span<const ItemId> available) {
  if (available.empty()) throw std::domain_error("argmax over an empty action set");
  ItemId best = available.front();
  for (ItemId a : available)
    if (values(a) > values(best) || (values(a) == values(best) && a < best)) best = a;
  return best;
}

std::vector<ItemId> top_items(const Eigen::Ref<const Vector>& values, std::span<const ItemId> available,
                              std::size_t count) {
  std::vector<ItemId> order(available.begin(), available.end());
  count = std::min(count, order.size());
  auto better = [&](ItemId a, ItemId b) { return values(a) > values(b) || (values(a) == values(b) && a < b); };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(), better);
  order.resize(count);
  return order;
}

ItemId select_target_action(const Eigen::Ref<const Vector>& mean_q, std::span<const ItemId> available,
                            const Vector* behavior_probs, double beta) {
  if (!behavior_probs || beta <= 0.0) return argmax_over(mean_q, available);
  const auto eligible = behavior::eligible_actions(*behavior_probs, beta, available);
  return argmax_over(mean_q, eligible);
}

QAgent::QAgent(QNetworkParams params, int num_quantiles)
    : params_(std::move(params)), taus_(nn::quantile_midpoints(num_quantiles)) {
  mean_phi_ = nn::quantile_embedding(taus_, params_.quantile).rowwise().mean();
}

Matrix QAgent::mean_q(std::span<const std::vector<ItemId>> states) const {
  const Matrix s = nn::encode_states(params_.encoder, params_.items, states);
  const Matrix scaled = s.array().colwise() * mean_phi_.array();
  return params_.items.items() * scaled;
}

Vector QAgent::mean_q(const std::vector<ItemId>& state) const {
  return mean_q(std::span<const std::vector<ItemId>>(&state, 1)).col(0);
}

ItemId QAgent::greedy_action(const std::vector<ItemId>& state, std::span<const ItemId> available) const {
  if (available.empty()) throw std::domain_error("greedy_action: no available items");
  return argmax_over(mean_q(state), available);
}

}  // namespace bcd4rec::agents

namespace bcd4rec::agents {

double q_bar(const QAgent& agent, std::span<const std::vector<ItemId>> states) {
  if (states.empty()) throw std::domain_error("q_bar: no validation states");
  constexpr std::size_t kChunk = 256;
  double sum = 0.0;
  for (std::size_t begin = 0; begin < states.size(); begin += kChunk) {
    const auto chunk = states.subspan(begin, std::min(kChunk, states.size() - begin));
    const Matrix q = agent.mean_q(chunk);
    for (std::size_t b = 0; b < chunk.size(); ++b) {
      const auto avail = available_items(agent.num_items(), chunk[b]);
      const auto col = q.col(static_cast<Eigen::Index>(b));
      sum += col(argmax_over(col, avail));
    }
  }
  return sum / static_cast<double>(states.size());
}

}  // namespace bcd4rec::agents
