#include "bcd4rec/behavior_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bcd4rec::behavior {

nn::Vector item_probabilities(const nn::Vector& state_embedding, const nn::EmbeddingTable& items) {
  nn::Matrix logits = items.items() * state_embedding;
  return nn::softmax_columns(logits).col(0);
}

double behavior_prob(const nn::Vector& state_embedding, ItemId item, const nn::EmbeddingTable& items) {
  if (item < 0 || item >= items.num_items()) throw std::domain_error("behavior_prob: invalid item");
  return item_probabilities(state_embedding, items)(item);
}

nn::Matrix behavior_probabilities(const BehaviorModelParams& params, std::span<const std::vector<ItemId>> states) {
  return nn::softmax_columns(nn::item_logits(params, states));
}

std::vector<ItemId> eligible_actions(const Eigen::Ref<const nn::Vector>& probs, double beta,
                                     std::span<const ItemId> available) {
  if (available.empty()) throw std::domain_error("eligible_actions: no available items");
  std::vector<ItemId> out;
  ItemId best = available.front();
  double best_p = -std::numeric_limits<double>::infinity();
  for (ItemId a : available) {
    const double p = probs(a);
    if (p > beta) out.push_back(a);
    if (p > best_p || (p == best_p && a < best)) {
      best_p = p;
      best = a;
    }
  }
  if (out.empty()) out.push_back(best);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<nn::SupervisedExample> behavior_examples(std::span<const data::Transition> transitions) {
  std::vector<nn::SupervisedExample> out;
  out.reserve(transitions.size());
  for (const auto& t : transitions) out.push_back({t.state, t.action});
  return out;
}

BehaviorTrainReport train_behavior_model(const data::BatchDataset& dataset, const BehaviorTrainConfig& config) {
  if (dataset.train.empty()) throw std::domain_error("train_behavior_model: empty training split");
  Rng init = Rng::stream(config.seed, "behavior-init");
  BehaviorTrainReport report;
  report.params = nn::init_softmax_model(dataset.num_items, config.dim, config.layers, init);
  nn::Adam adam(nn::AdamConfig{config.lr});
  const auto train = behavior_examples(dataset.train);
  report.train_nll = nn::train_softmax_model(
      report.params, adam, train, nn::SoftmaxTrainConfig{config.epochs, config.lr, config.batch_size, config.seed});
  report.validation_nll = dataset.validation.empty()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : nn::mean_nll(report.params, behavior_examples(dataset.validation));
  return report;
}

nn::Checkpoint behavior_checkpoint(const BehaviorModelParams& params, const BehaviorTrainConfig& config) {
  nn::Checkpoint c;
  c.kind = "behavior";
  c.meta = {{"dim", config.dim}, {"layers", config.layers}, {"items", params.num_items()}};
  c.config_hash = std::to_string(fnv1a64(c.meta.dump()));
  c.put_params("behavior.", const_cast<BehaviorModelParams&>(params));
  return c;
}

BehaviorModelParams behavior_from_checkpoint(const nn::Checkpoint& checkpoint) {
  checkpoint.require_kind("behavior");
  const int dim = checkpoint.meta.at("dim"), layers = checkpoint.meta.at("layers"), items = checkpoint.meta.at("items");
  Rng unused(0);
  BehaviorModelParams p = nn::init_softmax_model(items, dim, layers, unused);
  checkpoint.get_params("behavior.", p);
  return p;
}

}  // namespace bcd4rec::behavior
