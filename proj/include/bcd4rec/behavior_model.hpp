#pragma once

// Behavior-cloning model M: p_M(a|s) = softmax_a(s^T a) with its own encoder
// and item table, plus the threshold filter that restricts target actions to
// those the logged policy plausibly takes.

#include <span>
#include <vector>

#include "bcd4rec/nn/checkpoint.hpp"
#include "bcd4rec/nn/softmax_model.hpp"
#include "bcd4rec/session.hpp"

namespace bcd4rec::behavior {

using BehaviorModelParams = nn::SoftmaxModelParams;

/// Softmax over all real catalog items (the pad row is not part of the partition).
nn::Vector item_probabilities(const nn::Vector& state_embedding, const nn::EmbeddingTable& items);

double behavior_prob(const nn::Vector& state_embedding, ItemId item, const nn::EmbeddingTable& items);

/// num_items x B matrix of p_M(.|s_b).
nn::Matrix behavior_probabilities(const BehaviorModelParams& params, std::span<const std::vector<ItemId>> states);

/// Items of `available` with probability strictly above `beta`, ascending.
/// When none qualifies, returns the single most probable available item
/// (lowest id on ties). Throws std::domain_error for an empty `available`.
std::vector<ItemId> eligible_actions(const Eigen::Ref<const nn::Vector>& probs, double beta,
                                     std::span<const ItemId> available);

/// (state, action) pairs of every transition, skipped actions included.
std::vector<nn::SupervisedExample> behavior_examples(std::span<const data::Transition> transitions);

struct BehaviorTrainConfig {
  int dim = 100;
  int layers = 2;
  int epochs = 5;
  double lr = 0.003;
  int batch_size = 64;
  std::uint64_t seed = 0;
};

struct BehaviorTrainReport {
  BehaviorModelParams params;
  std::vector<double> train_nll;  // per epoch
  double validation_nll = 0.0;    // NaN when the dataset has no validation part
};

BehaviorTrainReport train_behavior_model(const data::BatchDataset& dataset, const BehaviorTrainConfig& config);

nn::Checkpoint behavior_checkpoint(const BehaviorModelParams& params, const BehaviorTrainConfig& config);
BehaviorModelParams behavior_from_checkpoint(const nn::Checkpoint& checkpoint);

}  // namespace bcd4rec::behavior
