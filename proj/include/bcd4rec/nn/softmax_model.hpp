#pragma once

// Next-item classifier: encodes a state and scores every catalog item by
// s^T e_i, normalized with a softmax over real items. Serves both the
// behavior-cloning model and item-embedding pre-training.

#include <functional>
#include <span>
#include <vector>

#include "bcd4rec/nn/adam.hpp"
#include "bcd4rec/nn/encoder.hpp"

namespace bcd4rec::nn {

struct SoftmaxModelParams {
  EmbeddingTable items;
  EncoderParams encoder;

  int num_items() const { return items.num_items(); }

  template <class F>
  void visit(F&& f) {
    items.visit([&](const std::string& n, Matrix& m) { f("items." + n, m); });
    encoder.visit([&](const std::string& n, Matrix& m) { f("encoder." + n, m); });
  }
};

SoftmaxModelParams init_softmax_model(int num_items, int dim, int layers, Rng& rng);

/// num_items x B logits.
Matrix item_logits(const SoftmaxModelParams& params, std::span<const std::vector<ItemId>> states);

/// Column-wise softmax with max subtraction.
Matrix softmax_columns(const Matrix& logits);

/// Mean negative log-likelihood of `targets`; accumulates its gradient into
/// `grad` when given (the pad row stays zero).
double softmax_nll(const SoftmaxModelParams& params, std::span<const std::vector<ItemId>> states,
                   std::span<const ItemId> targets, SoftmaxModelParams* grad = nullptr);

struct SupervisedExample {
  std::vector<ItemId> state;
  ItemId target = 0;
};

struct SoftmaxTrainConfig {
  int epochs = 5;
  double lr = 0.003;
  int batch_size = 64;
  std::uint64_t seed = 0;
};

/// Shuffled minibatch ADAM over `examples`; returns the mean training NLL of
/// each epoch. `on_epoch(epoch, loss)` is called after every epoch.
std::vector<double> train_softmax_model(SoftmaxModelParams& params, Adam& adam,
                                        std::span<const SupervisedExample> examples,
                                        const SoftmaxTrainConfig& config,
                                        const std::function<void(int, double)>& on_epoch = {});

/// Mean NLL over `examples` evaluated in chunks (no gradient).
double mean_nll(const SoftmaxModelParams& params, std::span<const SupervisedExample> examples,
                int chunk = 256);

struct PretrainConfig {
  int dim = 100;
  int layers = 2;
  int history_len = 10;
  SoftmaxTrainConfig train;
};

struct PretrainResult {
  EmbeddingTable items;
  std::vector<double> epoch_loss;
};

/// Builds (prefix -> next item) examples from positive-interaction sequences,
/// keeping the last `history_len` items of each prefix.
std::vector<SupervisedExample> next_item_examples(std::span<const std::vector<ItemId>> sequences,
                                                  int history_len);

/// Trains a next-item predictor and returns its item embedding table.
/// Throws std::domain_error when the sequences contain no (prefix, next) pair.
PretrainResult pretrain_item_embeddings(std::span<const std::vector<ItemId>> positive_sequences,
                                        int num_items, const PretrainConfig& config);

}  // namespace bcd4rec::nn
