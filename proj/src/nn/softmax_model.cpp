#include "bcd4rec/nn/softmax_model.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bcd4rec::nn {

SoftmaxModelParams init_softmax_model(int num_items, int dim, int layers, Rng& rng) {
  SoftmaxModelParams p;
  p.items = init_embeddings(num_items, dim, rng);
  p.encoder = init_encoder(dim, layers, rng);
  return p;
}

Matrix item_logits(const SoftmaxModelParams& params, std::span<const std::vector<ItemId>> states) {
  const Matrix s = encode_states(params.encoder, params.items, states);
  return params.items.items() * s;
}

Matrix softmax_columns(const Matrix& logits) {
  Matrix p = logits;
  for (Eigen::Index b = 0; b < p.cols(); ++b) {
    const double mx = p.col(b).maxCoeff();
    p.col(b) = (p.col(b).array() - mx).exp().matrix();
    p.col(b) /= p.col(b).sum();
  }
  return p;
}

double softmax_nll(const SoftmaxModelParams& params, std::span<const std::vector<ItemId>> states,
                   std::span<const ItemId> targets, SoftmaxModelParams* grad) {
  if (states.size() != targets.size()) throw std::invalid_argument("softmax_nll: states/targets size mismatch");
  if (states.empty()) throw std::invalid_argument("softmax_nll: empty batch");
  const int n_items = params.num_items();
  for (ItemId t : targets)
    if (t < 0 || t >= n_items) throw std::domain_error("softmax_nll: invalid target item " + std::to_string(t));

  EncoderTape tape;
  const Matrix s = encode_states(params.encoder, params.items, states, grad ? &tape : nullptr);
  const auto rows = params.items.items();
  const Matrix logits = rows * s;
  const Matrix p = softmax_columns(logits);
  const double batch = static_cast<double>(states.size());

  double loss = 0.0;
  for (Eigen::Index b = 0; b < logits.cols(); ++b) {
    const double mx = logits.col(b).maxCoeff();
    const double lse = mx + std::log((logits.col(b).array() - mx).exp().sum());
    loss += lse - logits(targets[static_cast<std::size_t>(b)], b);
  }
  loss /= batch;

  if (grad) {
    Matrix d_logits = p;
    for (Eigen::Index b = 0; b < d_logits.cols(); ++b) d_logits(targets[static_cast<std::size_t>(b)], b) -= 1.0;
    d_logits /= batch;
    grad->items.items().noalias() += d_logits * s.transpose();
    const Matrix d_s = rows.transpose() * d_logits;
    encode_states_backward(params.encoder, params.items, tape, d_s, grad->encoder, grad->items);
    mask_pad_row(grad->items);
  }
  return loss;
}

std::vector<double> train_softmax_model(SoftmaxModelParams& params, Adam& adam,
                                        std::span<const SupervisedExample> examples,
                                        const SoftmaxTrainConfig& config,
                                        const std::function<void(int, double)>& on_epoch) {
  if (examples.empty()) throw std::domain_error("train_softmax_model: no training examples");
  std::vector<std::size_t> order(examples.size());
  std::vector<double> history;
  const auto param_refs = named_refs(params);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = Rng::stream(config.seed, "softmax-shuffle", static_cast<std::uint64_t>(epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<std::vector<ItemId>> states;
      std::vector<ItemId> targets;
      for (std::size_t k = start; k < end; ++k) {
        states.push_back(examples[order[k]].state);
        targets.push_back(examples[order[k]].target);
      }
      SoftmaxModelParams grad = zeros_like(params);
      const double loss = softmax_nll(params, states, targets, &grad);
      total += loss * static_cast<double>(end - start);
      adam.step(param_refs, named_refs(grad));
    }
    history.push_back(total / static_cast<double>(order.size()));
    if (on_epoch) on_epoch(epoch, history.back());
  }
  return history;
}

double mean_nll(const SoftmaxModelParams& params, std::span<const SupervisedExample> examples, int chunk) {
  if (examples.empty()) throw std::domain_error("mean_nll: no examples");
  double total = 0.0;
  for (std::size_t start = 0; start < examples.size(); start += static_cast<std::size_t>(chunk)) {
    const std::size_t end = std::min(examples.size(), start + static_cast<std::size_t>(chunk));
    std::vector<std::vector<ItemId>> states;
    std::vector<ItemId> targets;
    for (std::size_t k = start; k < end; ++k) {
      states.push_back(examples[k].state);
      targets.push_back(examples[k].target);
    }
    total += softmax_nll(params, states, targets) * static_cast<double>(end - start);
  }
  return total / static_cast<double>(examples.size());
}

std::vector<SupervisedExample> next_item_examples(std::span<const std::vector<ItemId>> sequences,
                                                  int history_len) {
  std::vector<SupervisedExample> out;
  for (const auto& seq : sequences) {
    for (std::size_t t = 1; t < seq.size(); ++t) {
      const std::size_t begin = t > static_cast<std::size_t>(history_len) ? t - history_len : 0;
      out.push_back({std::vector<ItemId>(seq.begin() + static_cast<std::ptrdiff_t>(begin),
                                         seq.begin() + static_cast<std::ptrdiff_t>(t)),
                     seq[t]});
    }
  }
  return out;
}

PretrainResult pretrain_item_embeddings(std::span<const std::vector<ItemId>> positive_sequences,
                                        int num_items, const PretrainConfig& config) {
  const auto examples = next_item_examples(positive_sequences, config.history_len);
  if (examples.empty())
    throw std::domain_error("pretrain_item_embeddings: no positive-interaction pairs to learn from");
  Rng init = Rng::stream(config.train.seed, "pretrain-init");
  SoftmaxModelParams model = init_softmax_model(num_items, config.dim, config.layers, init);
  Adam adam(AdamConfig{config.train.lr});
  PretrainResult result;
  result.epoch_loss = train_softmax_model(model, adam, examples, config.train);
  result.items = std::move(model.items);
  mask_pad_row(result.items);
  return result;
}

}  // namespace bcd4rec::nn
