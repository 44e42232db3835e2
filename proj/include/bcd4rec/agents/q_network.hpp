#pragma once

// Quantile action-value network Q^tau(s, a) = (s ⊙ phi(tau))^T a and the
// greedy/constrained action selection built on it.

#include <span>
#include <vector>

#include "bcd4rec/nn/encoder.hpp"
#include "bcd4rec/nn/quantile.hpp"

namespace bcd4rec::agents {

using nn::Matrix;
using nn::Vector;

struct QNetworkParams {
  nn::EmbeddingTable items;
  nn::EncoderParams encoder;
  nn::QuantileEmbeddingParams quantile;

  int num_items() const { return items.num_items(); }
  int dim() const { return items.dim(); }

  template <class F>
  void visit(F&& f) {
    items.visit([&](const std::string& n, Matrix& m) { f("items." + n, m); });
    encoder.visit([&](const std::string& n, Matrix& m) { f("encoder." + n, m); });
    quantile.visit([&](const std::string& n, Matrix& m) { f("quantile." + n, m); });
  }
};

QNetworkParams init_q_network(int num_items, int dim, int layers, int num_cosines, Rng& rng);

/// num_items x B matrix of (1/K) sum_k Q^{tau_k}(s_b, a).
Matrix mean_q_values(const QNetworkParams& params, std::span<const std::vector<ItemId>> states,
                     std::span<const double> taus);

/// Catalog items not contained in `exclude`, ascending.
std::vector<ItemId> available_items(int num_items, std::span<const ItemId> exclude);

/// Argmax of `values` over `available`; ties go to the lowest id.
/// Throws std::domain_error for an empty `available`.
ItemId argmax_over(const Eigen::Ref<const Vector>& values, std::span<const ItemId> available);

/// The `count` best items of `available` by descending value (lowest id first on ties).
std::vector<ItemId> top_items(const Eigen::Ref<const Vector>& values, std::span<const ItemId> available,
                              std::size_t count);

/// Target action: argmax of the mean online value restricted to
/// eligible_actions(behavior_probs, beta). A null `behavior_probs` or
/// beta <= 0 leaves the argmax unconstrained.
ItemId select_target_action(const Eigen::Ref<const Vector>& mean_q, std::span<const ItemId> available,
                            const Vector* behavior_probs, double beta);

/// Read-only evaluation view of a trained network using fixed quantile midpoints.
class QAgent {
 public:
  QAgent(QNetworkParams params, int num_quantiles);

  const QNetworkParams& params() const { return params_; }
  const std::vector<double>& eval_taus() const { return taus_; }
  int num_items() const { return params_.num_items(); }

  Matrix mean_q(std::span<const std::vector<ItemId>> states) const;
  Vector mean_q(const std::vector<ItemId>& state) const;

  ItemId greedy_action(const std::vector<ItemId>& state, std::span<const ItemId> available) const;

 private:
  QNetworkParams params_;
  std::vector<double> taus_;
  Vector mean_phi_;
};

}  // namespace bcd4rec::agents

namespace bcd4rec::agents {

/// Mean over `states` of the evaluation-time value of the greedy action,
/// where each state's available items exclude the items it contains.
/// Throws std::domain_error for an empty state list.
double q_bar(const QAgent& agent, std::span<const std::vector<ItemId>> states);

}  // namespace bcd4rec::agents
