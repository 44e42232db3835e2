#pragma once

// Batch training loop: sample a minibatch, pick constrained target actions,
// take an ADAM step on the TD loss, update the behavior model, and copy the
// online network into the target network every target_update_rate steps.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bcd4rec/agents/config.hpp"
#include "bcd4rec/agents/q_network.hpp"
#include "bcd4rec/behavior_model.hpp"
#include "bcd4rec/nn/adam.hpp"
#include "bcd4rec/nn/checkpoint.hpp"
#include "bcd4rec/session.hpp"

namespace bcd4rec::agents {

inline constexpr const char* kAgentCheckpointKind = "agent";

class Learner {
 public:
  /// `pretrained` replaces the initial item embeddings. For batch-constrained
  /// kinds `behavior` is the starting behavior model; without one a freshly
  /// initialized model is used.
  Learner(const data::BatchDataset& dataset, const AgentConfig& config, std::uint64_t seed,
          const nn::EmbeddingTable* pretrained = nullptr,
          const behavior::BehaviorModelParams* behavior = nullptr);

  /// Resumes from a checkpoint written by checkpoint().
  Learner(const data::BatchDataset& dataset, const nn::Checkpoint& checkpoint);

  /// Runs one iteration and returns its TD loss.
  double step();

  std::int64_t iteration() const { return iteration_; }
  const AgentConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  const QNetworkParams& online() const { return online_; }
  const QNetworkParams& target() const { return target_; }
  const std::optional<behavior::BehaviorModelParams>& behavior() const { return behavior_; }
  QAgent agent() const { return QAgent(online_, config_.num_quantiles); }

  /// Minibatch indices and quantile levels used by iteration `t`.
  std::vector<std::size_t> minibatch_indices(std::int64_t t) const;
  void quantile_levels(std::int64_t t, std::vector<double>& taus, std::vector<double>& target_taus) const;

  nn::Checkpoint checkpoint() const;

 private:
  const data::BatchDataset& dataset_;
  AgentConfig config_;
  std::uint64_t seed_ = 0;
  std::int64_t iteration_ = 0;
  QNetworkParams online_;
  QNetworkParams target_;
  std::optional<behavior::BehaviorModelParams> behavior_;
  nn::Adam q_adam_;
  nn::Adam m_adam_;
};

/// Agent stored in a checkpoint, evaluated with fixed quantile midpoints.
QAgent agent_from_checkpoint(const nn::Checkpoint& checkpoint);
AgentConfig agent_config_from_checkpoint(const nn::Checkpoint& checkpoint);

struct CurvePoint {
  std::int64_t iteration = 0;
  double loss = 0.0;   // mean TD loss since the previous point
  double q_bar = 0.0;  // on validation states
};

struct TrainResult {
  nn::Checkpoint checkpoint;
  std::vector<CurvePoint> curve;
};

/// Runs config.iterations steps, recording a curve point every eval_interval
/// iterations and after the last one.
TrainResult train_batch_agent(const data::BatchDataset& dataset, const AgentConfig& config, std::uint64_t seed,
                              const nn::EmbeddingTable* pretrained = nullptr,
                              const behavior::BehaviorModelParams* behavior = nullptr,
                              const std::function<void(const CurvePoint&)>& on_point = {});

/// States used for the training-curve Q estimate: the first `limit` validation
/// states (training states when the validation split is empty; 0 = no limit).
std::vector<std::vector<ItemId>> curve_states(const data::BatchDataset& dataset, int limit);

void write_training_curve(std::span<const CurvePoint> curve, const std::filesystem::path& path);

}  // namespace bcd4rec::agents
