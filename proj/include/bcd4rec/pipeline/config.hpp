#pragma once

// Experiment configuration: one JSON document describing every stage of a
// run. Unset keys take their defaults; stage seeds derive from `seed` unless
// listed under "seeds".

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "bcd4rec/agents/config.hpp"
#include "bcd4rec/behavior_model.hpp"
#include "bcd4rec/nn/softmax_model.hpp"
#include "bcd4rec/online_train.hpp"
#include "bcd4rec/sim_env.hpp"

namespace bcd4rec::pipeline {

/// Environment variable naming the root for relative output directories.
inline constexpr const char* kOutputRootEnv = "BCD4REC_OUTPUT_ROOT";

struct AgentSpec {
  std::string label;
  agents::AgentConfig config;
  bool pretrained = true;
};

struct EvalSpec {
  int n_users = 200;
  std::vector<int> coverage_x{1, 3, 5, 10};
  std::vector<int> recall_x{1, 3, 5, 10};
  int q_bar_states = 1000;
  int return_groups = 3;
  int return_users = 50;
  int return_horizon = 20;
  double return_gamma = 0.9;
};

struct SweepSpec {
  std::string kind = "BCD4Rec";
  std::vector<double> beta{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<int> n{32, 64, 128};
  std::vector<int> k{5, 7, 10};
  /// Iterations per grid point (0 = the agent default).
  std::int64_t iterations = 0;
  bool allow_out_of_range = false;
  int recall_x = 3;
};

struct ExperimentConfig {
  sim::EnvConfig env;
  /// Behavior policy that generates the batch: RecSim-1 (random),
  /// RecSim-2 (early IQN snapshot) or RecSim-3 (late IQN snapshot).
  std::string behavior_tag = "RecSim-2";
  /// Train the online IQN whose snapshots define RecSim-2/3.
  bool online_behavior = true;
  policies::OnlineTrainConfig online;
  int sessions = 2000;
  double validation_fraction = 0.2;
  int history_len = 10;
  bool pretrain = true;
  nn::PretrainConfig pretrain_config;
  behavior::BehaviorTrainConfig behavior_model;
  std::vector<AgentSpec> agents;
  EvalSpec eval;
  SweepSpec sweep;
  std::uint64_t seed = 0;
  std::map<std::string, std::uint64_t> seed_overrides;
  std::filesystem::path output_dir = "runs/default";

  /// Seed of a named stage.
  std::uint64_t stage_seed(const std::string& stage) const;
  /// Throws ConfigError listing the first violated constraint.
  void validate() const;
  /// Hash over the JSON sections a stage depends on.
  std::string stage_hash(const std::string& stage) const;
  const AgentSpec& agent(const std::string& label) const;
};

/// Defaults: all six agent kinds, dimension 100 everywhere.
ExperimentConfig default_config();

nlohmann::json to_json(const ExperimentConfig& config);
/// Parses a config document; unknown top-level keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies "a.b.c=value" assignments (value parsed as JSON, else taken as a string).
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& assignments);

/// Output directory after resolving a relative path against $BCD4REC_OUTPUT_ROOT.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

std::string hex64(std::uint64_t v);

}  // namespace bcd4rec::pipeline
