#pragma once

// Online (simulator) and offline (logged data) evaluation metrics, return
// distribution distances, popularity skew and correlation analysis.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcd4rec/agents/q_network.hpp"
#include "bcd4rec/policies.hpp"
#include "bcd4rec/session.hpp"
#include "bcd4rec/sim_env.hpp"

namespace bcd4rec::eval {

struct OnlineEvalOptions {
  int n_users = 200;
  std::vector<int> coverage_x{1, 3, 5, 10};
  Choice target = Choice::click;
  int history_len = 10;
  std::uint64_t seed = 0;
  /// Worker threads; results do not depend on this value.
  int workers = 1;
};

struct OnlineEvalReport {
  std::string policy;
  double ctr = 0.0;  // percentage of responses equal to the target choice
  std::map<int, double> coverage;  // X -> percentage of the catalog
  std::vector<double> episode_returns;
  std::vector<std::int64_t> item_counts;  // shown item per step
  std::int64_t steps = 0;
  double category_accuracy = 0.0;  // percentage
};

/// Percentage of `responses` equal to `target`; 0 for an empty list.
double response_rate(std::span<const Choice> responses, Choice target);

/// Runs `n_users` fresh evaluation users (the same users for every policy
/// given the same seed) and aggregates CTR, Coverage@X, returns, item counts
/// and category accuracy. The simulator is only observed, never altered.
OnlineEvalReport online_eval(const policies::Policy& policy, const sim::EnvConfig& env_config,
                             const OnlineEvalOptions& options);

/// Percentage of steps whose shown item belongs to the user's current
/// top-interest category.
double category_accuracy(const policies::Policy& policy, const sim::EnvConfig& env_config, int n_users,
                         std::uint64_t seed);

/// Scores every catalog item for each state: num_items x B.
using Scorer = std::function<agents::Matrix(std::span<const std::vector<ItemId>>)>;

struct RecallPoint {
  std::vector<ItemId> state;
  std::vector<ItemId> excluded;  // items already consumed in the session
  ItemId truth = 0;
};

/// One point per positive step of each session: the state holds the last
/// `history_len` earlier positives and the truth is the item at that step.
std::vector<RecallPoint> recall_points(std::span<const data::SessionLog> sessions, int history_len);

/// X -> percentage of points whose truth ranks within the top X of the
/// available items. Throws std::domain_error without points.
std::map<int, double> recall_at_x(const Scorer& scorer, std::span<const RecallPoint> points, int num_items,
                                  std::span<const int> xs);

struct OfflineEvalReport {
  std::map<int, double> recall;
  double q_bar = 0.0;
  std::string validation_id;
};

OfflineEvalReport offline_eval(const agents::QAgent& agent, const data::BatchDataset& dataset,
                               std::span<const int> xs, int q_bar_states = 0);

/// 1-Wasserstein distance between empirical distributions. Throws
/// std::domain_error on empty input.
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

/// sum_i sum_j |f_i - f_j| / (2 n sum f); 0 when all frequencies are zero.
double gini(std::span<const double> frequencies);

struct PopularityCurve {
  std::string policy;
  std::vector<double> sorted_frequencies;  // descending, one entry per catalog item
  double gini = 0.0;
};

std::vector<PopularityCurve> popularity_report(std::span<const OnlineEvalReport> reports);
void write_popularity_csv(std::span<const PopularityCurve> curves, const std::filesystem::path& path);

enum class CorrelationMode { value, rank };

/// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> average_ranks(std::span<const double> xs);

/// Pearson coefficient of (xs, ys) or of their ranks. Empty when either input
/// is constant. Throws std::domain_error for mismatched sizes or fewer than 3 points.
std::optional<double> correlation(std::span<const double> xs, std::span<const double> ys, CorrelationMode mode);

}  // namespace bcd4rec::eval
