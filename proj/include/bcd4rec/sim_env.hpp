#pragma once

// Interest-evolution user simulator: users carry a latent interest vector over
// item categories, pick between the recommended item and a skip option, and
// reinforce (or dampen) their interest in the category they consume.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "bcd4rec/rng.hpp"
#include "bcd4rec/types.hpp"

namespace bcd4rec::sim {

struct EnvConfig {
  int num_categories = 20;
  int num_items = 200;
  int max_episode_len = 20;
  double y = 0.3;
  std::map<Choice, double> rewards{{Choice::skip, 0.0}, {Choice::click, 4.0}};
  /// Only single-item slates are supported.
  int slate_k = 1;
  std::uint64_t seed = 0;

  int items_per_category() const { return num_items / num_categories; }
  double reward(Choice choice) const;
  /// Throws ConfigError when an invariant is violated.
  void validate() const;
  std::string hash() const;
};

void to_json(nlohmann::json& j, const EnvConfig& config);
void from_json(const nlohmann::json& j, EnvConfig& config);

struct Item {
  ItemId id = 0;
  int category = 0;
};

struct UserState {
  std::vector<double> interests;
  int steps_taken = 0;
  std::set<ItemId> clicked_items;

  /// Category with the largest interest; lowest index on ties.
  int top_category() const;
};

struct StepOutcome {
  Choice choice = Choice::skip;
  std::optional<ItemId> chosen_item;
  double reward = 0.0;
  bool done = false;
};

/// Evenly partitions items into contiguous category blocks.
std::vector<Item> make_catalog(const EnvConfig& config);

/// u^T i for the item's one-hot category vector.
double relevance(const UserState& user, const Item& item);

/// Second-largest relevance over the catalog (equals the largest when the
/// best category holds two or more items).
double skip_score(const UserState& user, std::span<const Item> catalog);

/// Maps [-1,1] relevance scores to [0,1].
inline double shift_score(double x) { return 0.5 * (x + 1.0); }

/// Choice distribution over slate items followed by the skip option (last entry).
std::vector<double> choice_probabilities(const UserState& user, std::span<const Item> slate,
                                         double skip_relevance);

/// Interest evolution for the consumed item's category.
void update_interest(UserState& user, const Item& consumed, double y, Rng& rng);

/// One simulator instance. Each episode draws its user, choices and interest
/// updates from streams keyed by (seed, episode index), so episode k is
/// reproducible independently of what ran before it.
class Environment {
 public:
  Environment(EnvConfig config, std::uint64_t seed);
  explicit Environment(EnvConfig config) : Environment(config, config.seed) {}

  const EnvConfig& config() const { return config_; }
  std::span<const Item> catalog() const { return catalog_; }
  const Item& item(ItemId id) const;
  int num_items() const { return config_.num_items; }

  /// Starts the next episode (episode counter advances).
  UserState reset();
  UserState reset(std::uint64_t episode);

  double relevance(const UserState& user, ItemId id) const { return sim::relevance(user, item(id)); }
  double skip_score(const UserState& user) const { return sim::skip_score(user, catalog_); }

  StepOutcome step(UserState& user, ItemId recommended);
  StepOutcome step(UserState& user, std::span<const ItemId> slate);

 private:
  EnvConfig config_;
  std::uint64_t seed_;
  std::vector<Item> catalog_;
  std::uint64_t next_episode_ = 0;
  Rng choice_rng_;
  Rng interest_rng_;
};

}  // namespace bcd4rec::sim
