#include "bcd4rec/sim_env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "bcd4rec/errors.hpp"

namespace bcd4rec::sim {

double EnvConfig::reward(Choice choice) const {
  auto it = rewards.find(choice);
  if (it == rewards.end())
    throw ConfigError("no reward configured for choice '" + std::string(to_string(choice)) + "'");
  return it->second;
}

void EnvConfig::validate() const {
  if (num_categories <= 0) throw ConfigError("categories must be positive");
  if (num_items <= 0) throw ConfigError("items must be positive");
  if (num_items % num_categories != 0)
    throw ConfigError("categories (" + std::to_string(num_categories) + ") must divide items (" +
                      std::to_string(num_items) + ")");
  if (max_episode_len < 1) throw ConfigError("max_steps must be >= 1");
  if (!(y >= 0.0 && y <= 1.0)) throw ConfigError("y must lie in [0,1]");
  if (slate_k != 1) throw ConfigError("only slate size 1 is supported");
  if (!rewards.count(Choice::skip) || !rewards.count(Choice::click))
    throw ConfigError("rewards must define skip and click");
}

std::string EnvConfig::hash() const {
  nlohmann::json j = *this;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

void to_json(nlohmann::json& j, const EnvConfig& c) {
  nlohmann::json rewards = nlohmann::json::object();
  for (const auto& [choice, r] : c.rewards) rewards[std::string(to_string(choice))] = r;
  j = {{"categories", c.num_categories}, {"items", c.num_items}, {"max_steps", c.max_episode_len},
       {"y", c.y}, {"rewards", rewards}, {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, EnvConfig& c) {
  try {
    c = EnvConfig{};
    c.num_categories = j.value("categories", c.num_categories);
    c.num_items = j.value("items", c.num_items);
    c.max_episode_len = j.value("max_steps", c.max_episode_len);
    c.y = j.value("y", c.y);
    c.seed = j.value("seed", c.seed);
    if (j.contains("rewards")) {
      c.rewards.clear();
      for (const auto& [label, r] : j.at("rewards").items())
        c.rewards[choice_from_string(label)] = r.get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("env config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("env config: ") + e.what());
  }
}

int UserState::top_category() const {
  return static_cast<int>(std::max_element(interests.begin(), interests.end()) - interests.begin());
}

std::vector<Item> make_catalog(const EnvConfig& config) {
  config.validate();
  const int per = config.items_per_category();
  std::vector<Item> items(static_cast<std::size_t>(config.num_items));
  for (int i = 0; i < config.num_items; ++i) items[i] = Item{i, i / per};
  return items;
}

double relevance(const UserState& user, const Item& item) {
  if (item.category < 0 || item.category >= static_cast<int>(user.interests.size()))
    throw std::domain_error("relevance: item category out of range");
  return user.interests[static_cast<std::size_t>(item.category)];
}

double skip_score(const UserState& user, std::span<const Item> catalog) {
  if (catalog.size() < 2) throw std::domain_error("skip_score: catalog needs at least two items");
  double best = -std::numeric_limits<double>::infinity();
  double second = best;
  for (const Item& item : catalog) {
    const double r = relevance(user, item);
    if (r > best) {
      second = best;
      best = r;
    } else if (r > second) {
      second = r;
    }
  }
  return second;
}

std::vector<double> choice_probabilities(const UserState& user, std::span<const Item> slate,
                                         double skip_relevance) {
  if (slate.empty()) throw std::domain_error("choice_probabilities: empty slate");
  std::vector<double> p;
  p.reserve(slate.size() + 1);
  for (const Item& item : slate) p.push_back(shift_score(relevance(user, item)));
  p.push_back(shift_score(skip_relevance));
  double total = 0.0;
  for (double x : p) total += x;
  if (total <= 0.0) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return p;
  }
  for (double& x : p) x /= total;
  return p;
}

void update_interest(UserState& user, const Item& consumed, double y, Rng& rng) {
  const double current = relevance(user, consumed);
  const double delta = (-y * std::abs(current) + y) * (1.0 - current);
  const bool reinforce = rng.bernoulli(shift_score(current));
  const double next = reinforce ? current + delta : current - delta;
  // For y > 0.5 the decrement can overshoot -1 near the lower boundary.
  user.interests[static_cast<std::size_t>(consumed.category)] = std::clamp(next, -1.0, 1.0);
}

Environment::Environment(EnvConfig config, std::uint64_t seed)
    : config_(std::move(config)), seed_(seed), catalog_(make_catalog(config_)) {}

const Item& Environment::item(ItemId id) const {
  if (id < 0 || id >= config_.num_items)
    throw std::domain_error("invalid item id " + std::to_string(id));
  return catalog_[static_cast<std::size_t>(id)];
}

UserState Environment::reset() { return reset(next_episode_); }

UserState Environment::reset(std::uint64_t episode) {
  next_episode_ = episode + 1;
  Rng user_rng = Rng::stream(seed_, "user", episode);
  choice_rng_ = Rng::stream(seed_, "choice", episode);
  interest_rng_ = Rng::stream(seed_, "interest", episode);
  UserState user;
  user.interests.resize(static_cast<std::size_t>(config_.num_categories));
  for (double& v : user.interests) v = user_rng.uniform(-1.0, 1.0);
  return user;
}

StepOutcome Environment::step(UserState& user, ItemId recommended) {
  return step(user, std::span<const ItemId>(&recommended, 1));
}

StepOutcome Environment::step(UserState& user, std::span<const ItemId> slate) {
  if (static_cast<int>(slate.size()) != config_.slate_k)
    throw std::domain_error("env_step: slate size must equal slate_k");
  if (user.steps_taken >= config_.max_episode_len)
    throw std::domain_error("env_step: episode already finished");
  std::vector<Item> items;
  items.reserve(slate.size());
  for (ItemId id : slate) {
    if (user.clicked_items.count(id))
      throw std::domain_error("env_step: item " + std::to_string(id) + " was already clicked");
    items.push_back(item(id));
  }
  const auto probs = choice_probabilities(user, items, skip_score(user));
  const double u = choice_rng_.uniform();
  std::size_t pick = probs.size() - 1;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) {
      pick = k;
      break;
    }
  }

  StepOutcome out;
  if (pick + 1 < probs.size()) {
    const Item& chosen = items[pick];
    out.choice = Choice::click;
    out.chosen_item = chosen.id;
    update_interest(user, chosen, config_.y, interest_rng_);
    user.clicked_items.insert(chosen.id);
  }
  out.reward = config_.reward(out.choice);
  ++user.steps_taken;
  out.done = user.steps_taken >= config_.max_episode_len;
  return out;
}

}  // namespace bcd4rec::sim
