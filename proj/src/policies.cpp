#include "bcd4rec/policies.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "bcd4rec/agents/learner.hpp"
#include "bcd4rec/errors.hpp"
#include "bcd4rec/nn/checkpoint.hpp"

namespace bcd4rec::policies {

namespace {

std::vector<ItemId> random_ranking(std::span<const ItemId> available, Rng& rng, std::size_t count) {
  std::vector<ItemId> pool(available.begin(), available.end());
  count = std::min(count, pool.size());
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

std::vector<ItemId> ranking_by(const std::vector<double>& scores, std::span<const ItemId> available,
                               std::size_t count) {
  const Eigen::Map<const agents::Vector> v(scores.data(), static_cast<Eigen::Index>(scores.size()));
  return agents::top_items(v, available, count);
}

}  // namespace

std::vector<ItemId> Policy::recommend(const Observation& obs, std::span<const ItemId> available, Rng& rng,
                                      std::size_t count) const {
  if (available.empty()) throw std::domain_error(name() + ": no available items");
  if (count == 0) count = 1;
  return rank(obs, available, rng, count);
}

std::vector<ItemId> RandomPolicy::rank(const Observation&, std::span<const ItemId> available, Rng& rng,
                                       std::size_t count) const {
  return random_ranking(available, rng, count);
}

std::vector<ItemId> MostPopPolicy::rank(const Observation&, std::span<const ItemId> available, Rng&,
                                        std::size_t count) const {
  for (ItemId a : available)
    if (a < 0 || static_cast<std::size_t>(a) >= freq_.size())
      throw std::domain_error("mostpop: item outside the frequency table");
  return ranking_by(freq_, available, count);
}

std::vector<ItemId> OraclePolicy::rank(const Observation& obs, std::span<const ItemId> available, Rng&,
                                       std::size_t count) const {
  if (!obs.user) throw std::invalid_argument("oracle policy needs the true user state");
  std::vector<double> scores(catalog_.size(), 0.0);
  for (ItemId a : available) {
    if (a < 0 || static_cast<std::size_t>(a) >= catalog_.size()) throw std::domain_error("oracle: unknown item");
    scores[static_cast<std::size_t>(a)] = sim::relevance(*obs.user, catalog_[static_cast<std::size_t>(a)]);
  }
  return ranking_by(scores, available, count);
}

AgentPolicy::AgentPolicy(std::shared_ptr<const agents::QAgent> agent, double epsilon, std::string label)
    : agent_(std::move(agent)), epsilon_(epsilon), label_(std::move(label)) {
  if (!agent_) throw std::invalid_argument("AgentPolicy: null agent");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0,1]");
}

std::vector<ItemId> AgentPolicy::rank(const Observation& obs, std::span<const ItemId> available, Rng& rng,
                                      std::size_t count) const {
  if (epsilon_ > 0.0 && rng.bernoulli(epsilon_)) return random_ranking(available, rng, count);
  const std::vector<ItemId> history(obs.history.begin(), obs.history.end());
  return agents::top_items(agent_->mean_q(history), available, count);
}

void EpsilonSchedule::validate() const {
  if (!(end >= 0.0 && end <= start && start <= 1.0)) throw ConfigError("epsilon schedule needs 0 <= end <= start <= 1");
  if (decay_steps < 1) throw ConfigError("epsilon schedule needs decay_steps > 0");
}

double epsilon_at(const EpsilonSchedule& s, std::int64_t step) {
  if (step < 0) throw std::domain_error("epsilon_at: negative step");
  if (step >= s.decay_steps) return s.end;
  const double frac = static_cast<double>(step) / static_cast<double>(s.decay_steps);
  return s.start + (s.end - s.start) * frac;
}

void PolicyHandle::validate() const {
  if (kind == PolicyKind::agent_checkpoint && (!checkpoint_ref || checkpoint_ref->empty()))
    throw ConfigError("agent_checkpoint policy requires a checkpoint reference");
  if (epsilon_schedule) epsilon_schedule->validate();
  if (epsilon && !(*epsilon >= 0.0 && *epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0,1]");
}

namespace {

constexpr std::pair<PolicyKind, const char*> kKindNames[] = {{PolicyKind::random, "random"},
                                                             {PolicyKind::mostpop, "mostpop"},
                                                             {PolicyKind::oracle, "oracle"},
                                                             {PolicyKind::agent_checkpoint, "agent_checkpoint"}};

}  // namespace

void to_json(nlohmann::json& j, const EpsilonSchedule& s) {
  j = {{"start", s.start}, {"end", s.end}, {"decay_steps", s.decay_steps}};
}

void from_json(const nlohmann::json& j, EpsilonSchedule& s) {
  s.start = j.value("start", s.start);
  s.end = j.value("end", s.end);
  s.decay_steps = j.value("decay_steps", s.decay_steps);
}

void to_json(nlohmann::json& j, const PolicyHandle& h) {
  for (const auto& [k, n] : kKindNames)
    if (k == h.kind) j = {{"kind", n}};
  if (h.checkpoint_ref) j["checkpoint"] = *h.checkpoint_ref;
  if (h.epsilon_schedule) j["epsilon_schedule"] = *h.epsilon_schedule;
  if (h.epsilon) j["epsilon"] = *h.epsilon;
}

void from_json(const nlohmann::json& j, PolicyHandle& h) {
  h = PolicyHandle{};
  const std::string kind = j.at("kind").get<std::string>();
  bool found = false;
  for (const auto& [k, n] : kKindNames)
    if (kind == n) {
      h.kind = k;
      found = true;
    }
  if (!found) throw ConfigError("unknown policy kind '" + kind + "'");
  if (j.contains("checkpoint")) h.checkpoint_ref = j["checkpoint"].get<std::string>();
  if (j.contains("epsilon_schedule")) h.epsilon_schedule = j["epsilon_schedule"].get<EpsilonSchedule>();
  if (j.contains("epsilon")) h.epsilon = j["epsilon"].get<double>();
}

std::unique_ptr<Policy> make_policy(const PolicyHandle& handle, const PolicyContext& context) {
  handle.validate();
  switch (handle.kind) {
    case PolicyKind::random:
      return std::make_unique<RandomPolicy>();
    case PolicyKind::mostpop:
      if (context.item_frequencies.empty()) throw ConfigError("mostpop policy needs item frequencies");
      return std::make_unique<MostPopPolicy>(context.item_frequencies);
    case PolicyKind::oracle:
      if (context.catalog.empty()) throw ConfigError("oracle policy needs the catalog");
      return std::make_unique<OraclePolicy>(context.catalog);
    case PolicyKind::agent_checkpoint: {
      std::filesystem::path path(*handle.checkpoint_ref);
      if (path.is_relative() && !context.checkpoint_root.empty()) path = context.checkpoint_root / path;
      const nn::Checkpoint ckpt = nn::checkpoint_load(path);
      double eps = handle.epsilon.value_or(ckpt.meta.value("epsilon", 0.0));
      auto agent = std::make_shared<const agents::QAgent>(agents::agent_from_checkpoint(ckpt));
      return std::make_unique<AgentPolicy>(std::move(agent), eps, path.stem().string());
    }
  }
  throw ConfigError("unhandled policy kind");
}

data::SessionLog run_episode(sim::Environment& env, const Policy& policy, std::uint64_t episode,
                             const EpisodeOptions& options, const std::function<void(const StepView&)>& observer) {
  sim::UserState user = env.reset(episode);
  data::SessionLog log;
  log.session_id = std::to_string(episode);
  std::vector<ItemId> positives;
  std::vector<ItemId> available;
  const int n_items = env.num_items();
  for (int step = 0;; ++step) {
    available.clear();
    for (ItemId i = 0; i < n_items; ++i)
      if (!user.clicked_items.contains(i)) available.push_back(i);
    const std::size_t from = positives.size() > static_cast<std::size_t>(options.history_len)
                                 ? positives.size() - static_cast<std::size_t>(options.history_len)
                                 : 0;
    const Observation obs{std::span<const ItemId>(positives).subspan(from), &user};
    Rng rng = Rng::stream(options.policy_seed, "policy", (episode << 16) | static_cast<std::uint64_t>(step));
    std::vector<ItemId> list;
    if (step == 0 && options.first_action) {
      list = policy.recommend(obs, available, rng, options.list_size);
      list.erase(std::remove(list.begin(), list.end(), *options.first_action), list.end());
      list.insert(list.begin(), *options.first_action);
      if (list.size() > std::max<std::size_t>(1, options.list_size)) list.resize(std::max<std::size_t>(1, options.list_size));
    } else {
      list = policy.recommend(obs, available, rng, options.list_size);
    }
    StepView view{episode, step, &user, list, nullptr};
    const sim::UserState before = observer ? user : sim::UserState{};
    if (observer) view.user = &before;
    const sim::StepOutcome out = env.step(user, list.front());
    log.steps.push_back({list.front(), out.choice, out.reward});
    if (is_positive(out.choice)) positives.push_back(list.front());
    if (observer) {
      view.outcome = &out;
      observer(view);
    }
    if (out.done) break;
  }
  return log;
}

}  // namespace bcd4rec::policies
