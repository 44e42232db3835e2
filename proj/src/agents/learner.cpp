#include "bcd4rec/agents/learner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "bcd4rec/agents/td_loss.hpp"
#include "bcd4rec/errors.hpp"

namespace bcd4rec::agents {

namespace {

QNetworkParams shaped_network(const AgentConfig& c, int num_items) {
  Rng rng(0);
  return init_q_network(num_items, c.embedding_dim, c.gru_layers, c.num_cosines, rng);
}

std::vector<nn::NamedRef> grads_for(QNetworkParams& g) { return nn::named_refs(g); }

}  // namespace

Learner::Learner(const data::BatchDataset& dataset, const AgentConfig& config, std::uint64_t seed,
                 const nn::EmbeddingTable* pretrained, const behavior::BehaviorModelParams* behavior)
    : dataset_(dataset),
      config_(config),
      seed_(seed),
      q_adam_(nn::AdamConfig{config.lr}),
      m_adam_(nn::AdamConfig{config.behavior_lr}) {
  config_.validate();
  if (dataset.num_items < 1) throw std::domain_error("Learner: dataset without items");
  Rng init = Rng::stream(seed, "agent-init");
  online_ = init_q_network(dataset.num_items, config_.embedding_dim, config_.gru_layers, config_.num_cosines, init);
  if (pretrained) {
    if (pretrained->num_items() != dataset.num_items || pretrained->dim() != config_.embedding_dim)
      throw ConfigError("pretrained embeddings do not match the agent's item count or dimension");
    online_.items = *pretrained;
    nn::mask_pad_row(online_.items);
  }
  target_ = online_;
  if (config_.batch_constrained()) {
    if (behavior) {
      if (behavior->num_items() != dataset.num_items) throw ConfigError("behavior model item count mismatch");
      behavior_ = *behavior;
    } else {
      Rng binit = Rng::stream(seed, "behavior-init");
      behavior_ = nn::init_softmax_model(dataset.num_items, config_.embedding_dim, config_.gru_layers, binit);
    }
  }
}

Learner::Learner(const data::BatchDataset& dataset, const nn::Checkpoint& ckpt)
    : dataset_(dataset), config_(agent_config_from_checkpoint(ckpt)) {
  ckpt.require_kind(kAgentCheckpointKind);
  config_.validate();
  seed_ = ckpt.meta.at("seed").get<std::uint64_t>();
  iteration_ = ckpt.step;
  const int n_items = ckpt.meta.at("items").get<int>();
  if (n_items != dataset.num_items) throw CheckpointError("checkpoint item count does not match the dataset");
  online_ = shaped_network(config_, n_items);
  target_ = online_;
  ckpt.get_params("online.", online_);
  ckpt.get_params("target.", target_);
  q_adam_ = nn::Adam(nn::AdamConfig{config_.lr});
  m_adam_ = nn::Adam(nn::AdamConfig{config_.behavior_lr});
  ckpt.get_adam("adam.q.", q_adam_, nn::named_refs(online_).size());
  if (ckpt.meta.value("has_behavior", false)) {
    Rng rng(0);
    behavior_ = nn::init_softmax_model(n_items, ckpt.meta.at("behavior_dim").get<int>(),
                                       ckpt.meta.at("behavior_layers").get<int>(), rng);
    ckpt.get_params("behavior.", *behavior_);
    ckpt.get_adam("adam.m.", m_adam_, nn::named_refs(*behavior_).size());
  }
}

std::vector<std::size_t> Learner::minibatch_indices(std::int64_t t) const {
  Rng rng = Rng::stream(seed_, "minibatch", static_cast<std::uint64_t>(t));
  std::vector<std::size_t> idx(static_cast<std::size_t>(config_.batch_size));
  for (auto& i : idx) i = static_cast<std::size_t>(rng.below(dataset_.train.size()));
  return idx;
}

void Learner::quantile_levels(std::int64_t t, std::vector<double>& taus, std::vector<double>& target_taus) const {
  const int k = config_.num_quantiles;
  if (config_.tau_mode == TauMode::fixed_midpoints) {
    taus = nn::quantile_midpoints(k);
    target_taus = taus;
    return;
  }
  Rng rng = Rng::stream(seed_, "tau", static_cast<std::uint64_t>(t));
  taus.resize(static_cast<std::size_t>(k));
  target_taus.resize(static_cast<std::size_t>(k));
  for (auto& x : taus) x = rng.uniform();
  for (auto& x : target_taus) x = rng.uniform();
}

double Learner::step() {
  if (dataset_.train.empty()) throw std::domain_error("Learner: empty training split");
  const std::int64_t t = iteration_;
  const auto idx = minibatch_indices(t);
  std::vector<const data::Transition*> batch;
  batch.reserve(idx.size());
  for (auto i : idx) batch.push_back(&dataset_.train[i]);
  std::vector<double> taus, target_taus;
  quantile_levels(t, taus, target_taus);

  QNetworkParams grad = nn::zeros_like(online_);
  const auto res = td_loss(online_, target_, batch, config_, taus, target_taus,
                           behavior_ ? &*behavior_ : nullptr, &grad);
  q_adam_.step(nn::named_refs(online_), grads_for(grad));
  nn::mask_pad_row(online_.items);

  if (behavior_ && config_.behavior_mode == BehaviorMode::joint) {
    std::vector<std::vector<ItemId>> states;
    std::vector<ItemId> actions;
    states.reserve(batch.size());
    actions.reserve(batch.size());
    for (const auto* tr : batch) {
      states.push_back(tr->state);
      actions.push_back(tr->action);
    }
    auto mgrad = nn::zeros_like(*behavior_);
    const double nll = nn::softmax_nll(*behavior_, states, actions, &mgrad);
    if (!std::isfinite(nll)) throw DivergenceError("behavior model: non-finite loss");
    m_adam_.step(nn::named_refs(*behavior_), nn::named_refs(mgrad));
    nn::mask_pad_row(behavior_->items);
  }

  iteration_ = t + 1;
  if (iteration_ % config_.target_update_rate == 0) target_ = online_;
  return res.loss;
}

nn::Checkpoint Learner::checkpoint() const {
  nn::Checkpoint c;
  c.kind = kAgentCheckpointKind;
  c.config_hash = config_.hash();
  c.step = iteration_;
  c.meta = {{"config", config_}, {"seed", seed_}, {"items", dataset_.num_items}, {"has_behavior", behavior_.has_value()}};
  auto& self = const_cast<Learner&>(*this);
  c.put_params("online.", self.online_);
  c.put_params("target.", self.target_);
  c.put_adam("adam.q.", q_adam_);
  if (behavior_) {
    c.meta["behavior_dim"] = behavior_->items.dim();
    c.meta["behavior_layers"] = behavior_->encoder.layers();
    c.put_params("behavior.", *self.behavior_);
    c.put_adam("adam.m.", m_adam_);
  }
  return c;
}

AgentConfig agent_config_from_checkpoint(const nn::Checkpoint& ckpt) {
  ckpt.require_kind(kAgentCheckpointKind);
  try {
    return ckpt.meta.at("config").get<AgentConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("agent checkpoint without a valid config: ") + e.what());
  }
}

QAgent agent_from_checkpoint(const nn::Checkpoint& ckpt) {
  const AgentConfig cfg = agent_config_from_checkpoint(ckpt);
  QNetworkParams p = shaped_network(cfg, ckpt.meta.at("items").get<int>());
  ckpt.get_params("online.", p);
  return QAgent(std::move(p), cfg.num_quantiles);
}

std::vector<std::vector<ItemId>> curve_states(const data::BatchDataset& dataset, int limit) {
  const auto& src = dataset.validation.empty() ? dataset.train : dataset.validation;
  std::size_t n = src.size();
  if (limit > 0) n = std::min(n, static_cast<std::size_t>(limit));
  std::vector<std::vector<ItemId>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(src[i].state);
  return out;
}

TrainResult train_batch_agent(const data::BatchDataset& dataset, const AgentConfig& config, std::uint64_t seed,
                              const nn::EmbeddingTable* pretrained,
                              const behavior::BehaviorModelParams* behavior,
                              const std::function<void(const CurvePoint&)>& on_point) {
  Learner learner(dataset, config, seed, pretrained, behavior);
  TrainResult result;
  const auto states = curve_states(dataset, config.eval_states);
  double loss_sum = 0.0;
  std::int64_t loss_count = 0;
  while (learner.iteration() < config.iterations) {
    loss_sum += learner.step();
    ++loss_count;
    const std::int64_t it = learner.iteration();
    if (it % config.eval_interval == 0 || it == config.iterations) {
      CurvePoint p{it, loss_sum / static_cast<double>(loss_count),
                   states.empty() ? 0.0 : q_bar(learner.agent(), states)};
      result.curve.push_back(p);
      if (on_point) on_point(p);
      loss_sum = 0.0;
      loss_count = 0;
    }
  }
  result.checkpoint = learner.checkpoint();
  return result;
}

void write_training_curve(std::span<const CurvePoint> curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "iteration,loss,q_bar\n";
  char buf[128];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%lld,%.10g,%.10g\n", static_cast<long long>(p.iteration), p.loss, p.q_bar);
    out << buf;
  }
}

}  // namespace bcd4rec::agents
