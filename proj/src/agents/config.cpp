#include "bcd4rec/agents/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "bcd4rec/errors.hpp"
#include "bcd4rec/rng.hpp"

namespace bcd4rec::agents {

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::dqn: return "DQN";
    case AgentKind::qrdqn: return "QRDQN";
    case AgentKind::iqn: return "IQN";
    case AgentKind::bcq: return "BCQ";
    case AgentKind::qrbcq: return "QRBCQ";
    case AgentKind::bcd4rec: return "BCD4Rec";
  }
  return "?";
}

AgentKind agent_kind_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (AgentKind k : kAllAgentKinds) {
    std::string n(to_string(k));
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
    if (n == lower) return k;
  }
  throw ConfigError("unknown agent kind '" + std::string(name) + "'");
}

bool is_batch_constrained(AgentKind kind) {
  return kind == AgentKind::bcq || kind == AgentKind::qrbcq || kind == AgentKind::bcd4rec;
}

bool is_distributional(AgentKind kind) { return kind != AgentKind::dqn && kind != AgentKind::bcq; }

AgentConfig AgentConfig::defaults_for(AgentKind kind) {
  AgentConfig c;
  c.kind = kind;
  switch (kind) {
    case AgentKind::dqn:
    case AgentKind::bcq:
      c.num_quantiles = 1;
      c.tau_mode = TauMode::fixed_midpoints;
      break;
    case AgentKind::qrdqn:
    case AgentKind::qrbcq:
      c.num_quantiles = 5;
      c.tau_mode = TauMode::fixed_midpoints;
      break;
    case AgentKind::iqn:
    case AgentKind::bcd4rec:
      c.num_quantiles = 10;
      c.tau_mode = TauMode::sampled_uniform;
      break;
  }
  c.beta = is_batch_constrained(kind) ? 0.5 : 0.0;
  return c;
}

void AgentConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("agent config: " + m); };
  if (num_quantiles < 1) fail("num_quantiles must be >= 1");
  if (!is_distributional(kind) && num_quantiles != 1) fail(std::string(to_string(kind)) + " requires K = 1");
  if (num_cosines < 1) fail("num_cosines must be >= 1");
  if (!(beta >= 0.0 && beta < 1.0)) fail("beta must lie in [0,1)");
  if (!is_batch_constrained(kind) && beta != 0.0) fail(std::string(to_string(kind)) + " is not batch-constrained; beta must be 0");
  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0,1)");
  if (!(kappa > 0.0)) fail("kappa must be positive");
  if (!(lr > 0.0) || !(behavior_lr > 0.0)) fail("learning rates must be positive");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (target_update_rate < 1) fail("target_update_rate must be >= 1");
  if (iterations < 0) fail("iterations must be >= 0");
  if (eval_interval < 1) fail("eval_interval must be >= 1");
  if (embedding_dim < 2 || embedding_dim % 2 != 0) fail("embedding_dim must be even and >= 2");
  if (gru_layers < 1) fail("gru_layers must be >= 1");
  if (history_len < 1) fail("history_len must be >= 1");
}

std::string AgentConfig::hash() const {
  nlohmann::json j = *this;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

void to_json(nlohmann::json& j, const AgentConfig& c) {
  j = {{"kind", std::string(to_string(c.kind))},
       {"K", c.num_quantiles},
       {"tau_mode", c.tau_mode == TauMode::fixed_midpoints ? "fixed_midpoints" : "sampled_uniform"},
       {"n", c.num_cosines},
       {"beta", c.beta},
       {"gamma", c.gamma},
       {"kappa", c.kappa},
       {"lr", c.lr},
       {"behavior_lr", c.behavior_lr},
       {"batch_size", c.batch_size},
       {"target_update_rate", c.target_update_rate},
       {"iterations", c.iterations},
       {"eval_interval", c.eval_interval},
       {"eval_states", c.eval_states},
       {"dim", c.embedding_dim},
       {"gru_layers", c.gru_layers},
       {"history_len", c.history_len},
       {"behavior_mode", c.behavior_mode == BehaviorMode::joint ? "joint" : "frozen"}};
}

void from_json(const nlohmann::json& j, AgentConfig& c) {
  try {
    const AgentKind kind = agent_kind_from_string(j.at("kind").get<std::string>());
    c = AgentConfig::defaults_for(kind);
    c.num_quantiles = j.value("K", c.num_quantiles);
    if (j.contains("tau_mode")) {
      const std::string m = j["tau_mode"];
      if (m == "fixed_midpoints") c.tau_mode = TauMode::fixed_midpoints;
      else if (m == "sampled_uniform") c.tau_mode = TauMode::sampled_uniform;
      else throw ConfigError("agent config: unknown tau_mode '" + m + "'");
    }
    c.num_cosines = j.value("n", c.num_cosines);
    c.beta = j.value("beta", c.beta);
    c.gamma = j.value("gamma", c.gamma);
    c.kappa = j.value("kappa", c.kappa);
    c.lr = j.value("lr", c.lr);
    c.behavior_lr = j.value("behavior_lr", c.behavior_lr);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.target_update_rate = j.value("target_update_rate", c.target_update_rate);
    c.iterations = j.value("iterations", c.iterations);
    c.eval_interval = j.value("eval_interval", c.eval_interval);
    c.eval_states = j.value("eval_states", c.eval_states);
    c.embedding_dim = j.value("dim", c.embedding_dim);
    c.gru_layers = j.value("gru_layers", c.gru_layers);
    c.history_len = j.value("history_len", c.history_len);
    if (j.contains("behavior_mode")) {
      const std::string m = j["behavior_mode"];
      if (m == "joint") c.behavior_mode = BehaviorMode::joint;
      else if (m == "frozen") c.behavior_mode = BehaviorMode::frozen;
      else throw ConfigError("agent config: unknown behavior_mode '" + m + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("agent config: ") + e.what());
  }
}

}  // namespace bcd4rec::agents
