#include "bcd4rec/pipeline/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include "bcd4rec/errors.hpp"
#include "bcd4rec/rng.hpp"

namespace bcd4rec::pipeline {

using nlohmann::json;

namespace {

const std::vector<std::string> kStageOrder = {"make-behavior", "generate", "split", "pretrain", "train-m",
                                              "train-agents", "eval-online", "eval-offline", "report", "sweep"};

// Config sections each stage reads, in addition to those of earlier stages.
const std::map<std::string, std::vector<std::string>> kStageSections = {
    {"make-behavior", {"seed", "seeds", "env", "behavior"}},
    {"generate", {"data"}},
    {"split", {}},
    {"pretrain", {"pretrain"}},
    {"train-m", {"behavior_model"}},
    {"train-agents", {"agents"}},
    {"eval-online", {"eval"}},
    {"eval-offline", {}},
    {"report", {}},
    {"sweep", {"sweep"}}};

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json merge(json base, const json& patch) {
  for (const auto& [k, v] : patch.items()) base[k] = v;
  return base;
}

}  // namespace

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t ExperimentConfig::stage_seed(const std::string& stage) const {
  if (auto it = seed_overrides.find(stage); it != seed_overrides.end()) return it->second;
  return Rng::stream(seed, stage).next_u64();
}

const AgentSpec& ExperimentConfig::agent(const std::string& label) const {
  for (const auto& a : agents)
    if (a.label == label) return a;
  throw ConfigError("no agent labelled '" + label + "'");
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.online.checkpoint_episodes = {100, 600};
  for (agents::AgentKind k : agents::kAllAgentKinds)
    c.agents.push_back({std::string(agents::to_string(k)), agents::AgentConfig::defaults_for(k), true});
  return c;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  env.validate();
  if (behavior_tag != "RecSim-1" && behavior_tag != "RecSim-2" && behavior_tag != "RecSim-3")
    fail("behavior.tag must be RecSim-1, RecSim-2 or RecSim-3");
  if (behavior_tag != "RecSim-1" && !online_behavior) fail("behavior.tag " + behavior_tag + " needs behavior.online = true");
  if (online_behavior) {
    online.validate();
    if (online.checkpoint_episodes.size() != 2)
      fail("behavior.checkpoint_episodes must list two episodes (RecSim-2, RecSim-3)");
    if (online.agent.history_len != history_len) fail("behavior.agent.history_len must equal data.history_len");
  }
  if (sessions < 5) fail("data.sessions must be >= 5");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) fail("data.validation_fraction must lie in (0,1)");
  if (history_len < 1) fail("data.history_len must be >= 1");
  if (pretrain_config.dim < 2 || pretrain_config.dim % 2) fail("pretrain.dim must be even and >= 2");
  if (pretrain_config.train.epochs < 1) fail("pretrain.epochs must be >= 1");
  if (behavior_model.dim < 2 || behavior_model.dim % 2) fail("behavior_model.dim must be even and >= 2");
  if (behavior_model.epochs < 0) fail("behavior_model.epochs must be >= 0");
  if (agents.empty()) fail("agents must not be empty");
  std::set<std::string> labels;
  for (const auto& a : agents) {
    if (a.label.empty()) fail("agent label must not be empty");
    if (!labels.insert(a.label).second) fail("duplicate agent label '" + a.label + "'");
    a.config.validate();
    if (a.config.history_len != history_len) fail("agent " + a.label + ": history_len must equal data.history_len");
    if (pretrain && a.pretrained && a.config.embedding_dim != pretrain_config.dim)
      fail("agent " + a.label + ": dim must equal pretrain.dim to use pretrained embeddings");
  }
  if (eval.n_users < 1) fail("eval.n_users must be >= 1");
  for (int x : eval.coverage_x)
    if (x < 1) fail("eval.coverage_x values must be >= 1");
  for (int x : eval.recall_x)
    if (x < 1) fail("eval.recall_x values must be >= 1");
  if (eval.return_groups < 1 || eval.return_groups > env.num_categories) fail("eval.return_groups out of range");
  if (eval.return_users < 1) fail("eval.return_users must be >= 1");
  if (eval.return_horizon < 1 || eval.return_horizon > env.max_episode_len)
    fail("eval.return_horizon must lie in [1, max_steps]");
  if (!(eval.return_gamma >= 0.0 && eval.return_gamma <= 1.0)) fail("eval.return_gamma must lie in [0,1]");
  agents::agent_kind_from_string(sweep.kind);
  if (sweep.beta.empty() || sweep.n.empty() || sweep.k.empty()) fail("sweep grid axes must be non-empty");
  if (!sweep.allow_out_of_range) {
    for (double b : sweep.beta)
      if (b < 0.1 || b > 0.9) fail("sweep.beta outside the tuned range [0.1, 0.9]");
    for (int n : sweep.n)
      if (n < 32 || n > 128) fail("sweep.n outside the tuned range [32, 128]");
    for (int k : sweep.k)
      if (k < 5 || k > 10) fail("sweep.K outside the tuned range [5, 10]");
  }
  if (sweep.recall_x < 1) fail("sweep.recall_x must be >= 1");
  if (output_dir.empty()) fail("output_dir must not be empty");
}

json to_json(const ExperimentConfig& c) {
  json behavior = {{"tag", c.behavior_tag},
                   {"online", c.online_behavior},
                   {"episodes", c.online.episodes},
                   {"checkpoint_episodes", c.online.checkpoint_episodes},
                   {"train_every", c.online.train_every},
                   {"warmup", c.online.warmup_transitions},
                   {"agent", c.online.agent}};
  if (c.online.epsilon) behavior["epsilon"] = *c.online.epsilon;
  json agents = json::array();
  for (const auto& a : c.agents) {
    json j = a.config;
    j["label"] = a.label;
    j["pretrained"] = a.pretrained;
    agents.push_back(j);
  }
  json seeds = json::object();
  for (const auto& [k, v] : c.seed_overrides) seeds[k] = v;
  return {{"seed", c.seed},
          {"seeds", seeds},
          {"output_dir", c.output_dir.string()},
          {"env", c.env},
          {"behavior", behavior},
          {"data", {{"sessions", c.sessions}, {"validation_fraction", c.validation_fraction}, {"history_len", c.history_len}}},
          {"pretrain",
           {{"enabled", c.pretrain},
            {"dim", c.pretrain_config.dim},
            {"layers", c.pretrain_config.layers},
            {"epochs", c.pretrain_config.train.epochs},
            {"lr", c.pretrain_config.train.lr},
            {"batch_size", c.pretrain_config.train.batch_size}}},
          {"behavior_model",
           {{"dim", c.behavior_model.dim},
            {"layers", c.behavior_model.layers},
            {"epochs", c.behavior_model.epochs},
            {"lr", c.behavior_model.lr},
            {"batch_size", c.behavior_model.batch_size}}},
          {"agents", agents},
          {"eval",
           {{"n_users", c.eval.n_users},
            {"coverage_x", c.eval.coverage_x},
            {"recall_x", c.eval.recall_x},
            {"q_bar_states", c.eval.q_bar_states},
            {"return_groups", c.eval.return_groups},
            {"return_users", c.eval.return_users},
            {"return_horizon", c.eval.return_horizon},
            {"return_gamma", c.eval.return_gamma}}},
          {"sweep",
           {{"kind", c.sweep.kind},
            {"beta", c.sweep.beta},
            {"n", c.sweep.n},
            {"K", c.sweep.k},
            {"iterations", c.sweep.iterations},
            {"allow_out_of_range", c.sweep.allow_out_of_range},
            {"recall_x", c.sweep.recall_x}}}};
}

ExperimentConfig config_from_json(const json& doc) {
  static const std::set<std::string> known = {"seed", "seeds", "output_dir", "env", "behavior", "data", "pretrain",
                                              "behavior_model", "agent_defaults", "agents", "eval", "sweep"};
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : doc.items())
    if (!known.contains(k)) throw ConfigError("unknown config key '" + k + "'");
  ExperimentConfig c = default_config();
  try {
    read(doc, "seed", c.seed);
    if (doc.contains("seeds"))
      for (const auto& [k, v] : doc["seeds"].items()) c.seed_overrides[k] = v.get<std::uint64_t>();
    if (doc.contains("output_dir")) c.output_dir = doc["output_dir"].get<std::string>();
    if (doc.contains("env")) c.env = doc["env"].get<sim::EnvConfig>();
    const json agent_defaults = doc.value("agent_defaults", json::object());
    if (doc.contains("behavior")) {
      const json& b = doc["behavior"];
      read(b, "tag", c.behavior_tag);
      read(b, "online", c.online_behavior);
      read(b, "episodes", c.online.episodes);
      if (b.contains("checkpoint_episodes")) {
        c.online.checkpoint_episodes = b["checkpoint_episodes"].get<std::vector<int>>();
      } else if (b.contains("episodes")) {
        c.online.checkpoint_episodes = {c.online.episodes / 10, c.online.episodes * 6 / 10};
      }
      read(b, "train_every", c.online.train_every);
      read(b, "warmup", c.online.warmup_transitions);
      if (b.contains("epsilon")) c.online.epsilon = b["epsilon"].get<policies::EpsilonSchedule>();
      json a = merge(json(agents::AgentConfig::defaults_for(agents::AgentKind::iqn)), b.value("agent", json::object()));
      c.online.agent = a.get<agents::AgentConfig>();
    }
    if (doc.contains("data")) {
      const json& d = doc["data"];
      read(d, "sessions", c.sessions);
      read(d, "validation_fraction", c.validation_fraction);
      read(d, "history_len", c.history_len);
    }
    if (doc.contains("pretrain")) {
      const json& p = doc["pretrain"];
      read(p, "enabled", c.pretrain);
      read(p, "dim", c.pretrain_config.dim);
      read(p, "layers", c.pretrain_config.layers);
      read(p, "epochs", c.pretrain_config.train.epochs);
      read(p, "lr", c.pretrain_config.train.lr);
      read(p, "batch_size", c.pretrain_config.train.batch_size);
    }
    c.pretrain_config.history_len = c.history_len;
    if (doc.contains("behavior_model")) {
      const json& m = doc["behavior_model"];
      read(m, "dim", c.behavior_model.dim);
      read(m, "layers", c.behavior_model.layers);
      read(m, "epochs", c.behavior_model.epochs);
      read(m, "lr", c.behavior_model.lr);
      read(m, "batch_size", c.behavior_model.batch_size);
    }
    if (doc.contains("agents") || !agent_defaults.empty()) {
      std::vector<json> entries;
      if (doc.contains("agents")) {
        for (const auto& a : doc["agents"]) entries.push_back(a);
      } else {
        for (agents::AgentKind k : agents::kAllAgentKinds) entries.push_back({{"kind", std::string(agents::to_string(k))}});
      }
      c.agents.clear();
      for (const json& e : entries) {
        const json kind_only = {{"kind", e.at("kind")}};
        json full = merge(merge(json(agents::AgentConfig::defaults_for(
                                    agents::agent_kind_from_string(e.at("kind").get<std::string>()))),
                                agent_defaults),
                          e);
        full["kind"] = kind_only["kind"];
        AgentSpec spec;
        spec.config = full.get<agents::AgentConfig>();
        spec.label = e.value("label", std::string(agents::to_string(spec.config.kind)));
        spec.pretrained = e.value("pretrained", agent_defaults.value("pretrained", true));
        c.agents.push_back(std::move(spec));
      }
    }
    if (doc.contains("eval")) {
      const json& e = doc["eval"];
      read(e, "n_users", c.eval.n_users);
      read(e, "coverage_x", c.eval.coverage_x);
      read(e, "recall_x", c.eval.recall_x);
      read(e, "q_bar_states", c.eval.q_bar_states);
      read(e, "return_groups", c.eval.return_groups);
      read(e, "return_users", c.eval.return_users);
      read(e, "return_horizon", c.eval.return_horizon);
      read(e, "return_gamma", c.eval.return_gamma);
    }
    if (doc.contains("sweep")) {
      const json& s = doc["sweep"];
      read(s, "kind", c.sweep.kind);
      read(s, "beta", c.sweep.beta);
      read(s, "n", c.sweep.n);
      read(s, "K", c.sweep.k);
      read(s, "iterations", c.sweep.iterations);
      read(s, "allow_out_of_range", c.sweep.allow_out_of_range);
      read(s, "recall_x", c.sweep.recall_x);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

void apply_overrides(json& doc, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + a + "' is not key=value");
    const std::string key = a.substr(0, eq), raw = a.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;
    }
    std::string ptr = "/";
    for (char ch : key) ptr += ch == '.' ? '/' : ch;
    try {
      doc[json::json_pointer(ptr)] = value;
    } catch (const json::exception& e) {
      throw ConfigError("override '" + a + "': " + e.what());
    }
  }
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config) {
  if (config.output_dir.is_absolute()) return config.output_dir;
  if (const char* root = std::getenv(kOutputRootEnv); root && *root) return std::filesystem::path(root) / config.output_dir;
  return config.output_dir;
}

std::string ExperimentConfig::stage_hash(const std::string& stage) const {
  const json doc = to_json(*this);
  json subset = json::object();
  for (const auto& s : kStageOrder) {
    for (const auto& key : kStageSections.at(s)) subset[key] = doc.at(key);
    if (s == stage) return hex64(fnv1a64(stage + subset.dump()));
  }
  throw ConfigError("unknown stage '" + stage + "'");
}

}  // namespace bcd4rec::pipeline
