#include "bcd4rec/pipeline/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>

#include "bcd4rec/agents/learner.hpp"
#include "bcd4rec/agents/returns.hpp"
#include "bcd4rec/batch_gen.hpp"
#include "bcd4rec/behavior_model.hpp"
#include "bcd4rec/errors.hpp"
#include "bcd4rec/eval_metrics.hpp"
#include "bcd4rec/online_train.hpp"
#include "bcd4rec/policies.hpp"

namespace bcd4rec::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

namespace {

constexpr const char* kPolicies = "behavior/policies.json";
constexpr const char* kSessions = "data/sessions.jsonl";
constexpr const char* kTrain = "data/train.jsonl";
constexpr const char* kValidation = "data/validation.jsonl";
constexpr const char* kPretrained = "pretrain/items.ckpt";
constexpr const char* kBehaviorModel = "behavior_model/model.ckpt";
constexpr const char* kOnlineJson = "eval/online.json";
constexpr const char* kOfflineJson = "eval/offline.json";

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("missing artifact " + p.string() + " (run the earlier stages first)");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("corrupt artifact " + p.string() + ": " + e.what());
  }
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

std::string agent_file(const std::string& label) { return "agents/" + label + ".ckpt"; }

nn::EmbeddingTable load_embeddings(const fs::path& p) {
  const nn::Checkpoint c = nn::checkpoint_load(p);
  c.require_kind("item-embeddings");
  nn::EmbeddingTable t;
  t.table = c.get("items.table");
  return t;
}

std::string csv_header_x(const char* prefix, const std::vector<int>& xs) {
  std::string s;
  for (int x : xs) s += std::string(",") + prefix + std::to_string(x);
  return s;
}

json report_json(const eval::OnlineEvalReport& r) {
  json cov = json::object();
  for (const auto& [x, v] : r.coverage) cov[std::to_string(x)] = v;
  double mean_return = 0.0;
  for (double v : r.episode_returns) mean_return += v;
  if (!r.episode_returns.empty()) mean_return /= static_cast<double>(r.episode_returns.size());
  return {{"policy", r.policy},      {"ctr", r.ctr},
          {"coverage", cov},         {"category_accuracy", r.category_accuracy},
          {"mean_return", mean_return}, {"steps", r.steps},
          {"item_counts", r.item_counts}};
}

}  // namespace

Runner::Runner(ExperimentConfig config, RunOptions options)
    : config_(std::move(config)), options_(options), out_(resolve_output_dir(config_)), manifest_(out_) {
  config_.validate();
  manifest_.load();
}

void Runner::note(const std::string& message) const {
  if (options_.log) *options_.log << message << std::endl;
}

std::string Runner::stage_key(const std::string& stage) const { return config_.stage_hash(stage); }

void Runner::record(const std::string& relative) { manifest_.add_artifact(current_, relative); }

std::vector<std::string> Runner::plan(const std::vector<std::string>& stages) const {
  std::vector<std::string> out;
  for (const auto& s : stages) {
    const bool current = !options_.force && manifest_.is_current(s, stage_key(s));
    out.push_back(s + ": " + (current ? "up to date" : "run"));
  }
  return out;
}

void Runner::run(const std::string& stage) {
  const std::string key = stage_key(stage);
  current_ = stage;
  if (!options_.force && manifest_.is_current(stage, key)) {
    note(stage + ": up to date");
    return;
  }
  note(stage + ": running");
  manifest_.set_run_info(hex64(fnv1a64(to_json(config_).dump())), tool_version());
  manifest_.begin(stage, key);
  try {
    execute(stage);
  } catch (const std::exception& e) {
    manifest_.fail(stage, e.what());
    throw;
  }
  manifest_.complete(stage);
}

void Runner::run_pipeline() {
  for (const auto& s : kPipelineStages) run(s);
}

void Runner::execute(const std::string& stage) {
  if (stage == "make-behavior") make_behavior();
  else if (stage == "generate") generate();
  else if (stage == "split") split();
  else if (stage == "pretrain") pretrain();
  else if (stage == "train-m") train_m();
  else if (stage == "train-agents") train_agents();
  else if (stage == "eval-online") eval_online();
  else if (stage == "eval-offline") eval_offline();
  else if (stage == "report") report();
  else if (stage == "sweep") sweep();
  else throw ConfigError("unknown stage '" + stage + "'");
}

// --- behavior policies ----------------------------------------------------

void Runner::make_behavior() {
  json tags = {{"RecSim-1", policies::PolicyHandle{}}};
  if (config_.online_behavior) {
    std::string curve = "episode,ctr\n";
    const auto snaps = policies::online_train_iqn(config_.env, config_.online, config_.stage_seed("behavior"),
                                                  [&](int ep, double ctr) {
                                                    curve += std::to_string(ep) + "," + format_number(ctr) + "\n";
                                                  });
    const char* names[] = {"RecSim-2", "RecSim-3"};
    for (std::size_t i = 0; i < snaps.size() && i < 2; ++i) {
      const std::string file = snaps[i].id + ".ckpt";
      nn::checkpoint_save(snaps[i].checkpoint, out_ / "behavior" / file);
      record("behavior/" + file);
      policies::PolicyHandle h;
      h.kind = policies::PolicyKind::agent_checkpoint;
      h.checkpoint_ref = file;
      h.epsilon = snaps[i].epsilon;
      tags[names[i]] = h;
    }
    write_text(out_ / "behavior/online_curve.csv", curve);
    record("behavior/online_curve.csv");
  }
  write_text(out_ / kPolicies, tags.dump(2) + "\n");
  record(kPolicies);
}

// --- data ---------------------------------------------------------------------

void Runner::generate() {
  const json tags = read_json(out_ / kPolicies);
  if (!tags.contains(config_.behavior_tag)) throw ConfigError("behavior tag " + config_.behavior_tag + " was not created");
  policies::PolicyContext ctx;
  ctx.catalog = sim::make_catalog(config_.env);
  ctx.checkpoint_root = out_ / "behavior";
  const auto policy = policies::make_policy(tags[config_.behavior_tag].get<policies::PolicyHandle>(), ctx);
  const std::uint64_t seed = config_.stage_seed("generate");
  const auto logs = data::generate_batch(config_.env, *policy, config_.sessions, seed, config_.history_len);
  data::LogHeader h;
  h.num_items = config_.env.num_items;
  h.sessions = logs.size();
  h.provenance = {config_.behavior_tag, seed, config_.env.hash()};
  fs::create_directories(out_ / "data");
  data::write_session_log(logs, h, out_ / kSessions);
  record(kSessions);
}

void Runner::split() {
  const auto loaded = data::read_session_log(out_ / kSessions);
  const auto ds = data::split_dataset(loaded.sessions, loaded.header.num_items, config_.history_len,
                                      config_.validation_fraction, config_.stage_seed("split"),
                                      loaded.header.provenance);
  data::LogHeader h = loaded.header;
  h.sessions = ds.train_sessions.size();
  data::write_session_log(ds.train_sessions, h, out_ / kTrain);
  h.sessions = ds.validation_sessions.size();
  data::write_session_log(ds.validation_sessions, h, out_ / kValidation);
  record(kTrain);
  record(kValidation);
}

data::BatchDataset Runner::load_dataset() const {
  const auto train = data::read_session_log(out_ / kTrain);
  const auto val = data::read_session_log(out_ / kValidation);
  data::BatchDataset ds;
  ds.num_items = train.header.num_items;
  ds.history_len = config_.history_len;
  ds.train_sessions = train.sessions;
  ds.validation_sessions = val.sessions;
  ds.train = data::incremental_tuples(ds.train_sessions, ds.history_len);
  ds.validation = data::incremental_tuples(ds.validation_sessions, ds.history_len);
  ds.provenance = train.header.provenance;
  return ds;
}

// --- models ---------------------------------------------------------------

void Runner::pretrain() {
  if (!config_.pretrain) return;
  const auto ds = load_dataset();
  std::vector<std::vector<ItemId>> seqs;
  for (const auto& s : ds.train_sessions) seqs.push_back(s.positive_items());
  nn::PretrainConfig pc = config_.pretrain_config;
  pc.history_len = config_.history_len;
  pc.train.seed = config_.stage_seed("pretrain");
  auto res = nn::pretrain_item_embeddings(seqs, ds.num_items, pc);
  nn::Checkpoint c;
  c.kind = "item-embeddings";
  c.config_hash = stage_key("pretrain");
  c.meta = {{"dim", pc.dim}, {"items", ds.num_items}};
  c.put_params("items.", res.items);
  nn::checkpoint_save(c, out_ / kPretrained);
  record(kPretrained);
  std::string csv = "epoch,loss\n";
  for (std::size_t e = 0; e < res.epoch_loss.size(); ++e)
    csv += std::to_string(e + 1) + "," + format_number(res.epoch_loss[e]) + "\n";
  write_text(out_ / "pretrain/loss.csv", csv);
  record("pretrain/loss.csv");
}

void Runner::train_m() {
  const auto ds = load_dataset();
  behavior::BehaviorTrainConfig bc = config_.behavior_model;
  bc.seed = config_.stage_seed("train-m");
  const auto rep = behavior::train_behavior_model(ds, bc);
  nn::checkpoint_save(behavior::behavior_checkpoint(rep.params, bc), out_ / kBehaviorModel);
  record(kBehaviorModel);
  std::string csv = "epoch,train_nll\n";
  for (std::size_t e = 0; e < rep.train_nll.size(); ++e)
    csv += std::to_string(e + 1) + "," + format_number(rep.train_nll[e]) + "\n";
  csv += "validation," + format_number(rep.validation_nll) + "\n";
  write_text(out_ / "behavior_model/nll.csv", csv);
  record("behavior_model/nll.csv");
}

void Runner::train_agents() {
  const auto ds = load_dataset();
  std::optional<nn::EmbeddingTable> pre;
  if (config_.pretrain) pre = load_embeddings(out_ / kPretrained);
  std::optional<behavior::BehaviorModelParams> m;
  for (const auto& spec : config_.agents) {
    const auto& cfg = spec.config;
    if (cfg.batch_constrained() && !m) m = behavior::behavior_from_checkpoint(nn::checkpoint_load(out_ / kBehaviorModel));
    note("  training " + spec.label);
    auto res = agents::train_batch_agent(ds, cfg, config_.stage_seed("train-agents"),
                                         pre && spec.pretrained ? &*pre : nullptr,
                                         cfg.batch_constrained() ? &*m : nullptr);
    fs::create_directories(out_ / "agents");
    nn::checkpoint_save(res.checkpoint, out_ / agent_file(spec.label));
    record(agent_file(spec.label));
    const std::string curve = "agents/" + spec.label + "_curve.csv";
    agents::write_training_curve(res.curve, out_ / curve);
    record(curve);
  }
}

// --- evaluation -------------------------------------------------------------

void Runner::eval_online() {
  const auto ds = load_dataset();
  const json tags = read_json(out_ / kPolicies);
  policies::PolicyContext ctx;
  ctx.catalog = sim::make_catalog(config_.env);
  ctx.checkpoint_root = out_ / "behavior";
  ctx.item_frequencies = data::positive_item_frequencies(ds.train_sessions, ds.num_items);

  struct Entry {
    std::string label;
    std::unique_ptr<policies::Policy> policy;
  };
  std::vector<Entry> entries;
  entries.push_back({"Behavior(" + config_.behavior_tag + ")",
                     policies::make_policy(tags.at(config_.behavior_tag).get<policies::PolicyHandle>(), ctx)});
  entries.push_back({"MostPop", std::make_unique<policies::MostPopPolicy>(ctx.item_frequencies)});
  entries.push_back({"Online", std::make_unique<policies::OraclePolicy>(ctx.catalog)});
  for (const auto& spec : config_.agents) {
    auto agent = std::make_shared<const agents::QAgent>(
        agents::agent_from_checkpoint(nn::checkpoint_load(out_ / agent_file(spec.label))));
    entries.push_back({spec.label, std::make_unique<policies::AgentPolicy>(agent, 0.0, spec.label)});
  }

  eval::OnlineEvalOptions eo;
  eo.n_users = config_.eval.n_users;
  eo.coverage_x = config_.eval.coverage_x;
  eo.history_len = config_.history_len;
  eo.seed = config_.stage_seed("eval-online");
  eo.workers = options_.workers;

  agents::ReturnSampling rs;
  rs.n_users = config_.eval.return_users;
  rs.horizon = config_.eval.return_horizon;
  rs.gamma = config_.eval.return_gamma;
  rs.seed = eo.seed;
  rs.first_action = static_cast<ItemId>(
      Rng::stream(eo.seed, "first-action").below(static_cast<std::uint64_t>(config_.env.num_items)));
  const auto groups = agents::random_categories(config_.env.num_categories, config_.eval.return_groups, eo.seed);

  std::vector<eval::OnlineEvalReport> reports;
  std::map<std::string, std::map<int, std::vector<double>>> returns;
  std::string online_csv = "policy,ctr" + csv_header_x("coverage@", config_.eval.coverage_x) +
                           ",category_accuracy,mean_return\n";
  std::string returns_csv = "policy,group,user,return\n";
  json online = json::array();
  for (auto& e : entries) {
    note("  evaluating " + e.label);
    auto rep = eval::online_eval(*e.policy, config_.env, eo);
    rep.policy = e.label;
    const json rj = report_json(rep);
    online.push_back(rj);
    online_csv += e.label + "," + format_number(rep.ctr);
    for (int x : config_.eval.coverage_x) online_csv += "," + format_number(rep.coverage.at(x));
    online_csv += "," + format_number(rep.category_accuracy) + "," + format_number(rj["mean_return"].get<double>()) + "\n";
    reports.push_back(std::move(rep));

    const auto samples = agents::collect_return_samples(*e.policy, config_.env, groups, rs);
    int idx = 0, last_group = -1;
    for (const auto& s : samples) {
      idx = s.group == last_group ? idx + 1 : 0;
      last_group = s.group;
      returns[e.label][s.group].push_back(s.value);
      returns_csv += e.label + "," + std::to_string(s.group) + "," + std::to_string(idx) + "," + format_number(s.value) + "\n";
    }
  }

  std::string w_csv = "policy";
  for (int g : groups) w_csv += ",group_" + std::to_string(g);
  w_csv += "\n";
  json wj = json::object();
  for (const auto& e : entries) {
    w_csv += e.label;
    for (int g : groups) {
      const double w = eval::wasserstein_1d(returns[e.label][g], returns["Online"][g]);
      w_csv += "," + format_number(w);
      wj[e.label][std::to_string(g)] = w;
    }
    w_csv += "\n";
  }

  const auto curves = eval::popularity_report(reports);
  json gj = json::object();
  for (const auto& c : curves) gj[c.policy] = c.gini;

  fs::create_directories(out_ / "eval");
  write_text(out_ / "eval/online.csv", online_csv);
  write_text(out_ / "eval/returns.csv", returns_csv);
  write_text(out_ / "eval/wasserstein.csv", w_csv);
  eval::write_popularity_csv(curves, out_ / "eval/popularity.csv");
  std::string gini_csv = "policy,gini\n";
  for (const auto& c : curves) gini_csv += c.policy + "," + format_number(c.gini) + "\n";
  write_text(out_ / "eval/gini.csv", gini_csv);
  const json doc = {{"reports", online}, {"wasserstein", wj}, {"gini", gj}, {"groups", groups},
                    {"first_action", rs.first_action}};
  write_text(out_ / kOnlineJson, doc.dump(2) + "\n");
  for (const char* f : {"eval/online.csv", "eval/returns.csv", "eval/wasserstein.csv", "eval/popularity.csv",
                        "eval/gini.csv", kOnlineJson})
    record(f);
}

void Runner::eval_offline() {
  const auto ds = load_dataset();
  std::string csv = "policy" + csv_header_x("recall@", config_.eval.recall_x) + ",q_bar\n";
  json rows = json::array();
  const auto freq = data::positive_item_frequencies(ds.train_sessions, ds.num_items);
  {
    const auto points = eval::recall_points(ds.validation_sessions, ds.history_len);
    const auto rec = eval::recall_at_x(
        [&](std::span<const std::vector<ItemId>> states) {
          agents::Matrix m(ds.num_items, static_cast<Eigen::Index>(states.size()));
          for (Eigen::Index b = 0; b < m.cols(); ++b)
            for (int i = 0; i < ds.num_items; ++i) m(i, b) = freq[static_cast<std::size_t>(i)];
          return m;
        },
        points, ds.num_items, config_.eval.recall_x);
    csv += "MostPop";
    json r = json::object();
    for (const auto& [x, v] : rec) {
      csv += "," + format_number(v);
      r[std::to_string(x)] = v;
    }
    csv += ",NA\n";
    rows.push_back({{"policy", "MostPop"}, {"recall", r}, {"q_bar", nullptr}});
  }
  for (const auto& spec : config_.agents) {
    const auto agent = agents::agent_from_checkpoint(nn::checkpoint_load(out_ / agent_file(spec.label)));
    const auto rep = eval::offline_eval(agent, ds, config_.eval.recall_x, config_.eval.q_bar_states);
    csv += spec.label;
    json r = json::object();
    for (const auto& [x, v] : rep.recall) {
      csv += "," + format_number(v);
      r[std::to_string(x)] = v;
    }
    csv += "," + format_number(rep.q_bar) + "\n";
    rows.push_back({{"policy", spec.label}, {"recall", r}, {"q_bar", rep.q_bar}});
  }
  fs::create_directories(out_ / "eval");
  write_text(out_ / "eval/offline.csv", csv);
  write_text(out_ / kOfflineJson, json{{"rows", rows}}.dump(2) + "\n");
  record("eval/offline.csv");
  record(kOfflineJson);
}

void Runner::report() {
  const json online = read_json(out_ / kOnlineJson);
  const json offline = read_json(out_ / kOfflineJson);
  std::map<std::string, json> off;
  for (const auto& r : offline["rows"]) off[r["policy"].get<std::string>()] = r;

  std::string csv = "policy,ctr" + csv_header_x("coverage@", config_.eval.coverage_x) +
                    csv_header_x("recall@", config_.eval.recall_x) + ",q_bar,category_accuracy,gini\n";
  json rows = json::array();
  for (const auto& r : online["reports"]) {
    const std::string p = r["policy"];
    json row = {{"policy", p}, {"ctr", r["ctr"]}, {"coverage", r["coverage"]},
                {"category_accuracy", r["category_accuracy"]}, {"gini", online["gini"][p]}};
    csv += p + "," + format_number(r["ctr"].get<double>());
    for (int x : config_.eval.coverage_x) csv += "," + format_number(r["coverage"][std::to_string(x)].get<double>());
    const auto it = off.find(p);
    for (int x : config_.eval.recall_x) {
      double v = NAN;
      if (it != off.end()) v = it->second["recall"][std::to_string(x)].get<double>();
      csv += "," + format_number(v);
    }
    double q = NAN;
    if (it != off.end() && !it->second["q_bar"].is_null()) q = it->second["q_bar"].get<double>();
    csv += "," + format_number(q) + "," + format_number(r["category_accuracy"].get<double>()) + "," +
           format_number(online["gini"][p].get<double>()) + "\n";
    if (it != off.end()) {
      row["recall"] = it->second["recall"];
      row["q_bar"] = it->second["q_bar"];
    }
    rows.push_back(row);
  }
  json agents_list = json::array();
  for (const auto& a : config_.agents)
    agents_list.push_back({{"label", a.label}, {"kind", std::string(agents::to_string(a.config.kind))}});
  const json summary = {{"behavior_tag", config_.behavior_tag},
                        {"agents", agents_list},
                        {"rows", rows},
                        {"wasserstein_to_online", online["wasserstein"]},
                        {"return_groups", online["groups"]}};
  fs::create_directories(out_ / "report");
  write_text(out_ / "report/table.csv", csv);
  write_text(out_ / "report/summary.json", summary.dump(2) + "\n");
  record("report/table.csv");
  record("report/summary.json");
}

// --- hyperparameter sweep ---------------------------------------------------

void Runner::sweep() {
  const auto ds = load_dataset();
  const auto kind = agents::agent_kind_from_string(config_.sweep.kind);
  agents::AgentConfig base = agents::AgentConfig::defaults_for(kind);
  bool pretrained = true;
  for (const auto& a : config_.agents)
    if (a.config.kind == kind) {
      base = a.config;
      pretrained = a.pretrained;
      break;
    }
  if (config_.sweep.iterations > 0) base.iterations = config_.sweep.iterations;
  std::optional<nn::EmbeddingTable> pre;
  if (config_.pretrain && pretrained) pre = load_embeddings(out_ / kPretrained);
  std::optional<behavior::BehaviorModelParams> m;
  if (base.batch_constrained()) m = behavior::behavior_from_checkpoint(nn::checkpoint_load(out_ / kBehaviorModel));

  const std::vector<double> betas = base.batch_constrained() ? config_.sweep.beta : std::vector<double>{0.0};
  const std::vector<int> ks = agents::is_distributional(kind) ? config_.sweep.k : std::vector<int>{1};
  eval::OnlineEvalOptions eo;
  eo.n_users = config_.eval.n_users;
  eo.coverage_x = {1};
  eo.history_len = config_.history_len;
  eo.seed = config_.stage_seed("eval-online");
  eo.workers = options_.workers;
  const int rx = config_.sweep.recall_x;
  const std::string rlabel = "recall@" + std::to_string(rx);

  std::string scatter = "kind,beta,n,K,status,ctr," + rlabel + ",q_bar\n";
  std::vector<double> ctr, rec, qb;
  for (double beta : betas)
    for (int n : config_.sweep.n)
      for (int k : ks) {
        agents::AgentConfig cfg = base;
        cfg.beta = beta;
        cfg.num_cosines = n;
        cfg.num_quantiles = k;
        char key[96];
        std::snprintf(key, sizeof key, "%s,%s,%d,%d", config_.sweep.kind.c_str(), format_number(beta).c_str(), n, k);
        note(std::string("  sweep point ") + key);
        try {
          const auto res = agents::train_batch_agent(ds, cfg, config_.stage_seed("sweep"), pre ? &*pre : nullptr,
                                                     m ? &*m : nullptr);
          const auto agent = std::make_shared<const agents::QAgent>(agents::agent_from_checkpoint(res.checkpoint));
          const policies::AgentPolicy policy(agent, 0.0);
          const double c = eval::online_eval(policy, config_.env, eo).ctr;
          const int xs[] = {rx};
          const auto off = eval::offline_eval(*agent, ds, xs, config_.eval.q_bar_states);
          ctr.push_back(c);
          rec.push_back(off.recall.at(rx));
          qb.push_back(off.q_bar);
          scatter += std::string(key) + ",ok," + format_number(c) + "," + format_number(off.recall.at(rx)) + "," +
                     format_number(off.q_bar) + "\n";
        } catch (const DivergenceError& e) {
          note(std::string("  diverged: ") + e.what());
          scatter += std::string(key) + ",diverged,NA,NA,NA\n";
        }
      }

  std::string corr = "kind,offline_metric,points,value_pcc,rank_pcc\n";
  json cj = json::object();
  for (const auto& [name, xs] : {std::pair{rlabel, &rec}, std::pair{std::string("q_bar"), &qb}}) {
    double v = NAN, r = NAN;
    if (xs->size() >= 3) {
      v = eval::correlation(*xs, ctr, eval::CorrelationMode::value).value_or(NAN);
      r = eval::correlation(*xs, ctr, eval::CorrelationMode::rank).value_or(NAN);
    }
    corr += config_.sweep.kind + "," + name + "," + std::to_string(xs->size()) + "," + format_number(v) + "," +
            format_number(r) + "\n";
    cj[name] = {{"value", std::isnan(v) ? json(nullptr) : json(v)}, {"rank", std::isnan(r) ? json(nullptr) : json(r)}};
  }
  fs::create_directories(out_ / "sweep");
  write_text(out_ / "sweep/scatter.csv", scatter);
  write_text(out_ / "sweep/correlation.csv", corr);
  write_text(out_ / "sweep/correlation.json",
             json{{"kind", config_.sweep.kind}, {"points", ctr.size()}, {"pcc", cj}}.dump(2) + "\n");
  record("sweep/scatter.csv");
  record("sweep/correlation.csv");
  record("sweep/correlation.json");
}

}  // namespace bcd4rec::pipeline
