// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Seeded pipeline runs are cached under
// --work-dir; stages whose inputs are unchanged are not re-executed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "oracles.hpp"

#include "bcd4rec/agents/learner.hpp"
#include "bcd4rec/agents/losses.hpp"
#include "bcd4rec/agents/td_loss.hpp"
#include "bcd4rec/batch_gen.hpp"
#include "bcd4rec/eval_metrics.hpp"
#include "bcd4rec/nn/grad_check.hpp"
#include "bcd4rec/pipeline/config.hpp"
#include "bcd4rec/pipeline/runner.hpp"
#include "bcd4rec/sim_env.hpp"

using namespace bcd4rec;
using namespace bcd4rec::agents;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Tolerances.
constexpr double kOracleTol = 1e-12;
constexpr int kOracleInstances = 500;
constexpr double kFdStep = 1e-5;
constexpr double kGradTol = 1e-4;
constexpr double kTargetMargin = 1e-4;
constexpr double kProbSumTol = 1e-12;
constexpr int kInterestChains = 100000;
constexpr double kMonteCarloTol = 0.02;
constexpr int kMonteCarloDraws = 20000;
constexpr double kDelta = 0.075;
constexpr double kDeltaTol = 1e-15;
constexpr int kReductionIterations = 100;
constexpr double kBehaviorGain = 3.0;
constexpr double kDqnSlack = 2.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

/// Largest error seen for one kernel over its instances.
struct ErrorLog {
  std::map<std::string, std::pair<int, double>> kernels;
  void add(const std::string& kernel, double error) {
    auto& [n, worst] = kernels[kernel];
    ++n;
    if (!(error <= worst)) worst = std::isnan(error) ? INFINITY : std::max(worst, error);
  }
};

std::vector<double> random_vector(Rng& rng, int n, double lo, double hi) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

std::vector<data::Transition> random_batch(Rng& rng, int n, int num_items, int L) {
  std::vector<data::Transition> out;
  for (int i = 0; i < n; ++i) {
    data::Transition t;
    const int len = static_cast<int>(rng.below(static_cast<std::uint64_t>(L) + 1));
    for (int k = 0; k < len; ++k) t.state.push_back(static_cast<ItemId>(rng.below(static_cast<std::uint64_t>(num_items))));
    t.action = static_cast<ItemId>(rng.below(static_cast<std::uint64_t>(num_items)));
    t.reward = rng.bernoulli(0.4) ? 4.0 : 0.0;
    t.next_state = t.state;
    if (t.reward > 0) {
      t.next_state.push_back(t.action);
      if (static_cast<int>(t.next_state.size()) > L) t.next_state.erase(t.next_state.begin());
    }
    t.done = rng.bernoulli(0.2);
    out.push_back(std::move(t));
  }
  return out;
}

AgentConfig small_config(AgentKind kind) {
  AgentConfig c = AgentConfig::defaults_for(kind);
  c.embedding_dim = 6;
  c.num_cosines = 8;
  c.gru_layers = 1;
  c.history_len = 4;
  c.batch_size = 8;
  c.target_update_rate = 7;
  c.eval_interval = 10;
  c.eval_states = 20;
  if (is_distributional(kind)) c.num_quantiles = 3;
  return c;
}

Outcome oracle_suite() {
  ErrorLog log;
  Rng rng(101);
  for (int i = 0; i < kOracleInstances; ++i) {
    const double d = rng.uniform(-5, 5), k = rng.uniform(0.1, 3), t = rng.uniform();
    log.add("huber", std::abs(huber(d, k) - oracle::huber(d, k)));
    log.add("quantile_huber", std::abs(quantile_huber(t, d, k) - oracle::quantile_huber(t, d, k)));
  }

  for (int K : {1, 2, 5}) {
    const std::string name = "td_loss K=" + std::to_string(K);
    std::vector<AgentKind> kinds;
    for (AgentKind kind : kAllAgentKinds)
      if (K == 1 || is_distributional(kind)) kinds.push_back(kind);
    for (int i = 0; i < kOracleInstances; ++i) {
      const AgentKind kind = kinds[static_cast<std::size_t>(i) % kinds.size()];
      AgentConfig cfg = small_config(kind);
      cfg.num_quantiles = K;
      if (is_batch_constrained(kind)) cfg.beta = rng.uniform(0.05, 0.4);
      const QNetworkParams online = init_q_network(7, 4, 1, 5, rng);
      const QNetworkParams target = init_q_network(7, 4, 1, 5, rng);
      const auto m = nn::init_softmax_model(7, 4, 1, rng);
      const auto taus = random_vector(rng, K, 0, 1), ttaus = random_vector(rng, K, 0, 1);
      const auto batch = random_batch(rng, 5, 7, 3);
      const double got = td_loss(online, target, batch, cfg, taus, ttaus, &m).loss;
      const double want = oracle::td_loss(online, target, batch, cfg, taus, ttaus, &m);
      log.add(name, std::abs(got - want) / std::max(1.0, std::abs(want)));
    }
  }

  for (int i = 0; i < kOracleInstances; ++i) {
    const int n = 1 + static_cast<int>(rng.below(10));
    Vector vals(n), probs(n);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) v[static_cast<std::size_t>(a)] = vals(a) = std::round(rng.uniform(-3, 3) * 2) / 2;
    const auto p = oracle::softmax(random_vector(rng, n, -2, 2));
    for (int a = 0; a < n; ++a) probs(a) = p[static_cast<std::size_t>(a)];
    std::vector<ItemId> avail;
    for (ItemId a = 0; a < n; ++a)
      if (rng.bernoulli(0.7)) avail.push_back(a);
    if (avail.empty()) avail.push_back(static_cast<ItemId>(n - 1));
    const double beta = rng.bernoulli(0.2) ? 0.0 : rng.uniform(0, 0.6);
    const bool same = select_target_action(vals, avail, &probs, beta) == oracle::constrained_argmax(v, avail, &p, beta);
    log.add("select_target_action", same ? 0.0 : 1.0);
  }

  for (int i = 0; i < kOracleInstances; ++i) {
    const int n = 2 + static_cast<int>(rng.below(9));
    const auto m = nn::init_softmax_model(n, 4, 1, rng);
    std::vector<ItemId> state;
    const int len = static_cast<int>(rng.below(5));
    for (int k = 0; k < len; ++k) state.push_back(static_cast<ItemId>(rng.below(static_cast<std::uint64_t>(n))));
    const std::vector<std::vector<ItemId>> states{state};
    const Matrix got = behavior::behavior_probabilities(m, states);
    const auto want = oracle::behavior_probs(m, state);
    double err = 0;
    for (int a = 0; a < n; ++a) err = std::max(err, std::abs(got(a, 0) - want[static_cast<std::size_t>(a)]));
    log.add("softmax p_M", err);
  }

  for (int i = 0; i < kOracleInstances; ++i) {
    std::vector<double> a(1 + rng.below(8)), b(1 + rng.below(8));
    for (auto& x : a) x = std::round(rng.uniform(0, 10));
    for (auto& x : b) x = rng.uniform(0, 10);
    log.add("W1", std::abs(eval::wasserstein_1d(a, b) - oracle::wasserstein(a, b)));

    std::vector<double> f(1 + rng.below(12));
    for (auto& x : f) x = static_cast<double>(rng.below(6));
    log.add("gini", std::abs(eval::gini(f) - oracle::gini(f)));

    const int n = 3 + static_cast<int>(rng.below(10));
    const auto x = random_vector(rng, n, -5, 5), y = random_vector(rng, n, -5, 5);
    const auto r = eval::correlation(x, y, eval::CorrelationMode::value);
    log.add("pearson", r ? std::abs(*r - oracle::pearson(x, y)) : INFINITY);
  }

  Outcome out{true, ""};
  for (const auto& [name, entry] : log.kernels) {
    const auto [n, worst] = entry;
    if (n < kOracleInstances || !(worst <= kOracleTol)) out.pass = false;
    out.detail += (out.detail.empty() ? "" : ", ") + name + " " + sci(worst);
  }
  out.detail = "max error over >=" + std::to_string(kOracleInstances) + " instances each: " + out.detail;
  return out;
}

Outcome gradient_suite() {
  Outcome out{true, ""};
  double worst = 0;
  std::string worst_name;
  auto take = [&](const std::string& prefix, const std::vector<nn::GradCheckEntry>& entries) {
    for (const auto& e : entries)
      if (!(e.relative_error <= worst)) {
        worst = std::isnan(e.relative_error) ? INFINITY : e.relative_error;
        worst_name = prefix + " " + e.name;
      }
  };

  Rng rng(202);
  int groups = 0;
  for (AgentKind kind : kAllAgentKinds) {
    AgentConfig cfg = small_config(kind);
    if (is_batch_constrained(kind)) cfg.beta = 0.2;
    const std::vector<double> levels = cfg.tau_mode == TauMode::fixed_midpoints
                                           ? nn::quantile_midpoints(cfg.num_quantiles)
                                           : random_vector(rng, cfg.num_quantiles, 0, 1);
    for (int attempt = 0;; ++attempt) {
      if (attempt == 200) return {false, std::string("no well-separated instance for ") + std::string(to_string(kind))};
      QNetworkParams online = init_q_network(6, 4, 2, 5, rng);
      const QNetworkParams target = init_q_network(6, 4, 2, 5, rng);
      const auto m = nn::init_softmax_model(6, 4, 1, rng);
      const auto batch = random_batch(rng, 6, 6, 3);
      std::vector<std::vector<ItemId>> next;
      for (const auto& t : batch) next.push_back(t.next_state);
      const Matrix q = mean_q_values(online, next, levels);
      double margin = INFINITY;
      for (std::size_t b = 0; b < next.size(); ++b) {
        std::vector<double> v;
        for (ItemId a : available_items(6, next[b])) v.push_back(q(a, static_cast<Eigen::Index>(b)));
        std::sort(v.rbegin(), v.rend());
        for (std::size_t i = 1; i < v.size(); ++i) margin = std::min(margin, v[i - 1] - v[i]);
      }
      if (margin < kTargetMargin) continue;
      QNetworkParams grad = nn::zeros_like(online);
      td_loss(online, target, batch, cfg, levels, levels, &m, &grad);
      const auto entries = nn::finite_difference_check(
          nn::named_refs(online), nn::named_refs(grad),
          [&] {
            online.items.table.row(0).setZero();
            return td_loss(online, target, batch, cfg, levels, levels, &m).loss;
          },
          kFdStep);
      groups += static_cast<int>(entries.size());
      take("td_loss " + std::string(to_string(kind)), entries);
      break;
    }
  }

  auto m = nn::init_softmax_model(9, 4, 2, rng);
  const std::vector<std::vector<ItemId>> states{{1, 5}, {}, {8, 2, 3}, {4}};
  const std::vector<ItemId> targets{0, 6, 3, 4};
  auto g = nn::zeros_like(m);
  nn::softmax_nll(m, states, targets, &g);
  const auto entries = nn::finite_difference_check(
      nn::named_refs(m), nn::named_refs(g),
      [&] {
        m.items.table.row(0).setZero();
        return nn::softmax_nll(m, states, targets);
      },
      kFdStep);
  groups += static_cast<int>(entries.size());
  take("behavior NLL", entries);

  out.pass = worst < kGradTol;
  out.detail = std::to_string(groups) + " parameter groups, worst relative error " + sci(worst) + " (" + worst_name + ")";
  return out;
}

Outcome simulator_invariants() {
  using namespace bcd4rec::sim;
  Outcome out{true, ""};
  Rng rng(303);

  double worst_sum = 0;
  for (int t = 0; t < 10000; ++t) {
    UserState u;
    u.interests = random_vector(rng, 3, -1, 1);
    const std::vector<Item> slate{{0, static_cast<int>(rng.below(3))}};
    double total = 0;
    for (double p : choice_probabilities(u, slate, rng.uniform(-1, 1))) total += p;
    worst_sum = std::max(worst_sum, std::abs(total - 1.0));
  }

  bool bounded = true;
  for (int chain = 0; chain < kInterestChains && bounded; ++chain) {
    UserState u;
    u.interests = {rng.uniform(-1, 1)};
    const double y = rng.uniform();
    for (int k = 0; k < 20; ++k) {
      update_interest(u, Item{0, 0}, y, rng);
      bounded = bounded && u.interests[0] >= -1.0 && u.interests[0] <= 1.0;
    }
  }

  EnvConfig cfg;
  cfg.max_episode_len = 1;
  Environment env(cfg, 21);
  const UserState base = env.reset(0);
  double worst_mc = 0;
  for (ItemId item : {3, 57, 120, 199}) {
    const double p = choice_probabilities(base, std::vector<Item>{env.item(item)}, env.skip_score(base))[0];
    int clicks = 0;
    for (int t = 0; t < kMonteCarloDraws; ++t) {
      env.reset(static_cast<std::uint64_t>(t));
      UserState u = base;
      if (env.step(u, item).choice == Choice::click) ++clicks;
    }
    worst_mc = std::max(worst_mc, std::abs(static_cast<double>(clicks) / kMonteCarloDraws - p));
  }

  double worst_delta = 0;
  for (int t = 0; t < 1000; ++t) {
    Rng r = Rng::stream(7, "delta", static_cast<std::uint64_t>(t));
    UserState u;
    u.interests = {0.5};
    update_interest(u, Item{0, 0}, 0.3, r);
    worst_delta = std::max(worst_delta, std::abs(std::abs(u.interests[0] - 0.5) - kDelta));
  }

  out.pass = worst_sum <= kProbSumTol && bounded && worst_mc <= kMonteCarloTol && worst_delta <= kDeltaTol;
  out.detail = "|sum p - 1| " + sci(worst_sum) + ", " + std::to_string(kInterestChains) + " chains " +
               (bounded ? "bounded" : "left [-1,1]") + ", MC click error " + fmt(worst_mc, 4) + ", |delta - 0.075| " +
               sci(worst_delta);
  return out;
}

Outcome reduction_identities() {
  sim::EnvConfig env;
  env.num_categories = 4;
  env.num_items = 16;
  env.max_episode_len = 8;
  const auto logs = data::generate_batch(env, policies::RandomPolicy(), 60, 1, 4);
  const auto ds = data::split_dataset(logs, env.num_items, 4, 0.2, 1);
  const AgentConfig iqn = small_config(AgentKind::iqn);
  AgentConfig bcd = small_config(AgentKind::bcd4rec);
  bcd.beta = 0.0;
  Learner a(ds, iqn, 12), b(ds, bcd, 12);
  bool same_loss = true;
  for (int t = 0; t < kReductionIterations; ++t) same_loss = (a.step() == b.step()) && same_loss;
  const bool same_params = nn::bitwise_equal(a.online(), b.online()) && nn::bitwise_equal(a.target(), b.target());

  Rng rng(404);
  bool half_huber = true;
  for (int i = 0; i < kOracleInstances; ++i) {
    const double d = rng.uniform(-5, 5), k = rng.uniform(0.1, 3);
    half_huber = half_huber && quantile_huber(0.5, d, k) == 0.5 * huber(d, k);
  }
  // K = 1 with tau = 0.5 through the full loss: 0.5 * Huber of the TD error.
  Vector s(2);
  s << 1, 0;
  QNetworkParams net = init_q_network(2, 2, 1, 2, rng);
  net.encoder.visit([](const std::string&, Matrix& m) { m.setZero(); });
  net.encoder.proj_b = s;
  net.quantile.w.setZero();
  net.quantile.b.setOnes();
  net.items.items() << 2.5, 0, 2, 0;
  AgentConfig q1 = AgentConfig::defaults_for(AgentKind::iqn);
  q1.num_quantiles = 1;
  q1.gamma = 0.9;
  const std::vector<double> half{0.5};
  const std::vector<data::Transition> batch{{{}, 0, 1.0, {0}, false}};
  const double loss = td_loss(net, net, batch, q1, half, half, nullptr).loss;
  const double want = 0.5 * oracle::huber(1.0 + 0.9 * 2.0 - 2.5, q1.kappa);
  half_huber = half_huber && std::abs(loss - want) <= kOracleTol;

  return {same_loss && same_params && half_huber,
          std::string("beta=0 vs IQN over ") + std::to_string(kReductionIterations) + " iterations: " +
              (same_loss && same_params ? "bitwise identical" : "diverged") + "; tau=0.5 loss " +
              (half_huber ? "equals" : "differs from") + " 0.5*Huber"};
}

// --- seeded pipeline runs --------------------------------------------------

struct SeedResult {
  std::uint64_t seed = 0;
  std::string error;
  double seconds = 0;
  std::map<std::string, double> ctr;
  std::map<std::string, std::map<std::string, double>> w1;
  double pcc_q_bar = NAN, pcc_recall = NAN;
  std::string behavior_label;
};

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

SeedResult run_seed(const json& base, std::uint64_t seed, const fs::path& dir) {
  SeedResult r;
  r.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    json doc = base;
    doc["seed"] = seed;
    doc["output_dir"] = dir.string();
    pipeline::Runner runner(pipeline::config_from_json(doc), pipeline::RunOptions{false, nullptr, 1});
    runner.run_pipeline();
    runner.run_sweep();
    const json online = read_json(dir / "eval/online.json");
    for (const auto& rep : online["reports"]) r.ctr[rep["policy"].get<std::string>()] = rep["ctr"].get<double>();
    for (const auto& [policy, groups] : online["wasserstein"].items())
      for (const auto& [g, w] : groups.items()) r.w1[policy][g] = w.get<double>();
    r.behavior_label = "Behavior(" + runner.config().behavior_tag + ")";
    const json corr = read_json(dir / "sweep/correlation.json");
    const std::string rlabel = "recall@" + std::to_string(runner.config().sweep.recall_x);
    auto value = [&](const std::string& key) {
      const auto& v = corr["pcc"][key]["value"];
      return v.is_null() ? NAN : v.get<double>();
    };
    r.pcc_q_bar = value("q_bar");
    r.pcc_recall = value(rlabel);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double mean_of(const std::vector<SeedResult>& runs, const std::string& policy) {
  double s = 0;
  for (const auto& r : runs) s += r.ctr.at(policy);
  return s / static_cast<double>(runs.size());
}

Outcome table_ordering(const std::vector<SeedResult>& runs) {
  const std::string behavior = runs.front().behavior_label;
  const double b = mean_of(runs, behavior), bcd = mean_of(runs, "BCD4Rec"), iqn = mean_of(runs, "IQN"),
               dqn = mean_of(runs, "DQN");
  const bool a = bcd >= b + kBehaviorGain;
  const bool order = bcd >= iqn && iqn >= dqn;
  const bool c = dqn <= b + kDqnSlack;
  return {a && order && c, "mean CTR behavior " + fmt(b, 2) + ", BCD4Rec " + fmt(bcd, 2) + ", IQN " + fmt(iqn, 2) +
                               ", DQN " + fmt(dqn, 2) + "; (a) " + (a ? "ok" : "fail") + " (b) " +
                               (order ? "ok" : "fail") + " (c) " + (c ? "ok" : "fail")};
}

Outcome wasserstein_trend(const std::vector<SeedResult>& runs) {
  int closer = 0, total = 0;
  std::string per_seed;
  for (const auto& r : runs) {
    int c = 0;
    for (const auto& [g, w] : r.w1.at("BCD4Rec")) {
      ++total;
      if (w < r.w1.at("DQN").at(g)) ++c;
    }
    closer += c;
    per_seed += (per_seed.empty() ? "" : " ") + std::to_string(c) + "/" + std::to_string(r.w1.at("BCD4Rec").size());
  }
  return {3 * closer >= 2 * total, "BCD4Rec closer to the oracle than DQN in " + std::to_string(closer) + " of " +
                                       std::to_string(total) + " seed-groups (per seed " + per_seed + ")"};
}

Outcome selection_trend(const std::vector<SeedResult>& runs) {
  int wins = 0;
  std::string detail;
  for (const auto& r : runs) {
    if (r.pcc_q_bar > r.pcc_recall) ++wins;
    detail += (detail.empty() ? "" : "; ") + std::string("seed ") + std::to_string(r.seed) + " q_bar " +
              fmt(r.pcc_q_bar) + " vs recall " + fmt(r.pcc_recall);
  }
  return {3 * wins >= 2 * static_cast<int>(runs.size()),
          "PCC with CTR, q_bar above recall in " + std::to_string(wins) + " of " + std::to_string(runs.size()) +
              " sweeps (" + detail + ")"};
}

Outcome pretraining_trend(const std::vector<SeedResult>& runs) {
  const double pt = mean_of(runs, "BCD4Rec"), rnd = mean_of(runs, "BCD4Rec-noPT");
  return {pt >= rnd, "mean CTR pretrained " + fmt(pt, 2) + " vs random init " + fmt(rnd, 2)};
}

std::map<std::string, std::string> csv_files(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().extension() == ".csv") {
      std::ifstream in(e.path(), std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      out[fs::relative(e.path(), root).generic_string()] = ss.str();
    }
  return out;
}

Outcome reproducibility(const fs::path& config_path, const fs::path& work) {
  std::map<std::string, std::string> files[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = work / (i == 0 ? "repro_a" : "repro_b");
    fs::remove_all(dir);
    json doc = read_json(config_path);
    doc["output_dir"] = dir.string();
    pipeline::Runner runner(pipeline::config_from_json(doc), pipeline::RunOptions{false, nullptr, i == 0 ? 1 : 4});
    runner.run_pipeline();
    runner.run_sweep();
    files[i] = csv_files(dir);
  }
  std::vector<std::string> differing;
  for (const auto& [name, content] : files[0]) {
    auto it = files[1].find(name);
    if (it == files[1].end() || it->second != content) differing.push_back(name);
  }
  const bool pass = differing.empty() && files[0].size() == files[1].size() && !files[0].empty();
  std::string detail = std::to_string(files[0].size()) + " metric CSVs compared, ";
  detail += differing.empty() ? "all byte-identical" : std::to_string(differing.size()) + " differ (" + differing.front() + ")";
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  fs::path work = "acceptance_runs";
  fs::path config_path = fs::path(BCD4REC_SOURCE_DIR) / "configs/acceptance.json";
  fs::path repro_config = fs::path(BCD4REC_SOURCE_DIR) / "configs/smoke.json";
  std::vector<std::uint64_t> seeds{1, 2, 3};
  app.add_option("--work-dir", work, "Directory for pipeline runs");
  app.add_option("--config", config_path, "Config for the seeded runs")->check(CLI::ExistingFile);
  app.add_option("--repro-config", repro_config, "Config for the reproducibility check")->check(CLI::ExistingFile);
  app.add_option("--seeds", seeds, "Seeds for the seeded runs")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail << " (" << fmt(secs, 1)
              << " s)" << std::endl;
  };

  report(1, "numerical-kernel oracles", oracle_suite);
  report(2, "gradient suite", gradient_suite);
  report(3, "simulator invariants", simulator_invariants);
  report(4, "reduction identities", reduction_identities);

  fs::create_directories(work);
  const json base = read_json(config_path);
  std::vector<SeedResult> runs(seeds.size());
  {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < seeds.size(); ++i)
      threads.emplace_back([&, i] { runs[i] = run_seed(base, seeds[i], work / ("seed_" + std::to_string(seeds[i]))); });
  }
  std::string failed;
  for (const auto& r : runs) {
    std::cout << "  seed " << r.seed << ": " << fmt(r.seconds, 1) << " s";
    for (const auto& [p, c] : r.ctr) std::cout << ", " << p << " " << fmt(c, 2);
    std::cout << std::endl;
    if (!r.error.empty()) failed += "seed " + std::to_string(r.seed) + ": " + r.error + "; ";
  }
  auto seeded = [&](const std::function<Outcome(const std::vector<SeedResult>&)>& f) {
    return [&, f]() -> Outcome {
      if (!failed.empty()) return {false, "pipeline failed: " + failed};
      return f(runs);
    };
  };
  report(5, "ordering of online CTR", seeded(table_ordering));
  report(6, "Wasserstein distance to the oracle", seeded(wasserstein_trend));
  report(7, "offline hyperparameter selection", seeded(selection_trend));
  report(8, "pretrained item embeddings", seeded(pretraining_trend));
  report(9, "reproducibility", [&] { return reproducibility(repro_config, work); });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
