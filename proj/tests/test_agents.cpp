#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include "bcd4rec/agents/learner.hpp"
#include "bcd4rec/agents/losses.hpp"
#include "bcd4rec/agents/returns.hpp"
#include "bcd4rec/agents/td_loss.hpp"
#include "bcd4rec/batch_gen.hpp"
#include "bcd4rec/errors.hpp"
#include "bcd4rec/nn/grad_check.hpp"
#include "bcd4rec/policies.hpp"

using namespace bcd4rec;
using namespace bcd4rec::agents;

namespace {

data::BatchDataset small_dataset(int sessions = 60, std::uint64_t seed = 1) {
  sim::EnvConfig env;
  env.num_categories = 4;
  env.num_items = 16;
  env.max_episode_len = 8;
  const auto logs = data::generate_batch(env, policies::RandomPolicy(), sessions, seed, 4);
  return data::split_dataset(logs, env.num_items, 4, 0.2, seed);
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

/// Encoder that ignores its input and returns `s`; phi(tau) = 1 for every tau.
QNetworkParams constant_network(const Vector& s, const Matrix& item_rows) {
  Rng rng(0);
  QNetworkParams p = init_q_network(static_cast<int>(item_rows.rows()), static_cast<int>(s.size()), 1, 2, rng);
  p.encoder.visit([](const std::string&, Matrix& m) { m.setZero(); });
  p.encoder.proj_b = s;
  p.quantile.w.setZero();
  p.quantile.b.setOnes();
  p.items.items() = item_rows;
  return p;
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

}  // namespace

TEST_CASE("huber and quantile huber") {
  CHECK(huber(0.0, 1.0) == 0.0);
  CHECK(huber(0.5, 1.0) == 0.125);
  CHECK(huber(2.0, 1.0) == 1.5);
  CHECK(quantile_huber(0.25, -1.0, 1.0) == 0.375);
  CHECK(quantile_huber(0.25, 2.0, 1.0) == 0.375);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double d = rng.uniform(-5, 5), k = rng.uniform(0.1, 3), t = rng.uniform();
    CHECK(quantile_huber(0.5, d, k) == quantile_huber(0.5, -d, k));
    CHECK(quantile_huber(0.5, d, k) == 0.5 * huber(d, k));
    CHECK(std::abs(quantile_huber(t, d, k) - oracle::quantile_huber(t, d, k)) <= 1e-12);
    const double h = 1e-6;
    CHECK(quantile_huber_derivative(t, d, k) ==
          doctest::Approx((quantile_huber(t, d + h, k) - quantile_huber(t, d - h, k)) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("agent config invariants") {
  for (AgentKind k : kAllAgentKinds) {
    const AgentConfig c = AgentConfig::defaults_for(k);
    CHECK_NOTHROW(c.validate());
    CHECK(agent_kind_from_string(std::string(to_string(k))) == k);
    const nlohmann::json j = c;
    CHECK(j.get<AgentConfig>().hash() == c.hash());
  }
  AgentConfig dqn = AgentConfig::defaults_for(AgentKind::dqn);
  dqn.num_quantiles = 5;
  CHECK_THROWS_AS(dqn.validate(), ConfigError);
  AgentConfig iqn = AgentConfig::defaults_for(AgentKind::iqn);
  iqn.beta = 0.3;
  CHECK_THROWS_AS(iqn.validate(), ConfigError);
  CHECK(agent_kind_from_string("bcd4rec") == AgentKind::bcd4rec);
  CHECK_THROWS_AS(agent_kind_from_string("SAC"), ConfigError);
}

TEST_CASE("target action selection") {
  Vector q(3);
  q << 1, 5, 9;
  Vector p(3);
  p << 0.45, 0.45, 0.1;
  const std::vector<ItemId> all{0, 1, 2};
  CHECK(select_target_action(q, all, &p, 0.3) == 1);
  CHECK(select_target_action(q, all, &p, 0.0) == 2);
  CHECK(select_target_action(q, std::vector<ItemId>{0}, &p, 0.3) == 0);
  CHECK(select_target_action(q, all, nullptr, 0.9) == 2);

  Vector tie(3);
  tie << 2, 2, 1;
  CHECK(argmax_over(tie, all) == 0);

  Rng rng(2);
  for (int t = 0; t < 500; ++t) {
    const int n = 1 + static_cast<int>(rng.below(10));
    Vector vals(n), probs(n);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = vals(i) = std::round(rng.uniform(-3, 3) * 2) / 2;
    const auto pr = oracle::softmax([&] {
      std::vector<double> l(static_cast<std::size_t>(n));
      for (auto& x : l) x = rng.uniform(-2, 2);
      return l;
    }());
    for (int i = 0; i < n; ++i) probs(i) = pr[static_cast<std::size_t>(i)];
    std::vector<ItemId> avail;
    for (ItemId i = 0; i < n; ++i)
      if (rng.bernoulli(0.7)) avail.push_back(i);
    if (avail.empty()) avail.push_back(static_cast<ItemId>(n - 1));
    const double beta = rng.bernoulli(0.2) ? 0.0 : rng.uniform(0, 0.6);
    const ItemId got = select_target_action(vals, avail, &probs, beta);
    CHECK(got == oracle::constrained_argmax(v, avail, &pr, beta));
    if (beta > 0) {
      const auto el = behavior::eligible_actions(probs, beta, avail);
      CHECK(std::find(el.begin(), el.end(), got) != el.end());
    }
    CHECK(argmax_over(2.0 * vals, avail) == argmax_over(vals, avail));
    CHECK(argmax_over(vals.array().exp().matrix(), avail) == argmax_over(vals, avail));
  }
}

TEST_CASE("td loss hand examples") {
  Vector s(2);
  s << 1, 0;
  Matrix rows(2, 2);
  rows << 2.5, 0, 2, 0;
  const QNetworkParams net = constant_network(s, rows);
  AgentConfig cfg = AgentConfig::defaults_for(AgentKind::dqn);
  cfg.gamma = 0.9;
  const std::vector<double> half{0.5};
  const std::vector<data::Transition> batch{{{}, 0, 1.0, {0}, false}};
  const auto res = td_loss(net, net, batch, cfg, half, half, nullptr);
  CHECK(res.target_actions == std::vector<ItemId>{1});
  CHECK(res.loss == doctest::Approx(0.0225).epsilon(1e-12));

  const std::vector<data::Transition> terminal{{{}, 0, 2.5, {0}, true}};
  CHECK(td_loss(net, net, terminal, cfg, half, half, nullptr).loss == 0.0);

  AgentConfig bc = AgentConfig::defaults_for(AgentKind::bcq);
  CHECK_THROWS_AS(td_loss(net, net, batch, bc, half, half, nullptr), ConfigError);
}

TEST_CASE("td loss matches the brute-force oracle") {
  Rng rng(3);
  for (int k : {1, 2, 5}) {
    for (AgentKind kind : {AgentKind::dqn, AgentKind::qrdqn, AgentKind::iqn, AgentKind::bcq, AgentKind::qrbcq,
                           AgentKind::bcd4rec}) {
      AgentConfig cfg = small_config(kind);
      if (!is_distributional(kind) && k != 1) continue;
      cfg.num_quantiles = k;
      for (int trial = 0; trial < 10; ++trial) {
        const QNetworkParams online = init_q_network(7, 4, 1, 5, rng);
        const QNetworkParams target = init_q_network(7, 4, 1, 5, rng);
        const auto m = nn::init_softmax_model(7, 4, 1, rng);
        std::vector<double> taus(static_cast<std::size_t>(k)), ttaus(static_cast<std::size_t>(k));
        for (auto& t : taus) t = rng.uniform();
        for (auto& t : ttaus) t = rng.uniform();
        if (is_batch_constrained(kind)) cfg.beta = rng.uniform(0.05, 0.4);
        const auto batch = random_batch(rng, 5, 7, 3);
        const double got = td_loss(online, target, batch, cfg, taus, ttaus, &m).loss;
        const double want = oracle::td_loss(online, target, batch, cfg, taus, ttaus, &m);
        CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
      }
    }
  }
}

TEST_CASE("td loss gradients match finite differences") {
  for (AgentKind kind : {AgentKind::dqn, AgentKind::qrdqn, AgentKind::bcd4rec}) {
    Rng rng(4);
    AgentConfig cfg = small_config(kind);
    const std::vector<double> taus =
        cfg.tau_mode == TauMode::fixed_midpoints ? nn::quantile_midpoints(cfg.num_quantiles) : std::vector<double>{0.2, 0.55, 0.9};
    // Redraw until every target argmax has a clear margin, so that the
    // finite-difference steps cannot switch the selected target action.
    for (int attempt = 0;; ++attempt) {
      REQUIRE(attempt < 100);
      QNetworkParams online = init_q_network(6, 4, 2, 5, rng);
      const QNetworkParams target = init_q_network(6, 4, 2, 5, rng);
      const auto m = nn::init_softmax_model(6, 4, 1, rng);
      const auto batch = random_batch(rng, 6, 6, 3);
      std::vector<std::vector<ItemId>> next;
      for (const auto& t : batch) next.push_back(t.next_state);
      const Matrix q = mean_q_values(online, next, taus);
      double margin = 1e300;
      for (std::size_t b = 0; b < next.size(); ++b) {
        std::vector<double> v;
        for (ItemId a : available_items(6, next[b])) v.push_back(q(a, static_cast<Eigen::Index>(b)));
        std::sort(v.rbegin(), v.rend());
        for (std::size_t i = 1; i < v.size(); ++i) margin = std::min(margin, v[i - 1] - v[i]);
      }
      if (margin < 1e-4) continue;
      QNetworkParams grad = nn::zeros_like(online);
      td_loss(online, target, batch, cfg, taus, taus, &m, &grad);
      const auto entries = nn::finite_difference_check(nn::named_refs(online), nn::named_refs(grad), [&] {
        online.items.table.row(0).setZero();
        return td_loss(online, target, batch, cfg, taus, taus, &m).loss;
      });
      for (const auto& e : entries) CHECK_MESSAGE(e.relative_error < 1e-4, to_string(kind), " ", e.name);
      break;
    }
  }
}

TEST_CASE("greedy agent and q_bar") {
  Vector s(2);
  s << 1, 0;
  Matrix rows(2, 2);
  rows << 3, 0, 1, 0;
  const QAgent agent(constant_network(s, rows), 1);
  const std::vector<std::vector<ItemId>> states{{}, {0}};
  CHECK(q_bar(agent, states) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(agent.greedy_action({}, std::vector<ItemId>{1}) == 1);

  Rng rng(5);
  QNetworkParams zero = init_q_network(5, 4, 1, 3, rng);
  zero.visit([](const std::string&, Matrix& m) { m.setZero(); });
  CHECK(q_bar(QAgent(zero, 3), states) == 0.0);

  const QNetworkParams p = init_q_network(9, 4, 1, 6, rng);
  const QAgent a(p, 4);
  std::vector<std::vector<ItemId>> many;
  double want = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<ItemId> st;
    for (int k = 0; k < static_cast<int>(rng.below(4)); ++k) st.push_back(static_cast<ItemId>(rng.below(9)));
    const Vector enc = nn::encode_state(p.encoder, p.items, st);
    double best = -1e300;
    for (ItemId it = 0; it < 9; ++it)
      if (std::find(st.begin(), st.end(), it) == st.end()) best = std::max(best, oracle::mean_q(p, enc, a.eval_taus(), it));
    want += best / 100.0;
    many.push_back(st);
  }
  CHECK(std::abs(q_bar(a, many) - want) < 1e-12);
}

TEST_CASE("learner determinism, target sync and zero iterations") {
  const auto ds = small_dataset();
  AgentConfig cfg = small_config(AgentKind::bcd4rec);
  cfg.iterations = 0;
  Learner init(ds, cfg, 9);
  const auto t0 = train_batch_agent(ds, cfg, 9);
  QNetworkParams restored = init.online();
  t0.checkpoint.get_params("online.", restored);
  CHECK(nn::bitwise_equal(restored, init.online()));

  Learner a(ds, cfg, 9), b(ds, cfg, 9);
  for (int t = 1; t <= 20; ++t) {
    const QNetworkParams target_before = a.target();
    a.step();
    b.step();
    if (t % cfg.target_update_rate == 0) {
      CHECK(nn::bitwise_equal(a.target(), a.online()));
    } else {
      CHECK(nn::bitwise_equal(a.target(), target_before));
    }
  }
  CHECK(nn::bitwise_equal(a.online(), b.online()));
  CHECK(nn::bitwise_equal(*a.behavior(), *b.behavior()));
  CHECK(a.minibatch_indices(3) == b.minibatch_indices(3));
}

TEST_CASE("resumed training matches unbroken training") {
  test::TempDir dir("learner");
  const auto ds = small_dataset();
  for (AgentKind kind : {AgentKind::dqn, AgentKind::iqn, AgentKind::bcd4rec}) {
    const AgentConfig cfg = small_config(kind);
    Learner full(ds, cfg, 4);
    for (int t = 0; t < 10; ++t) full.step();

    Learner first(ds, cfg, 4);
    for (int t = 0; t < 5; ++t) first.step();
    nn::checkpoint_save(first.checkpoint(), dir / "half.ckpt");
    Learner resumed(ds, nn::checkpoint_load(dir / "half.ckpt"));
    CHECK(resumed.iteration() == 5);
    for (int t = 0; t < 5; ++t) resumed.step();
    CHECK(nn::bitwise_equal(full.online(), resumed.online()));
    CHECK(nn::bitwise_equal(full.target(), resumed.target()));
    if (is_batch_constrained(kind)) CHECK(nn::bitwise_equal(*full.behavior(), *resumed.behavior()));
  }
}

TEST_CASE("BCD4Rec with beta 0 follows the IQN trajectory") {
  const auto ds = small_dataset();
  AgentConfig iqn = small_config(AgentKind::iqn);
  AgentConfig bcd = small_config(AgentKind::bcd4rec);
  bcd.beta = 0.0;
  Learner a(ds, iqn, 12), b(ds, bcd, 12);
  for (int t = 0; t < 100; ++t) {
    CHECK(a.step() == b.step());
  }
  CHECK(nn::bitwise_equal(a.online(), b.online()));
  CHECK(nn::bitwise_equal(a.target(), b.target()));
}

TEST_CASE("training curve and checkpointed agent") {
  test::TempDir dir("curve");
  const auto ds = small_dataset();
  AgentConfig cfg = small_config(AgentKind::qrdqn);
  cfg.iterations = 25;
  const auto res = train_batch_agent(ds, cfg, 3);
  REQUIRE(res.curve.size() == 3);
  CHECK(res.curve.back().iteration == 25);
  const QAgent agent = agent_from_checkpoint(res.checkpoint);
  CHECK(agent.eval_taus() == nn::quantile_midpoints(3));
  CHECK(agent_config_from_checkpoint(res.checkpoint).hash() == cfg.hash());
  write_training_curve(res.curve, dir / "c.csv");
  CHECK(test::slurp(dir / "c.csv").rfind("iteration,loss,q_bar\n", 0) == 0);
}

TEST_CASE("discounted returns") {
  const std::vector<double> fours(20, 4.0);
  CHECK(discounted_return(fours, 0.9, 20) == doctest::Approx(4 * (1 - std::pow(0.9, 20)) / 0.1).epsilon(1e-12));
  CHECK(discounted_return(fours, 0.9, 20) == doctest::Approx(35.136).epsilon(1e-4));
  const std::vector<double> rs{3, 1, 2};
  CHECK(discounted_return(rs, 0.0, 3) == 3.0);

  const auto groups = random_categories(20, 3, 7);
  REQUIRE(groups.size() == 3);
  CHECK(std::is_sorted(groups.begin(), groups.end()));
  ReturnSampling rs_cfg;
  rs_cfg.n_users = 50;
  rs_cfg.first_action = 5;
  const auto samples = collect_return_samples(policies::RandomPolicy(), sim::EnvConfig{}, groups, rs_cfg);
  for (int g : groups)
    CHECK(std::count_if(samples.begin(), samples.end(), [&](const ReturnSample& s) { return s.group == g; }) == 50);
  for (const auto& s : samples) CHECK((s.value >= 0 && s.value <= 4 * (1 - std::pow(0.9, 20)) / 0.1 + 1e-9));
  rs_cfg.horizon = 21;
  CHECK_THROWS_AS(collect_return_samples(policies::RandomPolicy(), sim::EnvConfig{}, groups, rs_cfg), std::domain_error);
}
