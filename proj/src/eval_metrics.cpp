#include "bcd4rec/eval_metrics.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

namespace bcd4rec::eval {

double response_rate(std::span<const Choice> responses, Choice target) {
  if (responses.empty()) return 0.0;
  const auto hits = std::count(responses.begin(), responses.end(), target);
  return 100.0 * static_cast<double>(hits) / static_cast<double>(responses.size());
}

OnlineEvalReport online_eval(const policies::Policy& policy, const sim::EnvConfig& env_config,
                             const OnlineEvalOptions& options) {
  env_config.validate();
  if (options.workers < 1) throw std::domain_error("online_eval: workers must be positive");
  const std::uint64_t env_seed = Rng::stream(options.seed, "eval-users").next_u64();
  int max_x = 1;
  for (int x : options.coverage_x) {
    if (x < 1) throw std::domain_error("coverage X must be positive");
    max_x = std::max(max_x, x);
  }
  policies::EpisodeOptions eo;
  eo.history_len = options.history_len;
  eo.list_size = static_cast<std::size_t>(max_x);
  eo.policy_seed = Rng::stream(options.seed, "eval-policy").next_u64();

  struct EpisodeRecord {
    std::vector<std::vector<ItemId>> lists;
    std::int64_t hits = 0, same_category = 0;
    double ret = 0.0;
  };
  const auto n = static_cast<std::size_t>(std::max(0, options.n_users));
  std::vector<EpisodeRecord> records(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    sim::Environment env(env_config, env_seed);
    for (std::size_t u = next++; u < n; u = next++) {
      try {
        EpisodeRecord& r = records[u];
        policies::run_episode(env, policy, u, eo, [&](const policies::StepView& v) {
          const ItemId shown = v.recommended.front();
          r.lists.emplace_back(v.recommended.begin(), v.recommended.end());
          if (v.outcome->choice == options.target) ++r.hits;
          if (env.item(shown).category == v.user->top_category()) ++r.same_category;
          r.ret += v.outcome->reward;
        });
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const int threads = std::min<int>(options.workers, static_cast<int>(std::max<std::size_t>(n, 1)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  OnlineEvalReport rep;
  rep.policy = policy.name();
  rep.item_counts.assign(static_cast<std::size_t>(env_config.num_items), 0);
  std::map<int, std::vector<char>> seen;
  for (int x : options.coverage_x) seen[x].assign(static_cast<std::size_t>(env_config.num_items), 0);
  std::int64_t hits = 0, same_category = 0;
  for (const auto& r : records) {
    for (const auto& list : r.lists) {
      ++rep.item_counts[static_cast<std::size_t>(list.front())];
      ++rep.steps;
      for (auto& [x, flags] : seen)
        for (std::size_t i = 0; i < list.size() && i < static_cast<std::size_t>(x); ++i)
          flags[static_cast<std::size_t>(list[i])] = 1;
    }
    hits += r.hits;
    same_category += r.same_category;
    rep.episode_returns.push_back(r.ret);
  }
  const double steps = std::max<double>(1.0, static_cast<double>(rep.steps));
  rep.ctr = rep.steps ? 100.0 * static_cast<double>(hits) / steps : 0.0;
  rep.category_accuracy = rep.steps ? 100.0 * static_cast<double>(same_category) / steps : 0.0;
  for (const auto& [x, flags] : seen)
    rep.coverage[x] = 100.0 * static_cast<double>(std::count(flags.begin(), flags.end(), 1)) /
                      static_cast<double>(env_config.num_items);
  return rep;
}

double category_accuracy(const policies::Policy& policy, const sim::EnvConfig& env_config, int n_users,
                         std::uint64_t seed) {
  OnlineEvalOptions o;
  o.n_users = n_users;
  o.seed = seed;
  o.coverage_x = {1};
  return online_eval(policy, env_config, o).category_accuracy;
}

std::vector<RecallPoint> recall_points(std::span<const data::SessionLog> sessions, int history_len) {
  std::vector<RecallPoint> out;
  for (const auto& s : sessions) {
    std::vector<ItemId> positives;
    for (const auto& st : s.steps) {
      if (!is_positive(st.choice)) continue;
      RecallPoint p;
      const std::size_t from =
          positives.size() > static_cast<std::size_t>(history_len) ? positives.size() - history_len : 0;
      p.state.assign(positives.begin() + static_cast<std::ptrdiff_t>(from), positives.end());
      p.excluded = positives;
      p.truth = st.item;
      out.push_back(std::move(p));
      positives.push_back(st.item);
    }
  }
  return out;
}

std::map<int, double> recall_at_x(const Scorer& scorer, std::span<const RecallPoint> points, int num_items,
                                  std::span<const int> xs) {
  if (points.empty()) throw std::domain_error("recall_at_x: no evaluation points");
  std::map<int, std::int64_t> hits;
  for (int x : xs) {
    if (x < 1) throw std::domain_error("recall_at_x: X must be positive");
    hits[x] = 0;
  }
  constexpr std::size_t kChunk = 256;
  for (std::size_t begin = 0; begin < points.size(); begin += kChunk) {
    const std::size_t n = std::min(kChunk, points.size() - begin);
    std::vector<std::vector<ItemId>> states;
    states.reserve(n);
    for (std::size_t i = 0; i < n; ++i) states.push_back(points[begin + i].state);
    const agents::Matrix scores = scorer(states);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = points[begin + i];
      const auto col = scores.col(static_cast<Eigen::Index>(i));
      std::set<ItemId> excluded(p.excluded.begin(), p.excluded.end());
      // Rank of the truth among available items: count strictly better items.
      std::int64_t better = 0;
      const double v = col(p.truth);
      for (ItemId a = 0; a < num_items; ++a) {
        if (a == p.truth || excluded.contains(a)) continue;
        if (col(a) > v || (col(a) == v && a < p.truth)) ++better;
      }
      for (auto& [x, h] : hits)
        if (better < x) ++h;
    }
  }
  std::map<int, double> out;
  for (const auto& [x, h] : hits) out[x] = 100.0 * static_cast<double>(h) / static_cast<double>(points.size());
  return out;
}

OfflineEvalReport offline_eval(const agents::QAgent& agent, const data::BatchDataset& dataset,
                               std::span<const int> xs, int q_bar_states) {
  OfflineEvalReport rep;
  const auto points = recall_points(dataset.validation_sessions, dataset.history_len);
  rep.recall = recall_at_x([&](std::span<const std::vector<ItemId>> s) { return agent.mean_q(s); }, points,
                           agent.num_items(), xs);
  std::vector<std::vector<ItemId>> states;
  for (const auto& t : dataset.validation) {
    if (q_bar_states > 0 && static_cast<int>(states.size()) >= q_bar_states) break;
    states.push_back(t.state);
  }
  rep.q_bar = agents::q_bar(agent, states);
  rep.validation_id = dataset.provenance.policy_id;
  return rep;
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::domain_error("wasserstein_1d: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  if (x.size() == y.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
    return s / static_cast<double>(x.size());
  }
  // Integrate |F_a - F_b| over the merged support.
  std::vector<double> all;
  all.reserve(x.size() + y.size());
  std::merge(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(all));
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  double total = 0.0;
  std::size_t ia = 0, ib = 0;
  for (std::size_t k = 0; k + 1 < all.size(); ++k) {
    while (ia < x.size() && x[ia] <= all[k]) ++ia;
    while (ib < y.size() && y[ib] <= all[k]) ++ib;
    total += std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb) * (all[k + 1] - all[k]);
  }
  return total;
}

double gini(std::span<const double> f) {
  if (f.empty()) return 0.0;
  const double sum = std::accumulate(f.begin(), f.end(), 0.0);
  if (sum == 0.0) return 0.0;
  std::vector<double> s(f.begin(), f.end());
  std::sort(s.begin(), s.end());
  // sum_i sum_j |f_i - f_j| = 2 sum_i (2i - n + 1) s_i for ascending s (0-based i).
  const double n = static_cast<double>(s.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += (2.0 * static_cast<double>(i) - n + 1.0) * s[i];
  return 2.0 * acc / (2.0 * n * sum);
}

std::vector<PopularityCurve> popularity_report(std::span<const OnlineEvalReport> reports) {
  std::vector<PopularityCurve> out;
  for (const auto& r : reports) {
    PopularityCurve c;
    c.policy = r.policy;
    c.sorted_frequencies.assign(r.item_counts.begin(), r.item_counts.end());
    std::sort(c.sorted_frequencies.begin(), c.sorted_frequencies.end(), std::greater<>());
    c.gini = gini(c.sorted_frequencies);
    out.push_back(std::move(c));
  }
  return out;
}

void write_popularity_csv(std::span<const PopularityCurve> curves, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "rank";
  std::size_t rows = 0;
  for (const auto& c : curves) {
    out << ',' << c.policy;
    rows = std::max(rows, c.sorted_frequencies.size());
  }
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    out << r + 1;
    for (const auto& c : curves) {
      out << ',';
      if (r < c.sorted_frequencies.size()) out << static_cast<long long>(c.sorted_frequencies[r]);
    }
    out << '\n';
  }
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> correlation(std::span<const double> xs, std::span<const double> ys, CorrelationMode mode) {
  if (xs.size() != ys.size()) throw std::domain_error("correlation: size mismatch");
  if (xs.size() < 3) throw std::domain_error("correlation: need at least 3 points");
  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  if (*xmin == *xmax || *ymin == *ymax) return std::nullopt;
  std::vector<double> a(xs.begin(), xs.end()), b(ys.begin(), ys.end());
  if (mode == CorrelationMode::rank) {
    a = average_ranks(xs);
    b = average_ranks(ys);
  }
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace bcd4rec::eval
