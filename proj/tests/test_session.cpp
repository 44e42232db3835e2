#include <algorithm>
#include <set>

#include "doctest.h"
#include "helpers.hpp"

#include "bcd4rec/batch_gen.hpp"
#include "bcd4rec/errors.hpp"
#include "bcd4rec/policies.hpp"
#include "bcd4rec/session.hpp"

using namespace bcd4rec;
using namespace bcd4rec::data;

namespace {

SessionLog toy_session() {
  return {"s1", {{1, Choice::click, 1.0}, {2, Choice::skip, 0.0}, {3, Choice::buy, 5.0}}};
}

std::vector<SessionLog> random_sessions(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SessionLog> out;
  for (int i = 0; i < n; ++i) {
    SessionLog s{"r" + std::to_string(i), {}};
    const int len = 1 + static_cast<int>(rng.below(12));
    for (int t = 0; t < len; ++t) {
      const auto c = static_cast<Choice>(rng.below(3));
      s.steps.push_back({static_cast<ItemId>(rng.below(30)), c, c == Choice::skip ? 0.0 : (c == Choice::click ? 1.0 : 5.0)});
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("incremental tuples follow the positive-history rule") {
  const auto t = incremental_tuples(toy_session(), 2);
  REQUIRE(t.size() == 3);
  CHECK(t[0] == Transition{{}, 1, 1.0, {1}, false});
  CHECK(t[1] == Transition{{1}, 2, 0.0, {1}, false});
  CHECK(t[2] == Transition{{1}, 3, 5.0, {1, 3}, true});
}

TEST_CASE("all-skip session keeps an empty state") {
  const SessionLog s{"x", {{4, Choice::skip, 0}, {5, Choice::skip, 0}}};
  for (const auto& t : incremental_tuples(s, 10)) {
    CHECK(t.state.empty());
    CHECK(t.next_state.empty());
  }
}

TEST_CASE("history length one keeps only the last positive item") {
  for (const auto& s : random_sessions(50, 3))
    for (const auto& t : incremental_tuples(s, 1))
      if (t.reward != 0.0) CHECK(t.next_state == std::vector<ItemId>{t.action});
}

TEST_CASE("transition invariants against a replay oracle") {
  const int L = 3;
  for (const auto& s : random_sessions(200, 9)) {
    const auto ts = incremental_tuples(s, L);
    REQUIRE(ts.size() == s.steps.size());
    std::vector<ItemId> positives;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      auto window = [&] {
        const std::size_t from = positives.size() > L ? positives.size() - L : 0;
        return std::vector<ItemId>(positives.begin() + static_cast<std::ptrdiff_t>(from), positives.end());
      };
      CHECK(ts[i].state == window());
      CHECK(ts[i].reward == s.steps[i].reward);
      CHECK(ts[i].state.size() <= static_cast<std::size_t>(L));
      if (s.steps[i].choice == Choice::skip) {
        CHECK(ts[i].next_state == ts[i].state);
      } else {
        positives.push_back(s.steps[i].item);
      }
      CHECK(ts[i].next_state == window());
      CHECK(ts[i].done == (i + 1 == ts.size()));
    }
  }
}

TEST_CASE("session split") {
  const auto sessions = random_sessions(10, 1);
  const auto ds = split_dataset(sessions, 30, 10, 0.2, 42);
  CHECK(ds.train_sessions.size() == 8);
  CHECK(ds.validation_sessions.size() == 2);
  std::set<std::string> ids;
  for (const auto& s : ds.train_sessions) ids.insert(s.session_id);
  for (const auto& s : ds.validation_sessions) CHECK(ids.insert(s.session_id).second);
  CHECK(ids.size() == 10);
  const auto again = split_dataset(sessions, 30, 10, 0.2, 42);
  CHECK(again.train_sessions == ds.train_sessions);
  CHECK(again.validation_sessions == ds.validation_sessions);
  CHECK_THROWS_AS(split_dataset(random_sessions(4, 1), 30, 10, 0.2, 1), std::domain_error);
}

TEST_CASE("JSONL log round trip and byte-identical regeneration") {
  test::TempDir dir("session");
  const auto policy = policies::RandomPolicy();
  sim::EnvConfig env;
  const auto a = generate_batch(env, policy, 30, 5);
  const auto b = generate_batch(env, policy, 30, 5);
  LogHeader h;
  h.num_items = 200;
  h.sessions = a.size();
  h.provenance = {"RecSim-1", 5, env.hash()};
  write_session_log(a, h, dir / "a.jsonl");
  write_session_log(b, h, dir / "b.jsonl");
  CHECK(test::slurp(dir / "a.jsonl") == test::slurp(dir / "b.jsonl"));
  const auto loaded = read_session_log(dir / "a.jsonl");
  CHECK(loaded.sessions == a);
  CHECK(loaded.header.provenance == h.provenance);

  write_session_log({}, LogHeader{}, dir / "empty.jsonl");
  const auto empty = read_session_log(dir / "empty.jsonl");
  CHECK(empty.sessions.empty());
  CHECK(empty.header.format == "bcd4rec-session-log");

  test::write_file(dir / "bad.jsonl", test::slurp(dir / "a.jsonl") + "{not json}\n");
  try {
    read_session_log(dir / "bad.jsonl");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.line() > 1);
  }
}

TEST_CASE("default-size batch has about 30k training tuples") {
  const auto logs = generate_batch(sim::EnvConfig{}, policies::RandomPolicy(), 2000, 1);
  const auto ds = split_dataset(logs, 200, 10, 0.2, 2);
  CHECK(ds.train.size() >= 21000);
  CHECK(ds.train.size() <= 39000);
  for (const auto& t : ds.train) CHECK((t.reward == 0.0 || t.reward == 4.0));
}

TEST_CASE("external CSV ingestion") {
  test::TempDir dir("ingest");
  const std::map<std::string, double> rewards{{"s", 0}, {"c", 1}, {"b", 5}};
  test::write_file(dir / "toy.csv", "session,order,item,response\nA,0,x,s\nA,1,y,c\nA,2,z,b\n");
  const auto r = ingest_external(dir / "toy.csv", IngestSchema{}, rewards);
  REQUIRE(r.sessions.size() == 1);
  REQUIRE(r.sessions[0].steps.size() == 3);
  CHECK(r.sessions[0].steps[0].reward == 0);
  CHECK(r.sessions[0].steps[1].reward == 1);
  CHECK(r.sessions[0].steps[2].reward == 5);
  CHECK(r.vocabulary == std::vector<std::string>{"x", "y", "z"});

  test::write_file(dir / "empty.csv", "");
  CHECK(ingest_external(dir / "empty.csv", IngestSchema{}, rewards).sessions.empty());

  test::write_file(dir / "unordered.csv", "session,order,item,response\nB,2,q,c\nB,0,p,s\nB,1,r,x\n");
  const auto u = ingest_external(dir / "unordered.csv", IngestSchema{}, rewards);
  CHECK(u.rejected_rows == 1);
  CHECK(u.sessions[0].steps[0].choice == Choice::skip);

  test::write_file(dir / "bad.csv", "session,order,item,response\nA,zero,x,s\n");
  try {
    ingest_external(dir / "bad.csv", IngestSchema{}, rewards);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.line() == 2);
  }

  const std::map<std::string, double> named{{"skip", 0}, {"click", 1}, {"buy", 5}};
  export_csv(r.sessions, dir / "export.csv", r.vocabulary);
  const auto again = ingest_external(dir / "export.csv", IngestSchema{}, named);
  CHECK(again.sessions == r.sessions);
  CHECK(again.vocabulary == r.vocabulary);
}

TEST_CASE("positive item frequencies") {
  const auto f = positive_item_frequencies(std::vector<SessionLog>{toy_session()}, 5);
  CHECK(f == std::vector<double>{0, 1, 0, 1, 0});
}
