#include "bcd4rec/session.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "bcd4rec/errors.hpp"
#include "bcd4rec/rng.hpp"

namespace bcd4rec::data {

std::vector<ItemId> SessionLog::positive_items() const {
  std::vector<ItemId> out;
  for (const auto& s : steps)
    if (is_positive(s.choice)) out.push_back(s.item);
  return out;
}

std::vector<Transition> incremental_tuples(const SessionLog& session, int history_len) {
  if (history_len < 1) throw std::invalid_argument("incremental_tuples: history length must be >= 1");
  std::vector<Transition> out;
  out.reserve(session.steps.size());
  std::vector<ItemId> state;
  for (std::size_t t = 0; t < session.steps.size(); ++t) {
    const LoggedStep& step = session.steps[t];
    Transition tr;
    tr.state = state;
    tr.action = step.item;
    tr.reward = step.reward;
    if (is_positive(step.choice)) {
      state.push_back(step.item);
      if (state.size() > static_cast<std::size_t>(history_len)) state.erase(state.begin());
    }
    tr.next_state = state;
    tr.done = t + 1 == session.steps.size();
    out.push_back(std::move(tr));
  }
  return out;
}

std::vector<Transition> incremental_tuples(std::span<const SessionLog> sessions, int history_len) {
  std::vector<Transition> out;
  for (const auto& s : sessions) {
    auto part = incremental_tuples(s, history_len);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

void to_json(nlohmann::json& j, const Provenance& p) {
  j = {{"policy", p.policy_id}, {"seed", p.seed}, {"env_config_hash", p.env_config_hash}};
}

void from_json(const nlohmann::json& j, Provenance& p) {
  p.policy_id = j.value("policy", std::string{});
  p.seed = j.value("seed", std::uint64_t{0});
  p.env_config_hash = j.value("env_config_hash", std::string{});
}

BatchDataset split_dataset(std::span<const SessionLog> sessions, int num_items, int history_len,
                           double validation_fraction, std::uint64_t seed, Provenance provenance) {
  if (sessions.size() < 5) throw std::domain_error("split_dataset: need at least 5 sessions");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw std::invalid_argument("split_dataset: validation fraction must lie in (0,1)");
  const std::size_t n = sessions.size();
  const auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::stream(seed, "split");
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<bool> is_val(n, false);
  for (std::size_t k = 0; k < n_val; ++k) is_val[order[k]] = true;

  BatchDataset ds;
  ds.num_items = num_items;
  ds.history_len = history_len;
  ds.provenance = std::move(provenance);
  for (std::size_t i = 0; i < n; ++i) (is_val[i] ? ds.validation_sessions : ds.train_sessions).push_back(sessions[i]);
  ds.train = incremental_tuples(ds.train_sessions, history_len);
  ds.validation = incremental_tuples(ds.validation_sessions, history_len);
  return ds;
}

void write_session_log(std::span<const SessionLog> sessions, const LogHeader& header,
                       const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write session log " + path.string());
  nlohmann::json h{{"format", header.format},
                   {"version", header.version},
                   {"items", header.num_items},
                   {"sessions", sessions.size()},
                   {"provenance", header.provenance}};
  f << nlohmann::json{{"header", h}}.dump() << '\n';
  for (const auto& s : sessions) {
    for (std::size_t t = 0; t < s.steps.size(); ++t) {
      const auto& step = s.steps[t];
      nlohmann::json line{{"session", s.session_id},
                          {"step", t},
                          {"item", step.item},
                          {"choice", std::string(to_string(step.choice))},
                          {"reward", step.reward}};
      f << line.dump() << '\n';
    }
  }
  if (!f) throw std::runtime_error("failed writing session log " + path.string());
}

LoadedLog read_session_log(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open session log " + path.string());
  LoadedLog out;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  long lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    if (j.contains("header")) {
      const auto& h = j["header"];
      out.header.format = h.value("format", out.header.format);
      out.header.version = h.value("version", 1);
      out.header.num_items = h.value("items", 0);
      out.header.sessions = h.value("sessions", std::size_t{0});
      if (h.contains("provenance")) out.header.provenance = h["provenance"].get<Provenance>();
      continue;
    }
    try {
      const std::string sid = j.at("session").get<std::string>();
      const auto step_index = j.at("step").get<std::size_t>();
      LoggedStep step{j.at("item").get<ItemId>(), choice_from_string(j.at("choice").get<std::string>()),
                      j.at("reward").get<double>()};
      auto [it, fresh] = index.try_emplace(sid, out.sessions.size());
      if (fresh) out.sessions.push_back(SessionLog{sid, {}});
      auto& steps = out.sessions[it->second].steps;
      if (step_index != steps.size()) throw DataError("steps of session '" + sid + "' out of order", lineno);
      steps.push_back(step);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed step record: ") + e.what(), lineno);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what(), lineno);
    }
  }
  return out;
}

std::vector<double> positive_item_frequencies(std::span<const SessionLog> sessions, int num_items) {
  std::vector<double> freq(static_cast<std::size_t>(num_items), 0.0);
  for (const auto& s : sessions)
    for (const auto& step : s.steps)
      if (is_positive(step.choice) && step.item >= 0 && step.item < num_items) freq[static_cast<std::size_t>(step.item)] += 1.0;
  return freq;
}

void to_json(nlohmann::json& j, const IngestSchema& s) {
  nlohmann::json responses = nlohmann::json::object();
  for (const auto& [label, choice] : s.response_choices) responses[label] = std::string(to_string(choice));
  j = {{"session", s.session_column},   {"order", s.order_column},
       {"item", s.item_column},         {"response", s.response_column},
       {"delimiter", std::string(1, s.delimiter)}, {"responses", responses}};
}

void from_json(const nlohmann::json& j, IngestSchema& s) {
  s = IngestSchema{};
  s.session_column = j.value("session", s.session_column);
  s.order_column = j.value("order", s.order_column);
  s.item_column = j.value("item", s.item_column);
  s.response_column = j.value("response", s.response_column);
  const std::string delim = j.value("delimiter", std::string(","));
  if (delim.size() != 1) throw ConfigError("ingest schema: delimiter must be a single character");
  s.delimiter = delim[0];
  if (j.contains("responses")) {
    s.response_choices.clear();
    for (const auto& [label, choice] : j["responses"].items())
      s.response_choices[label] = choice_from_string(choice.get<std::string>());
  }
}

namespace {

// Splits one delimited line; double quotes group fields and "" escapes a quote.
std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delim) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

IngestResult ingest_external(const std::filesystem::path& path, const IngestSchema& schema,
                             const std::map<std::string, double>& reward_map) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path.string());
  IngestResult out;
  std::string line;
  long lineno = 0;
  if (!std::getline(f, line)) return out;  // empty file -> empty log
  ++lineno;
  const auto header = split_fields(line, schema.delimiter);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("missing column '" + name + "'", lineno);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_session = column(schema.session_column);
  const std::size_t c_order = column(schema.order_column);
  const std::size_t c_item = column(schema.item_column);
  const std::size_t c_response = column(schema.response_column);
  const std::size_t needed = std::max({c_session, c_order, c_item, c_response}) + 1;

  struct Row {
    long order;
    std::size_t seq;
    ItemId item;
    LoggedStep step;
  };
  std::vector<std::pair<std::string, std::vector<Row>>> grouped;
  std::unordered_map<std::string, std::size_t> session_index;
  std::unordered_map<std::string, ItemId> vocab_index;
  std::size_t seq = 0;

  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line, schema.delimiter);
    if (fields.size() < needed) throw DataError("row has too few fields", lineno);
    const std::string& label = fields[c_response];
    const auto reward = reward_map.find(label);
    const auto choice = schema.response_choices.find(label);
    if (reward == reward_map.end() || choice == schema.response_choices.end()) {
      ++out.rejected_rows;
      continue;
    }
    long order = 0;
    try {
      std::size_t used = 0;
      order = std::stol(fields[c_order], &used);
      if (used != fields[c_order].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw DataError("order field '" + fields[c_order] + "' is not an integer", lineno);
    }
    if (fields[c_session].empty() || fields[c_item].empty()) throw DataError("empty session or item field", lineno);

    auto [vit, fresh_item] = vocab_index.try_emplace(fields[c_item], static_cast<ItemId>(out.vocabulary.size()));
    if (fresh_item) out.vocabulary.push_back(fields[c_item]);
    auto [sit, fresh_session] = session_index.try_emplace(fields[c_session], grouped.size());
    if (fresh_session) grouped.push_back({fields[c_session], {}});
    grouped[sit->second].second.push_back(
        Row{order, seq++, vit->second, LoggedStep{vit->second, choice->second, reward->second}});
  }

  for (auto& [sid, rows] : grouped) {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.order < b.order; });
    SessionLog s{sid, {}};
    for (const auto& r : rows) s.steps.push_back(r.step);
    out.sessions.push_back(std::move(s));
  }
  return out;
}

void export_csv(std::span<const SessionLog> sessions, const std::filesystem::path& path,
                std::span<const std::string> vocabulary) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "session,order,item,response\n";
  for (const auto& s : sessions)
    for (std::size_t t = 0; t < s.steps.size(); ++t) {
      const auto& step = s.steps[t];
      const std::string item = vocabulary.empty() ? std::to_string(step.item)
                                                  : vocabulary[static_cast<std::size_t>(step.item)];
      f << s.session_id << ',' << t << ',' << item << ',' << to_string(step.choice) << '\n';
    }
}

}  // namespace bcd4rec::data
