#pragma once

// Session logs, incremental (s, a, r, s', done) tuples, dataset splits and
// the on-disk formats used to exchange them.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "bcd4rec/types.hpp"

namespace bcd4rec::data {

struct SessionLog {
  std::string session_id;
  std::vector<LoggedStep> steps;

  /// Items with a non-skip response, in session order.
  std::vector<ItemId> positive_items() const;

  friend bool operator==(const SessionLog&, const SessionLog&) = default;
};

/// States hold up to L most recent positive items, most recent last.
struct Transition {
  std::vector<ItemId> state;
  ItemId action = 0;
  double reward = 0.0;
  std::vector<ItemId> next_state;
  bool done = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// One transition per logged step; the state only advances on non-skip
/// responses and the final step is terminal. Requires history_len >= 1.
std::vector<Transition> incremental_tuples(const SessionLog& session, int history_len);
std::vector<Transition> incremental_tuples(std::span<const SessionLog> sessions, int history_len);

struct Provenance {
  std::string policy_id;
  std::uint64_t seed = 0;
  std::string env_config_hash;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

void to_json(nlohmann::json& j, const Provenance& p);
void from_json(const nlohmann::json& j, Provenance& p);

struct BatchDataset {
  int num_items = 0;
  int history_len = 10;
  std::vector<SessionLog> train_sessions;
  std::vector<SessionLog> validation_sessions;
  std::vector<Transition> train;
  std::vector<Transition> validation;
  Provenance provenance;
};

/// Session-level split. The validation part holds round(fraction * n)
/// sessions chosen by a seeded shuffle; both parts keep the input order.
/// Throws std::domain_error with fewer than 5 sessions.
BatchDataset split_dataset(std::span<const SessionLog> sessions, int num_items, int history_len,
                           double validation_fraction, std::uint64_t seed, Provenance provenance = {});

// --- JSONL session logs --------------------------------------------------
//
// Line 1 is a header object {"header": {...}}; every further line is one
// step: {"session": str, "step": int, "item": int, "choice": str, "reward": float}.

struct LogHeader {
  std::string format = "bcd4rec-session-log";
  int version = 1;
  int num_items = 0;
  std::size_t sessions = 0;
  Provenance provenance;
};

void write_session_log(std::span<const SessionLog> sessions, const LogHeader& header,
                       const std::filesystem::path& path);

struct LoadedLog {
  LogHeader header;
  std::vector<SessionLog> sessions;
};

/// Throws DataError (with line number) on malformed content.
LoadedLog read_session_log(const std::filesystem::path& path);

/// Counts how often each item received a positive response.
std::vector<double> positive_item_frequencies(std::span<const SessionLog> sessions, int num_items);

// --- external CSV ingestion ----------------------------------------------

struct IngestSchema {
  std::string session_column = "session";
  std::string order_column = "order";
  std::string item_column = "item";
  std::string response_column = "response";
  char delimiter = ',';
  /// Response label -> choice kind.
  std::map<std::string, Choice> response_choices{
      {"s", Choice::skip},     {"c", Choice::click},     {"b", Choice::buy},
      {"skip", Choice::skip},  {"click", Choice::click}, {"buy", Choice::buy}};
};

void to_json(nlohmann::json& j, const IngestSchema& s);
void from_json(const nlohmann::json& j, IngestSchema& s);

struct IngestResult {
  std::vector<SessionLog> sessions;
  /// Dense item id -> external item key, in order of first appearance.
  std::vector<std::string> vocabulary;
  std::size_t rejected_rows = 0;
};

/// Reads a delimited file with a header row. Rows whose response label has
/// no entry in `reward_map` are rejected and counted; rows with missing
/// fields or a non-integer order abort with DataError carrying the line.
IngestResult ingest_external(const std::filesystem::path& path, const IngestSchema& schema,
                             const std::map<std::string, double>& reward_map);

/// Writes sessions as CSV (session,order,item,response) using choice names as
/// response labels and vocabulary keys for items when given.
void export_csv(std::span<const SessionLog> sessions, const std::filesystem::path& path,
                std::span<const std::string> vocabulary = {});

}  // namespace bcd4rec::data
