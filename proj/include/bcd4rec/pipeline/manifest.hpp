#pragma once

// Run manifest: per-stage status, timestamps and content hashes of every
// artifact written into the output directory.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace bcd4rec::pipeline {

struct ArtifactRecord {
  std::string path;  // relative to the output directory
  std::string hash;  // FNV-1a of the file content
};

struct StageRecord {
  std::string status;  // running | complete | failed
  std::string config_hash;
  std::string started;
  std::string finished;
  std::string error;
  std::vector<ArtifactRecord> artifacts;
};

class Manifest {
 public:
  static constexpr const char* kFileName = "manifest.json";

  explicit Manifest(std::filesystem::path root);

  /// Loads an existing manifest from the root if present.
  void load();
  void save() const;

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path(const std::string& relative) const { return root_ / relative; }

  void set_run_info(const std::string& config_hash, const std::string& tool_version);

  /// Marks a stage as running and forgets its previous artifacts.
  void begin(const std::string& stage, const std::string& config_hash);
  /// Records (or re-records) a file written by `stage`.
  void add_artifact(const std::string& stage, const std::string& relative);
  void complete(const std::string& stage);
  void fail(const std::string& stage, const std::string& error);

  /// True when the stage completed with `config_hash` and all its artifacts
  /// still exist with unchanged content.
  bool is_current(const std::string& stage, const std::string& config_hash) const;
  const StageRecord* stage(const std::string& name) const;
  const std::map<std::string, StageRecord>& stages() const { return stages_; }

  /// Every artifact path, each listed once.
  std::vector<std::string> artifacts() const;

 private:
  std::filesystem::path root_;
  std::string config_hash_;
  std::string tool_version_;
  std::map<std::string, StageRecord> stages_;
};

std::string file_hash(const std::filesystem::path& path);
std::string utc_timestamp();
std::string tool_version();

}  // namespace bcd4rec::pipeline
