#pragma once

// Stage orchestration: each stage reads its inputs from the output
// directory, writes its artifacts there and records them in the manifest.
// Stages whose config section and artifacts are unchanged are skipped.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bcd4rec/pipeline/config.hpp"
#include "bcd4rec/pipeline/manifest.hpp"
#include "bcd4rec/session.hpp"

namespace bcd4rec::pipeline {

inline const std::vector<std::string> kPipelineStages = {"make-behavior", "generate",    "split",
                                                         "pretrain",      "train-m",     "train-agents",
                                                         "eval-online",   "eval-offline", "report"};

struct RunOptions {
  bool force = false;
  std::ostream* log = nullptr;
  /// Threads for online evaluation episodes.
  int workers = 1;
};

class Runner {
 public:
  Runner(ExperimentConfig config, RunOptions options = {});

  const ExperimentConfig& config() const { return config_; }
  const std::filesystem::path& output_dir() const { return out_; }
  const Manifest& manifest() const { return manifest_; }
  /// Stage being executed, or the one that failed last.
  const std::string& current_stage() const { return current_; }

  /// One line per stage: "<stage>: run" or "<stage>: up to date".
  std::vector<std::string> plan(const std::vector<std::string>& stages) const;

  /// Runs the stage unless it is up to date. Failures are recorded in the
  /// manifest and rethrown unchanged.
  void run(const std::string& stage);
  void run_pipeline();
  void run_sweep() { run("sweep"); }

  /// Train/validation dataset produced by the split stage.
  data::BatchDataset load_dataset() const;

 private:
  void execute(const std::string& stage);
  void make_behavior();
  void generate();
  void split();
  void pretrain();
  void train_m();
  void train_agents();
  void eval_online();
  void eval_offline();
  void report();
  void sweep();

  std::string stage_key(const std::string& stage) const;
  void record(const std::string& relative);
  void note(const std::string& message) const;

  ExperimentConfig config_;
  RunOptions options_;
  std::filesystem::path out_;
  Manifest manifest_;
  std::string current_;
};

/// Formats a metric for CSV output ("NA" for NaN).
std::string format_number(double v);

}  // namespace bcd4rec::pipeline
