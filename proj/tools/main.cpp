// bcd4rec command-line driver.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bcd4rec/errors.hpp"
#include "bcd4rec/pipeline/config.hpp"
#include "bcd4rec/pipeline/runner.hpp"

namespace {

using namespace bcd4rec;
using nlohmann::json;

enum ExitCode { kOk = 0, kConfigError = 2, kStageFailure = 3, kDivergence = 4 };

struct CommonArgs {
  std::string config_path;
  std::string output;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::vector<std::string> assignments;
  bool dry_run = false;
  bool force = false;
  bool quiet = false;
  int workers = 0;
  std::vector<std::string> agent_labels;
};

void add_common(CLI::App& cmd, CommonArgs& a) {
  cmd.add_option("-c,--config", a.config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
  cmd.add_option("-o,--output", a.output, "Output directory (overrides output_dir)");
  cmd.add_option_function<std::uint64_t>(
      "-s,--seed",
      [&a](const std::uint64_t& v) {
        a.seed = v;
        a.seed_given = true;
      },
      "Master seed (overrides seed)");
  cmd.add_option("--set", a.assignments, "Override a config key, e.g. --set data.sessions=500");
  cmd.add_flag("--dry-run", a.dry_run, "Print the stage plan without running anything");
  cmd.add_flag("-f,--force", a.force, "Rerun stages even when up to date");
  cmd.add_flag("-q,--quiet", a.quiet, "Suppress progress output");
  cmd.add_option("-j,--workers", a.workers, "Threads for online evaluation (0 = all cores)");
}

pipeline::ExperimentConfig build_config(const CommonArgs& a) {
  json doc = json::object();
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(a.config_path + ": " + e.what());
    }
  }
  pipeline::apply_overrides(doc, a.assignments);
  if (a.seed_given) doc["seed"] = a.seed;
  if (!a.output.empty()) doc["output_dir"] = a.output;
  auto config = pipeline::config_from_json(doc);
  if (!a.agent_labels.empty()) {
    std::vector<pipeline::AgentSpec> keep;
    for (const auto& label : a.agent_labels) keep.push_back(config.agent(label));
    config.agents = std::move(keep);
  }
  config.validate();
  return config;
}

int execute(const CommonArgs& a, const std::vector<std::string>& stages) {
  std::string stage = stages.empty() ? std::string() : stages.front();
  try {
    const auto config = build_config(a);
    pipeline::RunOptions options;
    options.force = a.force;
    options.log = a.quiet ? nullptr : &std::cerr;
    options.workers = a.workers > 0 ? a.workers : std::max(1u, std::thread::hardware_concurrency());
    pipeline::Runner runner(config, options);
    if (a.dry_run) {
      std::cout << "output: " << runner.output_dir().string() << "\n";
      for (const auto& line : runner.plan(stages)) std::cout << line << "\n";
      return kOk;
    }
    for (const auto& s : stages) {
      stage = s;
      runner.run(s);
    }
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DivergenceError& e) {
    std::cerr << "stage " << stage << " diverged: " << e.what() << "\n";
    return kDivergence;
  } catch (const std::exception& e) {
    std::cerr << "stage " << stage << " failed: " << e.what() << "\n";
    return kStageFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch-constrained distributional RL for session-based recommendation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bcd4rec::pipeline::tool_version());

  struct Command {
    const char* name;
    const char* help;
    std::vector<std::string> stages;
  };
  const std::vector<Command> commands = {
      {"make-behavior", "Create the behavior policies (random plus online IQN snapshots)", {"make-behavior"}},
      {"generate", "Log sessions with the configured behavior policy", {"generate"}},
      {"split", "Split logged sessions into train and validation parts", {"split"}},
      {"pretrain", "Pre-train item embeddings on positive interactions", {"pretrain"}},
      {"train-m", "Train the behavior model used for batch constraining", {"train-m"}},
      {"train-agent", "Train the configured batch agents", {"train-agents"}},
      {"eval-online", "Evaluate policies on fresh simulated users", {"eval-online"}},
      {"eval-offline", "Compute recall and mean greedy Q on the validation split", {"eval-offline"}},
      {"sweep", "Hyperparameter grid with online/offline metric correlations", {"sweep"}},
      {"report", "Assemble the comparison table and summary", {"report"}},
      {"pipeline", "Run every stage from behavior creation to the report", bcd4rec::pipeline::kPipelineStages},
  };

  std::vector<CommonArgs> args(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    auto* sub = app.add_subcommand(commands[i].name, commands[i].help);
    add_common(*sub, args[i]);
    if (commands[i].stages.front() == "train-agents")
      sub->add_option("-a,--agent", args[i].agent_labels, "Train only these agent labels");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }
  for (std::size_t i = 0; i < commands.size(); ++i)
    if (subs[i]->parsed()) return execute(args[i], commands[i].stages);
  return kConfigError;
}
