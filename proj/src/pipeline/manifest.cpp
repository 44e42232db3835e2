#include "bcd4rec/pipeline/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iterator>
#include <set>
#include <stdexcept>

#include "bcd4rec/errors.hpp"
#include "bcd4rec/pipeline/config.hpp"
#include "bcd4rec/rng.hpp"

#ifndef BCD4REC_VERSION
#define BCD4REC_VERSION "0.0.0"
#endif
#ifndef BCD4REC_GIT_DESCRIBE
#define BCD4REC_GIT_DESCRIBE "unknown"
#endif

namespace bcd4rec::pipeline {

using nlohmann::json;

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return hex64(fnv1a64(bytes));
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string tool_version() { return std::string("bcd4rec ") + BCD4REC_VERSION + " (" + BCD4REC_GIT_DESCRIBE + ")"; }

Manifest::Manifest(std::filesystem::path root) : root_(std::move(root)) {}

void Manifest::load() {
  const auto p = root_ / kFileName;
  if (!std::filesystem::exists(p)) return;
  std::ifstream in(p);
  json doc;
  try {
    doc = json::parse(in);
    config_hash_ = doc.value("config_hash", "");
    tool_version_ = doc.value("tool_version", "");
    stages_.clear();
    for (const auto& [name, s] : doc.at("stages").items()) {
      StageRecord r;
      r.status = s.value("status", "");
      r.config_hash = s.value("config_hash", "");
      r.started = s.value("started", "");
      r.finished = s.value("finished", "");
      r.error = s.value("error", "");
      for (const auto& a : s.value("artifacts", json::array()))
        r.artifacts.push_back({a.at("path").get<std::string>(), a.at("hash").get<std::string>()});
      stages_[name] = std::move(r);
    }
  } catch (const json::exception& e) {
    throw DataError("corrupt manifest " + p.string() + ": " + e.what());
  }
}

void Manifest::save() const {
  json stages = json::object();
  for (const auto& [name, r] : stages_) {
    json arts = json::array();
    for (const auto& a : r.artifacts) arts.push_back({{"path", a.path}, {"hash", a.hash}});
    json s = {{"status", r.status}, {"config_hash", r.config_hash}, {"started", r.started},
              {"finished", r.finished}, {"artifacts", arts}};
    if (!r.error.empty()) s["error"] = r.error;
    stages[name] = s;
  }
  const json doc = {{"config_hash", config_hash_}, {"tool_version", tool_version_}, {"stages", stages}};
  std::filesystem::create_directories(root_);
  const auto tmp = root_ / (std::string(kFileName) + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write manifest in " + root_.string());
    out << doc.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, root_ / kFileName);
}

void Manifest::set_run_info(const std::string& config_hash, const std::string& version) {
  config_hash_ = config_hash;
  tool_version_ = version;
}

void Manifest::begin(const std::string& stage, const std::string& config_hash) {
  StageRecord r;
  r.status = "running";
  r.config_hash = config_hash;
  r.started = utc_timestamp();
  stages_[stage] = std::move(r);
  save();
}

void Manifest::add_artifact(const std::string& stage, const std::string& relative) {
  auto& r = stages_.at(stage);
  // An artifact belongs to exactly one stage.
  for (auto& [name, other] : stages_)
    std::erase_if(other.artifacts, [&](const ArtifactRecord& a) { return a.path == relative; });
  r.artifacts.push_back({relative, file_hash(root_ / relative)});
}

void Manifest::complete(const std::string& stage) {
  auto& r = stages_.at(stage);
  r.status = "complete";
  r.finished = utc_timestamp();
  save();
}

void Manifest::fail(const std::string& stage, const std::string& error) {
  auto& r = stages_[stage];
  r.status = "failed";
  r.finished = utc_timestamp();
  r.error = error;
  save();
}

bool Manifest::is_current(const std::string& stage, const std::string& config_hash) const {
  const auto it = stages_.find(stage);
  if (it == stages_.end() || it->second.status != "complete" || it->second.config_hash != config_hash) return false;
  for (const auto& a : it->second.artifacts) {
    const auto p = root_ / a.path;
    if (!std::filesystem::exists(p) || file_hash(p) != a.hash) return false;
  }
  return true;
}

const StageRecord* Manifest::stage(const std::string& name) const {
  const auto it = stages_.find(name);
  return it == stages_.end() ? nullptr : &it->second;
}

std::vector<std::string> Manifest::artifacts() const {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& [name, r] : stages_)
    for (const auto& a : r.artifacts)
      if (seen.insert(a.path).second) out.push_back(a.path);
  return out;
}

}  // namespace bcd4rec::pipeline
