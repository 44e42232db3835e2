#include "bcd4rec/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "bcd4rec/rng.hpp"

namespace bcd4rec::nn {

namespace {

constexpr char kMagic[8] = {'B', 'C', 'D', '4', 'C', 'K', 'P', 'T'};

template <class T>
void append_pod(std::string& out, const T& value) {
  out.append(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_pod(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw CheckpointError("checkpoint truncated");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

bool Checkpoint::has(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.name == name) return true;
  return false;
}

void Checkpoint::put(const std::string& name, const Matrix& value) {
  for (auto& a : arrays)
    if (a.name == name) {
      a.value = value;
      return;
    }
  arrays.push_back({name, value});
}

const Matrix& Checkpoint::get(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.name == name) return a.value;
  throw CheckpointError("checkpoint has no array named '" + name + "'");
}

void Checkpoint::put_adam(const std::string& prefix, const Adam& adam) {
  meta[prefix + "steps"] = adam.steps();
  const auto& m = adam.first_moments();
  const auto& v = adam.second_moments();
  for (std::size_t i = 0; i < m.size(); ++i) {
    put(prefix + "m." + std::to_string(i), m[i]);
    put(prefix + "v." + std::to_string(i), v[i]);
  }
}

void Checkpoint::get_adam(const std::string& prefix, Adam& adam, std::size_t count) const {
  const std::int64_t steps = meta.value(prefix + "steps", std::int64_t{0});
  std::vector<Matrix> m, v;
  if (steps > 0) {
    for (std::size_t i = 0; i < count; ++i) {
      m.push_back(get(prefix + "m." + std::to_string(i)));
      v.push_back(get(prefix + "v." + std::to_string(i)));
    }
  }
  adam.restore(steps, std::move(m), std::move(v));
}

void Checkpoint::require_kind(const std::string& expected) const {
  if (kind != expected) throw CheckpointError("checkpoint kind '" + kind + "' but expected '" + expected + "'");
}

void Checkpoint::require_config_hash(const std::string& expected) const {
  if (config_hash != expected)
    throw CheckpointError("checkpoint config hash " + config_hash + " does not match expected " + expected);
}

void checkpoint_save(const Checkpoint& ckpt, const std::filesystem::path& path) {
  nlohmann::json header{{"kind", ckpt.kind},
                        {"config_hash", ckpt.config_hash},
                        {"step", ckpt.step},
                        {"meta", ckpt.meta},
                        {"arrays", nlohmann::json::array()}};
  for (const auto& a : ckpt.arrays)
    header["arrays"].push_back({{"name", a.name}, {"rows", a.value.rows()}, {"cols", a.value.cols()}});
  const std::string header_text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  append_pod(out, kCheckpointVersion);
  append_pod(out, static_cast<std::uint64_t>(header_text.size()));
  out += header_text;
  for (const auto& a : ckpt.arrays)
    out.append(reinterpret_cast<const char*>(a.value.data()), static_cast<std::size_t>(a.value.size()) * sizeof(double));
  append_pod(out, fnv1a64(out));

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write checkpoint " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Checkpoint checkpoint_load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint " + path.string());
  const std::string in((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (in.size() < sizeof kMagic + 4 + 8 + 8 || std::memcmp(in.data(), kMagic, sizeof kMagic) != 0)
    throw CheckpointError("not a checkpoint file: " + path.string());

  const std::size_t body = in.size() - sizeof(std::uint64_t);
  std::uint64_t stored;
  std::memcpy(&stored, in.data() + body, sizeof stored);
  if (stored != fnv1a64(std::string_view(in.data(), body)))
    throw CheckpointError("checkpoint checksum mismatch: " + path.string());

  std::size_t pos = sizeof kMagic;
  const auto version = read_pod<std::uint32_t>(in, pos);
  if (version != kCheckpointVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  const auto header_len = read_pod<std::uint64_t>(in, pos);
  if (pos + header_len > body) throw CheckpointError("checkpoint truncated");
  const auto header = nlohmann::json::parse(in.substr(pos, header_len));
  pos += header_len;

  Checkpoint ckpt;
  ckpt.kind = header.at("kind");
  ckpt.config_hash = header.at("config_hash");
  ckpt.step = header.at("step");
  ckpt.meta = header.at("meta");
  for (const auto& a : header.at("arrays")) {
    const Eigen::Index rows = a.at("rows"), cols = a.at("cols");
    const std::size_t bytes = static_cast<std::size_t>(rows * cols) * sizeof(double);
    if (pos + bytes > body) throw CheckpointError("checkpoint truncated");
    Matrix m(rows, cols);
    std::memcpy(m.data(), in.data() + pos, bytes);
    pos += bytes;
    ckpt.arrays.push_back({a.at("name"), std::move(m)});
  }
  if (pos != body) throw CheckpointError("trailing bytes in checkpoint");
  return ckpt;
}

Checkpoint checkpoint_load(const std::filesystem::path& path, const std::string& expected_config_hash) {
  Checkpoint c = checkpoint_load(path);
  c.require_config_hash(expected_config_hash);
  return c;
}

}  // namespace bcd4rec::nn
