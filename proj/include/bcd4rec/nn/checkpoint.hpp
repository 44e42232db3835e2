#pragma once

// Versioned binary container of named f64 arrays.
//
// Layout: magic "BCD4CKPT" | u32 version | u64 header length | JSON header
// (kind, config hash, step, meta, array names and shapes) | column-major f64
// payload in header order | u64 FNV-1a checksum over everything before it.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "bcd4rec/errors.hpp"
#include "bcd4rec/nn/adam.hpp"
#include "bcd4rec/nn/params.hpp"

namespace bcd4rec::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedArray {
  std::string name;
  Matrix value;
};

struct Checkpoint {
  std::string kind;
  std::string config_hash;
  std::int64_t step = 0;
  nlohmann::json meta = nlohmann::json::object();
  std::vector<NamedArray> arrays;

  bool has(const std::string& name) const;
  void put(const std::string& name, const Matrix& value);
  const Matrix& get(const std::string& name) const;

  template <class Params>
  void put_params(const std::string& prefix, Params& params) {
    params.visit([&](const std::string& n, Matrix& m) { put(prefix + n, m); });
  }

  /// Copies arrays into `params`, which must already have the right shapes.
  template <class Params>
  void get_params(const std::string& prefix, Params& params) const {
    params.visit([&](const std::string& n, Matrix& m) {
      const Matrix& src = get(prefix + n);
      if (src.rows() != m.rows() || src.cols() != m.cols())
        throw CheckpointError("shape mismatch for '" + prefix + n + "'");
      m = src;
    });
  }

  void put_adam(const std::string& prefix, const Adam& adam);
  /// Restores moments for an optimizer over `count` parameter arrays.
  void get_adam(const std::string& prefix, Adam& adam, std::size_t count) const;

  void require_kind(const std::string& expected) const;
  void require_config_hash(const std::string& expected) const;
};

void checkpoint_save(const Checkpoint& checkpoint, const std::filesystem::path& path);
/// Throws CheckpointError on bad magic, version, truncation or checksum mismatch.
Checkpoint checkpoint_load(const std::filesystem::path& path);
Checkpoint checkpoint_load(const std::filesystem::path& path, const std::string& expected_config_hash);

}  // namespace bcd4rec::nn
