#pragma once

#include <cstdint>
#include <vector>

#include "bcd4rec/nn/params.hpp"

namespace bcd4rec::nn {

struct AdamConfig {
  double lr = 0.003;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// ADAM with bias correction. Moments are allocated on the first step and
/// keep the parameter order handed to `step`.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  /// Throws DivergenceError naming the first parameter with a non-finite gradient.
  void step(const std::vector<NamedRef>& params, const std::vector<NamedRef>& grads);

  const AdamConfig& config() const { return config_; }
  std::int64_t steps() const { return t_; }
  std::vector<Matrix>& first_moments() { return m_; }
  std::vector<Matrix>& second_moments() { return v_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }
  void restore(std::int64_t steps, std::vector<Matrix> m, std::vector<Matrix> v);

 private:
  AdamConfig config_;
  std::int64_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace bcd4rec::nn
