#include "bcd4rec/nn/quantile.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bcd4rec::nn {

QuantileEmbeddingParams init_quantile_embedding(int num_cosines, int dim, Rng& rng) {
  if (num_cosines < 1) throw std::invalid_argument("need at least one cosine feature");
  QuantileEmbeddingParams p;
  p.w.resize(num_cosines, dim);
  fill_uniform(p.w, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
  p.b = Matrix::Zero(dim, 1);
  return p;
}

Matrix cosine_features(std::span<const double> taus, int num_cosines) {
  Matrix c(num_cosines, static_cast<Eigen::Index>(taus.size()));
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const double tau = taus[k];
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::domain_error("quantile level outside [0,1]");
    for (int i = 0; i < num_cosines; ++i)
      c(i, static_cast<Eigen::Index>(k)) = std::cos(std::numbers::pi * static_cast<double>(i) * tau);
  }
  return c;
}

Matrix quantile_embedding(std::span<const double> taus, const QuantileEmbeddingParams& params,
                          Matrix* pre_activation) {
  Matrix pre = params.w.transpose() * cosine_features(taus, params.num_cosines());
  pre.colwise() += params.b.col(0);
  Matrix phi = pre.cwiseMax(0.0);
  if (pre_activation) *pre_activation = std::move(pre);
  return phi;
}

Vector quantile_embedding(double tau, const QuantileEmbeddingParams& params) {
  return quantile_embedding(std::span<const double>(&tau, 1), params).col(0);
}

void quantile_embedding_backward(std::span<const double> taus, const Matrix& pre_activation,
                                 const Matrix& d_phi, QuantileEmbeddingParams& grad) {
  const Matrix d_pre = (pre_activation.array() > 0.0).cast<double>() * d_phi.array();
  grad.w.noalias() += cosine_features(taus, grad.num_cosines()) * d_pre.transpose();
  grad.b.col(0) += d_pre.rowwise().sum();
}

Matrix q_values(const Vector& state, const Matrix& phis, const Eigen::Ref<const Matrix>& rows) {
  const Matrix scaled = phis.array().colwise() * state.array();  // d x K
  return (rows * scaled).transpose();
}

std::vector<double> quantile_midpoints(int k) {
  if (k < 1) throw std::invalid_argument("quantile count must be positive");
  std::vector<double> taus(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) taus[static_cast<std::size_t>(i)] = (i + 0.5) / k;
  return taus;
}

}  // namespace bcd4rec::nn
