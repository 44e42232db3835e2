#pragma once

// Cosine quantile embedding and per-quantile action values.

#include <span>

#include "bcd4rec/nn/params.hpp"

namespace bcd4rec::nn {

struct QuantileEmbeddingParams {
  Matrix w;  // n x d
  Matrix b;  // d x 1

  int num_cosines() const { return static_cast<int>(w.rows()); }
  int dim() const { return static_cast<int>(w.cols()); }

  template <class F>
  void visit(F&& f) {
    f("w", w);
    f("b", b);
  }
};

QuantileEmbeddingParams init_quantile_embedding(int num_cosines, int dim, Rng& rng);

/// n x K matrix of cos(pi * i * tau_k); row 0 is all ones.
Matrix cosine_features(std::span<const double> taus, int num_cosines);

/// phi(tau_k) = ReLU(sum_i cos(pi i tau_k) w_ij + b_j), one column per tau.
/// If `pre_activation` is given it receives the values before the ReLU.
/// Throws std::domain_error for tau outside [0, 1].
Matrix quantile_embedding(std::span<const double> taus, const QuantileEmbeddingParams& params,
                          Matrix* pre_activation = nullptr);

Vector quantile_embedding(double tau, const QuantileEmbeddingParams& params);

void quantile_embedding_backward(std::span<const double> taus, const Matrix& pre_activation,
                                 const Matrix& d_phi, QuantileEmbeddingParams& grad);

/// K x M matrix: row k holds rows(s ⊙ phi_k) for every row of `rows`
/// (typically the item embedding matrix).
Matrix q_values(const Vector& state, const Matrix& phis, const Eigen::Ref<const Matrix>& rows);

/// Fixed quantile midpoints (i + 0.5) / K.
std::vector<double> quantile_midpoints(int k);

}  // namespace bcd4rec::nn
