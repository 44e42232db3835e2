#include "bcd4rec/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

#include "bcd4rec/errors.hpp"

namespace bcd4rec::nn {

void Adam::step(const std::vector<NamedRef>& params, const std::vector<NamedRef>& grads) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam: parameter/gradient count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& g = *grads[i].value;
    if (g.rows() != params[i].value->rows() || g.cols() != params[i].value->cols())
      throw std::invalid_argument("adam: shape mismatch for " + params[i].name);
    if (!g.allFinite()) throw DivergenceError("non-finite gradient in parameter '" + params[i].name + "'");
  }
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
      v_.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
    }
  }
  if (m_.size() != params.size()) throw std::invalid_argument("adam: parameter set changed between steps");

  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& g = *grads[i].value;
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g.cwiseProduct(g);
    params[i].value->array() -=
        config_.lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + config_.eps);
  }
}

void Adam::restore(std::int64_t steps, std::vector<Matrix> m, std::vector<Matrix> v) {
  if (m.size() != v.size()) throw std::invalid_argument("adam: moment count mismatch");
  t_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace bcd4rec::nn
