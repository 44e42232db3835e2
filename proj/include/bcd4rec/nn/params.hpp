#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcd4rec/rng.hpp"

namespace bcd4rec::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Non-owning handle to one named parameter array. Bias vectors are stored
/// as single-column matrices so every group shares one representation.
struct NamedRef {
  std::string name;
  Matrix* value;
};

// Parameter structs expose `visit(f)` calling f(name, Matrix&) for each array,
// in a fixed order. The helpers below rely only on that.

template <class Params>
std::vector<NamedRef> named_refs(Params& params) {
  std::vector<NamedRef> out;
  params.visit([&](const std::string& name, Matrix& m) { out.push_back({name, &m}); });
  return out;
}

template <class Params>
Params zeros_like(const Params& params) {
  Params z = params;
  z.visit([](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

template <class Params>
std::size_t parameter_count(const Params& params) {
  std::size_t n = 0;
  const_cast<Params&>(params).visit(
      [&](const std::string&, Matrix& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

/// Exact equality of every array (used for reproducibility checks).
template <class Params>
bool bitwise_equal(const Params& a, const Params& b) {
  auto ra = named_refs(const_cast<Params&>(a));
  auto rb = named_refs(const_cast<Params&>(b));
  if (ra.size() != rb.size()) return false;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    if (ra[i].value->rows() != rb[i].value->rows() || ra[i].value->cols() != rb[i].value->cols())
      return false;
    if (*ra[i].value != *rb[i].value) return false;
  }
  return true;
}

inline void fill_uniform(Matrix& m, double bound, Rng& rng) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.uniform(-bound, bound);
}

}  // namespace bcd4rec::nn
