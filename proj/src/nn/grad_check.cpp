#include "bcd4rec/nn/grad_check.hpp"

#include <algorithm>
#include <stdexcept>

namespace bcd4rec::nn {

std::vector<GradCheckEntry> finite_difference_check(const std::vector<NamedRef>& params,
                                                    const std::vector<NamedRef>& analytic,
                                                    const std::function<double()>& loss, double step) {
  if (params.size() != analytic.size()) throw std::invalid_argument("grad check: group count mismatch");
  std::vector<GradCheckEntry> out;
  for (std::size_t g = 0; g < params.size(); ++g) {
    Matrix& p = *params[g].value;
    const Matrix& a = *analytic[g].value;
    if (a.rows() != p.rows() || a.cols() != p.cols())
      throw std::invalid_argument("grad check: shape mismatch for " + params[g].name);
    Matrix numeric(p.rows(), p.cols());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double saved = p.data()[i];
      p.data()[i] = saved + step;
      const double up = loss();
      p.data()[i] = saved - step;
      const double down = loss();
      p.data()[i] = saved;
      numeric.data()[i] = (up - down) / (2.0 * step);
    }
    GradCheckEntry e;
    e.name = params[g].name;
    e.analytic_norm = a.norm();
    e.numeric_norm = numeric.norm();
    const double denom = std::max(e.analytic_norm, e.numeric_norm);
    const double diff = (a - numeric).norm();
    e.relative_error = denom < 1e-10 ? diff : diff / denom;
    out.push_back(e);
  }
  return out;
}

double max_relative_error(const std::vector<GradCheckEntry>& entries) {
  double worst = 0.0;
  for (const auto& e : entries) worst = std::max(worst, e.relative_error);
  return worst;
}

}  // namespace bcd4rec::nn
