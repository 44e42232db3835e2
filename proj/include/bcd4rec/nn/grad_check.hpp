#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bcd4rec/nn/params.hpp"

namespace bcd4rec::nn {

struct GradCheckEntry {
  std::string name;
  double relative_error = 0.0;  // ||analytic - numeric|| / max(||analytic||, ||numeric||)
  double analytic_norm = 0.0;
  double numeric_norm = 0.0;
};

/// Compares analytic gradients against central differences of `loss`,
/// perturbing every scalar of every group in `params` by +-step.
/// `params` and `analytic` must be parallel (same order and shapes).
std::vector<GradCheckEntry> finite_difference_check(const std::vector<NamedRef>& params,
                                                    const std::vector<NamedRef>& analytic,
                                                    const std::function<double()>& loss, double step = 1e-5);

double max_relative_error(const std::vector<GradCheckEntry>& entries);

}  // namespace bcd4rec::nn
