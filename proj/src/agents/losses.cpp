#include "bcd4rec/agents/losses.hpp"

#include <algorithm>
#include <cmath>

namespace bcd4rec::agents {

double huber(double delta, double kappa) {
  const double a = std::abs(delta);
  return a <= kappa ? 0.5 * delta * delta : kappa * (a - 0.5 * kappa);
}

double huber_derivative(double delta, double kappa) { return std::clamp(delta, -kappa, kappa); }

double quantile_huber(double tau, double delta, double kappa) {
  return std::abs(tau - (delta < 0.0 ? 1.0 : 0.0)) * huber(delta, kappa);
}

double quantile_huber_derivative(double tau, double delta, double kappa) {
  return std::abs(tau - (delta < 0.0 ? 1.0 : 0.0)) * huber_derivative(delta, kappa);
}

}  // namespace bcd4rec::agents
