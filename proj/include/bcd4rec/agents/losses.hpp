#pragma once

namespace bcd4rec::agents {

/// L_k(d) = 0.5 d^2 for |d| <= k, k(|d| - 0.5k) otherwise.
double huber(double delta, double kappa);
double huber_derivative(double delta, double kappa);

/// |tau - 1{d < 0}| * L_k(d).
double quantile_huber(double tau, double delta, double kappa);
/// Derivative of quantile_huber with respect to delta.
double quantile_huber_derivative(double tau, double delta, double kappa);

}  // namespace bcd4rec::agents
