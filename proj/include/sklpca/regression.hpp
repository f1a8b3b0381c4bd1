#pragma once

#include <Eigen/Dense>

namespace sklpca {

/// Least squares with an unpenalized intercept: coefficients = [intercept, slopes...].
struct LinearFit {
    Eigen::VectorXd coefficients;
    double ridge_used = 0.0; ///< requested lambda plus any fallback that was needed
};

/**
 * Solves the normal equations of y ~ 1 + design with penalty `ridge_lambda`
 * on the slopes. When they are numerically singular (LDLT failure or
 * reciprocal condition below 1e-12), a fallback ridge of
 * 1e-8 * mean(diag(A^T A)) is added and escalated x100 up to three times.
 * Throws NumericalError if the system stays singular.
 */
[[nodiscard]] LinearFit fit_linear(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                   double ridge_lambda = 0.0);

[[nodiscard]] Eigen::VectorXd predict_linear(const Eigen::VectorXd& coefficients,
                                             const Eigen::MatrixXd& design);

} // namespace sklpca
