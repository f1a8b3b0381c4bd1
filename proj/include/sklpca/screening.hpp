#pragma once

#include "sklpca/dataset.hpp"

#include <Eigen/Dense>

#include <vector>

namespace sklpca {

/// Marginal Pearson screening of each feature against the outcome.
struct ScreeningResult {
    Eigen::VectorXd correlations;
    Eigen::VectorXd p_values;           ///< two-sided, t with n - 2 degrees of freedom
    std::vector<Eigen::Index> selected; ///< ascending column indices
};

/// Two-sided p-value of a sample correlation r over n pairs.
[[nodiscard]] double correlation_p_value(double r, Eigen::Index n);

/// Benjamini-Hochberg step-up at level `fdr`; returns rejected indices, ascending.
[[nodiscard]] std::vector<Eigen::Index> benjamini_hochberg(const Eigen::VectorXd& p_values, double fdr);

/**
 * Pooled screening over all rows. Constant features get p = 1. Throws
 * ConfigError for fdr outside (0, 1], DegenerateDataError for a constant
 * outcome and ScreeningEmptyError when nothing survives.
 */
[[nodiscard]] ScreeningResult screen_features(const LongitudinalDataset& data, double fdr = 0.05);

} // namespace sklpca
