#pragma once

#include "sklpca/dataset.hpp"
#include "sklpca/reduce.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace sklpca {

/// Where the fixed component of a known subject's prediction comes from.
///   TrainingEmbedding: the subject's training row of Kbar Vbar (default).
///   HeldOutBlock:      the fixed projection of the rows being predicted.
/// Unknown subjects always use the held-out block.
enum class FixedSource { TrainingEmbedding, HeldOutBlock };

/// Two-step mixed regression on sklPCA components.
struct MixedPredictor {
    Eigen::VectorXd fixed_coefs;                ///< intercept + q slopes
    std::vector<Eigen::VectorXd> subject_coefs; ///< per training subject: intercept + q_i slopes
    std::vector<std::string> subject_ids;
    double ridge_lambda = 0.0;
    double fixed_ridge_used = 0.0;
    Eigen::VectorXd train_fixed_predictions; ///< per training subject
};

/// Ordinary (pooled) regression on skPCA components.
struct BaselinePredictor {
    Eigen::VectorXd coefs; ///< intercept + q slopes
    double ridge_lambda = 0.0;
    double ridge_used = 0.0;
};

struct MixedPrediction {
    Eigen::VectorXd values;
    Eigen::VectorXd fixed_part;
    bool fixed_only = false; ///< subject unknown: no random component added
};

/**
 * Step 1 regresses subject mean outcomes on the fixed scores (one row per
 * subject). Step 2 regresses each subject's residuals y_ij - yhat_i on its
 * random scores. `reduction` must have been fitted on `data`.
 */
[[nodiscard]] MixedPredictor fit_mixed(const SklpcaModel& reduction, const LongitudinalDataset& data,
                                       double ridge_lambda = 0.0);

[[nodiscard]] MixedPrediction predict_mixed(const MixedPredictor& predictor, const SklpcaModel& reduction,
                                            const Eigen::MatrixXd& x_test,
                                            const std::optional<std::string>& subject_id,
                                            FixedSource source = FixedSource::TrainingEmbedding);

[[nodiscard]] BaselinePredictor fit_baseline(const SkpcaModel& reduction, const LongitudinalDataset& data,
                                             double ridge_lambda = 0.0);

[[nodiscard]] Eigen::VectorXd predict_baseline(const BaselinePredictor& predictor,
                                               const SkpcaModel& reduction, const Eigen::MatrixXd& x_test);

} // namespace sklpca
