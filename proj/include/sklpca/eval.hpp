#pragma once

#include "sklpca/dataset.hpp"
#include "sklpca/hsic.hpp"
#include "sklpca/kernels.hpp"
#include "sklpca/mixed_model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sklpca {

enum class FoldStrategy { WithinSubjectRandom, WithinSubjectContiguous };

[[nodiscard]] std::string to_string(FoldStrategy strategy);
[[nodiscard]] FoldStrategy fold_strategy_from_string(const std::string& name);

/// Per-row fold ids; -1 marks rows that are only ever used for training.
struct FoldPlan {
    int k = 5;
    FoldStrategy strategy = FoldStrategy::WithinSubjectRandom;
    std::vector<int> assignments;
    std::vector<std::string> training_only; ///< subjects with fewer than k rows

    [[nodiscard]] std::vector<Eigen::Index> training_rows(int fold) const;
    [[nodiscard]] std::vector<Eigen::Index> test_rows(int fold) const;
};

/**
 * Random: each subject's rows are shuffled, then dealt round-robin to folds.
 * Contiguous: each subject's time-ordered rows are cut into k consecutive blocks.
 * Subjects with fewer than k rows are kept out of every test fold.
 */
[[nodiscard]] FoldPlan make_folds(const LongitudinalDataset& data, int k, FoldStrategy strategy,
                                  std::uint64_t seed);

enum class Method { Skpca, Sklpca };

[[nodiscard]] std::string to_string(Method method);
[[nodiscard]] Method method_from_string(const std::string& name);

struct CvParams {
    KernelSpec feature_kernel = KernelSpec::linear();
    KernelSpec outcome_kernel = KernelSpec::linear();
    std::optional<Eigen::Index> q;
    std::optional<Eigen::Index> q_i;
    double ridge_lambda = 0.0;
    SubjectNormalization normalization = SubjectNormalization::Verbatim;
    FixedSource fixed_source = FixedSource::TrainingEmbedding;
    std::uint64_t bandwidth_seed = 0;
    Eigen::Index bandwidth_max_rows = 2000;
    unsigned threads = 1;
    std::optional<double> screening_fdr; ///< set: screen features on each fold's training rows
};

struct CvResult {
    double correlation = 0.0;
    bool degenerate = false;       ///< predictions had zero variance; correlation reported as 0
    Eigen::VectorXd predictions;   ///< NaN where a row was never predicted
    Eigen::Index predicted_rows = 0;
    std::vector<std::string> flagged; ///< "fold:subject" pairs dropped from a fold's fit
    int screening_skipped = 0;        ///< folds where no feature passed screening; all were kept
};

/// Receives, for each fold, the original row indices the fit is built from.
using TrainingObserver = std::function<void(int fold, const std::vector<Eigen::Index>& training_rows)>;

/**
 * Pooled out-of-fold Pearson correlation between predictions and outcomes.
 * Training subjects left with fewer than 2 rows in a fold are dropped from
 * that fold's fit and flagged; their held-out rows are predicted from the
 * fixed map alone when possible. With screening enabled, features are
 * selected from each fold's training rows only.
 *
 * `features` may carry the row inner products of data.features so several
 * calls on one dataset share them; without it they are built per call.
 * Either way they are only used when screening is off.
 */
[[nodiscard]] CvResult cv_correlation(const LongitudinalDataset& data, Method method, const CvParams& params,
                                      const FoldPlan& folds, const TrainingObserver& observer = {},
                                      const InnerProductCache* features = nullptr);

/// Pearson correlation; zero-variance input yields 0 and sets `degenerate`.
[[nodiscard]] double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b, bool* degenerate = nullptr);

} // namespace sklpca
