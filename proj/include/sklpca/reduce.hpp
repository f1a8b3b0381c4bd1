#pragma once

#include "sklpca/dataset.hpp"
#include "sklpca/hsic.hpp"
#include "sklpca/kernels.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sklpca {

/// Pooled (i.i.d.) supervised kernel PCA: top generalized eigenvectors of (K H L H K, K).
struct SkpcaModel {
    KernelSpec feature_kernel; ///< resolved
    KernelSpec outcome_kernel; ///< resolved
    Eigen::MatrixXd train_features;
    Eigen::MatrixXd vectors;      ///< n x q
    Eigen::VectorXd eigenvalues;  ///< q, descending
    double regularization = 0.0;
    bool rank_deficient = false;
    Eigen::MatrixXd train_scores; ///< K V, n x q

    [[nodiscard]] Eigen::Index q() const noexcept { return vectors.cols(); }
};

struct SkpcaOptions {
    std::optional<Eigen::Index> q; ///< unset: min(n - 1, numerical rank)
    std::uint64_t bandwidth_seed = 0;
    Eigen::Index bandwidth_max_rows = 2000;
};

/// Random (within-subject) reduction of one training subject.
struct SubjectReduction {
    Eigen::MatrixXd vectors;     ///< n_i x q_i
    Eigen::VectorXd eigenvalues; ///< q_i, descending
    double regularization = 0.0;
    bool zero_information = false; ///< outcome block carries no centered signal
    bool rank_deficient = false;
    Eigen::MatrixXd train_scores; ///< K_i V_i, n_i x q_i
};

/// Longitudinal reduction: a fixed (between-subject) map from the subject-mean
/// kernels plus one random (within-subject) map per training subject.
struct SklpcaModel {
    KernelSpec feature_kernel; ///< resolved
    KernelSpec outcome_kernel; ///< resolved
    SubjectNormalization normalization = SubjectNormalization::Verbatim;
    GroupIndex groups;
    Eigen::MatrixXd train_features;

    Eigen::MatrixXd fixed_vectors;     ///< Vbar, m x q
    Eigen::VectorXd fixed_eigenvalues; ///< q, descending
    double fixed_regularization = 0.0;
    bool fixed_rank_deficient = false;
    Eigen::MatrixXd train_fixed_scores; ///< Kbar Vbar, m x q

    std::vector<SubjectReduction> subjects;

    [[nodiscard]] Eigen::Index q() const noexcept { return fixed_vectors.cols(); }
    [[nodiscard]] Eigen::Index q_i(Eigen::Index subject) const {
        return subjects[static_cast<std::size_t>(subject)].vectors.cols();
    }
};

struct SklpcaOptions {
    std::optional<Eigen::Index> q;           ///< unset: min(m - 1, numerical rank)
    std::optional<Eigen::Index> q_i;         ///< uniform; unset: min_i(n_i - 1) capped by rank
    std::vector<Eigen::Index> q_per_subject; ///< overrides q_i when non-empty
    SubjectNormalization normalization = SubjectNormalization::Verbatim;
    std::uint64_t bandwidth_seed = 0;
    Eigen::Index bandwidth_max_rows = 2000;
    unsigned threads = 1;
};

[[nodiscard]] SkpcaModel fit_skpca(const LongitudinalDataset& data, const KernelSpec& feature_kernel,
                                   const KernelSpec& outcome_kernel, const SkpcaOptions& options = {});

/// As above with the feature Gram over data.features supplied by the caller;
/// `feature_kernel` must already be resolved and match it.
[[nodiscard]] SkpcaModel fit_skpca(const LongitudinalDataset& data, const KernelSpec& feature_kernel,
                                   const KernelSpec& outcome_kernel, const SkpcaOptions& options,
                                   const Eigen::MatrixXd& feature_gram);

/// k(X_test, X_train) V, n' x q.
[[nodiscard]] Eigen::MatrixXd project_skpca(const SkpcaModel& model, const Eigen::MatrixXd& x_test);

[[nodiscard]] SklpcaModel fit_sklpca(const LongitudinalDataset& data, const KernelSpec& feature_kernel,
                                     const KernelSpec& outcome_kernel, const SklpcaOptions& options = {});

/// As above with a caller-supplied feature Gram (see the fit_skpca overload).
[[nodiscard]] SklpcaModel fit_sklpca(const LongitudinalDataset& data, const KernelSpec& feature_kernel,
                                     const KernelSpec& outcome_kernel, const SklpcaOptions& options,
                                     const Eigen::MatrixXd& feature_gram);

/// Subject-mean kernel row of a test block against every training subject, 1 x m.
[[nodiscard]] Eigen::RowVectorXd fixed_test_kernel(const SklpcaModel& model, const Eigen::MatrixXd& x_test);

/// Fixed projection of one subject's test block (n' >= 2 rows), 1 x q.
[[nodiscard]] Eigen::RowVectorXd project_fixed(const SklpcaModel& model, const Eigen::MatrixXd& x_test);

/// Random projection of test rows onto a training subject's map, n' x q_i.
/// Throws UnknownSubjectError for subjects absent from training.
[[nodiscard]] Eigen::MatrixXd project_random(const SklpcaModel& model, const Eigen::MatrixXd& x_test,
                                             const std::string& subject_id);

/// tr(V^T Q V) for a candidate frame V; the quantity the fixed map maximizes.
[[nodiscard]] double trace_objective(const Eigen::MatrixXd& q, const Eigen::MatrixXd& v);

/// Q = K H L H K computed as (H K)^T (H L H) (H K); centered parts that vanish
/// relative to their inputs (below 1e-12 in Frobenius norm) are set to exact zero.
/// `outcome_degenerate` reports that H L H vanished.
[[nodiscard]] Eigen::MatrixXd supervised_target(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l,
                                                bool* outcome_degenerate = nullptr);

/// B with B B^T = K H L H K, built from a pivoted Cholesky factor of H L H.
/// Returns an n x 0 matrix when either centered part vanishes.
[[nodiscard]] Eigen::MatrixXd supervised_factor(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l,
                                                bool* outcome_degenerate = nullptr);

} // namespace sklpca
