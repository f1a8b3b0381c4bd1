#pragma once

#include "sklpca/groups.hpp"
#include "sklpca/kernels.hpp"

#include <Eigen/Dense>

namespace sklpca {

/// Normalization of the subject-mean kernel block sums.
///   Verbatim: divide by (n_i - 1)(n_j - 1)  (default)
///   Mean:     divide by n_i n_j             (sensitivity analysis)
enum class SubjectNormalization { Verbatim, Mean };

[[nodiscard]] std::string to_string(SubjectNormalization norm);
[[nodiscard]] SubjectNormalization subject_normalization_from_string(const std::string& name);

/// m x m (or m x m' for cross kernels) matrix of normalized block sums.
struct SubjectMeanKernel {
    Eigen::MatrixXd values;
};

struct HsicComponents {
    double fixed = 0.0;
    double random = 0.0;
    double mixed = 0.0; ///< fixed + random
};

/// (n - 1)^-2 tr(K H L H) over the pooled sample.
[[nodiscard]] double hsic_empirical(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l);

/// Entry (i, j) = sum of the (i, j) kernel block / normalizer(n_i) normalizer(n_j).
[[nodiscard]] SubjectMeanKernel subject_mean_kernel(
    const Eigen::MatrixXd& k, const GroupIndex& row_groups, const GroupIndex& col_groups,
    SubjectNormalization norm = SubjectNormalization::Verbatim);

/// (m - 1)^-2 tr(Kbar H Lbar H): between-subject dependence.
[[nodiscard]] double hsic_fixed(const SubjectMeanKernel& kbar, const SubjectMeanKernel& lbar);

/// m^-1 sum_i (n_i - 1)^-2 tr(K_i H L_i H): average within-subject dependence.
[[nodiscard]] double hsic_random(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l,
                                 const GroupIndex& groups);

[[nodiscard]] HsicComponents hsic_mixed(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l,
                                        const GroupIndex& groups,
                                        SubjectNormalization norm = SubjectNormalization::Verbatim);

/// Per-subject (n_i - 1)^-2 tr(K_i): the diagonal term separating Kbar_ii from its
/// U-statistic counterpart. Diagnostic only; no estimator applies it.
[[nodiscard]] Eigen::VectorXd diag_bias_correction(const Eigen::MatrixXd& k, const GroupIndex& groups);

} // namespace sklpca
