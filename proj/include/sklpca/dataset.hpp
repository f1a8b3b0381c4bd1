#pragma once

#include "sklpca/groups.hpp"

#include <Eigen/Dense>

#include <vector>

namespace sklpca {

/// Repeated-measure data: rows sorted by (subject, time), complete cases only.
struct LongitudinalDataset {
    GroupIndex groups;
    Eigen::MatrixXd features; ///< n x p
    Eigen::VectorXd outcomes; ///< n
    Eigen::VectorXd time;     ///< n, strictly increasing within subject

    [[nodiscard]] Eigen::Index rows() const noexcept { return features.rows(); }
    [[nodiscard]] Eigen::Index dims() const noexcept { return features.cols(); }
    [[nodiscard]] Eigen::Index subjects() const noexcept { return groups.subjects(); }

    /// Shape agreement, finiteness and within-subject time order.
    void validate() const;

    /// Rows in ascending original order; subjects left without rows are dropped.
    [[nodiscard]] LongitudinalDataset subset(const std::vector<Eigen::Index>& rows) const;

    /// Same rows restricted to the given feature columns.
    [[nodiscard]] LongitudinalDataset select_features(const std::vector<Eigen::Index>& columns) const;

    [[nodiscard]] Eigen::MatrixXd subject_features(Eigen::Index subject) const;
    [[nodiscard]] Eigen::VectorXd subject_outcomes(Eigen::Index subject) const;

    friend bool operator==(const LongitudinalDataset& a, const LongitudinalDataset& b);
};

} // namespace sklpca
