#include "sklpca/dataset.hpp"

#include "sklpca/errors.hpp"

#include <algorithm>
#include <string>

namespace sklpca {

void LongitudinalDataset::validate() const {
    const Eigen::Index n = features.rows();
    if (outcomes.size() != n || time.size() != n || groups.total_rows() != n) {
        throw DimensionError("dataset: features, outcomes, time and groups disagree on the row count");
    }
    if (!features.allFinite() || !outcomes.allFinite() || !time.allFinite()) {
        throw InputError("dataset: non-finite values (complete cases are required)");
    }
    for (const auto& s : groups.segments()) {
        for (Eigen::Index r = s.start + 1; r < s.start + s.count; ++r) {
            if (!(time(r) > time(r - 1))) {
                throw InputError("dataset: times of subject '" + s.subject_id +
                                 "' are not strictly increasing");
            }
        }
    }
}

LongitudinalDataset LongitudinalDataset::subset(const std::vector<Eigen::Index>& rows) const {
    if (!std::is_sorted(rows.begin(), rows.end()) ||
        std::adjacent_find(rows.begin(), rows.end()) != rows.end()) {
        throw InputError("dataset subset: row indices must be strictly increasing");
    }
    const auto labels = groups.row_labels();
    LongitudinalDataset out;
    const auto k = static_cast<Eigen::Index>(rows.size());
    out.features.resize(k, features.cols());
    out.outcomes.resize(k);
    out.time.resize(k);
    std::vector<std::string> picked;
    picked.reserve(rows.size());
    for (Eigen::Index r = 0; r < k; ++r) {
        const Eigen::Index src = rows[static_cast<std::size_t>(r)];
        if (src < 0 || src >= features.rows()) {
            throw DimensionError("dataset subset: row index out of range");
        }
        out.features.row(r) = features.row(src);
        out.outcomes(r) = outcomes(src);
        out.time(r) = time(src);
        picked.push_back(labels[static_cast<std::size_t>(src)]);
    }
    out.groups = GroupIndex::from_labels(picked);
    return out;
}

LongitudinalDataset LongitudinalDataset::select_features(const std::vector<Eigen::Index>& columns) const {
    LongitudinalDataset out{groups, Eigen::MatrixXd(rows(), static_cast<Eigen::Index>(columns.size())),
                            outcomes, time};
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] < 0 || columns[c] >= dims()) {
            throw DimensionError("dataset: feature column out of range");
        }
        out.features.col(static_cast<Eigen::Index>(c)) = features.col(columns[c]);
    }
    return out;
}

Eigen::MatrixXd LongitudinalDataset::subject_features(Eigen::Index subject) const {
    const auto& s = groups[subject];
    return features.middleRows(s.start, s.count);
}

Eigen::VectorXd LongitudinalDataset::subject_outcomes(Eigen::Index subject) const {
    const auto& s = groups[subject];
    return outcomes.segment(s.start, s.count);
}

bool operator==(const LongitudinalDataset& a, const LongitudinalDataset& b) {
    return a.groups == b.groups && a.features.rows() == b.features.rows() &&
           a.features.cols() == b.features.cols() && a.outcomes.size() == b.outcomes.size() &&
           a.time.size() == b.time.size() && a.features == b.features &&
           a.outcomes == b.outcomes && a.time == b.time;
}

} // namespace sklpca
