#pragma once

#include "sklpca/dataset.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace fixtures {

inline sklpca::GroupIndex groups_of(const std::vector<Eigen::Index>& sizes, const std::string& prefix = "s") {
    std::vector<sklpca::GroupIndex::Segment> segments;
    Eigen::Index start = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        segments.push_back({prefix + std::to_string(10 + i), start, sizes[i]});
        start += sizes[i];
    }
    return sklpca::GroupIndex(segments);
}

/// Dataset over contiguous subjects of the given sizes, time = 1..n_i.
inline sklpca::LongitudinalDataset make_dataset(const std::vector<Eigen::Index>& sizes, const Eigen::MatrixXd& x,
                                                const Eigen::VectorXd& y, const std::string& prefix = "s") {
    sklpca::LongitudinalDataset data;
    data.groups = groups_of(sizes, prefix);
    data.features = x;
    data.outcomes = y;
    data.time.resize(x.rows());
    for (const auto& s : data.groups.segments()) {
        for (Eigen::Index r = 0; r < s.count; ++r) {
            data.time(s.start + r) = static_cast<double>(r + 1);
        }
    }
    data.validate();
    return data;
}

inline Eigen::VectorXd ranks(const Eigen::VectorXd& v) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double r = 0.0;
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            r += v(j) < v(i) ? 1.0 : (v(j) == v(i) && j != i ? 0.5 : 0.0);
        }
        out(i) = r;
    }
    return out;
}

/// Spearman rank correlation (average ranks for ties).
inline double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ra = ranks(a);
    const Eigen::VectorXd rb = ranks(b);
    const Eigen::VectorXd ca = ra.array() - ra.mean();
    const Eigen::VectorXd cb = rb.array() - rb.mean();
    return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}

} // namespace fixtures
