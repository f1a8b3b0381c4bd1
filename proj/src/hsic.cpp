#include "sklpca/hsic.hpp"

#include "sklpca/errors.hpp"

#include <string>

namespace sklpca {

namespace {

void require_square_pair(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l, const char* context) {
    if (k.rows() != k.cols() || l.rows() != l.cols() || k.rows() != l.rows()) {
        throw DimensionError(std::string(context) + ": kernels must be square and of equal size");
    }
}

void require_groups_cover(const GroupIndex& groups, Eigen::Index n, const char* context) {
    if (groups.total_rows() != n) {
        throw DimensionError(std::string(context) + ": group index covers " +
                             std::to_string(groups.total_rows()) + " rows, kernel has " +
                             std::to_string(n));
    }
}

double normalizer(Eigen::Index count, SubjectNormalization norm) {
    return norm == SubjectNormalization::Verbatim ? static_cast<double>(count - 1)
                                                  : static_cast<double>(count);
}

// tr(A H B H) for square A, B of equal size.
double centered_trace(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return double_center(a).cwiseProduct(b.transpose()).sum();
}

} // namespace

std::string to_string(SubjectNormalization norm) {
    return norm == SubjectNormalization::Verbatim ? "verbatim" : "mean";
}

SubjectNormalization subject_normalization_from_string(const std::string& name) {
    if (name == "verbatim") {
        return SubjectNormalization::Verbatim;
    }
    if (name == "mean") {
        return SubjectNormalization::Mean;
    }
    throw ConfigError("unknown subject normalization '" + name + "' (expected verbatim or mean)");
}

double hsic_empirical(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l) {
    require_square_pair(k, l, "hsic_empirical");
    const Eigen::Index n = k.rows();
    if (n < 2) {
        throw InsufficientDataError("hsic_empirical: at least 2 observations required");
    }
    const double scale = static_cast<double>(n - 1);
    return centered_trace(k, l) / (scale * scale);
}

SubjectMeanKernel subject_mean_kernel(const Eigen::MatrixXd& k, const GroupIndex& row_groups,
                                      const GroupIndex& col_groups, SubjectNormalization norm) {
    require_groups_cover(row_groups, k.rows(), "subject_mean_kernel (rows)");
    require_groups_cover(col_groups, k.cols(), "subject_mean_kernel (cols)");
    if (norm == SubjectNormalization::Verbatim) {
        row_groups.require_min_count(2, "subject_mean_kernel normalization");
        col_groups.require_min_count(2, "subject_mean_kernel normalization");
    }
    const Eigen::Index m = row_groups.subjects();
    const Eigen::Index mc = col_groups.subjects();
    SubjectMeanKernel out{Eigen::MatrixXd(m, mc)};
    for (Eigen::Index j = 0; j < mc; ++j) {
        const auto& cj = col_groups[j];
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& ri = row_groups[i];
            const double block = k.block(ri.start, cj.start, ri.count, cj.count).sum();
            out.values(i, j) = block / (normalizer(ri.count, norm) * normalizer(cj.count, norm));
        }
    }
    return out;
}

double hsic_fixed(const SubjectMeanKernel& kbar, const SubjectMeanKernel& lbar) {
    require_square_pair(kbar.values, lbar.values, "hsic_fixed");
    const Eigen::Index m = kbar.values.rows();
    if (m < 2) {
        throw InsufficientDataError("hsic_fixed: at least 2 subjects required");
    }
    const double scale = static_cast<double>(m - 1);
    return centered_trace(kbar.values, lbar.values) / (scale * scale);
}

double hsic_random(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l, const GroupIndex& groups) {
    require_square_pair(k, l, "hsic_random");
    require_groups_cover(groups, k.rows(), "hsic_random");
    groups.require_min_count(2, "hsic_random");
    const Eigen::Index m = groups.subjects();
    if (m < 1) {
        throw InsufficientDataError("hsic_random: no subjects");
    }
    double total = 0.0;
    for (const auto& s : groups.segments()) {
        const double scale = static_cast<double>(s.count - 1);
        total += centered_trace(k.block(s.start, s.start, s.count, s.count),
                                l.block(s.start, s.start, s.count, s.count)) /
                 (scale * scale);
    }
    return total / static_cast<double>(m);
}

HsicComponents hsic_mixed(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l, const GroupIndex& groups,
                          SubjectNormalization norm) {
    HsicComponents out;
    out.fixed = hsic_fixed(subject_mean_kernel(k, groups, groups, norm),
                           subject_mean_kernel(l, groups, groups, norm));
    out.random = hsic_random(k, l, groups);
    out.mixed = out.fixed + out.random;
    return out;
}

Eigen::VectorXd diag_bias_correction(const Eigen::MatrixXd& k, const GroupIndex& groups) {
    if (k.rows() != k.cols()) {
        throw DimensionError("diag_bias_correction: kernel must be square");
    }
    require_groups_cover(groups, k.rows(), "diag_bias_correction");
    groups.require_min_count(2, "diag_bias_correction");
    Eigen::VectorXd out(groups.subjects());
    for (Eigen::Index i = 0; i < groups.subjects(); ++i) {
        const auto& s = groups[i];
        const double scale = static_cast<double>(s.count - 1);
        out(i) = k.block(s.start, s.start, s.count, s.count).trace() / (scale * scale);
    }
    return out;
}

} // namespace sklpca
