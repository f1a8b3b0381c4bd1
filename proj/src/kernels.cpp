#include "sklpca/kernels.hpp"

#include "sklpca/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

namespace sklpca {

namespace {

void require_resolved(const KernelSpec& spec) {
    if (!spec.resolved()) {
        throw ConfigError("Gaussian kernel bandwidth is unresolved (median heuristic); "
                          "call resolve_bandwidth first");
    }
    spec.validate();
}

double gaussian_from_sqdist(double sqdist, double sigma) {
    return std::exp(-std::max(sqdist, 0.0) / (2.0 * sigma * sigma));
}

// Same map over a block of squared distances, in place; Eigen's packet exp
// is several times faster than calling std::exp entry by entry.
template <typename Block>
void gaussian_from_sqdist_inplace(Block&& sqdist, double sigma) {
    sqdist = (-sqdist.array().max(0.0) / (2.0 * sigma * sigma)).exp();
}

void mirror_lower(Eigen::MatrixXd& k) {
    const Eigen::Index n = k.rows();
    for (Eigen::Index c = 1; c < n; ++c) {
        for (Eigen::Index r = 0; r < c; ++r) {
            k(r, c) = k(c, r);
        }
    }
}

double median_of(std::vector<double>& values) {
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

} // namespace

void KernelSpec::validate() const {
    if (family == KernelFamily::Gaussian && bandwidth_mode == BandwidthMode::Fixed &&
        !(bandwidth > 0.0 && std::isfinite(bandwidth))) {
        throw ConfigError("Gaussian kernel bandwidth must be a positive finite number");
    }
}

std::string KernelSpec::describe() const {
    if (family == KernelFamily::Linear) {
        return "linear";
    }
    if (bandwidth_mode == BandwidthMode::MedianHeuristic) {
        return "gaussian(sigma=median)";
    }
    std::ostringstream out;
    out.precision(17);
    out << "gaussian(sigma=" << bandwidth << ")";
    return out.str();
}

std::string to_string(KernelFamily family) {
    return family == KernelFamily::Linear ? "linear" : "gaussian";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "linear") {
        return KernelFamily::Linear;
    }
    if (name == "gaussian" || name == "radial" || name == "rbf") {
        return KernelFamily::Gaussian;
    }
    throw ConfigError("unknown kernel family '" + name + "' (expected linear or gaussian)");
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& w,
                   const Eigen::Ref<const Eigen::VectorXd>& w_prime) {
    if (w.size() != w_prime.size()) {
        throw DimensionError("kernel_eval: argument lengths differ (" + std::to_string(w.size()) +
                             " vs " + std::to_string(w_prime.size()) + ")");
    }
    if (spec.family == KernelFamily::Linear) {
        return w.dot(w_prime);
    }
    require_resolved(spec);
    return gaussian_from_sqdist((w - w_prime).squaredNorm(), spec.bandwidth);
}

GramMatrix gram(const KernelSpec& spec, const Eigen::MatrixXd& a) {
    if (a.cols() < 1) {
        throw DimensionError("gram: feature matrix has no columns");
    }
    if (spec.family == KernelFamily::Gaussian) {
        require_resolved(spec);
    }
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    k.selfadjointView<Eigen::Lower>().rankUpdate(a);
    if (spec.family == KernelFamily::Gaussian) {
        const Eigen::VectorXd sq = k.diagonal();
        for (Eigen::Index c = 0; c < n; ++c) {
            k(c, c) = 1.0;
            const Eigen::Index below = n - c - 1;
            auto col = k.col(c).tail(below);
            col = (sq.tail(below).array() + sq(c) - 2.0 * col.array()).matrix();
            gaussian_from_sqdist_inplace(col, spec.bandwidth);
        }
    }
    mirror_lower(k);
    GramMatrix out{std::move(k), true};
    debug_check_psd(out);
    return out;
}

GramMatrix gram(const KernelSpec& spec, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.cols() != b.cols()) {
        throw DimensionError("gram: column counts differ (" + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.cols()) + ")");
    }
    if (&a == &b || (a.rows() == b.rows() && a == b)) {
        return gram(spec, a);
    }
    if (a.cols() < 1) {
        throw DimensionError("gram: feature matrix has no columns");
    }
    if (spec.family == KernelFamily::Gaussian) {
        require_resolved(spec);
    }
    Eigen::MatrixXd k = a * b.transpose();
    if (spec.family == KernelFamily::Gaussian) {
        const Eigen::VectorXd sa = a.rowwise().squaredNorm();
        const Eigen::VectorXd sb = b.rowwise().squaredNorm();
        for (Eigen::Index c = 0; c < k.cols(); ++c) {
            k.col(c) = (sa.array() + sb(c) - 2.0 * k.col(c).array()).matrix();
        }
        gaussian_from_sqdist_inplace(k, spec.bandwidth);
    }
    return GramMatrix{std::move(k), false};
}

InnerProductCache::InnerProductCache(const Eigen::MatrixXd& x) {
    if (x.cols() < 1) {
        throw DimensionError("InnerProductCache: feature matrix has no columns");
    }
    inner_ = Eigen::MatrixXd::Zero(x.rows(), x.rows());
    inner_.selfadjointView<Eigen::Lower>().rankUpdate(x);
    sq_ = inner_.diagonal();
}

GramMatrix InnerProductCache::gram(const KernelSpec& spec, const std::vector<Eigen::Index>& rows) const {
    if (spec.family == KernelFamily::Gaussian) {
        require_resolved(spec);
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    for (Eigen::Index r : rows) {
        if (r < 0 || r >= inner_.rows()) {
            throw DimensionError("InnerProductCache: row index out of range");
        }
    }
    // Entry (a, b) of the cached lower triangle, a and b in either order.
    const auto at = [&](Eigen::Index a, Eigen::Index b) {
        return a >= b ? inner_(a, b) : inner_(b, a);
    };
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const Eigen::Index rc = rows[static_cast<std::size_t>(c)];
        const double sc = sq_(rc);
        if (spec.family == KernelFamily::Gaussian) {
            k(c, c) = 1.0;
            for (Eigen::Index r = c + 1; r < n; ++r) {
                const Eigen::Index rr = rows[static_cast<std::size_t>(r)];
                k(r, c) = sq_(rr) + sc - 2.0 * at(rr, rc);
            }
            gaussian_from_sqdist_inplace(k.col(c).tail(n - c - 1), spec.bandwidth);
        } else {
            for (Eigen::Index r = c; r < n; ++r) {
                k(r, c) = at(rows[static_cast<std::size_t>(r)], rc);
            }
        }
    }
    mirror_lower(k);
    GramMatrix out{std::move(k), true};
    debug_check_psd(out);
    return out;
}

GramMatrix InnerProductCache::gram(const KernelSpec& spec, const std::vector<Eigen::Index>& rows_a,
                                   const std::vector<Eigen::Index>& rows_b) const {
    if (spec.family == KernelFamily::Gaussian) {
        require_resolved(spec);
    }
    for (const auto* rows : {&rows_a, &rows_b}) {
        for (Eigen::Index r : *rows) {
            if (r < 0 || r >= inner_.rows()) {
                throw DimensionError("InnerProductCache: row index out of range");
            }
        }
    }
    Eigen::MatrixXd k(static_cast<Eigen::Index>(rows_a.size()), static_cast<Eigen::Index>(rows_b.size()));
    for (Eigen::Index c = 0; c < k.cols(); ++c) {
        const Eigen::Index rc = rows_b[static_cast<std::size_t>(c)];
        for (Eigen::Index r = 0; r < k.rows(); ++r) {
            const Eigen::Index rr = rows_a[static_cast<std::size_t>(r)];
            const double ip = rr >= rc ? inner_(rr, rc) : inner_(rc, rr);
            k(r, c) = spec.family == KernelFamily::Gaussian ? sq_(rr) + sq_(rc) - 2.0 * ip : ip;
        }
    }
    if (spec.family == KernelFamily::Gaussian) {
        gaussian_from_sqdist_inplace(k, spec.bandwidth);
    }
    return GramMatrix{std::move(k), false};
}

KernelSpec resolve_bandwidth(const KernelSpec& spec, const Eigen::MatrixXd& a, std::uint64_t seed,
                             Eigen::Index max_rows) {
    if (spec.family == KernelFamily::Linear || spec.bandwidth_mode == BandwidthMode::Fixed) {
        spec.validate();
        return spec;
    }
    if (a.rows() < 2) {
        throw InsufficientDataError("resolve_bandwidth: need at least 2 rows");
    }
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(a.rows()));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    if (max_rows >= 2 && a.rows() > max_rows) {
        std::vector<Eigen::Index> picked;
        picked.reserve(static_cast<std::size_t>(max_rows));
        std::mt19937_64 rng(seed);
        std::sample(rows.begin(), rows.end(), std::back_inserter(picked), max_rows, rng);
        rows = std::move(picked);
    }
    // One column per sampled row keeps the pairwise loop contiguous.
    Eigen::MatrixXd cols(a.cols(), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t x = 0; x < rows.size(); ++x) {
        cols.col(static_cast<Eigen::Index>(x)) = a.row(rows[x]).transpose();
    }
    std::vector<double> dist;
    dist.reserve(rows.size() * (rows.size() - 1) / 2);
    for (Eigen::Index x = 0; x < cols.cols(); ++x) {
        for (Eigen::Index y = x + 1; y < cols.cols(); ++y) {
            dist.push_back((cols.col(x) - cols.col(y)).norm());
        }
    }
    const double sigma = median_of(dist);
    if (!(sigma > 0.0)) {
        throw DegenerateDataError("resolve_bandwidth: median pairwise distance is zero "
                                  "(rows are identical)");
    }
    return KernelSpec::gaussian(sigma);
}

Eigen::MatrixXd double_center(const Eigen::MatrixXd& k) {
    if (k.rows() != k.cols()) {
        throw DimensionError("double_center: matrix is not square");
    }
    if (k.rows() == 0) {
        throw DimensionError("double_center: empty matrix");
    }
    const Eigen::VectorXd row_mean = k.rowwise().mean();
    const Eigen::RowVectorXd col_mean = k.colwise().mean();
    const double grand = row_mean.mean();
    // One fused pass; same operation order as subtracting row, then column means.
    Eigen::MatrixXd out = ((k.array().colwise() - row_mean.array()).rowwise() - col_mean.array()) + grand;
    return out;
}

void debug_check_psd([[maybe_unused]] const GramMatrix& k) {
#ifndef NDEBUG
    if (!k.symmetric || k.rows() == 0 || k.rows() > 500) {
        return;
    }
    const double n = static_cast<double>(k.rows());
    const double floor = -1e-8 * std::abs(k.values.trace()) / n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k.values, Eigen::EigenvaluesOnly);
    assert(solver.eigenvalues().minCoeff() >= floor && "Gram matrix is not PSD");
#endif
}

} // namespace sklpca
