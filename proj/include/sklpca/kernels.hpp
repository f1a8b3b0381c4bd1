#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace sklpca {

enum class KernelFamily { Linear, Gaussian };
enum class BandwidthMode { Fixed, MedianHeuristic };

/**
 * Kernel family and parameters.
 *
 *   Linear:   k(w, w') = w^T w'
 *   Gaussian: k(w, w') = exp(-||w - w'||^2 / (2 sigma^2))
 *
 * A Gaussian spec in MedianHeuristic mode must be resolved against data
 * (see resolve_bandwidth) before it can be evaluated.
 */
struct KernelSpec {
    KernelFamily family = KernelFamily::Linear;
    double bandwidth = 1.0;
    BandwidthMode bandwidth_mode = BandwidthMode::Fixed;

    static KernelSpec linear() { return {}; }
    static KernelSpec gaussian(double sigma) {
        return {KernelFamily::Gaussian, sigma, BandwidthMode::Fixed};
    }
    static KernelSpec gaussian_median() {
        return {KernelFamily::Gaussian, 0.0, BandwidthMode::MedianHeuristic};
    }

    [[nodiscard]] bool resolved() const noexcept {
        return family == KernelFamily::Linear || bandwidth_mode == BandwidthMode::Fixed;
    }
    /// Throws ConfigError for a Fixed Gaussian with non-positive bandwidth.
    void validate() const;
    [[nodiscard]] std::string describe() const;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

[[nodiscard]] std::string to_string(KernelFamily family);
[[nodiscard]] KernelFamily kernel_family_from_string(const std::string& name);

/// Dense Gram matrix; `symmetric` is set iff both argument sets were the same data.
struct GramMatrix {
    Eigen::MatrixXd values;
    bool symmetric = false;

    [[nodiscard]] Eigen::Index rows() const noexcept { return values.rows(); }
    [[nodiscard]] Eigen::Index cols() const noexcept { return values.cols(); }
};

[[nodiscard]] double kernel_eval(const KernelSpec& spec,
                                 const Eigen::Ref<const Eigen::VectorXd>& w,
                                 const Eigen::Ref<const Eigen::VectorXd>& w_prime);

/// Gram matrix of the rows of `a` against themselves (symmetric flag set).
[[nodiscard]] GramMatrix gram(const KernelSpec& spec, const Eigen::MatrixXd& a);

/// Cross Gram matrix, entry (r, c) = k(a.row(r), b.row(c)).
[[nodiscard]] GramMatrix gram(const KernelSpec& spec, const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b);

/// Row inner products of one feature matrix, computed once. Gram matrices
/// over any row subset are then sliced out at O(1) cost per entry, with the
/// same arithmetic as gram() on the gathered rows.
class InnerProductCache {
public:
    explicit InnerProductCache(const Eigen::MatrixXd& x);

    /// Gram of `spec` over the rows listed in `rows` (spec must be resolved).
    [[nodiscard]] GramMatrix gram(const KernelSpec& spec, const std::vector<Eigen::Index>& rows) const;

    /// Cross Gram, entry (r, c) = k(x[rows_a[r]], x[rows_b[c]]).
    [[nodiscard]] GramMatrix gram(const KernelSpec& spec, const std::vector<Eigen::Index>& rows_a,
                                  const std::vector<Eigen::Index>& rows_b) const;

    [[nodiscard]] Eigen::Index rows() const noexcept { return inner_.rows(); }

private:
    Eigen::MatrixXd inner_; // lower triangle is authoritative
    Eigen::VectorXd sq_;    // squared row norms, contiguous for the slicing loops
};

/// Replaces a MedianHeuristic bandwidth by the median pairwise Euclidean
/// distance over distinct row pairs of `a`. At most `max_rows` rows are used;
/// the subsample is drawn deterministically from `seed`.
[[nodiscard]] KernelSpec resolve_bandwidth(const KernelSpec& spec, const Eigen::MatrixXd& a,
                                           std::uint64_t seed = 0,
                                           Eigen::Index max_rows = 2000);

/// H K H with H = I - 11^T / n.
[[nodiscard]] Eigen::MatrixXd double_center(const Eigen::MatrixXd& k);

/// Debug check that a symmetric Gram matrix is PSD (smallest eigenvalue
/// >= -1e-8 * trace / n). Compiled out under NDEBUG.
void debug_check_psd(const GramMatrix& k);

} // namespace sklpca
