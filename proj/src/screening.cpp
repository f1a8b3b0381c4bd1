#include "sklpca/screening.hpp"

#include "sklpca/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace sklpca {

double correlation_p_value(double r, Eigen::Index n) {
    if (n < 3) {
        throw InsufficientDataError("correlation_p_value: need at least 3 pairs");
    }
    const double a = std::min(std::abs(r), 1.0);
    if (a == 1.0) {
        return 0.0;
    }
    const double df = static_cast<double>(n - 2);
    const double t = a * std::sqrt(df / ((1.0 - a) * (1.0 + a)));
    const boost::math::students_t dist(df);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

std::vector<Eigen::Index> benjamini_hochberg(const Eigen::VectorXd& p_values, double fdr) {
    if (!(fdr > 0.0 && fdr <= 1.0)) {
        throw ConfigError("benjamini_hochberg: fdr must lie in (0, 1]");
    }
    const Eigen::Index p = p_values.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return p_values(a) < p_values(b); });

    Eigen::Index cutoff = 0;
    for (Eigen::Index k = p; k >= 1; --k) {
        const double bound = fdr * static_cast<double>(k) / static_cast<double>(p);
        if (p_values(order[static_cast<std::size_t>(k - 1)]) <= bound) {
            cutoff = k;
            break;
        }
    }
    std::vector<Eigen::Index> out(order.begin(), order.begin() + cutoff);
    std::sort(out.begin(), out.end());
    return out;
}

ScreeningResult screen_features(const LongitudinalDataset& data, double fdr) {
    if (!(fdr > 0.0 && fdr <= 1.0)) {
        throw ConfigError("screen_features: fdr must lie in (0, 1]");
    }
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.dims();
    if (n < 3) {
        throw InsufficientDataError("screen_features: need at least 3 rows");
    }
    const Eigen::VectorXd y = data.outcomes.array() - data.outcomes.mean();
    const double y_norm = y.norm();
    if (y_norm <= 1e-12 * data.outcomes.norm()) {
        throw DegenerateDataError("screen_features: outcome is constant");
    }

    ScreeningResult out;
    out.correlations = Eigen::VectorXd::Zero(p);
    out.p_values = Eigen::VectorXd::Ones(p);
    std::vector<bool> constant(static_cast<std::size_t>(p), false);
    for (Eigen::Index j = 0; j < p; ++j) {
        const Eigen::VectorXd x = data.features.col(j).array() - data.features.col(j).mean();
        const double x_norm = x.norm();
        if (x_norm <= 1e-12 * data.features.col(j).norm()) {
            constant[static_cast<std::size_t>(j)] = true;
            continue;
        }
        const double r = x.dot(y) / (x_norm * y_norm);
        out.correlations(j) = r;
        out.p_values(j) = correlation_p_value(r, n);
    }
    out.selected = benjamini_hochberg(out.p_values, fdr);
    // At fdr = 1 every p-value passes; constant features stay out regardless.
    std::erase_if(out.selected, [&](Eigen::Index j) { return constant[static_cast<std::size_t>(j)]; });
    if (out.selected.empty()) {
        throw ScreeningEmptyError("screen_features: no feature passes FDR " + std::to_string(fdr));
    }
    return out;
}

} // namespace sklpca
