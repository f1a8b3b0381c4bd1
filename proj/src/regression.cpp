#include "sklpca/regression.hpp"

#include "sklpca/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace sklpca {

namespace {

constexpr double kMinRcond = 1e-12;
constexpr int kMaxEscalations = 3;

} // namespace

LinearFit fit_linear(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, double ridge_lambda) {
    if (design.rows() != y.size()) {
        throw DimensionError("fit_linear: design has " + std::to_string(design.rows()) +
                             " rows, outcome has " + std::to_string(y.size()));
    }
    if (y.size() < 1) {
        throw InsufficientDataError("fit_linear: no observations");
    }
    if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) {
        throw ConfigError("fit_linear: ridge lambda must be a finite non-negative number");
    }
    const Eigen::Index p = design.cols() + 1;
    Eigen::MatrixXd a(design.rows(), p);
    a.col(0).setOnes();
    a.rightCols(design.cols()) = design;
    const Eigen::MatrixXd normal = a.transpose() * a;
    const Eigen::VectorXd rhs = a.transpose() * y;

    double lambda = ridge_lambda;
    const double fallback = 1e-8 * normal.diagonal().mean();
    for (int attempt = 0; attempt <= kMaxEscalations + 1; ++attempt) {
        Eigen::MatrixXd system = normal;
        system.diagonal().tail(p - 1).array() += lambda;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
        // rcond() alone misses exact zero pivots, which LDLT solves by dropping the direction.
        const Eigen::VectorXd d = ldlt.vectorD();
        const bool pivots_ok = d.minCoeff() > kMinRcond * d.cwiseAbs().maxCoeff();
        if (ldlt.info() == Eigen::Success && ldlt.isPositive() && pivots_ok && ldlt.rcond() >= kMinRcond) {
            LinearFit out{ldlt.solve(rhs), lambda};
            if (out.coefficients.allFinite()) {
                return out;
            }
        }
        if (attempt == 0) {
            lambda = ridge_lambda + fallback;
        } else {
            lambda = ridge_lambda + fallback * std::pow(100.0, attempt);
        }
    }
    std::ostringstream diag;
    diag << "rows=" << a.rows() << " cols=" << p << " last_lambda=" << lambda;
    throw NumericalError("fit_linear: design stays singular after ridge escalation", diag.str());
}

Eigen::VectorXd predict_linear(const Eigen::VectorXd& coefficients, const Eigen::MatrixXd& design) {
    if (design.cols() + 1 != coefficients.size()) {
        throw DimensionError("predict_linear: design has " + std::to_string(design.cols()) +
                             " columns, model expects " + std::to_string(coefficients.size() - 1));
    }
    Eigen::VectorXd out = design * coefficients.tail(coefficients.size() - 1);
    out.array() += coefficients(0);
    return out;
}

} // namespace sklpca
