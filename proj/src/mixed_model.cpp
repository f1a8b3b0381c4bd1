#include "sklpca/mixed_model.hpp"

#include "sklpca/errors.hpp"
#include "sklpca/regression.hpp"

namespace sklpca {

namespace {

void require_fitted_on(const SklpcaModel& reduction, const LongitudinalDataset& data) {
    if (!(reduction.groups == data.groups) || reduction.train_features.rows() != data.rows() ||
        reduction.train_features.cols() != data.dims()) {
        throw InputError("fit_mixed: the reduction was not fitted on this dataset");
    }
}

} // namespace

MixedPredictor fit_mixed(const SklpcaModel& reduction, const LongitudinalDataset& data, double ridge_lambda) {
    require_fitted_on(reduction, data);
    const Eigen::Index m = data.subjects();
    Eigen::VectorXd subject_means(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        subject_means(i) = data.subject_outcomes(i).mean();
    }

    MixedPredictor out;
    out.ridge_lambda = ridge_lambda;
    const LinearFit fixed = fit_linear(reduction.train_fixed_scores, subject_means, ridge_lambda);
    out.fixed_coefs = fixed.coefficients;
    out.fixed_ridge_used = fixed.ridge_used;
    out.train_fixed_predictions = predict_linear(out.fixed_coefs, reduction.train_fixed_scores);

    out.subject_coefs.reserve(static_cast<std::size_t>(m));
    out.subject_ids.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::VectorXd residual = data.subject_outcomes(i);
        residual.array() -= out.train_fixed_predictions(i);
        const auto& sub = reduction.subjects[static_cast<std::size_t>(i)];
        out.subject_coefs.push_back(fit_linear(sub.train_scores, residual, ridge_lambda).coefficients);
        out.subject_ids.push_back(data.groups[i].subject_id);
    }
    return out;
}

MixedPrediction predict_mixed(const MixedPredictor& predictor, const SklpcaModel& reduction,
                              const Eigen::MatrixXd& x_test, const std::optional<std::string>& subject_id,
                              FixedSource source) {
    const Eigen::Index rows = x_test.rows();
    std::optional<Eigen::Index> index;
    if (subject_id) {
        index = reduction.groups.find(*subject_id);
    }
    MixedPrediction out;
    out.fixed_only = !index.has_value();

    double fixed = 0.0;
    if (index && source == FixedSource::TrainingEmbedding) {
        fixed = predictor.train_fixed_predictions(*index);
    } else {
        const Eigen::RowVectorXd scores = project_fixed(reduction, x_test);
        fixed = predict_linear(predictor.fixed_coefs, scores)(0);
    }
    out.fixed_part = Eigen::VectorXd::Constant(rows, fixed);
    out.values = out.fixed_part;
    if (index) {
        const Eigen::MatrixXd scores = project_random(reduction, x_test, *subject_id);
        out.values += predict_linear(predictor.subject_coefs[static_cast<std::size_t>(*index)], scores);
    }
    return out;
}

BaselinePredictor fit_baseline(const SkpcaModel& reduction, const LongitudinalDataset& data,
                               double ridge_lambda) {
    if (reduction.train_scores.rows() != data.rows()) {
        throw InputError("fit_baseline: the reduction was not fitted on this dataset");
    }
    const LinearFit fit = fit_linear(reduction.train_scores, data.outcomes, ridge_lambda);
    return BaselinePredictor{fit.coefficients, ridge_lambda, fit.ridge_used};
}

Eigen::VectorXd predict_baseline(const BaselinePredictor& predictor, const SkpcaModel& reduction,
                                 const Eigen::MatrixXd& x_test) {
    return predict_linear(predictor.coefs, project_skpca(reduction, x_test));
}

} // namespace sklpca
