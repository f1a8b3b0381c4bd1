#include "sklpca/eval.hpp"

#include "sklpca/errors.hpp"
#include "sklpca/kernels.hpp"
#include "sklpca/reduce.hpp"
#include "sklpca/regression.hpp"
#include "sklpca/screening.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

namespace sklpca {

std::string to_string(FoldStrategy strategy) {
    return strategy == FoldStrategy::WithinSubjectRandom ? "random" : "contiguous";
}

FoldStrategy fold_strategy_from_string(const std::string& name) {
    if (name == "random") return FoldStrategy::WithinSubjectRandom;
    if (name == "contiguous") return FoldStrategy::WithinSubjectContiguous;
    throw ConfigError("unknown fold strategy '" + name + "' (expected random or contiguous)");
}

std::string to_string(Method method) {
    return method == Method::Skpca ? "skPCA" : "sklPCA";
}

Method method_from_string(const std::string& name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "skpca") return Method::Skpca;
    if (lower == "sklpca") return Method::Sklpca;
    throw ConfigError("unknown method '" + name + "' (expected skpca or sklpca)");
}

std::vector<Eigen::Index> FoldPlan::training_rows(int fold) const {
    std::vector<Eigen::Index> rows;
    for (std::size_t r = 0; r < assignments.size(); ++r) {
        if (assignments[r] != fold) {
            rows.push_back(static_cast<Eigen::Index>(r));
        }
    }
    return rows;
}

std::vector<Eigen::Index> FoldPlan::test_rows(int fold) const {
    std::vector<Eigen::Index> rows;
    for (std::size_t r = 0; r < assignments.size(); ++r) {
        if (assignments[r] == fold) {
            rows.push_back(static_cast<Eigen::Index>(r));
        }
    }
    return rows;
}

FoldPlan make_folds(const LongitudinalDataset& data, int k, FoldStrategy strategy, std::uint64_t seed) {
    if (k < 2) {
        throw ConfigError("make_folds: k must be at least 2");
    }
    FoldPlan plan;
    plan.k = k;
    plan.strategy = strategy;
    plan.assignments.assign(static_cast<std::size_t>(data.rows()), -1);
    std::mt19937_64 rng(seed);
    for (const auto& seg : data.groups.segments()) {
        if (seg.count < k) {
            plan.training_only.push_back(seg.subject_id);
            continue;
        }
        std::vector<Eigen::Index> order(static_cast<std::size_t>(seg.count));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        if (strategy == FoldStrategy::WithinSubjectRandom) {
            std::shuffle(order.begin(), order.end(), rng);
            for (Eigen::Index p = 0; p < seg.count; ++p) {
                plan.assignments[static_cast<std::size_t>(seg.start + order[static_cast<std::size_t>(p)])] =
                    static_cast<int>(p % k);
            }
        } else {
            for (int b = 0; b < k; ++b) {
                const Eigen::Index lo = b * seg.count / k;
                const Eigen::Index hi = (b + 1) * seg.count / k;
                for (Eigen::Index r = lo; r < hi; ++r) {
                    plan.assignments[static_cast<std::size_t>(seg.start + r)] = b;
                }
            }
        }
    }
    return plan;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b, bool* degenerate) {
    if (a.size() != b.size()) {
        throw DimensionError("pearson: length mismatch");
    }
    if (degenerate != nullptr) {
        *degenerate = false;
    }
    if (a.size() < 2) {
        if (degenerate != nullptr) *degenerate = true;
        return 0.0;
    }
    const Eigen::ArrayXd da = a.array() - a.mean();
    const Eigen::ArrayXd db = b.array() - b.mean();
    const double sa = std::sqrt(da.square().sum());
    const double sb = std::sqrt(db.square().sum());
    if (sa <= 1e-14 * a.norm() || sb <= 1e-14 * b.norm()) {
        if (degenerate != nullptr) *degenerate = true;
        return 0.0;
    }
    return std::clamp((da * db).sum() / (sa * sb), -1.0, 1.0);
}

namespace {

struct FoldData {
    LongitudinalDataset train;
    std::vector<Eigen::Index> columns; ///< feature columns in use
    std::vector<Eigen::Index> train_rows; ///< original indices
    std::vector<std::string> dropped;
};

// Training rows of a fold, minus subjects that keep fewer than `min_rows`.
FoldData training_split(const LongitudinalDataset& data, const FoldPlan& folds, int fold, Eigen::Index min_rows) {
    FoldData out;
    for (const auto& seg : data.groups.segments()) {
        std::vector<Eigen::Index> rows;
        for (Eigen::Index r = seg.start; r < seg.start + seg.count; ++r) {
            if (folds.assignments[static_cast<std::size_t>(r)] != fold) {
                rows.push_back(r);
            }
        }
        if (static_cast<Eigen::Index>(rows.size()) < min_rows) {
            out.dropped.push_back(seg.subject_id);
            continue;
        }
        out.train_rows.insert(out.train_rows.end(), rows.begin(), rows.end());
    }
    out.train = data.subset(out.train_rows);
    out.columns.resize(static_cast<std::size_t>(data.dims()));
    std::iota(out.columns.begin(), out.columns.end(), Eigen::Index{0});
    return out;
}

// Feature Gram for a fold's training rows, sliced from the whole-dataset
// inner products when the fold uses every feature column.
struct FoldKernel {
    KernelSpec spec;
    std::optional<Eigen::MatrixXd> gram;
};

FoldKernel fold_kernel(const LongitudinalDataset& data, const CvParams& params, const FoldData& split,
                       const InnerProductCache* cache) {
    FoldKernel out{resolve_bandwidth(params.feature_kernel, split.train.features, params.bandwidth_seed,
                                     params.bandwidth_max_rows),
                   std::nullopt};
    if (cache != nullptr && static_cast<Eigen::Index>(split.columns.size()) == data.dims()) {
        out.gram = cache->gram(out.spec, split.train_rows).values;
    }
    return out;
}

Eigen::MatrixXd test_block(const LongitudinalDataset& data, const std::vector<Eigen::Index>& rows,
                           const std::vector<Eigen::Index>& columns) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            x(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = data.features(rows[t], columns[c]);
        }
    }
    return x;
}

void predict_skpca_fold(const LongitudinalDataset& data, const CvParams& params, const FoldData& split,
                        const std::vector<Eigen::Index>& test, const InnerProductCache* cache,
                        Eigen::VectorXd& predictions) {
    SkpcaOptions options;
    options.q = params.q;
    options.bandwidth_seed = params.bandwidth_seed;
    options.bandwidth_max_rows = params.bandwidth_max_rows;
    const FoldKernel kernel = fold_kernel(data, params, split, cache);
    const SkpcaModel model = kernel.gram
                                 ? fit_skpca(split.train, kernel.spec, params.outcome_kernel, options, *kernel.gram)
                                 : fit_skpca(split.train, kernel.spec, params.outcome_kernel, options);
    const BaselinePredictor predictor = fit_baseline(model, split.train, params.ridge_lambda);
    Eigen::VectorXd yhat;
    if (kernel.gram) {
        const GramMatrix cross = cache->gram(model.feature_kernel, test, split.train_rows);
        yhat = predict_linear(predictor.coefs, cross.values * model.vectors);
    } else {
        yhat = predict_baseline(predictor, model, test_block(data, test, split.columns));
    }
    for (std::size_t t = 0; t < test.size(); ++t) {
        predictions(test[t]) = yhat(static_cast<Eigen::Index>(t));
    }
}

void predict_sklpca_fold(const LongitudinalDataset& data, const CvParams& params, const FoldData& split,
                         int fold, const FoldPlan& folds, const InnerProductCache* cache,
                         Eigen::VectorXd& predictions) {
    SklpcaOptions options;
    options.q = params.q;
    options.q_i = params.q_i;
    options.normalization = params.normalization;
    options.bandwidth_seed = params.bandwidth_seed;
    options.bandwidth_max_rows = params.bandwidth_max_rows;
    options.threads = params.threads;
    const FoldKernel kernel = fold_kernel(data, params, split, cache);
    const SklpcaModel model = kernel.gram
                                  ? fit_sklpca(split.train, kernel.spec, params.outcome_kernel, options, *kernel.gram)
                                  : fit_sklpca(split.train, kernel.spec, params.outcome_kernel, options);
    const MixedPredictor predictor = fit_mixed(model, split.train, params.ridge_lambda);

    const Eigen::Index min_block = params.normalization == SubjectNormalization::Verbatim ? 2 : 1;
    for (const auto& seg : data.groups.segments()) {
        std::vector<Eigen::Index> rows;
        for (Eigen::Index r = seg.start; r < seg.start + seg.count; ++r) {
            if (folds.assignments[static_cast<std::size_t>(r)] == fold) {
                rows.push_back(r);
            }
        }
        if (rows.empty()) {
            continue;
        }
        const bool known = model.groups.find(seg.subject_id).has_value();
        const auto block = static_cast<Eigen::Index>(rows.size());
        if (!known && block < min_block) {
            continue; // nothing to anchor a fixed prediction on
        }
        const Eigen::MatrixXd x_test = test_block(data, rows, split.columns);
        FixedSource source = params.fixed_source;
        if (block < min_block) {
            source = FixedSource::TrainingEmbedding;
        }
        const std::optional<std::string> id = known ? std::optional<std::string>(seg.subject_id) : std::nullopt;
        const MixedPrediction yhat = predict_mixed(predictor, model, x_test, id, source);
        for (Eigen::Index t = 0; t < block; ++t) {
            predictions(rows[static_cast<std::size_t>(t)]) = yhat.values(t);
        }
    }
}

} // namespace

CvResult cv_correlation(const LongitudinalDataset& data, Method method, const CvParams& params,
                        const FoldPlan& folds, const TrainingObserver& observer,
                        const InnerProductCache* features) {
    if (static_cast<Eigen::Index>(folds.assignments.size()) != data.rows()) {
        throw DimensionError("cv_correlation: fold plan does not match the dataset");
    }
    CvResult result;
    result.predictions = Eigen::VectorXd::Constant(data.rows(), std::numeric_limits<double>::quiet_NaN());
    const Eigen::Index min_rows = method == Method::Sklpca ? 2 : 1;
    // One pass over the features serves every fold's training Gram.
    if (features != nullptr && features->rows() != data.rows()) {
        throw DimensionError("cv_correlation: inner-product cache does not match the dataset");
    }
    std::optional<InnerProductCache> cache;
    if (!params.screening_fdr && features == nullptr && folds.k > 1) {
        cache.emplace(data.features);
    }
    const InnerProductCache* shared = params.screening_fdr ? nullptr : cache ? &*cache : features;
    for (int fold = 0; fold < folds.k; ++fold) {
        const std::vector<Eigen::Index> test = folds.test_rows(fold);
        if (test.empty()) {
            continue;
        }
        FoldData split = training_split(data, folds, fold, min_rows);
        if (params.screening_fdr) {
            // An empty selection means screening is skipped for this fold.
            try {
                split.columns = screen_features(split.train, *params.screening_fdr).selected;
                split.train = split.train.select_features(split.columns);
            } catch (const ScreeningEmptyError&) {
                ++result.screening_skipped;
            }
        }
        for (const auto& id : split.dropped) {
            result.flagged.push_back(std::to_string(fold) + ":" + id);
        }
        if (observer) {
            observer(fold, split.train_rows);
        }
        if (method == Method::Skpca) {
            predict_skpca_fold(data, params, split, test, shared, result.predictions);
        } else {
            predict_sklpca_fold(data, params, split, fold, folds, shared, result.predictions);
        }
    }

    std::vector<Eigen::Index> done;
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        if (!std::isnan(result.predictions(r))) {
            done.push_back(r);
        }
    }
    result.predicted_rows = static_cast<Eigen::Index>(done.size());
    Eigen::VectorXd yhat(result.predicted_rows);
    Eigen::VectorXd y(result.predicted_rows);
    for (std::size_t t = 0; t < done.size(); ++t) {
        yhat(static_cast<Eigen::Index>(t)) = result.predictions(done[t]);
        y(static_cast<Eigen::Index>(t)) = data.outcomes(done[t]);
    }
    result.correlation = pearson(yhat, y, &result.degenerate);
    return result;
}

} // namespace sklpca
