#include "sklpca/reduce.hpp"

#include "sklpca/errors.hpp"
#include "sklpca/geneig.hpp"
#include "sklpca/parallel.hpp"

#include <algorithm>
#include <string>

namespace sklpca {

namespace {

constexpr double kVanishing = 1e-12;
constexpr double kRankTolerance = 1e-8;

Eigen::MatrixXd as_column(const Eigen::VectorXd& y) {
    return Eigen::MatrixXd(y);
}

Eigen::Index count_above(const Eigen::VectorXd& eigenvalues) {
    if (eigenvalues.size() == 0 || !(eigenvalues(0) > 0.0)) {
        return 0;
    }
    const double floor = kRankTolerance * eigenvalues(0);
    return (eigenvalues.array() > floor).count();
}

void truncate(GenEigResult& res, Eigen::Index keep) {
    if (keep < res.eigenvalues.size()) {
        res.eigenvalues.conservativeResize(keep);
        res.vectors.conservativeResize(Eigen::NoChange, keep);
    }
    res.rank_deficient = res.numerical_rank < keep;
}

void require_dimension(Eigen::Index value, Eigen::Index max, const char* name) {
    if (value < 1 || value > max) {
        throw ConfigError(std::string("invalid reduced dimension ") + name + "=" +
                          std::to_string(value) + " (valid range 1.." + std::to_string(max) + ")");
    }
}

Eigen::Index norm_count(Eigen::Index count, SubjectNormalization norm) {
    return norm == SubjectNormalization::Verbatim ? count - 1 : count;
}

} // namespace

Eigen::MatrixXd supervised_target(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l,
                                  bool* outcome_degenerate) {
    Eigen::MatrixXd kh = k;
    kh.rowwise() -= k.colwise().mean();
    if (kh.norm() <= kVanishing * k.norm()) {
        kh.setZero();
    }
    Eigen::MatrixXd lc = double_center(l);
    const bool degenerate = lc.norm() <= kVanishing * l.norm();
    if (degenerate) {
        lc.setZero();
    }
    if (outcome_degenerate != nullptr) {
        *outcome_degenerate = degenerate;
    }
    Eigen::MatrixXd q = kh.transpose() * (lc * kh);
    return 0.5 * (q + q.transpose());
}

Eigen::MatrixXd supervised_factor(const Eigen::MatrixXd& k, const Eigen::MatrixXd& l,
                                  bool* outcome_degenerate) {
    const Eigen::MatrixXd lc = double_center(l);
    const bool degenerate = lc.norm() <= kVanishing * l.norm();
    if (outcome_degenerate != nullptr) {
        *outcome_degenerate = degenerate;
    }
    if (degenerate) {
        return Eigen::MatrixXd::Zero(k.rows(), 0);
    }
    Eigen::MatrixXd kh = k;
    kh.rowwise() -= k.colwise().mean();
    if (kh.norm() <= kVanishing * k.norm()) {
        return Eigen::MatrixXd::Zero(k.rows(), 0);
    }
    // The columns of G span the range of H L H, so K G = K H G.
    return k * pivoted_cholesky(lc);
}

double trace_objective(const Eigen::MatrixXd& q, const Eigen::MatrixXd& v) {
    return (v.transpose() * q * v).trace();
}

namespace {

// Caller-supplied Grams skip recomputation but must describe the same data.
void check_supplied_gram(const Eigen::MatrixXd* k, const KernelSpec& spec, Eigen::Index n, const char* where) {
    if (k == nullptr) {
        return;
    }
    if (!spec.resolved()) {
        throw ConfigError(std::string(where) + ": a supplied feature Gram needs a resolved kernel");
    }
    if (k->rows() != n || k->cols() != n) {
        throw DimensionError(std::string(where) + ": supplied feature Gram is " + std::to_string(k->rows()) +
                             " x " + std::to_string(k->cols()) + ", expected " + std::to_string(n));
    }
}

SkpcaModel fit_skpca_impl(const LongitudinalDataset& data, const KernelSpec& feature_kernel,
                          const KernelSpec& outcome_kernel, const SkpcaOptions& options,
                          const Eigen::MatrixXd* supplied) {
    data.validate();
    const Eigen::Index n = data.rows();
    if (n < 2) {
        throw InsufficientDataError("fit_skpca: at least 2 observations required");
    }
    if (options.q) {
        require_dimension(*options.q, n, "q");
    }
    SkpcaModel model;
    model.feature_kernel = resolve_bandwidth(feature_kernel, data.features, options.bandwidth_seed,
                                             options.bandwidth_max_rows);
    const Eigen::MatrixXd y = as_column(data.outcomes);
    model.outcome_kernel = resolve_bandwidth(outcome_kernel, y, options.bandwidth_seed,
                                             options.bandwidth_max_rows);

    check_supplied_gram(supplied, feature_kernel, n, "fit_skpca");
    const Eigen::MatrixXd k = supplied ? *supplied : gram(model.feature_kernel, data.features).values;
    const Eigen::MatrixXd l = gram(model.outcome_kernel, y).values;
    const Eigen::MatrixXd lc = double_center(l);
    if (lc.norm() <= kVanishing * l.norm()) {
        throw DegenerateDataError("fit_skpca: outcomes are constant, the centered outcome kernel vanishes");
    }
    // K H L H K = (K G)(K G)^T with H L H = G G^T.
    const Eigen::MatrixXd g = pivoted_cholesky(lc);
    const Eigen::MatrixXd b = k * g;
    const Eigen::Index requested = options.q.value_or(std::min(n, std::max<Eigen::Index>(g.cols(), 1)));
    GenEigResult res = generalized_eig_factored(b, k, requested);
    const Eigen::Index keep =
        options.q ? *options.q
                  : std::max<Eigen::Index>(1, std::min(n - 1, count_above(res.eigenvalues)));
    truncate(res, keep);

    model.train_features = data.features;
    model.vectors = std::move(res.vectors);
    model.eigenvalues = std::move(res.eigenvalues);
    model.regularization = res.regularization;
    model.rank_deficient = res.rank_deficient;
    model.train_scores = k * model.vectors;
    return model;
}

} // namespace

SkpcaModel fit_skpca(const LongitudinalDataset& data, const KernelSpec& feature_kernel,
                     const KernelSpec& outcome_kernel, const SkpcaOptions& options) {
    return fit_skpca_impl(data, feature_kernel, outcome_kernel, options, nullptr);
}

SkpcaModel fit_skpca(const LongitudinalDataset& data, const KernelSpec& feature_kernel,
                     const KernelSpec& outcome_kernel, const SkpcaOptions& options,
                     const Eigen::MatrixXd& feature_gram) {
    return fit_skpca_impl(data, feature_kernel, outcome_kernel, options, &feature_gram);
}

Eigen::MatrixXd project_skpca(const SkpcaModel& model, const Eigen::MatrixXd& x_test) {
    if (x_test.cols() != model.train_features.cols()) {
        throw DimensionError("project_skpca: test data has " + std::to_string(x_test.cols()) +
                             " features, model expects " + std::to_string(model.train_features.cols()));
    }
    return gram(model.feature_kernel, x_test, model.train_features).values * model.vectors;
}

namespace {

SklpcaModel fit_sklpca_impl(const LongitudinalDataset& data, const KernelSpec& feature_kernel,
                            const KernelSpec& outcome_kernel, const SklpcaOptions& options,
                            const Eigen::MatrixXd* supplied) {
    data.validate();
    const GroupIndex& groups = data.groups;
    const Eigen::Index m = groups.subjects();
    if (m < 2) {
        throw InsufficientDataError("fit_sklpca: at least 2 subjects required");
    }
    groups.require_min_count(2, "fit_sklpca");
    if (options.q) {
        require_dimension(*options.q, m, "q");
    }
    std::vector<std::optional<Eigen::Index>> per_subject(static_cast<std::size_t>(m));
    if (!options.q_per_subject.empty()) {
        if (static_cast<Eigen::Index>(options.q_per_subject.size()) != m) {
            throw ConfigError("fit_sklpca: per-subject q_i list has " +
                              std::to_string(options.q_per_subject.size()) + " entries for " +
                              std::to_string(m) + " subjects");
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            require_dimension(options.q_per_subject[static_cast<std::size_t>(i)], groups[i].count, "q_i");
            per_subject[static_cast<std::size_t>(i)] = options.q_per_subject[static_cast<std::size_t>(i)];
        }
    } else if (options.q_i) {
        require_dimension(*options.q_i, groups.min_count(), "q_i");
        std::fill(per_subject.begin(), per_subject.end(), options.q_i);
    }

    SklpcaModel model;
    model.normalization = options.normalization;
    model.groups = groups;
    model.train_features = data.features;
    model.feature_kernel = resolve_bandwidth(feature_kernel, data.features, options.bandwidth_seed,
                                             options.bandwidth_max_rows);
    const Eigen::MatrixXd y = as_column(data.outcomes);
    model.outcome_kernel = resolve_bandwidth(outcome_kernel, y, options.bandwidth_seed,
                                             options.bandwidth_max_rows);

    check_supplied_gram(supplied, feature_kernel, data.rows(), "fit_sklpca");
    const Eigen::MatrixXd k = supplied ? *supplied : gram(model.feature_kernel, data.features).values;
    const Eigen::MatrixXd l = gram(model.outcome_kernel, y).values;

    // Fixed component: subject-mean kernels.
    const SubjectMeanKernel kbar = subject_mean_kernel(k, groups, groups, options.normalization);
    const SubjectMeanKernel lbar = subject_mean_kernel(l, groups, groups, options.normalization);
    bool fixed_degenerate = false;
    const Eigen::MatrixXd bbar = supervised_factor(kbar.values, lbar.values, &fixed_degenerate);
    GenEigResult fixed = generalized_eig_factored(bbar, kbar.values, options.q.value_or(m));
    if (!options.q) {
        truncate(fixed, std::max<Eigen::Index>(1, std::min(m - 1, count_above(fixed.eigenvalues))));
    }
    model.fixed_vectors = std::move(fixed.vectors);
    model.fixed_eigenvalues = std::move(fixed.eigenvalues);
    model.fixed_regularization = fixed.regularization;
    model.fixed_rank_deficient = fixed.rank_deficient || fixed_degenerate;
    model.train_fixed_scores = kbar.values * model.fixed_vectors;

    // Random components: one pencil per subject block.
    model.subjects.resize(static_cast<std::size_t>(m));
    std::vector<Eigen::Index> ranks(static_cast<std::size_t>(m), 0);
    parallel_for(static_cast<std::size_t>(m), options.threads, [&](std::size_t i) {
        const auto& s = groups[static_cast<Eigen::Index>(i)];
        const Eigen::MatrixXd ki = k.block(s.start, s.start, s.count, s.count);
        const Eigen::MatrixXd li = l.block(s.start, s.start, s.count, s.count);
        bool degenerate = false;
        const Eigen::MatrixXd bi = supervised_factor(ki, li, &degenerate);
        GenEigResult res = generalized_eig_factored(bi, ki, per_subject[i].value_or(s.count));
        ranks[i] = degenerate ? 0 : count_above(res.eigenvalues);
        SubjectReduction& out = model.subjects[i];
        out.zero_information = degenerate;
        out.regularization = res.regularization;
        out.rank_deficient = res.rank_deficient || degenerate;
        out.eigenvalues = std::move(res.eigenvalues);
        out.vectors = std::move(res.vectors);
    });
    if (options.q_per_subject.empty() && !options.q_i) {
        Eigen::Index uniform = 0;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (model.subjects[static_cast<std::size_t>(i)].zero_information) {
                continue;
            }
            const Eigen::Index cap = std::min(groups[i].count - 1, ranks[static_cast<std::size_t>(i)]);
            uniform = (uniform == 0) ? cap : std::min(uniform, cap);
        }
        uniform = std::max<Eigen::Index>(uniform, 1);
        for (auto& sub : model.subjects) {
            sub.vectors.conservativeResize(Eigen::NoChange, uniform);
            sub.eigenvalues.conservativeResize(uniform);
        }
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& s = groups[i];
        auto& sub = model.subjects[static_cast<std::size_t>(i)];
        sub.rank_deficient = sub.rank_deficient || ranks[static_cast<std::size_t>(i)] < sub.vectors.cols();
        sub.train_scores = k.block(s.start, s.start, s.count, s.count) * sub.vectors;
    }
    return model;
}

} // namespace

SklpcaModel fit_sklpca(const LongitudinalDataset& data, const KernelSpec& feature_kernel,
                       const KernelSpec& outcome_kernel, const SklpcaOptions& options) {
    return fit_sklpca_impl(data, feature_kernel, outcome_kernel, options, nullptr);
}

SklpcaModel fit_sklpca(const LongitudinalDataset& data, const KernelSpec& feature_kernel,
                       const KernelSpec& outcome_kernel, const SklpcaOptions& options,
                       const Eigen::MatrixXd& feature_gram) {
    return fit_sklpca_impl(data, feature_kernel, outcome_kernel, options, &feature_gram);
}

Eigen::RowVectorXd fixed_test_kernel(const SklpcaModel& model, const Eigen::MatrixXd& x_test) {
    if (x_test.cols() != model.train_features.cols()) {
        throw DimensionError("project_fixed: test data has " + std::to_string(x_test.cols()) +
                             " features, model expects " + std::to_string(model.train_features.cols()));
    }
    const Eigen::Index n_test = x_test.rows();
    const Eigen::Index min_rows = model.normalization == SubjectNormalization::Verbatim ? 2 : 1;
    if (n_test < min_rows) {
        throw InsufficientDataError("project_fixed: the test block needs at least " +
                                    std::to_string(min_rows) + " rows, got " + std::to_string(n_test));
    }
    const Eigen::MatrixXd cross = gram(model.feature_kernel, x_test, model.train_features).values;
    const Eigen::RowVectorXd col_sums = cross.colwise().sum();
    const double test_norm = static_cast<double>(norm_count(n_test, model.normalization));
    Eigen::RowVectorXd out(model.groups.subjects());
    for (Eigen::Index i = 0; i < model.groups.subjects(); ++i) {
        const auto& s = model.groups[i];
        out(i) = col_sums.segment(s.start, s.count).sum() /
                 (test_norm * static_cast<double>(norm_count(s.count, model.normalization)));
    }
    return out;
}

Eigen::RowVectorXd project_fixed(const SklpcaModel& model, const Eigen::MatrixXd& x_test) {
    return fixed_test_kernel(model, x_test) * model.fixed_vectors;
}

Eigen::MatrixXd project_random(const SklpcaModel& model, const Eigen::MatrixXd& x_test,
                               const std::string& subject_id) {
    const auto index = model.groups.find(subject_id);
    if (!index) {
        throw UnknownSubjectError("project_random: subject '" + subject_id +
                                  "' has no random component (not in training data)");
    }
    if (x_test.cols() != model.train_features.cols()) {
        throw DimensionError("project_random: test data has " + std::to_string(x_test.cols()) +
                             " features, model expects " + std::to_string(model.train_features.cols()));
    }
    const auto& s = model.groups[*index];
    const Eigen::MatrixXd block = model.train_features.middleRows(s.start, s.count);
    return gram(model.feature_kernel, x_test, block).values *
           model.subjects[static_cast<std::size_t>(*index)].vectors;
}

} // namespace sklpca
