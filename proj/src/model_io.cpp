#include "sklpca/model_io.hpp"

#include "sklpca/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace sklpca {

using nlohmann::json;

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            data.push_back(m(r, c));
        }
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const json& data = j.at("data");
    if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
        throw InputError("model: matrix payload does not match its shape");
    }
    Eigen::MatrixXd m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = data[k++].get<double>();
        }
    }
    return m;
}

json vector_json(const Eigen::VectorXd& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json kernel_json(const KernelSpec& k) {
    return json{{"family", to_string(k.family)},
                {"bandwidth", k.bandwidth},
                {"mode", k.bandwidth_mode == BandwidthMode::Fixed ? "fixed" : "median"}};
}

KernelSpec kernel_from(const json& j) {
    KernelSpec k;
    k.family = kernel_family_from_string(j.at("family").get<std::string>());
    k.bandwidth = j.at("bandwidth").get<double>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode != "fixed" && mode != "median") {
        throw InputError("model: unknown bandwidth mode '" + mode + "'");
    }
    k.bandwidth_mode = mode == "fixed" ? BandwidthMode::Fixed : BandwidthMode::MedianHeuristic;
    return k;
}

json groups_json(const GroupIndex& g) {
    json out = json::array();
    for (const auto& seg : g.segments()) {
        out.push_back(json{{"id", seg.subject_id}, {"start", seg.start}, {"count", seg.count}});
    }
    return out;
}

GroupIndex groups_from(const json& j) {
    std::vector<GroupIndex::Segment> segs;
    for (const auto& s : j) {
        segs.push_back({s.at("id").get<std::string>(), s.at("start").get<Eigen::Index>(),
                        s.at("count").get<Eigen::Index>()});
    }
    return GroupIndex(std::move(segs));
}

json skpca_json(const SkpcaModel& m) {
    return json{{"feature_kernel", kernel_json(m.feature_kernel)},
                {"outcome_kernel", kernel_json(m.outcome_kernel)},
                {"train_features", matrix_json(m.train_features)},
                {"vectors", matrix_json(m.vectors)},
                {"eigenvalues", vector_json(m.eigenvalues)},
                {"regularization", m.regularization},
                {"rank_deficient", m.rank_deficient},
                {"train_scores", matrix_json(m.train_scores)}};
}

SkpcaModel skpca_from(const json& j) {
    SkpcaModel m;
    m.feature_kernel = kernel_from(j.at("feature_kernel"));
    m.outcome_kernel = kernel_from(j.at("outcome_kernel"));
    m.train_features = matrix_from(j.at("train_features"));
    m.vectors = matrix_from(j.at("vectors"));
    m.eigenvalues = vector_from(j.at("eigenvalues"));
    m.regularization = j.at("regularization").get<double>();
    m.rank_deficient = j.at("rank_deficient").get<bool>();
    m.train_scores = matrix_from(j.at("train_scores"));
    if (m.vectors.rows() != m.train_features.rows()) {
        throw InputError("model: skPCA vectors do not match the training rows");
    }
    return m;
}

json sklpca_json(const SklpcaModel& m) {
    json subjects = json::array();
    for (const auto& s : m.subjects) {
        subjects.push_back(json{{"vectors", matrix_json(s.vectors)},
                                {"eigenvalues", vector_json(s.eigenvalues)},
                                {"regularization", s.regularization},
                                {"zero_information", s.zero_information},
                                {"rank_deficient", s.rank_deficient},
                                {"train_scores", matrix_json(s.train_scores)}});
    }
    return json{{"feature_kernel", kernel_json(m.feature_kernel)},
                {"outcome_kernel", kernel_json(m.outcome_kernel)},
                {"normalization", to_string(m.normalization)},
                {"groups", groups_json(m.groups)},
                {"train_features", matrix_json(m.train_features)},
                {"fixed_vectors", matrix_json(m.fixed_vectors)},
                {"fixed_eigenvalues", vector_json(m.fixed_eigenvalues)},
                {"fixed_regularization", m.fixed_regularization},
                {"fixed_rank_deficient", m.fixed_rank_deficient},
                {"train_fixed_scores", matrix_json(m.train_fixed_scores)},
                {"subjects", std::move(subjects)}};
}

SklpcaModel sklpca_from(const json& j) {
    SklpcaModel m;
    m.feature_kernel = kernel_from(j.at("feature_kernel"));
    m.outcome_kernel = kernel_from(j.at("outcome_kernel"));
    m.normalization = subject_normalization_from_string(j.at("normalization").get<std::string>());
    m.groups = groups_from(j.at("groups"));
    m.train_features = matrix_from(j.at("train_features"));
    m.fixed_vectors = matrix_from(j.at("fixed_vectors"));
    m.fixed_eigenvalues = vector_from(j.at("fixed_eigenvalues"));
    m.fixed_regularization = j.at("fixed_regularization").get<double>();
    m.fixed_rank_deficient = j.at("fixed_rank_deficient").get<bool>();
    m.train_fixed_scores = matrix_from(j.at("train_fixed_scores"));
    for (const auto& s : j.at("subjects")) {
        SubjectReduction r;
        r.vectors = matrix_from(s.at("vectors"));
        r.eigenvalues = vector_from(s.at("eigenvalues"));
        r.regularization = s.at("regularization").get<double>();
        r.zero_information = s.at("zero_information").get<bool>();
        r.rank_deficient = s.at("rank_deficient").get<bool>();
        r.train_scores = matrix_from(s.at("train_scores"));
        m.subjects.push_back(std::move(r));
    }
    if (static_cast<Eigen::Index>(m.subjects.size()) != m.groups.subjects() ||
        m.groups.total_rows() != m.train_features.rows() || m.fixed_vectors.rows() != m.groups.subjects()) {
        throw InputError("model: sklPCA shapes are inconsistent");
    }
    for (Eigen::Index i = 0; i < m.groups.subjects(); ++i) {
        if (m.subjects[static_cast<std::size_t>(i)].vectors.rows() != m.groups[i].count) {
            throw InputError("model: subject map shape does not match its row count");
        }
    }
    return m;
}

json mixed_json(const MixedPredictor& p) {
    json coefs = json::array();
    for (const auto& c : p.subject_coefs) {
        coefs.push_back(vector_json(c));
    }
    return json{{"fixed_coefs", vector_json(p.fixed_coefs)},
                {"subject_coefs", std::move(coefs)},
                {"subject_ids", p.subject_ids},
                {"ridge_lambda", p.ridge_lambda},
                {"fixed_ridge_used", p.fixed_ridge_used},
                {"train_fixed_predictions", vector_json(p.train_fixed_predictions)}};
}

MixedPredictor mixed_from(const json& j) {
    MixedPredictor p;
    p.fixed_coefs = vector_from(j.at("fixed_coefs"));
    for (const auto& c : j.at("subject_coefs")) {
        p.subject_coefs.push_back(vector_from(c));
    }
    p.subject_ids = j.at("subject_ids").get<std::vector<std::string>>();
    p.ridge_lambda = j.at("ridge_lambda").get<double>();
    p.fixed_ridge_used = j.at("fixed_ridge_used").get<double>();
    p.train_fixed_predictions = vector_from(j.at("train_fixed_predictions"));
    return p;
}

} // namespace

std::string model_to_json(const FittedModel& model) {
    json doc{{"format", "sklpca-model"},
             {"version", FittedModel::kFormatVersion},
             {"method", to_string(model.method)},
             {"input_dims", model.input_dims},
             {"selected_features", model.selected_features},
             {"fixed_source", model.fixed_source == FixedSource::TrainingEmbedding ? "training" : "heldout"}};
    if (model.method == Method::Skpca) {
        if (!model.skpca || !model.baseline) {
            throw InputError("model: skPCA model is incomplete");
        }
        doc["reduction"] = skpca_json(*model.skpca);
        doc["predictor"] = json{{"coefs", vector_json(model.baseline->coefs)},
                                {"ridge_lambda", model.baseline->ridge_lambda},
                                {"ridge_used", model.baseline->ridge_used}};
    } else {
        if (!model.sklpca || !model.mixed) {
            throw InputError("model: sklPCA model is incomplete");
        }
        doc["reduction"] = sklpca_json(*model.sklpca);
        doc["predictor"] = mixed_json(*model.mixed);
    }
    return doc.dump(1);
}

FittedModel model_from_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        if (doc.at("format").get<std::string>() != "sklpca-model") {
            throw InputError("model: not an sklpca model file");
        }
        const int version = doc.at("version").get<int>();
        if (version != FittedModel::kFormatVersion) {
            throw InputError("model: unsupported format version " + std::to_string(version));
        }
        FittedModel model;
        model.method = method_from_string(doc.at("method").get<std::string>());
        model.input_dims = doc.at("input_dims").get<Eigen::Index>();
        model.selected_features = doc.at("selected_features").get<std::vector<Eigen::Index>>();
        const auto source = doc.at("fixed_source").get<std::string>();
        if (source != "training" && source != "heldout") {
            throw InputError("model: unknown fixed_source '" + source + "'");
        }
        model.fixed_source = source == "training" ? FixedSource::TrainingEmbedding : FixedSource::HeldOutBlock;
        for (const Eigen::Index c : model.selected_features) {
            if (c < 0 || c >= model.input_dims) {
                throw InputError("model: selected feature out of range");
            }
        }
        if (model.method == Method::Skpca) {
            model.skpca = skpca_from(doc.at("reduction"));
            const json& p = doc.at("predictor");
            model.baseline = BaselinePredictor{vector_from(p.at("coefs")), p.at("ridge_lambda").get<double>(),
                                               p.at("ridge_used").get<double>()};
            if (model.baseline->coefs.size() != model.skpca->q() + 1) {
                throw InputError("model: predictor does not match the reduction");
            }
        } else {
            model.sklpca = sklpca_from(doc.at("reduction"));
            model.mixed = mixed_from(doc.at("predictor"));
            if (model.mixed->fixed_coefs.size() != model.sklpca->q() + 1 ||
                model.mixed->subject_coefs.size() != model.sklpca->subjects.size() ||
                model.mixed->subject_ids.size() != model.sklpca->subjects.size()) {
                throw InputError("model: predictor does not match the reduction");
            }
        }
        return model;
    } catch (const json::exception& e) {
        throw InputError(std::string("model: malformed JSON: ") + e.what());
    } catch (const ConfigError& e) {
        throw InputError(std::string("model: ") + e.what());
    }
}

void save_model(const std::string& path, const FittedModel& model) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot open '" + path + "' for writing");
    }
    out << model_to_json(model) << '\n';
    if (!out) {
        throw InputError("write to '" + path + "' failed");
    }
}

FittedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

} // namespace sklpca
