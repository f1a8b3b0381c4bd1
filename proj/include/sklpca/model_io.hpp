#pragma once

#include "sklpca/eval.hpp"
#include "sklpca/mixed_model.hpp"
#include "sklpca/reduce.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sklpca {

/// A fitted reduction plus its predictor, as written by `sklpca fit`.
struct FittedModel {
    static constexpr int kFormatVersion = 1;

    Method method = Method::Sklpca;
    Eigen::Index input_dims = 0;                ///< feature count of the training CSV
    std::vector<Eigen::Index> selected_features; ///< columns used, ascending
    FixedSource fixed_source = FixedSource::TrainingEmbedding;

    std::optional<SkpcaModel> skpca;
    std::optional<BaselinePredictor> baseline;
    std::optional<SklpcaModel> sklpca;
    std::optional<MixedPredictor> mixed;
};

/// JSON text; doubles round-trip exactly.
[[nodiscard]] std::string model_to_json(const FittedModel& model);
/// Throws InputError on malformed documents or an unsupported format version.
[[nodiscard]] FittedModel model_from_json(const std::string& text);

void save_model(const std::string& path, const FittedModel& model);
[[nodiscard]] FittedModel load_model(const std::string& path);

} // namespace sklpca
