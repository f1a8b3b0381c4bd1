#include "sklpca/experiment.hpp"

#include "sklpca/csv_io.hpp"
#include "sklpca/errors.hpp"
#include "sklpca/parallel.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <random>

namespace sklpca {

std::vector<ExperimentCell> grid_cells(const ExperimentGrid& grid) {
    std::vector<ExperimentCell> cells;
    for (const SimFamily family : grid.families) {
        for (const double ratio : grid.ratios) {
            for (const Eigen::Index r : grid.ranks) {
                for (const Eigen::Index d : grid.dims) {
                    cells.push_back(ExperimentCell{family, ratio, r, d});
                }
            }
        }
    }
    return cells;
}

CvParams cell_params(const ExperimentCell& cell, const ExperimentGrid& grid) {
    CvParams params;
    if (cell.family == SimFamily::Radial) {
        params.feature_kernel = KernelSpec::gaussian_median();
        params.outcome_kernel = KernelSpec::gaussian_median();
    }
    params.q = cell.R;
    params.q_i = cell.R;
    params.bandwidth_max_rows = grid.bandwidth_max_rows;
    return params;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t cell, std::uint64_t rep, std::uint64_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(rep),
                      static_cast<std::uint32_t>(rep >> 32), static_cast<std::uint32_t>(purpose)};
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

namespace {

struct RepOutcome {
    std::optional<double> correlation; ///< empty on failure
    bool degenerate = false;
    double seconds = 0.0;
};

RepOutcome score(const LongitudinalDataset& data, Method method, const CvParams& params, const FoldPlan& folds,
                 const InnerProductCache& features) {
    RepOutcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
        const CvResult cv = cv_correlation(data, method, params, folds, {}, &features);
        out.correlation = cv.correlation;
        out.degenerate = cv.degenerate;
    } catch (const Error&) {
        out.correlation.reset();
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

} // namespace

std::vector<ExperimentResult> run_experiment(const ExperimentGrid& grid, int reps, std::uint64_t seed,
                                             unsigned threads) {
    if (reps < 1) {
        throw ConfigError("run_experiment: reps must be at least 1");
    }
    if (grid.folds < 2) {
        throw ConfigError("run_experiment: at least 2 folds required");
    }
    const std::vector<ExperimentCell> cells = grid_cells(grid);
    const std::size_t per_cell = static_cast<std::size_t>(reps);
    // outcomes[(cell * reps + rep) * 2 + method]
    std::vector<RepOutcome> outcomes(cells.size() * per_cell * 2);

    parallel_for(cells.size() * per_cell, threads, [&](std::size_t job) {
        const std::size_t c = job / per_cell;
        const std::size_t rep = job % per_cell;
        const ExperimentCell& cell = cells[c];
        SimConfig config;
        config.m = grid.m;
        config.n_per_subject = grid.n_per_subject;
        config.R = cell.R;
        config.D = cell.D;
        config.sigma_b = cell.ratio;
        config.sigma_w = 1.0;
        config.sigma_eps = grid.sigma_eps;
        config.family = cell.family;
        config.seed = derive_seed(seed, c, rep, 0);
        const SimOutput sim = simulate(config);
        const FoldPlan folds =
            make_folds(sim.data, grid.folds, FoldStrategy::WithinSubjectRandom, derive_seed(seed, c, rep, 1));
        CvParams params = cell_params(cell, grid);
        params.bandwidth_seed = derive_seed(seed, c, rep, 2);
        // Both methods slice their fold Grams from one pass over the features.
        const InnerProductCache features(sim.data.features);
        outcomes[job * 2] = score(sim.data, Method::Skpca, params, folds, features);
        outcomes[job * 2 + 1] = score(sim.data, Method::Sklpca, params, folds, features);
    });

    std::vector<ExperimentResult> results;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (const Method method : {Method::Skpca, Method::Sklpca}) {
            const std::size_t slot = method == Method::Skpca ? 0 : 1;
            ExperimentResult res;
            res.cell = cells[c];
            res.method = method;
            res.reps = reps;
            std::vector<double> values;
            for (std::size_t rep = 0; rep < per_cell; ++rep) {
                const RepOutcome& o = outcomes[(c * per_cell + rep) * 2 + slot];
                res.runtime_s += o.seconds;
                if (!o.correlation) {
                    ++res.failures;
                    continue;
                }
                values.push_back(*o.correlation);
                if (o.degenerate) {
                    ++res.degenerate_count;
                }
            }
            if (!values.empty()) {
                double sum = 0.0;
                for (const double v : values) sum += v;
                res.mean_corr = sum / static_cast<double>(values.size());
                if (values.size() > 1) {
                    double ss = 0.0;
                    for (const double v : values) ss += (v - res.mean_corr) * (v - res.mean_corr);
                    res.sd_corr = std::sqrt(ss / static_cast<double>(values.size() - 1));
                }
            }
            results.push_back(res);
        }
    }
    return results;
}

void write_experiment_csv(std::ostream& out, const std::vector<ExperimentResult>& results, bool with_timing) {
    out << "config,ratio,R,D,method,reps,mean_corr,sd_corr,degenerate_count,runtime_s\n";
    for (const auto& r : results) {
        out << to_string(r.cell.family) << ',' << format_double(r.cell.ratio) << ',' << r.cell.R << ','
            << r.cell.D << ',' << to_string(r.method) << ',' << r.reps << ',' << format_double(r.mean_corr) << ','
            << format_double(r.sd_corr) << ',' << r.degenerate_count << ','
            << (with_timing ? format_double(r.runtime_s) : std::string("NA")) << '\n';
    }
}

} // namespace sklpca
