#pragma once

#include "sklpca/eval.hpp"
#include "sklpca/sim.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace sklpca {

/// Factor grid of the simulation study; every cell is run for both methods.
struct ExperimentGrid {
    std::vector<SimFamily> families{SimFamily::Linear, SimFamily::Radial};
    std::vector<double> ratios{0.1, 1.0}; ///< sigma_b / sigma_w with sigma_w = 1
    std::vector<Eigen::Index> ranks{1, 5};
    std::vector<Eigen::Index> dims{10, 1000};
    Eigen::Index m = 50;
    Eigen::Index n_per_subject = 50;
    double sigma_eps = 0.00316227766016838;
    int folds = 5;
    Eigen::Index bandwidth_max_rows = 500;

    /// The 2 x 2 x 2 x 2 design at m = n_i = 50, sigma_eps^2 = 1e-5.
    [[nodiscard]] static ExperimentGrid paper_grid() { return {}; }
};

struct ExperimentCell {
    SimFamily family = SimFamily::Linear;
    double ratio = 1.0;
    Eigen::Index R = 1;
    Eigen::Index D = 10;
};

struct ExperimentResult {
    ExperimentCell cell;
    Method method = Method::Sklpca;
    int reps = 0;
    double mean_corr = 0.0;
    double sd_corr = 0.0; ///< 0 when fewer than two successful reps
    int degenerate_count = 0;
    int failures = 0;
    double runtime_s = 0.0; ///< summed wall time of this method's fits
};

/// Cells in order family x ratio x R x D.
[[nodiscard]] std::vector<ExperimentCell> grid_cells(const ExperimentGrid& grid);

/// CV parameters used for a cell: linear kernels for the linear family,
/// median-heuristic Gaussian kernels for the radial one; q = q_i = R.
[[nodiscard]] CvParams cell_params(const ExperimentCell& cell, const ExperimentGrid& grid);

/// Seed of the simulated dataset and of the fold plan for (cell, rep).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t cell, std::uint64_t rep,
                                        std::uint64_t purpose);

/**
 * Runs every cell `reps` times. Each (cell, rep) job simulates one dataset and
 * scores both methods on the same folds. Results are ordered by cell, then
 * method (skPCA first), and do not depend on `threads`. A failing fit counts
 * towards `failures` and is excluded from the mean.
 */
[[nodiscard]] std::vector<ExperimentResult> run_experiment(const ExperimentGrid& grid, int reps,
                                                           std::uint64_t seed, unsigned threads);

/// Header `config,ratio,R,D,method,reps,mean_corr,sd_corr,degenerate_count,runtime_s`;
/// runtime_s is written as NA unless `with_timing`.
void write_experiment_csv(std::ostream& out, const std::vector<ExperimentResult>& results, bool with_timing);

} // namespace sklpca
