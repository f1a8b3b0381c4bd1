#pragma once

#include "sklpca/dataset.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>

namespace sklpca {

enum class SimFamily { Linear, Radial };

[[nodiscard]] std::string to_string(SimFamily family);
[[nodiscard]] SimFamily sim_family_from_string(const std::string& name);

/// Factorial simulation: subject means mu_i, latent features around them,
/// observed features through a random R x D projection.
struct SimConfig {
    Eigen::Index m = 50;
    Eigen::Index n_per_subject = 50;
    Eigen::Index R = 1;
    Eigen::Index D = 10;
    double sigma_b = 1.0;
    double sigma_w = 1.0;
    double sigma_eps = 0.00316227766016838; // sqrt(1e-5)
    SimFamily family = SimFamily::Linear;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SimOutput {
    LongitudinalDataset data;
    Eigen::MatrixXd latent;     ///< X tilde, N x R
    Eigen::MatrixXd projection; ///< P, R x D
    Eigen::MatrixXd means;      ///< mu, m x R
    Eigen::VectorXd latent_outcome; ///< Y before noise
};

[[nodiscard]] SimOutput simulate(const SimConfig& config);

/// Deterministic lattice with opposite within- and between-subject slopes.
struct LatticeConfig {
    Eigen::Index m = 15;
    Eigen::Index n_per_subject = 15;
    double sigma_b = 1.0;
    double sigma_w = 1.0;
    double sigma_eps = 0.01;
    std::uint64_t seed = 0;

    void validate() const;
};

struct LatticeOutput {
    LongitudinalDataset data;
    Eigen::VectorXd latent_outcome;
};

[[nodiscard]] LatticeOutput simulate_lattice(const LatticeConfig& config);

/// Generator for replication `rep` of a run seeded with `seed`; streams for
/// different reps are independent of evaluation order.
[[nodiscard]] std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t rep);

} // namespace sklpca
