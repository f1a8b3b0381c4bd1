#include "sklpca/sim.hpp"

#include "sklpca/errors.hpp"

#include <cmath>
#include <vector>

namespace sklpca {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string("simulation: ") + name + " must be positive and finite");
    }
}

LongitudinalDataset make_dataset(Eigen::Index m, Eigen::Index n, Eigen::MatrixXd features,
                                 Eigen::VectorXd outcomes) {
    LongitudinalDataset data;
    data.groups = GroupIndex::uniform(m, n);
    data.features = std::move(features);
    data.outcomes = std::move(outcomes);
    data.time.resize(m * n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            data.time(i * n + j) = static_cast<double>(j + 1);
        }
    }
    return data;
}

// Draw mean-mu, variance-sigma^2 coordinates.
double draw(SimFamily family, double mu, double sigma, std::mt19937_64& rng) {
    if (family == SimFamily::Linear) {
        const double half = std::sqrt(3.0) * sigma;
        return std::uniform_real_distribution<double>(mu - half, mu + half)(rng);
    }
    return std::normal_distribution<double>(mu, sigma)(rng);
}

double f_y(SimFamily family, const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& mu, double sigma) {
    if (family == SimFamily::Linear) {
        return (x - mu).sum();
    }
    return std::exp(-(x - mu).squaredNorm() / (2.0 * sigma * sigma));
}

} // namespace

std::string to_string(SimFamily family) {
    return family == SimFamily::Linear ? "linear" : "radial";
}

SimFamily sim_family_from_string(const std::string& name) {
    if (name == "linear") return SimFamily::Linear;
    if (name == "radial") return SimFamily::Radial;
    throw ConfigError("unknown simulation configuration '" + name + "' (expected linear or radial)");
}

void SimConfig::validate() const {
    if (m < 2 || n_per_subject < 2) {
        throw ConfigError("simulation: m and n must be at least 2");
    }
    if (R < 1 || R > D) {
        throw ConfigError("simulation: need 1 <= R <= D");
    }
    require_positive(sigma_b, "sigma_b");
    require_positive(sigma_w, "sigma_w");
    require_positive(sigma_eps, "sigma_eps");
}

void LatticeConfig::validate() const {
    if (m < 2 || n_per_subject < 2) {
        throw ConfigError("lattice: m and n must be at least 2");
    }
    for (const double s : {sigma_b, sigma_w, sigma_eps}) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw ConfigError("lattice: sigmas must be non-negative and finite");
        }
    }
}

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t rep) {
    const std::uint64_t key = seed ^ rep;
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                      static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32)};
    return std::mt19937_64(seq);
}

SimOutput simulate(const SimConfig& config) {
    config.validate();
    std::mt19937_64 rng = stream_for(config.seed, 0);
    const Eigen::Index m = config.m;
    const Eigen::Index n = config.n_per_subject;
    const Eigen::Index rows = m * n;

    SimOutput out;
    out.means.resize(m, config.R);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index r = 0; r < config.R; ++r) {
            out.means(i, r) = draw(config.family, 0.0, config.sigma_b, rng);
        }
    }
    out.latent.resize(rows, config.R);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index r = 0; r < config.R; ++r) {
                out.latent(i * n + j, r) = draw(config.family, out.means(i, r), config.sigma_w, rng);
            }
        }
    }
    std::normal_distribution<double> standard(0.0, 1.0);
    out.projection.resize(config.R, config.D);
    for (Eigen::Index r = 0; r < config.R; ++r) {
        for (Eigen::Index d = 0; d < config.D; ++d) {
            out.projection(r, d) = standard(rng);
        }
    }

    const Eigen::RowVectorXd origin = Eigen::RowVectorXd::Zero(config.R);
    out.latent_outcome.resize(rows);
    Eigen::VectorXd y(rows);
    std::normal_distribution<double> noise(0.0, config.sigma_eps);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::RowVectorXd mu = out.means.row(i);
        const double between = f_y(config.family, mu, origin, config.sigma_b);
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index row = i * n + j;
            out.latent_outcome(row) = f_y(config.family, out.latent.row(row), mu, config.sigma_w) - between;
            y(row) = out.latent_outcome(row) + noise(rng);
        }
    }
    out.data = make_dataset(m, n, out.latent * out.projection, std::move(y));
    return out;
}

LatticeOutput simulate_lattice(const LatticeConfig& config) {
    config.validate();
    std::mt19937_64 rng = stream_for(config.seed, 0);
    const Eigen::Index m = config.m;
    const Eigen::Index n = config.n_per_subject;

    Eigen::MatrixXd x(m * n, 1);
    LatticeOutput out;
    out.latent_outcome.resize(m * n);
    Eigen::VectorXd y(m * n);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (Eigen::Index i = 1; i <= m; ++i) {
        const double mu = config.sigma_b * (static_cast<double>(i) / static_cast<double>(m) - 0.5);
        for (Eigen::Index j = 1; j <= n; ++j) {
            const double within = config.sigma_w * (static_cast<double>(j) / static_cast<double>(n) - 0.5);
            const Eigen::Index row = (i - 1) * n + (j - 1);
            x(row, 0) = within + mu;
            out.latent_outcome(row) = within - mu;
            y(row) = out.latent_outcome(row) + config.sigma_eps * noise(rng);
        }
    }
    out.data = make_dataset(m, n, std::move(x), std::move(y));
    return out;
}

} // namespace sklpca
