#include "doctest.h"

#include "oracles/oracles.hpp"
#include "sklpca/errors.hpp"
#include "sklpca/sim.hpp"

using namespace sklpca;

namespace {

std::vector<double> as_std(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

} // namespace

TEST_SUITE("sim") {

TEST_CASE("linear outcome identity") {
    SimConfig cfg;
    cfg.R = 3;
    cfg.D = 7;
    cfg.m = 6;
    cfg.n_per_subject = 5;
    cfg.sigma_eps = 1e-300;
    cfg.seed = 3;
    const SimOutput out = simulate(cfg);
    for (Eigen::Index i = 0; i < cfg.m; ++i) {
        for (Eigen::Index j = 0; j < cfg.n_per_subject; ++j) {
            const Eigen::Index row = i * cfg.n_per_subject + j;
            const double lhs = out.data.outcomes(row) - (out.latent.row(row) - out.means.row(i)).sum() +
                               out.means.row(i).sum();
            CHECK(std::abs(lhs) <= 1e-12);
        }
    }
}

TEST_CASE("radial latent outcome lies in (-1, 1)") {
    SimConfig cfg;
    cfg.family = SimFamily::Radial;
    cfg.R = 2;
    cfg.m = 20;
    cfg.n_per_subject = 20;
    cfg.seed = 9;
    const SimOutput out = simulate(cfg);
    CHECK(out.latent_outcome.maxCoeff() < 1.0);
    CHECK(out.latent_outcome.minCoeff() > -1.0);
}

TEST_CASE("subject means have the configured variance") {
    SimConfig cfg;
    cfg.sigma_b = 0.7;
    std::vector<double> mus;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        cfg.seed = seed;
        const SimOutput out = simulate(cfg);
        for (Eigen::Index i = 0; i < cfg.m; ++i) {
            mus.push_back(out.means(i, 0));
        }
    }
    double mean = 0.0;
    for (double v : mus) mean += v;
    mean /= double(mus.size());
    double var = 0.0;
    for (double v : mus) var += (v - mean) * (v - mean);
    var /= double(mus.size() - 1);
    CHECK(std::abs(var - 0.49) <= 0.2 * 0.49);
}

TEST_CASE("uniform draws have the intended moments and support") {
    SimConfig cfg;
    cfg.m = 100;
    cfg.n_per_subject = 1000;
    cfg.R = 1;
    cfg.D = 1;
    cfg.sigma_w = 2.0;
    cfg.seed = 17;
    const SimOutput out = simulate(cfg);
    double sum = 0.0;
    double sq = 0.0;
    double widest = 0.0;
    for (Eigen::Index i = 0; i < cfg.m; ++i) {
        for (Eigen::Index j = 0; j < cfg.n_per_subject; ++j) {
            const double d = out.latent(i * cfg.n_per_subject + j, 0) - out.means(i, 0);
            sum += d;
            sq += d * d;
            widest = std::max(widest, std::abs(d));
        }
    }
    const double count = double(cfg.m * cfg.n_per_subject);
    const double mean = sum / count;
    const double var = sq / count - mean * mean;
    CHECK(std::abs(mean) <= 0.05 * cfg.sigma_w);
    CHECK(std::abs(var - 4.0) <= 0.05 * 4.0);
    CHECK(widest <= std::sqrt(3.0) * cfg.sigma_w);
}

TEST_CASE("observed features have rank at most R") {
    SimConfig cfg;
    cfg.R = 2;
    cfg.D = 10;
    cfg.m = 5;
    cfg.n_per_subject = 6;
    for (const auto family : {SimFamily::Linear, SimFamily::Radial}) {
        cfg.family = family;
        const SimOutput out = simulate(cfg);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.data.features);
        const Eigen::VectorXd s = svd.singularValues();
        CHECK((s.array() > 1e-10 * s(0)).count() <= cfg.R);
        CHECK((out.data.features - out.latent * out.projection).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("pooled versus within and between correlation at equal variances") {
    SimConfig cfg;
    cfg.R = 1;
    cfg.D = 1;
    double pooled_abs = 0.0;
    const int seeds = 100;
    for (int seed = 0; seed < seeds; ++seed) {
        cfg.seed = static_cast<std::uint64_t>(seed);
        const SimOutput out = simulate(cfg);
        const Eigen::VectorXd x = out.latent.col(0);
        const Eigen::VectorXd& y = out.latent_outcome;
        pooled_abs += std::abs(oracle::pearson(as_std(x), as_std(y)));

        Eigen::VectorXd xm(cfg.m), ym(cfg.m);
        for (Eigen::Index i = 0; i < cfg.m; ++i) {
            xm(i) = x.segment(i * cfg.n_per_subject, cfg.n_per_subject).mean();
            ym(i) = y.segment(i * cfg.n_per_subject, cfg.n_per_subject).mean();
            const Eigen::VectorXd xi = x.segment(i * cfg.n_per_subject, cfg.n_per_subject);
            const Eigen::VectorXd yi = y.segment(i * cfg.n_per_subject, cfg.n_per_subject);
            CHECK(std::abs(oracle::pearson(as_std(xi), as_std(yi))) > 0.9);
        }
        CHECK(std::abs(oracle::pearson(as_std(xm), as_std(ym))) > 0.9);
    }
    CHECK(pooled_abs / seeds < 0.1);
}

TEST_CASE("reproducible per seed") {
    SimConfig cfg;
    cfg.family = SimFamily::Radial;
    cfg.R = 5;
    cfg.D = 20;
    cfg.seed = 123;
    const SimOutput a = simulate(cfg);
    const SimOutput b = simulate(cfg);
    CHECK(a.data == b.data);
    cfg.seed = 124;
    const SimOutput c = simulate(cfg);
    CHECK_FALSE(a.data.features == c.data.features);

    std::mt19937_64 s1 = stream_for(7, 3);
    std::mt19937_64 s2 = stream_for(7, 3);
    std::mt19937_64 s3 = stream_for(7, 4);
    const auto v1 = s1();
    CHECK(v1 == s2());
    CHECK(v1 != s3());
}

TEST_CASE("lattice hand example") {
    LatticeConfig cfg;
    cfg.m = 2;
    cfg.n_per_subject = 2;
    cfg.sigma_eps = 0.0;
    const LatticeOutput out = simulate_lattice(cfg);
    Eigen::Vector4d x(0.0, 0.5, 0.5, 1.0);
    Eigen::Vector4d y(0.0, 0.5, -0.5, 0.0);
    CHECK((out.data.features.col(0) - x).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((out.latent_outcome - y).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(out.data.outcomes == out.latent_outcome);
}

TEST_CASE("lattice variants") {
    LatticeConfig flat;
    flat.sigma_b = 0.0;
    const LatticeOutput out = simulate_lattice(flat);
    const Eigen::Index n = flat.n_per_subject;
    for (Eigen::Index i = 1; i < flat.m; ++i) {
        CHECK(out.data.features.middleRows(i * n, n) == out.data.features.topRows(n));
    }

    LatticeConfig unequal;
    unequal.sigma_b = 1.0;
    unequal.sigma_w = 5.0;
    const LatticeOutput p = simulate_lattice(unequal);
    CHECK(p.data.rows() == 225);
    CHECK(p.data.subjects() == 15);
    CHECK(p.data.dims() == 1);
    const double noise = (p.data.outcomes - p.latent_outcome).norm() / std::sqrt(225.0);
    CHECK(noise > 0.005);
    CHECK(noise < 0.02);
}

TEST_CASE("configuration validation") {
    SimConfig cfg;
    cfg.R = 11;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SimConfig{};
    cfg.sigma_b = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = SimConfig{};
    cfg.m = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    LatticeConfig lat;
    lat.sigma_w = -1.0;
    CHECK_THROWS_AS(lat.validate(), ConfigError);
    CHECK(sim_family_from_string("radial") == SimFamily::Radial);
    CHECK(to_string(SimFamily::Linear) == "linear");
    CHECK_THROWS_AS((void)sim_family_from_string("cubic"), ConfigError);
}

}
