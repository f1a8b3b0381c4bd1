#include "doctest.h"

#include "oracles/oracles.hpp"
#include "sklpca/errors.hpp"
#include "sklpca/kernels.hpp"

#include <cmath>

using namespace sklpca;

TEST_SUITE("kernels") {

TEST_CASE("kernel_eval examples") {
    Eigen::VectorXd a(2), b(2);
    a << 1, 2;
    b << 3, 4;
    CHECK(kernel_eval(KernelSpec::linear(), a, b) == 11.0);
    CHECK(kernel_eval(KernelSpec::gaussian(1.0), a, a) == 1.0);
    Eigen::VectorXd z(1), t(1);
    z << 0;
    t << 2;
    CHECK(kernel_eval(KernelSpec::gaussian(1.0), z, t) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(kernel_eval(KernelSpec::gaussian(1.0), z, t) == doctest::Approx(0.135335).epsilon(1e-6));
}

TEST_CASE("kernel_eval errors") {
    Eigen::VectorXd a(2), b(3);
    a.setOnes();
    b.setOnes();
    CHECK_THROWS_AS((void)kernel_eval(KernelSpec::linear(), a, b), DimensionError);
    CHECK_THROWS_AS((void)kernel_eval(KernelSpec::gaussian_median(), a, a), ConfigError);
    CHECK_THROWS_AS(KernelSpec::gaussian(0.0).validate(), ConfigError);
    CHECK_THROWS_AS(KernelSpec::gaussian(-1.0).validate(), ConfigError);
    CHECK_NOTHROW(KernelSpec{KernelFamily::Linear, -3.0, BandwidthMode::Fixed}.validate());
}

TEST_CASE("gram examples") {
    const GramMatrix id = gram(KernelSpec::linear(), Eigen::MatrixXd::Identity(2, 2));
    CHECK(id.symmetric);
    CHECK(id.values == Eigen::MatrixXd::Identity(2, 2));

    const GramMatrix one = gram(KernelSpec::gaussian(1.0), Eigen::MatrixXd::Constant(1, 3, 0.7));
    CHECK(one.values.rows() == 1);
    CHECK(one.values(0, 0) == 1.0);

    Eigen::MatrixXd a(2, 2), b(1, 2);
    a << 1, 0, 0, 2;
    b << 1, 1;
    const GramMatrix cross = gram(KernelSpec::linear(), a, b);
    CHECK_FALSE(cross.symmetric);
    CHECK(cross.values(0, 0) == 1.0);
    CHECK(cross.values(1, 0) == 2.0);

    CHECK_THROWS_AS((void)gram(KernelSpec::linear(), a, Eigen::MatrixXd::Ones(2, 3)), DimensionError);
}

TEST_CASE("gram properties on random inputs") {
    oracle::Gen gen(11);
    for (int trial = 0; trial < 25; ++trial) {
        const Eigen::Index n = gen.integer(1, 12);
        const Eigen::Index n2 = gen.integer(1, 12);
        const Eigen::Index p = gen.integer(1, 6);
        const Eigen::MatrixXd a = gen.matrix(n, p);
        const Eigen::MatrixXd b = gen.matrix(n2, p);

        const Eigen::MatrixXd lin = gram(KernelSpec::linear(), a).values;
        CHECK((lin - a * a.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + lin.cwiseAbs().maxCoeff()));

        const KernelSpec g = KernelSpec::gaussian(gen.uniform(0.3, 3.0));
        const Eigen::MatrixXd gk = gram(g, a).values;
        CHECK(gk.minCoeff() > 0.0);
        CHECK(gk.maxCoeff() <= 1.0);
        CHECK(gk.diagonal().isOnes(0.0));

        for (const KernelSpec& spec : {KernelSpec::linear(), g}) {
            const Eigen::MatrixXd ab = gram(spec, a, b).values;
            const Eigen::MatrixXd ba = gram(spec, b, a).values;
            CHECK((ab - ba.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
            for (Eigen::Index r = 0; r < n; ++r) {
                for (Eigen::Index c = 0; c < n2; ++c) {
                    CHECK(ab(r, c) == doctest::Approx(kernel_eval(spec, a.row(r).transpose(),
                                                                   b.row(c).transpose())).epsilon(1e-14));
                }
            }
            const Eigen::MatrixXd sym = gram(spec, a).values;
            CHECK((sym - sym.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + sym.cwiseAbs().maxCoeff()));
            const double smallest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues().minCoeff();
            CHECK(smallest >= -1e-8 * sym.trace() / double(n));
        }
    }
}

TEST_CASE("cached inner products slice to the direct Gram") {
    oracle::Gen gen(23);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = gen.integer(2, 20);
        const Eigen::MatrixXd x = gen.matrix(n, gen.integer(1, 5));
        const InnerProductCache cache(x);
        std::vector<Eigen::Index> rows;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (gen.uniform(0.0, 1.0) < 0.6) {
                rows.push_back(r);
            }
        }
        if (rows.empty()) {
            rows.push_back(n - 1);
        }
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), x.cols());
        for (std::size_t t = 0; t < rows.size(); ++t) {
            sub.row(static_cast<Eigen::Index>(t)) = x.row(rows[t]);
        }
        for (const KernelSpec& spec : {KernelSpec::linear(), KernelSpec::gaussian(gen.uniform(0.3, 3.0))}) {
            const GramMatrix sliced = cache.gram(spec, rows);
            const Eigen::MatrixXd direct = gram(spec, sub).values;
            CHECK(sliced.symmetric);
            CHECK((sliced.values - direct).cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + direct.cwiseAbs().maxCoeff()));
            const GramMatrix cross = cache.gram(spec, rows, {0, n - 1});
            Eigen::MatrixXd ends(2, x.cols());
            ends << x.row(0), x.row(n - 1);
            const Eigen::MatrixXd direct_cross = gram(spec, sub, ends).values;
            CHECK_FALSE(cross.symmetric);
            CHECK((cross.values - direct_cross).cwiseAbs().maxCoeff() <=
                  1e-13 * (1.0 + direct_cross.cwiseAbs().maxCoeff()));
        }
    }
    const InnerProductCache cache(Eigen::MatrixXd::Ones(3, 2));
    CHECK_THROWS_AS((void)cache.gram(KernelSpec::linear(), {3}), DimensionError);
    CHECK_THROWS_AS((void)cache.gram(KernelSpec::linear(), {0}, {-1}), DimensionError);
    CHECK_THROWS_AS((void)cache.gram(KernelSpec::gaussian_median(), {0, 1}), ConfigError);
}

TEST_CASE("resolve_bandwidth") {
    const KernelSpec fixed = KernelSpec::gaussian(2.0);
    CHECK(resolve_bandwidth(fixed, Eigen::MatrixXd::Random(5, 2)) == fixed);
    CHECK(resolve_bandwidth(KernelSpec::linear(), Eigen::MatrixXd::Random(5, 2)) == KernelSpec::linear());

    Eigen::MatrixXd two(2, 1);
    two << 0, 4;
    const KernelSpec r2 = resolve_bandwidth(KernelSpec::gaussian_median(), two);
    CHECK(r2.bandwidth_mode == BandwidthMode::Fixed);
    CHECK(r2.bandwidth == 4.0);

    Eigen::MatrixXd three(3, 1);
    three << 0, 1, 3;
    CHECK(resolve_bandwidth(KernelSpec::gaussian_median(), three).bandwidth == 2.0);

    CHECK_THROWS_AS((void)resolve_bandwidth(KernelSpec::gaussian_median(), Eigen::MatrixXd::Ones(4, 2)),
                    DegenerateDataError);
    CHECK_THROWS_AS((void)resolve_bandwidth(KernelSpec::gaussian_median(), Eigen::MatrixXd::Ones(1, 2)),
                    InsufficientDataError);
}

TEST_CASE("resolve_bandwidth matches the median oracle and is seed-deterministic") {
    oracle::Gen gen(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd a = gen.matrix(gen.integer(2, 40), gen.integer(1, 4));
        CHECK(resolve_bandwidth(KernelSpec::gaussian_median(), a).bandwidth ==
              doctest::Approx(oracle::median_distance(a)).epsilon(1e-13));
    }
    const Eigen::MatrixXd big = gen.matrix(300, 3);
    const double s1 = resolve_bandwidth(KernelSpec::gaussian_median(), big, 42, 50).bandwidth;
    const double s2 = resolve_bandwidth(KernelSpec::gaussian_median(), big, 42, 50).bandwidth;
    CHECK(s1 == s2);
    CHECK(s1 > 0.0);
}

TEST_CASE("double_center") {
    CHECK(double_center(Eigen::MatrixXd::Ones(5, 5)).cwiseAbs().maxCoeff() <= 1e-15);
    Eigen::MatrixXd k(2, 2);
    k << 4, 2, 2, 4;
    Eigen::MatrixXd expected(2, 2);
    expected << 1, -1, -1, 1;
    CHECK((double_center(k) - expected).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(double_center(Eigen::MatrixXd::Constant(1, 1, 3.0))(0, 0) == 0.0);
    CHECK_THROWS_AS((void)double_center(Eigen::MatrixXd::Ones(2, 3)), DimensionError);

    oracle::Gen gen(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = gen.integer(1, 15);
        const Eigen::MatrixXd a = gen.spd(n);
        const Eigen::MatrixXd c = double_center(a);
        CHECK(c.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(c.colwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((double_center(c) - c).cwiseAbs().maxCoeff() <= 1e-10);
        const Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / double(n));
        CHECK((c - h * a * h).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("kernel family names") {
    CHECK(kernel_family_from_string("linear") == KernelFamily::Linear);
    CHECK(kernel_family_from_string("gaussian") == KernelFamily::Gaussian);
    CHECK(to_string(KernelFamily::Gaussian) == "gaussian");
    CHECK_THROWS_AS((void)kernel_family_from_string("poly"), ConfigError);
}

}
