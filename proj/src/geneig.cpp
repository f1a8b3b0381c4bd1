#include "sklpca/geneig.hpp"

#include "sklpca/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

namespace sklpca {

namespace {

constexpr double kAsymmetryTolerance = 1e-8;
constexpr double kRankTolerance = 1e-8;
constexpr int kMaxEscalations = 3;

void require_symmetric(const Eigen::MatrixXd& a, const char* name) {
    if (a.rows() != a.cols()) {
        throw DimensionError(std::string("generalized_eig: ") + name + " is not square");
    }
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    // Tiled so the transposed reads stay in cache for large matrices.
    constexpr Eigen::Index tile = 64;
    const Eigen::Index n = a.rows();
    double asym = 0.0;
    for (Eigen::Index c = 0; c < n; c += tile) {
        const Eigen::Index w = std::min(tile, n - c);
        for (Eigen::Index r = c; r < n; r += tile) {
            const Eigen::Index h = std::min(tile, n - r);
            asym = std::max(asym, (a.block(r, c, h, w) - a.block(c, r, w, h).transpose()).cwiseAbs().maxCoeff());
        }
    }
    if (asym > kAsymmetryTolerance * scale) {
        std::ostringstream out;
        out << "generalized_eig: " << name << " is not symmetric (max asymmetry " << asym
            << ", scale " << scale << ")";
        throw InputError(out.str());
    }
}

struct Reduction {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double eps = 0.0;
};

Reduction cholesky_reduce(const Eigen::MatrixXd& k) {
    const Eigen::Index n = k.rows();
    double base = k.trace() / static_cast<double>(n);
    if (!(base > 0.0) || !std::isfinite(base)) {
        base = 1.0;
    }
    Reduction red;
    red.eps = 1e-10 * base;
    Eigen::MatrixXd shifted = k;
    for (int attempt = 0; attempt <= kMaxEscalations; ++attempt) {
        shifted.diagonal() = k.diagonal().array() + red.eps;
        red.llt.compute(shifted);
        if (red.llt.info() == Eigen::Success) {
            return red;
        }
        if (attempt < kMaxEscalations) {
            red.eps *= 100.0;
        }
    }
    std::ostringstream diag;
    diag << "n=" << n << " trace=" << k.trace() << " last_eps=" << red.eps
         << " escalations=" << kMaxEscalations;
    throw NumericalError("generalized_eig: Cholesky reduction of K + eps I failed", diag.str());
}

void fix_signs(Eigen::MatrixXd& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index arg = 0;
        v.col(c).cwiseAbs().maxCoeff(&arg);
        if (v(arg, c) < 0.0) {
            v.col(c) = -v.col(c);
        }
    }
}

void finish(GenEigResult& out, const Reduction& red, Eigen::MatrixXd whitened) {
    out.regularization = red.eps;
    out.vectors = red.llt.matrixU().solve(whitened);
    fix_signs(out.vectors);
    const double top = out.eigenvalues.size() > 0 ? out.eigenvalues(0) : 0.0;
    Eigen::Index rank = 0;
    if (top > 0.0) {
        for (Eigen::Index j = 0; j < out.eigenvalues.size(); ++j) {
            if (out.eigenvalues(j) > kRankTolerance * top) {
                ++rank;
            }
        }
    }
    out.numerical_rank = rank;
    out.rank_deficient = rank < out.eigenvalues.size();
}

void require_top_q(Eigen::Index top_q, Eigen::Index n) {
    if (top_q < 1 || top_q > n) {
        throw ConfigError("generalized_eig: requested " + std::to_string(top_q) +
                          " eigenpairs, valid range is 1.." + std::to_string(n));
    }
}

Eigen::Index count_significant(const Eigen::VectorXd& values) {
    if (values.size() == 0 || !(values(0) > 0.0)) {
        return 0;
    }
    return (values.array() > kRankTolerance * values(0)).count();
}

// Directions past the numerical rank all have eigenvalue ~0, so the pencil
// alone does not determine them. Pick the ones carrying the most kernel
// variance: top eigenvectors of P L^T L P in whitened coordinates, where P
// projects out `taken`. In original coordinates this maximizes
// v^T (K + eps I)^2 v subject to v^T (K + eps I) v = 1 and K-orthogonality to
// the supervised directions. Block subspace iteration with a fixed-seed start.
Eigen::MatrixXd complete_by_variance(const Reduction& red, const Eigen::MatrixXd& taken, Eigen::Index count) {
    const Eigen::Index n = red.llt.matrixLLT().rows();
    const Eigen::Index block = std::min(count + 5, n - taken.cols());
    const auto lower = red.llt.matrixLLT().triangularView<Eigen::Lower>();
    auto project = [&](Eigen::MatrixXd& x) {
        if (taken.cols() > 0) {
            x -= taken * (taken.transpose() * x);
        }
    };
    auto orthonormalize = [&](const Eigen::MatrixXd& x) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
        return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(n, x.cols()));
    };
    auto apply = [&](const Eigen::MatrixXd& x) {
        const Eigen::MatrixXd lx = lower * x;
        Eigen::MatrixXd y = lower.transpose() * lx;
        project(y);
        return y;
    };

    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd x(n, block);
    for (Eigen::Index c = 0; c < block; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            x(r, c) = normal(rng);
        }
    }
    project(x);
    x = orthonormalize(x);

    Eigen::VectorXd previous = Eigen::VectorXd::Zero(count);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz;
    for (int iter = 0; iter < 300; ++iter) {
        const Eigen::MatrixXd y = apply(x);
        ritz.compute(x.transpose() * y);
        const Eigen::VectorXd current = ritz.eigenvalues().reverse().head(count);
        x = orthonormalize(y);
        if (iter > 0 && (current - previous).cwiseAbs().maxCoeff() <= 1e-12 * std::max(current(0), 1e-300)) {
            break;
        }
        previous = current;
    }
    ritz.compute(x.transpose() * apply(x));
    Eigen::MatrixXd out = x * ritz.eigenvectors().rowwise().reverse().leftCols(count);
    project(out);
    return orthonormalize(out);
}

// Keeps the first `rank` whitened columns and replaces the rest with variance-maximizing
// completions in order of decreasing kernel variance; `rayleigh` maps a whitened direction to its pencil eigenvalue.
template <typename Rayleigh>
void complete(GenEigResult& out, Eigen::MatrixXd& whitened, const Reduction& red, Eigen::Index rank,
              Rayleigh&& rayleigh) {
    const Eigen::Index top_q = whitened.cols();
    if (rank >= top_q) {
        return;
    }
    const Eigen::MatrixXd taken = whitened.leftCols(rank);
    const Eigen::MatrixXd extra = complete_by_variance(red, taken, top_q - rank);
    // Completions keep their variance order; their Rayleigh quotients are rounding
    // noise around zero, clamped so the spectrum stays non-increasing.
    for (Eigen::Index j = 0; j < extra.cols(); ++j) {
        const Eigen::Index col = rank + j;
        whitened.col(col) = extra.col(j);
        const double value = rayleigh(extra.col(j));
        out.eigenvalues(col) = col > 0 ? std::min(value, out.eigenvalues(col - 1)) : value;
    }
}

} // namespace

GenEigResult generalized_eig(const Eigen::MatrixXd& q, const Eigen::MatrixXd& k, Eigen::Index top_q) {
    require_symmetric(q, "Q");
    require_symmetric(k, "K");
    if (q.rows() != k.rows()) {
        throw DimensionError("generalized_eig: Q and K differ in size");
    }
    const Eigen::Index n = k.rows();
    require_top_q(top_q, n);

    const Reduction red = cholesky_reduce(k);
    // M = L^-1 Q L^-T
    Eigen::MatrixXd m = red.llt.matrixL().solve(q);
    m = red.llt.matrixL().solve(m.transpose().eval());
    m = 0.5 * (m + m.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        std::ostringstream diag;
        diag << "n=" << n << " eps=" << red.eps;
        throw NumericalError("generalized_eig: symmetric eigensolver did not converge", diag.str());
    }
    // Ascending from the solver; take the top block in reverse, ties keep solver order.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::reverse(order.begin(), order.end());
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return solver.eigenvalues()(a) > solver.eigenvalues()(b);
    });

    GenEigResult out;
    out.eigenvalues.resize(top_q);
    Eigen::MatrixXd whitened(n, top_q);
    for (Eigen::Index j = 0; j < top_q; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        out.eigenvalues(j) = solver.eigenvalues()(src);
        whitened.col(j) = solver.eigenvectors().col(src);
    }
    // Completion only fills a partly selected null block. When the selection already
    // reaches significantly negative eigenvalues, every near-zero direction is in it.
    const double scale = solver.eigenvalues().cwiseAbs().maxCoeff();
    if (!(out.eigenvalues(top_q - 1) < -kRankTolerance * scale)) {
        const Eigen::VectorXd all = solver.eigenvalues().reverse();
        complete(out, whitened, red, count_significant(all), [&](const Eigen::VectorXd& u) { return u.dot(m * u); });
    }
    finish(out, red, std::move(whitened));
    return out;
}

GenEigResult generalized_eig_factored(const Eigen::MatrixXd& b, const Eigen::MatrixXd& k,
                                      Eigen::Index top_q) {
    require_symmetric(k, "K");
    if (b.rows() != k.rows()) {
        throw DimensionError("generalized_eig_factored: B and K differ in row count");
    }
    const Eigen::Index n = k.rows();
    require_top_q(top_q, n);

    const Reduction red = cholesky_reduce(k);
    const Eigen::MatrixXd w = red.llt.matrixL().solve(b);
    const Eigen::Index r = w.cols();

    GenEigResult out;
    out.eigenvalues = Eigen::VectorXd::Zero(top_q);
    Eigen::MatrixXd whitened(n, top_q);
    Eigen::Index filled = 0;
    if (r > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU);
        const Eigen::Index take = std::min(top_q, std::min(r, n));
        for (; filled < take; ++filled) {
            const double s = svd.singularValues()(filled);
            out.eigenvalues(filled) = s * s;
            whitened.col(filled) = svd.matrixU().col(filled);
        }
    }
    const Eigen::Index rank = count_significant(out.eigenvalues.head(filled));
    complete(out, whitened, red, rank, [&](const Eigen::VectorXd& u) { return (w.transpose() * u).squaredNorm(); });
    finish(out, red, std::move(whitened));
    return out;
}

Eigen::MatrixXd pivoted_cholesky(const Eigen::MatrixXd& a, double rel_tol) {
    if (a.rows() != a.cols()) {
        throw DimensionError("pivoted_cholesky: matrix is not square");
    }
    const Eigen::Index n = a.rows();
    Eigen::VectorXd residual = a.diagonal().cwiseMax(0.0);
    const double total = residual.sum();
    Eigen::MatrixXd g(n, 0);
    if (!(total > 0.0)) {
        return g;
    }
    std::vector<Eigen::VectorXd> columns;
    while (static_cast<Eigen::Index>(columns.size()) < n && residual.sum() > rel_tol * total) {
        Eigen::Index pivot = 0;
        const double d = residual.maxCoeff(&pivot);
        if (!(d > 0.0)) {
            break;
        }
        Eigen::VectorXd col = a.col(pivot);
        for (const auto& prev : columns) {
            col -= prev(pivot) * prev;
        }
        col /= std::sqrt(d);
        residual -= col.cwiseAbs2();
        residual(pivot) = 0.0;
        residual = residual.cwiseMax(0.0);
        columns.push_back(std::move(col));
    }
    g.resize(n, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        g.col(static_cast<Eigen::Index>(j)) = columns[j];
    }
    return g;
}

} // namespace sklpca
