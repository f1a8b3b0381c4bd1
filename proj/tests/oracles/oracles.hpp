#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is written with plain loops over std::vector so that no
// code path is shared with the Eigen-based production routines.

#include "sklpca/dataset.hpp"
#include "sklpca/groups.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

inline Mat to_mat(const Eigen::MatrixXd& a) {
    Mat out(static_cast<std::size_t>(a.rows()), std::vector<double>(static_cast<std::size_t>(a.cols())));
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = a(r, c);
        }
    }
    return out;
}

inline Eigen::MatrixXd from_mat(const Mat& a) {
    const auto rows = static_cast<Eigen::Index>(a.size());
    const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(a[0].size());
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            out(r, c) = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// HSIC by definition

/// Centering matrix entry H_ab = [a == b] - 1/n.
inline double h(std::size_t a, std::size_t b, std::size_t n) {
    return (a == b ? 1.0 : 0.0) - 1.0 / static_cast<double>(n);
}

/// tr(K H L H) = sum_{a,b,c,d} K_ab H_bc L_cd H_da, evaluated entry by entry.
inline double trace_khlh(const Mat& k, const Mat& l) {
    const std::size_t n = k.size();
    double total = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t c = 0; c < n; ++c) {
                for (std::size_t d = 0; d < n; ++d) {
                    total += k[a][b] * h(b, c, n) * l[c][d] * h(d, a, n);
                }
            }
        }
    }
    return total;
}

inline double hsic_empirical(const Mat& k, const Mat& l) {
    const double n = static_cast<double>(k.size());
    return trace_khlh(k, l) / ((n - 1.0) * (n - 1.0));
}

/// Subject-mean kernel; `mean` switches the (n_i - 1)(n_j - 1) divisor to n_i n_j.
inline Mat subject_mean(const Mat& k, const std::vector<std::size_t>& sizes, bool mean = false) {
    const std::size_t m = sizes.size();
    std::vector<std::size_t> start(m, 0);
    for (std::size_t i = 1; i < m; ++i) {
        start[i] = start[i - 1] + sizes[i - 1];
    }
    Mat out(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double sum = 0.0;
            for (std::size_t a = 0; a < sizes[i]; ++a) {
                for (std::size_t b = 0; b < sizes[j]; ++b) {
                    sum += k[start[i] + a][start[j] + b];
                }
            }
            const double di = mean ? double(sizes[i]) : double(sizes[i]) - 1.0;
            const double dj = mean ? double(sizes[j]) : double(sizes[j]) - 1.0;
            out[i][j] = sum / (di * dj);
        }
    }
    return out;
}

inline double hsic_fixed(const Mat& kbar, const Mat& lbar) {
    const double m = static_cast<double>(kbar.size());
    return trace_khlh(kbar, lbar) / ((m - 1.0) * (m - 1.0));
}

inline Mat block(const Mat& k, std::size_t start, std::size_t count) {
    Mat out(count, std::vector<double>(count));
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = 0; b < count; ++b) {
            out[a][b] = k[start + a][start + b];
        }
    }
    return out;
}

inline double hsic_random(const Mat& k, const Mat& l, const std::vector<std::size_t>& sizes) {
    double total = 0.0;
    std::size_t start = 0;
    for (std::size_t s : sizes) {
        const double d = static_cast<double>(s) - 1.0;
        total += trace_khlh(block(k, start, s), block(l, start, s)) / (d * d);
        start += s;
    }
    return total / static_cast<double>(sizes.size());
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi eigensolver for small symmetric matrices

struct Eig {
    std::vector<double> values; ///< descending
    Mat vectors;                ///< column j is the eigenvector of values[j]
};

inline Eig jacobi_eigen(Mat a) {
    const std::size_t n = a.size();
    Mat v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        v[i][i] = 1.0;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += a[p][q] * a[p][q];
            }
        }
        if (off < 1e-300) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) {
                    continue;
                }
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    const double arp = a[r][p];
                    const double arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double apr = a[p][r];
                    const double aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double vrp = v[r][p];
                    const double vrq = v[r][q];
                    v[r][p] = c * vrp - s * vrq;
                    v[r][q] = s * vrp + c * vrq;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
    Eig out;
    out.values.resize(n);
    out.vectors.assign(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a[order[j]][order[j]];
        for (std::size_t r = 0; r < n; ++r) {
            out.vectors[r][j] = v[r][order[j]];
        }
    }
    return out;
}

inline Mat multiply(const Mat& a, const Mat& b) {
    Mat out(a.size(), std::vector<double>(b[0].size(), 0.0));
    for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            for (std::size_t c = 0; c < b[0].size(); ++c) {
                out[r][c] += a[r][k] * b[k][c];
            }
        }
    }
    return out;
}

inline Mat transpose(const Mat& a) {
    Mat out(a[0].size(), std::vector<double>(a.size()));
    for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t c = 0; c < a[0].size(); ++c) {
            out[c][r] = a[r][c];
        }
    }
    return out;
}

/// Pencil (Q, K) by whitening: K = U diag(d) U^T, W = U diag(d)^-1/2,
/// then the ordinary eigenproblem of W^T Q W; vectors returned as W u.
inline Eig whitening_geneig(const Mat& q, const Mat& k) {
    const std::size_t n = k.size();
    const Eig kd = jacobi_eigen(k);
    Mat w(n, std::vector<double>(n));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            w[r][c] = kd.vectors[r][c] / std::sqrt(kd.values[c]);
        }
    }
    const Eig inner = jacobi_eigen(multiply(transpose(w), multiply(q, w)));
    return {inner.values, multiply(w, inner.vectors)};
}

// ---------------------------------------------------------------------------
// Linear algebra helpers

/// Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Mat a, std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) {
                pivot = r;
            }
        }
        if (std::abs(a[pivot][col]) < 1e-300) {
            throw std::runtime_error("oracle::solve: singular system");
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) {
            s -= a[i][c] * x[c];
        }
        x[i] = s / a[i][i];
    }
    return x;
}

/// Least-squares fitted values of y on [1, design] through the normal equations.
inline std::vector<double> ols_fitted(const Mat& design, const std::vector<double>& y) {
    const std::size_t n = y.size();
    const std::size_t p = design.empty() ? 0 : design[0].size();
    Mat x(n, std::vector<double>(p + 1, 1.0));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < p; ++c) {
            x[r][c + 1] = design[r][c];
        }
    }
    Mat xtx(p + 1, std::vector<double>(p + 1, 0.0));
    std::vector<double> xty(p + 1, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t a = 0; a <= p; ++a) {
            xty[a] += x[r][a] * y[r];
            for (std::size_t b = 0; b <= p; ++b) {
                xtx[a][b] += x[r][a] * x[r][b];
            }
        }
    }
    const std::vector<double> beta = solve(xtx, xty);
    std::vector<double> fitted(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t a = 0; a <= p; ++a) {
            fitted[r] += x[r][a] * beta[a];
        }
    }
    return fitted;
}

/// Two-pass Pearson correlation.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

/// Benjamini-Hochberg by enumeration: the largest k with p_(k) <= k q / n
/// rejects every p <= p_(k).
inline std::vector<Eigen::Index> bh(const std::vector<double>& p, double q) {
    const std::size_t n = p.size();
    std::vector<double> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    double cutoff = -1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        if (sorted[k - 1] <= static_cast<double>(k) * q / static_cast<double>(n)) {
            cutoff = sorted[k - 1];
        }
    }
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] <= cutoff) {
            out.push_back(static_cast<Eigen::Index>(i));
        }
    }
    return out;
}

/// Median of all pairwise row distances.
inline double median_distance(const Eigen::MatrixXd& a) {
    std::vector<double> d;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < a.rows(); ++j) {
            double s = 0.0;
            for (Eigen::Index c = 0; c < a.cols(); ++c) {
                s += (a(i, c) - a(j, c)) * (a(i, c) - a(j, c));
            }
            d.push_back(std::sqrt(s));
        }
    }
    std::sort(d.begin(), d.end());
    const std::size_t n = d.size();
    return n % 2 == 1 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
}

/// Largest principal angle (radians) between the column spans of a and b.
inline double max_principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const Eigen::MatrixXd qa = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() *
                               Eigen::MatrixXd::Identity(a.rows(), a.cols());
    const Eigen::MatrixXd qb = Eigen::HouseholderQR<Eigen::MatrixXd>(b).householderQ() *
                               Eigen::MatrixXd::Identity(b.rows(), b.cols());
    const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(qa.transpose() * qb).singularValues();
    const double smallest = std::min(1.0, s.minCoeff());
    // asin of the residual norm is better conditioned than acos near zero.
    const double residual = std::sqrt(std::max(0.0, 1.0 - smallest * smallest));
    return std::asin(std::min(1.0, residual));
}

// ---------------------------------------------------------------------------
// Generators

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
    Eigen::Index integer(Eigen::Index lo, Eigen::Index hi) {
        return std::uniform_int_distribution<Eigen::Index>(lo, hi)(rng);
    }

    Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd out(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c) {
            for (Eigen::Index r = 0; r < rows; ++r) {
                out(r, c) = normal();
            }
        }
        return out;
    }

    /// A A^T + shift I: symmetric positive definite.
    Eigen::MatrixXd spd(Eigen::Index n, double shift = 0.5) {
        const Eigen::MatrixXd a = matrix(n, n);
        return a * a.transpose() + shift * Eigen::MatrixXd::Identity(n, n);
    }

    /// B B^T with B n x r: PSD of rank r.
    Eigen::MatrixXd psd(Eigen::Index n, Eigen::Index r) {
        const Eigen::MatrixXd b = matrix(n, r);
        return b * b.transpose();
    }

    std::vector<std::size_t> sizes(Eigen::Index m, Eigen::Index lo, Eigen::Index hi) {
        std::vector<std::size_t> out(static_cast<std::size_t>(m));
        for (auto& s : out) {
            s = static_cast<std::size_t>(integer(lo, hi));
        }
        return out;
    }

    /// Longitudinal data with the given subject sizes; outcome depends on
    /// feature 0 plus a subject offset so both components carry signal.
    sklpca::LongitudinalDataset dataset(const std::vector<std::size_t>& sizes, Eigen::Index p) {
        std::vector<sklpca::GroupIndex::Segment> segments;
        Eigen::Index start = 0;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            const auto count = static_cast<Eigen::Index>(sizes[i]);
            segments.push_back({"g" + std::to_string(100 + i), start, count});
            start += count;
        }
        sklpca::LongitudinalDataset data;
        data.groups = sklpca::GroupIndex(segments);
        data.features = matrix(start, p);
        data.outcomes.resize(start);
        data.time.resize(start);
        for (const auto& s : segments) {
            const double offset = normal();
            for (Eigen::Index r = 0; r < s.count; ++r) {
                const Eigen::Index row = s.start + r;
                data.features(row, 0) += offset;
                data.outcomes(row) = data.features(row, 0) - 2.0 * offset + 0.3 * normal();
                data.time(row) = static_cast<double>(r + 1);
            }
        }
        return data;
    }
};

inline std::vector<std::size_t> sizes_of(const sklpca::GroupIndex& groups) {
    std::vector<std::size_t> out;
    for (const auto& s : groups.segments()) {
        out.push_back(static_cast<std::size_t>(s.count));
    }
    return out;
}

} // namespace oracle
