#pragma once

#include <Eigen/Dense>

namespace sklpca {

/// Top eigenpairs of the pencil Q v = lambda (K + eps I) v with V^T (K + eps I) V = I.
struct GenEigResult {
    Eigen::VectorXd eigenvalues; ///< descending
    Eigen::MatrixXd vectors;     ///< n x q, K-orthonormal columns
    double regularization = 0.0; ///< eps actually used
    Eigen::Index numerical_rank = 0;
    bool rank_deficient = false; ///< more vectors requested than the numerical rank of Q
};

/**
 * Symmetric-definite generalized eigenproblem for symmetric Q and PSD K.
 *
 * K + eps I is reduced by Cholesky (K + eps I = L L^T), the standard problem
 * L^-1 Q L^-T is solved by Householder tridiagonalization with implicit-shift QR,
 * and eigenvectors are mapped back through L^-T. eps starts at 1e-10 * tr(K) / n
 * and grows x100 (at most three times) while the factorization fails.
 *
 * Requested vectors past the numerical rank of Q (eigenvalues at or below
 * 1e-8 of the largest) are not determined by the pencil; they are completed
 * with the directions of largest kernel variance v^T (K + eps I)^2 v that are
 * K-orthogonal to the leading ones, and carry their (near-zero) Rayleigh quotients.
 *
 * Each returned vector has its largest-magnitude entry positive.
 * Throws InputError if Q or K is asymmetric beyond 1e-8 relative,
 * NumericalError if the reduction never succeeds.
 */
[[nodiscard]] GenEigResult generalized_eig(const Eigen::MatrixXd& q, const Eigen::MatrixXd& k,
                                           Eigen::Index top_q);

/**
 * Same pencil with Q supplied in factored form Q = B B^T (B is n x r, r small).
 * The reduced problem is the thin SVD of L^-1 B; directions beyond its numerical
 * rank are completed exactly as in `generalized_eig`.
 */
[[nodiscard]] GenEigResult generalized_eig_factored(const Eigen::MatrixXd& b, const Eigen::MatrixXd& k,
                                                    Eigen::Index top_q);

/// Partial pivoted Cholesky of a PSD matrix: returns G (n x r) with A ~= G G^T,
/// stopping once the residual trace drops below `rel_tol * trace(A)`.
[[nodiscard]] Eigen::MatrixXd pivoted_cholesky(const Eigen::MatrixXd& a, double rel_tol = 1e-12);

} // namespace sklpca
