#pragma once

// Dense kernels behind archetype fitting: Lawson-Hanson NNLS, the
// penalized simplex-constrained least squares built on it, and a Cholesky
// factorization for Gram matrices.

#include <Eigen/Dense>

namespace faa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct SolverOptions {
    /// Penalty row weight H for the sum-to-one constraint. It is multiplied
    /// by the RMS column norm of the design so that unit-norm columns see H
    /// itself; this keeps the constraint defect independent of data scale.
    double huge_weight = 200.0;
    /// Outer active-set iterations; 0 means 3 * number of columns.
    int max_active_set_iters = 0;
    /// Relative tolerance for pivot and sign decisions, scaled by max|T|.
    double zero_tolerance = 1e-10;
};

void validate(const SolverOptions& opts);

/// Solves min ||u - T w|| subject to w >= 0 (Lawson-Hanson active set).
/// Throws IterationLimitError carrying the last feasible iterate.
Vector nnls_solve(const Matrix& T, const Vector& u, const SolverOptions& opts = {});

/// Same problem in normal-equation form: minimizes w'Gw - 2c'w over w >= 0
/// with G = T'T and c = T'u supplied by the caller. Used where many right
/// hand sides share cached cross products; less accurate than nnls_solve on
/// ill-conditioned designs.
Vector nnls_gram(const Matrix& G, const Vector& c, const SolverOptions& opts = {});

/// Effective penalty for a design: huge_weight times the RMS column norm.
double effective_huge_weight(double frobenius_norm_sq, Index cols, const SolverOptions& opts);

/// Convex least squares: min ||u - T w|| with w >= 0 and sum(w) = 1,
/// approximated by appending a row of H to T and H to u and calling
/// nnls_solve. With one column the simplex is a point and w = (1).
Vector simplex_ls(const Matrix& T, const Vector& u, const SolverOptions& opts = {});

/// simplex_ls in normal-equation form with G = T'T and c = T'u. The
/// penalty is derived from trace(G), so it matches simplex_ls on the same T.
Vector simplex_ls_gram(const Matrix& G, const Vector& c, const SolverOptions& opts = {});

/// Lower-triangular L with W = L L'. Throws NotPositiveDefiniteError on a
/// non-positive pivot and ArgumentError if W is not symmetric.
Matrix cholesky_spd(const Matrix& W);

}  // namespace faa
