#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace msd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Observation matrix: features are rows (p of them), samples are columns (N).
using DataMatrix = Eigen::MatrixXd;

/// Full symmetric eigendecomposition, eigenvalues sorted non-increasing,
/// column j of `eigenvectors` paired with `eigenvalues(j)`. Each eigenvector
/// is normalized so its first coordinate of non-negligible magnitude is
/// positive.
struct EigenSystem {
    Vector eigenvalues;
    Matrix eigenvectors;
};

/// Y*Y^T / N, optionally removing the per-feature mean across samples first.
/// Centering requires N >= 2.
Matrix sample_covariance(const DataMatrix& y, bool center);

/// Subtract the mean column (per-feature sample mean) from every column.
DataMatrix center_columns(const DataMatrix& y);

/// Eigendecomposition of a symmetric matrix. The input must be symmetric to
/// within 1e-10 relative to its largest entry; it is symmetrized before the
/// solve so the result is exactly that of (Q + Q^T)/2.
EigenSystem sym_eig(const Matrix& q);

/// Moore-Penrose inverse of a symmetric PSD matrix. Eigenvalues below
/// rank_tol * lambda_max are treated as zero. The zero matrix maps to itself.
Matrix pseudoinverse(const Matrix& a, double rank_tol = 1e-10);

/// p x r matrix with orthonormal columns: QR of a seeded standard Gaussian
/// matrix, sign-fixed so the R factor has a positive diagonal. Bitwise
/// reproducible for a fixed seed.
Matrix random_orthonormal(Index p, Index r, std::uint64_t seed);

}  // namespace msd
