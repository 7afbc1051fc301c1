#pragma once

#include <vector>

#include "msd/matrix_core.hpp"

namespace msd {

/// Per-feature noise variance model: a piecewise-constant variance vector
/// with segment start indices (first always 0), plus standardized third and
/// fourth cumulants of the spike-removed residuals.
struct NoiseModel {
    Vector sigma;                    ///< variance per feature, all > 0
    std::vector<Index> boundaries;   ///< segment start indices, boundaries[0] == 0
    double kappa3 = 0.0;
    double kappa4 = 0.0;
    double penalty_beta = 0.0;       ///< Potts jump penalty used for the fit
};

/// diag(Q - U_r D_r U_r^T) where (U_r, D_r) are the top-r eigenpairs of Q.
/// Entries are floored at 1e-12. rank == 0 returns diag(Q) (floored).
Vector residual_diagonal(const Matrix& q, Index rank);

struct PottsFit {
    Vector fit;
    std::vector<Index> boundaries;   ///< segment start indices, first is 0
};

/// Exact global minimizer of sum_i (x_i - s_i)^2 + beta * #jumps over
/// piecewise-constant s, by O(p^2) dynamic programming. Ties are broken
/// toward fewer jumps, then toward the segmentation found first in the
/// left-to-right scan (earlier final boundary).
PottsFit potts_segment(const Vector& x, double beta);

struct Cumulants {
    double kappa3 = 0.0;
    double kappa4 = 0.0;
};

/// Standardized cumulants of the residuals Y - P Y, with P the projector
/// onto span(top_eigenvectors). Per-coordinate raw moments m2, m3, m4 give
/// kappa3 = mean(m3 / m2^{3/2}) and kappa4 = mean(m4 / m2^2 - 3), averaging
/// over coordinates with m2 >= 1e-12; throws DegenerateResiduals when no
/// coordinate qualifies. Expects column-centered data.
Cumulants residual_cumulants(const DataMatrix& y, const Matrix& top_eigenvectors);

/// Rank-`rank` spectral truncation of the sample covariance followed by
/// Potts smoothing of the residual diagonal with penalty
/// beta = penalty_c * log(p) / N (natural log). Expects column-centered
/// data; rank may be 0 (pure-noise model).
NoiseModel estimate_noise(const DataMatrix& y, Index rank, double penalty_c = 10.0);

/// As above, reusing a precomputed sample covariance of y and its
/// eigendecomposition.
NoiseModel estimate_noise(const DataMatrix& y, const Matrix& q, const EigenSystem& es,
                          Index rank, double penalty_c = 10.0);

}  // namespace msd
