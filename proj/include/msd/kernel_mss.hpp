#pragma once

#include <string>
#include <vector>

#include "msd/matrix_core.hpp"
#include "msd/spike_inference.hpp"

namespace msd {

/// Double-center a symmetric Gram matrix: K -> H K H with H = I - 11'/N.
/// Idempotent; row and column sums of the result vanish.
Matrix center_gram(const Matrix& k);

/// Spectral profile from the top-r eigenvalues of the centered, normalized
/// Gram matrix H K H / N. Throws InsufficientSpectrum when fewer than r
/// eigenvalues are strictly positive. When `warnings` is supplied, a note is
/// appended if the eigengap at rank r is below 1e-3 of the leading
/// eigenvalue (the spiked, separated-spectrum working assumption looks
/// shaky).
SpectralProfile kernel_profile(const Matrix& k, Index rank,
                               std::vector<std::string>* warnings = nullptr);

/// Kernelized manifold spectral distance between two Gram matrices.
double kernel_nmsd(const Matrix& k1, const Matrix& k2, Index rank);

/// Gaussian RBF Gram matrix of the columns of x:
/// K_ij = exp(-|x_i - x_j|^2 / (2 bandwidth^2)).
Matrix rbf_gram(const DataMatrix& x, double bandwidth);

/// Linear-kernel Gram matrix X'X of the columns of x.
Matrix linear_gram(const DataMatrix& x);

}  // namespace msd
