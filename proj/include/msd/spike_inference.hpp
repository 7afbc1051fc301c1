#pragma once

#include "msd/matrix_core.hpp"
#include "msd/noise_estimation.hpp"

namespace msd {

/// Stieltjes-type trace of the noise resolvent, (1/p) sum_i 1/(sigma_i - s).
/// Requires s strictly above max(sigma); always negative there.
double g_fn(const Vector& sigma, double s);

/// sum_i 1/(sigma_i - s)^2, same domain as g_fn; always positive.
double s2_fn(const Vector& sigma, double s);

/// Outlier location map: theta(s) = s + (1/N) sum_i s*sigma_i / (s - sigma_i).
/// Maps a conditional population spike to the position of its sample
/// covariance outlier.
double theta(const Vector& sigma, Index n_samples, double s);

/// theta'(s) = 1 - (1/N) sum_i sigma_i^2 / (s - sigma_i)^2.
double theta_prime(const Vector& sigma, Index n_samples, double s);

/// The unique zero s* of theta' on (max sigma, infinity); theta is strictly
/// increasing on (s*, infinity) and theta(s*) is the detectability edge.
double critical_point(const Vector& sigma, Index n_samples);

/// Invert theta on its supercritical branch: the unique s > s* with
/// theta(s) = lambda_j, found by bracketed bisection to
/// |theta(s) - lambda_j| <= 1e-10 * max(1, lambda_j). Throws
/// SubcriticalSpike when lambda_j <= theta(s*) + 1e-8 * max(1, lambda_j).
double invert_theta(const Vector& sigma, Index n_samples, double lambda_j);

/// Signal strengths from inverted spikes: d2_j = -1 / g(xi_j).
Vector signal_strengths(const Vector& xi_hat, const Vector& sigma);

/// Point on the simplex: the top-r signal strengths normalized by their sum.
struct SpectralProfile {
    Vector pi;
    Index rank() const { return pi.size(); }
};

/// Normalize positive signal strengths to a SpectralProfile.
SpectralProfile profile(const Vector& d2_hat);

/// Euclidean distance between two equal-rank spectral profiles; the
/// normalized manifold spectral distance. Range [0, sqrt(2)].
double nmsd(const SpectralProfile& a, const SpectralProfile& b);

/// Per-spike estimates for the top-r sample covariance outliers.
struct SpikeSet {
    Index rank = 0;
    Vector lambda;        ///< sample outlier eigenvalues, non-increasing
    Vector xi_hat;        ///< inverted conditional population spikes
    Vector theta_prime;   ///< theta'(xi_hat), each in (0, 1]
    Vector d2_hat;        ///< signal strengths, each > 0
};

/// Debias the given top-r sample eigenvalues against a noise model:
/// invert theta, evaluate theta', and solve for the signal strengths.
SpikeSet spikes_from_eigenvalues(const Vector& lambda_top, const NoiseModel& noise,
                                 Index n_samples);

/// Full spike pipeline on column-centered data: sample covariance, top-r
/// eigenvalues, inversion, strengths. SubcriticalSpike errors carry the
/// 1-based index of the offending eigenvalue.
SpikeSet estimate_spikes(const DataMatrix& y, const NoiseModel& noise, Index rank);

}  // namespace msd
