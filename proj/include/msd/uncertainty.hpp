#pragma once

#include <vector>

#include "msd/matrix_core.hpp"
#include "msd/noise_estimation.hpp"
#include "msd/spike_inference.hpp"

namespace msd {

/// Inverse standard-normal CDF (Wichura's algorithm, |error| < 1e-13).
double normal_quantile(double p);

/// Plug-in covariance blocks for the spike, strength, and profile estimators.
/// All matrices are r x r and symmetric. sigma_pi annihilates the all-ones
/// vector and has rank at most r - 1; v_pi = sigma_pi / N is the covariance
/// of the profile estimate itself.
struct CovarianceEstimates {
    Matrix v_cond;      ///< conditional (noise) block of Var(sqrt(N) lambda)
    Matrix gamma_sig;   ///< signal-resampling covariance of the spike quadratic forms
    Matrix v_star;      ///< total: v_cond + N * diag(theta') gamma_sig diag(theta')
    Matrix sigma_d2;    ///< delta-method covariance of sqrt(N)(d2_hat - d2)
    Matrix sigma_pi;    ///< delta-method covariance of sqrt(N)(pi_hat - pi)
    Matrix v_pi;        ///< sigma_pi / N
};

/// Conditional (noise-driven) covariance block of the outlier eigenvalues.
/// eigvecs holds the top-r sample eigenvectors as columns.
Matrix conditional_covariance(const SpikeSet& spikes, const Matrix& eigvecs,
                              const NoiseModel& noise);

/// Signal-resampling covariance block: 2 B_kj^2 / N plus the excess-kurtosis
/// correction from the empirical fourth cumulant of the spike projections,
/// with the noise's cumulant contribution removed. Expects column-centered
/// data.
Matrix signal_sampling_covariance(const DataMatrix& y, const Matrix& eigvecs,
                                  const SpikeSet& spikes, const NoiseModel& noise);

struct ProfileCovariance {
    Matrix sigma_d2;
    Matrix sigma_pi;
    Matrix v_pi;
};

/// Delta-method propagation from spike covariance to strength and profile
/// covariance. Throws NearCriticalSpike when any theta'(xi_hat) < 1e-6.
ProfileCovariance profile_covariance(const SpikeSet& spikes, const Matrix& v_star,
                                     const NoiseModel& noise, Index n_samples);

/// All covariance blocks for one dataset in a single pass.
CovarianceEstimates covariance_estimates(const DataMatrix& y, const Matrix& eigvecs,
                                         const SpikeSet& spikes, const NoiseModel& noise);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Confidence intervals for profile components and, in two-sample mode,
/// for the component-wise profile difference and the nMSD itself.
struct IntervalSet {
    double alpha = 0.05;
    std::vector<Interval> pi1;       ///< component-wise CIs for the first profile
    std::vector<Interval> pi2;       ///< second profile (two-sample mode only)
    std::vector<Interval> delta_pi;  ///< CIs for pi1 - pi2 (two-sample mode only)
    Interval nmsd_ci;
    bool nmsd_valid = false;         ///< false when the distance is too close to 0
};

/// Single-sample intervals for the components of a profile.
IntervalSet confidence_intervals(const SpectralProfile& prof, const Matrix& v_pi,
                                 double alpha);

/// Two-sample intervals: per-component CIs for both profiles and their
/// difference, plus the nMSD interval. The nMSD interval is suppressed
/// (nmsd_valid = false) when the estimated distance is below 1e-6.
IntervalSet confidence_intervals(const SpectralProfile& prof1, const Matrix& v_pi1,
                                 const SpectralProfile& prof2, const Matrix& v_pi2,
                                 double alpha);

}  // namespace msd
