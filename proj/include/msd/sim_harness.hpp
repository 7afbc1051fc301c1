#pragma once

#include <cstdint>
#include <vector>

#include "msd/alignability.hpp"
#include "msd/matrix_core.hpp"
#include "msd/spike_inference.hpp"

namespace msd {

/// Monte Carlo design: latent columns on an ellipsoid surface embedded by a
/// shared random orthonormal frame, plus Gaussian noise whose variance is
/// piecewise constant over four feature blocks (sizes floor(p/3), floor(p/6),
/// floor(p/6), remainder).
struct SimConfig {
    Index p = 100;
    Index n1 = 1500;
    Index n2 = 1500;
    Index rank = 3;
    Vector d1 = (Vector(3) << 7.0, 6.0, 5.0).finished();  ///< semi-axes, dataset 1
    Vector d2 = (Vector(3) << 7.0, 6.0, 5.0).finished();  ///< semi-axes, dataset 2
    Vector noise_levels_1 = (Vector(4) << 3.0, 4.0, 5.0, 6.0).finished();
    Vector noise_levels_2 = (Vector(4) << 2.5, 3.0, 6.0, 4.5).finished();
    double penalty_c = 10.0;
    double alpha = 0.05;
    int n_rep = 800;
    std::uint64_t master_seed = 20240901;
};

/// Expand four block noise levels (variances) to a per-feature vector.
Vector block_noise_vector(Index p, const Vector& levels);

/// Population spectral profile of an ellipsoid design: semi-axes squared,
/// normalized.
SpectralProfile population_profile(const Vector& semi_axes);

/// Population nMSD between two ellipsoid designs.
double population_nmsd(const Vector& semi_axes_1, const Vector& semi_axes_2);

/// One synthetic dataset (which = 1 or 2). The embedding frame is derived
/// from trial_seed alone, so both datasets of a trial share it; latent and
/// noise draws additionally key on `which`. Bitwise reproducible.
DataMatrix generate_dataset(const SimConfig& cfg, int which, std::uint64_t trial_seed);

struct NullCalibrationReport {
    int n_rep = 0;
    double empirical_size = 0.0;
    std::vector<double> q_levels;
    std::vector<double> empirical_quantiles;
    std::vector<double> chi2_quantiles;
    double ks_stat = 0.0;
    double ks_p_value = 1.0;
    std::vector<double> t_values;  ///< per-trial statistics, trial order
};

/// Replicated two-sample tests under the null: empirical size, quantiles of
/// T against the chi-square reference, and a Kolmogorov-Smirnov check.
NullCalibrationReport run_null_calibration(const SimConfig& cfg);

struct PowerRow {
    double c = 1.0;
    double delta_pi_norm = 0.0;    ///< population separation, analytic
    double lambda_theory = 0.0;    ///< noncentrality from pilot covariance
    double power_theory = 0.0;
    double power_empirical = 0.0;
};

struct PowerReport {
    int n_rep = 0;
    int n_pilot = 0;
    std::vector<PowerRow> rows;
};

/// Anisotropic power sweep: dataset 2's first semi-axis is scaled by sqrt(c).
/// Theoretical noncentrality uses a pilot average of the pooled profile
/// covariance at the null.
PowerReport run_power_sweep(const SimConfig& cfg, const std::vector<double>& c_values,
                            int n_pilot = 50);

/// Linear-interpolation sample quantile of unsorted data.
double sample_quantile(std::vector<double> values, double q);

}  // namespace msd
