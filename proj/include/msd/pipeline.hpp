#pragma once

#include <string>
#include <vector>

#include "msd/matrix_core.hpp"
#include "msd/noise_estimation.hpp"
#include "msd/spike_inference.hpp"
#include "msd/uncertainty.hpp"

namespace msd {

struct AnalysisOptions {
    double penalty_c = 10.0;  ///< Potts penalty multiplier, beta = c log(p) / N
    bool center = true;       ///< remove per-feature sample means first
};

/// Everything the single-dataset pipeline produces: noise model, top-r
/// eigenpairs, debiased spikes, profile, and plug-in covariances.
struct DatasetAnalysis {
    Index rank = 0;
    Index n_samples = 0;
    NoiseModel noise;
    Vector lambda;       ///< top-r sample covariance eigenvalues
    Matrix eigvecs;      ///< corresponding eigenvectors (p x r)
    SpikeSet spikes;
    SpectralProfile prof;
    CovarianceEstimates cov;
};

/// Noise estimation, spike debiasing, and covariance plug-ins for one
/// dataset. SubcriticalSpike / NearCriticalSpike propagate with the 1-based
/// spike index attached.
DatasetAnalysis analyze_dataset(const DataMatrix& y, Index rank,
                                const AnalysisOptions& opts = {});

}  // namespace msd
