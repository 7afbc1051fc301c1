#pragma once

#include <string>
#include <vector>

#include "msd/distributions.hpp"
#include "msd/pipeline.hpp"

namespace msd {

/// Wald statistic Delta' (v1 + v2)^+ Delta with the Moore-Penrose inverse
/// truncated at relative rank tolerance 1e-10.
double t_pi(const SpectralProfile& pi1, const SpectralProfile& pi2,
            const Matrix& v1, const Matrix& v2);

struct TestOptions {
    double penalty_c = 10.0;
    double alpha = 0.05;
    bool center = true;
    bool with_intervals = true;
};

/// Outcome of the two-sample manifold alignability test.
struct AlignmentReport {
    double t_stat = 0.0;
    int df = 0;                 ///< r - 1
    double p_value = 1.0;
    Vector delta_pi;
    double nmsd_hat = 0.0;
    double n_eff = 0.0;         ///< N1 N2 / (N1 + N2)
    SpectralProfile pi1, pi2;
    IntervalSet intervals;
    std::vector<std::string> warnings;
};

/// Full two-sample pipeline: per-dataset noise estimation, spike debiasing,
/// profile covariances, then the chi-square calibrated Wald test. A warning
/// is recorded when the numerical rank of the pooled covariance differs
/// from r - 1.
AlignmentReport align_test(const DataMatrix& y1, const DataMatrix& y2, Index rank,
                           const TestOptions& opts = {});

/// As above, reusing per-dataset analyses that were already computed.
AlignmentReport align_test(const DatasetAnalysis& a1, const DatasetAnalysis& a2,
                           const TestOptions& opts = {});

}  // namespace msd
