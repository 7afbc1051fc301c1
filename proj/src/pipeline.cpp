#include "msd/pipeline.hpp"

#include "msd/errors.hpp"

namespace msd {

DatasetAnalysis analyze_dataset(const DataMatrix& y, Index rank,
                                const AnalysisOptions& opts) {
    if (y.rows() < 2 || y.cols() < 2) {
        throw InvalidInput("analyze_dataset: need p >= 2 and N >= 2");
    }
    if (rank < 1 || rank >= y.rows()) {
        throw InvalidInput("analyze_dataset: need 1 <= rank < p");
    }
    if (!y.allFinite()) {
        throw InvalidInput("analyze_dataset: data contains non-finite entries");
    }

    DatasetAnalysis out;
    out.rank = rank;
    out.n_samples = y.cols();

    const DataMatrix yc = opts.center ? center_columns(y) : y;
    const Matrix q = sample_covariance(yc, false);
    const EigenSystem es = sym_eig(q);
    out.noise = estimate_noise(yc, q, es, rank, opts.penalty_c);
    out.lambda = es.eigenvalues.head(rank);
    out.eigvecs = es.eigenvectors.leftCols(rank);

    out.spikes = spikes_from_eigenvalues(out.lambda, out.noise, out.n_samples);
    out.prof = profile(out.spikes.d2_hat);
    out.cov = covariance_estimates(yc, out.eigvecs, out.spikes, out.noise);
    return out;
}

}  // namespace msd
