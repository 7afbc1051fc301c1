#include "msd/alignability.hpp"

#include <cmath>

#include "msd/errors.hpp"

namespace msd {

double t_pi(const SpectralProfile& pi1, const SpectralProfile& pi2,
            const Matrix& v1, const Matrix& v2) {
    if (pi1.rank() != pi2.rank()) throw InvalidInput("t_pi: profile ranks differ");
    const Index r = pi1.rank();
    if (v1.rows() != r || v1.cols() != r || v2.rows() != r || v2.cols() != r) {
        throw InvalidInput("t_pi: covariance dimensions must match the rank");
    }
    const Matrix pooled = 0.5 * ((v1 + v2) + (v1 + v2).transpose());
    const Vector delta = pi1.pi - pi2.pi;
    return delta.dot(pseudoinverse(pooled, 1e-10) * delta);
}

AlignmentReport align_test(const DatasetAnalysis& a1, const DatasetAnalysis& a2,
                           const TestOptions& opts) {
    if (a1.rank != a2.rank) throw InvalidInput("align_test: working ranks differ");
    const Index r = a1.rank;

    AlignmentReport rep;
    rep.pi1 = a1.prof;
    rep.pi2 = a2.prof;
    rep.delta_pi = a1.prof.pi - a2.prof.pi;
    rep.nmsd_hat = rep.delta_pi.norm();
    const double n1 = static_cast<double>(a1.n_samples);
    const double n2 = static_cast<double>(a2.n_samples);
    rep.n_eff = n1 * n2 / (n1 + n2);

    rep.t_stat = t_pi(a1.prof, a2.prof, a1.cov.v_pi, a2.cov.v_pi);
    rep.df = static_cast<int>(r) - 1;
    rep.p_value = rep.df >= 1 ? chi2_sf(rep.t_stat, rep.df) : 1.0;

    // The null calibration fixes df = r - 1; flag pooled covariances whose
    // numerical rank disagrees.
    const Matrix pooled = a1.cov.v_pi + a2.cov.v_pi;
    const EigenSystem es = sym_eig(0.5 * (pooled + pooled.transpose()));
    const double lmax = std::max(es.eigenvalues(0), 0.0);
    Index num_rank = 0;
    for (Index i = 0; i < es.eigenvalues.size(); ++i) {
        if (es.eigenvalues(i) > 1e-10 * lmax && es.eigenvalues(i) > 0.0) ++num_rank;
    }
    if (num_rank != r - 1) {
        rep.warnings.push_back("pooled profile covariance has numerical rank " +
                               std::to_string(num_rank) + ", expected " +
                               std::to_string(r - 1));
    }

    if (opts.with_intervals) {
        rep.intervals = confidence_intervals(a1.prof, a1.cov.v_pi, a2.prof,
                                             a2.cov.v_pi, opts.alpha);
        if (!rep.intervals.nmsd_valid) {
            rep.warnings.push_back(
                "nMSD interval suppressed: estimated distance is numerically zero");
        }
    }
    return rep;
}

AlignmentReport align_test(const DataMatrix& y1, const DataMatrix& y2, Index rank,
                           const TestOptions& opts) {
    const AnalysisOptions aopts{opts.penalty_c, opts.center};
    DatasetAnalysis a1, a2;
    try {
        a1 = analyze_dataset(y1, rank, aopts);
    } catch (const SubcriticalSpike& e) {
        throw SubcriticalSpike(std::string("dataset 1: ") + e.what(), e.index);
    } catch (const NearCriticalSpike& e) {
        throw NearCriticalSpike(std::string("dataset 1: ") + e.what(), e.index);
    }
    try {
        a2 = analyze_dataset(y2, rank, aopts);
    } catch (const SubcriticalSpike& e) {
        throw SubcriticalSpike(std::string("dataset 2: ") + e.what(), e.index);
    } catch (const NearCriticalSpike& e) {
        throw NearCriticalSpike(std::string("dataset 2: ") + e.what(), e.index);
    }
    return align_test(a1, a2, opts);
}

}  // namespace msd
