#include "msd/noise_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msd/errors.hpp"

namespace msd {

namespace {
constexpr double kVarianceFloor = 1e-12;
}

Vector residual_diagonal(const Matrix& q, Index rank) {
    if (q.rows() != q.cols() || q.rows() == 0) {
        throw InvalidInput("residual_diagonal: matrix must be square");
    }
    const Index p = q.rows();
    if (rank < 0 || rank >= p) {
        throw InvalidInput("residual_diagonal: need 0 <= rank < p");
    }
    Vector diag = q.diagonal();
    if (rank > 0) {
        const EigenSystem es = sym_eig(q);
        for (Index k = 0; k < rank; ++k) {
            diag -= es.eigenvalues(k) * es.eigenvectors.col(k).cwiseAbs2();
        }
    }
    return diag.cwiseMax(kVarianceFloor);
}

PottsFit potts_segment(const Vector& x, double beta) {
    const Index p = x.size();
    if (p < 1) throw InvalidInput("potts_segment: empty input");
    if (beta < 0.0) throw InvalidInput("potts_segment: beta must be >= 0");

    // Prefix sums give O(1) least-squares cost of fitting interval [i, j)
    // with its mean.
    Vector s1 = Vector::Zero(p + 1);
    Vector s2 = Vector::Zero(p + 1);
    for (Index i = 0; i < p; ++i) {
        s1(i + 1) = s1(i) + x(i);
        s2(i + 1) = s2(i) + x(i) * x(i);
    }
    const auto interval_cost = [&](Index i, Index j) {
        const double sum = s1(j) - s1(i);
        const double len = static_cast<double>(j - i);
        return (s2(j) - s2(i)) - sum * sum / len;
    };

    // best(j): optimal objective for the prefix x[0..j), with the convention
    // that every segment contributes +beta and best(0) = -beta, so a
    // one-segment fit carries zero jump penalty.
    std::vector<double> best(static_cast<size_t>(p) + 1, 0.0);
    std::vector<int> segments(static_cast<size_t>(p) + 1, 0);
    std::vector<Index> back(static_cast<size_t>(p) + 1, 0);
    best[0] = -beta;
    for (Index j = 1; j <= p; ++j) {
        double best_val = std::numeric_limits<double>::infinity();
        int best_segments = 0;
        Index best_i = 0;
        for (Index i = 0; i < j; ++i) {
            const double cand = best[static_cast<size_t>(i)] + beta + interval_cost(i, j);
            const int cand_segments = segments[static_cast<size_t>(i)] + 1;
            if (cand < best_val ||
                (cand == best_val && cand_segments < best_segments)) {
                best_val = cand;
                best_segments = cand_segments;
                best_i = i;
            }
        }
        best[static_cast<size_t>(j)] = best_val;
        segments[static_cast<size_t>(j)] = best_segments;
        back[static_cast<size_t>(j)] = best_i;
    }

    PottsFit out;
    out.fit.resize(p);
    Index j = p;
    while (j > 0) {
        const Index i = back[static_cast<size_t>(j)];
        const double mean = (s1(j) - s1(i)) / static_cast<double>(j - i);
        out.fit.segment(i, j - i).setConstant(mean);
        out.boundaries.push_back(i);
        j = i;
    }
    std::reverse(out.boundaries.begin(), out.boundaries.end());
    return out;
}

Cumulants residual_cumulants(const DataMatrix& y, const Matrix& top_eigenvectors) {
    const Index p = y.rows();
    const Index n = y.cols();
    if (p == 0 || n == 0) throw InvalidInput("residual_cumulants: empty data");
    const Index r = top_eigenvectors.cols();
    if (r > 0) {
        if (top_eigenvectors.rows() != p) {
            throw InvalidInput("residual_cumulants: eigenvector dimension mismatch");
        }
        const Matrix gram = top_eigenvectors.transpose() * top_eigenvectors;
        if ((gram - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-8) {
            throw InvalidInput("residual_cumulants: eigenvectors not orthonormal");
        }
    }

    DataMatrix resid = y;
    if (r > 0) {
        resid.noalias() -= top_eigenvectors * (top_eigenvectors.transpose() * y);
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    double sum_k3 = 0.0;
    double sum_k4 = 0.0;
    Index kept = 0;
    for (Index a = 0; a < p; ++a) {
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double v = resid(a, i);
            const double v2 = v * v;
            m2 += v2;
            m3 += v2 * v;
            m4 += v2 * v2;
        }
        m2 *= inv_n;
        m3 *= inv_n;
        m4 *= inv_n;
        if (m2 < kVarianceFloor) continue;
        sum_k3 += m3 / (m2 * std::sqrt(m2));
        sum_k4 += m4 / (m2 * m2) - 3.0;
        ++kept;
    }
    if (kept == 0) {
        throw DegenerateResiduals("residual_cumulants: all coordinates degenerate");
    }
    return {sum_k3 / static_cast<double>(kept), sum_k4 / static_cast<double>(kept)};
}

NoiseModel estimate_noise(const DataMatrix& y, Index rank, double penalty_c) {
    const Matrix q = sample_covariance(y, false);
    return estimate_noise(y, q, sym_eig(q), rank, penalty_c);
}

NoiseModel estimate_noise(const DataMatrix& y, const Matrix& q, const EigenSystem& es,
                          Index rank, double penalty_c) {
    const Index p = y.rows();
    const Index n = y.cols();
    if (p < 2 || n < 2) throw InvalidInput("estimate_noise: need p >= 2 and N >= 2");
    if (rank < 0 || rank >= p) throw InvalidInput("estimate_noise: need 0 <= rank < p");
    if (penalty_c <= 0.0) throw InvalidInput("estimate_noise: penalty_c must be > 0");

    Vector raw = q.diagonal();
    for (Index k = 0; k < rank; ++k) {
        raw -= es.eigenvalues(k) * es.eigenvectors.col(k).cwiseAbs2();
    }
    raw = raw.cwiseMax(kVarianceFloor);

    const double beta =
        penalty_c * std::log(static_cast<double>(p)) / static_cast<double>(n);
    PottsFit fit = potts_segment(raw, beta);

    NoiseModel model;
    model.sigma = fit.fit.cwiseMax(kVarianceFloor);
    model.boundaries = std::move(fit.boundaries);
    model.penalty_beta = beta;
    const Cumulants cum = residual_cumulants(y, es.eigenvectors.leftCols(rank));
    model.kappa3 = cum.kappa3;
    model.kappa4 = cum.kappa4;
    return model;
}

}  // namespace msd
