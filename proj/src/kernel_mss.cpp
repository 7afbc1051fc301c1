#include "msd/kernel_mss.hpp"

#include <cmath>

#include "msd/errors.hpp"

namespace msd {

Matrix center_gram(const Matrix& k) {
    if (k.rows() != k.cols() || k.rows() == 0) {
        throw InvalidInput("center_gram: Gram matrix must be square and non-empty");
    }
    const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
    if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw InvalidInput("center_gram: Gram matrix asymmetric beyond tolerance");
    }
    const Vector row_mean = k.rowwise().mean();
    const double grand_mean = k.mean();
    Matrix centered = k;
    centered.colwise() -= row_mean;
    centered.rowwise() -= row_mean.transpose();
    centered.array() += grand_mean;
    return 0.5 * (centered + centered.transpose());
}

SpectralProfile kernel_profile(const Matrix& k, Index rank,
                               std::vector<std::string>* warnings) {
    const Index n = k.rows();
    if (rank < 1 || rank > n) throw InvalidInput("kernel_profile: need 1 <= rank <= N");
    const Matrix g = center_gram(k) / static_cast<double>(n);
    const EigenSystem es = sym_eig(g);

    const double lmax = es.eigenvalues(0);
    const double positivity_tol = 1e-12 * std::max(1.0, lmax);
    if (lmax <= positivity_tol || es.eigenvalues(rank - 1) <= positivity_tol) {
        throw InsufficientSpectrum(
            "kernel_profile: fewer than rank strictly positive Gram eigenvalues");
    }
    if (warnings != nullptr && rank < n) {
        const double gap = es.eigenvalues(rank - 1) - es.eigenvalues(rank);
        if (gap < 1e-3 * lmax) {
            warnings->push_back(
                "kernel spectrum: eigengap at rank " + std::to_string(rank) +
                " is below 1e-3 of the leading eigenvalue");
        }
    }
    return profile(es.eigenvalues.head(rank));
}

double kernel_nmsd(const Matrix& k1, const Matrix& k2, Index rank) {
    return nmsd(kernel_profile(k1, rank), kernel_profile(k2, rank));
}

Matrix rbf_gram(const DataMatrix& x, double bandwidth) {
    if (bandwidth <= 0.0) throw InvalidInput("rbf_gram: bandwidth must be positive");
    const Index n = x.cols();
    if (n == 0) throw InvalidInput("rbf_gram: empty data");
    const Vector sq_norms = x.colwise().squaredNorm();
    Matrix dist2 = (-2.0 * (x.transpose() * x)).eval();
    dist2.colwise() += sq_norms;
    dist2.rowwise() += sq_norms.transpose();
    dist2 = dist2.cwiseMax(0.0);
    Matrix gram = (-dist2 / (2.0 * bandwidth * bandwidth)).array().exp();
    gram.diagonal().setOnes();
    return 0.5 * (gram + gram.transpose());
}

Matrix linear_gram(const DataMatrix& x) {
    if (x.cols() == 0) throw InvalidInput("linear_gram: empty data");
    const Matrix gram = x.transpose() * x;
    return 0.5 * (gram + gram.transpose());
}

}  // namespace msd
