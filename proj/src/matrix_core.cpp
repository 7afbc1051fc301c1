#include "msd/matrix_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

#include "msd/errors.hpp"
#include "msd/rng.hpp"

namespace msd {

Matrix sample_covariance(const DataMatrix& y, bool center) {
    if (y.rows() == 0 || y.cols() == 0) {
        throw InvalidInput("sample_covariance: empty matrix");
    }
    const double n = static_cast<double>(y.cols());
    if (center) {
        if (y.cols() < 2) {
            throw InvalidInput("sample_covariance: centering needs N >= 2");
        }
        const DataMatrix yc = center_columns(y);
        Matrix q = (yc * yc.transpose()) / n;
        return 0.5 * (q + q.transpose());
    }
    Matrix q = (y * y.transpose()) / n;
    return 0.5 * (q + q.transpose());
}

DataMatrix center_columns(const DataMatrix& y) {
    return y.colwise() - y.rowwise().mean();
}

EigenSystem sym_eig(const Matrix& q) {
    if (q.rows() != q.cols() || q.rows() == 0) {
        throw InvalidInput("sym_eig: matrix must be square and non-empty");
    }
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    const double asym = (q - q.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * scale) {
        throw InvalidInput("sym_eig: input asymmetric beyond tolerance");
    }

    const Matrix sym = 0.5 * (q + q.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalFailure("sym_eig: eigensolver did not converge");
    }

    // Eigen returns ascending order; flip to non-increasing.
    const Index p = q.rows();
    EigenSystem out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();

    // Sign convention: first coordinate of non-negligible magnitude positive.
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < p; ++i) {
            const double v = out.eigenvectors(i, j);
            if (std::abs(v) > 1e-12) {
                if (v < 0.0) out.eigenvectors.col(j) = -out.eigenvectors.col(j);
                break;
            }
        }
    }
    return out;
}

Matrix pseudoinverse(const Matrix& a, double rank_tol) {
    if (rank_tol <= 0.0) {
        throw InvalidInput("pseudoinverse: rank_tol must be positive");
    }
    const EigenSystem es = sym_eig(a);
    const double lambda_max = es.eigenvalues.size() > 0 ? es.eigenvalues(0) : 0.0;
    if (lambda_max <= 0.0) {
        return Matrix::Zero(a.rows(), a.cols());
    }
    const double threshold = rank_tol * lambda_max;
    Vector inv = Vector::Zero(es.eigenvalues.size());
    for (Index i = 0; i < es.eigenvalues.size(); ++i) {
        if (es.eigenvalues(i) > threshold) inv(i) = 1.0 / es.eigenvalues(i);
    }
    Matrix out = es.eigenvectors * inv.asDiagonal() * es.eigenvectors.transpose();
    return 0.5 * (out + out.transpose());
}

Matrix random_orthonormal(Index p, Index r, std::uint64_t seed) {
    if (r < 1 || r > p) {
        throw InvalidInput("random_orthonormal: need 1 <= r <= p");
    }
    Rng rng(seed);
    Matrix gauss(p, r);
    for (Index j = 0; j < r; ++j) {
        for (Index i = 0; i < p; ++i) gauss(i, j) = rng.normal();
    }
    Eigen::HouseholderQR<Matrix> qr(gauss);
    Matrix q = qr.householderQ() * Matrix::Identity(p, r);
    // Fix the QR sign ambiguity so output is a deterministic function of the
    // Gaussian draw.
    const Matrix rfac = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    for (Index j = 0; j < r; ++j) {
        if (rfac(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return q;
}

}  // namespace msd
