#include "msd/uncertainty.hpp"

#include <cmath>
#include <string>

#include "msd/errors.hpp"

namespace msd {

namespace {

// Shared plug-in forms. A_kj = psi_k' Sigma psi_j; B is the quadratic form
// of the estimated signal covariance along the sample eigenvectors, taken
// from the conditional-spike identity B = diag(xi_hat) - A; M22(k,j) =
// sum_a psi_ka^2 psi_ja^2 sigma_a^2.
struct PluginForms {
    Matrix a;
    Matrix b;
    Matrix m22;
};

PluginForms plugin_forms(const SpikeSet& spikes, const Matrix& eigvecs,
                         const NoiseModel& noise) {
    const Index r = spikes.rank;
    if (eigvecs.cols() != r) {
        throw InvalidInput("plug-in forms: eigenvector count must equal spike rank");
    }
    if (eigvecs.rows() != noise.sigma.size()) {
        throw InvalidInput("plug-in forms: eigenvector/noise dimension mismatch");
    }
    PluginForms f;
    f.a = eigvecs.transpose() * noise.sigma.asDiagonal() * eigvecs;
    f.a = 0.5 * (f.a + f.a.transpose()).eval();
    f.b = Matrix(spikes.xi_hat.asDiagonal()) - f.a;
    const Matrix sq = eigvecs.cwiseAbs2();
    f.m22 = sq.transpose() * noise.sigma.cwiseAbs2().asDiagonal() * sq;
    f.m22 = 0.5 * (f.m22 + f.m22.transpose()).eval();
    return f;
}

void check_orthonormal(const Matrix& eigvecs, const char* who) {
    const Index r = eigvecs.cols();
    const Matrix gram = eigvecs.transpose() * eigvecs;
    if ((gram - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-8) {
        throw InvalidInput(std::string(who) + ": eigenvectors not orthonormal");
    }
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidInput("normal_quantile: p must lie in (0, 1)");
    }
    // Wichura (1988), algorithm AS 241, PPND16.
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                      2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                    3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                  4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
                (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                      1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                    6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                  2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                      1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                    2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                  5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
                (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                      1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                    1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                  5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

Matrix conditional_covariance(const SpikeSet& spikes, const Matrix& eigvecs,
                              const NoiseModel& noise) {
    check_orthonormal(eigvecs, "conditional_covariance");
    const PluginForms f = plugin_forms(spikes, eigvecs, noise);
    const Index r = spikes.rank;
    const Vector& tp = spikes.theta_prime;

    Matrix v = Matrix::Zero(r, r);
    for (Index k = 0; k < r; ++k) {
        for (Index j = 0; j < r; ++j) {
            const double tptp = tp(k) * tp(j);
            double val = noise.kappa4 * tptp * f.m22(k, j);
            val += 2.0 * noise.kappa3 * tptp * f.a(k, j) * f.b(k, j);
            val += 4.0 * tptp * f.a(k, j) * f.b(k, j);
            if (k == j) {
                const double xi2 = spikes.xi_hat(k) * spikes.xi_hat(k);
                val += 2.0 * tp(k) * tp(k) * f.a(k, k) * f.a(k, k) +
                       2.0 * xi2 * tp(k) - 2.0 * xi2 * tp(k) * tp(k);
            }
            v(k, j) = val;
        }
    }
    return 0.5 * (v + v.transpose());
}

Matrix signal_sampling_covariance(const DataMatrix& y, const Matrix& eigvecs,
                                  const SpikeSet& spikes, const NoiseModel& noise) {
    check_orthonormal(eigvecs, "signal_sampling_covariance");
    const PluginForms f = plugin_forms(spikes, eigvecs, noise);
    const Index r = spikes.rank;
    const Index n = y.cols();
    if (n < 2) throw InvalidInput("signal_sampling_covariance: need N >= 2");
    const double n_d = static_cast<double>(n);

    // Spike projections, centered across samples.
    Matrix proj = eigvecs.transpose() * y;
    proj.colwise() -= proj.rowwise().mean();

    Matrix gamma = Matrix::Zero(r, r);
    for (Index k = 0; k < r; ++k) {
        for (Index j = k; j < r; ++j) {
            double m_ab = 0.0, m_a2 = 0.0, m_b2 = 0.0, m_a2b2 = 0.0;
            for (Index i = 0; i < n; ++i) {
                const double a = proj(k, i);
                const double b = proj(j, i);
                m_ab += a * b;
                m_a2 += a * a;
                m_b2 += b * b;
                m_a2b2 += a * a * b * b;
            }
            m_ab /= n_d;
            m_a2 /= n_d;
            m_b2 /= n_d;
            m_a2b2 /= n_d;
            const double cum_y = m_a2b2 - m_a2 * m_b2 - 2.0 * m_ab * m_ab;
            const double cum_noise = noise.kappa4 * f.m22(k, j);
            const double val =
                (2.0 * f.b(k, j) * f.b(k, j) + cum_y - cum_noise) / n_d;
            gamma(k, j) = val;
            gamma(j, k) = val;
        }
    }
    return gamma;
}

ProfileCovariance profile_covariance(const SpikeSet& spikes, const Matrix& v_star,
                                     const NoiseModel& noise, Index n_samples) {
    const Index r = spikes.rank;
    if (v_star.rows() != r || v_star.cols() != r) {
        throw InvalidInput("profile_covariance: v_star must be r x r");
    }
    const double p = static_cast<double>(noise.sigma.size());

    Vector gamma_diag(r);
    for (Index j = 0; j < r; ++j) {
        if (spikes.theta_prime(j) < 1e-6) {
            throw NearCriticalSpike(
                "spike " + std::to_string(j + 1) + " is numerically critical (theta' = " +
                    std::to_string(spikes.theta_prime(j)) + ")",
                static_cast<int>(j + 1));
        }
        const double g = g_fn(noise.sigma, spikes.xi_hat(j));
        const double s2 = s2_fn(noise.sigma, spikes.xi_hat(j));
        gamma_diag(j) = s2 / (p * g * g * spikes.theta_prime(j));
    }

    ProfileCovariance out;
    out.sigma_d2 = gamma_diag.asDiagonal() * v_star * gamma_diag.asDiagonal();
    out.sigma_d2 = 0.5 * (out.sigma_d2 + out.sigma_d2.transpose()).eval();

    const double total = spikes.d2_hat.sum();
    Matrix jac(r, r);
    for (Index k = 0; k < r; ++k) {
        for (Index j = 0; j < r; ++j) {
            const double kron = (k == j) ? total : 0.0;
            jac(k, j) = (kron - spikes.d2_hat(k)) / (total * total);
        }
    }
    out.sigma_pi = jac * out.sigma_d2 * jac.transpose();
    out.sigma_pi = 0.5 * (out.sigma_pi + out.sigma_pi.transpose()).eval();
    out.v_pi = out.sigma_pi / static_cast<double>(n_samples);
    return out;
}

CovarianceEstimates covariance_estimates(const DataMatrix& y, const Matrix& eigvecs,
                                         const SpikeSet& spikes, const NoiseModel& noise) {
    CovarianceEstimates cov;
    cov.v_cond = conditional_covariance(spikes, eigvecs, noise);
    cov.gamma_sig = signal_sampling_covariance(y, eigvecs, spikes, noise);
    const double n = static_cast<double>(y.cols());
    const auto tp = spikes.theta_prime.asDiagonal();
    cov.v_star = cov.v_cond + n * Matrix(tp * cov.gamma_sig * tp);
    cov.v_star = 0.5 * (cov.v_star + cov.v_star.transpose()).eval();
    ProfileCovariance prof = profile_covariance(spikes, cov.v_star, noise, y.cols());
    cov.sigma_d2 = std::move(prof.sigma_d2);
    cov.sigma_pi = std::move(prof.sigma_pi);
    cov.v_pi = std::move(prof.v_pi);
    return cov;
}

namespace {

Interval centered_interval(double estimate, double variance, double z) {
    const double half = z * std::sqrt(std::max(0.0, variance));
    return {estimate - half, estimate + half};
}

}  // namespace

IntervalSet confidence_intervals(const SpectralProfile& prof, const Matrix& v_pi,
                                 double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("confidence_intervals: alpha must lie in (0, 1)");
    }
    const double z = normal_quantile(1.0 - alpha / 2.0);
    IntervalSet out;
    out.alpha = alpha;
    for (Index t = 0; t < prof.rank(); ++t) {
        out.pi1.push_back(centered_interval(prof.pi(t), v_pi(t, t), z));
    }
    return out;
}

IntervalSet confidence_intervals(const SpectralProfile& prof1, const Matrix& v_pi1,
                                 const SpectralProfile& prof2, const Matrix& v_pi2,
                                 double alpha) {
    if (prof1.rank() != prof2.rank()) {
        throw InvalidInput("confidence_intervals: profile ranks differ");
    }
    IntervalSet out = confidence_intervals(prof1, v_pi1, alpha);
    const double z = normal_quantile(1.0 - alpha / 2.0);
    const Matrix v_delta = v_pi1 + v_pi2;
    const Vector delta = prof1.pi - prof2.pi;
    for (Index t = 0; t < prof2.rank(); ++t) {
        out.pi2.push_back(centered_interval(prof2.pi(t), v_pi2(t, t), z));
        out.delta_pi.push_back(centered_interval(delta(t), v_delta(t, t), z));
    }
    const double dist = delta.norm();
    if (dist >= 1e-6) {
        const double var = delta.dot(v_delta * delta) / (dist * dist);
        out.nmsd_ci = centered_interval(dist, var, z);
        out.nmsd_valid = true;
    }
    return out;
}

}  // namespace msd
