#include "msd/spike_inference.hpp"

#include <cmath>
#include <string>

#include "msd/errors.hpp"

namespace msd {

namespace {

constexpr int kMaxBisect = 200;

void check_domain(const Vector& sigma, double s, const char* who) {
    if (sigma.size() == 0) throw InvalidInput(std::string(who) + ": empty sigma");
    if (!(s > sigma.maxCoeff() + 1e-12)) {
        throw DomainError(std::string(who) + ": s must lie above the noise spectrum");
    }
}

}  // namespace

double g_fn(const Vector& sigma, double s) {
    check_domain(sigma, s, "g_fn");
    double sum = 0.0;
    for (Index i = 0; i < sigma.size(); ++i) sum += 1.0 / (sigma(i) - s);
    return sum / static_cast<double>(sigma.size());
}

double s2_fn(const Vector& sigma, double s) {
    check_domain(sigma, s, "s2_fn");
    double sum = 0.0;
    for (Index i = 0; i < sigma.size(); ++i) {
        const double d = sigma(i) - s;
        sum += 1.0 / (d * d);
    }
    return sum;
}

double theta(const Vector& sigma, Index n_samples, double s) {
    check_domain(sigma, s, "theta");
    if (n_samples < 1) throw InvalidInput("theta: n_samples must be >= 1");
    double trace = 0.0;
    for (Index i = 0; i < sigma.size(); ++i) {
        trace += s * sigma(i) / (s - sigma(i));
    }
    return s + trace / static_cast<double>(n_samples);
}

double theta_prime(const Vector& sigma, Index n_samples, double s) {
    check_domain(sigma, s, "theta_prime");
    if (n_samples < 1) throw InvalidInput("theta_prime: n_samples must be >= 1");
    double trace = 0.0;
    for (Index i = 0; i < sigma.size(); ++i) {
        const double d = s - sigma(i);
        trace += sigma(i) * sigma(i) / (d * d);
    }
    return 1.0 - trace / static_cast<double>(n_samples);
}

double critical_point(const Vector& sigma, Index n_samples) {
    if (sigma.size() == 0) throw InvalidInput("critical_point: empty sigma");
    const double smax = sigma.maxCoeff();
    const double scale = std::max(1.0, smax);

    // theta' is strictly increasing on (smax, inf), from -inf up to 1.
    const auto dtheta = [&](double s) { return theta_prime(sigma, n_samples, s); };

    double hi = smax + scale;
    for (int it = 0; it < kMaxBisect && dtheta(hi) <= 0.0; ++it) {
        hi = smax + 2.0 * (hi - smax);
    }
    // Walk the lower bracket toward the spectrum edge. When the noise is
    // (numerically) zero theta' stays positive all the way down; the
    // critical point then collapses onto the edge itself.
    const double min_off = 1e-11 * scale;
    double lo_off = 1e-6 * scale;
    while (dtheta(smax + lo_off) >= 0.0) {
        lo_off *= 0.25;
        if (lo_off <= min_off) return smax + min_off;
    }
    double lo = smax + lo_off;
    for (int it = 0; it < kMaxBisect; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (dtheta(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double invert_theta(const Vector& sigma, Index n_samples, double lambda_j) {
    const double s_star = critical_point(sigma, n_samples);
    const double theta_min = theta(sigma, n_samples, s_star);
    const double tol = 1e-8 * std::max(1.0, lambda_j);
    if (lambda_j <= theta_min + tol) {
        throw SubcriticalSpike("invert_theta: eigenvalue at or below the detectability edge");
    }

    // Expand a bracket [s_star, hi] with theta(hi) >= lambda_j, then bisect.
    double hi = s_star + std::max(1.0, s_star);
    while (theta(sigma, n_samples, hi) < lambda_j) {
        hi = s_star + 2.0 * (hi - s_star);
        if (hi - s_star > 1e12) {
            throw BracketFailure("invert_theta: no bracket below s = 1e12");
        }
    }
    double lo = s_star;
    const double target_tol = 1e-10 * std::max(1.0, lambda_j);
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < kMaxBisect; ++it) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval exhausted at double precision
        const double val = theta(sigma, n_samples, mid);
        if (std::abs(val - lambda_j) <= target_tol) return mid;
        if (val < lambda_j) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (std::abs(theta(sigma, n_samples, mid) - lambda_j) > target_tol) {
        throw NumericalFailure("invert_theta: bisection failed to reach tolerance");
    }
    return mid;
}

Vector signal_strengths(const Vector& xi_hat, const Vector& sigma) {
    Vector d2(xi_hat.size());
    for (Index j = 0; j < xi_hat.size(); ++j) {
        d2(j) = -1.0 / g_fn(sigma, xi_hat(j));
    }
    return d2;
}

SpectralProfile profile(const Vector& d2_hat) {
    if (d2_hat.size() == 0) throw InvalidInput("profile: empty strengths");
    if ((d2_hat.array() <= 0.0).any()) {
        throw InvalidInput("profile: strengths must all be positive");
    }
    SpectralProfile out;
    out.pi = d2_hat / d2_hat.sum();
    return out;
}

double nmsd(const SpectralProfile& a, const SpectralProfile& b) {
    if (a.rank() != b.rank()) throw InvalidInput("nmsd: profile ranks differ");
    return (a.pi - b.pi).norm();
}

SpikeSet spikes_from_eigenvalues(const Vector& lambda_top, const NoiseModel& noise,
                                 Index n_samples) {
    const Index r = lambda_top.size();
    if (r < 1) throw InvalidInput("spikes_from_eigenvalues: need r >= 1");
    SpikeSet spikes;
    spikes.rank = r;
    spikes.lambda = lambda_top;
    spikes.xi_hat.resize(r);
    spikes.theta_prime.resize(r);
    spikes.d2_hat.resize(r);
    for (Index j = 0; j < r; ++j) {
        try {
            spikes.xi_hat(j) = invert_theta(noise.sigma, n_samples, lambda_top(j));
        } catch (const SubcriticalSpike&) {
            throw SubcriticalSpike(
                "spike " + std::to_string(j + 1) + " (lambda = " +
                    std::to_string(lambda_top(j)) + ") is at or below the detectability edge",
                static_cast<int>(j + 1));
        }
        spikes.theta_prime(j) = theta_prime(noise.sigma, n_samples, spikes.xi_hat(j));
        spikes.d2_hat(j) = -1.0 / g_fn(noise.sigma, spikes.xi_hat(j));
    }
    return spikes;
}

SpikeSet estimate_spikes(const DataMatrix& y, const NoiseModel& noise, Index rank) {
    if (rank < 1 || rank >= y.rows()) {
        throw InvalidInput("estimate_spikes: need 1 <= rank < p");
    }
    const Matrix q = sample_covariance(y, false);
    const EigenSystem es = sym_eig(q);
    return spikes_from_eigenvalues(es.eigenvalues.head(rank), noise, y.cols());
}

}  // namespace msd
