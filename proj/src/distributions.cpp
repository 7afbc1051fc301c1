#include "msd/distributions.hpp"

#include <cmath>

#include "msd/errors.hpp"

namespace msd {

namespace {

constexpr double kEps = 1e-15;
constexpr int kMaxIter = 1000;

// Regularized lower incomplete gamma P(a, x) by its power series (x < a + 1).
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction (x >= a + 1).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw InvalidInput("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

}  // namespace

double chi2_sf(double x, int df) {
    if (df < 1) throw InvalidInput("chi2_sf: df must be >= 1");
    if (x < 0.0) throw InvalidInput("chi2_sf: x must be >= 0");
    return gamma_q(0.5 * static_cast<double>(df), 0.5 * x);
}

double chi2_quantile(double q, int df) {
    if (df < 1) throw InvalidInput("chi2_quantile: df must be >= 1");
    if (!(q > 0.0 && q < 1.0)) throw InvalidInput("chi2_quantile: q must lie in (0, 1)");

    double hi = static_cast<double>(df) + 10.0;
    while (1.0 - chi2_sf(hi, df) < q) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (1.0 - chi2_sf(mid, df) < q) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double noncentral_chi2_power(double lambda_nc, int df, double alpha) {
    if (lambda_nc < 0.0) throw InvalidInput("noncentral_chi2_power: lambda must be >= 0");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("noncentral_chi2_power: alpha must lie in (0, 1)");
    }
    const double x_crit = chi2_quantile(1.0 - alpha, df);
    if (lambda_nc == 0.0) return chi2_sf(x_crit, df);

    const double half = 0.5 * lambda_nc;
    const double log_half = std::log(half);
    double power = 0.0;
    double mass = 0.0;
    for (int k = 0; k < 200000; ++k) {
        const double w =
            std::exp(static_cast<double>(k) * log_half - half - std::lgamma(k + 1.0));
        if (w > 0.0) {
            power += w * chi2_sf(x_crit, df + 2 * k);
            mass += w;
        }
        if (static_cast<double>(k) > half && 1.0 - mass < 1e-12) break;
    }
    return power;
}

double kolmogorov_sf(double t) {
    if (t <= 1e-3) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * t * t * static_cast<double>(k) * k);
        sum += sign * term;
        if (term < 1e-14) break;
        sign = -sign;
    }
    return std::max(0.0, std::min(1.0, 2.0 * sum));
}

}  // namespace msd
