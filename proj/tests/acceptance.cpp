// Acceptance suite: end-to-end statistical and numerical gates for the
// library, one criterion per function. Each prints a single PASS/FAIL line;
// the process exits nonzero if any requested criterion fails.
//
// Run all:        msd_acceptance
// Run one:        msd_acceptance <1..9>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "msd/alignability.hpp"
#include "msd/distributions.hpp"
#include "msd/kernel_mss.hpp"
#include "msd/rng.hpp"
#include "msd/sim_harness.hpp"

using namespace msd;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Null calibration: size, quantiles against chi2_2, and a KS check.
// ---------------------------------------------------------------------------
Outcome criterion_1() {
    SimConfig cfg;
    cfg.p = 100;
    cfg.n1 = cfg.n2 = 1500;
    cfg.rank = 3;
    cfg.n_rep = 800;
    cfg.master_seed = 20250601;
    const NullCalibrationReport rep = run_null_calibration(cfg);

    const double q_checks[] = {0.10, 0.50, 0.90, 0.99};
    const double q_tols[] = {0.35, 0.35, 0.6, 1.0};
    bool pass = rep.empirical_size >= 0.03 && rep.empirical_size <= 0.07;
    std::string detail = fmt("size %.4f", rep.empirical_size);
    for (int i = 0; i < 4; ++i) {
        const double emp = sample_quantile(rep.t_values, q_checks[i]);
        const double ref = chi2_quantile(q_checks[i], 2);
        detail += fmt(", q%.2f %.3f (ref %.3f)", q_checks[i], emp, ref);
        if (std::abs(emp - ref) > q_tols[i]) pass = false;
    }
    detail += fmt(", KS p %.3f", rep.ks_p_value);
    if (rep.ks_p_value <= 0.01) pass = false;
    return {pass, detail};
}

// ---------------------------------------------------------------------------
// 2. Power sweep: population separations, empirical power, and the
//    noncentral power function at the reference noncentralities.
// ---------------------------------------------------------------------------
Outcome criterion_2() {
    SimConfig cfg;
    cfg.p = 100;
    cfg.n1 = cfg.n2 = 3000;
    cfg.rank = 3;
    cfg.n_rep = 600;
    cfg.master_seed = 20250602;
    const std::vector<double> c_values{1.00, 1.05, 1.10, 1.20, 1.30, 1.50};
    const double want_sep[] = {0.0, 0.01488, 0.02912, 0.05586, 0.08050, 0.12439};
    const double want_power[] = {0.0417, 0.1833, 0.5233, 0.9833, 1.0, 1.0};

    const PowerReport rep = run_power_sweep(cfg, c_values, 50);

    bool pass = true;
    std::string detail;
    for (size_t i = 0; i < c_values.size(); ++i) {
        const PowerRow& row = rep.rows[i];
        if (std::abs(row.delta_pi_norm - want_sep[i]) > 5e-5) pass = false;
        if (std::abs(row.power_empirical - want_power[i]) > 0.06) pass = false;
        detail += fmt("%sc=%.2f sep %.5f pow %.4f (ref %.4f, lam %.2f)",
                      i ? "; " : "", row.c, row.delta_pi_norm, row.power_empirical,
                      want_power[i], row.lambda_theory);
    }

    // Noncentral power function at the reference noncentralities.
    const double lam_ref[] = {1.4371, 5.5051, 20.3010};
    const double pow_ref[] = {0.1725, 0.5453, 0.9864};
    for (int i = 0; i < 3; ++i) {
        if (std::abs(noncentral_chi2_power(lam_ref[i], 2, 0.05) - pow_ref[i]) > 5e-4) {
            pass = false;
            detail += fmt("; ncp(%.4f) off", lam_ref[i]);
        }
    }
    return {pass, detail};
}

// ---------------------------------------------------------------------------
// 3. Potts exactness against exhaustive search.
// ---------------------------------------------------------------------------
double segmentation_objective(const Vector& x, const std::vector<Index>& starts,
                              double beta) {
    double obj = -beta;
    for (size_t s = 0; s < starts.size(); ++s) {
        const Index lo = starts[s];
        const Index hi = (s + 1 < starts.size()) ? starts[s + 1] : x.size();
        double mean = 0.0;
        for (Index i = lo; i < hi; ++i) mean += x(i);
        mean /= static_cast<double>(hi - lo);
        double cost = 0.0;
        for (Index i = lo; i < hi; ++i) cost += (x(i) - mean) * (x(i) - mean);
        obj += beta + cost;
    }
    return obj;
}

Outcome criterion_3() {
    Rng rng(20250603);
    const double betas[] = {0.0, 0.1, 1.0, 10.0, 200.0};
    int checked = 0;
    for (int rep = 0; rep < 500; ++rep) {
        const Index p = 2 + static_cast<Index>(rng.uniform() * 11.0);
        Vector x(p);
        for (Index i = 0; i < p; ++i) {
            x(i) = 4.0 * rng.normal() + (rng.uniform() < 0.35 ? 8.0 : 0.0);
        }
        for (const double beta : betas) {
            const PottsFit fit = potts_segment(x, beta);
            const double dp_obj = segmentation_objective(x, fit.boundaries, beta);

            double best = std::numeric_limits<double>::infinity();
            for (std::uint64_t mask = 0; mask < (1ULL << (p - 1)); ++mask) {
                std::vector<Index> starts{0};
                for (Index i = 0; i + 1 < p; ++i) {
                    if (mask & (1ULL << i)) starts.push_back(i + 1);
                }
                best = std::min(best, segmentation_objective(x, starts, beta));
            }
            if (dp_obj != best) {
                return {false, fmt("mismatch at rep %d beta %.1f: dp %.17g vs brute %.17g",
                                   rep, beta, dp_obj, best)};
            }
            ++checked;
        }
    }
    return {true, fmt("%d vector/penalty combinations, DP == exhaustive optimum", checked)};
}

// ---------------------------------------------------------------------------
// 4. Noise estimation error rate, p and N growing proportionally (the
//    regime of the consistency guarantee; at fixed p the spectral
//    truncation leaves an N-independent bias floor).
// ---------------------------------------------------------------------------
Outcome criterion_4() {
    const Index sizes[] = {1000, 2000, 4000, 8000};
    std::vector<double> log_n, log_err;
    std::string detail;
    for (const Index n : sizes) {
        SimConfig c2;
        c2.p = n / 10;
        c2.n1 = c2.n2 = n;
        const Vector truth = block_noise_vector(c2.p, c2.noise_levels_1);
        double err = 0.0;
        const int reps = 30;
        for (int rep = 0; rep < reps; ++rep) {
            const DataMatrix y = center_columns(
                generate_dataset(c2, 1, Rng::mix(20250604 + n, rep)));
            const NoiseModel model = estimate_noise(y, c2.rank);
            err += (model.sigma - truth).squaredNorm() / static_cast<double>(c2.p);
        }
        err /= reps;
        log_n.push_back(std::log(static_cast<double>(n)));
        log_err.push_back(std::log(err));
        detail += fmt("p=%ld N=%ld err %.3g; ", static_cast<long>(c2.p),
                      static_cast<long>(n), err);
    }
    // Least-squares slope of log err on log N.
    double mx = 0, my = 0;
    for (size_t i = 0; i < log_n.size(); ++i) {
        mx += log_n[i];
        my += log_err[i];
    }
    mx /= log_n.size();
    my /= log_err.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < log_n.size(); ++i) {
        num += (log_n[i] - mx) * (log_err[i] - my);
        den += (log_n[i] - mx) * (log_n[i] - mx);
    }
    const double slope = num / den;
    detail += fmt("slope %.3f (need <= -0.7)", slope);
    return {slope <= -0.7, detail};
}

// ---------------------------------------------------------------------------
// 5. Analytic spike identities.
// ---------------------------------------------------------------------------
Outcome criterion_5() {
    const Index p = 200;
    const Vector ones = Vector::Ones(p);

    if (std::abs(theta(ones, p, 2.0) - 4.0) > 1e-10) {
        return {false, "theta(2) != 4 at aspect ratio 1"};
    }
    if (std::abs(theta_prime(ones, p, 2.0)) > 1e-10) {
        return {false, "theta'(2) != 0 at aspect ratio 1"};
    }

    // Round trips across a heteroskedastic spectrum.
    Rng rng(20250605);
    Vector sigma(6);
    sigma << 0.5, 1.0, 1.5, 2.0, 3.0, 4.0;
    const Index n = 90;
    const double s_star = critical_point(sigma, n);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const double xi = s_star * (1.0005 + 50.0 * rng.uniform());
        const double lambda = theta(sigma, n, xi);
        const double back = theta(sigma, n, invert_theta(sigma, n, lambda));
        worst = std::max(worst, std::abs(back - lambda) / std::max(1.0, lambda));
    }
    if (worst > 1e-10) {
        return {false, fmt("round-trip error %.3g exceeds 1e-10", worst)};
    }

    // Homoskedastic closed form d2 = xi - sigma^2.
    double worst_d2 = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const double s2 = 0.2 + 4.0 * rng.uniform();
        const double xi = s2 + 0.5 + 60.0 * rng.uniform();
        Vector sig = Vector::Constant(30, s2);
        Vector xiv = Vector::Constant(1, xi);
        worst_d2 = std::max(
            worst_d2, std::abs(signal_strengths(xiv, sig)(0) - (xi - s2)));
    }
    if (worst_d2 > 1e-10) {
        return {false, fmt("homoskedastic identity error %.3g exceeds 1e-10", worst_d2)};
    }
    return {true, fmt("theta/theta' exact; worst round trip %.2g; worst d2 identity %.2g",
                      worst, worst_d2)};
}

// ---------------------------------------------------------------------------
// 6. Variance decomposition versus Monte Carlo truth.
// ---------------------------------------------------------------------------
Outcome criterion_6() {
    SimConfig cfg;
    cfg.n1 = cfg.n2 = 1500;
    const int reps = 400;

    std::vector<double> lam1;
    std::vector<Vector> profiles;
    double plug_var_lambda = 0.0;
    Matrix plug_v_pi = Matrix::Zero(3, 3);
    for (int rep = 0; rep < reps; ++rep) {
        const DatasetAnalysis a = analyze_dataset(
            generate_dataset(cfg, 1, Rng::mix(20250606, rep)), cfg.rank);
        lam1.push_back(a.lambda(0));
        profiles.push_back(a.prof.pi);
        plug_var_lambda += a.cov.v_cond(0, 0) / static_cast<double>(cfg.n1) +
                           a.spikes.theta_prime(0) * a.spikes.theta_prime(0) *
                               a.cov.gamma_sig(0, 0);
        plug_v_pi += a.cov.v_pi;
    }
    plug_var_lambda /= reps;
    plug_v_pi /= reps;

    double mean = 0.0;
    for (double v : lam1) mean += v;
    mean /= reps;
    double var = 0.0;
    for (double v : lam1) var += (v - mean) * (v - mean);
    var /= (reps - 1);

    Vector mp = Vector::Zero(3);
    for (const auto& v : profiles) mp += v;
    mp /= reps;
    Matrix cov = Matrix::Zero(3, 3);
    for (const auto& v : profiles) cov += (v - mp) * (v - mp).transpose();
    cov /= (reps - 1);

    const double lam_ratio = plug_var_lambda / var;
    bool pass = lam_ratio >= 0.6 && lam_ratio <= 1.6;
    double worst_lo = 1.0, worst_hi = 1.0;
    for (Index i = 0; i < 3; ++i) {
        for (Index j = 0; j < 3; ++j) {
            const double ratio = plug_v_pi(i, j) / cov(i, j);
            worst_lo = std::min(worst_lo, ratio);
            worst_hi = std::max(worst_hi, ratio);
            if (!(ratio >= 0.6 && ratio <= 1.6)) pass = false;
        }
    }
    return {pass, fmt("Var(lambda1) ratio %.3f; Cov(Pi) entry ratios in [%.3f, %.3f]",
                      lam_ratio, worst_lo, worst_hi)};
}

// ---------------------------------------------------------------------------
// 7. nMSD confidence interval coverage under the c = 1.30 alternative.
// ---------------------------------------------------------------------------
Outcome criterion_7() {
    SimConfig cfg;
    cfg.n1 = cfg.n2 = 3000;
    cfg.d2 = cfg.d1;
    cfg.d2(0) *= std::sqrt(1.30);
    const double truth = population_nmsd(cfg.d1, cfg.d2);

    TestOptions topts;
    topts.with_intervals = true;
    int covered = 0;
    int valid = 0;
    const int reps = 400;
    for (int rep = 0; rep < reps; ++rep) {
        const std::uint64_t seed = Rng::mix(20250607, rep);
        const DataMatrix y1 = generate_dataset(cfg, 1, seed);
        const DataMatrix y2 = generate_dataset(cfg, 2, seed);
        const AlignmentReport rep_out = align_test(y1, y2, cfg.rank, topts);
        if (!rep_out.intervals.nmsd_valid) continue;
        ++valid;
        if (rep_out.intervals.nmsd_ci.lo <= truth && truth <= rep_out.intervals.nmsd_ci.hi) {
            ++covered;
        }
    }
    const double coverage = valid > 0 ? static_cast<double>(covered) / valid : 0.0;
    const bool pass = valid == reps && coverage >= 0.90 && coverage <= 0.98;
    return {pass, fmt("coverage %.4f over %d replicates (target 0.95 in [0.90, 0.98])",
                      coverage, valid)};
}

// ---------------------------------------------------------------------------
// 8. Kernel and covariance routes agree for linear kernels.
// ---------------------------------------------------------------------------
Outcome criterion_8() {
    Rng rng(20250608);
    double worst_eq = 0.0;
    double worst_scale = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const Index p = 20 + static_cast<Index>(rng.uniform() * 21.0);
        const Index n = 80 + static_cast<Index>(rng.uniform() * 121.0);
        const Index r = 1 + static_cast<Index>(rng.uniform() * 4.0);
        const Matrix frame = random_orthonormal(p, r, rng.next_u64());
        Vector axes(r);
        for (Index k = 0; k < r; ++k) axes(k) = 1.0 + 9.0 * rng.uniform();
        std::sort(axes.data(), axes.data() + r, std::greater<double>());
        Matrix latent(r, n);
        for (Index i = 0; i < latent.size(); ++i) latent(i) = rng.normal();
        const DataMatrix x =
            center_columns(frame * axes.asDiagonal() * latent);

        const SpectralProfile from_gram = kernel_profile(linear_gram(x), r);
        const SpectralProfile from_cov =
            profile(sym_eig(sample_covariance(x, false)).eigenvalues.head(r));
        worst_eq = std::max(
            worst_eq, (from_gram.pi - from_cov.pi).cwiseAbs().maxCoeff());

        const Matrix k = linear_gram(x);
        worst_scale = std::max(worst_scale,
                               kernel_nmsd(k, Matrix(3.7 * k), r));
    }
    const bool pass = worst_eq <= 1e-8 && worst_scale <= 1e-12;
    return {pass, fmt("max |kernel - covariance profile| %.2g (<= 1e-8); "
                      "max rescaled self-distance %.2g (<= 1e-12)",
                      worst_eq, worst_scale)};
}

// ---------------------------------------------------------------------------
// 9. Invariance suite: joint scaling, covariance null direction, simplex.
// ---------------------------------------------------------------------------
Outcome criterion_9() {
    Rng master(20250609);
    double worst_profile = 0.0, worst_nmsd = 0.0, worst_null = 0.0, worst_simplex = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        SimConfig cfg;
        cfg.p = 60 + 10 * (rep % 3);
        cfg.n1 = cfg.n2 = 900;
        const std::uint64_t seed = master.next_u64();
        const DataMatrix y1 = center_columns(generate_dataset(cfg, 1, seed));
        const DataMatrix y2 = center_columns(generate_dataset(cfg, 2, seed));

        const NoiseModel noise1 = estimate_noise(y1, cfg.rank);
        const NoiseModel noise2 = estimate_noise(y2, cfg.rank);
        const SpikeSet s1 = estimate_spikes(y1, noise1, cfg.rank);
        const SpikeSet s2 = estimate_spikes(y2, noise2, cfg.rank);
        const SpectralProfile p1 = profile(s1.d2_hat);
        const SpectralProfile p2 = profile(s2.d2_hat);

        const double c = 0.5 + 3.0 * master.uniform();
        NoiseModel noise1c = noise1;
        noise1c.sigma *= c * c;
        NoiseModel noise2c = noise2;
        noise2c.sigma *= c * c;
        const SpikeSet s1c = estimate_spikes(DataMatrix(c * y1), noise1c, cfg.rank);
        const SpikeSet s2c = estimate_spikes(DataMatrix(c * y2), noise2c, cfg.rank);
        const SpectralProfile p1c = profile(s1c.d2_hat);
        const SpectralProfile p2c = profile(s2c.d2_hat);

        worst_profile =
            std::max(worst_profile, (p1.pi - p1c.pi).cwiseAbs().maxCoeff());
        worst_nmsd = std::max(worst_nmsd, std::abs(nmsd(p1, p2) - nmsd(p1c, p2c)));
        worst_simplex = std::max(worst_simplex, std::abs(p1.pi.sum() - 1.0));
        worst_simplex = std::max(worst_simplex, std::abs(p2c.pi.sum() - 1.0));

        const EigenSystem es = sym_eig(sample_covariance(y1, false));
        const CovarianceEstimates cov =
            covariance_estimates(y1, es.eigenvectors.leftCols(cfg.rank), s1, noise1);
        const double scale = std::max(1e-300, cov.sigma_pi.cwiseAbs().maxCoeff());
        worst_null = std::max(
            worst_null, (cov.sigma_pi * Vector::Ones(cfg.rank)).cwiseAbs().maxCoeff() /
                            scale);
    }
    const bool pass = worst_profile <= 1e-8 && worst_nmsd <= 1e-8 &&
                      worst_null <= 1e-8 && worst_simplex <= 1e-12;
    return {pass, fmt("scale drift: profile %.2g, nmsd %.2g; Sigma_Pi*1 %.2g; "
                      "simplex %.2g",
                      worst_profile, worst_nmsd, worst_null, worst_simplex)};
}

using CriterionFn = Outcome (*)();

struct Criterion {
    int id;
    const char* name;
    CriterionFn fn;
};

const Criterion kCriteria[] = {
    {1, "null calibration (size, quantiles, KS)", criterion_1},
    {2, "power sweep (separation, empirical power, noncentral power)", criterion_2},
    {3, "Potts dynamic program matches exhaustive search", criterion_3},
    {4, "noise estimation error rate in N", criterion_4},
    {5, "analytic spike identities", criterion_5},
    {6, "variance decomposition vs Monte Carlo", criterion_6},
    {7, "nMSD confidence interval coverage", criterion_7},
    {8, "kernel/linear profile equivalence", criterion_8},
    {9, "invariance suite", criterion_9},
};

}  // namespace

int main(int argc, char** argv) {
    int requested = 0;
    if (argc > 1) {
        requested = std::atoi(argv[1]);
        if (requested < 1 || requested > 9) {
            std::fprintf(stderr, "usage: %s [criterion 1..9]\n", argv[0]);
            return 2;
        }
    }
    int failures = 0;
    for (const Criterion& crit : kCriteria) {
        if (requested != 0 && crit.id != requested) continue;
        const Outcome outcome = crit.fn();
        std::printf("[%s] criterion %d: %s — %s\n", outcome.pass ? "PASS" : "FAIL",
                    crit.id, crit.name, outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
