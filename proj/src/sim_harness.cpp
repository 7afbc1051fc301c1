#include "msd/sim_harness.hpp"

#include <algorithm>
#include <cmath>

#include "msd/distributions.hpp"
#include "msd/errors.hpp"
#include "msd/rng.hpp"

namespace msd {

namespace {

// Stream ids for the per-trial seed tree.
constexpr std::uint64_t kFrameStream = 0x0f;
constexpr std::uint64_t kLatentStream = 0x100;
constexpr std::uint64_t kNoiseStream = 0x200;

void validate(const SimConfig& cfg) {
    if (cfg.p < 2 || cfg.n1 < 2 || cfg.n2 < 2) {
        throw InvalidInput("sim config: p and sample sizes must be >= 2");
    }
    if (cfg.rank < 1 || cfg.rank > cfg.p) {
        throw InvalidInput("sim config: need 1 <= rank <= p");
    }
    if (cfg.d1.size() != cfg.rank || cfg.d2.size() != cfg.rank) {
        throw InvalidInput("sim config: semi-axis vectors must have length rank");
    }
    if (cfg.noise_levels_1.size() != 4 || cfg.noise_levels_2.size() != 4) {
        throw InvalidInput("sim config: noise level vectors must have length 4");
    }
    if ((cfg.d1.array() <= 0).any() || (cfg.d2.array() <= 0).any() ||
        (cfg.noise_levels_1.array() <= 0).any() ||
        (cfg.noise_levels_2.array() <= 0).any()) {
        throw InvalidInput("sim config: semi-axes and noise levels must be positive");
    }
}

}  // namespace

Vector block_noise_vector(Index p, const Vector& levels) {
    if (levels.size() != 4) throw InvalidInput("block_noise_vector: need 4 levels");
    if (p < 4) throw InvalidInput("block_noise_vector: need p >= 4");
    const Index b1 = p / 3;
    const Index b2 = p / 6;
    const Index b3 = p / 6;
    const Index b4 = p - b1 - b2 - b3;
    Vector sigma(p);
    sigma.segment(0, b1).setConstant(levels(0));
    sigma.segment(b1, b2).setConstant(levels(1));
    sigma.segment(b1 + b2, b3).setConstant(levels(2));
    sigma.segment(b1 + b2 + b3, b4).setConstant(levels(3));
    return sigma;
}

SpectralProfile population_profile(const Vector& semi_axes) {
    return profile(semi_axes.cwiseAbs2());
}

double population_nmsd(const Vector& semi_axes_1, const Vector& semi_axes_2) {
    return nmsd(population_profile(semi_axes_1), population_profile(semi_axes_2));
}

DataMatrix generate_dataset(const SimConfig& cfg, int which, std::uint64_t trial_seed) {
    validate(cfg);
    if (which != 1 && which != 2) {
        throw InvalidInput("generate_dataset: which must be 1 or 2");
    }
    const Index p = cfg.p;
    const Index n = which == 1 ? cfg.n1 : cfg.n2;
    const Index r = cfg.rank;
    const Vector& axes = which == 1 ? cfg.d1 : cfg.d2;
    const Vector sigma =
        block_noise_vector(p, which == 1 ? cfg.noise_levels_1 : cfg.noise_levels_2);

    // Both datasets of a trial share the embedding frame.
    const Matrix frame =
        random_orthonormal(p, r, Rng::mix(trial_seed, kFrameStream));

    Rng latent_rng(Rng::mix(trial_seed, kLatentStream + static_cast<std::uint64_t>(which)));
    Matrix latent(r, n);
    for (Index i = 0; i < n; ++i) {
        double norm2 = 0.0;
        do {
            for (Index k = 0; k < r; ++k) latent(k, i) = latent_rng.normal();
            norm2 = latent.col(i).squaredNorm();
        } while (norm2 == 0.0);
        latent.col(i) = axes.cwiseProduct(latent.col(i) / std::sqrt(norm2));
    }

    DataMatrix y = std::sqrt(static_cast<double>(r)) * (frame * latent);

    Rng noise_rng(Rng::mix(trial_seed, kNoiseStream + static_cast<std::uint64_t>(which)));
    const Vector noise_sd = sigma.cwiseSqrt();
    for (Index i = 0; i < n; ++i) {
        for (Index a = 0; a < p; ++a) {
            y(a, i) += noise_sd(a) * noise_rng.normal();
        }
    }
    return y;
}

double sample_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InvalidInput("sample_quantile: empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidInput("sample_quantile: q outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - std::floor(h);
    return values[lo] + frac * (values[hi] - values[lo]);
}

NullCalibrationReport run_null_calibration(const SimConfig& cfg) {
    validate(cfg);
    NullCalibrationReport report;
    report.n_rep = cfg.n_rep;
    report.q_levels = {0.01, 0.10, 0.25, 0.50, 0.75, 0.90, 0.99};
    if (cfg.n_rep <= 0) return report;

    TestOptions topts;
    topts.penalty_c = cfg.penalty_c;
    topts.alpha = cfg.alpha;
    topts.with_intervals = false;

    const int df = static_cast<int>(cfg.rank) - 1;
    const double critical = chi2_quantile(1.0 - cfg.alpha, df);

    report.t_values.resize(static_cast<size_t>(cfg.n_rep));
    int rejections = 0;
    for (int t = 0; t < cfg.n_rep; ++t) {
        const std::uint64_t trial_seed = Rng::mix(cfg.master_seed, static_cast<std::uint64_t>(t) + 1);
        const DataMatrix y1 = generate_dataset(cfg, 1, trial_seed);
        const DataMatrix y2 = generate_dataset(cfg, 2, trial_seed);
        const AlignmentReport rep = align_test(y1, y2, cfg.rank, topts);
        report.t_values[static_cast<size_t>(t)] = rep.t_stat;
        if (rep.t_stat > critical) ++rejections;
    }
    report.empirical_size = static_cast<double>(rejections) / cfg.n_rep;

    for (const double q : report.q_levels) {
        report.empirical_quantiles.push_back(sample_quantile(report.t_values, q));
        report.chi2_quantiles.push_back(chi2_quantile(q, df));
    }

    // One-sample KS against the chi-square reference, with the usual
    // finite-sample scaling for the p-value.
    std::vector<double> sorted = report.t_values;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d_stat = 0.0;
    for (size_t i = 0; i < sorted.size(); ++i) {
        const double cdf = 1.0 - chi2_sf(sorted[i], df);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d_stat = std::max(d_stat, std::max(cdf - lo, hi - cdf));
    }
    report.ks_stat = d_stat;
    const double scaled = d_stat * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
    report.ks_p_value = kolmogorov_sf(scaled);
    return report;
}

PowerReport run_power_sweep(const SimConfig& cfg, const std::vector<double>& c_values,
                            int n_pilot) {
    validate(cfg);
    if (n_pilot < 1) throw InvalidInput("run_power_sweep: need n_pilot >= 1");
    PowerReport report;
    report.n_rep = cfg.n_rep;
    report.n_pilot = n_pilot;

    const int df = static_cast<int>(cfg.rank) - 1;
    const double critical = chi2_quantile(1.0 - cfg.alpha, df);

    TestOptions topts;
    topts.penalty_c = cfg.penalty_c;
    topts.alpha = cfg.alpha;
    topts.with_intervals = false;

    // Pilot at the null: average pooled profile covariance.
    SimConfig null_cfg = cfg;
    null_cfg.d2 = cfg.d1;
    Matrix v_delta_bar = Matrix::Zero(cfg.rank, cfg.rank);
    for (int t = 0; t < n_pilot; ++t) {
        const std::uint64_t trial_seed =
            Rng::mix(Rng::mix(cfg.master_seed, 0x9107u), static_cast<std::uint64_t>(t) + 1);
        const DataMatrix y1 = generate_dataset(null_cfg, 1, trial_seed);
        const DataMatrix y2 = generate_dataset(null_cfg, 2, trial_seed);
        const AnalysisOptions aopts{cfg.penalty_c, true};
        const DatasetAnalysis a1 = analyze_dataset(y1, cfg.rank, aopts);
        const DatasetAnalysis a2 = analyze_dataset(y2, cfg.rank, aopts);
        v_delta_bar += a1.cov.v_pi + a2.cov.v_pi;
    }
    v_delta_bar /= static_cast<double>(n_pilot);
    const Matrix v_delta_pinv = pseudoinverse(v_delta_bar, 1e-10);

    for (size_t ci = 0; ci < c_values.size(); ++ci) {
        const double c = c_values[ci];
        if (c <= 0.0) throw InvalidInput("run_power_sweep: c values must be positive");
        SimConfig alt_cfg = cfg;
        alt_cfg.d2 = cfg.d1;
        alt_cfg.d2(0) *= std::sqrt(c);

        PowerRow row;
        row.c = c;
        row.delta_pi_norm = population_nmsd(alt_cfg.d1, alt_cfg.d2);
        const Vector delta_pop =
            population_profile(alt_cfg.d1).pi - population_profile(alt_cfg.d2).pi;
        row.lambda_theory = delta_pop.dot(v_delta_pinv * delta_pop);
        row.power_theory = noncentral_chi2_power(row.lambda_theory, df, cfg.alpha);

        int rejections = 0;
        for (int t = 0; t < cfg.n_rep; ++t) {
            const std::uint64_t trial_seed = Rng::mix(
                Rng::mix(cfg.master_seed, 0xc000u + static_cast<std::uint64_t>(ci)),
                static_cast<std::uint64_t>(t) + 1);
            const DataMatrix y1 = generate_dataset(alt_cfg, 1, trial_seed);
            const DataMatrix y2 = generate_dataset(alt_cfg, 2, trial_seed);
            const AlignmentReport rep = align_test(y1, y2, cfg.rank, topts);
            if (rep.t_stat > critical) ++rejections;
        }
        row.power_empirical =
            cfg.n_rep > 0 ? static_cast<double>(rejections) / cfg.n_rep : 0.0;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace msd
