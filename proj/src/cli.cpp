#include "msd/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "msd/alignability.hpp"
#include "msd/errors.hpp"
#include "msd/io.hpp"
#include "msd/kernel_mss.hpp"
#include "msd/report.hpp"
#include "msd/sim_harness.hpp"

namespace msd {

namespace {

using nlohmann::json;

json to_json(const Vector& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        rows.push_back(to_json(Vector(m.row(i))));
    }
    return rows;
}

json to_json(const Interval& iv) { return json{{"lo", iv.lo}, {"hi", iv.hi}}; }

json to_json(const std::vector<Interval>& ivs) {
    json arr = json::array();
    for (const auto& iv : ivs) arr.push_back(to_json(iv));
    return arr;
}

json intervals_to_json(const IntervalSet& set) {
    json j;
    j["alpha"] = set.alpha;
    j["pi1"] = to_json(set.pi1);
    if (!set.pi2.empty()) j["pi2"] = to_json(set.pi2);
    if (!set.delta_pi.empty()) j["delta_pi"] = to_json(set.delta_pi);
    if (set.nmsd_valid) {
        j["nmsd"] = to_json(set.nmsd_ci);
    } else {
        j["nmsd"] = nullptr;
    }
    return j;
}

json noise_to_json(const NoiseModel& noise) {
    json j;
    j["sigma"] = to_json(noise.sigma);
    j["boundaries"] = noise.boundaries;
    j["kappa3"] = noise.kappa3;
    j["kappa4"] = noise.kappa4;
    j["penalty_beta"] = noise.penalty_beta;
    json segments = json::array();
    for (size_t s = 0; s < noise.boundaries.size(); ++s) {
        const Index start = noise.boundaries[s];
        segments.push_back(json{{"start", start}, {"value", noise.sigma(start)}});
    }
    j["segments"] = segments;
    return j;
}

json analysis_to_json(const DatasetAnalysis& a) {
    json j;
    j["p"] = a.noise.sigma.size();
    j["n_samples"] = a.n_samples;
    j["lambda"] = to_json(a.spikes.lambda);
    j["xi_hat"] = to_json(a.spikes.xi_hat);
    j["theta_prime"] = to_json(a.spikes.theta_prime);
    j["d2_hat"] = to_json(a.spikes.d2_hat);
    j["pi"] = to_json(a.prof.pi);
    return j;
}

struct CommonOpts {
    Index rank = 0;
    double penalty_c = 10.0;
    double alpha = 0.05;
    bool center = true;
    bool with_ci = false;
    bool has_header = false;
    bool transpose = false;
    std::string out_path;
    std::string format = "json";
};

void add_io_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--out", opts.out_path, "Write the report here instead of stdout");
    cmd->add_option("--format", opts.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_flag("--header", opts.has_header, "Input CSVs carry a header row");
    cmd->add_flag("--transpose", opts.transpose,
                  "Input CSVs are samples x features; transpose on load");
}

void add_model_flags(CLI::App* cmd, CommonOpts& opts, bool rank_required) {
    auto* rank = cmd->add_option("--rank", opts.rank, "Working rank r");
    if (rank_required) rank->required();
    cmd->add_option("--penalty-c", opts.penalty_c,
                    "Potts penalty multiplier, beta = c log(p)/N")
        ->capture_default_str();
    cmd->add_option("--alpha", opts.alpha, "Significance / CI level")
        ->capture_default_str();
    cmd->add_flag("--center,!--no-center", opts.center,
                  "Remove per-feature sample means (default on)");
}

void emit(const ReportEnvelope& report, const CommonOpts& opts) {
    const std::string text =
        opts.format == "csv" ? report_to_csv(report) : report.to_json().dump(2) + "\n";
    if (opts.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opts.out_path);
        if (!out) throw InvalidInput("cannot open file for writing: " + opts.out_path);
        out << text;
    }
}

json echo_common(const CommonOpts& opts) {
    return json{{"rank", opts.rank},         {"penalty_c", opts.penalty_c},
                {"alpha", opts.alpha},       {"center", opts.center},
                {"ci", opts.with_ci},        {"header", opts.has_header},
                {"transpose", opts.transpose}, {"format", opts.format}};
}

// Plain key=value config file for `simulate`. Lines starting with '#' and
// blank lines are skipped; command-line flags take precedence.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file: " + path);
    std::map<std::string, std::string> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config line " + std::to_string(line_no) +
                                 " is not key=value: " + line,
                             line_no);
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return entries;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    return values;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Spectral-profile inference and alignability testing for noisy "
                 "high-dimensional datasets"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    // --- noise ---
    CommonOpts noise_opts;
    std::string noise_file;
    auto* noise_cmd = app.add_subcommand(
        "noise", "Estimate the piecewise-constant per-feature noise variances");
    noise_cmd->add_option("input", noise_file, "CSV matrix (features x samples)")
        ->required();
    add_model_flags(noise_cmd, noise_opts, true);
    add_io_flags(noise_cmd, noise_opts);

    // --- profile ---
    CommonOpts prof_opts;
    std::string prof_file;
    auto* prof_cmd = app.add_subcommand(
        "profile", "Estimate the debiased spectral profile of one dataset");
    prof_cmd->add_option("input", prof_file, "CSV matrix (features x samples)")
        ->required();
    add_model_flags(prof_cmd, prof_opts, true);
    prof_cmd->add_flag("--ci", prof_opts.with_ci, "Attach confidence intervals");
    add_io_flags(prof_cmd, prof_opts);

    // --- distance ---
    CommonOpts dist_opts;
    std::string dist_file1, dist_file2;
    auto* dist_cmd =
        app.add_subcommand("distance", "Estimate the nMSD between two datasets");
    dist_cmd->add_option("input1", dist_file1, "first CSV matrix")->required();
    dist_cmd->add_option("input2", dist_file2, "second CSV matrix")->required();
    add_model_flags(dist_cmd, dist_opts, true);
    dist_cmd->add_flag("--ci", dist_opts.with_ci, "Attach confidence intervals");
    add_io_flags(dist_cmd, dist_opts);

    // --- test ---
    CommonOpts test_opts;
    std::string test_file1, test_file2;
    auto* test_cmd =
        app.add_subcommand("test", "Two-sample manifold alignability test");
    test_cmd->add_option("input1", test_file1, "first CSV matrix")->required();
    test_cmd->add_option("input2", test_file2, "second CSV matrix")->required();
    add_model_flags(test_cmd, test_opts, true);
    test_cmd->add_flag("--ci", test_opts.with_ci, "Attach confidence intervals");
    add_io_flags(test_cmd, test_opts);

    // --- kernel ---
    CommonOpts kern_opts;
    std::string kern_file1, kern_file2;
    std::string kernel_name = "linear";
    double bandwidth = 1.0;
    bool precomputed_gram = false;
    auto* kern_cmd = app.add_subcommand(
        "kernel", "Kernelized spectral profiles and distance");
    kern_cmd->add_option("input1", kern_file1, "first CSV matrix")->required();
    kern_cmd->add_option("input2", kern_file2, "second CSV matrix")->required();
    add_model_flags(kern_cmd, kern_opts, true);
    kern_cmd->add_option("--kernel", kernel_name, "Kernel for raw inputs")
        ->check(CLI::IsMember({"linear", "rbf"}))
        ->capture_default_str();
    kern_cmd->add_option("--bandwidth", bandwidth, "RBF bandwidth")
        ->capture_default_str();
    kern_cmd->add_flag("--gram", precomputed_gram,
                       "Inputs are precomputed N x N Gram matrices");
    add_io_flags(kern_cmd, kern_opts);

    // --- simulate ---
    CommonOpts sim_opts;
    SimConfig sim_cfg;
    std::string experiment = "null";
    std::vector<double> d1_axes{7.0, 6.0, 5.0};
    std::vector<double> d2_axes;
    std::vector<double> noise1{3.0, 4.0, 5.0, 6.0};
    std::vector<double> noise2{2.5, 3.0, 6.0, 4.5};
    std::vector<double> c_values{1.00, 1.05, 1.10, 1.20, 1.30, 1.50};
    int n_pilot = 50;
    auto* sim_cmd = app.add_subcommand(
        "simulate", "Monte Carlo calibration and power studies");
    sim_cmd->add_option("--experiment", experiment, "Which experiment to run")
        ->check(CLI::IsMember({"null", "power"}))
        ->capture_default_str();
    sim_cmd->add_option("--p", sim_cfg.p, "feature count")->capture_default_str();
    sim_cmd->add_option("--n1", sim_cfg.n1, "sample size, dataset 1")
        ->capture_default_str();
    sim_cmd->add_option("--n2", sim_cfg.n2, "sample size, dataset 2")
        ->capture_default_str();
    sim_cmd->add_option("--rank", sim_cfg.rank, "working rank")->capture_default_str();
    sim_cmd->add_option("--d1", d1_axes, "semi-axes of dataset 1")->delimiter(',');
    sim_cmd->add_option("--d2", d2_axes, "semi-axes of dataset 2 (default: d1)")
        ->delimiter(',');
    sim_cmd->add_option("--noise1", noise1, "four block noise variances, dataset 1")
        ->delimiter(',');
    sim_cmd->add_option("--noise2", noise2, "four block noise variances, dataset 2")
        ->delimiter(',');
    sim_cmd->add_option("--penalty-c", sim_cfg.penalty_c, "Potts penalty multiplier")
        ->capture_default_str();
    sim_cmd->add_option("--alpha", sim_cfg.alpha, "test level")->capture_default_str();
    sim_cmd->add_option("--reps", sim_cfg.n_rep, "Monte Carlo replicates")
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim_cfg.master_seed, "master seed")
        ->capture_default_str();
    sim_cmd->add_option("--c-values", c_values, "anisotropy factors for the power sweep")
        ->delimiter(',');
    sim_cmd->add_option("--pilot", n_pilot, "pilot replicates for the theory column")
        ->capture_default_str();
    std::string sim_config_path;
    sim_cmd->add_option("--config", sim_config_path,
                        "key=value config file; explicit flags win");
    sim_cmd->add_option("--out", sim_opts.out_path, "Write the report here");
    sim_cmd->add_option("--format", sim_opts.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (noise_cmd->parsed()) {
            const DataMatrix y =
                load_matrix(noise_file, noise_opts.has_header, noise_opts.transpose);
            const DataMatrix yc = noise_opts.center ? center_columns(y) : y;
            const NoiseModel noise =
                estimate_noise(yc, noise_opts.rank, noise_opts.penalty_c);
            ReportEnvelope report;
            report.command = "noise";
            report.config_echo = echo_common(noise_opts);
            report.config_echo["input"] = noise_file;
            report.results = noise_to_json(noise);
            emit(report, noise_opts);
        } else if (prof_cmd->parsed()) {
            const DataMatrix y =
                load_matrix(prof_file, prof_opts.has_header, prof_opts.transpose);
            const AnalysisOptions aopts{prof_opts.penalty_c, prof_opts.center};
            const DatasetAnalysis a = analyze_dataset(y, prof_opts.rank, aopts);
            ReportEnvelope report;
            report.command = "profile";
            report.config_echo = echo_common(prof_opts);
            report.config_echo["input"] = prof_file;
            report.results = analysis_to_json(a);
            report.results["noise"] = noise_to_json(a.noise);
            if (prof_opts.with_ci) {
                report.results["v_pi"] = to_json(a.cov.v_pi);
                report.results["intervals"] = intervals_to_json(
                    confidence_intervals(a.prof, a.cov.v_pi, prof_opts.alpha));
            }
            emit(report, prof_opts);
        } else if (dist_cmd->parsed() || test_cmd->parsed()) {
            const bool is_test = test_cmd->parsed();
            const CommonOpts& opts = is_test ? test_opts : dist_opts;
            const std::string& file1 = is_test ? test_file1 : dist_file1;
            const std::string& file2 = is_test ? test_file2 : dist_file2;
            const DataMatrix y1 = load_matrix(file1, opts.has_header, opts.transpose);
            const DataMatrix y2 = load_matrix(file2, opts.has_header, opts.transpose);
            TestOptions topts;
            topts.penalty_c = opts.penalty_c;
            topts.alpha = opts.alpha;
            topts.center = opts.center;
            topts.with_intervals = opts.with_ci;
            const AlignmentReport rep = align_test(y1, y2, opts.rank, topts);

            ReportEnvelope report;
            report.command = is_test ? "test" : "distance";
            report.config_echo = echo_common(opts);
            report.config_echo["input1"] = file1;
            report.config_echo["input2"] = file2;
            report.results["pi1"] = to_json(rep.pi1.pi);
            report.results["pi2"] = to_json(rep.pi2.pi);
            report.results["delta_pi"] = to_json(rep.delta_pi);
            report.results["nmsd"] = rep.nmsd_hat;
            report.results["n_eff"] = rep.n_eff;
            if (is_test) {
                report.results["t_stat"] = rep.t_stat;
                report.results["df"] = rep.df;
                report.results["p_value"] = rep.p_value;
            }
            if (opts.with_ci) {
                report.results["intervals"] = intervals_to_json(rep.intervals);
            }
            report.warnings = rep.warnings;
            emit(report, opts);
        } else if (kern_cmd->parsed()) {
            const DataMatrix x1 =
                load_matrix(kern_file1, kern_opts.has_header, kern_opts.transpose);
            const DataMatrix x2 =
                load_matrix(kern_file2, kern_opts.has_header, kern_opts.transpose);
            Matrix k1, k2;
            if (precomputed_gram) {
                k1 = x1;
                k2 = x2;
            } else if (kernel_name == "rbf") {
                k1 = rbf_gram(x1, bandwidth);
                k2 = rbf_gram(x2, bandwidth);
            } else {
                k1 = linear_gram(kern_opts.center ? center_columns(x1) : x1);
                k2 = linear_gram(kern_opts.center ? center_columns(x2) : x2);
            }
            ReportEnvelope report;
            report.command = "kernel";
            report.config_echo = echo_common(kern_opts);
            report.config_echo["input1"] = kern_file1;
            report.config_echo["input2"] = kern_file2;
            report.config_echo["kernel"] = precomputed_gram ? "precomputed" : kernel_name;
            if (kernel_name == "rbf" && !precomputed_gram) {
                report.config_echo["bandwidth"] = bandwidth;
            }
            const SpectralProfile p1 = kernel_profile(k1, kern_opts.rank, &report.warnings);
            const SpectralProfile p2 = kernel_profile(k2, kern_opts.rank, &report.warnings);
            report.results["pi1"] = to_json(p1.pi);
            report.results["pi2"] = to_json(p2.pi);
            report.results["nmsd"] = nmsd(p1, p2);
            emit(report, kern_opts);
        } else if (sim_cmd->parsed()) {
            if (!sim_config_path.empty()) {
                const auto entries = read_config_file(sim_config_path);
                const auto given = [&](const std::string& flag) {
                    const CLI::Option* opt = sim_cmd->get_option_no_throw(flag);
                    return opt != nullptr && opt->count() > 0;
                };
                for (const auto& [raw_key, value] : entries) {
                    std::string key = raw_key;
                    std::replace(key.begin(), key.end(), '-', '_');
                    std::string dashed = raw_key;
                    std::replace(dashed.begin(), dashed.end(), '_', '-');
                    if (given("--" + raw_key) || given("--" + dashed)) {
                        continue;  // explicit flag wins
                    }
                    if (key == "experiment") {
                        experiment = value;
                    } else if (key == "p") {
                        sim_cfg.p = std::stol(value);
                    } else if (key == "n1") {
                        sim_cfg.n1 = std::stol(value);
                    } else if (key == "n2") {
                        sim_cfg.n2 = std::stol(value);
                    } else if (key == "rank") {
                        sim_cfg.rank = std::stol(value);
                    } else if (key == "d1") {
                        d1_axes = parse_double_list(value);
                    } else if (key == "d2") {
                        d2_axes = parse_double_list(value);
                    } else if (key == "noise1") {
                        noise1 = parse_double_list(value);
                    } else if (key == "noise2") {
                        noise2 = parse_double_list(value);
                    } else if (key == "penalty_c") {
                        sim_cfg.penalty_c = std::stod(value);
                    } else if (key == "alpha") {
                        sim_cfg.alpha = std::stod(value);
                    } else if (key == "reps") {
                        sim_cfg.n_rep = std::stoi(value);
                    } else if (key == "seed") {
                        sim_cfg.master_seed = std::stoull(value);
                    } else if (key == "c_values") {
                        c_values = parse_double_list(value);
                    } else if (key == "pilot") {
                        n_pilot = std::stoi(value);
                    } else {
                        throw InvalidInput("unknown config key: " + raw_key);
                    }
                }
            }
            sim_cfg.d1 = Eigen::Map<const Vector>(d1_axes.data(),
                                                  static_cast<Index>(d1_axes.size()));
            if (d2_axes.empty()) d2_axes = d1_axes;
            sim_cfg.d2 = Eigen::Map<const Vector>(d2_axes.data(),
                                                  static_cast<Index>(d2_axes.size()));
            sim_cfg.noise_levels_1 =
                Eigen::Map<const Vector>(noise1.data(), static_cast<Index>(noise1.size()));
            sim_cfg.noise_levels_2 =
                Eigen::Map<const Vector>(noise2.data(), static_cast<Index>(noise2.size()));

            ReportEnvelope report;
            report.command = "simulate";
            report.config_echo = json{{"experiment", experiment},
                                      {"p", sim_cfg.p},
                                      {"n1", sim_cfg.n1},
                                      {"n2", sim_cfg.n2},
                                      {"rank", sim_cfg.rank},
                                      {"d1", d1_axes},
                                      {"d2", d2_axes},
                                      {"noise1", noise1},
                                      {"noise2", noise2},
                                      {"penalty_c", sim_cfg.penalty_c},
                                      {"alpha", sim_cfg.alpha},
                                      {"reps", sim_cfg.n_rep},
                                      {"seed", sim_cfg.master_seed},
                                      {"format", sim_opts.format}};
            if (experiment == "null") {
                const NullCalibrationReport rep = run_null_calibration(sim_cfg);
                report.results["n_rep"] = rep.n_rep;
                report.results["empirical_size"] = rep.empirical_size;
                report.results["ks_stat"] = rep.ks_stat;
                report.results["ks_p_value"] = rep.ks_p_value;
                json rows = json::array();
                for (size_t i = 0; i < rep.q_levels.size(); ++i) {
                    rows.push_back(json{{"q", rep.q_levels[i]},
                                        {"empirical", rep.empirical_quantiles[i]},
                                        {"chi2", rep.chi2_quantiles[i]}});
                }
                report.results["rows"] = rows;
            } else {
                report.config_echo["c_values"] = c_values;
                report.config_echo["pilot"] = n_pilot;
                const PowerReport rep = run_power_sweep(sim_cfg, c_values, n_pilot);
                report.results["n_rep"] = rep.n_rep;
                report.results["n_pilot"] = rep.n_pilot;
                json rows = json::array();
                for (const PowerRow& row : rep.rows) {
                    rows.push_back(json{{"c", row.c},
                                        {"delta_pi_norm", row.delta_pi_norm},
                                        {"lambda_theory", row.lambda_theory},
                                        {"power_theory", row.power_theory},
                                        {"power_empirical", row.power_empirical}});
                }
                report.results["rows"] = rows;
            }
            emit(report, sim_opts);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace msd
