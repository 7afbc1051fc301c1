#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "msd/alignability.hpp"
#include "msd/cli.hpp"
#include "msd/errors.hpp"
#include "msd/io.hpp"
#include "msd/kernel_mss.hpp"
#include "msd/rng.hpp"
#include "msd/sim_harness.hpp"

using namespace msd;
using nlohmann::json;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    json j;
    in >> j;
    return j;
}

}  // namespace

TEST_CASE("load_matrix parses rectangular CSVs") {
    const auto path = temp_file("msd_test_basic.csv");
    write_text(path, "1,2,3\n4,5,6\n");
    const DataMatrix m = load_matrix(path.string());
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(1, 2) == 6.0);

    const DataMatrix t = load_matrix(path.string(), false, true);
    CHECK(t.rows() == 3);
    CHECK(t.cols() == 2);
    CHECK(t(2, 1) == 6.0);

    const auto with_header = temp_file("msd_test_header.csv");
    write_text(with_header, "a,b,c\n1,2,3\n4,5,6\n");
    const DataMatrix h = load_matrix(with_header.string(), true);
    CHECK(h.rows() == 2);
    CHECK(h(0, 0) == 1.0);
}

TEST_CASE("load_matrix reports malformed input positions") {
    const auto ragged = temp_file("msd_test_ragged.csv");
    write_text(ragged, "1,2\n3\n");
    try {
        load_matrix(ragged.string());
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }

    const auto alpha = temp_file("msd_test_alpha.csv");
    write_text(alpha, "1,2\n3,x\n");
    try {
        load_matrix(alpha.string());
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK(e.column == 2);
    }

    const auto nan_file = temp_file("msd_test_nan.csv");
    write_text(nan_file, "1,2\nnan,4\n");
    CHECK_THROWS_AS(load_matrix(nan_file.string()), ParseError);

    CHECK_THROWS_AS(load_matrix("/nonexistent/definitely_missing.csv"), InvalidInput);
}

TEST_CASE("save_matrix round trip is exact") {
    SimConfig cfg;
    cfg.p = 20;
    cfg.n1 = cfg.n2 = 60;
    const DataMatrix y = generate_dataset(cfg, 1, 8);
    const auto path = temp_file("msd_test_roundtrip.csv");
    save_matrix(y, path.string());
    const DataMatrix back = load_matrix(path.string());
    CHECK((y - back).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("round-tripped data yields identical analysis") {
    SimConfig cfg;
    cfg.p = 40;
    cfg.n1 = cfg.n2 = 400;
    const DataMatrix y1 = generate_dataset(cfg, 1, 19);
    const DataMatrix y2 = generate_dataset(cfg, 2, 19);
    const auto p1 = temp_file("msd_test_rt1.csv");
    const auto p2 = temp_file("msd_test_rt2.csv");
    save_matrix(y1, p1.string());
    save_matrix(y2, p2.string());
    const AlignmentReport direct = align_test(y1, y2, cfg.rank);
    const AlignmentReport loaded =
        align_test(load_matrix(p1.string()), load_matrix(p2.string()), cfg.rank);
    CHECK(direct.t_stat == loaded.t_stat);
    CHECK(direct.p_value == loaded.p_value);
    CHECK(direct.nmsd_hat == loaded.nmsd_hat);
}

TEST_CASE("cli test subcommand emits the expected schema") {
    SimConfig cfg;
    cfg.p = 60;
    cfg.n1 = cfg.n2 = 800;
    const auto p1 = temp_file("msd_cli_a.csv");
    const auto p2 = temp_file("msd_cli_b.csv");
    save_matrix(generate_dataset(cfg, 1, 5), p1.string());
    save_matrix(generate_dataset(cfg, 2, 5), p2.string());
    const auto out = temp_file("msd_cli_report.json");

    const int code = run_cli({"test", "--rank", "3", "--ci", "--out", out.string(),
                              p1.string(), p2.string()});
    CHECK(code == 0);
    const json report = read_json(out);
    CHECK(report["tool_version"] == "0.1.0");
    CHECK(report["command"] == "test");
    CHECK(report["results"]["df"] == 2);
    CHECK(report["results"]["t_stat"].is_number());
    CHECK(report["results"]["p_value"].is_number());
    const double p_value = report["results"]["p_value"];
    CHECK(p_value >= 0.0);
    CHECK(p_value <= 1.0);
    CHECK(report["results"]["pi1"].size() == 3);
    CHECK(report["results"]["intervals"]["delta_pi"].size() == 3);
    CHECK(report["config_echo"]["rank"] == 3);
    CHECK(report["config_echo"]["center"] == true);
}

TEST_CASE("cli usage errors exit with code 2") {
    const auto p1 = temp_file("msd_cli_a.csv");
    CHECK(run_cli({"test", p1.string(), p1.string()}) == 2);  // missing --rank
    CHECK(run_cli({"unknown-subcommand"}) == 2);
    CHECK(run_cli({}) == 2);
}

TEST_CASE("cli data errors exit with code 3") {
    CHECK(run_cli({"noise", "--rank", "2", "/nonexistent/file.csv"}) == 3);

    const auto ragged = temp_file("msd_cli_ragged.csv");
    write_text(ragged, "1,2\n3\n");
    CHECK(run_cli({"noise", "--rank", "1", ragged.string()}) == 3);
}

TEST_CASE("cli numerical errors exit with code 4") {
    // Pure noise: requested spikes are subcritical.
    Rng rng(100);
    DataMatrix noise_only(50, 500);
    for (Index i = 0; i < noise_only.size(); ++i) noise_only(i) = rng.normal();
    const auto path = temp_file("msd_cli_noise_only.csv");
    save_matrix(noise_only, path.string());
    CHECK(run_cli({"profile", "--rank", "3", path.string()}) == 4);
}

TEST_CASE("cli noise subcommand reports the segmentation") {
    SimConfig cfg;
    cfg.p = 60;
    cfg.n1 = cfg.n2 = 900;
    const auto data = temp_file("msd_cli_noise_in.csv");
    save_matrix(generate_dataset(cfg, 1, 23), data.string());
    const auto out = temp_file("msd_cli_noise_out.json");
    CHECK(run_cli({"noise", "--rank", "3", "--out", out.string(), data.string()}) == 0);
    const json report = read_json(out);
    CHECK(report["command"] == "noise");
    CHECK(report["results"]["sigma"].size() == 60);
    CHECK(report["results"]["penalty_beta"].is_number());
    CHECK(report["results"]["boundaries"][0] == 0);
}

TEST_CASE("cli kernel subcommand runs on raw and precomputed input") {
    SimConfig cfg;
    cfg.p = 30;
    cfg.n1 = cfg.n2 = 120;
    const auto p1 = temp_file("msd_cli_k1.csv");
    const auto p2 = temp_file("msd_cli_k2.csv");
    const DataMatrix x1 = generate_dataset(cfg, 1, 3);
    const DataMatrix x2 = generate_dataset(cfg, 2, 3);
    save_matrix(x1, p1.string());
    save_matrix(x2, p2.string());
    const auto out = temp_file("msd_cli_kernel_out.json");
    CHECK(run_cli({"kernel", "--rank", "3", "--out", out.string(), p1.string(),
                   p2.string()}) == 0);
    const json report = read_json(out);
    CHECK(report["results"]["nmsd"].is_number());
    CHECK(report["results"]["pi1"].size() == 3);

    // Precomputed Gram path matches the raw path.
    const auto g1 = temp_file("msd_cli_g1.csv");
    const auto g2 = temp_file("msd_cli_g2.csv");
    save_matrix(linear_gram(center_columns(x1)), g1.string());
    save_matrix(linear_gram(center_columns(x2)), g2.string());
    const auto out2 = temp_file("msd_cli_kernel_out2.json");
    CHECK(run_cli({"kernel", "--rank", "3", "--gram", "--out", out2.string(),
                   g1.string(), g2.string()}) == 0);
    const json report2 = read_json(out2);
    CHECK(double(report2["results"]["nmsd"]) ==
          doctest::Approx(double(report["results"]["nmsd"])).epsilon(1e-12));
}

TEST_CASE("cli simulate emits csv tables") {
    const auto out = temp_file("msd_cli_sim.csv");
    const int code =
        run_cli({"simulate", "--experiment", "null", "--p", "60", "--n1", "700", "--n2",
                 "700", "--reps", "10", "--seed", "9", "--format", "csv", "--out",
                 out.string()});
    CHECK(code == 0);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header.find("q") != std::string::npos);
    CHECK(header.find("empirical") != std::string::npos);
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) ++lines;
    }
    CHECK(lines == 7);
}

TEST_CASE("cli simulate accepts a key=value config file") {
    const auto conf = temp_file("msd_cli_sim.conf");
    write_text(conf, "p=60\nn1=650\nn2=650\nreps=6\nseed=17\nexperiment=null\n");
    const auto out = temp_file("msd_cli_sim_conf.json");
    CHECK(run_cli({"simulate", "--config", conf.string(), "--out", out.string()}) == 0);
    const json report = read_json(out);
    CHECK(report["config_echo"]["p"] == 60);
    CHECK(report["config_echo"]["reps"] == 6);
    CHECK(report["config_echo"]["seed"] == 17);
    CHECK(report["results"]["n_rep"] == 6);
}

TEST_CASE("kernel gram needs square input") {
    const auto bad = temp_file("msd_cli_bad_gram.csv");
    write_text(bad, "1,2,3\n4,5,6\n");
    CHECK(run_cli({"kernel", "--rank", "1", "--gram", bad.string(), bad.string()}) == 3);
}
