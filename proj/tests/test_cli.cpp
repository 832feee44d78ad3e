// test_cli.cpp — Presets, config parsing, subcommand plumbing, and file outputs

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dicke/app.hpp"
#include "dicke/generator.hpp"
#include "dicke/run_config.hpp"

using namespace dicke;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("dicke-cli-test-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("presets carry the measured parameter sets") {
    CHECK(preset_names() == std::vector<std::string>{"n2", "n7", "n10"});

    const RunConfig n2 = preset("n2");
    CHECK(n2.n_emitters == 2);
    CHECK(n2.sigma0_weight == 0.56);
    CHECK(n2.gamma == 2.5);
    CHECK(n2.gamma_d_sigma1 == 270.0);
    CHECK(n2.gamma_d_sigma0 == 27.0);
    CHECK(n2.gamma_isc_sigma1 == 9.4);
    CHECK(n2.gamma_isc_sigma0 == 1.8);
    CHECK(n2.t_max_ns == 100.0);
    CHECK(n2.samples == 2000);

    const RunConfig n7 = preset("n7");
    CHECK(n7.n_emitters == 7);
    CHECK(n7.sigma0_weight == 0.51);
    CHECK(n7.gamma == 4.8);
    CHECK(n7.gamma_d_sigma1 == 260.0);
    CHECK(n7.gamma_d_sigma0 == 20.0);
    CHECK(n7.gamma_isc_sigma1 == 9.4);
    CHECK(n7.gamma_isc_sigma0 == 1.8);

    const RunConfig n10 = preset("n10");
    CHECK(n10.n_emitters == 10);
    CHECK(n10.sigma0_weight == 0.50);
    CHECK(n10.gamma == 3.3);
    CHECK(n10.gamma_d_sigma1 == 420.0);
    CHECK(n10.gamma_d_sigma0 == 39.0);

    CHECK_THROWS_AS(preset("n3"), std::invalid_argument);
    CHECK_THROWS_AS(preset(""), std::invalid_argument);
}

TEST_CASE("manifold parameters convert rates and split the weight") {
    const RunConfig cfg = preset("n7");
    const SpinManifoldParams s0 = cfg.manifold_sigma0();
    const SpinManifoldParams s1 = cfg.manifold_sigma1();
    CHECK(s0.weight == 0.51);
    CHECK(s1.weight == doctest::Approx(0.49).epsilon(1e-15));
    CHECK(s0.gamma == rate_from_two_pi_mhz(4.8));
    CHECK(s1.gamma == s0.gamma);
    CHECK(s0.gamma_d == rate_from_two_pi_mhz(20.0));
    CHECK(s1.gamma_d == rate_from_two_pi_mhz(260.0));
    CHECK(s0.gamma_isc == rate_from_two_pi_mhz(1.8));
    CHECK(s1.gamma_isc == rate_from_two_pi_mhz(9.4));

    const IntegratorConfig integ = cfg.integrator();
    CHECK(integ.t_end_ns == 100.0);
    CHECK(integ.samples == 2000);
    CHECK(integ.rel_tol == 1e-9);
    CHECK(integ.abs_tol == 1e-12);
}

TEST_CASE("config text round-trips every field exactly") {
    RunConfig cfg = preset("n10");
    cfg.t_max_ns = 62.5;
    cfg.samples = 123;
    cfg.rel_tol = 3e-8;
    cfg.abs_tol = 7e-13;
    cfg.sigma0_weight = 0.3125;
    const std::string text = serialize_config(cfg);
    CHECK(parse_config(text) == cfg);

    // Comments and blank lines are tolerated, spacing is free-form.
    const std::string annotated = "# run parameters\n\n" + text + "\n# trailing note\n";
    CHECK(parse_config(annotated) == cfg);
}

TEST_CASE("config parsing rejects malformed input") {
    const std::string base = serialize_config(preset("n2"));
    CHECK_THROWS_AS(parse_config(base + "unknown_key = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(base + "gamma_2pi_mhz = 2.5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("n_emitters = seven\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("n_emitters\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("n_emitters = 0\n"), std::invalid_argument);
}

TEST_CASE("config files load through the same parser") {
    TempDir tmp;
    const fs::path path = tmp.path / "params.cfg";
    {
        std::ofstream out(path);
        out << serialize_config(preset("n7"));
    }
    CHECK(load_config_file(path.string()) == preset("n7"));
    CHECK_THROWS_AS(load_config_file((tmp.path / "absent.cfg").string()),
                    std::invalid_argument);
}

TEST_CASE("run configuration validation") {
    RunConfig cfg = preset("n7");
    CHECK_NOTHROW(validate(cfg));
    cfg.gamma = -1.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = preset("n7");
    cfg.sigma0_weight = 1.25;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = preset("n7");
    cfg.samples = 1;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = preset("n7");
    cfg.t_max_ns = 0.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = preset("n7");
    cfg.n_emitters = 65;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("term selection strings") {
    CHECK(app::parse_term_selection("a") == TermFlags::model_a());
    CHECK(app::parse_term_selection("b") == TermFlags::model_b());
    CHECK(app::parse_term_selection("custom:bbbbbbbbb") == TermFlags::model_b());
    const TermFlags mixed = app::parse_term_selection("custom:aaabaaaaa");
    CHECK(mixed[Term::dephasing_feed_sign]);
    CHECK(!mixed[Term::dephasing_prefactor]);
    CHECK(app::parse_term_selection("aaabaaaaa") == mixed);
    CHECK_THROWS_AS(app::parse_term_selection("custom:"), std::invalid_argument);
    CHECK_THROWS_AS(app::parse_term_selection("model-a"), std::invalid_argument);
}

TEST_CASE("worker cap honors the environment override") {
    ::setenv("DICKE_SIM_THREADS", "3", 1);
    CHECK(app::max_parallel_jobs() == 3);
    ::setenv("DICKE_SIM_THREADS", "100", 1);
    CHECK(app::max_parallel_jobs() == 64);
    ::setenv("DICKE_SIM_THREADS", "0", 1);
    const int fallback = app::max_parallel_jobs();
    CHECK(fallback >= 1);
    CHECK(fallback <= 8);
    ::setenv("DICKE_SIM_THREADS", "not-a-number", 1);
    CHECK(app::max_parallel_jobs() == fallback);
    ::unsetenv("DICKE_SIM_THREADS");
    CHECK(app::max_parallel_jobs() == fallback);
}

TEST_CASE("simulate writes the comparison files and is deterministic") {
    TempDir tmp;
    app::SimulateArgs args;
    args.config = preset("n2");
    args.model = "both";
    args.stem = "n2";
    args.svg = true;

    std::ostringstream out1, err1;
    args.out_dir = (tmp.path / "first").string();
    CHECK(app::simulate(args, out1, err1) == app::exit_ok);
    CHECK(err1.str().empty());
    CHECK(out1.str().find("physical") != std::string::npos);

    const std::string csv = slurp(tmp.path / "first" / "n2.csv");
    CHECK(csv.rfind("time_ns,f_modelA_norm,f_modelB_norm,f_modelA_raw_per_ns,"
                    "f_modelB_raw_per_ns,f_sigma0_B,f_sigma1_B\n", 0) == 0);
    CHECK(csv.find('\r') == std::string::npos);

    const std::string svg = slurp(tmp.path / "first" / "n2.svg");
    CHECK(svg.rfind("<svg", 0) == 0);

    using nlohmann::json;
    const json report = json::parse(slurp(tmp.path / "first" / "n2.json"));
    CHECK(report.contains("tool_version"));
    CHECK(report["config"]["n_emitters"] == 2);
    CHECK(report["models"]["model_a"]["verdict"]["physical"] == false);
    CHECK(report["models"]["model_b"]["verdict"]["physical"] == true);
    CHECK(report["models"]["model_a"].contains("min_off_diagonal_1_per_ns"));
    CHECK(report["models"]["model_b"]["asymptote"]["sigma0"].contains(
        "drift_bound_1_per_ns"));

    // A second run must reproduce both files byte for byte.
    std::ostringstream out2, err2;
    args.out_dir = (tmp.path / "second").string();
    args.svg = false;
    CHECK(app::simulate(args, out2, err2) == app::exit_ok);
    CHECK(slurp(tmp.path / "second" / "n2.csv") == csv);
    CHECK(!fs::exists(tmp.path / "second" / "n2.svg"));
}

TEST_CASE("simulate handles single selections and rejects svg for them") {
    TempDir tmp;
    app::SimulateArgs args;
    args.config = preset("n2");
    args.model = "a";
    args.out_dir = (tmp.path / "single").string();
    args.stem = "only-a";

    std::ostringstream out, err;
    CHECK(app::simulate(args, out, err) == app::exit_ok);
    const std::string csv = slurp(tmp.path / "single" / "only-a.csv");
    CHECK(csv.rfind("time_ns,f_norm,f_raw_per_ns,f_sigma0_per_ns,f_sigma1_per_ns\n", 0) ==
          0);

    using nlohmann::json;
    const json report = json::parse(slurp(tmp.path / "single" / "only-a.json"));
    CHECK(report["model"]["terms"] == "a");

    args.svg = true;
    std::ostringstream out_bad, err_bad;
    CHECK(app::simulate(args, out_bad, err_bad) == app::exit_config);
    CHECK(err_bad.str().find("--svg requires --model both") != std::string::npos);
}

TEST_CASE("simulate maps a bad configuration to the config exit code") {
    app::SimulateArgs args;
    args.config = preset("n2");
    args.config.samples = 1;
    args.out_dir = (fs::temp_directory_path() / "dicke-cli-never-created").string();
    std::ostringstream out, err;
    CHECK(app::simulate(args, out, err) == app::exit_config);
    CHECK(!err.str().empty());
    CHECK(!fs::exists(args.out_dir));
}

TEST_CASE("ablate reports per-term verdicts and writes the sweep") {
    TempDir tmp;
    app::AblateArgs args;
    args.config = preset("n2");
    args.json_path = (tmp.path / "sweep.json").string();

    std::ostringstream out, err;
    REQUIRE(app::ablate(args, out, err) == app::exit_ok);
    CHECK(err.str().empty());
    // Two emitters show only the asymptote pathology; the trace never
    // actually dips negative at this size.
    CHECK(out.str().find("baseline a: nonnegative yes, zero asymptote no") !=
          std::string::npos);
    CHECK(out.str().find("baseline b: nonnegative yes, zero asymptote yes") !=
          std::string::npos);

    using nlohmann::json;
    const json sweep = json::parse(slurp(args.json_path));
    CHECK(sweep.contains("tool_version"));
    CHECK(sweep["baseline_model_a"]["nonnegative"] == true);
    CHECK(sweep["baseline_model_a"]["asymptote_zero"] == false);
    CHECK(sweep["baseline_model_b"]["nonnegative"] == true);
    CHECK(sweep["baseline_model_b"]["asymptote_zero"] == true);
    REQUIRE(sweep["single_corrections"].size() == 9);
    for (const auto& entry : sweep["single_corrections"]) {
        CHECK(entry.contains("term"));
        CHECK(entry.contains("fixes_asymptote"));
        CHECK(!entry.contains("error"));
        // Nothing can "fix" a negativity the baseline does not show.
        CHECK(entry["fixes_negativity"] == false);
    }
    // Only the feed-sign correction removes the negative matrix entry, and
    // only the loss-weight and emission-weight corrections kill the
    // spurious late-time level.
    for (const auto& entry : sweep["single_corrections"]) {
        const bool is_d = entry["term"] == "D";
        CHECK((entry["min_off_diagonal_1_per_ns"].get<double>() >= 0.0) == is_d);
        const bool fixes_asym = entry["term"] == "C" || entry["term"] == "I";
        CHECK(entry["fixes_asymptote"] == fixes_asym);
    }
}

TEST_CASE("oracle verification exits cleanly and rejects silly bounds") {
    std::ostringstream out, err;
    CHECK(app::oracle_verify(3, out, err) == app::exit_ok);
    CHECK(out.str().find("state norm") != std::string::npos);
    CHECK(out.str().find("FAIL") == std::string::npos);

    std::ostringstream out2, err2;
    CHECK(app::oracle_verify(0, out2, err2) == app::exit_config);
    CHECK(!err2.str().empty());
    std::ostringstream out3, err3;
    CHECK(app::oracle_verify(99, out3, err3) == app::exit_config);
}

TEST_CASE("asymptote report prints both routes") {
    app::AsymptoteArgs args;
    args.config = preset("n2");
    args.model = "both";
    std::ostringstream out, err;
    CHECK(app::asymptote_report(args, out, err) == app::exit_ok);
    CHECK(out.str().find("model a, late-time fluorescence") != std::string::npos);
    CHECK(out.str().find("model b, late-time fluorescence") != std::string::npos);
    CHECK(out.str().find("kernel projection") != std::string::npos);
    CHECK(out.str().find("weighted total") != std::string::npos);
}

TEST_CASE("preset listing shows every named set") {
    std::ostringstream out;
    CHECK(app::list_presets(out) == app::exit_ok);
    CHECK(out.str().find("n2:") != std::string::npos);
    CHECK(out.str().find("n7:") != std::string::npos);
    CHECK(out.str().find("n10:") != std::string::npos);
    CHECK(out.str().find("gamma_2pi_mhz") != std::string::npos);
}
