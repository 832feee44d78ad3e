// main.cpp — Command-line front end of the collective fluorescence simulator

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dicke/app.hpp"
#include "dicke/run_config.hpp"

namespace {

// Options shared by every subcommand that runs a simulation: pick a base
// parameter set (preset or config file), then apply individual overrides.
struct RunOptions {
    std::string preset_name;
    std::string config_path;
    std::optional<int> n;
    std::optional<double> sigma0_weight;
    std::optional<double> gamma;
    std::optional<double> gamma_d0;
    std::optional<double> gamma_d1;
    std::optional<double> gamma_isc0;
    std::optional<double> gamma_isc1;
    std::optional<double> t_max;
    std::optional<int> samples;
    std::optional<double> rel_tol;
    std::optional<double> abs_tol;
};

void add_run_options(CLI::App& cmd, RunOptions& opts) {
    auto* preset_opt =
        cmd.add_option("--preset", opts.preset_name, "named parameter set")
            ->check(CLI::IsMember(dicke::preset_names()));
    cmd.add_option("--config", opts.config_path, "key=value parameter file")
        ->excludes(preset_opt);
    cmd.add_option("--n", opts.n, "number of emitters");
    cmd.add_option("--p0", opts.sigma0_weight, "probability of the sigma = 0 manifold");
    cmd.add_option("--gamma", opts.gamma, "emission rate [2*pi MHz]");
    cmd.add_option("--gamma-d0", opts.gamma_d0, "dephasing rate, sigma = 0 [2*pi MHz]");
    cmd.add_option("--gamma-d1", opts.gamma_d1, "dephasing rate, sigma = +/-1 [2*pi MHz]");
    cmd.add_option("--gamma-isc0", opts.gamma_isc0,
                   "intersystem-crossing rate, sigma = 0 [2*pi MHz]");
    cmd.add_option("--gamma-isc1", opts.gamma_isc1,
                   "intersystem-crossing rate, sigma = +/-1 [2*pi MHz]");
    cmd.add_option("--t-max", opts.t_max, "simulated span [ns]");
    cmd.add_option("--samples", opts.samples, "points on the output grid");
    cmd.add_option("--rtol", opts.rel_tol, "relative integration tolerance");
    cmd.add_option("--atol", opts.abs_tol, "absolute integration tolerance");
}

dicke::RunConfig resolve(const RunOptions& opts) {
    dicke::RunConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = dicke::load_config_file(opts.config_path);
    } else {
        cfg = dicke::preset(opts.preset_name.empty() ? "n7" : opts.preset_name);
    }
    if (opts.n) cfg.n_emitters = *opts.n;
    if (opts.sigma0_weight) cfg.sigma0_weight = *opts.sigma0_weight;
    if (opts.gamma) cfg.gamma = *opts.gamma;
    if (opts.gamma_d0) cfg.gamma_d_sigma0 = *opts.gamma_d0;
    if (opts.gamma_d1) cfg.gamma_d_sigma1 = *opts.gamma_d1;
    if (opts.gamma_isc0) cfg.gamma_isc_sigma0 = *opts.gamma_isc0;
    if (opts.gamma_isc1) cfg.gamma_isc_sigma1 = *opts.gamma_isc1;
    if (opts.t_max) cfg.t_max_ns = *opts.t_max;
    if (opts.samples) cfg.samples = *opts.samples;
    if (opts.rel_tol) cfg.rel_tol = *opts.rel_tol;
    if (opts.abs_tol) cfg.abs_tol = *opts.abs_tol;
    dicke::validate(cfg);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Collective fluorescence from dephasing NV-center ensembles: the original\n"
                 "rate equations, the corrected ones, and the diagnostics separating them"};
    cli.require_subcommand(1);

    RunOptions sim_opts;
    std::string sim_model = "both";
    std::string sim_out = ".";
    std::string sim_stem;
    bool sim_svg = false;
    CLI::App* sim = cli.add_subcommand("simulate", "integrate the rate equations");
    add_run_options(*sim, sim_opts);
    sim->add_option("--model", sim_model,
                    "a, b, both, or custom:<9 x a/b> selecting each term variant");
    sim->add_option("-o,--out", sim_out,
                    "directory for the CSV traces and the JSON report (default: .)");
    sim->add_option("--stem", sim_stem,
                    "output file name stem (default: the preset name, else 'run')");
    sim->add_flag("--svg", sim_svg, "also write a plot of both normalized traces (model both)");

    RunOptions asym_opts;
    std::string asym_model = "both";
    CLI::App* asym = cli.add_subcommand("asymptote", "late-time fluorescence by two routes");
    add_run_options(*asym, asym_opts);
    asym->add_option("--model", asym_model, "a, b, both, or custom:<9 x a/b>");

    RunOptions ablate_opts;
    std::string ablate_json;
    CLI::App* abl = cli.add_subcommand(
        "ablate", "toggle each correction individually and compare verdicts");
    add_run_options(*abl, ablate_opts);
    abl->add_option("--json", ablate_json, "write the sweep results as JSON");

    int oracle_max = 10;
    CLI::App* oracle = cli.add_subcommand(
        "oracle-verify", "replay the ladder coefficients on explicit states");
    oracle->add_option("--max-n", oracle_max, "largest emitter count to enumerate")
        ->check(CLI::Range(1, 14));

    CLI::App* presets = cli.add_subcommand("presets", "list the named parameter sets");

    try {
        cli.parse(argc, argv);

        if (*sim) {
            std::string stem = sim_stem;
            if (stem.empty()) {
                stem = sim_opts.preset_name.empty() ? "run" : sim_opts.preset_name;
            }
            dicke::app::SimulateArgs args{resolve(sim_opts), sim_model, sim_out, stem,
                                          sim_svg};
            return dicke::app::simulate(args, std::cout, std::cerr);
        }
        if (*asym) {
            dicke::app::AsymptoteArgs args{resolve(asym_opts), asym_model};
            return dicke::app::asymptote_report(args, std::cout, std::cerr);
        }
        if (*abl) {
            dicke::app::AblateArgs args{resolve(ablate_opts), ablate_json};
            return dicke::app::ablate(args, std::cout, std::cerr);
        }
        if (*oracle) {
            return dicke::app::oracle_verify(oracle_max, std::cout, std::cerr);
        }
        if (*presets) {
            return dicke::app::list_presets(std::cout);
        }
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? dicke::app::exit_ok : dicke::app::exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return dicke::app::exit_config;
    }
    return dicke::app::exit_ok;
}
