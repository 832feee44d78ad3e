// app.cpp — Orchestration of the command-line subcommands

#include "dicke/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <optional>
#include <semaphore>
#include <sstream>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dicke/analysis.hpp"
#include "dicke/asymptote.hpp"
#include "dicke/format.hpp"
#include "dicke/integrate.hpp"
#include "dicke/oracle.hpp"
#include "dicke/outputs.hpp"
#include "dicke/version.hpp"

namespace dicke::app {

namespace {

using nlohmann::json;

int guarded(std::ostream& err, const auto& body) {
    try {
        body();
        return exit_ok;
    } catch (const IntegrationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_integration;
    } catch (const AsymptoteError& e) {
        err << "error: " << e.what() << "\n";
        return exit_asymptote;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

void log_model(std::ostream& out, const std::string& heading, const SimulationResult& r) {
    out << heading << " (terms " << r.flags.label() << ")\n";
    out << "  peak fluorescence     " << format_double(r.normalized.scale) << " 1/ns\n";
    out << "  lowest value          " << format_double(r.verdict.most_negative)
        << " (normalized, at t = " << format_fixed(r.verdict.most_negative_t, 3) << " ns)\n";
    out << "  sign changes          " << r.verdict.crossing_times_ns.size();
    if (!r.verdict.crossing_times_ns.empty()) {
        out << " at";
        for (double t : r.verdict.crossing_times_ns) out << " " << format_fixed(t, 4) << " ns";
    }
    out << "\n";
    out << "  asymptote             " << format_double(r.verdict.asymptote_normalized)
        << " (normalized)\n";
    out << "  physical              " << yes_no(r.verdict.physical()) << "\n";
}

void log_asymptote(std::ostream& out, const char* name, const AsymptoteResult& a) {
    out << "  " << name << ": " << format_double(a.value) << " 1/ns";
    if (a.spectral_available) {
        out << " (kernel projection " << format_double(a.spectral_value)
            << ", horizon " << format_double(a.horizon_value) << ")";
    } else {
        out << " (horizon route only, T = " << format_fixed(a.horizon_ns, 0) << " ns)";
    }
    out << "\n";
}

std::string output_path(const SimulateArgs& args, const char* extension) {
    return (std::filesystem::path(args.out_dir) / (args.stem + extension)).string();
}

} // namespace

TermFlags parse_term_selection(const std::string& text) {
    std::string pattern = text;
    if (pattern.rfind("custom:", 0) == 0) pattern = pattern.substr(7);
    return TermFlags::from_pattern(pattern);
}

int max_parallel_jobs() {
    if (const char* env = std::getenv("DICKE_SIM_THREADS")) {
        try {
            const int requested = std::stoi(env);
            if (requested > 0) return std::min(requested, 64);
        } catch (const std::exception&) {
            // fall through to the hardware default
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

int simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate(args.config);
        if (args.svg && args.model != "both") {
            throw std::invalid_argument("--svg requires --model both");
        }
        const SpinManifoldParams s0 = args.config.manifold_sigma0();
        const SpinManifoldParams s1 = args.config.manifold_sigma1();
        const IntegratorConfig integ = args.config.integrator();

        std::filesystem::create_directories(args.out_dir);
        const std::string csv_path = output_path(args, ".csv");
        const std::string json_path = output_path(args, ".json");

        if (args.model == "both") {
            const ComparisonReport report =
                compare_models(args.config.n_emitters, s0, s1, integ);
            log_model(out, "model a", report.original);
            log_model(out, "model b", report.corrected);
            write_text_file(csv_path, comparison_csv(report));
            out << "wrote " << csv_path << "\n";
            write_text_file(json_path, comparison_json(report, args.config));
            out << "wrote " << json_path << "\n";
            if (args.svg) {
                const std::string svg_path = output_path(args, ".svg");
                write_text_file(svg_path, comparison_svg(report, args.config));
                out << "wrote " << svg_path << "\n";
            }
            return;
        }

        const TermFlags flags = parse_term_selection(args.model);
        const SimulationResult result =
            run_model(args.config.n_emitters, flags, s0, s1, integ);
        log_model(out, "model " + flags.label(), result);
        write_text_file(csv_path, simulation_csv(result));
        out << "wrote " << csv_path << "\n";
        write_text_file(json_path, simulation_json(result, args.config));
        out << "wrote " << json_path << "\n";
    });
}

int asymptote_report(const AsymptoteArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate(args.config);
        const StateSpace space = build_state_space(args.config.n_emitters);
        const SpinManifoldParams s0 = args.config.manifold_sigma0();
        const SpinManifoldParams s1 = args.config.manifold_sigma1();

        std::vector<TermFlags> selections;
        if (args.model == "both") {
            selections = {TermFlags::model_a(), TermFlags::model_b()};
        } else {
            selections = {parse_term_selection(args.model)};
        }

        for (const TermFlags& flags : selections) {
            const RateGenerator g0 = build_generator(space, s0, flags);
            const RateGenerator g1 = build_generator(space, s1, flags);
            const AsymptoteResult a0 = asymptote(g0, initial_state(space, Manifold::sigma0));
            const AsymptoteResult a1 = asymptote(g1, initial_state(space, Manifold::sigma_pm1));
            out << "model " << flags.label() << ", late-time fluorescence\n";
            log_asymptote(out, "sigma 0  ", a0);
            log_asymptote(out, "sigma +/-1", a1);
            out << "  weighted total: "
                << format_double(s0.weight * a0.value + s1.weight * a1.value) << " 1/ns\n";
        }
    });
}

int ablate(const AblateArgs& args, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate(args.config);
        const SpinManifoldParams s0 = args.config.manifold_sigma0();
        const SpinManifoldParams s1 = args.config.manifold_sigma1();
        const IntegratorConfig integ = args.config.integrator();
        const int n = args.config.n_emitters;

        // Eleven runs: both baselines plus one run per individually
        // corrected term. A semaphore keeps at most max_parallel_jobs()
        // integrations in flight. A failure in a single-correction run is
        // reported in its row; a baseline failure aborts the sweep.
        std::vector<TermFlags> selections{TermFlags::model_a(), TermFlags::model_b()};
        for (int k = 0; k < term_count; ++k) {
            selections.push_back(TermFlags::model_a().with(static_cast<Term>(k), true));
        }

        struct Outcome {
            std::optional<SimulationResult> result;
            std::string error;
        };

        std::counting_semaphore<64> gate(max_parallel_jobs());
        std::vector<std::future<Outcome>> futures;
        futures.reserve(selections.size());
        for (const TermFlags& flags : selections) {
            futures.push_back(std::async(std::launch::async, [&, flags]() -> Outcome {
                gate.acquire();
                struct Release {
                    std::counting_semaphore<64>* g;
                    ~Release() { g->release(); }
                } release{&gate};
                try {
                    return {run_model(n, flags, s0, s1, integ), {}};
                } catch (const std::exception& e) {
                    return {std::nullopt, e.what()};
                }
            }));
        }
        std::vector<Outcome> outcomes;
        outcomes.reserve(futures.size());
        for (auto& f : futures) outcomes.push_back(f.get());

        for (int k = 0; k < 2; ++k) {
            if (!outcomes[static_cast<std::size_t>(k)].result) {
                // Map the failure back onto the usual exit codes.
                throw AsymptoteError("baseline model " + std::string(k == 0 ? "a" : "b") +
                                     " failed: " + outcomes[static_cast<std::size_t>(k)].error);
            }
        }
        const SimulationResult& base_a = *outcomes[0].result;
        const SimulationResult& base_b = *outcomes[1].result;

        out << "single-term corrections on top of model a (N = " << n << ")\n";
        out << "  baseline a: nonnegative " << yes_no(base_a.verdict.nonnegative)
            << ", zero asymptote " << yes_no(base_a.verdict.asymptote_zero) << "\n";
        out << "  baseline b: nonnegative " << yes_no(base_b.verdict.nonnegative)
            << ", zero asymptote " << yes_no(base_b.verdict.asymptote_zero) << "\n";
        out << "  term  name                    nonneg  zero-asym  min-offdiag\n";

        json sweep = json::array();
        for (int k = 0; k < term_count; ++k) {
            const Term term = static_cast<Term>(k);
            const Outcome& o = outcomes[static_cast<std::size_t>(k) + 2];
            std::string name = term_name(term);
            name.resize(24, ' ');

            json entry;
            entry["term"] = std::string(1, term_letter(term));
            entry["name"] = term_name(term);

            if (!o.result) {
                out << "  " << term_letter(term) << "     " << name
                    << "error: " << o.error << "\n";
                entry["error"] = o.error;
                entry["fixes_negativity"] = false;
                entry["fixes_asymptote"] = false;
                sweep.push_back(entry);
                continue;
            }
            const SimulationResult& r = *o.result;
            std::string nonneg = yes_no(r.verdict.nonnegative);
            nonneg.resize(8, ' ');
            std::string zero_asym = yes_no(r.verdict.asymptote_zero);
            zero_asym.resize(11, ' ');
            out << "  " << term_letter(term) << "     " << name << nonneg << zero_asym
                << format_double(r.min_off_diagonal) << "\n";

            entry["terms"] = r.flags.label();
            entry["nonnegative"] = r.verdict.nonnegative;
            entry["asymptote_zero"] = r.verdict.asymptote_zero;
            entry["asymptote_normalized"] = r.verdict.asymptote_normalized;
            entry["most_negative_normalized"] = r.verdict.most_negative;
            entry["sign_change_times_ns"] = r.verdict.crossing_times_ns;
            entry["min_off_diagonal_1_per_ns"] = r.min_off_diagonal;
            entry["fixes_negativity"] = r.verdict.nonnegative && !base_a.verdict.nonnegative;
            entry["fixes_asymptote"] =
                r.verdict.asymptote_zero && !base_a.verdict.asymptote_zero;
            sweep.push_back(entry);
        }

        if (!args.json_path.empty()) {
            const auto baseline_block = [](const SimulationResult& base) {
                return json{
                    {"nonnegative", base.verdict.nonnegative},
                    {"asymptote_zero", base.verdict.asymptote_zero},
                    {"asymptote_normalized", base.verdict.asymptote_normalized},
                    {"most_negative_normalized", base.verdict.most_negative},
                    {"sign_change_times_ns", base.verdict.crossing_times_ns},
                    {"min_off_diagonal_1_per_ns", base.min_off_diagonal},
                };
            };
            json j;
            j["tool_version"] = tool_version;
            j["n_emitters"] = n;
            j["config"] = {
                {"n_emitters", args.config.n_emitters},
                {"sigma0_weight", args.config.sigma0_weight},
                {"gamma_2pi_mhz", args.config.gamma},
                {"gamma_d_sigma0_2pi_mhz", args.config.gamma_d_sigma0},
                {"gamma_d_sigma1_2pi_mhz", args.config.gamma_d_sigma1},
                {"gamma_isc_sigma0_2pi_mhz", args.config.gamma_isc_sigma0},
                {"gamma_isc_sigma1_2pi_mhz", args.config.gamma_isc_sigma1},
                {"t_max_ns", args.config.t_max_ns},
                {"samples", args.config.samples},
                {"rel_tol", args.config.rel_tol},
                {"abs_tol", args.config.abs_tol},
            };
            j["baseline_model_a"] = baseline_block(base_a);
            j["baseline_model_b"] = baseline_block(base_b);
            j["single_corrections"] = sweep;
            write_text_file(args.json_path, j.dump(2) + "\n");
            out << "wrote " << args.json_path << "\n";
        }
    });
}

int oracle_verify(int max_sites, std::ostream& out, std::ostream& err) {
    if (max_sites < 1 || max_sites > oracle::max_sites) {
        err << "error: oracle-verify: max sites must lie in [1, " << oracle::max_sites << "]\n";
        return exit_config;
    }

    bool all_ok = true;
    const int code = guarded(err, [&] {
        double dev_norm = 0.0;
        double dev_flip = 0.0;
        double dev_decouple = 0.0;
        double dev_lowering = 0.0;
        double dev_cross = 0.0;
        bool signs_ok = true;

        for (int n = 1; n <= max_sites; ++n) {
            for (int tm = -n; tm <= n; tm += 2) {
                const HalfInt m = HalfInt::from_twice(tm);
                const auto state = oracle::dicke_state(n, m);
                dev_norm = std::max(dev_norm, std::abs(state.norm_squared() - 1.0));

                for (int site = 0; site < n; ++site) {
                    const double expected = static_cast<double>(tm) / n;  // M/J
                    dev_flip = std::max(
                        dev_flip, std::abs(oracle::phase_flip_amplitude(n, m, site) - expected));

                    if (n >= 2) {
                        const auto ov = oracle::decoupling_overlaps(n, m, site);
                        const int k = (n + tm) / 2;
                        dev_decouple = std::max(
                            {dev_decouple,
                             std::abs(ov.excited_weight - static_cast<double>(k) / n),
                             std::abs(ov.ground_weight - static_cast<double>(n - k) / n),
                             std::abs(ov.excited_weight + ov.ground_weight - 1.0)});
                        signs_ok = signs_ok && ov.excited_overlap >= 0.0 &&
                                   ov.ground_overlap <= 0.0;
                    }
                }

                if (tm > -n) {
                    const int k = (n + tm) / 2;
                    const double expected = static_cast<double>(k) * (n - k + 1);
                    dev_lowering = std::max(
                        dev_lowering, std::abs(oracle::lowering_weight(n, m) - expected));
                }
            }
        }

        // Cross-check: the generator's emission feed from (J, M) to
        // (J, M-1), at unit rate, must equal the enumerated matrix element
        // of the collective lowering operator on 2J emitters.
        const int cross_n = std::min(max_sites, 8);
        const SpinManifoldParams unit_rate{1.0, 0.0, 0.0, 1.0};
        for (int n = 1; n <= cross_n; ++n) {
            const StateSpace space = build_state_space(n);
            const RateGenerator gen = build_generator(space, unit_rate, TermFlags::model_b());
            for (const DickeIndex& idx : space.indices()) {
                if (idx.m.twice <= -idx.j.twice) continue;
                const auto row = space.slot({idx.j, HalfInt::from_twice(idx.m.twice - 2)});
                const auto col = space.slot(idx);
                const double entry = gen.matrix().coeff(static_cast<Eigen::Index>(row),
                                                        static_cast<Eigen::Index>(col));
                const double enumerated = oracle::lowering_weight(idx.j.twice, idx.m);
                dev_cross = std::max(dev_cross, std::abs(entry - enumerated));
            }
        }

        const double tol = 1e-12;
        const auto report = [&](const char* name, double dev) {
            out << "  " << name << "  max deviation " << format_double(dev) << "  "
                << (dev <= tol ? "ok" : "FAIL") << "\n";
            return dev <= tol;
        };
        out << "exhaustive checks on explicit states, up to " << max_sites << " emitters\n";
        all_ok &= report("state norm          ", dev_norm);
        all_ok &= report("phase-flip amplitude", dev_flip);
        all_ok &= report("decoupling weights  ", dev_decouple);
        all_ok &= report("lowering weight     ", dev_lowering);
        all_ok &= report("generator emission  ", dev_cross);
        out << "  overlap sign structure  " << (signs_ok ? "ok" : "FAIL") << "\n";
        all_ok &= signs_ok;
    });
    if (code != exit_ok) return code;
    if (!all_ok) {
        err << "error: at least one family deviates from the ladder formulas\n";
        return exit_integration;
    }
    return exit_ok;
}

int list_presets(std::ostream& out) {
    for (const std::string& name : preset_names()) {
        out << name << ":\n";
        std::istringstream lines(serialize_config(preset(name)));
        std::string line;
        while (std::getline(lines, line)) out << "  " << line << "\n";
    }
    return exit_ok;
}

} // namespace dicke::app
