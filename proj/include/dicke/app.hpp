// app.hpp — Subcommand implementations behind the command-line tool

#pragma once

#include <ostream>
#include <string>

#include "dicke/generator.hpp"
#include "dicke/run_config.hpp"

namespace dicke::app {

// Process exit codes. Anything else thrown maps to exit_config.
inline constexpr int exit_ok = 0;
inline constexpr int exit_integration = 1;  // stepper failure or non-finite state
inline constexpr int exit_asymptote = 2;    // no late-time limit, or routes disagree
inline constexpr int exit_config = 3;       // bad configuration, usage, or I/O

// "a", "b", or a nine-character a/b pattern in term order A..I, optionally
// prefixed with "custom:".
TermFlags parse_term_selection(const std::string& text);

// Worker cap for the ablation sweep: DICKE_SIM_THREADS when set to a
// positive integer, otherwise the hardware thread count clamped to 8.
int max_parallel_jobs();

// Each subcommand logs its results on `out` and its diagnostics on `err`,
// and returns one of the exit codes above.

struct SimulateArgs {
    RunConfig config;
    std::string model{"both"};
    std::string out_dir{"."};  // created if missing; receives <stem>.csv and <stem>.json
    std::string stem{"run"};
    bool svg{false};  // also write <stem>.svg (model == "both" only)
};
int simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

struct AsymptoteArgs {
    RunConfig config;
    std::string model{"both"};
};
int asymptote_report(const AsymptoteArgs& args, std::ostream& out, std::ostream& err);

// Turns each correction on individually on top of the original term
// selection and reports which pathology each one removes.
struct AblateArgs {
    RunConfig config;
    std::string json_path;  // empty = don't write
};
int ablate(const AblateArgs& args, std::ostream& out, std::ostream& err);

// Replays the collective coefficients on explicit states of up to `max_sites`
// emitters and cross-checks the generator entries against them.
int oracle_verify(int max_sites, std::ostream& out, std::ostream& err);

int list_presets(std::ostream& out);

} // namespace dicke::app
