// run_config.hpp — Run parameters, measured presets, and the key=value config format

#pragma once

#include <string>
#include <vector>

#include "dicke/generator.hpp"
#include "dicke/integrate.hpp"

namespace dicke {

// Everything a simulation run needs. Rates are stored as quoted, in units
// of 2*pi MHz, and converted to 1/ns only when generators are built — that
// keeps config round-trips exact.
struct RunConfig {
    int n_emitters{7};
    double sigma0_weight{0.51};       // probability of the sigma = 0 manifold
    double gamma{4.8};                // emission rate, shared by both manifolds
    double gamma_d_sigma0{20.0};      // dephasing, sigma = 0
    double gamma_d_sigma1{260.0};     // dephasing, sigma = +/-1
    double gamma_isc_sigma0{1.8};     // intersystem crossing, sigma = 0
    double gamma_isc_sigma1{9.4};     // intersystem crossing, sigma = +/-1
    double t_max_ns{100.0};
    int samples{2000};
    double rel_tol{1e-9};
    double abs_tol{1e-12};

    SpinManifoldParams manifold_sigma0() const;  // converted to 1/ns
    SpinManifoldParams manifold_sigma1() const;
    IntegratorConfig integrator() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

void validate(const RunConfig& cfg);

// Measured parameter sets for 2, 7 and 10 emitters.
const std::vector<std::string>& preset_names();
RunConfig preset(const std::string& name);  // throws std::invalid_argument on unknown name

// Flat "key = value" lines, one setting each; '#' starts a comment; blank
// lines are skipped; unknown or repeated keys are rejected. serialize/parse
// round-trips every field exactly.
RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& cfg);
RunConfig load_config_file(const std::string& path);

} // namespace dicke
