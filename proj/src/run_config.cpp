// run_config.cpp — Presets and the flat config format

#include "dicke/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dicke/format.hpp"

namespace dicke {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const std::from_chars_result res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw std::invalid_argument("config: key '" + key + "' has a malformed number: '" +
                                    value + "'");
    }
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const std::from_chars_result res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw std::invalid_argument("config: key '" + key + "' has a malformed integer: '" +
                                    value + "'");
    }
    return out;
}

} // namespace

SpinManifoldParams RunConfig::manifold_sigma0() const {
    return SpinManifoldParams{rate_from_two_pi_mhz(gamma), rate_from_two_pi_mhz(gamma_d_sigma0),
                              rate_from_two_pi_mhz(gamma_isc_sigma0), sigma0_weight};
}

SpinManifoldParams RunConfig::manifold_sigma1() const {
    return SpinManifoldParams{rate_from_two_pi_mhz(gamma), rate_from_two_pi_mhz(gamma_d_sigma1),
                              rate_from_two_pi_mhz(gamma_isc_sigma1), 1.0 - sigma0_weight};
}

IntegratorConfig RunConfig::integrator() const {
    IntegratorConfig cfg;
    cfg.t_end_ns = t_max_ns;
    cfg.samples = samples;
    cfg.rel_tol = rel_tol;
    cfg.abs_tol = abs_tol;
    return cfg;
}

void validate(const RunConfig& cfg) {
    if (cfg.n_emitters < 1 || cfg.n_emitters > 64) {
        throw std::invalid_argument("config: n_emitters must lie in [1, 64]");
    }
    dicke::validate(cfg.manifold_sigma0());
    dicke::validate(cfg.manifold_sigma1());
    dicke::validate(cfg.integrator());
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"n2", "n7", "n10"};
    return names;
}

RunConfig preset(const std::string& name) {
    RunConfig cfg;  // defaults are the 7-emitter values
    if (name == "n2") {
        cfg.n_emitters = 2;
        cfg.sigma0_weight = 0.56;
        cfg.gamma = 2.5;
        cfg.gamma_d_sigma0 = 27.0;
        cfg.gamma_d_sigma1 = 270.0;
    } else if (name == "n7") {
        cfg.n_emitters = 7;
        cfg.sigma0_weight = 0.51;
        cfg.gamma = 4.8;
        cfg.gamma_d_sigma0 = 20.0;
        cfg.gamma_d_sigma1 = 260.0;
    } else if (name == "n10") {
        cfg.n_emitters = 10;
        cfg.sigma0_weight = 0.50;
        cfg.gamma = 3.3;
        cfg.gamma_d_sigma0 = 39.0;
        cfg.gamma_d_sigma1 = 420.0;
    } else {
        throw std::invalid_argument("unknown preset '" + name + "' (have: n2, n7, n10)");
    }
    // The intersystem-crossing rates are emitter-count independent.
    cfg.gamma_isc_sigma0 = 1.8;
    cfg.gamma_isc_sigma1 = 9.4;
    return cfg;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": empty key or value");
        }
        if (!seen.insert(key).second) {
            throw std::invalid_argument("config: key '" + key + "' given twice");
        }

        if (key == "n_emitters") cfg.n_emitters = parse_int(key, value);
        else if (key == "sigma0_weight") cfg.sigma0_weight = parse_double(key, value);
        else if (key == "gamma_2pi_mhz") cfg.gamma = parse_double(key, value);
        else if (key == "gamma_d_sigma0_2pi_mhz") cfg.gamma_d_sigma0 = parse_double(key, value);
        else if (key == "gamma_d_sigma1_2pi_mhz") cfg.gamma_d_sigma1 = parse_double(key, value);
        else if (key == "gamma_isc_sigma0_2pi_mhz") cfg.gamma_isc_sigma0 = parse_double(key, value);
        else if (key == "gamma_isc_sigma1_2pi_mhz") cfg.gamma_isc_sigma1 = parse_double(key, value);
        else if (key == "t_max_ns") cfg.t_max_ns = parse_double(key, value);
        else if (key == "samples") cfg.samples = parse_int(key, value);
        else if (key == "rel_tol") cfg.rel_tol = parse_double(key, value);
        else if (key == "abs_tol") cfg.abs_tol = parse_double(key, value);
        else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    validate(cfg);
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    out += "n_emitters = " + std::to_string(cfg.n_emitters) + "\n";
    out += "sigma0_weight = " + format_double(cfg.sigma0_weight) + "\n";
    out += "gamma_2pi_mhz = " + format_double(cfg.gamma) + "\n";
    out += "gamma_d_sigma0_2pi_mhz = " + format_double(cfg.gamma_d_sigma0) + "\n";
    out += "gamma_d_sigma1_2pi_mhz = " + format_double(cfg.gamma_d_sigma1) + "\n";
    out += "gamma_isc_sigma0_2pi_mhz = " + format_double(cfg.gamma_isc_sigma0) + "\n";
    out += "gamma_isc_sigma1_2pi_mhz = " + format_double(cfg.gamma_isc_sigma1) + "\n";
    out += "t_max_ns = " + format_double(cfg.t_max_ns) + "\n";
    out += "samples = " + std::to_string(cfg.samples) + "\n";
    out += "rel_tol = " + format_double(cfg.rel_tol) + "\n";
    out += "abs_tol = " + format_double(cfg.abs_tol) + "\n";
    return out;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("config: cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace dicke
