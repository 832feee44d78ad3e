// outputs.cpp — Deterministic CSV/JSON/SVG writers

#include "dicke/outputs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "dicke/format.hpp"
#include "dicke/version.hpp"

namespace dicke {

namespace {

using nlohmann::json;

json route_block(const AsymptoteResult& a) {
    json j;
    j["value_1_per_ns"] = a.value;
    j["spectral_available"] = a.spectral_available;
    if (a.spectral_available) j["spectral_value_1_per_ns"] = a.spectral_value;
    j["horizon_value_1_per_ns"] = a.horizon_value;
    j["horizon_ns"] = a.horizon_ns;
    j["slowest_rate_1_per_ns"] = a.slowest_rate;
    j["drift_bound_1_per_ns"] = a.certificate_tol_used;
    return j;
}

json model_block(const SimulationResult& r) {
    json j;
    j["terms"] = r.flags.label();
    j["peak_1_per_ns"] = r.normalized.scale;
    j["verdict"] = {
        {"physical", r.verdict.physical()},
        {"nonnegative", r.verdict.nonnegative},
        {"most_negative_normalized", r.verdict.most_negative},
        {"most_negative_t_ns", r.verdict.most_negative_t},
        {"sign_change_times_ns", r.verdict.crossing_times_ns},
        {"asymptote_normalized", r.verdict.asymptote_normalized},
        {"asymptote_zero", r.verdict.asymptote_zero},
    };
    j["asymptote"] = {
        {"total_1_per_ns", r.asymptote_total},
        {"sigma0", route_block(r.asymptote_sigma0)},
        {"sigma1", route_block(r.asymptote_sigma1)},
    };
    j["min_off_diagonal_1_per_ns"] = r.min_off_diagonal;
    j["post_initial_peak"] = {
        {"t_ns", r.post_initial_peak.t_ns},
        {"height_normalized", r.post_initial_peak.height},
    };
    return j;
}

json config_block(const RunConfig& cfg) {
    json j;
    j["n_emitters"] = cfg.n_emitters;
    j["sigma0_weight"] = cfg.sigma0_weight;
    j["gamma_2pi_mhz"] = cfg.gamma;
    j["gamma_d_sigma0_2pi_mhz"] = cfg.gamma_d_sigma0;
    j["gamma_d_sigma1_2pi_mhz"] = cfg.gamma_d_sigma1;
    j["gamma_isc_sigma0_2pi_mhz"] = cfg.gamma_isc_sigma0;
    j["gamma_isc_sigma1_2pi_mhz"] = cfg.gamma_isc_sigma1;
    j["t_max_ns"] = cfg.t_max_ns;
    j["samples"] = cfg.samples;
    j["rel_tol"] = cfg.rel_tol;
    j["abs_tol"] = cfg.abs_tol;
    return j;
}

// --- SVG ----------------------------------------------------------------

constexpr double kWidth = 860.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 24.0;
constexpr double kTop = 44.0;
constexpr double kBottom = 58.0;

struct PlotFrame {
    double t_max;
    double y_lo;
    double y_hi;

    double x(double t) const {
        return kLeft + (t / t_max) * (kWidth - kLeft - kRight);
    }
    double y(double v) const {
        return kHeight - kBottom - (v - y_lo) / (y_hi - y_lo) * (kHeight - kTop - kBottom);
    }
};

std::string coords(double v) { return format_fixed(v, 2); }

std::string polyline(const PlotFrame& frame, const std::vector<double>& times,
                     const std::vector<double>& values, const std::string& style) {
    std::string points;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!points.empty()) points += ' ';
        points += coords(frame.x(times[k])) + ',' + coords(frame.y(values[k]));
    }
    return "  <polyline fill=\"none\" " + style + " points=\"" + points + "\"/>\n";
}

std::string line(double x1, double y1, double x2, double y2, const std::string& style) {
    return "  <line x1=\"" + coords(x1) + "\" y1=\"" + coords(y1) + "\" x2=\"" + coords(x2) +
           "\" y2=\"" + coords(y2) + "\" " + style + "/>\n";
}

std::string text(double x, double y, const std::string& style, const std::string& body) {
    return "  <text x=\"" + coords(x) + "\" y=\"" + coords(y) + "\" " + style + ">" + body +
           "</text>\n";
}

// Tick label without trailing noise: up to 2 decimals, trimmed.
std::string tick_label(double v) {
    std::string s = format_fixed(v, 2);
    while (s.find('.') != std::string::npos && (s.back() == '0' || s.back() == '.')) {
        const bool dot = s.back() == '.';
        s.pop_back();
        if (dot) break;
    }
    return s == "-0" ? "0" : s;
}

} // namespace

std::string comparison_csv(const ComparisonReport& report) {
    std::string out =
        "time_ns,f_modelA_norm,f_modelB_norm,f_modelA_raw_per_ns,f_modelB_raw_per_ns,"
        "f_sigma0_B,f_sigma1_B\n";
    const std::size_t rows = report.original.times.size();
    for (std::size_t k = 0; k < rows; ++k) {
        out += format_double(report.original.times[k]);
        out += ',';
        out += format_double(report.original.normalized.values[k]);
        out += ',';
        out += format_double(report.corrected.normalized.values[k]);
        out += ',';
        out += format_double(report.original.total[k]);
        out += ',';
        out += format_double(report.corrected.total[k]);
        out += ',';
        out += format_double(report.corrected.manifold0[k]);
        out += ',';
        out += format_double(report.corrected.manifold1[k]);
        out += '\n';
    }
    return out;
}

std::string simulation_csv(const SimulationResult& result) {
    std::string out = "time_ns,f_norm,f_raw_per_ns,f_sigma0_per_ns,f_sigma1_per_ns\n";
    for (std::size_t k = 0; k < result.times.size(); ++k) {
        out += format_double(result.times[k]);
        out += ',';
        out += format_double(result.normalized.values[k]);
        out += ',';
        out += format_double(result.total[k]);
        out += ',';
        out += format_double(result.manifold0[k]);
        out += ',';
        out += format_double(result.manifold1[k]);
        out += '\n';
    }
    return out;
}

std::string comparison_json(const ComparisonReport& report, const RunConfig& cfg) {
    json j;
    j["tool_version"] = tool_version;
    j["n_emitters"] = report.n_emitters;
    j["config"] = config_block(cfg);
    j["models"] = {
        {"model_a", model_block(report.original)},
        {"model_b", model_block(report.corrected)},
    };
    return j.dump(2) + "\n";
}

std::string simulation_json(const SimulationResult& result, const RunConfig& cfg) {
    json j;
    j["tool_version"] = tool_version;
    j["n_emitters"] = cfg.n_emitters;
    j["config"] = config_block(cfg);
    j["model"] = model_block(result);
    return j.dump(2) + "\n";
}

std::string comparison_svg(const ComparisonReport& report, const RunConfig& cfg) {
    const auto& a = report.original;
    const auto& b = report.corrected;

    double lo = 0.0;
    for (double v : a.normalized.values) lo = std::min(lo, v);
    for (double v : b.normalized.values) lo = std::min(lo, v);
    const double pad = 0.06 * (1.0 - lo);
    const PlotFrame frame{cfg.t_max_ns, lo - pad, 1.0 + pad};

    const std::string axis_style = "stroke=\"#333333\" stroke-width=\"1\"";
    const std::string grid_style = "stroke=\"#dddddd\" stroke-width=\"1\"";
    const std::string label_style =
        "font-family=\"Helvetica, Arial, sans-serif\" font-size=\"13\" fill=\"#333333\"";

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + tick_label(kWidth) +
           " " + tick_label(kHeight) + "\">\n";
    svg += "  <rect width=\"" + tick_label(kWidth) + "\" height=\"" + tick_label(kHeight) +
           "\" fill=\"#ffffff\"/>\n";

    // Grid and ticks: six divisions in t, quarter steps in the normalized value.
    for (int k = 0; k <= 6; ++k) {
        const double t = cfg.t_max_ns * k / 6.0;
        const double x = frame.x(t);
        svg += line(x, kTop, x, kHeight - kBottom, grid_style);
        svg += text(x - 10.0, kHeight - kBottom + 18.0, label_style, tick_label(t));
    }
    for (double v = std::ceil(frame.y_lo / 0.25) * 0.25; v <= frame.y_hi + 1e-9; v += 0.25) {
        const double y = frame.y(v);
        svg += line(kLeft, y, kWidth - kRight, y, grid_style);
        svg += text(kLeft - 40.0, y + 4.0, label_style, tick_label(v));
    }
    if (frame.y_lo < 0.0) {
        svg += line(kLeft, frame.y(0.0), kWidth - kRight, frame.y(0.0),
                    "stroke=\"#999999\" stroke-width=\"1\"");
    }

    // Sign-change markers of the original model, then the two traces.
    for (double t : a.verdict.crossing_times_ns) {
        svg += line(frame.x(t), kTop, frame.x(t), kHeight - kBottom,
                    "stroke=\"#cc2222\" stroke-width=\"1\" stroke-dasharray=\"4 4\"");
    }
    for (const auto* r : {&a, &b}) {
        const double level = r->verdict.asymptote_normalized;
        const std::string color = r == &a ? "#7b3f9e" : "#2e8b57";
        svg += line(kLeft, frame.y(level), kWidth - kRight, frame.y(level),
                    "stroke=\"" + color + "\" stroke-width=\"1\" stroke-dasharray=\"2 5\"");
    }
    svg += polyline(frame, a.times, a.normalized.values,
                    "stroke=\"#7b3f9e\" stroke-width=\"1.8\"");
    svg += polyline(frame, b.times, b.normalized.values,
                    "stroke=\"#2e8b57\" stroke-width=\"1.8\" stroke-dasharray=\"8 5\"");

    // Frame, labels, legend.
    svg += line(kLeft, kTop, kLeft, kHeight - kBottom, axis_style);
    svg += line(kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom, axis_style);
    svg += text(kWidth / 2.0 - 30.0, kHeight - 16.0, label_style, "time [ns]");
    svg += text(14.0, kTop - 14.0, label_style, "normalized fluorescence, N = " +
                                                    std::to_string(report.n_emitters));
    const double lx = kWidth - kRight - 250.0;
    svg += line(lx, kTop + 16.0, lx + 36.0, kTop + 16.0,
                "stroke=\"#7b3f9e\" stroke-width=\"1.8\"");
    svg += text(lx + 44.0, kTop + 20.0, label_style,
                "model a, asymptote " + tick_label(a.verdict.asymptote_normalized));
    svg += line(lx, kTop + 36.0, lx + 36.0, kTop + 36.0,
                "stroke=\"#2e8b57\" stroke-width=\"1.8\" stroke-dasharray=\"8 5\"");
    svg += text(lx + 44.0, kTop + 40.0, label_style,
                "model b, asymptote " + tick_label(b.verdict.asymptote_normalized));
    svg += "</svg>\n";
    return svg;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw std::runtime_error("short write to '" + path + "'");
    }
}

} // namespace dicke
