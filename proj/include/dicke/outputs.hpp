// outputs.hpp — CSV traces, JSON reports, and SVG plots

#pragma once

#include <string>

#include "dicke/analysis.hpp"
#include "dicke/run_config.hpp"

namespace dicke {

// All writers produce byte-deterministic text: LF line endings, fixed
// column/key order, to_chars number formatting. Equal inputs give equal
// bytes.

// Columns: t_ns, original, original_normalized, corrected, corrected_normalized.
std::string comparison_csv(const ComparisonReport& report);

// Columns: t_ns, total, total_normalized, sigma0, sigma1.
std::string simulation_csv(const SimulationResult& result);

std::string comparison_json(const ComparisonReport& report, const RunConfig& cfg);
std::string simulation_json(const SimulationResult& result, const RunConfig& cfg);

// Self-contained plot of the normalized traces: original solid, corrected
// dashed, red vertical markers at the original model's sign changes, dotted
// asymptote levels.
std::string comparison_svg(const ComparisonReport& report, const RunConfig& cfg);

// Writes bytes as-is (binary mode); throws std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& content);

} // namespace dicke
