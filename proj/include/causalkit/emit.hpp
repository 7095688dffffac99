#pragma once

#include <string>
#include <vector>

#include "causalkit/explain.hpp"
#include "causalkit/graph.hpp"

namespace causalkit {

// Shortest decimal string that round-trips the value (std::to_chars).
std::string format_double(double v);

// "method,predictor,raw,normalized" rows, one per (report, predictor).
// All reports must share one predictor set.
std::string report_csv(const std::vector<ImportanceReport>& reports);

// Grouped bar chart: one group per predictor, one bar per method at its
// normalized height, legend with the method labels.  Byte-deterministic.
std::string report_svg(const std::vector<ImportanceReport>& reports,
                       const std::string& title = "");

// Circle-layout drawing of a partially directed graph; arrowheads on
// directed edges only.  Byte-deterministic.
std::string cpdag_svg(const Cpdag& g, const std::string& title = "");

// Writes content to path, creating parent directories.  IoError on failure.
void write_text_file(const std::string& path, const std::string& content);

void emit_report_csv(const std::vector<ImportanceReport>& reports, const std::string& path);
void emit_report_svg(const std::vector<ImportanceReport>& reports, const std::string& path,
                     const std::string& title = "");

}  // namespace causalkit
