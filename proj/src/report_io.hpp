#pragma once

#include "certify.hpp"

#include <string>

// Report emission: JSON, a markdown table, CSV, and an SVG convergence plot.
// Output is deterministic byte-for-byte for identical runs; wall-clock
// timings are isolated in a separate "timings" field.

namespace framecert::report_io {

std::string report_json(const certify::HierarchyReport& report);
std::string report_markdown(const certify::HierarchyReport& report);
std::string report_csv(const certify::HierarchyReport& report);
std::string convergence_svg(const certify::HierarchyReport& report);

void write_file(const std::string& path, const std::string& content);

}  // namespace framecert::report_io
