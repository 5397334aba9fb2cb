#pragma once

#include <string>
#include <vector>

namespace qf {

// Entry point of the quasiflow tool. Exit codes: 0 success, 1 a record or
// check failed, 2 usage error (bad command line), 3 config-file error.
int run_cli(int argc, const char* const* argv);

struct PlotSeries {
    std::string label;
    std::vector<double> xs, ys;
};

// Standalone SVG 1.1 polyline plot, one polyline per series, written through
// a temp file + rename. Byte output is deterministic for fixed input; series
// with empty or mismatched coordinate arrays are skipped (axes still drawn).
void emit_svg_plot(const std::string& path, const std::string& title,
                   const std::vector<PlotSeries>& series);

}  // namespace qf
