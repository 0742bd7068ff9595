#pragma once

#include <string>

namespace tsmm {

// Renders a CSV produced by this project into a self-contained SVG
// (800x500 canvas, no external dependencies):
//   - trace CSVs (k,resval,...) become a log-y residual line plot
//   - exp2 run CSVs (box,N,instance,...) become per-N box/whisker plots
//   - exp2 summary CSVs become mean +/- std error-bar plots
// Throws SchemaMismatch for unknown headers or an empty body.
void emit_plot(const std::string& csv_path, const std::string& out_path);

std::string render_plot_from_csv_text(const std::string& csv_text);

}  // namespace tsmm
