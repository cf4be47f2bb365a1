#pragma once

// Deterministic SVG plots from the CSV outputs: fixed canvas size, fixed
// number formatting and no timestamps, so equal input gives equal bytes.

#include <string>

#include "dklb/csv.hpp"

namespace dklb {

enum class PlotKind {
  NormVsTime,   // header step,t,<series...>; one line per series against t
  Histogram,    // header sample_id,ratio; rows with non-integer ids are skipped
  Convergence,  // header dt,error[,...]; log-log with the least-squares slope
};

PlotKind parse_plot_kind(const std::string& name);  // norm-vs-time | histogram | convergence
std::string plot_kind_name(PlotKind kind);

/// Throws ValidationError when the header does not match the kind.
std::string render_svg(const CsvTable& table, PlotKind kind, const std::string& title);

/// Least-squares slope of log(error) against log(dt) over rows with positive values.
double loglog_slope(const CsvTable& table);

/// Reads csv_path and writes the SVG to svg_path.
void emit_plot(const std::string& csv_path, PlotKind kind, const std::string& svg_path);

}  // namespace dklb
