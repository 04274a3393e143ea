#pragma once

#include <string>
#include <vector>

namespace entsim {

/// Shortest round-trippable decimal representation ("%.17g" trimmed).
std::string fmt_num(double v);

/// Delimited-text writer: '#' comment lines, one header row, then data rows.
void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows);

struct Series {
    std::string name;
    std::vector<double> y;
};

/// Self-contained SVG line chart; an optional horizontal threshold line is
/// drawn at y = 0.
void svg_line_chart(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<double>& x, const std::vector<Series>& series,
                    bool zero_line);

/// SVG heatmap of a row-major grid (ny rows by nx columns); NaN cells are
/// black. Overlay polylines are drawn in data coordinates.
void svg_heatmap(const std::string& path, const std::string& title,
                 const std::vector<double>& xs, const std::vector<double>& ys,
                 const std::vector<double>& values,
                 const std::vector<std::vector<std::pair<double, double>>>& overlays);

/// SVG overlay of closed curves (e.g. noise ellipses) and rays, in data
/// coordinates with equal axis scaling.
void svg_curves(const std::string& path, const std::string& title,
                const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& curves);

} // namespace entsim
