#pragma once

#include <string>
#include <utility>
#include <vector>

namespace pollinet::svg {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
    std::string title, x_label, y_label;
    bool log_x = false, log_y = false;
    int width = 820, height = 520;
    bool markers = false;  // draw point markers in addition to the polyline
};

/// Self-contained SVG line plot; byte-identical output for identical input.
std::string render_lines(const std::vector<Series>& series, const PlotOptions& options);

void write_lines(const std::vector<Series>& series, const PlotOptions& options, const std::string& path);

/// Two stacked panels sharing the x axis (plant and pollinator densities at
/// several times).
std::string render_density_snapshots(const std::vector<double>& grid, const std::vector<Series>& plant_curves,
                                     const std::vector<Series>& poll_curves, const PlotOptions& options);

void write_density_snapshots(const std::vector<double>& grid, const std::vector<Series>& plant_curves,
                             const std::vector<Series>& poll_curves, const PlotOptions& options,
                             const std::string& path);

/// Phase-plane: nullcline polylines, equilibrium markers, optional basin dots.
struct PhasePlaneData {
    std::vector<Series> curves;                                     // nullclines / trajectories
    std::vector<std::tuple<double, double, std::string>> markers;   // (P, A, label)
    std::vector<std::tuple<double, double, int>> basin_points;      // (P, A, basin index)
};
std::string render_phase_plane(const PhasePlaneData& data, const PlotOptions& options);
void write_phase_plane(const PhasePlaneData& data, const PlotOptions& options, const std::string& path);

}  // namespace pollinet::svg
