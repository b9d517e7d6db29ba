#include "pollinet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace pollinet::svg {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr int kPaletteSize = 10;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Bounds {
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
};

struct Frame {
    Bounds b;
    bool log_x, log_y;
    double px0, px1, py0, py1;  // pixel corners (py0 is the bottom)

    double tx(double x) const {
        const double v = log_x ? std::log10(x) : x;
        const double lo = log_x ? std::log10(b.x_lo) : b.x_lo;
        const double hi = log_x ? std::log10(b.x_hi) : b.x_hi;
        return px0 + (px1 - px0) * (v - lo) / (hi - lo);
    }
    double ty(double y) const {
        const double v = log_y ? std::log10(y) : y;
        const double lo = log_y ? std::log10(b.y_lo) : b.y_lo;
        const double hi = log_y ? std::log10(b.y_hi) : b.y_hi;
        return py0 - (py0 - py1) * (v - lo) / (hi - lo);
    }
};

bool usable(double v, bool log_scale) { return std::isfinite(v) && (!log_scale || v > 0.0); }

Bounds data_bounds(const std::vector<Series>& series, bool log_x, bool log_y) {
    Bounds b;
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (!usable(x, log_x) || !usable(y, log_y)) continue;
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    if (!(x_lo <= x_hi)) return log_x || log_y ? Bounds{0.1, 1, 0.1, 1} : Bounds{};
    if (x_lo == x_hi) {
        x_lo -= 0.5;
        x_hi += 0.5;
        if (log_x) {
            x_lo = std::max(x_lo, x_hi / 10.0);
        }
    }
    if (y_lo == y_hi) {
        y_lo -= 0.5;
        y_hi += 0.5;
        if (log_y) {
            y_lo = std::max(y_lo, y_hi / 10.0);
        }
    }
    if (!log_x) {
        const double pad = 0.03 * (x_hi - x_lo);
        x_lo -= pad;
        x_hi += pad;
    }
    if (!log_y) {
        const double pad = 0.05 * (y_hi - y_lo);
        y_lo -= pad;
        y_hi += pad;
    }
    return {x_lo, x_hi, y_lo, y_hi};
}

void axes(std::string& out, const Frame& f, const std::string& x_label, const std::string& y_label) {
    out += "<rect x=\"" + num(f.px0) + "\" y=\"" + num(f.py1) + "\" width=\"" + num(f.px1 - f.px0) + "\" height=\"" +
           num(f.py0 - f.py1) + "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    const int ticks = 5;
    for (int k = 0; k <= ticks; ++k) {
        const double fx = static_cast<double>(k) / ticks;
        double xv;
        if (f.log_x) {
            const double lo = std::log10(f.b.x_lo), hi = std::log10(f.b.x_hi);
            xv = std::pow(10.0, lo + fx * (hi - lo));
        } else {
            xv = f.b.x_lo + fx * (f.b.x_hi - f.b.x_lo);
        }
        const double px = f.tx(xv);
        out += "<line x1=\"" + num(px) + "\" y1=\"" + num(f.py0) + "\" x2=\"" + num(px) + "\" y2=\"" +
               num(f.py0 + 5) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + num(px) + "\" y=\"" + num(f.py0 + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">" + tick_label(xv) + "</text>\n";

        double yv;
        if (f.log_y) {
            const double lo = std::log10(f.b.y_lo), hi = std::log10(f.b.y_hi);
            yv = std::pow(10.0, lo + fx * (hi - lo));
        } else {
            yv = f.b.y_lo + fx * (f.b.y_hi - f.b.y_lo);
        }
        const double py = f.ty(yv);
        out += "<line x1=\"" + num(f.px0 - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(f.px0) + "\" y2=\"" + num(py) +
               "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + num(f.px0 - 8) + "\" y=\"" + num(py + 4) +
               "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">" + tick_label(yv) + "</text>\n";
    }
    if (!x_label.empty())
        out += "<text x=\"" + num(0.5 * (f.px0 + f.px1)) + "\" y=\"" + num(f.py0 + 36) +
               "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">" + x_label + "</text>\n";
    if (!y_label.empty())
        out += "<text x=\"" + num(f.px0 - 44) + "\" y=\"" + num(0.5 * (f.py0 + f.py1)) +
               "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 " +
               num(f.px0 - 44) + " " + num(0.5 * (f.py0 + f.py1)) + ")\">" + y_label + "</text>\n";
}

void polyline(std::string& out, const Frame& f, const Series& s, const char* color, bool markers) {
    std::string pts;
    for (const auto& [x, y] : s.points) {
        if (!usable(x, f.log_x) || !usable(y, f.log_y)) continue;
        pts += num(f.tx(x)) + "," + num(f.ty(y)) + " ";
    }
    if (!pts.empty()) {
        out += "<polyline fill=\"none\" stroke=\"";
        out += color;
        out += "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    if (markers)
        for (const auto& [x, y] : s.points) {
            if (!usable(x, f.log_x) || !usable(y, f.log_y)) continue;
            out += "<circle cx=\"" + num(f.tx(x)) + "\" cy=\"" + num(f.ty(y)) + "\" r=\"3\" fill=\"";
            out += color;
            out += "\"/>\n";
        }
}

void legend(std::string& out, const Frame& f, const std::vector<Series>& series) {
    double y = f.py1 + 14;
    for (std::size_t s = 0; s < series.size(); ++s) {
        if (series[s].label.empty()) continue;
        const char* color = kPalette[s % kPaletteSize];
        out += "<line x1=\"" + num(f.px1 - 150) + "\" y1=\"" + num(y - 4) + "\" x2=\"" + num(f.px1 - 130) + "\" y2=\"" +
               num(y - 4) + "\" stroke=\"";
        out += color;
        out += "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(f.px1 - 124) + "\" y=\"" + num(y) +
               "\" font-size=\"11\" font-family=\"sans-serif\">" + series[s].label + "</text>\n";
        y += 14;
    }
}

std::string header(int width, int height) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " + std::to_string(height) +
           "\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
}

void title_line(std::string& out, const PlotOptions& opt) {
    if (!opt.title.empty())
        out += "<text x=\"" + num(opt.width / 2.0) +
               "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\">" + opt.title +
               "</text>\n";
}

void write_file(const std::string& content, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << content;
}

}  // namespace

std::string render_lines(const std::vector<Series>& series, const PlotOptions& opt) {
    std::string out = header(opt.width, opt.height);
    title_line(out, opt);
    Frame f;
    f.b = data_bounds(series, opt.log_x, opt.log_y);
    f.log_x = opt.log_x;
    f.log_y = opt.log_y;
    f.px0 = 62;
    f.px1 = opt.width - 20.0;
    f.py0 = opt.height - 46.0;
    f.py1 = 30;
    axes(out, f, opt.x_label, opt.y_label);
    for (std::size_t s = 0; s < series.size(); ++s)
        polyline(out, f, series[s], kPalette[s % kPaletteSize], opt.markers);
    legend(out, f, series);
    out += "</svg>\n";
    return out;
}

void write_lines(const std::vector<Series>& series, const PlotOptions& options, const std::string& path) {
    write_file(render_lines(series, options), path);
}

std::string render_density_snapshots(const std::vector<double>& grid, const std::vector<Series>& plant_curves,
                                     const std::vector<Series>& poll_curves, const PlotOptions& opt) {
    // two side-by-side panels rendered as independent framed plots
    PlotOptions panel = opt;
    panel.width = opt.width / 2;
    std::string left = render_lines(plant_curves, panel);
    std::string right = render_lines(poll_curves, panel);
    (void)grid;
    std::string out = header(opt.width, opt.height);
    out += "<g>" + left.substr(left.find('\n') + 1, left.rfind("</svg>") - left.find('\n') - 1) + "</g>\n";
    out += "<g transform=\"translate(" + std::to_string(opt.width / 2) + " 0)\">" +
           right.substr(right.find('\n') + 1, right.rfind("</svg>") - right.find('\n') - 1) + "</g>\n";
    out += "</svg>\n";
    return out;
}

void write_density_snapshots(const std::vector<double>& grid, const std::vector<Series>& plant_curves,
                             const std::vector<Series>& poll_curves, const PlotOptions& options,
                             const std::string& path) {
    write_file(render_density_snapshots(grid, plant_curves, poll_curves, options), path);
}

std::string render_phase_plane(const PhasePlaneData& data, const PlotOptions& opt) {
    std::string out = header(opt.width, opt.height);
    title_line(out, opt);
    std::vector<Series> all = data.curves;
    for (const auto& [p, a, label] : data.markers) all.push_back({label, {{p, a}}});
    for (const auto& [p, a, basin] : data.basin_points) {
        (void)basin;
        all.push_back({"", {{p, a}}});
    }
    Frame f;
    f.b = data_bounds(all, false, false);
    f.log_x = f.log_y = false;
    f.px0 = 62;
    f.px1 = opt.width - 20.0;
    f.py0 = opt.height - 46.0;
    f.py1 = 30;
    axes(out, f, opt.x_label, opt.y_label);
    for (const auto& [p, a, basin] : data.basin_points)
        out += "<circle cx=\"" + num(f.tx(p)) + "\" cy=\"" + num(f.ty(a)) + "\" r=\"2\" fill=\"" +
               kPalette[(basin >= 0 ? basin + 2 : 7) % kPaletteSize] + "\" fill-opacity=\"0.45\"/>\n";
    for (std::size_t s = 0; s < data.curves.size(); ++s)
        polyline(out, f, data.curves[s], kPalette[s % kPaletteSize], false);
    for (const auto& [p, a, label] : data.markers) {
        out += "<circle cx=\"" + num(f.tx(p)) + "\" cy=\"" + num(f.ty(a)) +
               "\" r=\"4\" fill=\"#000000\" stroke=\"#ffffff\"/>\n";
        out += "<text x=\"" + num(f.tx(p) + 6) + "\" y=\"" + num(f.ty(a) - 6) +
               "\" font-size=\"11\" font-family=\"sans-serif\">" + label + "</text>\n";
    }
    legend(out, f, data.curves);
    out += "</svg>\n";
    return out;
}

void write_phase_plane(const PhasePlaneData& data, const PlotOptions& options, const std::string& path) {
    write_file(render_phase_plane(data, options), path);
}

}  // namespace pollinet::svg
