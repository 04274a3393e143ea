#include "entsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace entsim {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    for (const std::string& c : comments) out << "# " << c << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::runtime_error("write_csv: row width mismatch in " + path);
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
}

namespace {

constexpr int kW = 720, kH = 480, kMargin = 60;

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double d = 0.05 * (hi - lo);
        lo -= d;
        hi += d;
    }
    double norm(double v) const { return (v - lo) / (hi - lo); }
};

double px(const Range& r, double v) { return kMargin + r.norm(v) * (kW - 2 * kMargin); }
double py(const Range& r, double v) { return kH - kMargin - r.norm(v) * (kH - 2 * kMargin); }

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

void svg_open(std::ofstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\" "
           "font-family=\"sans-serif\">" << title << "</text>\n";
}

void axis_labels(std::ofstream& out, const Range& rx, const Range& ry) {
    out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kW - 2 * kMargin
        << "\" height=\"" << kH - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
    char buf[64];
    auto label = [&](double x, double y, double v, const char* anchor) {
        std::snprintf(buf, sizeof buf, "%.4g", v);
        out << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor
            << "\" font-size=\"11\" font-family=\"sans-serif\">" << buf << "</text>\n";
    };
    label(kMargin, kH - kMargin + 16, rx.lo, "middle");
    label(kW - kMargin, kH - kMargin + 16, rx.hi, "middle");
    label(kMargin - 6, kH - kMargin, ry.lo, "end");
    label(kMargin - 6, kMargin + 4, ry.hi, "end");
}

} // namespace

void svg_line_chart(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<double>& x, const std::vector<Series>& series,
                    bool zero_line) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    Range rx, ry;
    for (double v : x) rx.add(v);
    for (const Series& s : series)
        for (double v : s.y) ry.add(v);
    if (zero_line) ry.add(0.0);
    rx.pad();
    ry.pad();

    svg_open(out, title);
    axis_labels(out, rx, ry);
    out << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << xlabel
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
           "font-family=\"sans-serif\" transform=\"rotate(-90 16 " << kH / 2 << ")\">" << ylabel
        << "</text>\n";
    if (zero_line) {
        out << "<line x1=\"" << kMargin << "\" x2=\"" << kW - kMargin << "\" y1=\"" << py(ry, 0)
            << "\" y2=\"" << py(ry, 0) << "\" stroke=\"black\" stroke-dasharray=\"5,4\"/>\n";
    }
    int idx = 0;
    for (const Series& s : series) {
        const char* color = kPalette[idx % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            out << px(rx, x[i]) << "," << py(ry, s.y[i]) << " ";
        }
        out << "\"/>\n";
        out << "<text x=\"" << kW - kMargin + 4 << "\" y=\"" << kMargin + 16 * (idx + 1)
            << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"" << color << "\">" << s.name
            << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
}

namespace {

std::string heat_color(double f) {
    // simple blue -> yellow -> red ramp
    f = std::clamp(f, 0.0, 1.0);
    int r, g, b;
    if (f < 0.5) {
        const double u = f / 0.5;
        r = static_cast<int>(30 + u * (250 - 30));
        g = static_cast<int>(60 + u * (220 - 60));
        b = static_cast<int>(180 * (1 - u) + 40 * u);
    } else {
        const double u = (f - 0.5) / 0.5;
        r = 250;
        g = static_cast<int>(220 * (1 - u) + 30 * u);
        b = 40;
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

} // namespace

void svg_heatmap(const std::string& path, const std::string& title,
                 const std::vector<double>& xs, const std::vector<double>& ys,
                 const std::vector<double>& values,
                 const std::vector<std::vector<std::pair<double, double>>>& overlays) {
    if (values.size() != xs.size() * ys.size())
        throw std::runtime_error("svg_heatmap: grid size mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    Range rx, ry, rv;
    for (double v : xs) rx.add(v);
    for (double v : ys) ry.add(v);
    for (double v : values) rv.add(v);
    if (!(rv.hi > rv.lo)) rv.pad();
    rx.pad();
    ry.pad();

    svg_open(out, title);
    const double cw = (kW - 2.0 * kMargin) / xs.size();
    const double ch = (kH - 2.0 * kMargin) / ys.size();
    for (std::size_t j = 0; j < ys.size(); ++j) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double v = values[j * xs.size() + i];
            const std::string color = std::isfinite(v) ? heat_color(rv.norm(v)) : "#000000";
            out << "<rect x=\"" << px(rx, xs[i]) - cw / 2 << "\" y=\"" << py(ry, ys[j]) - ch / 2
                << "\" width=\"" << cw << "\" height=\"" << ch << "\" fill=\"" << color << "\"/>\n";
        }
    }
    axis_labels(out, rx, ry);
    for (const auto& line : overlays) {
        out << "<polyline fill=\"none\" stroke=\"#ffee00\" stroke-width=\"2\" "
               "stroke-dasharray=\"6,4\" points=\"";
        for (const auto& [x, y] : line) out << px(rx, x) << "," << py(ry, y) << " ";
        out << "\"/>\n";
    }
    out << "</svg>\n";
}

void svg_curves(const std::string& path, const std::string& title,
                const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& curves) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    Range r;
    for (const auto& [name, pts] : curves)
        for (const auto& [x, y] : pts) {
            r.add(x);
            r.add(y);
        }
    r.pad();
    const double lo = -std::max(std::abs(r.lo), std::abs(r.hi));
    Range sq;
    sq.add(lo);
    sq.add(-lo);

    svg_open(out, title);
    axis_labels(out, sq, sq);
    int idx = 0;
    for (const auto& [name, pts] : curves) {
        const char* color = kPalette[idx % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : pts) out << px(sq, x) << "," << py(sq, y) << " ";
        out << "\"/>\n";
        out << "<text x=\"" << kW - kMargin + 4 << "\" y=\"" << kMargin + 16 * (idx + 1)
            << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"" << color << "\">" << name
            << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
}

} // namespace entsim
