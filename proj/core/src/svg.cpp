#include "tidp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tidp/errors.hpp"

namespace tidp::svg {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape_text(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    double place(double v, double pix_lo, double pix_hi) const {
        const double t = hi == lo ? 0.5 : (v - lo) / (hi - lo);
        return pix_lo + t * (pix_hi - pix_lo);
    }
};

Range span(const std::vector<double>& values) {
    Range r;
    r.lo = *std::min_element(values.begin(), values.end());
    r.hi = *std::max_element(values.begin(), values.end());
    if (r.hi == r.lo) {
        r.lo -= 1.0;
        r.hi += 1.0;
    }
    const double pad = 0.04 * (r.hi - r.lo);
    r.lo -= pad;
    r.hi += pad;
    return r;
}

}  // namespace

std::string scatter(const std::vector<std::pair<double, double>>& points,
                    const std::vector<std::size_t>& highlighted, const std::string& title,
                    const std::string& x_label, const std::string& y_label) {
    if (points.empty()) throw DimensionError("svg::scatter: no points");
    constexpr double kW = 860, kH = 620, kL = 70, kR = 20, kT = 44, kB = 56;

    std::vector<double> xs, ys;
    xs.reserve(points.size());
    ys.reserve(points.size());
    for (const auto& [x, y] : points) {
        xs.push_back(x);
        ys.push_back(y);
    }
    const Range rx = span(xs), ry = span(ys);

    std::string out;
    out.reserve(points.size() * 64 + 2048);
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) + "\" height=\"" +
           num(kH) + "\" viewBox=\"0 0 " + num(kW) + " " + num(kH) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(kW / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
           "font-family=\"sans-serif\">" + escape_text(title) + "</text>\n";

    // Axes with five ticks per side.
    out += "<line x1=\"" + num(kL) + "\" y1=\"" + num(kH - kB) + "\" x2=\"" + num(kW - kR) +
           "\" y2=\"" + num(kH - kB) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(kL) + "\" y1=\"" + num(kT) + "\" x2=\"" + num(kL) + "\" y2=\"" +
           num(kH - kB) + "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = rx.lo + (rx.hi - rx.lo) * t / 4.0;
        const double px = rx.place(fx, kL, kW - kR);
        out += "<line x1=\"" + num(px) + "\" y1=\"" + num(kH - kB) + "\" x2=\"" + num(px) +
               "\" y2=\"" + num(kH - kB + 5) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(px) + "\" y=\"" + num(kH - kB + 20) +
               "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" +
               num(fx) + "</text>\n";
        const double fy = ry.lo + (ry.hi - ry.lo) * t / 4.0;
        const double py = ry.place(fy, kH - kB, kT);
        out += "<line x1=\"" + num(kL - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(kL) +
               "\" y2=\"" + num(py) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(kL - 8) + "\" y=\"" + num(py + 4) +
               "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" + num(fy) +
               "</text>\n";
    }
    out += "<text x=\"" + num((kL + kW - kR) / 2) + "\" y=\"" + num(kH - 14) +
           "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" +
           escape_text(x_label) + "</text>\n";
    out += "<text x=\"18\" y=\"" + num((kT + kH - kB) / 2) +
           "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 18 " + num((kT + kH - kB) / 2) + ")\">" +
           escape_text(y_label) + "</text>\n";

    std::vector<bool> is_hl(points.size(), false);
    for (const std::size_t i : highlighted)
        if (i < points.size()) is_hl[i] = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (is_hl[i]) continue;
        out += "<circle cx=\"" + num(rx.place(points[i].first, kL, kW - kR)) + "\" cy=\"" +
               num(ry.place(points[i].second, kH - kB, kT)) +
               "\" r=\"2\" fill=\"#6688aa\" fill-opacity=\"0.5\"/>\n";
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!is_hl[i]) continue;
        out += "<circle cx=\"" + num(rx.place(points[i].first, kL, kW - kR)) + "\" cy=\"" +
               num(ry.place(points[i].second, kH - kB, kT)) +
               "\" r=\"4\" fill=\"#cc3311\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string horizontal_bars(const std::vector<std::string>& labels,
                            const std::vector<double>& values, const std::string& title) {
    if (labels.empty() || labels.size() != values.size())
        throw DimensionError("svg::horizontal_bars: labels and values must match and be non-empty");
    constexpr double kW = 860, kRowH = 28, kL = 220, kR = 30, kT = 48, kB = 20;
    const double kH = kT + kB + kRowH * static_cast<double>(labels.size());

    double max_abs = 0.0;
    for (const double v : values) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) max_abs = 1.0;
    const double zero_x = kL + (kW - kL - kR) / 2.0;
    const double unit = (kW - kL - kR) / 2.0 / max_abs;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) + "\" height=\"" +
           num(kH) + "\" viewBox=\"0 0 " + num(kW) + " " + num(kH) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(kW / 2) + "\" y=\"26\" text-anchor=\"middle\" font-size=\"16\" "
           "font-family=\"sans-serif\">" + escape_text(title) + "</text>\n";
    out += "<line x1=\"" + num(zero_x) + "\" y1=\"" + num(kT) + "\" x2=\"" + num(zero_x) +
           "\" y2=\"" + num(kH - kB) + "\" stroke=\"black\"/>\n";

    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double y = kT + kRowH * static_cast<double>(i) + 4;
        const double w = std::abs(values[i]) * unit;
        const double x = values[i] >= 0.0 ? zero_x : zero_x - w;
        const char* color = values[i] >= 0.0 ? "#117733" : "#cc3311";
        out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
               "\" height=\"" + num(kRowH - 8) + "\" fill=\"" + color + "\"/>\n";
        out += "<text x=\"" + num(kL - 10) + "\" y=\"" + num(y + kRowH / 2 + 1) +
               "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" +
               escape_text(labels[i]) + "</text>\n";
        out += "<text x=\"" + num(values[i] >= 0.0 ? x + w + 6 : x - 6) + "\" y=\"" +
               num(y + kRowH / 2 + 1) + "\" text-anchor=\"" +
               (values[i] >= 0.0 ? "start" : "end") +
               "\" font-size=\"11\" font-family=\"sans-serif\">" + num(values[i]) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace tidp::svg
