#include "slelab/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace slelab {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

SvgWriter::SvgWriter(double width, double height) : width_(width), height_(height) {}

void SvgWriter::line(double x1, double y1, double x2, double y2,
                     const std::string& stroke, double stroke_width) {
    body_ += "<line x1='" + num(x1) + "' y1='" + num(y1) + "' x2='" + num(x2) +
             "' y2='" + num(y2) + "' stroke='" + stroke + "' stroke-width='" +
             num(stroke_width) + "'/>\n";
}

void SvgWriter::polyline(const std::vector<Complex>& pts, const std::string& stroke,
                         double stroke_width) {
    body_ += "<polyline fill='none' stroke='" + stroke + "' stroke-width='" +
             num(stroke_width) + "' points='";
    for (const Complex& p : pts)
        body_ += num(p.real()) + "," + num(p.imag()) + " ";
    body_ += "'/>\n";
}

void SvgWriter::polygon(const std::vector<Complex>& pts, const std::string& fill,
                        const std::string& stroke) {
    body_ += "<polygon fill='" + fill + "' stroke='" + stroke + "' points='";
    for (const Complex& p : pts)
        body_ += num(p.real()) + "," + num(p.imag()) + " ";
    body_ += "'/>\n";
}

void SvgWriter::rect(double x, double y, double w, double h, const std::string& fill,
                     const std::string& stroke) {
    body_ += "<rect x='" + num(x) + "' y='" + num(y) + "' width='" + num(w) +
             "' height='" + num(h) + "' fill='" + fill + "' stroke='" + stroke + "'/>\n";
}

void SvgWriter::circle(double cx, double cy, double r, const std::string& fill) {
    body_ += "<circle cx='" + num(cx) + "' cy='" + num(cy) + "' r='" + num(r) +
             "' fill='" + fill + "'/>\n";
}

void SvgWriter::text(double x, double y, const std::string& s, double size) {
    body_ += "<text x='" + num(x) + "' y='" + num(y) + "' font-size='" + num(size) +
             "' font-family='monospace'>" + s + "</text>\n";
}

std::string SvgWriter::str() const {
    return "<svg xmlns='http://www.w3.org/2000/svg' width='" + num(width_) +
           "' height='" + num(height_) + "' viewBox='0 0 " + num(width_) + " " +
           num(height_) + "'>\n" + body_ + "</svg>\n";
}

void SvgWriter::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DomainError("SvgWriter: cannot open " + path);
    out << str();
}

std::string svg_histogram(const std::vector<double>& samples, int bins, double lo,
                          double hi, const std::vector<double>& density) {
    const double W = 640, H = 360, pad = 30;
    SvgWriter svg(W, H);
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    for (double s : samples) {
        const int b = static_cast<int>((s - lo) / (hi - lo) * bins);
        if (b >= 0 && b < bins) counts[static_cast<std::size_t>(b)]++;
    }
    const double bw = (hi - lo) / bins;
    double ymax = 1e-12;
    for (int b = 0; b < bins; ++b)
        ymax = std::max(ymax, counts[static_cast<std::size_t>(b)] /
                                  (samples.size() * bw));
    for (double d : density) ymax = std::max(ymax, d);
    auto xs = [&](double x) { return pad + (x - lo) / (hi - lo) * (W - 2 * pad); };
    auto ys = [&](double y) { return H - pad - y / ymax * (H - 2 * pad); };
    for (int b = 0; b < bins; ++b) {
        const double dens = counts[static_cast<std::size_t>(b)] / (samples.size() * bw);
        svg.rect(xs(lo + b * bw), ys(dens), (W - 2 * pad) / bins,
                 ys(0) - ys(dens), "#9cf", "#69c");
    }
    if (!density.empty()) {
        std::vector<Complex> curve;
        for (std::size_t i = 0; i < density.size(); ++i) {
            const double x = lo + (i + 0.5) * (hi - lo) / density.size();
            curve.emplace_back(xs(x), ys(density[i]));
        }
        svg.polyline(curve, "#c33", 1.5);
    }
    svg.line(pad, H - pad, W - pad, H - pad);
    svg.line(pad, pad, pad, H - pad);
    return svg.str();
}

}  // namespace slelab
