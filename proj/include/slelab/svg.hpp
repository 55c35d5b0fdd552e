#pragma once

#include <string>
#include <vector>

#include "slelab/core.hpp"

namespace slelab {

/// Minimal SVG writer for region outlines, histograms and lattice snapshots.
class SvgWriter {
  public:
    SvgWriter(double width, double height);

    void line(double x1, double y1, double x2, double y2,
              const std::string& stroke = "#333", double stroke_width = 1.0);
    void polyline(const std::vector<Complex>& pts, const std::string& stroke = "#06c",
                  double stroke_width = 1.0);
    void polygon(const std::vector<Complex>& pts, const std::string& fill = "none",
                 const std::string& stroke = "#333");
    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none");
    void circle(double cx, double cy, double r, const std::string& fill = "#c33");
    void text(double x, double y, const std::string& s, double size = 12.0);

    std::string str() const;
    void save(const std::string& path) const;

  private:
    double width_, height_;
    std::string body_;
};

/// Histogram of samples against an analytic density sampled at bin centers.
std::string svg_histogram(const std::vector<double>& samples, int bins, double lo,
                          double hi, const std::vector<double>& density);

}  // namespace slelab
