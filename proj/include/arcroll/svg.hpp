#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace arcroll {

// Minimal deterministic SVG emitter. Coordinates are written with %.6g so
// identical inputs produce identical bytes.
class SvgWriter {
 public:
  SvgWriter(std::ostream& out, double width, double height) : out_(out) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
         << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  }
  ~SvgWriter() { out_ << "</svg>\n"; }

  void rect(double x, double y, double w, double h, const std::string& fill) {
    out_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
         << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width,
            const std::string& dash = "") {
    out_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
         << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
         << num(width) << '"';
    if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << '"';
    out_ << "/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                double width, const std::string& dash = "") {
    out_ << "<polyline points=\"";
    for (size_t i = 0; i < pts.size(); ++i) {
      if (i) out_ << ' ';
      out_ << num(pts[i].first) << ',' << num(pts[i].second);
    }
    out_ << "\" fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << '"';
    if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << '"';
    out_ << "/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill) {
    out_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
         << "\" fill=\"" << fill << "\"/>\n";
  }

  void text(double x, double y, double size, const std::string& content) {
    out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << num(size)
         << "\" font-family=\"sans-serif\">" << content << "</text>\n";
  }

 private:
  static std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
  }
  std::ostream& out_;
};

}  // namespace arcroll
