#pragma once

// Minimal SVG canvas in world coordinates (y axis pointing up).

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "sepkit/core.hpp"

namespace sepkit::io {

class SvgCanvas {
 public:
  SvgCanvas(const Rect& world, double width_px = 800.0, double margin_px = 10.0)
      : world_(world), margin_(margin_px) {
    if (!world.valid()) throw InvalidArgument("canvas needs a non-degenerate rectangle");
    scale_ = width_px / world.width();
    width_ = width_px + 2.0 * margin_;
    height_ = std::max(1.0, world.height() * scale_) + 2.0 * margin_;
  }

  double scale() const { return scale_; }

  /// Pixel position of a world point.
  Complex map(Complex z) const {
    return {margin_ + (z.real() - world_.x_min) * scale_,
            margin_ + (world_.y_max - z.imag()) * scale_};
  }

  /// Direction vector in pixel space (y flipped).
  static Complex screen_direction(Complex v) { return std::conj(v); }

  void raw(const std::string& text) { body_ << text << '\n'; }

  void open_group(const std::string& attrs) { body_ << "<g " << attrs << ">\n"; }
  void close_group() { body_ << "</g>\n"; }

  /// Polyline through world points, skipping points closer than min_px to the
  /// previously emitted one.
  void path(const std::vector<Complex>& pts, const std::string& cls, double min_px = 0.5) {
    body_ << "<path class=\"" << cls << "\" d=\"";
    Complex last{};
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Complex p = map(pts[k]);
      const bool first = k == 0, final = k + 1 == pts.size();
      if (!first && !final && std::abs(p - last) < min_px) continue;
      body_ << (first ? "M" : " L") << num(p.real()) << ',' << num(p.imag());
      last = p;
    }
    body_ << "\"/>\n";
  }

  /// Filled triangle with its tip at `tip_px` pointing along `dir_px`.
  void arrowhead(Complex tip_px, Complex dir_px, double size_px, const std::string& cls) {
    const Complex u = dir_px / std::abs(dir_px);
    const Complex back = tip_px - size_px * u;
    const Complex side = Complex{-u.imag(), u.real()} * (0.45 * size_px);
    body_ << "<path class=\"" << cls << "\" d=\"M" << pt(tip_px) << " L" << pt(back + side) << " L"
          << pt(back - side) << " Z\"/>\n";
  }

  void line(Complex a_px, Complex b_px) {
    body_ << "<line x1=\"" << num(a_px.real()) << "\" y1=\"" << num(a_px.imag()) << "\" x2=\""
          << num(b_px.real()) << "\" y2=\"" << num(b_px.imag()) << "\"/>\n";
  }

  void circle(Complex c_px, double r_px, const std::string& cls) {
    body_ << "<circle class=\"" << cls << "\" cx=\"" << num(c_px.real()) << "\" cy=\""
          << num(c_px.imag()) << "\" r=\"" << num(r_px) << "\"/>\n";
  }

  std::string str(const std::string& title) const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\""
       << num(height_) << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_) << "\">\n";
    os << "<title>" << escape(title) << "</title>\n";
    os << "<rect class=\"frame\" x=\"" << num(margin_) << "\" y=\"" << num(margin_)
       << "\" width=\"" << num(width_ - 2 * margin_) << "\" height=\"" << num(height_ - 2 * margin_)
       << "\" fill=\"white\" stroke=\"#999\"/>\n";
    os << body_.str() << "</svg>\n";
    return os.str();
  }

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
  }

  static std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
      switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
      }
    }
    return out;
  }

 private:
  static std::string pt(Complex p) { return num(p.real()) + "," + num(p.imag()); }

  Rect world_;
  double margin_;
  double scale_ = 1.0;
  double width_ = 0.0;
  double height_ = 0.0;
  std::ostringstream body_;
};

}  // namespace sepkit::io
