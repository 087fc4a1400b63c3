#include "anykernel_cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace anykernel::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string tick_label(int e) {
  if (e >= 0 && e <= 5) return std::to_string(static_cast<long long>(std::llround(std::pow(10.0, e))));
  return "1e" + std::to_string(e);
}

}  // namespace

void write_loglog_svg(std::ostream& out, const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<Series>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0.0 && s.y[i] > 0.0)) continue;
      x0 = std::min(x0, std::log10(s.x[i]));
      x1 = std::max(x1, std::log10(s.x[i]));
      y0 = std::min(y0, std::log10(s.y[i]));
      y1 = std::max(y1, std::log10(s.y[i]));
    }
  if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  x0 = std::floor(x0), x1 = std::max(std::ceil(x1), x0 + 1.0);
  y0 = std::floor(y0), y1 = std::max(std::ceil(y1), y0 + 1.0);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (std::log10(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kTop + ph - (std::log10(v) - y0) / (y1 - y0) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(kLeft) << "\" y=\"24\" font-size=\"15\">" << escape(title) << "</text>\n";
  out << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(x0); e <= static_cast<int>(x1); ++e) {
    const double x = px(std::pow(10.0, e));
    out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(kTop + ph)
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">" << tick_label(e)
        << "</text>\n";
  }
  for (int e = static_cast<int>(y0); e <= static_cast<int>(y1); ++e) {
    const double y = py(std::pow(10.0, e));
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft + pw) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">" << tick_label(e)
        << "</text>\n";
  }
  out << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 16) << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  out << "<text transform=\"translate(20," << fmt(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(y_label) << "</text>\n";

  int row = 0;
  for (const auto& s : series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, n / 1000);
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
    for (std::size_t i = 0; i < n; i += stride) {
      if (!(s.x[i] > 0.0 && s.y[i] > 0.0)) continue;
      out << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
    }
    if (n > 0 && (n - 1) % stride != 0 && s.x[n - 1] > 0.0 && s.y[n - 1] > 0.0)
      out << fmt(px(s.x[n - 1])) << ',' << fmt(py(s.y[n - 1]));
    out << "\"/>\n";
    const double ly = kTop + 14 + 18 * row++;
    const double lx = kLeft + pw + 12;
    out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 24) << "\" y2=\"" << fmt(ly)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
        << "/>\n";
    out << "<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace anykernel::cli
