#include "evoctrl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace evoctrl {

namespace {

constexpr double kWidth = 640, kHeight = 400, kMargin = 50;
const char *kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::ofstream open_svg(const std::string &path) {
  std::ofstream os(path);
  if (!os)
    throw Error("cannot write " + path);
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os;
}

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else if (c == '&')
      out += "&amp;";
    else
      out += c;
  }
  return out;
}

// Blue-white-red for signed data, white-red otherwise.
std::string color(double v, double lo, double hi) {
  double r, g, b;
  if (lo < 0.0 && hi > 0.0) {
    const double a = std::max(-lo, hi);
    const double s = std::clamp(v / a, -1.0, 1.0);
    r = s < 0 ? 1 + s : 1;
    b = s > 0 ? 1 - s : 1;
    g = 1 - std::abs(s);
  } else {
    const double s = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.0;
    r = 1;
    g = b = 1 - s;
  }
  std::ostringstream os;
  os << "rgb(" << static_cast<int>(255 * r) << ',' << static_cast<int>(255 * g) << ','
     << static_cast<int>(255 * b) << ')';
  return os.str();
}

} // namespace

void svg_line_plot(const std::string &path, const std::string &title,
                   const std::vector<Series> &series) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto &s : series) {
    if (s.x.size() != s.y.size())
      throw DimensionError("series x and y differ in length");
    if (s.x.size() == 0)
      continue;
    x0 = std::min(x0, s.x.minCoeff());
    x1 = std::max(x1, s.x.maxCoeff());
    y0 = std::min(y0, s.y.minCoeff());
    y1 = std::max(y1, s.y.maxCoeff());
  }
  if (!(x1 > x0))
    x1 = x0 + 1.0;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto X = [&](double x) { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); };
  auto Y = [&](double y) { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); };

  auto os = open_svg(path);
  os << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\">" << escape(title)
     << "</text>\n";
  os << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
     << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (y0 < 0.0 && y1 > 0.0)
    os << "<line x1=\"" << kMargin << "\" x2=\"" << kWidth - kMargin << "\" y1=\"" << Y(0)
       << "\" y2=\"" << Y(0) << "\" stroke=\"#bbb\"/>\n";
  os << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\">" << x0
     << "</text>\n<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16
     << "\" text-anchor=\"end\">" << x1 << "</text>\n";
  os << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 4 << "\" text-anchor=\"end\">" << y1
     << "</text>\n<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin
     << "\" text-anchor=\"end\">" << y0 << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto &s = series[k];
    const char *c = kColors[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (Index i = 0; i < s.x.size(); ++i)
      os << X(s.x(i)) << ',' << Y(s.y(i)) << ' ';
    os << "\"/>\n";
    const double ly = kMargin + 16 + 16 * static_cast<double>(k);
    os << "<line x1=\"" << kWidth - kMargin - 110 << "\" x2=\"" << kWidth - kMargin - 90
       << "\" y1=\"" << ly - 4 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << c << "\"/>\n"
       << "<text x=\"" << kWidth - kMargin - 85 << "\" y=\"" << ly << "\">" << escape(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
}

void svg_heatmap(const std::string &path, const std::string &title, const Dense &values) {
  auto os = open_svg(path);
  os << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\">" << escape(title)
     << "</text>\n";
  if (values.size() == 0) {
    os << "</svg>\n";
    return;
  }
  const double lo = values.minCoeff(), hi = values.maxCoeff();
  const double cw = (kWidth - 2 * kMargin) / static_cast<double>(values.cols());
  const double ch = (kHeight - 2 * kMargin) / static_cast<double>(values.rows());
  for (Index i = 0; i < values.rows(); ++i)
    for (Index j = 0; j < values.cols(); ++j)
      os << "<rect x=\"" << kMargin + cw * static_cast<double>(j) << "\" y=\""
         << kHeight - kMargin - ch * static_cast<double>(i + 1) << "\" width=\"" << cw + 0.5
         << "\" height=\"" << ch + 0.5 << "\" fill=\"" << color(values(i, j), lo, hi) << "\"/>\n";
  os << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16 << "\">min " << lo
     << ", max " << hi << "</text>\n</svg>\n";
}

} // namespace evoctrl
