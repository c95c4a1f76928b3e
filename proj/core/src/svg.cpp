#include <algorithm>
#include <cstdio>

#include "kftrack/io.hpp"

namespace kftrack::io {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

std::string fmt(const char* f, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::vector<double>& x, const std::vector<Series>& series) {
  constexpr double W = 480, H = 360, ml = 56, mr = 16, mt = 36, mb = 48;
  const double pw = W - ml - mr, ph = H - mt - mb;
  const double x0 = x.empty() ? 0.0 : x.front();
  const double x1 = x.empty() ? 1.0 : std::max(x.back(), x0 + 1e-12);
  auto px = [&](double v) { return ml + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return mt + (1.0 - std::clamp(v, 0.0, 1.0)) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"360\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"480\" height=\"360\" fill=\"white\"/>\n";
  s += "<text x=\"240\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
  for (int k = 0; k <= 5; ++k) {
    const double v = k / 5.0;
    s += "<line x1=\"" + fmt("%.1f", ml) + "\" x2=\"" + fmt("%.1f", ml + pw) + "\" y1=\"" + fmt("%.1f", py(v)) +
         "\" y2=\"" + fmt("%.1f", py(v)) + "\" stroke=\"#ddd\"/>\n";
    s += "<text x=\"" + fmt("%.1f", ml - 6) + "\" y=\"" + fmt("%.1f", py(v) + 4) + "\" text-anchor=\"end\">" +
         fmt("%.1f", v) + "</text>\n";
    const double xv = x0 + (x1 - x0) * k / 5.0;
    s += "<text x=\"" + fmt("%.1f", px(xv)) + "\" y=\"" + fmt("%.1f", mt + ph + 16) + "\" text-anchor=\"middle\">" +
         fmt("%g", xv) + "</text>\n";
  }
  s += "<rect x=\"" + fmt("%.1f", ml) + "\" y=\"" + fmt("%.1f", mt) + "\" width=\"" + fmt("%.1f", pw) +
       "\" height=\"" + fmt("%.1f", ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"" + fmt("%.1f", ml + pw / 2) + "\" y=\"" + fmt("%.1f", H - 10) + "\" text-anchor=\"middle\">" +
       escape(x_label) + "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& ser = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    std::string pts;
    for (std::size_t k = 0; k < std::min(x.size(), ser.y.size()); ++k) {
      if (!pts.empty()) pts += ' ';
      pts += fmt("%.2f", px(x[k])) + "," + fmt("%.2f", py(ser.y[k]));
    }
    s += std::string("<polyline fill=\"none\" stroke=\"") + color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = mt + 14 + 14 * static_cast<double>(i);
    s += std::string("<text x=\"") + fmt("%.1f", ml + pw - 8) + "\" y=\"" + fmt("%.1f", ly) +
         "\" text-anchor=\"end\" fill=\"" + color + "\">" + escape(ser.label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace kftrack::io
