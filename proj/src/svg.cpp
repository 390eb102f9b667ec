#include "rfio/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "rfio/core.hpp"

namespace rfio {

namespace {

constexpr double kW = 640, kH = 420, kL = 80, kR = 170, kT = 40, kB = 60;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Axis {
  bool log = false;
  double lo = 0, hi = 1;
  double map(double v) const { return log ? std::log10(v) : v; }
  double frac(double v) const { return (map(v) - lo) / (hi - lo); }
  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      for (int e = static_cast<int>(std::floor(lo)); e <= static_cast<int>(std::ceil(hi)); ++e)
        if (e >= lo - 1e-9 && e <= hi + 1e-9) t.push_back(std::pow(10.0, e));
      if (t.size() < 2) t = {std::pow(10.0, lo), std::pow(10.0, hi)};
      return t;
    }
    const double span = hi - lo;
    const double raw = span / 5;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(std::abs(v) < 1e-12 * span ? 0 : v);
    return t;
  }
};

Axis make_axis(const Plot& p, bool x) {
  Axis a;
  a.log = x ? p.logx : p.logy;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : p.series)
    for (double v : x ? s.x : s.y) {
      if (!std::isfinite(v) || (a.log && v <= 0)) continue;
      lo = std::min(lo, a.map(v));
      hi = std::max(hi, a.map(v));
    }
  if (!std::isfinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
    lo -= a.log ? 0.5 : 0.5 * std::max(1e-3, std::abs(lo));
    hi += a.log ? 0.5 : 0.5 * std::max(1e-3, std::abs(hi));
  }
  const double pad = 0.05 * (hi - lo);
  a.lo = lo - pad;
  a.hi = hi + pad;
  return a;
}

}  // namespace

std::string svg_render(const Plot& p) {
  const Axis ax = make_axis(p, true), ay = make_axis(p, false);
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  auto X = [&](double v) { return kL + pw * ax.frac(v); };
  auto Y = [&](double v) { return kT + ph * (1 - ay.frac(v)); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kL + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(p.title) << "</text>\n";
  os << "<rect x=\"" << num(kL) << "\" y=\"" << num(kT) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    const double x = X(t);
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(kT + ph) << "\" x2=\"" << num(x) << "\" y2=\"" << num(kT + ph + 5)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(x) << "\" y=\"" << num(kT + ph + 18) << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = Y(t);
    os << "<line x1=\"" << num(kL - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kL) << "\" y2=\"" << num(y)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(kL - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << num(kL + pw / 2) << "\" y=\"" << num(kH - 15) << "\" text-anchor=\"middle\">" << esc(p.xlabel)
     << (p.logx ? " (log)" : "") << "</text>\n";
  os << "<text transform=\"translate(18," << num(kT + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">" << esc(p.ylabel)
     << (p.logy ? " (log)" : "") << "</text>\n";
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* color = kColors[k % 8];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if ((p.logx && s.x[i] <= 0) || (p.logy && s.y[i] <= 0)) continue;
      pts += num(X(s.x[i])) + "," + num(Y(s.y[i])) + " ";
      os << "<circle cx=\"" << num(X(s.x[i])) << "\" cy=\"" << num(Y(s.y[i])) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    if (!pts.empty()) pts.pop_back();
    os << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    const double ly = kT + 14 + 18 * k;
    os << "<line x1=\"" << num(kW - kR + 10) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(kW - kR + 30) << "\" y2=\""
       << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << num(kW - kR + 35) << "\" y=\"" << num(ly) << "\">" << esc(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void svg_write(const std::string& path, const Plot& p) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  os << svg_render(p);
}

}  // namespace rfio
