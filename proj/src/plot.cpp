#include "dklb/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "dklb/error.hpp"

namespace dklb {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

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

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct Range {
  double lo = 0, hi = 1;
};

Range range_of(const std::vector<Series>& ss, bool use_x) {
  Range r{INFINITY, -INFINITY};
  for (const auto& s : ss) {
    for (double v : use_x ? s.x : s.y) {
      if (!std::isfinite(v)) continue;
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
  }
  if (!(r.lo <= r.hi)) return {0, 1};
  if (r.lo == r.hi) {
    const double pad = r.lo == 0 ? 1 : 0.05 * std::abs(r.lo);
    r.lo -= pad;
    r.hi += pad;
  }
  return r;
}

class Canvas {
 public:
  explicit Canvas(const std::string& title) {
    os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    os_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os_ << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">"
        << escape(title) << "</text>\n";
  }

  void frame(Range xr, Range yr, const std::string& xlabel, const std::string& ylabel) {
    xr_ = xr;
    yr_ = yr;
    os_ << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight
        << "\" height=\"" << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    label(kLeft, kHeight - kBottom + 16, "start", fmt("%.4g", xr.lo));
    label(kWidth - kRight, kHeight - kBottom + 16, "end", fmt("%.4g", xr.hi));
    label(kLeft - 6, kHeight - kBottom, "end", fmt("%.4g", yr.lo));
    label(kLeft - 6, kTop + 10, "end", fmt("%.4g", yr.hi));
    label((kLeft + kWidth - kRight) / 2, kHeight - 12, "middle", xlabel);
    os_ << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
        << (kTop + kHeight - kBottom) / 2 << ")\">" << escape(ylabel) << "</text>\n";
  }

  double px(double x) const { return kLeft + (x - xr_.lo) / (xr_.hi - xr_.lo) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return kHeight - kBottom - (y - yr_.lo) / (yr_.hi - yr_.lo) * (kHeight - kTop - kBottom);
  }

  void polyline(const Series& s, const char* color) {
    os_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os_ << (first ? "" : " ") << fmt("%.2f", px(s.x[i])) << ',' << fmt("%.2f", py(s.y[i]));
      first = false;
    }
    os_ << "\"/>\n";
  }

  void markers(const Series& s, const char* color) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      os_ << "<circle cx=\"" << fmt("%.2f", px(s.x[i])) << "\" cy=\"" << fmt("%.2f", py(s.y[i]))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
  }

  void bar(double x0, double x1, double y, const char* color) {
    const double top = py(y), bottom = py(yr_.lo);
    os_ << "<rect x=\"" << fmt("%.2f", px(x0)) << "\" y=\"" << fmt("%.2f", top) << "\" width=\""
        << fmt("%.2f", px(x1) - px(x0)) << "\" height=\"" << fmt("%.2f", bottom - top)
        << "\" fill=\"" << color << "\" stroke=\"white\"/>\n";
  }

  void legend(std::size_t i, const std::string& text, const char* color) {
    const double y = kTop + 16 + 16 * static_cast<double>(i);
    os_ << "<rect x=\"" << kWidth - kRight - 150 << "\" y=\"" << y - 9 << "\" width=\"10\" height=\"10\" fill=\""
        << color << "\"/>\n";
    label(kWidth - kRight - 135, y, "start", text);
  }

  void no_data() { label(kWidth / 2, kHeight / 2, "middle", "no data"); }

  void label(double x, double y, const char* anchor, const std::string& text) {
    os_ << "<text x=\"" << fmt("%.2f", x) << "\" y=\"" << fmt("%.2f", y) << "\" text-anchor=\"" << anchor
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(text) << "</text>\n";
  }

  std::string finish() {
    os_ << "</svg>\n";
    return os_.str();
  }

 private:
  std::ostringstream os_;
  Range xr_, yr_;
};

void require_prefix(const CsvTable& t, const std::vector<std::string>& prefix, PlotKind kind) {
  const auto& h = t.header();
  bool ok = h.size() >= prefix.size();
  for (std::size_t i = 0; ok && i < prefix.size(); ++i) ok = h[i] == prefix[i];
  if (!ok) {
    std::string want;
    for (const auto& p : prefix) want += (want.empty() ? "" : ",") + p;
    throw ValidationError("plot: " + plot_kind_name(kind) + " expects a header starting with '" + want + "'");
  }
}

bool is_integer(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string norm_plot(const CsvTable& t, const std::string& title) {
  require_prefix(t, {"step", "t"}, PlotKind::NormVsTime);
  if (t.header().size() < 3) throw ValidationError("plot: norm-vs-time needs at least one series column");
  Canvas c(title);
  if (t.rows().empty()) {
    c.frame({0, 1}, {0, 1}, "t", "norm");
    c.no_data();
    return c.finish();
  }
  std::vector<Series> ss;
  for (std::size_t col = 2; col < t.header().size(); ++col) {
    Series s{t.header()[col], {}, {}};
    for (std::size_t r = 0; r < t.rows().size(); ++r) {
      s.x.push_back(t.number(r, 1));
      s.y.push_back(t.number(r, col));
    }
    ss.push_back(std::move(s));
  }
  c.frame(range_of(ss, true), range_of(ss, false), "t", "norm");
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    c.polyline(ss[i], color);
    c.legend(i, ss[i].name, color);
  }
  return c.finish();
}

std::string histogram_plot(const CsvTable& t, const std::string& title) {
  if (t.header() != std::vector<std::string>{"sample_id", "ratio"}) {
    throw ValidationError("plot: histogram expects the header 'sample_id,ratio'");
  }
  std::vector<double> v;
  for (std::size_t r = 0; r < t.rows().size(); ++r) {
    if (!is_integer(t.rows()[r][0])) continue;
    const double x = t.number(r, 1);
    if (std::isfinite(x)) v.push_back(x);
  }
  Canvas c(title);
  if (v.empty()) {
    c.frame({0, 1}, {0, 1}, "ratio", "count");
    c.no_data();
    return c.finish();
  }
  constexpr std::size_t kBins = 20;
  Range xr = range_of({Series{"", v, v}}, true);
  std::vector<double> counts(kBins, 0.0);
  const double w = (xr.hi - xr.lo) / kBins;
  for (double x : v) {
    const auto b = std::min(kBins - 1, static_cast<std::size_t>((x - xr.lo) / w));
    counts[b] += 1.0;
  }
  c.frame(xr, {0, *std::max_element(counts.begin(), counts.end())}, "ratio", "count");
  for (std::size_t b = 0; b < kBins; ++b) {
    if (counts[b] > 0) c.bar(xr.lo + w * b, xr.lo + w * (b + 1), counts[b], kColors[0]);
  }
  c.legend(0, "n = " + std::to_string(v.size()), kColors[0]);
  return c.finish();
}

std::string convergence_plot(const CsvTable& t, const std::string& title) {
  require_prefix(t, {"dt", "error"}, PlotKind::Convergence);
  Series s{"error", {}, {}};
  for (std::size_t r = 0; r < t.rows().size(); ++r) {
    const double dt = t.number(r, 0), e = t.number(r, 1);
    if (dt > 0 && e > 0) {
      s.x.push_back(std::log10(dt));
      s.y.push_back(std::log10(e));
    }
  }
  Canvas c(title);
  if (s.x.empty()) {
    c.frame({0, 1}, {0, 1}, "log10 dt", "log10 error");
    c.no_data();
    return c.finish();
  }
  c.frame(range_of({s}, true), range_of({s}, false), "log10 dt", "log10 error");
  c.polyline(s, kColors[0]);
  c.markers(s, kColors[0]);
  const std::string slope = s.x.size() >= 2 ? fmt("%.3f", loglog_slope(t)) : std::string("n/a");
  c.legend(0, "slope = " + slope, kColors[0]);
  return c.finish();
}

}  // namespace

PlotKind parse_plot_kind(const std::string& name) {
  for (PlotKind k : {PlotKind::NormVsTime, PlotKind::Histogram, PlotKind::Convergence}) {
    if (plot_kind_name(k) == name) return k;
  }
  throw ValidationError("plot kind must be norm-vs-time, histogram or convergence (got '" + name + "')");
}

std::string plot_kind_name(PlotKind kind) {
  switch (kind) {
    case PlotKind::NormVsTime: return "norm-vs-time";
    case PlotKind::Histogram: return "histogram";
    case PlotKind::Convergence: return "convergence";
  }
  return "?";
}

double loglog_slope(const CsvTable& t) {
  require_prefix(t, {"dt", "error"}, PlotKind::Convergence);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < t.rows().size(); ++r) {
    const double dt = t.number(r, 0), e = t.number(r, 1);
    if (!(dt > 0 && e > 0)) continue;
    const double x = std::log(dt), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw ValidationError("plot: a slope needs at least two positive (dt, error) rows");
  const double den = n * sxx - sx * sx;
  if (den == 0) throw ValidationError("plot: a slope needs distinct dt values");
  return (n * sxy - sx * sy) / den;
}

std::string render_svg(const CsvTable& table, PlotKind kind, const std::string& title) {
  switch (kind) {
    case PlotKind::NormVsTime: return norm_plot(table, title);
    case PlotKind::Histogram: return histogram_plot(table, title);
    case PlotKind::Convergence: return convergence_plot(table, title);
  }
  return {};
}

void emit_plot(const std::string& csv_path, PlotKind kind, const std::string& svg_path) {
  const CsvTable t = CsvTable::read(csv_path);
  std::string title = csv_path;
  if (const auto slash = title.find_last_of('/'); slash != std::string::npos) title = title.substr(slash + 1);
  const std::string svg = render_svg(t, kind, title);
  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw ValidationError("plot: cannot open '" + svg_path + "' for writing");
  out << svg;
}

}  // namespace dklb
