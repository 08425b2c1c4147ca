#include "fiberair/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace fiberair {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 180, kTop = 30, kBottom = 60;

const std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

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

std::vector<double> nice_ticks(double lo, double hi) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void pad(double& lo, double& hi, double frac) {
  if (hi <= lo) {
    const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= d;
    hi += d;
    return;
  }
  const double d = (hi - lo) * frac;
  lo -= d;
  hi += d;
}

class Svg {
 public:
  Svg() { s_ << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)" "\n", kWidth, kHeight)
             << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n'; }

  void axes(const Frame& f, const std::string& xlabel, const std::string& ylabel) {
    const double l = f.px(f.x0), r = f.px(f.x1), b = f.py(f.y0), t = f.py(f.y1);
    s_ << fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="none" stroke="black"/>)" "\n", l, t, r - l, b - t);
    for (double v : nice_ticks(f.x0, f.x1)) {
      const double x = f.px(v);
      s_ << fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{0:.2f}" y2="{2:.2f}" stroke="#ddd"/>)" "\n", x, b, t);
      s_ << fmt::format(R"(<text x="{:.2f}" y="{:.2f}" text-anchor="middle">{:g}</text>)" "\n", x, b + 16, v);
    }
    for (double v : nice_ticks(f.y0, f.y1)) {
      const double y = f.py(v);
      s_ << fmt::format(R"(<line x1="{0:.2f}" y1="{1:.2f}" x2="{2:.2f}" y2="{1:.2f}" stroke="#ddd"/>)" "\n", l, y, r);
      s_ << fmt::format(R"(<text x="{:.2f}" y="{:.2f}" text-anchor="end">{:g}</text>)" "\n", l - 6, y + 4, v);
    }
    s_ << fmt::format(R"(<text x="{:.2f}" y="{:.2f}" text-anchor="middle">{}</text>)" "\n", (l + r) / 2, kHeight - 20, esc(xlabel));
    s_ << fmt::format(R"~(<text transform="translate(20,{:.2f}) rotate(-90)" text-anchor="middle">{}</text>)~" "\n", (t + b) / 2, esc(ylabel));
  }

  void polyline(const Frame& f, const std::vector<std::pair<double, double>>& pts, const std::string& color,
                bool dashed = false, bool markers = true) {
    std::string d;
    for (const auto& [x, y] : pts) d += fmt::format("{:.2f},{:.2f} ", f.px(x), f.py(y));
    s_ << fmt::format(R"(<polyline points="{}" fill="none" stroke="{}" stroke-width="1.8"{}/>)" "\n", d, color,
                      dashed ? R"( stroke-dasharray="6,4")" : "");
    if (markers)
      for (const auto& [x, y] : pts)
        s_ << fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="3" fill="{}"/>)" "\n", f.px(x), f.py(y), color);
  }

  void legend(const std::vector<std::pair<std::string, std::string>>& entries) {
    double y = kTop + 10;
    const double x = kWidth - kRight + 12;
    for (const auto& [label, color] : entries) {
      s_ << fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="{}" stroke-width="2"/>)" "\n", x, y, x + 20, y, color);
      s_ << fmt::format(R"(<text x="{:.2f}" y="{:.2f}">{}</text>)" "\n", x + 26, y + 4, esc(label));
      y += 18;
    }
  }

  void raw(const std::string& text) { s_ << text; }

  void save(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << s_.str() << "</svg>\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
  }

 private:
  std::ostringstream s_;
};

// Blue-to-yellow ramp for heatmaps.
std::string ramp(double v) {
  v = std::clamp(v, 0.0, 1.0);
  const std::array<std::array<double, 3>, 5> stops{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  const double s = v * 4.0;
  const int i = std::min(3, static_cast<int>(s));
  const double t = s - i;
  auto c = [&](int k) { return static_cast<int>(std::lround(stops[i][k] + t * (stops[i + 1][k] - stops[i][k]))); };
  return fmt::format("#{:02x}{:02x}{:02x}", c(0), c(1), c(2));
}

// Marching squares over a row-major field z[i*nx + k] with x = xs[k], y = ys[i].
std::vector<std::array<double, 4>> contour_segments(const std::vector<double>& z, const std::vector<double>& xs,
                                                    const std::vector<double>& ys, double level) {
  std::vector<std::array<double, 4>> segs;
  const std::size_t nx = xs.size(), ny = ys.size();
  auto at = [&](std::size_t i, std::size_t k) { return z[i * nx + k]; };
  auto lerp = [&](double a, double b, double za, double zb) { return a + (level - za) / (zb - za) * (b - a); };
  for (std::size_t i = 0; i + 1 < ny; ++i)
    for (std::size_t k = 0; k + 1 < nx; ++k) {
      const double z00 = at(i, k), z01 = at(i, k + 1), z10 = at(i + 1, k), z11 = at(i + 1, k + 1);
      std::vector<std::pair<double, double>> pts;
      if ((z00 < level) != (z01 < level)) pts.emplace_back(lerp(xs[k], xs[k + 1], z00, z01), ys[i]);
      if ((z01 < level) != (z11 < level)) pts.emplace_back(xs[k + 1], lerp(ys[i], ys[i + 1], z01, z11));
      if ((z10 < level) != (z11 < level)) pts.emplace_back(lerp(xs[k], xs[k + 1], z10, z11), ys[i + 1]);
      if ((z00 < level) != (z10 < level)) pts.emplace_back(xs[k], lerp(ys[i], ys[i + 1], z00, z10));
      for (std::size_t p = 0; p + 1 < pts.size(); p += 2)
        segs.push_back({pts[p].first, pts[p].second, pts[p + 1].first, pts[p + 1].second});
    }
  return segs;
}

}  // namespace

void render_air_plot(const std::vector<RunRecord>& records, const std::filesystem::path& svg_path,
                     std::optional<double> noise_power_w) {
  std::map<std::pair<Scheme, PhaseModel>, std::vector<std::pair<double, double>>> series;
  for (const auto& r : records)
    if (r.ok && std::isfinite(r.result.air)) series[{r.scheme, r.receiver}].emplace_back(r.power_dbm, r.result.air);
  if (series.empty()) throw std::invalid_argument("render_air_plot: no successful records");

  double x0 = 1e300, x1 = -1e300, y0 = 0.0, y1 = -1e300;
  for (auto& [k, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  std::vector<std::pair<double, double>> ref;
  if (noise_power_w && *noise_power_w > 0.0) {
    const double lo = x0 == x1 ? x0 - 1 : x0, hi = x0 == x1 ? x1 + 1 : x1;
    for (int i = 0; i <= 100; ++i) {
      const double p = lo + (hi - lo) * i / 100.0;
      ref.emplace_back(p, std::log2(1.0 + units::dbm_to_watt(p) / *noise_power_w));
      y1 = std::max(y1, ref.back().second);
    }
  }
  pad(x0, x1, 0.05);
  pad(y0, y1, 0.05);
  y0 = std::max(y0, 0.0);
  const Frame f{x0, x1, y0, y1};
  Svg svg;
  svg.axes(f, "launch power per channel [dBm]", "AIR [bit/symbol]");
  std::vector<std::pair<std::string, std::string>> legend;
  std::size_t c = 0;
  for (const auto& [k, pts] : series) {
    const std::string color = kPalette[c++ % kPalette.size()];
    svg.polyline(f, pts, color, k.second != PhaseModel::AWGN);
    legend.emplace_back(fmt::format("{} / {}", to_string(k.first), to_string(k.second)), color);
  }
  if (!ref.empty()) {
    svg.polyline(f, ref, "#555", true, false);
    legend.emplace_back("AWGN capacity", "#555");
  }
  svg.legend(legend);
  svg.save(svg_path);
}

std::vector<std::filesystem::path> render_correlation_plots(const std::vector<LabeledGrid>& grids,
                                                            const std::filesystem::path& dir,
                                                            const std::string& stem) {
  if (grids.empty()) throw std::invalid_argument("render_correlation_plots: no grids");
  double norm = 0.0;
  for (const auto& g : grids) {
    if (g.grid.values.empty()) throw std::invalid_argument("render_correlation_plots: empty grid");
    norm = std::max(norm, g.grid.peak());
  }
  if (!(norm > 0.0)) norm = 1.0;
  std::vector<std::filesystem::path> written;

  for (const auto& [label, g] : grids) {
    std::vector<double> xs, ys, z;
    for (double t : g.tau) xs.push_back(t * 1e12);
    for (double d : g.delta_f) ys.push_back(d * 1e-9);
    for (const auto& v : g.values) z.push_back(std::abs(v) / norm);
    double x0 = xs.front(), x1 = xs.back(), y0 = ys.front(), y1 = ys.back();
    pad(x0, x1, 0.0);
    pad(y0, y1, 0.0);
    const Frame f{x0, x1, y0, y1};
    Svg svg;
    for (std::size_t i = 0; i < ys.size(); ++i)
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const double xl = k == 0 ? xs[0] : 0.5 * (xs[k - 1] + xs[k]);
        const double xr = k + 1 == xs.size() ? xs[k] : 0.5 * (xs[k] + xs[k + 1]);
        const double yl = i == 0 ? ys[0] : 0.5 * (ys[i - 1] + ys[i]);
        const double yh = i + 1 == ys.size() ? ys[i] : 0.5 * (ys[i] + ys[i + 1]);
        svg.raw(fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}"/>)" "\n",
                            f.px(xl), f.py(yh), std::max(0.0, f.px(xr) - f.px(xl)) + 0.3,
                            std::max(0.0, f.py(yl) - f.py(yh)) + 0.3, ramp(z[i * xs.size() + k])));
      }
    if (xs.size() > 1 && ys.size() > 1)
      for (int lvl = 1; lvl <= 9; ++lvl)
        for (const auto& s : contour_segments(z, xs, ys, lvl / 10.0))
          svg.raw(fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="white" stroke-width="0.8"/>)" "\n",
                              f.px(s[0]), f.py(s[1]), f.px(s[2]), f.py(s[3])));
    svg.axes(f, "tau [ps]", "delta f [GHz]");
    svg.raw(fmt::format(R"(<text x="{:.2f}" y="20" text-anchor="middle">{} |R(0, delta f, tau)| / max</text>)" "\n",
                        (kWidth - kRight + kLeft) / 2, esc(label)));
    const auto path = dir / fmt::format("{}_{}_contour.svg", stem, label);
    svg.save(path);
    written.push_back(path);
  }

  auto sections = [&](bool freq) {
    double x0 = 1e300, x1 = -1e300, y0 = 0.0, y1 = 0.0;
    std::vector<std::vector<std::pair<double, double>>> lines;
    for (const auto& [label, g] : grids) {
      std::vector<std::pair<double, double>> pts;
      if (freq) {
        const std::size_t k0 = g.tau_zero_index();
        for (std::size_t i = 0; i < g.delta_f.size(); ++i) pts.emplace_back(g.delta_f[i] * 1e-9, std::abs(g.at(i, k0)) / norm);
      } else {
        const std::size_t i0 = g.delta_f_zero_index();
        for (std::size_t k = 0; k < g.tau.size(); ++k) pts.emplace_back(g.tau[k] * 1e12, g.at(i0, k).real() / norm);
      }
      for (const auto& [x, y] : pts) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
      lines.push_back(std::move(pts));
    }
    pad(x0, x1, 0.0);
    pad(y0, y1, 0.05);
    const Frame f{x0, x1, y0, y1};
    Svg svg;
    svg.axes(f, freq ? "delta f [GHz]" : "tau [ps]", freq ? "|R(0, delta f, 0)| (normalized)" : "Re R(0, 0, tau) (normalized)");
    std::vector<std::pair<std::string, std::string>> legend;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string color = kPalette[i % kPalette.size()];
      svg.polyline(f, lines[i], color, false, false);
      legend.emplace_back(grids[i].label, color);
    }
    svg.legend(legend);
    const auto path = dir / fmt::format("{}_{}.svg", stem, freq ? "freq" : "time");
    svg.save(path);
    written.push_back(path);
  };
  sections(true);
  sections(false);
  return written;
}

}  // namespace fiberair
