// Copyright 2026 The oversmooth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "oversmooth/cli/report.hpp"

namespace oversmooth::cli {
namespace {

constexpr std::array<std::array<std::uint8_t, 3>, 5> kRamp = {{
    {0x44, 0x01, 0x54}, {0x3b, 0x52, 0x8b}, {0x21, 0x91, 0x8c}, {0x5e, 0xc9, 0x62}, {0xfd, 0xe7, 0x25}}};

constexpr std::array<std::string_view, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                       "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Empty or flat ranges are widened so scales stay finite.
  Range padded() const {
    if (!(lo <= hi)) return {0.0, 1.0};
    if (lo == hi) return {lo - 0.5, hi + 0.5};
    return *this;
  }
  double frac(double v) const { return (v - lo) / (hi - lo); }
};

std::string hex(const std::array<std::uint8_t, 3>& c) { return fmt::format("#{:02x}{:02x}{:02x}", c[0], c[1], c[2]); }

std::string num(double v) { return fmt::format("{:.4g}", v); }

class Svg {
 public:
  Svg(double width, double height, std::string_view title) : width_(width), height_(height) {
    body_ = fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect x=\"0\" y=\"0\" width=\"{0:.0f}\" height=\"{1:.0f}\" fill=\"#ffffff\"/>\n",
        width, height);
    text(width / 2, 24, title, "middle", 16);
  }

  void text(double x, double y, std::string_view s, std::string_view anchor = "start", int size = 12,
            double rotate = 0.0) {
    std::string transform;
    if (rotate != 0.0) transform = fmt::format(" transform=\"rotate({:.0f} {:.2f} {:.2f})\"", rotate, x, y);
    body_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"{}\" font-size=\"{}\"{}>{}</text>\n", x, y,
                         anchor, size, transform, xml_escape(s));
  }
  void line(double x1, double y1, double x2, double y2, std::string_view stroke = "#000000") {
    body_ += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\"/>\n", x1, y1, x2,
                         y2, stroke);
  }
  void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke = "none") {
    body_ += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\" stroke=\"{}\"/>\n",
                         x, y, w, h, fill, stroke);
  }
  void raw(std::string_view s) { body_ += s; }

  // Axis frame with five ticks per axis and the two axis labels.
  void axes(double x0, double y0, double w, double h, const Range& xr, const Range& yr, std::string_view x_label,
            std::string_view y_label, bool x_ticks = true) {
    rect(x0, y0, w, h, "none", "#000000");
    for (int i = 0; i <= 4; ++i) {
      const double f = i / 4.0;
      if (x_ticks) {
        const double x = x0 + f * w;
        line(x, y0 + h, x, y0 + h + 5);
        text(x, y0 + h + 18, num(xr.lo + f * (xr.hi - xr.lo)), "middle", 10);
      }
      const double y = y0 + h - f * h;
      line(x0 - 5, y, x0, y);
      text(x0 - 8, y + 4, num(yr.lo + f * (yr.hi - yr.lo)), "end", 10);
    }
    text(x0 + w / 2, y0 + h + 38, x_label, "middle");
    text(x0 - 52, y0 + h / 2, y_label, "middle", 12, -90);
  }

  std::string finish() {
    text(width_ - 8, height_ - 8, fmt::format("oversmooth {}", kVersion), "end", 10);
    return body_ + "</svg>\n";
  }

 private:
  double width_, height_;
  std::string body_;
};

}  // namespace

std::array<std::uint8_t, 3> ramp_color(double t) {
  if (!std::isfinite(t)) return {0x80, 0x80, 0x80};
  t = std::clamp(t, 0.0, 1.0) * (kRamp.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(t), kRamp.size() - 2);
  const double f = t - static_cast<double>(i);
  std::array<std::uint8_t, 3> out{};
  for (std::size_t c = 0; c < 3; ++c) {
    out[c] = static_cast<std::uint8_t>(std::lround(kRamp[i][c] + f * (kRamp[i + 1][c] - kRamp[i][c])));
  }
  return out;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string line_chart(std::string_view title, std::string_view x_label, std::string_view y_label,
                       const std::vector<Series>& series) {
  constexpr double kW = 760, kH = 460, kX0 = 80, kY0 = 50, kPw = 500, kPh = 330;
  Range xr, yr;
  for (const auto& s : series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr = xr.padded();
  yr = yr.padded();
  Svg svg(kW, kH, title);
  svg.axes(kX0, kY0, kPw, kPh, xr, yr, x_label, y_label);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const auto colour = kPalette[k % kPalette.size()];
    std::string points;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      points += fmt::format("{:.2f},{:.2f} ", kX0 + xr.frac(s.x[i]) * kPw, kY0 + kPh - yr.frac(s.y[i]) * kPh);
    }
    if (!points.empty()) points.pop_back();
    svg.raw(fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", colour, points));
    const double ly = kY0 + 10 + 20.0 * static_cast<double>(k);
    svg.rect(kX0 + kPw + 20, ly - 9, 14, 10, colour);
    svg.text(kX0 + kPw + 40, ly, s.label);
  }
  return svg.finish();
}

std::string heatmap(std::string_view title, const std::vector<HeatPanel>& panels) {
  constexpr double kPanelW = 420, kX0 = 80, kY0 = 60, kSide = 260, kH = 420;
  Svg svg(std::max<double>(kPanelW * static_cast<double>(panels.size()), kPanelW), kH, title);
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& panel = panels[p];
    const double x0 = kX0 + kPanelW * static_cast<double>(p);
    const Grid& g = panel.values;
    Range vr;
    for (double v : g.values()) vr.add(v);
    const Range scale = vr.padded();
    svg.text(x0 + kSide / 2, kY0 - 12, panel.title, "middle", 13);
    const double cw = g.cols() > 0 ? kSide / static_cast<double>(g.cols()) : kSide;
    const double ch = g.rows() > 0 ? kSide / static_cast<double>(g.rows()) : kSide;
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) {
        const double v = g(r, c);
        const double t = vr.lo == vr.hi ? 0.5 : scale.frac(v);
        svg.rect(x0 + cw * static_cast<double>(c), kY0 + kSide - ch * static_cast<double>(r + 1), cw + 0.05, ch + 0.05,
                 hex(ramp_color(std::isfinite(v) ? t : std::nan(""))));
      }
    }
    const auto xr = panel.x_range ? Range{(*panel.x_range)[0], (*panel.x_range)[1]}
                                  : Range{0.0, static_cast<double>(g.cols())};
    const auto yr = panel.y_range ? Range{(*panel.y_range)[0], (*panel.y_range)[1]}
                                  : Range{0.0, static_cast<double>(g.rows())};
    svg.axes(x0, kY0, kSide, kSide, xr.padded(), yr.padded(), panel.x_label, panel.y_label);
    // Colour bar legend.
    const double bx = x0 + kSide + 15;
    constexpr int kSteps = 32;
    for (int i = 0; i < kSteps; ++i) {
      const double f = (i + 0.5) / kSteps;
      svg.rect(bx, kY0 + kSide - kSide * (i + 1) / kSteps, 12, kSide / kSteps + 0.05, hex(ramp_color(f)));
    }
    svg.rect(bx, kY0, 12, kSide, "none", "#000000");
    svg.text(bx + 16, kY0 + 10, num(scale.hi), "start", 10);
    svg.text(bx + 16, kY0 + kSide, num(scale.lo), "start", 10);
  }
  return svg.finish();
}

std::string bar_chart(std::string_view title, const std::vector<std::string>& categories,
                      const std::vector<BarPanel>& panels) {
  constexpr double kX0 = 90, kY0 = 50, kPw = 480, kPh = 170, kGap = 70, kW = 800;
  const double height = kY0 + static_cast<double>(panels.size()) * (kPh + kGap) + 20;
  Svg svg(kW, height, title);
  const double slot = categories.empty() ? kPw : kPw / static_cast<double>(categories.size());
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& panel = panels[p];
    const double y0 = kY0 + static_cast<double>(p) * (kPh + kGap);
    Range vr{0.0, 0.0};
    for (const auto& v : panel.values) {
      if (v) vr.add(*v);
    }
    vr = vr.padded();
    svg.axes(kX0, y0, kPw, kPh, Range{0.0, 1.0}, vr, "strategy", panel.y_label, false);
    const double zero = y0 + kPh - vr.frac(0.0) * kPh;
    for (std::size_t k = 0; k < panel.values.size() && k < categories.size(); ++k) {
      if (!panel.values[k] || !std::isfinite(*panel.values[k])) continue;
      const double top = y0 + kPh - vr.frac(*panel.values[k]) * kPh;
      svg.rect(kX0 + slot * (static_cast<double>(k) + 0.15), std::min(top, zero), slot * 0.7, std::abs(zero - top),
               kPalette[k % kPalette.size()]);
    }
  }
  for (std::size_t k = 0; k < categories.size(); ++k) {
    const double ly = kY0 + 10 + 20.0 * static_cast<double>(k);
    svg.rect(kX0 + kPw + 30, ly - 9, 14, 10, kPalette[k % kPalette.size()]);
    svg.text(kX0 + kPw + 50, ly, categories[k]);
  }
  return svg.finish();
}

}  // namespace oversmooth::cli
