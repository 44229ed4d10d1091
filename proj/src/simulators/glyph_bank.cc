// Copyright 2026 The privsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privsim/simulators/glyph_bank.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace privsim::simulators {
namespace {

struct Point {
  double x, y;
};
using Polyline = std::vector<Point>;
using Strokes = std::vector<Polyline>;

enum class Family { kSegment, kCurve };

struct FontStyle {
  Family family;
  double width;      // glyph width / height
  double slant;      // horizontal shear per unit height (positive leans right)
  double thickness;  // stroke width / height
  double mid;        // height of the middle bar
  bool one_flag;     // 1 has a flag at the top
  bool one_base;     // 1 has a base serif
  bool seven_cross;  // 7 has a crossbar
  bool four_open;    // 4 has an open top
  bool nine_curved;  // 9 has a curved tail
  bool six_top;      // segment 6/9 keep their top/bottom bars
};

constexpr FontStyle kFonts[GlyphBank::kNumFonts] = {
    {Family::kSegment, 0.55, 0.00, 0.10, 0.50, false, false, false, false,
     false, true},
    {Family::kSegment, 0.60, 0.18, 0.07, 0.45, true, false, false, false,
     false, false},
    {Family::kSegment, 0.50, 0.00, 0.15, 0.55, false, true, true, false, false,
     true},
    {Family::kSegment, 0.66, -0.10, 0.06, 0.50, true, true, false, true, false,
     false},
    {Family::kCurve, 0.55, 0.00, 0.07, 0.50, false, false, false, false, false,
     true},
    {Family::kCurve, 0.50, 0.15, 0.10, 0.48, true, true, true, true, false,
     true},
    {Family::kCurve, 0.62, 0.10, 0.13, 0.52, true, false, false, false, true,
     true},
    {Family::kCurve, 0.56, -0.06, 0.09, 0.50, true, true, true, true, true,
     true},
};

// Ellipse arc with y pointing down; angles in degrees, 270 is the top.
Polyline Arc(double cx, double cy, double rx, double ry, double from_deg,
             double to_deg, int steps = 40) {
  Polyline out;
  for (int i = 0; i <= steps; ++i) {
    const double a =
        (from_deg + (to_deg - from_deg) * i / steps) * std::numbers::pi / 180.0;
    out.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  }
  return out;
}

Strokes SegmentDigit(int digit, const FontStyle& f) {
  const double m = f.mid;
  const Point A{0, 0}, B{1, 0}, C{0, m}, D{1, m}, E{0, 1}, F{1, 1};
  const Polyline a{A, B}, b{B, D}, c{D, F}, d{E, F}, e{C, E}, fs{A, C},
      g{C, D};
  switch (digit) {
    case 0:
      return {{A, B, F, E, A}};
    case 1: {
      Strokes s;
      if (f.one_flag) {
        s.push_back({{0.2, 0.2}, {0.6, 0}, {0.6, 1}});
      } else {
        s.push_back({{0.6, 0}, {0.6, 1}});
      }
      if (f.one_base) s.push_back({{0.25, 1}, {0.95, 1}});
      return s;
    }
    case 2:
      return {{A, B, D, C, E, F}};
    case 3:
      return {{A, B, F, E}, g};
    case 4:
      if (f.four_open) return {{A, C, D}, {B, F}};
      return {{{0.75, 1}, {0.75, 0}, {0, m + 0.1}, {1, m + 0.1}}};
    case 5:
      return {{B, A, C, D, F, E}};
    case 6:
      if (f.six_top) return {{B, A, E, F, D, C}};
      return {{A, E, F, D, C}};
    case 7: {
      Strokes s{{A, B, F}};
      if (f.seven_cross) s.push_back({{0.35, m}, {1, m}});
      if (!f.six_top) s.push_back(fs);
      return s;
    }
    case 8:
      return {{A, B, F, E, A}, g};
    case 9:
      if (f.six_top) return {{D, C, A, B, F, E}};
      return {{D, C, A, B, F}};
  }
  return {a, b, c, d, e, fs, g};
}

Strokes CurveDigit(int digit, const FontStyle& f) {
  const double m = f.mid;
  switch (digit) {
    case 0:
      return {Arc(0.5, 0.5, 0.5, 0.5, 0, 360, 64)};
    case 1: {
      Strokes s;
      if (f.one_flag) {
        s.push_back({{0.15, 0.28}, {0.6, 0}, {0.6, 1}});
      } else {
        s.push_back({{0.55, 0}, {0.55, 1}});
      }
      if (f.one_base) s.push_back({{0.2, 1}, {1.0, 1}});
      return s;
    }
    case 2: {
      Polyline p = Arc(0.5, 0.28, 0.48, 0.28, 165, 385);
      p.push_back({0.0, 1.0});
      p.push_back({1.0, 1.0});
      return {p};
    }
    case 3: {
      Polyline top = Arc(0.48, m / 2, 0.44, m / 2, 200, 450);
      Polyline bottom =
          Arc(0.5, m + (1 - m) / 2, 0.5, (1 - m) / 2, 270, 520);
      top.insert(top.end(), bottom.begin(), bottom.end());
      return {top};
    }
    case 4:
      if (f.four_open) {
        return {{{0.2, 0}, {0.05, 0.68}, {1, 0.68}}, {{0.72, 0.3}, {0.72, 1}}};
      }
      return {{{0.72, 1}, {0.72, 0}, {0, 0.68}, {1, 0.68}}};
    case 5: {
      Polyline p{{0.95, 0}, {0.18, 0}, {0.1, 0.45}};
      Polyline bowl = Arc(0.48, 0.69, 0.5, 0.31, 225, 510);
      p.insert(p.end(), bowl.begin(), bowl.end());
      return {p};
    }
    case 6: {
      Polyline p = Arc(0.62, 0.62, 0.56, 0.62, 280, 180, 24);
      Strokes s{p, Arc(0.5, 0.72, 0.44, 0.28, 0, 360, 48)};
      return s;
    }
    case 7: {
      Strokes s{{{0, 0}, {1, 0}, {0.32, 1}}};
      if (f.seven_cross) s.push_back({{0.3, 0.52}, {0.85, 0.52}});
      return s;
    }
    case 8:
      return {Arc(0.5, 0.25, 0.38, 0.25, 0, 360, 48),
              Arc(0.5, 0.74, 0.48, 0.26, 0, 360, 48)};
    case 9: {
      Strokes s{Arc(0.5, 0.3, 0.45, 0.3, 0, 360, 48)};
      if (f.nine_curved) {
        s.push_back(Arc(0.38, 0.3, 0.57, 0.7, 0, 110, 24));
      } else {
        s.push_back({{0.95, 0.3}, {0.78, 1}});
      }
      return s;
    }
  }
  return {};
}

double SegmentDistance(Point p, Point a, Point b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double wx = p.x - a.x, wy = p.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? (wx * vx + wy * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = wx - t * vx, dy = wy - t * vy;
  return std::sqrt(dx * dx + dy * dy);
}

GlyphTemplate Rasterize(const Strokes& strokes, const FontStyle& f) {
  constexpr int kSize = GlyphTemplate::kSize;
  const double h = GlyphBank::kGlyphHeight;
  const double w = f.width * h;
  const double half = 0.5 * f.thickness * h;
  const double top = (kSize - h) / 2.0;
  const double left = (kSize - w) / 2.0;

  // Unit-box coordinates to template pixels, with shear about mid-height.
  std::vector<std::pair<Point, Point>> segments;
  for (const Polyline& line : strokes) {
    for (size_t i = 0; i + 1 < line.size(); ++i) {
      auto map = [&](Point p) {
        return Point{left + p.x * w + f.slant * (0.5 - p.y) * h,
                     top + p.y * h};
      };
      segments.emplace_back(map(line[i]), map(line[i + 1]));
    }
  }

  GlyphTemplate t;
  t.bits.assign(kSize * kSize, 0);
  t.x0 = kSize;
  t.y0 = kSize;
  t.x1 = -1;
  t.y1 = -1;
  for (int y = 0; y < kSize; ++y) {
    for (int x = 0; x < kSize; ++x) {
      const Point p{x + 0.5, y + 0.5};
      bool ink = false;
      for (const auto& [a, b] : segments) {
        if (SegmentDistance(p, a, b) <= half) {
          ink = true;
          break;
        }
      }
      if (!ink) continue;
      t.bits[y * kSize + x] = 1;
      t.x0 = std::min(t.x0, x);
      t.x1 = std::max(t.x1, x);
      t.y0 = std::min(t.y0, y);
      t.y1 = std::max(t.y1, y);
    }
  }
  return t;
}

}  // namespace

GlyphBank::GlyphBank() {
  templates_.reserve(kNumFonts * kNumDigits);
  for (int font = 0; font < kNumFonts; ++font) {
    const FontStyle& style = kFonts[font];
    for (int digit = 0; digit < kNumDigits; ++digit) {
      const Strokes strokes = style.family == Family::kSegment
                                  ? SegmentDigit(digit, style)
                                  : CurveDigit(digit, style);
      templates_.push_back(Rasterize(strokes, style));
    }
  }
}

const GlyphBank& GlyphBank::Default() {
  static const GlyphBank* bank = new GlyphBank();
  return *bank;
}

}  // namespace privsim::simulators
