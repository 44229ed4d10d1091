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

#include "privsim/simulators/text_renderer.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privsim/simulators/glyph_bank.h"

namespace privsim::simulators {
namespace {

constexpr int kSupersample = 4;

// Grayscale float raster, zero outside its bounds.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Raster(int w, int h) : width(w), height(h), values(w * h, 0.0) {}

  double get(int y, int x) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return 0.0;
    return values[y * width + x];
  }
  double& at(int y, int x) { return values[y * width + x]; }

  // Bilinear interpolation at continuous pixel-index coordinates.
  double Bilinear(double x, double y) const {
    const double fx = std::floor(x), fy = std::floor(y);
    const int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
    const double ax = x - fx, ay = y - fy;
    return (1 - ay) * ((1 - ax) * get(iy, ix) + ax * get(iy, ix + 1)) +
           ay * ((1 - ax) * get(iy + 1, ix) + ax * get(iy + 1, ix + 1));
  }
};

// One pass of 8-neighborhood grayscale dilation (3x3 max filter).
Raster Dilate(const Raster& in) {
  Raster out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double m = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) m = std::max(m, in.get(y + dy, x + dx));
      }
      out.at(y, x) = m;
    }
  }
  return out;
}

}  // namespace

ParamSpace TextParamSpace(const TextSpaceOptions& options) {
  auto space = ParamSpace::Create(
      {{"font", GlyphBank::kNumFonts}, {"text", GlyphBank::kNumDigits}},
      {{"size", options.size_lo, options.size_hi, 1.0},
       {"stroke", 0.0, 2.0, 1.0},
       {"rotation", -30.0, 30.0, 0.0}});
  return *std::move(space);
}

// Range checks are the caller's job (ParamSpace::Validate).
absl::StatusOr<Image> RenderTextUnchecked(const ParamVector& params) {
  if (params.categorical.size() != 2 || params.numerical.size() != 3) {
    return absl::InvalidArgumentError("text renderer expects 2+3 parameters");
  }
  const int font = params.categorical[0];
  const int digit = params.categorical[1];
  const double size = params.numerical[0];
  const double stroke = params.numerical[1];
  const double rotation = params.numerical[2];
  if (font < 0 || font >= GlyphBank::kNumFonts || digit < 0 ||
      digit >= GlyphBank::kNumDigits) {
    return absl::InvalidArgumentError(
        absl::StrCat("font/text out of range: ", font, "/", digit));
  }
  if (!(size >= 1.0 && size <= 64.0) || !(stroke >= 0.0 && stroke <= 8.0) ||
      !(rotation >= -180.0 && rotation <= 180.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "size/stroke/rotation out of range: ", size, "/", stroke, "/",
        rotation));
  }
  const int passes = static_cast<int>(std::lround(stroke));

  const GlyphTemplate& glyph = GlyphBank::Default().Get(font, digit);
  const double scale = size / glyph.height();
  const int pad = passes + 2;
  const int inner_h = static_cast<int>(std::lround(size));
  const int inner_w = static_cast<int>(std::ceil(glyph.width() * scale));
  Raster scaled(inner_w + 2 * pad, inner_h + 2 * pad);

  // Area-weighted downscale of the binary template: supersample each target
  // pixel on a kSupersample^2 grid of template points.
  for (int v = 0; v < scaled.height; ++v) {
    for (int u = 0; u < scaled.width; ++u) {
      int hits = 0;
      for (int sy = 0; sy < kSupersample; ++sy) {
        for (int sx = 0; sx < kSupersample; ++sx) {
          const double ox = u - pad + (sx + 0.5) / kSupersample;
          const double oy = v - pad + (sy + 0.5) / kSupersample;
          const int tx = static_cast<int>(std::floor(glyph.x0 + ox / scale));
          const int ty = static_cast<int>(std::floor(glyph.y0 + oy / scale));
          if (tx >= glyph.x0 && tx <= glyph.x1 && ty >= glyph.y0 &&
              ty <= glyph.y1 && glyph.ink(ty, tx)) {
            ++hits;
          }
        }
      }
      scaled.at(v, u) =
          255.0 * hits / static_cast<double>(kSupersample * kSupersample);
    }
  }
  for (int i = 0; i < passes; ++i) scaled = Dilate(scaled);

  // Inverse-map every canvas pixel into the scaled glyph, rotating about the
  // canvas center.
  const double theta = rotation * std::numbers::pi / 180.0;
  const double c = std::cos(theta), s = std::sin(theta);
  const double canvas_center = kTextCanvas / 2.0;
  const double src_cx = scaled.width / 2.0, src_cy = scaled.height / 2.0;
  Image image(ImageShape{kTextCanvas, kTextCanvas, 1});
  for (int y = 0; y < kTextCanvas; ++y) {
    for (int x = 0; x < kTextCanvas; ++x) {
      const double dx = x + 0.5 - canvas_center;
      const double dy = y + 0.5 - canvas_center;
      const double sx = c * dx - s * dy;
      const double sy = s * dx + c * dy;
      const double value =
          scaled.Bilinear(src_cx + sx - 0.5, src_cy + sy - 0.5);
      image.at(y, x) =
          static_cast<uint8_t>(std::clamp(std::lround(value), 0L, 255L));
    }
  }
  return image;
}

absl::StatusOr<Image> RenderText(const ParamVector& params) {
  static const ParamSpace* space = new ParamSpace(TextParamSpace());
  if (absl::Status status = space->Validate(params); !status.ok()) {
    return status;
  }
  return RenderTextUnchecked(params);
}

ParametricBackend MakeTextBackend(const TextSpaceOptions& options) {
  auto backend = ParametricBackend::Create(
      "text", TextParamSpace(options), ImageShape{kTextCanvas, kTextCanvas, 1},
      RenderTextUnchecked, std::string("text"), GlyphBank::kNumDigits);
  return *std::move(backend);
}

}  // namespace privsim::simulators
