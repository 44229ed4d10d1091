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

// Built-in digit "fonts": binary template bitmaps for the digits 0-9.
//
// Fonts 0-3 are segment-style (seven-segment skeletons), fonts 4-7 are
// curve-style (arcs and loops). Within a family, fonts differ in stroke
// thickness, slant, aspect ratio and per-digit variants (serifed 1, crossed 7,
// open 4, curved 9 tail, ...). Each template is rasterized once into a fixed
// kTemplateSize square canvas with the glyph spanning kGlyphHeight rows.

#ifndef PRIVSIM_SIMULATORS_GLYPH_BANK_H_
#define PRIVSIM_SIMULATORS_GLYPH_BANK_H_

#include <array>
#include <cstdint>
#include <vector>

namespace privsim::simulators {

struct GlyphTemplate {
  static constexpr int kSize = 64;
  // kSize x kSize, row-major, 0 or 1.
  std::vector<uint8_t> bits;
  // Inclusive ink bounding box.
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;

  bool ink(int y, int x) const { return bits[y * kSize + x] != 0; }
  int height() const { return y1 - y0 + 1; }
  int width() const { return x1 - x0 + 1; }
};

class GlyphBank {
 public:
  static constexpr int kNumFonts = 8;
  static constexpr int kNumDigits = 10;
  static constexpr int kGlyphHeight = 48;

  // Process-wide bank, built on first use.
  static const GlyphBank& Default();

  const GlyphTemplate& Get(int font, int digit) const {
    return templates_[font * kNumDigits + digit];
  }

 private:
  GlyphBank();
  std::vector<GlyphTemplate> templates_;
};

}  // namespace privsim::simulators

#endif  // PRIVSIM_SIMULATORS_GLYPH_BANK_H_
