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

#include "privsim/simulators/avatar_renderer.h"

#include <algorithm>
#include <array>
#include <initializer_list>
#include <utility>

#include "absl/status/status.h"

namespace privsim::simulators {
namespace {

struct Rgb {
  uint8_t r, g, b;
};

constexpr std::array<Rgb, 8> kBackgrounds = {{{101, 196, 228},
                                              {252, 220, 109},
                                              {173, 222, 148},
                                              {246, 166, 178},
                                              {190, 170, 238},
                                              {255, 190, 120},
                                              {120, 130, 150},
                                              {232, 232, 220}}};
constexpr std::array<Rgb, 7> kSkins = {{{255, 219, 180},
                                        {237, 185, 138},
                                        {210, 153, 108},
                                        {180, 120, 80},
                                        {141, 85, 54},
                                        {98, 60, 40},
                                        {250, 200, 200}}};
constexpr std::array<Rgb, 8> kHairColors = {{{30, 25, 20},
                                             {90, 56, 37},
                                             {165, 110, 60},
                                             {230, 200, 120},
                                             {180, 60, 30},
                                             {200, 200, 205},
                                             {70, 90, 200},
                                             {220, 90, 170}}};
constexpr std::array<Rgb, 8> kFabricColors = {{{35, 35, 40},
                                               {60, 90, 170},
                                               {200, 50, 50},
                                               {40, 140, 80},
                                               {240, 240, 240},
                                               {250, 200, 60},
                                               {130, 70, 160},
                                               {120, 120, 120}}};

constexpr Rgb kInk{25, 25, 30};
constexpr Rgb kWhite{250, 250, 250};
constexpr Rgb kMouthRed{150, 40, 50};
constexpr Rgb kHeartRed{220, 30, 60};
constexpr Rgb kTongue{235, 110, 120};

// Face ellipse.
constexpr double kFaceCx = 16.0, kFaceCy = 15.0, kFaceRx = 7.5, kFaceRy = 8.5;

Rgb Shade(Rgb c, double f) {
  auto s = [f](uint8_t v) {
    return static_cast<uint8_t>(std::clamp(v * f, 0.0, 255.0));
  };
  return {s(c.r), s(c.g), s(c.b)};
}

bool InEllipse(int x, int y, double cx, double cy, double rx, double ry) {
  const double dx = (x + 0.5 - cx) / rx;
  const double dy = (y + 0.5 - cy) / ry;
  return dx * dx + dy * dy <= 1.0;
}

class Canvas {
 public:
  Canvas() : image_(ImageShape{kAvatarCanvas, kAvatarCanvas, 3}) {}

  void Put(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= kAvatarCanvas || y >= kAvatarCanvas) return;
    image_.at(y, x, 0) = c.r;
    image_.at(y, x, 1) = c.g;
    image_.at(y, x, 2) = c.b;
  }
  void Rect(int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) Put(x, y, c);
    }
  }
  // Ellipse restricted to rows [y_min, y_max].
  void Ellipse(double cx, double cy, double rx, double ry, Rgb c,
               int y_min = 0, int y_max = kAvatarCanvas - 1) {
    for (int y = std::max(0, y_min); y <= std::min(kAvatarCanvas - 1, y_max);
         ++y) {
      for (int x = 0; x < kAvatarCanvas; ++x) {
        if (InEllipse(x, y, cx, cy, rx, ry)) Put(x, y, c);
      }
    }
  }
  void Points(std::initializer_list<std::pair<int, int>> pts, Rgb c) {
    for (auto [x, y] : pts) Put(x, y, c);
  }
  // Same pattern at both eye positions; `pts` are offsets from the left
  // eye's top-left cell (11, 11). The right eye is 7 pixels to the right.
  void BothEyes(std::initializer_list<std::pair<int, int>> pts, Rgb c) {
    for (auto [dx, dy] : pts) {
      Put(11 + dx, 11 + dy, c);
      Put(18 + dx, 11 + dy, c);
    }
  }

  Image Release() && { return std::move(image_); }

 private:
  Image image_;
};

void DrawBackground(Canvas& cv, int style, Rgb bg) {
  switch (style) {
    case 0:
      cv.Rect(0, 0, 31, 31, bg);
      break;
    case 1:
      cv.Rect(0, 0, 31, 31, Rgb{236, 236, 236});
      cv.Ellipse(16, 16, 15.5, 15.5, bg);
      break;
    default:
      cv.Rect(0, 0, 31, 31, Shade(bg, 0.7));
      cv.Rect(1, 1, 30, 30, bg);
      break;
  }
}

void DrawBackHair(Canvas& cv, int top, Rgb hair, Rgb hat) {
  switch (top) {
    case 3:  // long straight
      cv.Rect(7, 7, 24, 25, hair);
      break;
    case 4:  // long curly
      cv.Ellipse(16, 16, 10.5, 11, hair);
      break;
    case 9:  // hijab
      cv.Ellipse(16, 15, 11, 12.5, hat);
      break;
    case 10:  // bob
      cv.Rect(7, 7, 24, 20, hair);
      break;
    default:
      break;
  }
}

void DrawClothing(Canvas& cv, int clothing, Rgb fabric, int graphic) {
  const Rgb base = clothing == 4 ? kWhite : fabric;
  cv.Ellipse(16, 34, 13.5, 9.5, base, 24, 31);
  switch (clothing) {
    case 1:  // hoodie
      cv.Rect(10, 23, 21, 25, Shade(fabric, 0.75));
      cv.Points({{15, 27}, {15, 28}, {17, 27}, {17, 28}}, kWhite);
      break;
    case 2:  // blazer
      cv.Rect(14, 25, 17, 31, kWhite);
      cv.Points({{13, 25}, {13, 26}, {18, 25}, {18, 26}, {14, 27}, {17, 27}},
                Shade(fabric, 0.6));
      break;
    case 3:  // collared shirt
      cv.Points({{12, 25}, {13, 25}, {13, 26}, {18, 25}, {19, 25}, {18, 26}},
                kWhite);
      break;
    case 4:  // overalls: bib and straps over a white shirt
      cv.Rect(12, 28, 19, 31, fabric);
      cv.Rect(12, 25, 12, 27, fabric);
      cv.Rect(19, 25, 19, 27, fabric);
      break;
    default:
      break;
  }
  const int luma = (fabric.r * 299 + fabric.g * 587 + fabric.b * 114) / 1000;
  const Rgb mark = luma > 140 ? kInk : kWhite;
  switch (graphic) {
    case 1:
      cv.Rect(10, 29, 21, 29, mark);
      break;
    case 2:
      cv.Points({{11, 28}, {14, 30}, {17, 28}, {20, 30}}, mark);
      break;
    case 3:
      cv.Points({{16, 27}, {15, 28}, {17, 28}, {14, 29}, {18, 29}, {15, 30},
                 {17, 30}, {16, 31}},
                mark);
      break;
    case 4:
      cv.Rect(14, 28, 18, 30, mark);
      cv.Points({{15, 29}, {17, 29}}, fabric);
      break;
    default:
      break;
  }
}

void DrawFacialHair(Canvas& cv, int kind, Rgb color) {
  switch (kind) {
    case 1:  // mustache
      cv.Rect(13, 18, 18, 18, color);
      break;
    case 2:  // light beard along the jaw
      for (int y = 17; y < 25; ++y) {
        for (int x = 0; x < kAvatarCanvas; ++x) {
          if (InEllipse(x, y, kFaceCx, kFaceCy, kFaceRx, kFaceRy) &&
              !InEllipse(x, y, kFaceCx, kFaceCy - 0.5, kFaceRx - 1.5,
                         kFaceRy - 1.5)) {
            cv.Put(x, y, color);
          }
        }
      }
      break;
    case 3:  // full beard
      for (int y = 18; y < 25; ++y) {
        for (int x = 0; x < kAvatarCanvas; ++x) {
          if (InEllipse(x, y, kFaceCx, kFaceCy, kFaceRx, kFaceRy)) {
            cv.Put(x, y, color);
          }
        }
      }
      break;
    case 4:  // goatee
      cv.Rect(14, 21, 17, 23, color);
      break;
    default:
      break;
  }
}

void DrawMouth(Canvas& cv, int kind) {
  switch (kind) {
    case 0:  // smile
      cv.Points({{13, 19}, {14, 20}, {15, 20}, {16, 20}, {17, 20}, {18, 19}},
                kMouthRed);
      break;
    case 1:  // neutral
      cv.Rect(14, 20, 18, 20, kMouthRed);
      break;
    case 2:  // open
      cv.Rect(14, 19, 17, 20, kInk);
      cv.Rect(14, 19, 17, 19, kWhite);
      break;
    case 3:  // sad
      cv.Points({{13, 21}, {14, 20}, {15, 20}, {16, 20}, {17, 20}, {18, 21}},
                kMouthRed);
      break;
    case 4:  // tongue
      cv.Points({{13, 19}, {14, 20}, {15, 20}, {16, 20}, {17, 20}, {18, 19}},
                kMouthRed);
      cv.Points({{15, 21}, {16, 21}}, kTongue);
      break;
    case 5:  // grin
      cv.Rect(13, 19, 18, 20, kWhite);
      cv.Rect(13, 21, 18, 21, kMouthRed);
      break;
    case 6:  // "o"
      cv.Rect(15, 19, 16, 20, kInk);
      break;
    default:  // smirk
      cv.Points({{14, 20}, {15, 20}, {16, 20}, {17, 19}, {18, 18}},
                kMouthRed);
      break;
  }
}

void DrawNose(Canvas& cv, int kind, Rgb skin) {
  const Rgb shade = Shade(skin, 0.75);
  switch (kind) {
    case 0:
      cv.Points({{15, 16}, {16, 16}}, shade);
      break;
    case 1:
      cv.Rect(16, 14, 16, 17, shade);
      break;
    default:
      cv.Points({{16, 15}, {15, 17}, {16, 17}, {17, 17}}, shade);
      break;
  }
}

void DrawEyes(Canvas& cv, int kind) {
  switch (kind) {
    case 0:
      cv.BothEyes({{1, 1}, {2, 1}, {1, 2}, {2, 2}}, kInk);
      break;
    case 1:  // closed
      cv.BothEyes({{0, 2}, {1, 2}, {2, 2}}, kInk);
      break;
    case 2:  // happy
      cv.BothEyes({{0, 2}, {1, 1}, {2, 2}}, kInk);
      break;
    case 3:  // surprised
      for (int dy = 0; dy < 3; ++dy) {
        cv.BothEyes({{0, dy}, {1, dy}, {2, dy}}, kWhite);
      }
      cv.BothEyes({{1, 1}}, kInk);
      break;
    case 4:  // wink
      cv.Points({{12, 12}, {13, 12}, {12, 13}, {13, 13}}, kInk);
      cv.Points({{18, 13}, {19, 13}, {20, 13}}, kInk);
      break;
    case 5:  // hearts
      cv.BothEyes({{0, 0}, {2, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}}, kHeartRed);
      break;
    case 6:  // squint
      cv.BothEyes({{1, 2}, {2, 1}}, kInk);
      break;
    default:  // side glance
      cv.BothEyes({{0, 1}, {1, 1}, {0, 2}, {1, 2}}, kWhite);
      cv.BothEyes({{2, 1}, {2, 2}}, kInk);
      break;
  }
}

void DrawEyebrows(Canvas& cv, int kind, Rgb hair) {
  const Rgb c = Shade(hair, 0.8);
  switch (kind) {
    case 0:
      cv.BothEyes({{0, -1}, {1, -1}, {2, -1}}, c);
      break;
    case 1:  // raised
      cv.BothEyes({{0, -2}, {1, -2}, {2, -2}}, c);
      break;
    case 2:  // angry
      cv.Points({{11, 9}, {12, 10}, {13, 10}, {18, 10}, {19, 10}, {20, 9}}, c);
      break;
    case 3:  // sad
      cv.Points({{11, 10}, {12, 10}, {13, 9}, {18, 9}, {19, 10}, {20, 10}}, c);
      break;
    case 4:  // thick
      cv.BothEyes({{0, -2}, {1, -2}, {2, -2}, {0, -1}, {1, -1}, {2, -1}}, c);
      break;
    default:  // unibrow
      cv.Rect(11, 10, 20, 10, c);
      break;
  }
}

void DrawTop(Canvas& cv, int top, Rgb hair, Rgb hat) {
  auto cap = [&](Rgb c, int y_max) {
    cv.Ellipse(kFaceCx, 10.5, 8.5, 5.5, c, 0, y_max);
  };
  switch (top) {
    case 1:  // flat top
      cv.Rect(9, 5, 22, 8, hair);
      break;
    case 2:
    case 3:
      cap(hair, 9);
      break;
    case 4:
      cap(hair, 9);
      for (int x = 9; x <= 22; x += 2) cv.Put(x, 10, hair);
      break;
    case 5:  // bun
      cap(hair, 9);
      cv.Ellipse(16, 4, 3, 3, hair);
      break;
    case 6:  // mohawk
      cv.Rect(14, 1, 17, 9, hair);
      break;
    case 7:  // beanie
      cv.Rect(8, 3, 23, 9, hat);
      cv.Rect(8, 8, 23, 9, Shade(hat, 0.7));
      break;
    case 8:  // cap with brim
      cv.Rect(9, 4, 22, 8, hat);
      cv.Rect(16, 8, 27, 9, Shade(hat, 0.8));
      break;
    case 9:  // hijab front
      cap(hat, 9);
      cv.Rect(8, 9, 9, 22, hat);
      cv.Rect(22, 9, 23, 22, hat);
      break;
    case 10:  // bob with bangs
      cap(hair, 10);
      break;
    case 11:  // spiky
      cap(hair, 8);
      for (int x = 10; x <= 22; x += 3) cv.Rect(x, 3, x, 6, hair);
      break;
    default:  // bald
      break;
  }
}

void DrawAccessory(Canvas& cv, int kind) {
  switch (kind) {
    case 1: {  // round glasses
      for (int y = 9; y <= 16; ++y) {
        for (int x = 8; x <= 23; ++x) {
          for (double cx : {12.5, 19.5}) {
            const bool outer = InEllipse(x, y, cx, 12.5, 3.0, 3.0);
            const bool inner = InEllipse(x, y, cx, 12.5, 2.0, 2.0);
            if (outer && !inner) cv.Put(x, y, kInk);
          }
        }
      }
      cv.Rect(15, 12, 16, 12, kInk);
      break;
    }
    case 2:  // square glasses
      for (int x0 : {10, 17}) {
        cv.Rect(x0, 10, x0 + 4, 10, kInk);
        cv.Rect(x0, 14, x0 + 4, 14, kInk);
        cv.Rect(x0, 10, x0, 14, kInk);
        cv.Rect(x0 + 4, 10, x0 + 4, 14, kInk);
      }
      cv.Rect(15, 11, 16, 11, kInk);
      break;
    case 3:  // sunglasses
      cv.Rect(10, 11, 14, 13, Rgb{20, 20, 20});
      cv.Rect(17, 11, 21, 13, Rgb{20, 20, 20});
      cv.Rect(15, 11, 16, 11, kInk);
      break;
    default:
      break;
  }
}

constexpr int kCardinalities[kAvatarNumParams] = {3, 8, 12, 8, 6, 8, 3, 8,
                                                  5, 7, 8,  8, 4, 5, 8, 5};
constexpr const char* kNames[kAvatarNumParams] = {
    "style",        "background_color", "top",
    "hat_color",    "eyebrows",         "eyes",
    "nose",         "mouth",            "facial_hair",
    "skin_color",   "hair_color",       "facial_hair_color",
    "accessory",    "clothing",         "clothing_color",
    "shirt_graphic"};

}  // namespace

ParamSpace AvatarParamSpace() {
  std::vector<CategoricalParam> params;
  for (int i = 0; i < kAvatarNumParams; ++i) {
    params.push_back({kNames[i], kCardinalities[i]});
  }
  return *ParamSpace::Create(std::move(params), {});
}

absl::StatusOr<Image> RenderAvatar(const ParamVector& params) {
  static const ParamSpace* space = new ParamSpace(AvatarParamSpace());
  if (absl::Status s = space->Validate(params); !s.ok()) return s;
  const auto& p = params.categorical;

  const Rgb bg = kBackgrounds[p[kAvatarBackgroundColor]];
  const Rgb skin = kSkins[p[kAvatarSkinColor]];
  const Rgb hair = kHairColors[p[kAvatarHairColor]];
  const Rgb hat = kFabricColors[p[kAvatarHatColor]];
  const Rgb beard = kHairColors[p[kAvatarFacialHairColor]];
  const Rgb fabric = kFabricColors[p[kAvatarClothingColor]];

  Canvas cv;
  DrawBackground(cv, p[kAvatarStyle], bg);
  DrawBackHair(cv, p[kAvatarTop], hair, hat);
  DrawClothing(cv, p[kAvatarClothing], fabric, p[kAvatarShirtGraphic]);
  cv.Rect(13, 21, 18, 25, Shade(skin, 0.9));  // neck
  cv.Ellipse(kFaceCx, kFaceCy, kFaceRx, kFaceRy, skin);
  DrawFacialHair(cv, p[kAvatarFacialHair], beard);
  DrawMouth(cv, p[kAvatarMouth]);
  DrawNose(cv, p[kAvatarNose], skin);
  DrawEyes(cv, p[kAvatarEyes]);
  DrawEyebrows(cv, p[kAvatarEyebrows], hair);
  DrawTop(cv, p[kAvatarTop], hair, hat);
  DrawAccessory(cv, p[kAvatarAccessory]);
  return std::move(cv).Release();
}

std::vector<uint8_t> AvatarFaceMask() {
  std::vector<uint8_t> mask(kAvatarCanvas * kAvatarCanvas, 0);
  for (int y = 0; y < kAvatarCanvas; ++y) {
    for (int x = 0; x < kAvatarCanvas; ++x) {
      mask[y * kAvatarCanvas + x] =
          InEllipse(x, y, kFaceCx, kFaceCy, kFaceRx, kFaceRy) ? 1 : 0;
    }
  }
  return mask;
}

ParametricBackend MakeAvatarBackend() {
  return *ParametricBackend::Create(
      "avatar", AvatarParamSpace(),
      ImageShape{kAvatarCanvas, kAvatarCanvas, 3}, RenderAvatar);
}

}  // namespace privsim::simulators
