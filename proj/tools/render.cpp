#include "render.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>

#include "bcnav/costmap.hpp"
#include "bcnav/errors.hpp"

namespace bcnav::tools {

namespace {

using Rgb = std::array<std::uint8_t, 3>;

struct Image {
  int w = 0;
  int h = 0;
  std::vector<std::uint8_t> px;  // RGB, row 0 at the top
  Image(int w_, int h_) : w(w_), h(h_), px(static_cast<std::size_t>(w_) * h_ * 3, 255) {}
  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= w || y >= h) return;
    std::copy(c.begin(), c.end(), px.begin() + (static_cast<std::size_t>(y) * w + x) * 3);
  }
};

// Viridis anchors, evenly spaced.
constexpr std::array<Rgb, 9> kRamp = {{{68, 1, 84},
                                       {71, 44, 122},
                                       {59, 81, 139},
                                       {44, 113, 142},
                                       {33, 144, 141},
                                       {39, 173, 129},
                                       {92, 200, 99},
                                       {170, 220, 50},
                                       {253, 231, 37}}};

Rgb ramp(double s) {
  s = std::clamp(s, 0.0, 1.0) * (kRamp.size() - 1);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(s), kRamp.size() - 2);
  const double f = s - k;
  Rgb out;
  for (int c = 0; c < 3; ++c) out[c] = static_cast<std::uint8_t>(std::lround(kRamp[k][c] * (1 - f) + kRamp[k + 1][c] * f));
  return out;
}

constexpr Rgb kFreeColor{235, 235, 235};
constexpr Rgb kLethalColor{30, 30, 30};

Rgb cost_color(std::uint8_t v) {
  if (v == kLethal) return kLethalColor;
  if (v == kFree) return kFreeColor;
  return ramp(v / 254.0);
}

Rgb sem_color(std::uint8_t v) {
  if (v == 1) return {120, 200, 120};
  if (v == 2) return {150, 30, 30};
  return kFreeColor;
}

Rgb dir_color(std::uint8_t v) { return v == 0 ? kFreeColor : ramp(v / 255.0); }

// Unset cells are masked out afterwards, so 0 here means "slow".
Rgb kin_color(std::uint8_t v) { return ramp(v / 255.0); }

void write_png(const std::filesystem::path& path, const Image& img) {
  std::unique_ptr<FILE, int (*)(FILE*)> f(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!f) throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encoding failed: " + path.string());
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, img.w, img.h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.h; ++y)
    png_write_row(png, const_cast<png_bytep>(img.px.data() + static_cast<std::size_t>(y) * img.w * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Grid row j = 0 is the bottom of the picture.
Image tile(const CostGrid& g, Rgb (*color)(std::uint8_t)) {
  Image img(g.spec.width, g.spec.height);
  for (int j = 0; j < g.spec.height; ++j)
    for (int i = 0; i < g.spec.width; ++i) img.set(i, g.spec.height - 1 - j, color(g.at({i, j})));
  return img;
}

void overlay(Image& img, const GridSpec& spec, const std::vector<Vec2>& trail) {
  for (const Vec2& p : trail) {
    const CellIndex c = spec.cell_of(p);
    img.set(c.i, spec.height - 1 - c.j, {220, 40, 200});
  }
}

void blit(Image& dst, const Image& src, int ox, int oy) {
  for (int y = 0; y < src.h; ++y)
    for (int x = 0; x < src.w; ++x) {
      const auto* p = src.px.data() + (static_cast<std::size_t>(y) * src.w + x) * 3;
      dst.set(ox + x, oy + y, {p[0], p[1], p[2]});
    }
}

}  // namespace

std::vector<std::filesystem::path> render_run(const std::filesystem::path& run_dir) {
  const auto layers_dir = run_dir / "layers";
  if (!std::filesystem::is_directory(layers_dir)) throw IoError("no layers/ directory in " + run_dir.string());

  std::vector<Vec2> trail;
  if (std::ifstream tf(run_dir / "trajectory.json"); tf) {
    const auto tj = nlohmann::json::parse(tf);
    for (const auto& p : tj.at("points")) trail.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
  }

  std::vector<std::filesystem::path> dirs;
  for (const auto& e : std::filesystem::directory_iterator(layers_dir))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());

  std::vector<std::filesystem::path> written;
  for (const auto& dir : dirs) {
    std::ifstream mf(dir / "grid.json");
    if (!mf) throw IoError("missing grid.json in " + dir.string());
    const GridSpec spec = grid_spec_from_json(nlohmann::json::parse(mf));

    struct Entry {
      const char* name;
      Rgb (*color)(std::uint8_t);
    };
    const Entry entries[] = {{"geo", cost_color}, {"sem", sem_color},  {"dir", dir_color},
                             {"vel", kin_color},  {"spat", cost_color}, {"kin", kin_color}};
    const int gap = 4;
    Image composite(3 * spec.width + 2 * gap, 2 * spec.height + gap);
    for (int k = 0; k < 6; ++k) {
      const CostGrid g = read_pgm(dir / (std::string("layer.") + entries[k].name + ".pgm"), spec);
      Image img = tile(g, entries[k].color);
      if (std::string_view(entries[k].name) == "kin" || std::string_view(entries[k].name) == "vel") {
        if (std::filesystem::exists(dir / "layer.kin_set.pgm")) {
          const CostGrid mask = read_pgm(dir / "layer.kin_set.pgm", spec);
          for (int j = 0; j < spec.height; ++j)
            for (int i = 0; i < spec.width; ++i)
              if (mask.at({i, j}) == 0) img.set(i, spec.height - 1 - j, kFreeColor);
        }
      }
      overlay(img, spec, trail);
      const auto out = dir / (std::string("layer.") + entries[k].name + ".png");
      write_png(out, img);
      written.push_back(out);
      blit(composite, img, (k % 3) * (spec.width + gap), (k / 3) * (spec.height + gap));
    }
    write_png(dir / "composite.png", composite);
    written.push_back(dir / "composite.png");
  }
  return written;
}

}  // namespace bcnav::tools
