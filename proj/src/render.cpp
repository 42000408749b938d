// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include "paflab/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "paflab/tensor_file.hpp"
#include "png_writer.hpp"

namespace paflab {

namespace {

// The classic 18-color limb palette.
constexpr std::uint8_t kPalette[18][3] = {
    {255, 0, 0},   {255, 85, 0},  {255, 170, 0}, {255, 255, 0}, {170, 255, 0},
    {85, 255, 0},  {0, 255, 0},   {0, 255, 85},  {0, 255, 170}, {0, 255, 255},
    {0, 170, 255}, {0, 85, 255},  {0, 0, 255},   {85, 0, 255},  {170, 0, 255},
    {255, 0, 255}, {255, 0, 170}, {255, 0, 85}};

std::uint8_t clamp_byte(double v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

// Black -> red -> yellow -> white heat ramp.
void heat_color(double v, std::uint8_t* px) {
    px[0] = clamp_byte(v * 3.0 * 255.0);
    px[1] = clamp_byte((v * 3.0 - 1.0) * 255.0);
    px[2] = clamp_byte((v * 3.0 - 2.0) * 255.0);
}

void hsv_color(double hue_deg, double value, std::uint8_t* px) {
    const double h = hue_deg / 60.0;
    const double c = value;
    const double x = c * (1.0 - std::abs(std::fmod(h, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (h < 1)      { r = c; g = x; }
    else if (h < 2) { r = x; g = c; }
    else if (h < 3) { g = c; b = x; }
    else if (h < 4) { g = x; b = c; }
    else if (h < 5) { r = x; b = c; }
    else            { r = c; b = x; }
    px[0] = clamp_byte(r * 255.0);
    px[1] = clamp_byte(g * 255.0);
    px[2] = clamp_byte(b * 255.0);
}

Image8 blank(int width, int height) {
    Image8 img;
    img.width = width;
    img.height = height;
    img.rgb.assign(static_cast<std::size_t>(width) * height * 3, 0);
    return img;
}

void draw_disc(Image8& img, int cx, int cy, int radius, const std::uint8_t* color) {
    for (int y = cy - radius; y <= cy + radius; ++y) {
        for (int x = cx - radius; x <= cx + radius; ++x) {
            if (x < 0 || y < 0 || x >= img.width || y >= img.height) continue;
            const int dx = x - cx, dy = y - cy;
            if (dx * dx + dy * dy > radius * radius) continue;
            std::copy(color, color + 3, img.pixel(x, y));
        }
    }
}

void draw_line(Image8& img, Vec2 a, Vec2 b, const std::uint8_t* color) {
    const int steps = std::max(1, static_cast<int>(std::ceil((b - a).norm())));
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const int x = static_cast<int>(std::lround(a.x + (b.x - a.x) * t));
        const int y = static_cast<int>(std::lround(a.y + (b.y - a.y) * t));
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) continue;
        std::copy(color, color + 3, img.pixel(x, y));
    }
}

}  // namespace

Image8 render_confidence(const std::vector<ScalarField>& maps, int cell_px) {
    if (maps.empty() || cell_px < 1) {
        throw std::invalid_argument("render_confidence: need maps and cell_px >= 1");
    }
    const GridSpec& grid = maps[0].grid;
    Image8 img = blank(grid.width * cell_px, grid.height * cell_px);
    for (int gy = 0; gy < grid.height; ++gy) {
        for (int gx = 0; gx < grid.width; ++gx) {
            float v = 0.0f;
            for (const auto& map : maps) {
                v = std::max(v, map.at(gx, gy));
            }
            std::uint8_t px[3];
            heat_color(v, px);
            for (int dy = 0; dy < cell_px; ++dy) {
                for (int dx = 0; dx < cell_px; ++dx) {
                    std::copy(px, px + 3, img.pixel(gx * cell_px + dx, gy * cell_px + dy));
                }
            }
        }
    }
    return img;
}

Image8 render_paf(const std::vector<VectorField>& pafs, int cell_px) {
    if (pafs.empty() || cell_px < 1) {
        throw std::invalid_argument("render_paf: need PAFs and cell_px >= 1");
    }
    const GridSpec& grid = pafs[0].grid;
    Image8 img = blank(grid.width * cell_px, grid.height * cell_px);
    for (int gy = 0; gy < grid.height; ++gy) {
        for (int gx = 0; gx < grid.width; ++gx) {
            Vec2 best{};
            double best_norm = 0.0;
            for (const auto& paf : pafs) {
                const Vec2 v = paf.at(gx, gy);
                const double n = v.norm();
                if (n > best_norm) {
                    best_norm = n;
                    best = v;
                }
            }
            std::uint8_t px[3] = {0, 0, 0};
            if (best_norm > 0.0) {
                double hue = std::atan2(best.y, best.x) * 180.0 / std::numbers::pi;
                if (hue < 0.0) hue += 360.0;
                if (hue >= 360.0) hue = 0.0;
                hsv_color(hue, std::min(best_norm, 1.0), px);
            }
            for (int dy = 0; dy < cell_px; ++dy) {
                for (int dx = 0; dx < cell_px; ++dx) {
                    std::copy(px, px + 3, img.pixel(gx * cell_px + dx, gy * cell_px + dy));
                }
            }
        }
    }
    return img;
}

Image8 render_poses(const std::vector<PoseResult>& poses, const SkeletonSpec& skeleton,
                    Vec2 image_dims) {
    const int w = std::max(1, static_cast<int>(std::ceil(image_dims.x)));
    const int h = std::max(1, static_cast<int>(std::ceil(image_dims.y)));
    Image8 img = blank(w, h);
    for (const auto& pose : poses) {
        for (int c = 0; c < skeleton.limb_count(); ++c) {
            const auto [j1, j2] = skeleton.limbs[c];
            if (!pose.parts[j1].has_value() || !pose.parts[j2].has_value()) continue;
            draw_line(img, pose.parts[j1]->pos, pose.parts[j2]->pos, kPalette[c % 18]);
        }
        for (int j = 0; j < skeleton.part_count(); ++j) {
            if (!pose.parts[j].has_value()) continue;
            draw_disc(img, static_cast<int>(std::lround(pose.parts[j]->pos.x)),
                      static_cast<int>(std::lround(pose.parts[j]->pos.y)), 2,
                      kPalette[j % 18]);
        }
    }
    return img;
}

void write_png(const std::filesystem::path& path, const Image8& image) {
    const std::string bytes = detail::encode_png_rgb8(image.width, image.height, image.rgb);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(path.string(), 0, "cannot open file for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError(path.string(), 0, "short write");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace paflab
