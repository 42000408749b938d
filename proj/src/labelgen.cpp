// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include "paflab/labelgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace paflab {

namespace {

void check_persons(const std::vector<PersonAnnotation>& persons, int num_parts) {
    for (const auto& p : persons) {
        if (static_cast<int>(p.keypoints.size()) != num_parts) {
            throw std::invalid_argument("labelgen: annotation part count does not match skeleton");
        }
        for (const auto& kp : p.keypoints) {
            if (kp.labeled() && (!std::isfinite(kp.x) || !std::isfinite(kp.y))) {
                throw std::invalid_argument("labelgen: labeled keypoint with non-finite coordinates");
            }
        }
    }
}

}  // namespace

std::vector<ScalarField> gen_confidence_maps(const std::vector<PersonAnnotation>& persons,
                                             const SkeletonSpec& skeleton,
                                             const LabelGenConfig& cfg) {
    cfg.grid.validate();
    if (!(cfg.sigma > 0.0)) {
        throw std::invalid_argument("labelgen: sigma must be > 0");
    }
    const int num_parts = skeleton.part_count();
    check_persons(persons, num_parts);

    std::vector<ScalarField> maps;
    maps.reserve(num_parts);
    for (int j = 0; j < num_parts; ++j) {
        maps.push_back(ScalarField::zeros(cfg.grid));
    }

    const double radius = cfg.gaussian_cutoff * cfg.sigma;
    const double r2 = radius * radius;
    const double inv_two_sigma2 = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
    const int w = cfg.grid.width;
    const int h = cfg.grid.height;

    for (const auto& person : persons) {
        for (int j = 0; j < num_parts; ++j) {
            const Keypoint& kp = person.keypoints[j];
            if (!kp.labeled()) continue;
            const Vec2 g = cfg.grid.image_to_grid({kp.x, kp.y});
            const int x_lo = std::max(0, static_cast<int>(std::ceil(g.x - radius)));
            const int x_hi = std::min(w - 1, static_cast<int>(std::floor(g.x + radius)));
            const int y_lo = std::max(0, static_cast<int>(std::ceil(g.y - radius)));
            const int y_hi = std::min(h - 1, static_cast<int>(std::floor(g.y + radius)));
            ScalarField& map = maps[j];
            for (int y = y_lo; y <= y_hi; ++y) {
                for (int x = x_lo; x <= x_hi; ++x) {
                    const double dx = x - g.x;
                    const double dy = y - g.y;
                    const double d2 = dx * dx + dy * dy;
                    if (d2 > r2) continue;
                    // Round each contribution to f32 before the max so the
                    // result is independent of person order.
                    const float v = static_cast<float>(std::exp(-d2 * inv_two_sigma2));
                    float& cell = map.at(x, y);
                    cell = std::max(cell, v);
                }
            }
        }
    }
    return maps;
}

PafGenResult gen_pafs(const std::vector<PersonAnnotation>& persons,
                      const SkeletonSpec& skeleton, const LabelGenConfig& cfg) {
    cfg.grid.validate();
    if (!(cfg.limb_width > 0.0)) {
        throw std::invalid_argument("labelgen: limb_width must be > 0");
    }
    const int num_parts = skeleton.part_count();
    check_persons(persons, num_parts);

    const int w = cfg.grid.width;
    const int h = cfg.grid.height;
    const std::size_t cells = cfg.grid.cell_count();

    PafGenResult out;
    out.fields.reserve(skeleton.limb_count());
    out.coverage.reserve(skeleton.limb_count());

    std::vector<double> sum_x(cells), sum_y(cells);
    for (const auto& [j1, j2] : skeleton.limbs) {
        std::fill(sum_x.begin(), sum_x.end(), 0.0);
        std::fill(sum_y.begin(), sum_y.end(), 0.0);
        std::vector<std::uint16_t> count(cells, 0);

        for (const auto& person : persons) {
            const Keypoint& a_kp = person.keypoints[j1];
            const Keypoint& b_kp = person.keypoints[j2];
            if (!a_kp.labeled() || !b_kp.labeled()) {
                out.diagnostics.missing_endpoint_limbs++;
                continue;
            }
            const Vec2 a = cfg.grid.image_to_grid({a_kp.x, a_kp.y});
            const Vec2 b = cfg.grid.image_to_grid({b_kp.x, b_kp.y});
            const Vec2 d = b - a;
            const double len = d.norm();
            if (len < 1e-9) {
                out.diagnostics.degenerate_limbs++;
                continue;
            }
            const Vec2 u{d.x / len, d.y / len};
            const Vec2 perp{-u.y, u.x};
            const double lw = cfg.limb_width;
            const int x_lo = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - lw)));
            const int x_hi = std::min(w - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + lw)));
            const int y_lo = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - lw)));
            const int y_hi = std::min(h - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + lw)));
            for (int y = y_lo; y <= y_hi; ++y) {
                for (int x = x_lo; x <= x_hi; ++x) {
                    const Vec2 rel{x - a.x, y - a.y};
                    const double along = u.dot(rel);
                    if (along < 0.0 || along > len) continue;
                    if (std::abs(perp.dot(rel)) > lw) continue;
                    const std::size_t i = cfg.grid.index(x, y);
                    sum_x[i] += u.x;
                    sum_y[i] += u.y;
                    count[i]++;
                }
            }
        }

        VectorField field = VectorField::zeros(cfg.grid);
        for (std::size_t i = 0; i < cells; ++i) {
            if (count[i] == 0) continue;
            field.values[i] = static_cast<float>(sum_x[i] / count[i]);
            field.values[cells + i] = static_cast<float>(sum_y[i] / count[i]);
        }
        out.fields.push_back(std::move(field));
        out.coverage.push_back(std::move(count));
    }
    return out;
}

bool point_in_polygon(const Polygon& poly, Vec2 p) {
    // Even-odd crossing count; robust for self-intersecting outlines.
    const std::size_t n = poly.vertices.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 vi = poly.vertices[i];
        const Vec2 vj = poly.vertices[j];
        if ((vi.y > p.y) != (vj.y > p.y)) {
            const double x_cross = vj.x + (p.y - vj.y) / (vi.y - vj.y) * (vi.x - vj.x);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

namespace {

bool rle_contains(const RleRegion& rle, int px, int py) {
    if (px < 0 || py < 0 || px >= rle.width || py >= rle.height) return false;
    // Column-major linear index, runs alternate 0/1 starting with 0.
    const std::uint64_t idx =
        static_cast<std::uint64_t>(px) * rle.height + static_cast<std::uint64_t>(py);
    std::uint64_t pos = 0;
    bool value = false;
    for (std::uint32_t run : rle.counts) {
        pos += run;
        if (idx < pos) return value;
        value = !value;
    }
    return false;
}

}  // namespace

BinaryMask gen_ignore_mask(const std::vector<IgnoreRegion>& regions, const GridSpec& grid) {
    grid.validate();
    for (const auto& region : regions) {
        if (const auto* poly = std::get_if<Polygon>(&region)) {
            if (poly->vertices.size() < 3) {
                throw std::invalid_argument("gen_ignore_mask: polygon needs >= 3 vertices");
            }
        }
    }
    BinaryMask mask = BinaryMask::ones(grid);
    if (regions.empty()) return mask;

    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            const Vec2 center = grid.grid_to_image({static_cast<double>(x), static_cast<double>(y)});
            for (const auto& region : regions) {
                bool covered = false;
                if (const auto* poly = std::get_if<Polygon>(&region)) {
                    covered = point_in_polygon(*poly, center);
                } else {
                    const auto& rle = std::get<RleRegion>(region);
                    covered = rle_contains(rle, static_cast<int>(std::floor(center.x)),
                                           static_cast<int>(std::floor(center.y)));
                }
                if (covered) {
                    mask.at(x, y) = 0;
                    break;
                }
            }
        }
    }
    return mask;
}

LabelSet generate_labels(const std::vector<PersonAnnotation>& persons,
                         const std::vector<IgnoreRegion>& ignore_regions,
                         const SkeletonSpec& skeleton, const LabelGenConfig& cfg,
                         LabelGenDiagnostics* diagnostics) {
    LabelSet ls;
    ls.maps = gen_confidence_maps(persons, skeleton, cfg);
    PafGenResult pafs = gen_pafs(persons, skeleton, cfg);
    ls.pafs = std::move(pafs.fields);
    ls.mask = gen_ignore_mask(ignore_regions, cfg.grid);
    if (diagnostics) {
        *diagnostics = pafs.diagnostics;
    }
    return ls;
}

}  // namespace paflab
