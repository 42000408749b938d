// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include "paflab/augment.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace paflab {

namespace {

Vec2 rotate(Vec2 v, double cos_t, double sin_t) {
    return {v.x * cos_t - v.y * sin_t, v.x * sin_t + v.y * cos_t};
}

Vec2 person_centroid(const PersonAnnotation& person) {
    Vec2 sum{};
    int n = 0;
    for (const auto& kp : person.keypoints) {
        if (!kp.labeled()) continue;
        sum = sum + Vec2{kp.x, kp.y};
        n++;
    }
    return n > 0 ? Vec2{sum.x / n, sum.y / n} : Vec2{};
}

}  // namespace

AugmentParams sample_params(Rng& rng, const AugmentConfig& cfg,
                            const std::vector<PersonAnnotation>& persons, Vec2 image_dims) {
    AugmentParams params;
    params.crop_size = cfg.crop_size;
    if (params.crop_size <= 0) {
        throw std::invalid_argument("sample_params: crop_size must be > 0");
    }
    params.flip = rng.bernoulli(cfg.flip_prob);
    params.rotation_deg = rng.uniform(cfg.rot_min_deg, cfg.rot_max_deg);
    params.scale = rng.uniform(cfg.scale_min, cfg.scale_max);

    Vec2 anchor;
    if (cfg.anchor.has_value()) {
        anchor = *cfg.anchor;
    } else {
        std::vector<int> annotated;
        for (int i = 0; i < static_cast<int>(persons.size()); ++i) {
            for (const auto& kp : persons[i].keypoints) {
                if (kp.labeled()) {
                    annotated.push_back(i);
                    break;
                }
            }
        }
        anchor = annotated.empty()
                     ? Vec2{image_dims.x / 2.0, image_dims.y / 2.0}
                     : person_centroid(
                           persons[annotated[rng.uniform_int(0, static_cast<int>(annotated.size()) - 1)]]);
    }
    if (params.flip) anchor.x = image_dims.x - anchor.x;

    // Place the anchor at u (crop-relative, uniform) by inverting the affine
    // map: the origin range automatically respects rotation and scale.
    const double half = params.crop_size / 2.0;
    Vec2 u{0.0, 0.0};
    if (cfg.random_crop) {
        u.x = rng.uniform(-half, half);
        u.y = rng.uniform(-half, half);
    }
    const double theta = params.rotation_deg * std::numbers::pi / 180.0;
    const Vec2 back = rotate({u.x / params.scale, u.y / params.scale}, std::cos(-theta),
                             std::sin(-theta));
    params.crop_origin = {anchor.x - half - back.x, anchor.y - half - back.y};
    return params;
}

AugmentOutput apply_augment(const std::vector<PersonAnnotation>& persons,
                            const std::vector<IgnoreRegion>& regions, Vec2 image_dims,
                            const AugmentParams& params, const SkeletonSpec& skeleton) {
    const int num_parts = skeleton.part_count();
    const double theta = params.rotation_deg * std::numbers::pi / 180.0;
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    const double half = params.crop_size / 2.0;
    const Vec2 center = params.crop_origin + Vec2{half, half};

    const auto transform = [&](Vec2 p) -> Vec2 {
        if (params.flip) p.x = image_dims.x - p.x;
        const Vec2 r = rotate(p - center, cos_t, sin_t);
        return {r.x * params.scale + half, r.y * params.scale + half};
    };

    std::vector<int> source_part(num_parts);
    for (int j = 0; j < num_parts; ++j) source_part[j] = j;
    if (params.flip) {
        for (const auto& [l, r] : skeleton.flip_pairs) {
            source_part[l] = r;
            source_part[r] = l;
        }
    }

    AugmentOutput out;
    out.dims = {static_cast<double>(params.crop_size), static_cast<double>(params.crop_size)};
    out.persons.reserve(persons.size());
    for (const auto& person : persons) {
        if (static_cast<int>(person.keypoints.size()) != num_parts) {
            throw std::invalid_argument("apply_augment: annotation part count mismatch");
        }
        PersonAnnotation moved;
        moved.keypoints.resize(num_parts);
        for (int j = 0; j < num_parts; ++j) {
            const Keypoint& src = person.keypoints[source_part[j]];
            Keypoint kp = src;
            if (src.labeled()) {
                const Vec2 p = transform({src.x, src.y});
                kp.x = p.x;
                kp.y = p.y;
                if (p.x < 0.0 || p.x >= params.crop_size || p.y < 0.0 ||
                    p.y >= params.crop_size) {
                    kp = Keypoint{0.0, 0.0, Visibility::Absent};
                }
            }
            moved.keypoints[j] = kp;
        }
        if (person.area.has_value()) {
            moved.area = *person.area * params.scale * params.scale;
        }
        out.persons.push_back(std::move(moved));
    }

    out.regions.reserve(regions.size());
    for (const auto& region : regions) {
        const auto* poly = std::get_if<Polygon>(&region);
        if (!poly) {
            throw std::invalid_argument(
                "apply_augment: RLE regions cannot be affinely transformed; "
                "convert them to polygons first");
        }
        Polygon moved;
        moved.vertices.reserve(poly->vertices.size());
        for (Vec2 v : poly->vertices) {
            moved.vertices.push_back(transform(v));
        }
        out.regions.push_back(std::move(moved));
    }
    return out;
}

}  // namespace paflab
