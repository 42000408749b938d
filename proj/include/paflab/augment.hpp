// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "paflab/core.hpp"
#include "paflab/labelgen.hpp"
#include "paflab/rng.hpp"

namespace paflab {

struct AugmentConfig {
    double flip_prob = 0.5;
    double rot_min_deg = -40.0;
    double rot_max_deg = 40.0;
    double scale_min = 0.5;
    double scale_max = 1.1;
    int crop_size = 368;
    /// true: the anchor lands uniformly inside the crop; false: dead center.
    bool random_crop = true;
    /// Crop anchor in image pixels; empty picks the centroid of a randomly
    /// chosen annotated person (image center when nobody is annotated).
    std::optional<Vec2> anchor;
};

struct AugmentParams {
    bool flip = false;
    double rotation_deg = 0.0;
    double scale = 1.0;
    Vec2 crop_origin{0.0, 0.0};  // in the (possibly flipped) source frame
    int crop_size = 368;
};

AugmentParams sample_params(Rng& rng, const AugmentConfig& cfg,
                            const std::vector<PersonAnnotation>& persons, Vec2 image_dims);

struct AugmentOutput {
    std::vector<PersonAnnotation> persons;
    std::vector<IgnoreRegion> regions;
    Vec2 dims;  // crop_size x crop_size
};

/// One composed affine map (flip, rotate and scale about the crop center,
/// crop) applied to every keypoint and polygon vertex. On flip, left/right
/// part indices swap per the skeleton's flip pairs. Keypoints landing outside
/// [0, crop_size) on either axis are re-marked absent — the same hole a real
/// person sticking out of a photo leaves in the annotations. RLE regions have
/// no vertices to transform and are rejected.
AugmentOutput apply_augment(const std::vector<PersonAnnotation>& persons,
                            const std::vector<IgnoreRegion>& regions, Vec2 image_dims,
                            const AugmentParams& params, const SkeletonSpec& skeleton);

}  // namespace paflab
