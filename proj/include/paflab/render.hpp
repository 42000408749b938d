// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "paflab/core.hpp"
#include "paflab/parser.hpp"

namespace paflab {

struct Image8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // row-major RGB

    std::uint8_t* pixel(int x, int y) {
        return &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
    }
    const std::uint8_t* pixel(int x, int y) const {
        return &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
    }
    bool operator==(const Image8&) const = default;
};

/// Per-cell max over the maps through a black-red-yellow-white ramp,
/// `cell_px` canvas pixels per grid cell.
Image8 render_confidence(const std::vector<ScalarField>& maps, int cell_px = 4);

/// Direction as hue, magnitude as value (the strongest channel wins per cell).
/// A zero field renders black.
Image8 render_paf(const std::vector<VectorField>& pafs, int cell_px = 4);

/// Skeleton overlays on a black canvas of the given image size, limbs in a
/// fixed per-limb palette.
Image8 render_poses(const std::vector<PoseResult>& poses, const SkeletonSpec& skeleton,
                    Vec2 image_dims);

void write_png(const std::filesystem::path& path, const Image8& image);

}  // namespace paflab
