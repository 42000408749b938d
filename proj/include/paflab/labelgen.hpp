// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "paflab/core.hpp"

namespace paflab {

struct Polygon {
    std::vector<Vec2> vertices;  // image pixels
    bool operator==(const Polygon&) const = default;
};

/// COCO-style uncompressed RLE: column-major runs over an h x w pixel grid,
/// alternating background/foreground and starting with background.
struct RleRegion {
    int height = 0;
    int width = 0;
    std::vector<std::uint32_t> counts;
    bool operator==(const RleRegion&) const = default;
};

using IgnoreRegion = std::variant<Polygon, RleRegion>;

struct LabelGenConfig {
    GridSpec grid;
    double sigma = 1.0;            // confidence Gaussian sigma, grid cells
    double limb_width = 1.0;       // PAF rectangle half-width, grid cells
    double gaussian_cutoff = 3.0;  // truncate contributions beyond this many sigmas

    /// Stock settings for a grid: sigma covering 7 image pixels, 1-cell limbs.
    static LabelGenConfig defaults(const GridSpec& g) {
        return LabelGenConfig{g, 7.0 / g.stride, 1.0, 3.0};
    }
};

struct LabelGenDiagnostics {
    long degenerate_limbs = 0;        // coincident endpoints, skipped
    long missing_endpoint_limbs = 0;  // >= 1 endpoint unannotated, nothing generated
};

/// Per-part confidence maps: per cell, the max over persons of a unit-height
/// Gaussian centered on the annotated keypoint. Parts nobody annotated stay zero.
std::vector<ScalarField> gen_confidence_maps(const std::vector<PersonAnnotation>& persons,
                                             const SkeletonSpec& skeleton,
                                             const LabelGenConfig& cfg);

struct PafGenResult {
    std::vector<VectorField> fields;
    /// Per limb channel, per cell: number of limb instances that wrote to it.
    /// Cells with count >= 2 hold the average of the contributing unit vectors.
    std::vector<std::vector<std::uint16_t>> coverage;
    LabelGenDiagnostics diagnostics;
};

/// Per-limb PAFs: the unit vector from j1 to j2 inside the limb rectangle.
/// Limbs with an unannotated endpoint generate nothing (and are tallied).
PafGenResult gen_pafs(const std::vector<PersonAnnotation>& persons,
                      const SkeletonSpec& skeleton, const LabelGenConfig& cfg);

/// 1 everywhere except cells whose centers fall inside an ignore region.
/// Polygons rasterize by the even-odd rule; RLE regions by pixel lookup.
BinaryMask gen_ignore_mask(const std::vector<IgnoreRegion>& regions, const GridSpec& grid);

LabelSet generate_labels(const std::vector<PersonAnnotation>& persons,
                         const std::vector<IgnoreRegion>& ignore_regions,
                         const SkeletonSpec& skeleton, const LabelGenConfig& cfg,
                         LabelGenDiagnostics* diagnostics = nullptr);

/// Even-odd point-in-polygon test, image coordinates.
bool point_in_polygon(const Polygon& poly, Vec2 p);

}  // namespace paflab
