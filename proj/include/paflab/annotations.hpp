// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "paflab/core.hpp"
#include "paflab/labelgen.hpp"

namespace paflab {

struct ImageAnnotations {
    long image_id = 0;
    int width = 0;
    int height = 0;
    std::vector<PersonAnnotation> persons;
    std::vector<IgnoreRegion> ignore_regions;
};

/// Reads the COCO keypoint JSON subset: images (id, width, height) and
/// annotations (image_id, keypoints, area, iscrowd, segmentation). Visibility
/// 0/1/2 maps to absent / occluded-labeled / visible-labeled; crowd
/// segmentations (polygons or uncompressed RLE) become ignore regions.
/// 17-keypoint annotations feeding an 18-part skeleton get a neck synthesized
/// from the shoulder midpoint. Output follows the images-array order.
///
/// Malformed JSON raises IoError with path and byte offset; invalid records
/// raise std::runtime_error naming the annotation id.
std::vector<ImageAnnotations> read_annotations(const std::filesystem::path& path,
                                               const SkeletonSpec& skeleton);

/// Writes the same JSON subset (keypoints in the skeleton's own part order,
/// crowd regions as iscrowd=1 polygon annotations). Deterministic bytes.
void write_annotations(const std::filesystem::path& path,
                       const std::vector<ImageAnnotations>& images,
                       const SkeletonSpec& skeleton);

}  // namespace paflab
