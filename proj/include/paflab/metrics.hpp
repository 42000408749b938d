// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "paflab/core.hpp"
#include "paflab/parser.hpp"

namespace paflab {

struct EvalConfig {
    std::array<double, 10> thresholds = {0.50, 0.55, 0.60, 0.65, 0.70,
                                         0.75, 0.80, 0.85, 0.90, 0.95};
    double area_medium_low = 32.0 * 32.0;   // medium band: low < area <= high
    double area_medium_high = 96.0 * 96.0;  // large band: area > high
    double bbox_area_factor = 0.53;         // fallback when an annotation has no area
};

struct EvalReport {
    double ap = 0.0;
    double ap50 = 0.0;
    double ap75 = 0.0;
    double ap_m = 0.0;
    double ap_l = 0.0;
    std::array<double, 10> per_threshold{};  // AP at each OKS threshold
};

/// Object keypoint similarity in [0,1]. Labeled ground-truth parts that the
/// prediction leaves empty contribute 0. A ground truth with no labeled
/// keypoints (or a non-positive area) is a domain error. When the annotation
/// carries no area, the labeled-keypoint bounding-box area scaled by
/// bbox_area_factor stands in.
double compute_oks(const PoseResult& pred, const PersonAnnotation& gt,
                   const SkeletonSpec& skeleton, const EvalConfig& cfg = {});

struct ImagePredictions {
    long image_id = 0;
    std::vector<PoseResult> poses;
};

struct ImageGroundTruth {
    long image_id = 0;
    std::vector<PersonAnnotation> persons;
};

/// Greedy evaluation: per image, predictions in descending instance score each
/// take the unmatched ground truth with the highest OKS; the PR curve per
/// threshold is aggregated over all images and integrated with 101-point
/// interpolation. Both lists must cover exactly the same image ids.
EvalReport evaluate(const std::vector<ImagePredictions>& preds,
                    const std::vector<ImageGroundTruth>& gts,
                    const SkeletonSpec& skeleton, const EvalConfig& cfg = {});

}  // namespace paflab
