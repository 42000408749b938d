// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "paflab/core.hpp"
#include "paflab/labelgen.hpp"
#include "paflab/rng.hpp"

namespace paflab {

/// A synthetic multi-person scene. Crowd regions stand for areas holding
/// people nobody annotated; they carry no keypoints of their own.
struct Scene {
    Vec2 image_dims;
    std::vector<PersonAnnotation> persons;
    std::vector<Polygon> crowd_regions;

    std::vector<IgnoreRegion> ignore_regions() const {
        return {crowd_regions.begin(), crowd_regions.end()};
    }
    bool operator==(const Scene&) const = default;
};

struct SceneConfig {
    Vec2 image_dims{768.0, 768.0};
    double min_height = 280.0;  // person height, image px
    double max_height = 420.0;
    double margin = 24.0;       // keypoints stay this far from the border
    double min_gap = 32.0;      // bounding-box gap between persons
    bool enforce_separation = true;
    int crowd_region_count = 0;
    int max_place_attempts = 200;
};

/// Articulated stick figures with fixed limb-length ratios and jointed limbs,
/// every keypoint labeled visible. Placement is rejection-sampled when
/// separation is on. Throws std::domain_error when a person cannot fit.
/// The generator produces figures for the stock 18-part skeleton.
Scene gen_scene(Rng& rng, const SceneConfig& cfg, int n_persons, const SkeletonSpec& skeleton);

/// Convenience overload with stock scene settings.
Scene gen_scene(Rng& rng, int n_persons, Vec2 image_dims, const SkeletonSpec& skeleton);

struct CorruptionConfig {
    bool protrusion = false;     // shift a person so keypoints exit the frame
    double occlusion_rate = 0.0; // per keypoint hidden behind a nearer person
    double miss_rate = 0.0;      // per labeled keypoint, plain annotator miss
    double drop_mask_rate = 0.0; // per crowd region
    std::uint64_t seed = 0;
};

enum class CorruptionKind {
    PersonTranslated,
    KeypointHidden,
    RegionDropped,
};

struct CorruptionEvent {
    CorruptionKind kind{};
    int person = -1;
    int part = -1;
    Vec2 delta{};          // PersonTranslated
    Keypoint previous{};   // KeypointHidden: the keypoint before hiding
    int region_index = -1; // RegionDropped: index in the original region list
    Polygon region{};      // RegionDropped
    bool operator==(const CorruptionEvent&) const = default;
};

struct CorruptionResult {
    /// What the annotators produced: hidden keypoints absent with zeroed
    /// coordinates, dropped crowd regions gone.
    Scene corrupted;
    /// The true geometry: same translations, every keypoint still labeled,
    /// every region present. Labels generated from this scene are the target
    /// that correction is measured against.
    Scene reference;
    std::vector<CorruptionEvent> ledger;
};

/// Apply the configured annotation-failure modes. Every change lands in the
/// ledger, in application order.
CorruptionResult inject_failures(const Scene& scene, const CorruptionConfig& cfg);

/// Undo the ledger back-to-front, reconstructing the exact input scene.
Scene replay_ledger(const Scene& corrupted, const std::vector<CorruptionEvent>& ledger);

struct OracleConfig {
    double alpha = 1.0;       // output amplitude, (0,1]
    double blur_sigma = 0.0;  // channel-wise Gaussian blur, grid cells; 0 = off
};

/// An ideal teacher: labels generated from the (uncorrupted) scene with an
/// all-ones mask, optionally blurred and attenuated to look like soft network
/// output.
LabelSet oracle_teacher(const Scene& scene, const SkeletonSpec& skeleton,
                        const LabelGenConfig& cfg, const OracleConfig& oracle = {});

}  // namespace paflab
