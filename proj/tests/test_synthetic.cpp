// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "paflab/correction.hpp"
#include "paflab/labelgen.hpp"
#include "paflab/synthetic.hpp"

using namespace paflab;

namespace {

SceneConfig overlap_config() {
    SceneConfig cfg;
    cfg.image_dims = {768.0, 768.0};
    cfg.enforce_separation = false;
    cfg.crowd_region_count = 2;
    return cfg;
}

CorruptionConfig all_modes(std::uint64_t seed) {
    CorruptionConfig cfg;
    cfg.protrusion = true;
    cfg.occlusion_rate = 0.6;
    cfg.miss_rate = 0.12;
    cfg.drop_mask_rate = 0.5;
    cfg.seed = seed;
    return cfg;
}

LabelGenConfig labels_for(const Scene& scene) {
    GridSpec grid;
    grid.stride = 8.0;
    grid.width = static_cast<int>(std::ceil(scene.image_dims.x / grid.stride));
    grid.height = static_cast<int>(std::ceil(scene.image_dims.y / grid.stride));
    return LabelGenConfig::defaults(grid);
}

}  // namespace

TEST_SUITE("synthetic") {

TEST_CASE("zero persons make an empty scene") {
    Rng rng(1);
    const Scene scene = gen_scene(rng, 0, {512.0, 512.0}, SkeletonSpec::coco18());
    CHECK(scene.persons.empty());
}

TEST_CASE("scene generation is deterministic under a fixed seed") {
    const SkeletonSpec skeleton = SkeletonSpec::coco18();
    Rng a(77), b(77);
    const Scene sa = gen_scene(a, overlap_config(), 3, skeleton);
    const Scene sb = gen_scene(b, overlap_config(), 3, skeleton);
    CHECK(sa == sb);

    Rng c(78);
    const Scene sc = gen_scene(c, overlap_config(), 3, skeleton);
    CHECK(!(sa == sc));
}

TEST_CASE("every generated keypoint is labeled and inside the margins") {
    const SkeletonSpec skeleton = SkeletonSpec::coco18();
    SceneConfig cfg;
    cfg.image_dims = {1024.0, 1024.0};
    cfg.min_height = 260.0;
    cfg.max_height = 320.0;
    Rng rng(5);
    const Scene scene = gen_scene(rng, cfg, 3, skeleton);
    REQUIRE(scene.persons.size() == 3);
    for (const auto& person : scene.persons) {
        REQUIRE(person.keypoints.size() == 18);
        for (const auto& kp : person.keypoints) {
            CHECK(kp.state == Visibility::VisibleLabeled);
            CHECK(kp.x >= cfg.margin);
            CHECK(kp.x <= cfg.image_dims.x - cfg.margin);
            CHECK(kp.y >= cfg.margin);
            CHECK(kp.y <= cfg.image_dims.y - cfg.margin);
        }
        CHECK(person.area.has_value());
    }
}

TEST_CASE("an image too small for one person is a domain error") {
    Rng rng(2);
    SceneConfig cfg;
    cfg.image_dims = {64.0, 64.0};
    cfg.min_height = 280.0;
    cfg.max_height = 300.0;
    CHECK_THROWS_AS(gen_scene(rng, cfg, 1, SkeletonSpec::coco18()), std::domain_error);
}

TEST_CASE("no active modes leave the scene unchanged with an empty ledger") {
    Rng rng(3);
    const Scene scene = gen_scene(rng, overlap_config(), 2, SkeletonSpec::coco18());
    CorruptionConfig cfg;
    cfg.seed = 9;
    const CorruptionResult result = inject_failures(scene, cfg);
    CHECK(result.ledger.empty());
    CHECK(result.corrupted == scene);
    CHECK(result.reference == scene);
}

TEST_CASE("miss rate 1 hides every keypoint") {
    Rng rng(4);
    const Scene scene = gen_scene(rng, overlap_config(), 2, SkeletonSpec::coco18());
    CorruptionConfig cfg;
    cfg.miss_rate = 1.0;
    cfg.seed = 10;
    const CorruptionResult result = inject_failures(scene, cfg);
    for (const auto& person : result.corrupted.persons) {
        for (const auto& kp : person.keypoints) {
            CHECK(kp.state == Visibility::Absent);
        }
    }
    CHECK(result.ledger.size() == 2 * 18);
    CHECK(result.reference == scene);
}

TEST_CASE("protrusion empties at least one PAF channel") {
    Rng rng(6);
    const Scene scene = gen_scene(rng, overlap_config(), 1, SkeletonSpec::coco18());
    CorruptionConfig cfg;
    cfg.protrusion = true;
    cfg.seed = 11;
    const CorruptionResult result = inject_failures(scene, cfg);
    REQUIRE(!result.ledger.empty());
    CHECK(result.ledger[0].kind == CorruptionKind::PersonTranslated);

    const SkeletonSpec skeleton = SkeletonSpec::coco18();
    const LabelGenConfig gen_cfg = labels_for(scene);
    const auto reference = gen_pafs(result.reference.persons, skeleton, gen_cfg);
    const auto corrupted = gen_pafs(result.corrupted.persons, skeleton, gen_cfg);

    int emptied = 0;
    for (int c = 0; c < skeleton.limb_count(); ++c) {
        bool ref_nonzero = false, cor_nonzero = false;
        for (float v : reference.fields[c].values) ref_nonzero |= v != 0.0f;
        for (float v : corrupted.fields[c].values) cor_nonzero |= v != 0.0f;
        if (ref_nonzero && !cor_nonzero) emptied++;
    }
    CHECK(emptied >= 1);
}

TEST_CASE("occlusion only hides keypoints near a nearer person") {
    // Two figures forced onto each other so coverage exists.
    Rng rng(7);
    SceneConfig cfg = overlap_config();
    cfg.crowd_region_count = 0;
    Scene scene = gen_scene(rng, cfg, 2, SkeletonSpec::coco18());
    // Move person 1 onto person 0.
    const double dx = scene.persons[0].keypoints[1].x - scene.persons[1].keypoints[1].x;
    const double dy = scene.persons[0].keypoints[1].y - scene.persons[1].keypoints[1].y;
    for (auto& kp : scene.persons[1].keypoints) {
        kp.x += dx;
        kp.y += dy;
    }

    CorruptionConfig corrupt;
    corrupt.occlusion_rate = 1.0;
    corrupt.seed = 12;
    const CorruptionResult result = inject_failures(scene, corrupt);

    int hidden_rear = 0, hidden_front = 0;
    for (const auto& ev : result.ledger) {
        REQUIRE(ev.kind == CorruptionKind::KeypointHidden);
        (ev.person == 0 ? hidden_rear : hidden_front)++;
    }
    CHECK(hidden_rear > 0);       // person 0 sits behind person 1
    CHECK(hidden_front == 0);     // the front person is never occluded
}

TEST_CASE("the ledger replays back to the exact original scene") {
    const SkeletonSpec skeleton = SkeletonSpec::coco18();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        const Scene scene = gen_scene(rng, overlap_config(), 3, skeleton);
        const CorruptionResult result = inject_failures(scene, all_modes(seed * 31));
        CHECK(replay_ledger(result.corrupted, result.ledger) == scene);
    }
}

TEST_CASE("corruption only removes map content") {
    const SkeletonSpec skeleton = SkeletonSpec::coco18();
    Rng rng(8);
    const Scene scene = gen_scene(rng, overlap_config(), 3, skeleton);
    const CorruptionResult result = inject_failures(scene, all_modes(99));
    const LabelGenConfig gen_cfg = labels_for(scene);

    const auto ref_maps = gen_confidence_maps(result.reference.persons, skeleton, gen_cfg);
    const auto cor_maps = gen_confidence_maps(result.corrupted.persons, skeleton, gen_cfg);
    for (int j = 0; j < skeleton.part_count(); ++j) {
        for (std::size_t i = 0; i < ref_maps[j].values.size(); ++i) {
            CHECK(cor_maps[j].values[i] <= ref_maps[j].values[i]);
        }
    }

    const auto ref_pafs = gen_pafs(result.reference.persons, skeleton, gen_cfg);
    const auto cor_pafs = gen_pafs(result.corrupted.persons, skeleton, gen_cfg);
    for (int c = 0; c < skeleton.limb_count(); ++c) {
        for (std::size_t i = 0; i < gen_cfg.grid.cell_count(); ++i) {
            CHECK(cor_pafs.coverage[c][i] <= ref_pafs.coverage[c][i]);
        }
    }
}

TEST_CASE("an ideal teacher restores corrupted labels exactly") {
    const SkeletonSpec skeleton = SkeletonSpec::coco18();
    for (std::uint64_t seed = 40; seed < 45; ++seed) {
        Rng rng(seed);
        const Scene scene = gen_scene(rng, overlap_config(), 2, skeleton);
        const CorruptionResult result = inject_failures(scene, all_modes(seed));
        const LabelGenConfig gen_cfg = labels_for(scene);

        const LabelSet reference =
            generate_labels(result.reference.persons, result.reference.ignore_regions(),
                            skeleton, gen_cfg);
        const LabelSet corrupted =
            generate_labels(result.corrupted.persons, result.corrupted.ignore_regions(),
                            skeleton, gen_cfg);
        const LabelSet teacher = oracle_teacher(result.reference, skeleton, gen_cfg);
        const LabelSet corrected = correct_labels(corrupted, teacher, CorrectionScope::Both);

        // Confidence maps recover bit for bit.
        CHECK(corrected.maps == reference.maps);

        // PAFs recover exactly wherever at most one limb instance wrote.
        const auto ref_pafs = gen_pafs(result.reference.persons, skeleton, gen_cfg);
        double l2 = 0.0;
        for (int c = 0; c < skeleton.limb_count(); ++c) {
            const std::size_t cells = gen_cfg.grid.cell_count();
            for (std::size_t i = 0; i < cells; ++i) {
                if (ref_pafs.coverage[c][i] > 1) continue;
                const double dx = static_cast<double>(corrected.pafs[c].values[i]) -
                                  static_cast<double>(reference.pafs[c].values[i]);
                const double dy =
                    static_cast<double>(corrected.pafs[c].values[cells + i]) -
                    static_cast<double>(reference.pafs[c].values[cells + i]);
                l2 += dx * dx + dy * dy;
            }
        }
        CHECK(l2 <= 1e-9);
    }
}

TEST_CASE("oracle teacher options") {
    const SkeletonSpec skeleton = SkeletonSpec::coco18();
    Rng rng(9);
    const Scene scene = gen_scene(rng, overlap_config(), 1, skeleton);
    const LabelGenConfig gen_cfg = labels_for(scene);

    SUBCASE("alpha 1 with no blur reproduces generate_labels") {
        const LabelSet teacher = oracle_teacher(scene, skeleton, gen_cfg);
        const LabelSet labels = generate_labels(scene.persons, {}, skeleton, gen_cfg);
        CHECK(teacher == labels);
    }
    SUBCASE("an attenuated teacher never displaces unit ground-truth vectors") {
        const LabelSet teacher = oracle_teacher(scene, skeleton, gen_cfg, {0.6, 0.0});
        const LabelSet gt = generate_labels(scene.persons, {}, skeleton, gen_cfg);
        const LabelSet corrected = correct_labels(gt, teacher, CorrectionScope::Both);
        const std::size_t cells = gen_cfg.grid.cell_count();
        for (int c = 0; c < skeleton.limb_count(); ++c) {
            for (std::size_t i = 0; i < cells; ++i) {
                const double gx = gt.pafs[c].values[i];
                const double gy = gt.pafs[c].values[cells + i];
                if (std::abs(std::sqrt(gx * gx + gy * gy) - 1.0) > 1e-6) continue;
                CHECK(corrected.pafs[c].values[i] == gt.pafs[c].values[i]);
                CHECK(corrected.pafs[c].values[cells + i] == gt.pafs[c].values[cells + i]);
            }
        }
    }
    SUBCASE("blur spreads support while keeping values finite") {
        const LabelSet teacher = oracle_teacher(scene, skeleton, gen_cfg, {1.0, 1.0});
        int nonzero_plain = 0, nonzero_blurred = 0;
        const LabelSet plain = oracle_teacher(scene, skeleton, gen_cfg);
        for (std::size_t i = 0; i < plain.maps[0].values.size(); ++i) {
            nonzero_plain += plain.maps[0].values[i] != 0.0f;
            nonzero_blurred += teacher.maps[0].values[i] != 0.0f;
            CHECK(std::isfinite(teacher.maps[0].values[i]));
        }
        CHECK(nonzero_blurred > nonzero_plain);
    }
    SUBCASE("alpha outside (0,1] is rejected") {
        CHECK_THROWS_AS(oracle_teacher(scene, skeleton, gen_cfg, {0.0, 0.0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(oracle_teacher(scene, skeleton, gen_cfg, {1.5, 0.0}),
                        std::invalid_argument);
    }
}

}  // TEST_SUITE
