// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "paflab/augment.hpp"
#include "paflab/labelgen.hpp"
#include "paflab/synthetic.hpp"

using namespace paflab;

namespace {

PersonAnnotation two_point_person(Vec2 a, Vec2 b) {
    PersonAnnotation p;
    p.keypoints = {{a.x, a.y, Visibility::VisibleLabeled},
                   {b.x, b.y, Visibility::VisibleLabeled}};
    return p;
}

SkeletonSpec tiny_skeleton() {
    SkeletonSpec s;
    s.part_names = {"a", "b"};
    s.limbs = {{0, 1}};
    s.oks_kappas = {0.1, 0.1};
    return s;
}

AugmentParams identity_params(int size) {
    AugmentParams params;
    params.flip = false;
    params.rotation_deg = 0.0;
    params.scale = 1.0;
    params.crop_origin = {0.0, 0.0};
    params.crop_size = size;
    return params;
}

}  // namespace

TEST_SUITE("augment") {

TEST_CASE("identity parameters leave the scene unchanged") {
    const SkeletonSpec skeleton = tiny_skeleton();
    const std::vector<PersonAnnotation> persons = {two_point_person({10.0, 20.0}, {40.0, 60.0})};
    const std::vector<IgnoreRegion> regions = {
        Polygon{{{5.0, 5.0}, {20.0, 5.0}, {20.0, 20.0}}}};

    const auto out = apply_augment(persons, regions, {100.0, 100.0}, identity_params(100),
                                   skeleton);
    for (int j = 0; j < 2; ++j) {
        CHECK(out.persons[0].keypoints[j].x ==
              doctest::Approx(persons[0].keypoints[j].x).epsilon(1e-12));
        CHECK(out.persons[0].keypoints[j].y ==
              doctest::Approx(persons[0].keypoints[j].y).epsilon(1e-12));
    }
    const auto& poly = std::get<Polygon>(out.regions[0]);
    CHECK(poly.vertices[2].x == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("degenerate sampling config produces identity parameters") {
    AugmentConfig cfg;
    cfg.flip_prob = 0.0;
    cfg.rot_min_deg = cfg.rot_max_deg = 0.0;
    cfg.scale_min = cfg.scale_max = 1.0;
    cfg.crop_size = 100;
    cfg.random_crop = false;
    cfg.anchor = Vec2{50.0, 50.0};  // image center

    Rng rng(1);
    const AugmentParams params = sample_params(rng, cfg, {}, {100.0, 100.0});
    CHECK(params.flip == false);
    CHECK(params.rotation_deg == 0.0);
    CHECK(params.scale == 1.0);
    CHECK(params.crop_origin.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(params.crop_origin.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sampling is deterministic under a fixed seed") {
    AugmentConfig cfg;
    const std::vector<PersonAnnotation> persons = {two_point_person({30.0, 30.0}, {60.0, 80.0})};
    Rng a(42), b(42);
    for (int i = 0; i < 20; ++i) {
        const AugmentParams pa = sample_params(a, cfg, persons, {368.0, 368.0});
        const AugmentParams pb = sample_params(b, cfg, persons, {368.0, 368.0});
        CHECK(pa.flip == pb.flip);
        CHECK(pa.rotation_deg == pb.rotation_deg);
        CHECK(pa.scale == pb.scale);
        CHECK(pa.crop_origin == pb.crop_origin);
    }
}

TEST_CASE("sampled rotations and scales cover their configured ranges") {
    AugmentConfig cfg;  // stock ranges: rotation +-40, scale 0.5..1.1
    Rng rng(7);
    double rot_min = 1e9, rot_max = -1e9, scale_min = 1e9, scale_max = -1e9;
    for (int i = 0; i < 10000; ++i) {
        const AugmentParams p = sample_params(rng, cfg, {}, {368.0, 368.0});
        rot_min = std::min(rot_min, p.rotation_deg);
        rot_max = std::max(rot_max, p.rotation_deg);
        scale_min = std::min(scale_min, p.scale);
        scale_max = std::max(scale_max, p.scale);
        CHECK(p.rotation_deg >= -40.0);
        CHECK(p.rotation_deg <= 40.0);
        CHECK(p.scale >= 0.5);
        CHECK(p.scale <= 1.1);
    }
    CHECK(rot_min <= -38.0);
    CHECK(rot_max >= 38.0);
    CHECK(scale_min <= 0.52);
    CHECK(scale_max >= 1.08);
}

TEST_CASE("the anchor always lands inside the crop") {
    AugmentConfig cfg;
    cfg.crop_size = 200;
    const std::vector<PersonAnnotation> persons = {
        two_point_person({123.0, 321.0}, {141.0, 333.0})};
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        const AugmentParams params = sample_params(rng, cfg, persons, {600.0, 600.0});
        // Recompute the anchor the same way: centroid of the only person.
        Vec2 anchor{(123.0 + 141.0) / 2.0, (321.0 + 333.0) / 2.0};
        const auto out = apply_augment({two_point_person(anchor, anchor)}, {}, {600.0, 600.0},
                                       params, tiny_skeleton());
        // The person's single location must survive the crop.
        CHECK(out.persons[0].keypoints[0].labeled());
    }
}

TEST_CASE("flip applied twice restores annotations and part order") {
    SkeletonSpec skeleton = tiny_skeleton();
    skeleton.flip_pairs = {{0, 1}};

    AugmentParams params = identity_params(100);
    params.flip = true;

    const std::vector<PersonAnnotation> persons = {two_point_person({10.0, 20.0}, {70.0, 20.0})};
    const auto once = apply_augment(persons, {}, {100.0, 100.0}, params, skeleton);
    // One flip swaps the two parts and mirrors x.
    CHECK(once.persons[0].keypoints[0].x == doctest::Approx(30.0).epsilon(1e-12));
    CHECK(once.persons[0].keypoints[1].x == doctest::Approx(90.0).epsilon(1e-12));

    const auto twice = apply_augment(once.persons, {}, {100.0, 100.0}, params, skeleton);
    for (int j = 0; j < 2; ++j) {
        CHECK(twice.persons[0].keypoints[j].x ==
              doctest::Approx(persons[0].keypoints[j].x).epsilon(1e-9));
        CHECK(twice.persons[0].keypoints[j].y ==
              doctest::Approx(persons[0].keypoints[j].y).epsilon(1e-9));
    }
}

TEST_CASE("rotation by 90 degrees about the crop center turns (10,0) into (0,10)") {
    AugmentParams params;
    params.flip = false;
    params.rotation_deg = 90.0;
    params.scale = 1.0;
    params.crop_size = 40;
    params.crop_origin = {-20.0, -20.0};  // crop center at the origin

    const SkeletonSpec skeleton = tiny_skeleton();
    const auto out = apply_augment({two_point_person({10.0, 0.0}, {0.0, 0.0})}, {},
                                   {100.0, 100.0}, params, skeleton);
    // Crop-relative output carries a +half offset; difference removes it.
    const Vec2 rotated{out.persons[0].keypoints[0].x - out.persons[0].keypoints[1].x,
                       out.persons[0].keypoints[0].y - out.persons[0].keypoints[1].y};
    CHECK(rotated.x == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rotated.y == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("keypoints leaving the crop are re-marked absent") {
    const SkeletonSpec skeleton = tiny_skeleton();
    const auto out = apply_augment({two_point_person({10.0, 10.0}, {150.0, 10.0})}, {},
                                   {200.0, 200.0}, identity_params(100), skeleton);
    CHECK(out.persons[0].keypoints[0].labeled());
    CHECK(out.persons[0].keypoints[1].state == Visibility::Absent);
}

TEST_CASE("area scales with the square of the scale factor") {
    const SkeletonSpec skeleton = tiny_skeleton();
    PersonAnnotation person = two_point_person({40.0, 40.0}, {60.0, 60.0});
    person.area = 1000.0;
    AugmentParams params = identity_params(100);
    params.scale = 0.5;
    const auto out = apply_augment({person}, {}, {100.0, 100.0}, params, skeleton);
    CHECK(out.persons[0].area.has_value());
    CHECK(*out.persons[0].area == doctest::Approx(250.0).epsilon(1e-12));
}

TEST_CASE("RLE regions are rejected") {
    const SkeletonSpec skeleton = tiny_skeleton();
    const std::vector<IgnoreRegion> regions = {RleRegion{8, 8, {32, 32}}};
    CHECK_THROWS_AS(apply_augment({}, regions, {100.0, 100.0}, identity_params(100), skeleton),
                    std::invalid_argument);
}

TEST_CASE("label generation commutes with the affine map within a cell") {
    // Generate labels before and after augmenting; peak cells must map onto
    // each other through the same affine transform.
    const SkeletonSpec skeleton = SkeletonSpec::coco18();
    SceneConfig scene_cfg;
    scene_cfg.image_dims = {640.0, 640.0};
    scene_cfg.min_height = 260.0;
    scene_cfg.max_height = 300.0;
    Rng rng(17);
    const Scene scene = gen_scene(rng, scene_cfg, 1, skeleton);

    AugmentParams params;
    params.flip = true;
    params.rotation_deg = 20.0;
    params.scale = 0.9;
    params.crop_size = 640;
    params.crop_origin = {0.0, 0.0};

    const auto out = apply_augment(scene.persons, {}, scene.image_dims, params, skeleton);

    const GridSpec grid{80, 80, 8.0};
    const LabelGenConfig cfg = LabelGenConfig::defaults(grid);
    const auto after = gen_confidence_maps(out.persons, skeleton, cfg);

    int checked = 0;
    for (int j = 0; j < skeleton.part_count(); ++j) {
        if (!out.persons[0].keypoints[j].labeled()) continue;
        // Where did the augmented keypoint land?
        const Vec2 moved{out.persons[0].keypoints[j].x, out.persons[0].keypoints[j].y};
        const Vec2 cell = grid.image_to_grid(moved);

        // The after-map must peak within a cell of the moved keypoint.
        float best = 0.0f;
        Vec2 best_cell{};
        for (int y = 0; y < grid.height; ++y) {
            for (int x = 0; x < grid.width; ++x) {
                if (after[j].at(x, y) > best) {
                    best = after[j].at(x, y);
                    best_cell = {static_cast<double>(x), static_cast<double>(y)};
                }
            }
        }
        REQUIRE(best > 0.5f);
        CHECK(std::abs(best_cell.x - cell.x) <= 1.0);
        CHECK(std::abs(best_cell.y - cell.y) <= 1.0);
        checked++;
    }
    CHECK(checked > 0);
}

}  // TEST_SUITE
