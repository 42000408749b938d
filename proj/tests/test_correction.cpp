// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "paflab/correction.hpp"
#include "paflab/rng.hpp"

using namespace paflab;

namespace {

const GridSpec kGrid{9, 7, 8.0};

LabelSet random_labels(Rng& rng, int num_parts = 3, int num_limbs = 2) {
    LabelSet ls = LabelSet::zeros(kGrid, num_parts, num_limbs);
    for (auto& map : ls.maps) {
        for (float& v : map.values) v = static_cast<float>(rng.uniform(0.0, 1.0));
    }
    for (auto& paf : ls.pafs) {
        for (int y = 0; y < kGrid.height; ++y) {
            for (int x = 0; x < kGrid.width; ++x) {
                const double angle = rng.uniform(0.0, 6.283185307179586);
                const double mag = rng.uniform(0.0, 1.0);
                paf.set(x, y, {mag * std::cos(angle), mag * std::sin(angle)});
            }
        }
    }
    return ls;
}

}  // namespace

TEST_SUITE("correction") {

TEST_CASE("confidence correction is a plain per-cell max") {
    Rng rng(1);
    const LabelSet gt = random_labels(rng);
    const LabelSet zero = LabelSet::zeros(kGrid, 3, 2);

    SUBCASE("teacher identical to gt changes nothing") {
        CHECK(correct_confidence_maps(gt.maps, gt.maps) == gt.maps);
    }
    SUBCASE("zero teacher changes nothing") {
        CHECK(correct_confidence_maps(gt.maps, zero.maps) == gt.maps);
    }
    SUBCASE("larger teacher value wins") {
        LabelSet a = LabelSet::zeros(kGrid, 1, 0);
        LabelSet b = LabelSet::zeros(kGrid, 1, 0);
        a.maps[0].at(2, 3) = 0.3f;
        b.maps[0].at(2, 3) = 0.7f;
        CHECK(correct_confidence_maps(a.maps, b.maps)[0].at(2, 3) == 0.7f);
    }
}

TEST_CASE("PAF correction keeps gt only on strictly larger norm") {
    LabelSet gt = LabelSet::zeros(kGrid, 0, 1);
    LabelSet teacher = LabelSet::zeros(kGrid, 0, 1);

    gt.pafs[0].set(1, 1, {1.0, 0.0});        // norm 1 vs ~0.424: gt stays
    teacher.pafs[0].set(1, 1, {0.3, 0.3});
    teacher.pafs[0].set(2, 2, {0.4, 0.3});   // gt zero: teacher fills the hole
    gt.pafs[0].set(3, 3, {1.0, 0.0});        // equal norms: tie goes to teacher
    teacher.pafs[0].set(3, 3, {0.0, 1.0});

    const auto out = correct_pafs(gt.pafs, teacher.pafs);
    CHECK(out[0].at(1, 1) == Vec2{1.0, 0.0});
    CHECK(out[0].at(2, 2).x == static_cast<double>(0.4f));
    CHECK(out[0].at(2, 2).y == static_cast<double>(0.3f));
    CHECK(out[0].at(3, 3) == Vec2{0.0, 1.0});
}

TEST_CASE("scope limits which channels change") {
    Rng rng(2);
    const LabelSet gt = random_labels(rng);
    const LabelSet teacher = random_labels(rng);

    const LabelSet maps_only = correct_labels(gt, teacher, CorrectionScope::MapsOnly);
    CHECK(maps_only.pafs == gt.pafs);
    CHECK(maps_only.mask == gt.mask);

    const LabelSet pafs_only = correct_labels(gt, teacher, CorrectionScope::PafsOnly);
    CHECK(pafs_only.maps == gt.maps);

    const LabelSet both = correct_labels(gt, teacher, CorrectionScope::Both);
    CHECK(both.maps == maps_only.maps);
    CHECK(both.pafs == pafs_only.pafs);
}

TEST_CASE("correction invariants hold on random pairs") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const LabelSet gt = random_labels(rng);
        const LabelSet teacher = random_labels(rng);
        const LabelSet out = correct_labels(gt, teacher, CorrectionScope::Both);

        for (int j = 0; j < 3; ++j) {
            for (std::size_t i = 0; i < out.maps[j].values.size(); ++i) {
                CHECK(out.maps[j].values[i] ==
                      std::max(gt.maps[j].values[i], teacher.maps[j].values[i]));
            }
        }
        for (int c = 0; c < 2; ++c) {
            for (int y = 0; y < kGrid.height; ++y) {
                for (int x = 0; x < kGrid.width; ++x) {
                    const Vec2 g = gt.pafs[c].at(x, y);
                    const Vec2 t = teacher.pafs[c].at(x, y);
                    const Vec2 o = out.pafs[c].at(x, y);
                    CHECK((o == g || o == t));
                    CHECK(o.norm() == std::max(g.norm(), t.norm()));
                }
            }
        }
        // Idempotence, bit for bit.
        CHECK(correct_labels(out, teacher, CorrectionScope::Both) == out);
    }
}

TEST_CASE("shape mismatches are rejected") {
    Rng rng(4);
    const LabelSet gt = random_labels(rng, 3, 2);
    const LabelSet fewer_parts = random_labels(rng, 2, 2);
    CHECK_THROWS_AS(correct_labels(gt, fewer_parts, CorrectionScope::Both),
                    std::invalid_argument);

    LabelSet other_grid = LabelSet::zeros({4, 4, 8.0}, 3, 2);
    CHECK_THROWS_AS(correct_labels(gt, other_grid, CorrectionScope::Both),
                    std::invalid_argument);
}

TEST_CASE("sanitize clamps a loaded teacher into label range") {
    LabelSet teacher = LabelSet::zeros(kGrid, 1, 1);
    teacher.maps[0].at(0, 0) = 1.5f;
    teacher.maps[0].at(1, 0) = -0.25f;
    teacher.pafs[0].set(0, 0, {3.0, 4.0});  // norm 5
    teacher.mask.at(2, 2) = 0;

    sanitize_teacher(teacher);
    CHECK(teacher.maps[0].at(0, 0) == 1.0f);
    CHECK(teacher.maps[0].at(1, 0) == 0.0f);
    CHECK(teacher.pafs[0].at(0, 0).norm() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(teacher.mask.at(2, 2) == 1);
}

}  // TEST_SUITE
