// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <doctest.h>

#include "paflab/labelgen.hpp"
#include "paflab/parser.hpp"
#include "paflab/rng.hpp"
#include "paflab/synthetic.hpp"

using namespace paflab;

namespace {

ScalarField gaussian_map(const GridSpec& grid, std::vector<Vec2> centers, double sigma) {
    ScalarField map = ScalarField::zeros(grid);
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            double v = 0.0;
            for (const Vec2& c : centers) {
                const double d2 = (x - c.x) * (x - c.x) + (y - c.y) * (y - c.y);
                v = std::max(v, std::exp(-d2 / (2.0 * sigma * sigma)));
            }
            map.at(x, y) = static_cast<float>(v);
        }
    }
    return map;
}

// Plain neighbor scan without refinement; returns peak cells.
std::set<std::pair<int, int>> oracle_peak_cells(const ScalarField& map, double threshold) {
    std::set<std::pair<int, int>> cells;
    for (int y = 0; y < map.grid.height; ++y) {
        for (int x = 0; x < map.grid.width; ++x) {
            const float v = map.at(x, y);
            if (v < threshold) continue;
            bool peak = true;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= map.grid.width || ny >= map.grid.height) {
                        continue;
                    }
                    if (map.at(nx, ny) >= v) peak = false;
                }
            }
            if (peak) cells.insert({x, y});
        }
    }
    return cells;
}

// Independent greedy simulation: repeatedly scan for the best remaining pair.
std::vector<LimbMatch> oracle_greedy(const ScoreMatrix& m, double min_score) {
    std::vector<char> used_a(m.rows, 0), used_b(m.cols, 0);
    std::vector<LimbMatch> out;
    while (true) {
        int best_i = -1, best_j = -1;
        for (int i = 0; i < m.rows; ++i) {
            for (int j = 0; j < m.cols; ++j) {
                if (used_a[i] || used_b[j] || m.at(i, j) < min_score) continue;
                if (best_i < 0 || m.at(i, j) > m.at(best_i, best_j)) {
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_i < 0) break;
        used_a[best_i] = 1;
        used_b[best_j] = 1;
        out.push_back({best_i, best_j, m.at(best_i, best_j)});
    }
    return out;
}

}  // namespace

TEST_SUITE("parser") {

TEST_CASE("an all-zero map yields no candidates") {
    CHECK(find_peaks(ScalarField::zeros({12, 10, 8.0}), 0.1).empty());
    CHECK(find_peaks(ScalarField::zeros({12, 10, 8.0}), 0.0).empty());  // plateau, not peak
}

TEST_CASE("a single Gaussian yields one candidate near its center") {
    const GridSpec grid{20, 20, 8.0};
    const ScalarField map = gaussian_map(grid, {{9.3, 11.6}}, 1.5);
    const auto peaks = find_peaks(map, 0.1);
    REQUIRE(peaks.size() == 1);
    CHECK(std::abs(peaks[0].pos.x - 9.3) <= 0.5);
    CHECK(std::abs(peaks[0].pos.y - 11.6) <= 0.5);
    CHECK(peaks[0].score > 0.9);
}

TEST_CASE("two Gaussians four sigmas apart give exactly two candidates") {
    const GridSpec grid{30, 12, 8.0};
    const double sigma = 1.5;
    const ScalarField map = gaussian_map(grid, {{8.0, 6.0}, {8.0 + 4 * sigma, 6.0}}, sigma);
    const auto peaks = find_peaks(map, 0.1);
    CHECK(peaks.size() == 2);

    const auto cells = oracle_peak_cells(map, 0.1);
    REQUIRE(cells.size() == peaks.size());
    for (const auto& p : peaks) {
        const int cx = static_cast<int>(std::lround(p.pos.x));
        const int cy = static_cast<int>(std::lround(p.pos.y));
        bool found = false;
        for (const auto& [ox, oy] : cells) {
            if (std::abs(ox - cx) <= 1 && std::abs(oy - cy) <= 1) found = true;
        }
        CHECK(found);
    }
}

TEST_CASE("find_peaks agrees with the exhaustive scan on random fields") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const GridSpec grid{14, 11, 8.0};
        ScalarField map = ScalarField::zeros(grid);
        for (float& v : map.values) {
            v = static_cast<float>(rng.uniform(0.0, 1.0));
        }
        const auto peaks = find_peaks(map, 0.25);
        const auto cells = oracle_peak_cells(map, 0.25);
        CHECK(peaks.size() == cells.size());
        for (const auto& p : peaks) {
            // Refinement moves at most half a cell, so rounding recovers the cell.
            CHECK(cells.count({static_cast<int>(std::lround(p.pos.x)),
                               static_cast<int>(std::lround(p.pos.y))}) == 1);
        }
        // Deterministic ordering: descending score, ties row-major.
        for (std::size_t i = 1; i < peaks.size(); ++i) {
            CHECK(peaks[i - 1].score >= peaks[i].score);
        }
    }
}

TEST_CASE("limb score integrates alignment along the segment") {
    const GridSpec grid{16, 12, 8.0};
    const SkeletonSpec skeleton = [] {
        SkeletonSpec s;
        s.part_names = {"a", "b"};
        s.limbs = {{0, 1}};
        s.oks_kappas = {0.1, 0.1};
        return s;
    }();
    LabelGenConfig cfg = LabelGenConfig::defaults(grid);

    PersonAnnotation person;
    const Vec2 a = grid.grid_to_image({3.0, 6.0});
    const Vec2 b = grid.grid_to_image({12.0, 6.0});
    person.keypoints = {{a.x, a.y, Visibility::VisibleLabeled},
                        {b.x, b.y, Visibility::VisibleLabeled}};
    const auto pafs = gen_pafs({person}, skeleton, cfg);

    SUBCASE("a true limb scores close to 1") {
        const double s = limb_score(pafs.fields[0], {3.0, 6.0}, {12.0, 6.0}, 10);
        CHECK(s == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("a zero field scores 0") {
        CHECK(limb_score(VectorField::zeros(grid), {3.0, 6.0}, {12.0, 6.0}, 10) == 0.0);
    }
    SUBCASE("a perpendicular field scores 0") {
        VectorField perp = VectorField::zeros(grid);
        for (int y = 0; y < grid.height; ++y) {
            for (int x = 0; x < grid.width; ++x) perp.set(x, y, {0.0, 1.0});
        }
        CHECK(limb_score(perp, {3.0, 6.0}, {12.0, 6.0}, 10) == 0.0);
    }
    SUBCASE("coincident endpoints score 0") {
        CHECK(limb_score(pafs.fields[0], {5.0, 6.0}, {5.0, 6.0}, 10) == 0.0);
    }
    SUBCASE("fewer than two samples is rejected") {
        CHECK_THROWS_AS(limb_score(pafs.fields[0], {3.0, 6.0}, {12.0, 6.0}, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("greedy matching basics") {
    SUBCASE("a single eligible pair is accepted") {
        ScoreMatrix m = ScoreMatrix::zeros(1, 1);
        m.at(0, 0) = 0.9;
        const auto out = greedy_match(m, 0.5);
        REQUIRE(out.size() == 1);
        CHECK(out[0].index_a == 0);
        CHECK(out[0].index_b == 0);
        CHECK(out[0].score == 0.9);
    }
    SUBCASE("used endpoints block weaker pairs") {
        ScoreMatrix m = ScoreMatrix::zeros(2, 2);
        m.at(0, 0) = 0.9;
        m.at(0, 1) = 0.8;
        m.at(1, 0) = 0.85;
        m.at(1, 1) = 0.2;
        const auto out = greedy_match(m, 0.5);
        REQUIRE(out.size() == 1);  // (0,0) wins; (1,1) scores below min
        CHECK(out[0].index_a == 0);
        CHECK(out[0].index_b == 0);
    }
    SUBCASE("empty sides give empty results") {
        CHECK(greedy_match(ScoreMatrix::zeros(0, 3), 0.1).empty());
        CHECK(greedy_match(ScoreMatrix::zeros(3, 0), 0.1).empty());
    }
}

TEST_CASE("greedy matching equals the brute-force simulation on small matrices") {
    Rng rng(17);
    const double values[] = {0.0, 0.25, 0.5, 0.5, 0.75, 1.0};  // repeats make ties common
    for (int rows = 0; rows <= 5; ++rows) {
        for (int cols = 0; cols <= 5; ++cols) {
            for (int trial = 0; trial < 60; ++trial) {
                ScoreMatrix m = ScoreMatrix::zeros(rows, cols);
                for (double& v : m.values) v = values[rng.uniform_int(0, 5)];
                const auto got = greedy_match(m, 0.3);
                const auto want = oracle_greedy(m, 0.3);
                REQUIRE(got.size() == want.size());
                // Scores must agree pairwise even when tie-broken differently.
                for (std::size_t i = 0; i < got.size(); ++i) {
                    CHECK(got[i].score == want[i].score);
                    CHECK(m.at(got[i].index_a, got[i].index_b) == got[i].score);
                }
                // And the same endpoints may be used at most once.
                std::set<int> as, bs;
                for (const auto& g : got) {
                    CHECK(as.insert(g.index_a).second);
                    CHECK(bs.insert(g.index_b).second);
                }
            }
        }
    }
}

TEST_CASE("parse recovers synthetic persons") {
    const SkeletonSpec skeleton = SkeletonSpec::coco18();
    SceneConfig scene_cfg;
    scene_cfg.image_dims = {1024.0, 1024.0};
    scene_cfg.min_height = 260.0;
    scene_cfg.max_height = 320.0;

    const GridSpec grid{128, 128, 8.0};
    const LabelGenConfig cfg = LabelGenConfig::defaults(grid);
    const ParserConfig parser_cfg;

    SUBCASE("one person round-trips with every part within a cell") {
        Rng rng(100);
        const Scene scene = gen_scene(rng, scene_cfg, 1, skeleton);
        const LabelSet labels = generate_labels(scene.persons, {}, skeleton, cfg);
        const auto poses = parse_poses(labels.maps, labels.pafs, skeleton, parser_cfg);
        REQUIRE(poses.size() == 1);
        for (int j = 0; j < skeleton.part_count(); ++j) {
            REQUIRE(poses[0].parts[j].has_value());
            const Keypoint& kp = scene.persons[0].keypoints[j];
            const Vec2 err = poses[0].parts[j]->pos - Vec2{kp.x, kp.y};
            CHECK(err.norm() <= grid.stride);  // one grid cell
        }
    }
    SUBCASE("two separated persons stay distinct") {
        Rng rng(200);
        const Scene scene = gen_scene(rng, scene_cfg, 2, skeleton);
        const LabelSet labels = generate_labels(scene.persons, {}, skeleton, cfg);
        const auto poses = parse_poses(labels.maps, labels.pafs, skeleton, parser_cfg);
        REQUIRE(poses.size() == 2);
        for (const auto& pose : poses) {
            int present = 0;
            for (const auto& part : pose.parts) present += part.has_value();
            CHECK(present == skeleton.part_count());
        }
    }
    SUBCASE("all-zero labels give no poses") {
        const LabelSet labels = LabelSet::zeros(grid, 18, 19);
        CHECK(parse_poses(labels.maps, labels.pafs, skeleton, parser_cfg).empty());
    }
}

TEST_CASE("no candidate lands in two poses and output is deterministic") {
    const SkeletonSpec skeleton = SkeletonSpec::coco18();
    SceneConfig scene_cfg;
    scene_cfg.image_dims = {1024.0, 1024.0};
    scene_cfg.min_height = 260.0;
    scene_cfg.max_height = 320.0;
    const GridSpec grid{128, 128, 8.0};
    const LabelGenConfig cfg = LabelGenConfig::defaults(grid);

    Rng rng(300);
    const Scene scene = gen_scene(rng, scene_cfg, 3, skeleton);
    const LabelSet labels = generate_labels(scene.persons, {}, skeleton, cfg);
    const auto poses = parse_poses(labels.maps, labels.pafs, skeleton, {});
    const auto again = parse_poses(labels.maps, labels.pafs, skeleton, {});

    REQUIRE(poses.size() == again.size());
    for (std::size_t i = 0; i < poses.size(); ++i) {
        CHECK(poses[i].instance_score == again[i].instance_score);
        CHECK(poses[i].parts.size() == again[i].parts.size());
    }

    std::set<std::tuple<int, long long, long long>> seen;  // (part, quantized position)
    for (const auto& pose : poses) {
        for (int j = 0; j < skeleton.part_count(); ++j) {
            if (!pose.parts[j].has_value()) continue;
            CHECK(seen.insert({j, std::llround(pose.parts[j]->pos.x * 1e6),
                               std::llround(pose.parts[j]->pos.y * 1e6)})
                      .second);
        }
    }
}

}  // TEST_SUITE
