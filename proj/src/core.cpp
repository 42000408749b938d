// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include "paflab/core.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace paflab {

void GridSpec::validate() const {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("GridSpec: width and height must be >= 1");
    }
    if (!(stride > 0.0) || !std::isfinite(stride)) {
        throw std::invalid_argument("GridSpec: stride must be a positive finite real");
    }
}

std::pair<int, int> GridSpec::nearest_cell(Vec2 image_point) const {
    const Vec2 g = image_to_grid(image_point);
    const int cx = std::clamp(static_cast<int>(std::lround(g.x)), 0, width - 1);
    const int cy = std::clamp(static_cast<int>(std::lround(g.y)), 0, height - 1);
    return {cx, cy};
}

ScalarField ScalarField::zeros(const GridSpec& g) {
    g.validate();
    return ScalarField{g, std::vector<float>(g.cell_count(), 0.0f)};
}

VectorField VectorField::zeros(const GridSpec& g) {
    g.validate();
    return VectorField{g, std::vector<float>(2 * g.cell_count(), 0.0f)};
}

BinaryMask BinaryMask::ones(const GridSpec& g) {
    g.validate();
    return BinaryMask{g, std::vector<std::uint8_t>(g.cell_count(), 1)};
}

BinaryMask BinaryMask::zeros(const GridSpec& g) {
    g.validate();
    return BinaryMask{g, std::vector<std::uint8_t>(g.cell_count(), 0)};
}

void SkeletonSpec::validate() const {
    const int j = part_count();
    if (j < 1) {
        throw std::invalid_argument("SkeletonSpec: at least one part required");
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& [a, b] : limbs) {
        if (a < 0 || a >= j || b < 0 || b >= j) {
            throw std::invalid_argument("SkeletonSpec: limb endpoint out of range");
        }
        const auto key = std::minmax(a, b);
        if (!seen.insert({key.first, key.second}).second) {
            throw std::invalid_argument("SkeletonSpec: duplicate limb");
        }
    }
    std::set<int> flip_parts;
    for (const auto& [l, r] : flip_pairs) {
        if (l < 0 || l >= j || r < 0 || r >= j || l == r) {
            throw std::invalid_argument("SkeletonSpec: bad flip pair");
        }
        if (!flip_parts.insert(l).second || !flip_parts.insert(r).second) {
            throw std::invalid_argument("SkeletonSpec: flip pairs must be disjoint");
        }
    }
    if (static_cast<int>(oks_kappas.size()) != j) {
        throw std::invalid_argument("SkeletonSpec: need one OKS kappa per part");
    }
    for (double k : oks_kappas) {
        if (!(k > 0.0)) {
            throw std::invalid_argument("SkeletonSpec: OKS kappas must be > 0");
        }
    }
}

SkeletonSpec SkeletonSpec::coco18() {
    SkeletonSpec s;
    s.part_names = {
        "nose",      "neck",       "right_shoulder", "right_elbow", "right_wrist",
        "left_shoulder", "left_elbow", "left_wrist", "right_hip",   "right_knee",
        "right_ankle",   "left_hip",   "left_knee",  "left_ankle",  "right_eye",
        "left_eye",      "right_ear",  "left_ear"};
    s.limbs = {{1, 2},  {1, 5},   {2, 3},   {3, 4},  {5, 6},  {6, 7},  {1, 8},
               {8, 9},  {9, 10},  {1, 11},  {11, 12}, {12, 13}, {1, 0},  {0, 14},
               {14, 16}, {0, 15}, {15, 17}, {2, 16},  {5, 17}};
    s.flip_pairs = {{5, 2}, {6, 3}, {7, 4}, {11, 8}, {12, 9}, {13, 10}, {15, 14}, {17, 16}};
    // 2x the COCO per-part sigmas; the synthesized neck reuses the shoulder value.
    s.oks_kappas = {0.052, 0.158, 0.158, 0.144, 0.124, 0.158, 0.144, 0.124, 0.214,
                    0.174, 0.178, 0.214, 0.174, 0.178, 0.050, 0.050, 0.070, 0.070};
    s.validate();
    return s;
}

SkeletonSpec SkeletonSpec::coco17() {
    SkeletonSpec s;
    s.part_names = {"nose",          "left_eye",   "right_eye",     "left_ear",
                    "right_ear",     "left_shoulder", "right_shoulder", "left_elbow",
                    "right_elbow",   "left_wrist", "right_wrist",   "left_hip",
                    "right_hip",     "left_knee",  "right_knee",    "left_ankle",
                    "right_ankle"};
    s.limbs = {{5, 7},  {7, 9},  {6, 8},  {8, 10}, {5, 6},  {5, 11}, {6, 12}, {11, 12},
               {11, 13}, {13, 15}, {12, 14}, {14, 16}, {0, 1}, {0, 2},  {1, 3},  {2, 4}};
    s.flip_pairs = {{1, 2}, {3, 4}, {5, 6}, {7, 8}, {9, 10}, {11, 12}, {13, 14}, {15, 16}};
    s.oks_kappas = {0.052, 0.050, 0.050, 0.070, 0.070, 0.158, 0.158, 0.144, 0.144,
                    0.124, 0.124, 0.214, 0.214, 0.174, 0.174, 0.178, 0.178};
    s.validate();
    return s;
}

LabelSet LabelSet::zeros(const GridSpec& g, int num_parts, int num_limbs) {
    LabelSet ls;
    ls.maps.reserve(num_parts);
    for (int j = 0; j < num_parts; ++j) {
        ls.maps.push_back(ScalarField::zeros(g));
    }
    ls.pafs.reserve(num_limbs);
    for (int c = 0; c < num_limbs; ++c) {
        ls.pafs.push_back(VectorField::zeros(g));
    }
    ls.mask = BinaryMask::ones(g);
    return ls;
}

Vec2 sample_bilinear(const VectorField& field, Vec2 point) {
    const int w = field.grid.width;
    const int h = field.grid.height;
    if (!(point.x >= 0.0 && point.x <= w - 1 && point.y >= 0.0 && point.y <= h - 1)) {
        throw std::domain_error("sample_bilinear: point outside the grid");
    }
    int x0 = 0, y0 = 0;
    double fx = 0.0, fy = 0.0;
    if (w > 1) {
        x0 = std::min(static_cast<int>(point.x), w - 2);
        fx = point.x - x0;
    }
    if (h > 1) {
        y0 = std::min(static_cast<int>(point.y), h - 2);
        fy = point.y - y0;
    }
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);

    const Vec2 v00 = field.at(x0, y0);
    const Vec2 v10 = field.at(x1, y0);
    const Vec2 v01 = field.at(x0, y1);
    const Vec2 v11 = field.at(x1, y1);

    const double w00 = (1.0 - fx) * (1.0 - fy);
    const double w10 = fx * (1.0 - fy);
    const double w01 = (1.0 - fx) * fy;
    const double w11 = fx * fy;
    return {v00.x * w00 + v10.x * w10 + v01.x * w01 + v11.x * w11,
            v00.y * w00 + v10.y * w10 + v01.y * w01 + v11.y * w11};
}

}  // namespace paflab
