// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace paflab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    bool operator==(const Vec2&) const = default;
};

/// Regular grid of cells over an image. Cell (i,j) sits at image point
/// ((i+0.5)*stride, (j+0.5)*stride); this cell-center convention is what
/// grid_to_image / image_to_grid implement and every module relies on it.
struct GridSpec {
    int width = 0;
    int height = 0;
    double stride = 1.0;

    bool operator==(const GridSpec&) const = default;

    std::size_t cell_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(x);
    }
    Vec2 grid_to_image(Vec2 g) const {
        return {(g.x + 0.5) * stride, (g.y + 0.5) * stride};
    }
    Vec2 image_to_grid(Vec2 p) const {
        return {p.x / stride - 0.5, p.y / stride - 0.5};
    }
    /// Integer cell nearest to an image point, clamped to the grid.
    std::pair<int, int> nearest_cell(Vec2 image_point) const;

    /// Throws std::invalid_argument unless width,height >= 1 and stride > 0.
    void validate() const;
};

/// One scalar value per grid cell, row-major.
struct ScalarField {
    GridSpec grid;
    std::vector<float> values;

    static ScalarField zeros(const GridSpec& g);

    float at(int x, int y) const { return values[grid.index(x, y)]; }
    float& at(int x, int y) { return values[grid.index(x, y)]; }
    bool operator==(const ScalarField&) const = default;
};

/// Two scalar channels per grid cell, stored as two row-major planes
/// (x-plane then y-plane), matching the on-disk tensor layout.
struct VectorField {
    GridSpec grid;
    std::vector<float> values;

    static VectorField zeros(const GridSpec& g);

    std::size_t plane() const { return grid.cell_count(); }
    Vec2 at(int x, int y) const {
        const std::size_t i = grid.index(x, y);
        return {static_cast<double>(values[i]), static_cast<double>(values[plane() + i])};
    }
    void set(int x, int y, Vec2 v) {
        const std::size_t i = grid.index(x, y);
        values[i] = static_cast<float>(v.x);
        values[plane() + i] = static_cast<float>(v.y);
    }
    bool operator==(const VectorField&) const = default;
};

/// Per-cell {0,1} weights; 0 marks regions excluded from the loss.
struct BinaryMask {
    GridSpec grid;
    std::vector<std::uint8_t> values;

    static BinaryMask ones(const GridSpec& g);
    static BinaryMask zeros(const GridSpec& g);

    std::uint8_t at(int x, int y) const { return values[grid.index(x, y)]; }
    std::uint8_t& at(int x, int y) { return values[grid.index(x, y)]; }
    bool operator==(const BinaryMask&) const = default;
};

enum class Visibility : std::uint8_t {
    Absent = 0,
    OccludedLabeled = 1,
    VisibleLabeled = 2,
};

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    Visibility state = Visibility::Absent;

    bool labeled() const { return state != Visibility::Absent; }
    bool operator==(const Keypoint&) const = default;
};

/// One person's keypoints in image pixels, one entry per skeleton part.
/// Coordinates of absent keypoints carry no meaning.
struct PersonAnnotation {
    std::vector<Keypoint> keypoints;
    std::optional<double> area;

    bool operator==(const PersonAnnotation&) const = default;
};

/// Part list, limb topology and evaluation constants for one skeleton.
struct SkeletonSpec {
    std::vector<std::string> part_names;
    std::vector<std::pair<int, int>> limbs;       // ordered (j1, j2) part indices
    std::vector<std::pair<int, int>> flip_pairs;  // (left, right) part indices
    std::vector<double> oks_kappas;               // one per part, > 0

    int part_count() const { return static_cast<int>(part_names.size()); }
    int limb_count() const { return static_cast<int>(limbs.size()); }

    /// Throws std::invalid_argument on out-of-range limb endpoints, duplicate
    /// limbs, overlapping flip pairs, or non-positive kappas.
    void validate() const;

    /// 18 parts: 17 COCO keypoints plus a neck synthesized as the shoulder
    /// midpoint, 19 limbs. The stock bottom-up topology.
    static SkeletonSpec coco18();
    /// Plain 17-part COCO skeleton with a 16-limb tree.
    static SkeletonSpec coco17();
};

/// Confidence maps, PAFs and the loss mask for one image, on one grid.
struct LabelSet {
    std::vector<ScalarField> maps;
    std::vector<VectorField> pafs;
    BinaryMask mask;

    static LabelSet zeros(const GridSpec& g, int num_parts, int num_limbs);

    const GridSpec& grid() const { return mask.grid; }
    int part_count() const { return static_cast<int>(maps.size()); }
    int limb_count() const { return static_cast<int>(pafs.size()); }
    bool operator==(const LabelSet&) const = default;
};

/// Bilinear interpolation of both channels at a continuous grid position.
/// Integer positions return the stored cell values exactly.
/// Throws std::domain_error when point is outside [0,w-1] x [0,h-1].
Vec2 sample_bilinear(const VectorField& field, Vec2 point);

}  // namespace paflab
