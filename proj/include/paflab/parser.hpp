// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "paflab/core.hpp"

namespace paflab {

struct ParserConfig {
    double peak_threshold = 0.1;       // min confidence for a part candidate
    int n_samples = 10;                // line-integral sample count
    double min_limb_score = 0.05;      // min mean alignment for a limb
    double min_sample_fraction = 0.8;  // min fraction of samples with positive alignment
};

struct PartCandidate {
    int part = 0;
    Vec2 pos;  // continuous grid coordinates
    double score = 0.0;
};

struct PosePart {
    Vec2 pos;  // image pixels
    double score = 0.0;
};

/// One decoded person. instance_score is the mean of the present part scores
/// plus the mean of the accepted limb scores.
struct PoseResult {
    std::vector<std::optional<PosePart>> parts;
    double instance_score = 0.0;
};

/// Cells >= threshold that are strictly greater than all existing 8-neighbors,
/// refined to sub-cell accuracy by a quadratic fit of the 3x3 neighborhood.
/// Ordered by descending score, then row-major cell position.
std::vector<PartCandidate> find_peaks(const ScalarField& map, double threshold,
                                      int part_index = 0);

/// Mean over n_samples points on the segment a->b of the PAF sampled
/// bilinearly and projected on the segment direction. Coincident endpoints
/// score 0. n_samples < 2 is invalid.
double limb_score(const VectorField& paf, Vec2 a, Vec2 b, int n_samples);

/// limb_score plus the fraction of samples whose projection is > 0.
struct LimbIntegral {
    double mean_dot = 0.0;
    double positive_fraction = 0.0;
};
LimbIntegral limb_integral(const VectorField& paf, Vec2 a, Vec2 b, int n_samples);

struct ScoreMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;  // row-major

    static ScoreMatrix zeros(int rows, int cols) {
        return {rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0)};
    }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * cols + j]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * cols + j]; }
};

struct LimbMatch {
    int index_a = 0;
    int index_b = 0;
    double score = 0.0;
};

/// Greedy one-to-one matching: pairs ordered by descending score (ties: lower
/// row, then lower column), accepted when both endpoints are still unused and
/// the score is >= min_score.
std::vector<LimbMatch> greedy_match(const ScoreMatrix& scores, double min_score);

/// Full decode: peaks per part, line integrals per limb type, greedy
/// association, then merging of matched pairs into persons. Results are
/// ordered by descending instance score; part positions are image pixels.
std::vector<PoseResult> parse_poses(const std::vector<ScalarField>& maps,
                                    const std::vector<VectorField>& pafs,
                                    const SkeletonSpec& skeleton, const ParserConfig& cfg);

}  // namespace paflab
