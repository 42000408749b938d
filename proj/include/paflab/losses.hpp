// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "paflab/core.hpp"

namespace paflab {

/// Unreduced loss sums; no per-pixel averaging is applied.
struct LossBreakdown {
    double map_term = 0.0;
    double paf_term = 0.0;
    double total = 0.0;
};

/// Masked squared error summed over all map and PAF channels:
/// cells where mask is 0 contribute nothing.
LossBreakdown masked_l2(const LabelSet& pred, const LabelSet& target, const BinaryMask& mask);

/// Squared error against corrected labels, using the corrected set's mask.
LossBreakdown loss_lc(const LabelSet& pred, const LabelSet& corrected);

/// (1-lambda) * error vs ground truth + lambda * error vs teacher.
/// Both terms use the ground-truth mask. lambda outside [0,1] is a domain error.
LossBreakdown loss_kd(const LabelSet& pred, const LabelSet& gt, const LabelSet& teacher,
                      double lambda);

/// (1-lambda) * error vs corrected labels + lambda * error vs teacher.
LossBreakdown loss_kd_lc(const LabelSet& pred, const LabelSet& corrected,
                         const LabelSet& teacher, double lambda);

}  // namespace paflab
