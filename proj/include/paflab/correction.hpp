// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "paflab/core.hpp"

namespace paflab {

enum class CorrectionScope {
    MapsOnly,
    PafsOnly,
    Both,
};

/// Per-cell max of ground-truth and teacher confidence values.
std::vector<ScalarField> correct_confidence_maps(const std::vector<ScalarField>& gt,
                                                 const std::vector<ScalarField>& teacher);

/// Per cell, the ground-truth vector survives only when its norm is strictly
/// larger than the teacher's; otherwise the teacher vector is taken (ties go
/// to the teacher). The output vector is always one of the two inputs, bit
/// for bit.
std::vector<VectorField> correct_pafs(const std::vector<VectorField>& gt,
                                      const std::vector<VectorField>& teacher);

/// Fuse a teacher prediction into ground-truth labels. The ignore mask passes
/// through from gt unchanged; scope limits the fusion to maps or PAFs for
/// ablation runs.
LabelSet correct_labels(const LabelSet& gt, const LabelSet& teacher, CorrectionScope scope);

/// Clamp a loaded teacher prediction into label range: confidence values into
/// [0,1], PAF vectors rescaled to norm <= 1, mask forced to all-ones.
void sanitize_teacher(LabelSet& teacher);

}  // namespace paflab
