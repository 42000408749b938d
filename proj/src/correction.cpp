// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include "paflab/correction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace paflab {

namespace {

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!(a == b)) {
        throw std::invalid_argument(std::string("correction: grid mismatch in ") + what);
    }
}

}  // namespace

std::vector<ScalarField> correct_confidence_maps(const std::vector<ScalarField>& gt,
                                                 const std::vector<ScalarField>& teacher) {
    if (gt.size() != teacher.size()) {
        throw std::invalid_argument("correction: confidence map count mismatch");
    }
    std::vector<ScalarField> out;
    out.reserve(gt.size());
    for (std::size_t j = 0; j < gt.size(); ++j) {
        require_same_grid(gt[j].grid, teacher[j].grid, "confidence maps");
        ScalarField merged = gt[j];
        for (std::size_t i = 0; i < merged.values.size(); ++i) {
            merged.values[i] = std::max(merged.values[i], teacher[j].values[i]);
        }
        out.push_back(std::move(merged));
    }
    return out;
}

std::vector<VectorField> correct_pafs(const std::vector<VectorField>& gt,
                                      const std::vector<VectorField>& teacher) {
    if (gt.size() != teacher.size()) {
        throw std::invalid_argument("correction: PAF count mismatch");
    }
    std::vector<VectorField> out;
    out.reserve(gt.size());
    for (std::size_t c = 0; c < gt.size(); ++c) {
        require_same_grid(gt[c].grid, teacher[c].grid, "PAFs");
        VectorField merged = gt[c];
        const std::size_t plane = merged.plane();
        for (std::size_t i = 0; i < plane; ++i) {
            const double gx = gt[c].values[i];
            const double gy = gt[c].values[plane + i];
            const double tx = teacher[c].values[i];
            const double ty = teacher[c].values[plane + i];
            if (!(gx * gx + gy * gy > tx * tx + ty * ty)) {
                merged.values[i] = teacher[c].values[i];
                merged.values[plane + i] = teacher[c].values[plane + i];
            }
        }
        out.push_back(std::move(merged));
    }
    return out;
}

LabelSet correct_labels(const LabelSet& gt, const LabelSet& teacher, CorrectionScope scope) {
    if (gt.part_count() != teacher.part_count() || gt.limb_count() != teacher.limb_count()) {
        throw std::invalid_argument("correction: label shape mismatch");
    }
    require_same_grid(gt.grid(), teacher.grid(), "label sets");

    LabelSet out = gt;
    if (scope == CorrectionScope::MapsOnly || scope == CorrectionScope::Both) {
        out.maps = correct_confidence_maps(gt.maps, teacher.maps);
    }
    if (scope == CorrectionScope::PafsOnly || scope == CorrectionScope::Both) {
        out.pafs = correct_pafs(gt.pafs, teacher.pafs);
    }
    return out;
}

void sanitize_teacher(LabelSet& teacher) {
    for (auto& map : teacher.maps) {
        for (float& v : map.values) {
            v = std::clamp(v, 0.0f, 1.0f);
        }
    }
    for (auto& paf : teacher.pafs) {
        const std::size_t plane = paf.plane();
        for (std::size_t i = 0; i < plane; ++i) {
            const double x = paf.values[i];
            const double y = paf.values[plane + i];
            const double n = std::sqrt(x * x + y * y);
            if (n > 1.0) {
                paf.values[i] = static_cast<float>(x / n);
                paf.values[plane + i] = static_cast<float>(y / n);
            }
        }
    }
    teacher.mask = BinaryMask::ones(teacher.grid());
}

}  // namespace paflab
