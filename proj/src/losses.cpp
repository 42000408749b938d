// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include "paflab/losses.hpp"

#include <stdexcept>

namespace paflab {

namespace {

void require_same_shape(const LabelSet& a, const LabelSet& b, const BinaryMask& mask) {
    if (a.part_count() != b.part_count() || a.limb_count() != b.limb_count() ||
        !(a.grid() == b.grid()) || !(mask.grid == a.grid())) {
        throw std::invalid_argument("losses: label shape mismatch");
    }
}

LossBreakdown mix(const LossBreakdown& a, const LossBreakdown& b, double lambda) {
    LossBreakdown out;
    out.map_term = (1.0 - lambda) * a.map_term + lambda * b.map_term;
    out.paf_term = (1.0 - lambda) * a.paf_term + lambda * b.paf_term;
    out.total = out.map_term + out.paf_term;
    return out;
}

}  // namespace

LossBreakdown masked_l2(const LabelSet& pred, const LabelSet& target, const BinaryMask& mask) {
    require_same_shape(pred, target, mask);

    LossBreakdown out;
    const std::size_t cells = pred.grid().cell_count();
    for (int j = 0; j < pred.part_count(); ++j) {
        const auto& p = pred.maps[j].values;
        const auto& t = target.maps[j].values;
        double acc = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            if (!mask.values[i]) continue;
            const double d = static_cast<double>(p[i]) - static_cast<double>(t[i]);
            acc += d * d;
        }
        out.map_term += acc;
    }
    for (int c = 0; c < pred.limb_count(); ++c) {
        const auto& p = pred.pafs[c].values;
        const auto& t = target.pafs[c].values;
        double acc = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            if (!mask.values[i]) continue;
            const double dx = static_cast<double>(p[i]) - static_cast<double>(t[i]);
            const double dy = static_cast<double>(p[cells + i]) - static_cast<double>(t[cells + i]);
            acc += dx * dx + dy * dy;
        }
        out.paf_term += acc;
    }
    out.total = out.map_term + out.paf_term;
    return out;
}

LossBreakdown loss_lc(const LabelSet& pred, const LabelSet& corrected) {
    return masked_l2(pred, corrected, corrected.mask);
}

LossBreakdown loss_kd(const LabelSet& pred, const LabelSet& gt, const LabelSet& teacher,
                      double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::domain_error("loss_kd: lambda must be in [0,1]");
    }
    return mix(masked_l2(pred, gt, gt.mask), masked_l2(pred, teacher, gt.mask), lambda);
}

LossBreakdown loss_kd_lc(const LabelSet& pred, const LabelSet& corrected,
                         const LabelSet& teacher, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::domain_error("loss_kd_lc: lambda must be in [0,1]");
    }
    return mix(masked_l2(pred, corrected, corrected.mask),
               masked_l2(pred, teacher, corrected.mask), lambda);
}

}  // namespace paflab
