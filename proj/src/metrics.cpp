// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include "paflab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace paflab {

namespace {

double resolved_area(const PersonAnnotation& gt, const EvalConfig& cfg) {
    if (gt.area.has_value()) {
        if (!(*gt.area > 0.0)) {
            throw std::domain_error("compute_oks: annotation area must be > 0");
        }
        return *gt.area;
    }
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = -min_x;
    for (const auto& kp : gt.keypoints) {
        if (!kp.labeled()) continue;
        min_x = std::min(min_x, kp.x);
        max_x = std::max(max_x, kp.x);
        min_y = std::min(min_y, kp.y);
        max_y = std::max(max_y, kp.y);
    }
    return std::max((max_x - min_x) * (max_y - min_y) * cfg.bbox_area_factor, 1e-12);
}

int labeled_count(const PersonAnnotation& gt) {
    int n = 0;
    for (const auto& kp : gt.keypoints) {
        if (kp.labeled()) n++;
    }
    return n;
}

}  // namespace

double compute_oks(const PoseResult& pred, const PersonAnnotation& gt,
                   const SkeletonSpec& skeleton, const EvalConfig& cfg) {
    const int num_parts = skeleton.part_count();
    if (static_cast<int>(gt.keypoints.size()) != num_parts) {
        throw std::invalid_argument("compute_oks: ground truth part count mismatch");
    }
    if (static_cast<int>(pred.parts.size()) != num_parts) {
        throw std::invalid_argument("compute_oks: prediction part count mismatch");
    }
    const int n = labeled_count(gt);
    if (n == 0) {
        throw std::domain_error("compute_oks: ground truth has no labeled keypoints");
    }
    const double s2 = resolved_area(gt, cfg);

    double sum = 0.0;
    for (int i = 0; i < num_parts; ++i) {
        const Keypoint& kp = gt.keypoints[i];
        if (!kp.labeled() || !pred.parts[i].has_value()) continue;
        const double dx = pred.parts[i]->pos.x - kp.x;
        const double dy = pred.parts[i]->pos.y - kp.y;
        const double kappa = skeleton.oks_kappas[i];
        sum += std::exp(-(dx * dx + dy * dy) / (2.0 * s2 * kappa * kappa));
    }
    return sum / n;
}

namespace {

struct Detection {
    double score = 0.0;
    long image_id = 0;
    int index = 0;        // position within the image, for deterministic ties
    bool matched = false;
    double oks = 0.0;
    double gt_area = 0.0;  // resolved area of the matched ground truth
};

// 101-point interpolated AP over one cumulative PR curve.
double interpolate_ap(const std::vector<double>& recall, const std::vector<double>& precision) {
    if (recall.empty()) return 0.0;
    std::vector<double> envelope = precision;
    for (int i = static_cast<int>(envelope.size()) - 2; i >= 0; --i) {
        envelope[i] = std::max(envelope[i], envelope[i + 1]);
    }
    double sum = 0.0;
    for (int k = 0; k <= 100; ++k) {
        const double r = k / 100.0;
        const auto it = std::lower_bound(recall.begin(), recall.end(), r);
        if (it != recall.end()) {
            sum += envelope[static_cast<std::size_t>(it - recall.begin())];
        }
    }
    return sum / 101.0;
}

// AP at one threshold over ground truths whose area lies in (band_lo, band_hi].
// Detections matched to an out-of-band ground truth are skipped; unmatched
// detections count as false positives in every band.
double band_ap(const std::vector<Detection>& dets, long total_gt, double threshold,
               double band_lo, double band_hi) {
    if (total_gt == 0) return 0.0;
    std::vector<double> recall, precision;
    long tp = 0, fp = 0;
    for (const auto& d : dets) {
        if (d.matched) {
            const bool in_band = d.gt_area > band_lo && d.gt_area <= band_hi;
            if (!in_band) continue;
            if (d.oks >= threshold) {
                tp++;
            } else {
                fp++;
            }
        } else {
            fp++;
        }
        recall.push_back(static_cast<double>(tp) / total_gt);
        precision.push_back(static_cast<double>(tp) / (tp + fp));
    }
    return interpolate_ap(recall, precision);
}

}  // namespace

EvalReport evaluate(const std::vector<ImagePredictions>& preds,
                    const std::vector<ImageGroundTruth>& gts,
                    const SkeletonSpec& skeleton, const EvalConfig& cfg) {
    std::map<long, const ImageGroundTruth*> gt_by_id;
    for (const auto& g : gts) {
        if (!gt_by_id.emplace(g.image_id, &g).second) {
            throw std::domain_error("evaluate: duplicate ground-truth image id");
        }
    }
    std::map<long, const ImagePredictions*> pred_by_id;
    for (const auto& p : preds) {
        if (!pred_by_id.emplace(p.image_id, &p).second) {
            throw std::domain_error("evaluate: duplicate prediction image id");
        }
    }
    if (gt_by_id.size() != pred_by_id.size()) {
        throw std::domain_error("evaluate: prediction and ground-truth image ids misaligned");
    }
    for (const auto& [id, unused] : gt_by_id) {
        if (!pred_by_id.count(id)) {
            throw std::domain_error("evaluate: prediction and ground-truth image ids misaligned");
        }
    }

    std::vector<Detection> dets;
    long total_gt = 0, total_gt_m = 0, total_gt_l = 0;

    for (const auto& [image_id, gt_image] : gt_by_id) {
        // Ground truths with no labeled keypoints cannot be scored; they are
        // excluded from matching and from the recall denominator.
        std::vector<int> scorable;
        for (int g = 0; g < static_cast<int>(gt_image->persons.size()); ++g) {
            if (labeled_count(gt_image->persons[g]) > 0) scorable.push_back(g);
        }
        std::vector<double> areas(scorable.size());
        for (std::size_t g = 0; g < scorable.size(); ++g) {
            areas[g] = resolved_area(gt_image->persons[scorable[g]], cfg);
            total_gt++;
            if (areas[g] > cfg.area_medium_low && areas[g] <= cfg.area_medium_high) total_gt_m++;
            if (areas[g] > cfg.area_medium_high) total_gt_l++;
        }

        const auto& poses = pred_by_id.at(image_id)->poses;
        std::vector<int> order(poses.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return poses[a].instance_score > poses[b].instance_score;
        });

        std::vector<char> gt_used(scorable.size(), 0);
        for (int idx : order) {
            Detection det;
            det.score = poses[idx].instance_score;
            det.image_id = image_id;
            det.index = idx;
            int best_g = -1;
            double best_oks = -1.0;
            for (std::size_t g = 0; g < scorable.size(); ++g) {
                if (gt_used[g]) continue;
                const double oks =
                    compute_oks(poses[idx], gt_image->persons[scorable[g]], skeleton, cfg);
                if (oks > best_oks) {
                    best_oks = oks;
                    best_g = static_cast<int>(g);
                }
            }
            if (best_g >= 0) {
                gt_used[best_g] = 1;
                det.matched = true;
                det.oks = best_oks;
                det.gt_area = areas[best_g];
            }
            dets.push_back(det);
        }
    }

    std::sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.image_id != b.image_id) return a.image_id < b.image_id;
        return a.index < b.index;
    });

    const double inf = std::numeric_limits<double>::infinity();
    EvalReport report;
    double sum_all = 0.0, sum_m = 0.0, sum_l = 0.0;
    for (std::size_t t = 0; t < cfg.thresholds.size(); ++t) {
        const double thr = cfg.thresholds[t];
        report.per_threshold[t] = band_ap(dets, total_gt, thr, 0.0, inf);
        sum_all += report.per_threshold[t];
        sum_m += band_ap(dets, total_gt_m, thr, cfg.area_medium_low, cfg.area_medium_high);
        sum_l += band_ap(dets, total_gt_l, thr, cfg.area_medium_high, inf);
        // AP cannot increase when the threshold tightens.
        if (t > 0 && report.per_threshold[t] > report.per_threshold[t - 1] + 1e-12) {
            throw std::logic_error("evaluate: AP increased with the OKS threshold");
        }
    }
    report.ap = sum_all / cfg.thresholds.size();
    report.ap50 = report.per_threshold[0];
    report.ap75 = report.per_threshold[5];
    report.ap_m = sum_m / cfg.thresholds.size();
    report.ap_l = sum_l / cfg.thresholds.size();
    return report;
}

}  // namespace paflab
