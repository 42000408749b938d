// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include "paflab/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace paflab {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Body proportions in units of person height, neck at the origin, y down.
struct FigureLayout {
    Vec2 nose{0.0, -0.155};
    Vec2 eye{0.055, -0.195};   // +x side; mirrored for the other
    Vec2 ear{0.125, -0.185};
    Vec2 shoulder{0.14, -0.02};
    Vec2 hip{0.085, 0.31};
    double upper_arm = 0.18;
    double lower_arm = 0.17;
    double upper_leg = 0.25;
    double lower_leg = 0.24;
};

// Part indices of the stock 18-part skeleton.
enum P : int {
    kNose = 0, kNeck = 1, kRSho = 2, kRElb = 3, kRWri = 4, kLSho = 5, kLElb = 6,
    kLWri = 7, kRHip = 8, kRKne = 9, kRAnk = 10, kLHip = 11, kLKne = 12,
    kLAnk = 13, kREye = 14, kLEye = 15, kREar = 16, kLEar = 17,
};

// Direction at `beta` degrees from straight down, leaning toward side (+1/-1).
Vec2 limb_dir(double beta_deg, double side) {
    const double b = beta_deg * kDegToRad;
    return {side * std::sin(b), std::cos(b)};
}

// One figure in local coordinates (neck at origin), scaled to `height`.
std::vector<Keypoint> make_figure(Rng& rng, double height) {
    const FigureLayout lay;
    std::vector<Vec2> pts(18);
    pts[kNeck] = {0.0, 0.0};
    pts[kNose] = lay.nose;
    pts[kREye] = {lay.eye.x, lay.eye.y};
    pts[kLEye] = {-lay.eye.x, lay.eye.y};
    pts[kREar] = {lay.ear.x, lay.ear.y};
    pts[kLEar] = {-lay.ear.x, lay.ear.y};
    pts[kRSho] = {lay.shoulder.x, lay.shoulder.y};
    pts[kLSho] = {-lay.shoulder.x, lay.shoulder.y};
    pts[kRHip] = {lay.hip.x, lay.hip.y};
    pts[kLHip] = {-lay.hip.x, lay.hip.y};

    const auto arm = [&](int sho, int elb, int wri, double side) {
        const double upper = rng.uniform(-45.0, 80.0);
        const double lower = upper + rng.uniform(-20.0, 85.0);
        pts[elb] = pts[sho] + limb_dir(upper, side) * lay.upper_arm;
        pts[wri] = pts[elb] + limb_dir(lower, side) * lay.lower_arm;
    };
    const auto leg = [&](int hip, int kne, int ank, double side) {
        const double upper = rng.uniform(-18.0, 18.0);
        const double lower = upper + rng.uniform(-8.0, 45.0);
        pts[kne] = pts[hip] + limb_dir(upper, side) * lay.upper_leg;
        pts[ank] = pts[kne] + limb_dir(lower, side) * lay.lower_leg;
    };
    arm(kRSho, kRElb, kRWri, +1.0);
    arm(kLSho, kLElb, kLWri, -1.0);
    leg(kRHip, kRKne, kRAnk, +1.0);
    leg(kLHip, kLKne, kLAnk, -1.0);

    std::vector<Keypoint> kps(18);
    for (int j = 0; j < 18; ++j) {
        kps[j] = {pts[j].x * height, pts[j].y * height, Visibility::VisibleLabeled};
    }
    return kps;
}

struct Box {
    double min_x, min_y, max_x, max_y;
    bool intersects(const Box& o) const {
        return min_x < o.max_x && o.min_x < max_x && min_y < o.max_y && o.min_y < max_y;
    }
};

Box keypoint_box(const std::vector<Keypoint>& kps) {
    Box b{1e300, 1e300, -1e300, -1e300};
    for (const auto& kp : kps) {
        if (!kp.labeled()) continue;
        b.min_x = std::min(b.min_x, kp.x);
        b.max_x = std::max(b.max_x, kp.x);
        b.min_y = std::min(b.min_y, kp.y);
        b.max_y = std::max(b.max_y, kp.y);
    }
    return b;
}

}  // namespace

Scene gen_scene(Rng& rng, const SceneConfig& cfg, int n_persons, const SkeletonSpec& skeleton) {
    if (n_persons < 0) {
        throw std::invalid_argument("gen_scene: n_persons must be >= 0");
    }
    if (skeleton.part_count() != 18) {
        throw std::invalid_argument("gen_scene: the figure generator needs the 18-part skeleton");
    }
    Scene scene;
    scene.image_dims = cfg.image_dims;

    std::vector<Box> placed;
    for (int p = 0; p < n_persons; ++p) {
        const double height = rng.uniform(cfg.min_height, cfg.max_height);
        std::vector<Keypoint> kps = make_figure(rng, height);
        const Box local = keypoint_box(kps);

        const double x_lo = cfg.margin - local.min_x;
        const double x_hi = cfg.image_dims.x - cfg.margin - local.max_x;
        const double y_lo = cfg.margin - local.min_y;
        const double y_hi = cfg.image_dims.y - cfg.margin - local.max_y;
        if (x_hi < x_lo || y_hi < y_lo) {
            throw std::domain_error("gen_scene: image too small for a person at this scale");
        }

        bool ok = false;
        for (int attempt = 0; attempt < cfg.max_place_attempts && !ok; ++attempt) {
            const Vec2 offset{rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)};
            const double pad = cfg.min_gap / 2.0;
            const Box global{local.min_x + offset.x - pad, local.min_y + offset.y - pad,
                             local.max_x + offset.x + pad, local.max_y + offset.y + pad};
            if (cfg.enforce_separation) {
                bool clash = false;
                for (const Box& other : placed) {
                    if (global.intersects(other)) {
                        clash = true;
                        break;
                    }
                }
                if (clash) continue;
            }
            placed.push_back(global);
            PersonAnnotation person;
            person.keypoints = std::move(kps);
            for (auto& kp : person.keypoints) {
                kp.x += offset.x;
                kp.y += offset.y;
            }
            const Box bb = keypoint_box(person.keypoints);
            person.area = (bb.max_x - bb.min_x) * (bb.max_y - bb.min_y) * 0.53;
            scene.persons.push_back(std::move(person));
            ok = true;
        }
        if (!ok) {
            throw std::domain_error("gen_scene: could not place person with required separation");
        }
    }

    for (int r = 0; r < cfg.crowd_region_count; ++r) {
        const double radius =
            rng.uniform(0.05, 0.12) * std::min(cfg.image_dims.x, cfg.image_dims.y);
        const Vec2 center{rng.uniform(cfg.margin + radius, cfg.image_dims.x - cfg.margin - radius),
                          rng.uniform(cfg.margin + radius, cfg.image_dims.y - cfg.margin - radius)};
        Polygon blob;
        for (int v = 0; v < 6; ++v) {
            const double angle = (60.0 * v + rng.uniform(-14.0, 14.0)) * kDegToRad;
            const double rr = radius * rng.uniform(0.8, 1.2);
            blob.vertices.push_back({center.x + rr * std::cos(angle),
                                     center.y + rr * std::sin(angle)});
        }
        scene.crowd_regions.push_back(std::move(blob));
    }
    return scene;
}

Scene gen_scene(Rng& rng, int n_persons, Vec2 image_dims, const SkeletonSpec& skeleton) {
    SceneConfig cfg;
    cfg.image_dims = image_dims;
    return gen_scene(rng, cfg, n_persons, skeleton);
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double len2 = d.dot(d);
    if (len2 < 1e-18) return (p - a).norm();
    const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
    return (p - (a + d * t)).norm();
}

void hide_keypoint(Scene& scene, std::vector<CorruptionEvent>& ledger, int person, int part) {
    CorruptionEvent ev;
    ev.kind = CorruptionKind::KeypointHidden;
    ev.person = person;
    ev.part = part;
    ev.previous = scene.persons[person].keypoints[part];
    scene.persons[person].keypoints[part] = Keypoint{0.0, 0.0, Visibility::Absent};
    ledger.push_back(std::move(ev));
}

}  // namespace

CorruptionResult inject_failures(const Scene& scene, const CorruptionConfig& cfg) {
    if (cfg.occlusion_rate < 0.0 || cfg.occlusion_rate > 1.0 || cfg.miss_rate < 0.0 ||
        cfg.miss_rate > 1.0 || cfg.drop_mask_rate < 0.0 || cfg.drop_mask_rate > 1.0) {
        throw std::invalid_argument("inject_failures: rates must be in [0,1]");
    }
    Rng rng(cfg.seed);
    CorruptionResult out;
    Scene work = scene;
    std::vector<CorruptionEvent>& ledger = out.ledger;

    // Keypoint protrusion: shift one person toward an edge until a few
    // keypoints sit just outside the frame, then drop their annotations.
    if (cfg.protrusion && !work.persons.empty()) {
        const int person = rng.uniform_int(0, static_cast<int>(work.persons.size()) - 1);
        const int edge = rng.uniform_int(0, 3);  // 0 left, 1 right, 2 top, 3 bottom
        const int k = rng.uniform_int(1, 6);
        const double push = rng.uniform(4.0, 12.0);

        std::vector<double> coords;
        for (const auto& kp : work.persons[person].keypoints) {
            if (!kp.labeled()) continue;
            coords.push_back((edge == 0 || edge == 1) ? kp.x : kp.y);
        }
        if (!coords.empty()) {
            std::sort(coords.begin(), coords.end());
            const int kk = std::min<int>(k, static_cast<int>(coords.size()));
            Vec2 delta{};
            if (edge == 0) {
                delta.x = -(coords[kk - 1] + push);
            } else if (edge == 1) {
                delta.x = scene.image_dims.x + push - coords[coords.size() - kk];
            } else if (edge == 2) {
                delta.y = -(coords[kk - 1] + push);
            } else {
                delta.y = scene.image_dims.y + push - coords[coords.size() - kk];
            }
            for (auto& kp : work.persons[person].keypoints) {
                if (!kp.labeled()) continue;
                kp.x += delta.x;
                kp.y += delta.y;
            }
            CorruptionEvent ev;
            ev.kind = CorruptionKind::PersonTranslated;
            ev.person = person;
            ev.delta = delta;
            ledger.push_back(std::move(ev));
        }
    }

    // The reference scene freezes the true geometry before any information
    // is removed.
    out.reference = work;

    if (cfg.protrusion) {
        for (int p = 0; p < static_cast<int>(work.persons.size()); ++p) {
            for (int j = 0; j < static_cast<int>(work.persons[p].keypoints.size()); ++j) {
                const Keypoint& kp = work.persons[p].keypoints[j];
                if (!kp.labeled()) continue;
                if (kp.x < 0.0 || kp.x >= work.image_dims.x || kp.y < 0.0 ||
                    kp.y >= work.image_dims.y) {
                    hide_keypoint(work, ledger, p, j);
                }
            }
        }
    }

    // Occlusion: keypoints of a person lying close to the limbs of a nearer
    // person (higher index draws in front) lose their annotations.
    if (cfg.occlusion_rate > 0.0) {
        const SkeletonSpec skeleton = SkeletonSpec::coco18();
        for (int rear = 0; rear < static_cast<int>(work.persons.size()); ++rear) {
            for (int j = 0; j < static_cast<int>(work.persons[rear].keypoints.size()); ++j) {
                const Keypoint& kp = work.persons[rear].keypoints[j];
                if (!kp.labeled()) continue;
                bool covered = false;
                for (int front = rear + 1;
                     front < static_cast<int>(work.persons.size()) && !covered; ++front) {
                    const auto& fk = work.persons[front].keypoints;
                    const Box fbox = keypoint_box(fk);
                    const double tau = 0.05 * std::max(fbox.max_y - fbox.min_y, 1.0);
                    if (fk.size() == 18) {
                        for (const auto& [a, b] : skeleton.limbs) {
                            if (!fk[a].labeled() || !fk[b].labeled()) continue;
                            if (point_segment_distance({kp.x, kp.y}, {fk[a].x, fk[a].y},
                                                       {fk[b].x, fk[b].y}) <= tau) {
                                covered = true;
                                break;
                            }
                        }
                    } else {
                        for (const auto& fkp : fk) {  // unknown topology: point proximity
                            if (!fkp.labeled()) continue;
                            if ((Vec2{kp.x, kp.y} - Vec2{fkp.x, fkp.y}).norm() <= tau) {
                                covered = true;
                                break;
                            }
                        }
                    }
                }
                if (covered && rng.bernoulli(cfg.occlusion_rate)) {
                    hide_keypoint(work, ledger, rear, j);
                }
            }
        }
    }

    // Plain annotator misses.
    if (cfg.miss_rate > 0.0) {
        for (int p = 0; p < static_cast<int>(work.persons.size()); ++p) {
            for (int j = 0; j < static_cast<int>(work.persons[p].keypoints.size()); ++j) {
                if (!work.persons[p].keypoints[j].labeled()) continue;
                if (rng.bernoulli(cfg.miss_rate)) {
                    hide_keypoint(work, ledger, p, j);
                }
            }
        }
    }

    // Missing crowd masks: the region vanishes, its unannotated people stay.
    if (cfg.drop_mask_rate > 0.0) {
        std::vector<int> dropped;
        for (int r = 0; r < static_cast<int>(work.crowd_regions.size()); ++r) {
            if (rng.bernoulli(cfg.drop_mask_rate)) dropped.push_back(r);
        }
        for (int r : dropped) {
            CorruptionEvent ev;
            ev.kind = CorruptionKind::RegionDropped;
            ev.region_index = r;
            ev.region = work.crowd_regions[r];
            ledger.push_back(std::move(ev));
        }
        for (auto it = dropped.rbegin(); it != dropped.rend(); ++it) {
            work.crowd_regions.erase(work.crowd_regions.begin() + *it);
        }
    }

    out.corrupted = std::move(work);
    return out;
}

Scene replay_ledger(const Scene& corrupted, const std::vector<CorruptionEvent>& ledger) {
    Scene scene = corrupted;
    for (auto it = ledger.rbegin(); it != ledger.rend(); ++it) {
        switch (it->kind) {
            case CorruptionKind::RegionDropped:
                scene.crowd_regions.insert(scene.crowd_regions.begin() + it->region_index,
                                           it->region);
                break;
            case CorruptionKind::KeypointHidden:
                scene.persons[it->person].keypoints[it->part] = it->previous;
                break;
            case CorruptionKind::PersonTranslated:
                for (auto& kp : scene.persons[it->person].keypoints) {
                    if (!kp.labeled()) continue;
                    kp.x -= it->delta.x;
                    kp.y -= it->delta.y;
                }
                break;
        }
    }
    return scene;
}

namespace {

void blur_plane(std::vector<float>& values, int w, int h, std::size_t offset, double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        ksum += kernel[i + radius];
    }
    for (double& k : kernel) k /= ksum;

    std::vector<double> tmp(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int xx = x + i;
                if (xx < 0 || xx >= w) continue;
                acc += kernel[i + radius] * values[offset + static_cast<std::size_t>(y) * w + xx];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int yy = y + i;
                if (yy < 0 || yy >= h) continue;
                acc += kernel[i + radius] * tmp[static_cast<std::size_t>(yy) * w + x];
            }
            values[offset + static_cast<std::size_t>(y) * w + x] = static_cast<float>(acc);
        }
    }
}

}  // namespace

LabelSet oracle_teacher(const Scene& scene, const SkeletonSpec& skeleton,
                        const LabelGenConfig& cfg, const OracleConfig& oracle) {
    if (!(oracle.alpha > 0.0 && oracle.alpha <= 1.0)) {
        throw std::invalid_argument("oracle_teacher: alpha must be in (0,1]");
    }
    LabelSet labels = generate_labels(scene.persons, {}, skeleton, cfg);
    const int w = cfg.grid.width;
    const int h = cfg.grid.height;
    if (oracle.blur_sigma > 0.0) {
        for (auto& map : labels.maps) {
            blur_plane(map.values, w, h, 0, oracle.blur_sigma);
        }
        for (auto& paf : labels.pafs) {
            blur_plane(paf.values, w, h, 0, oracle.blur_sigma);
            blur_plane(paf.values, w, h, paf.plane(), oracle.blur_sigma);
        }
    }
    if (oracle.alpha != 1.0) {
        const float a = static_cast<float>(oracle.alpha);
        for (auto& map : labels.maps) {
            for (float& v : map.values) v *= a;
        }
        for (auto& paf : labels.pafs) {
            for (float& v : paf.values) v *= a;
        }
    }
    return labels;
}

}  // namespace paflab
