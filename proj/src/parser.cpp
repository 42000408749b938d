// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include "paflab/parser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace paflab {

namespace {

// Peak offset of the parabola through (-1,l), (0,c), (1,r), clamped to half a
// cell. c is a strict local max so the curvature is negative; degenerate fits
// fall back to the cell center.
double quadratic_offset(double l, double c, double r) {
    const double denom = l + r - 2.0 * c;
    if (!(denom < -1e-12)) return 0.0;
    return std::clamp((l - r) / (2.0 * denom), -0.5, 0.5);
}

}  // namespace

std::vector<PartCandidate> find_peaks(const ScalarField& map, double threshold,
                                      int part_index) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw std::domain_error("find_peaks: threshold must be in [0,1]");
    }
    const int w = map.grid.width;
    const int h = map.grid.height;

    struct RawPeak {
        int x, y;
        double score;
        Vec2 pos;
    };
    std::vector<RawPeak> peaks;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const float v = map.at(x, y);
            if (v < threshold) continue;
            bool is_peak = true;
            for (int dy = -1; dy <= 1 && is_peak; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    if (map.at(nx, ny) >= v) {
                        is_peak = false;
                        break;
                    }
                }
            }
            if (!is_peak) continue;

            Vec2 pos{static_cast<double>(x), static_cast<double>(y)};
            if (x >= 1 && x <= w - 2) {
                pos.x += quadratic_offset(map.at(x - 1, y), v, map.at(x + 1, y));
            }
            if (y >= 1 && y <= h - 2) {
                pos.y += quadratic_offset(map.at(x, y - 1), v, map.at(x, y + 1));
            }
            peaks.push_back({x, y, static_cast<double>(v), pos});
        }
    }

    std::sort(peaks.begin(), peaks.end(), [](const RawPeak& a, const RawPeak& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });

    std::vector<PartCandidate> out;
    out.reserve(peaks.size());
    for (const auto& p : peaks) {
        out.push_back({part_index, p.pos, p.score});
    }
    return out;
}

LimbIntegral limb_integral(const VectorField& paf, Vec2 a, Vec2 b, int n_samples) {
    if (n_samples < 2) {
        throw std::invalid_argument("limb_integral: n_samples must be >= 2");
    }
    const Vec2 d = b - a;
    const double len = d.norm();
    if (len < 1e-12) return {0.0, 0.0};
    const Vec2 u{d.x / len, d.y / len};

    double sum = 0.0;
    int positive = 0;
    for (int i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / (n_samples - 1);
        const Vec2 p{a.x + d.x * t, a.y + d.y * t};
        const double dot = sample_bilinear(paf, p).dot(u);
        sum += dot;
        if (dot > 0.0) positive++;
    }
    return {sum / n_samples, static_cast<double>(positive) / n_samples};
}

double limb_score(const VectorField& paf, Vec2 a, Vec2 b, int n_samples) {
    return limb_integral(paf, a, b, n_samples).mean_dot;
}

std::vector<LimbMatch> greedy_match(const ScoreMatrix& scores, double min_score) {
    std::vector<LimbMatch> pairs;
    pairs.reserve(static_cast<std::size_t>(scores.rows) * scores.cols);
    for (int i = 0; i < scores.rows; ++i) {
        for (int j = 0; j < scores.cols; ++j) {
            const double s = scores.at(i, j);
            if (s >= min_score) pairs.push_back({i, j, s});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const LimbMatch& a, const LimbMatch& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.index_a != b.index_a) return a.index_a < b.index_a;
        return a.index_b < b.index_b;
    });

    std::vector<char> used_a(scores.rows, 0), used_b(scores.cols, 0);
    std::vector<LimbMatch> out;
    for (const auto& p : pairs) {
        if (used_a[p.index_a] || used_b[p.index_b]) continue;
        used_a[p.index_a] = 1;
        used_b[p.index_b] = 1;
        out.push_back(p);
    }
    return out;
}

namespace {

struct Connection {
    int limb = 0;
    int part_a = 0, part_b = 0;
    int cand_a = 0, cand_b = 0;
    double score = 0.0;
};

struct Cluster {
    std::vector<int> cand;  // per part: candidate index or -1
    std::vector<double> limb_scores;
    bool alive = true;
};

}  // namespace

std::vector<PoseResult> parse_poses(const std::vector<ScalarField>& maps,
                                    const std::vector<VectorField>& pafs,
                                    const SkeletonSpec& skeleton, const ParserConfig& cfg) {
    const int num_parts = skeleton.part_count();
    const int num_limbs = skeleton.limb_count();
    if (static_cast<int>(maps.size()) != num_parts ||
        static_cast<int>(pafs.size()) != num_limbs) {
        throw std::invalid_argument("parse_poses: channel counts do not match skeleton");
    }
    for (const auto& m : maps) {
        if (!(m.grid == maps[0].grid)) {
            throw std::invalid_argument("parse_poses: maps on mixed grids");
        }
    }
    for (const auto& f : pafs) {
        if (!(f.grid == maps[0].grid)) {
            throw std::invalid_argument("parse_poses: PAFs on mixed grids");
        }
    }

    std::vector<std::vector<PartCandidate>> candidates(num_parts);
    for (int j = 0; j < num_parts; ++j) {
        candidates[j] = find_peaks(maps[j], cfg.peak_threshold, j);
    }

    std::vector<Connection> connections;
    for (int c = 0; c < num_limbs; ++c) {
        const auto [j1, j2] = skeleton.limbs[c];
        const auto& cand_a = candidates[j1];
        const auto& cand_b = candidates[j2];
        if (cand_a.empty() || cand_b.empty()) continue;

        ScoreMatrix scores = ScoreMatrix::zeros(static_cast<int>(cand_a.size()),
                                                static_cast<int>(cand_b.size()));
        for (int i = 0; i < scores.rows; ++i) {
            for (int k = 0; k < scores.cols; ++k) {
                const LimbIntegral li =
                    limb_integral(pafs[c], cand_a[i].pos, cand_b[k].pos, cfg.n_samples);
                scores.at(i, k) = li.positive_fraction >= cfg.min_sample_fraction
                                      ? li.mean_dot
                                      : -std::numeric_limits<double>::infinity();
            }
        }
        for (const auto& m : greedy_match(scores, cfg.min_limb_score)) {
            connections.push_back({c, j1, j2, m.index_a, m.index_b, m.score});
        }
    }

    // Assemble persons, strongest connections first; a connection that would
    // put a second candidate on an already-filled part slot is dropped.
    std::sort(connections.begin(), connections.end(),
              [](const Connection& a, const Connection& b) {
                  if (a.score != b.score) return a.score > b.score;
                  if (a.limb != b.limb) return a.limb < b.limb;
                  if (a.cand_a != b.cand_a) return a.cand_a < b.cand_a;
                  return a.cand_b < b.cand_b;
              });

    std::vector<Cluster> clusters;
    std::vector<std::vector<int>> owner(num_parts);
    for (int j = 0; j < num_parts; ++j) {
        owner[j].assign(candidates[j].size(), -1);
    }

    for (const auto& conn : connections) {
        int ca = owner[conn.part_a][conn.cand_a];
        int cb = owner[conn.part_b][conn.cand_b];
        if (ca < 0 && cb < 0) {
            Cluster cl;
            cl.cand.assign(num_parts, -1);
            cl.cand[conn.part_a] = conn.cand_a;
            cl.cand[conn.part_b] = conn.cand_b;
            cl.limb_scores.push_back(conn.score);
            owner[conn.part_a][conn.cand_a] = static_cast<int>(clusters.size());
            owner[conn.part_b][conn.cand_b] = static_cast<int>(clusters.size());
            clusters.push_back(std::move(cl));
        } else if (ca >= 0 && cb < 0) {
            if (clusters[ca].cand[conn.part_b] != -1) continue;  // slot taken, drop
            clusters[ca].cand[conn.part_b] = conn.cand_b;
            clusters[ca].limb_scores.push_back(conn.score);
            owner[conn.part_b][conn.cand_b] = ca;
        } else if (cb >= 0 && ca < 0) {
            if (clusters[cb].cand[conn.part_a] != -1) continue;
            clusters[cb].cand[conn.part_a] = conn.cand_a;
            clusters[cb].limb_scores.push_back(conn.score);
            owner[conn.part_a][conn.cand_a] = cb;
        } else if (ca == cb) {
            clusters[ca].limb_scores.push_back(conn.score);  // closes a cycle
        } else {
            bool disjoint = true;
            for (int j = 0; j < num_parts; ++j) {
                if (clusters[ca].cand[j] != -1 && clusters[cb].cand[j] != -1) {
                    disjoint = false;
                    break;
                }
            }
            if (!disjoint) continue;  // incompatible merge, earlier limbs win
            for (int j = 0; j < num_parts; ++j) {
                const int idx = clusters[cb].cand[j];
                if (idx != -1) {
                    clusters[ca].cand[j] = idx;
                    owner[j][idx] = ca;
                }
            }
            clusters[ca].limb_scores.insert(clusters[ca].limb_scores.end(),
                                            clusters[cb].limb_scores.begin(),
                                            clusters[cb].limb_scores.end());
            clusters[ca].limb_scores.push_back(conn.score);
            clusters[cb].alive = false;
        }
    }

    const GridSpec& grid = maps.empty() ? GridSpec{1, 1, 1.0} : maps[0].grid;
    std::vector<PoseResult> results;
    for (const auto& cl : clusters) {
        if (!cl.alive) continue;
        PoseResult pose;
        pose.parts.assign(num_parts, std::nullopt);
        double part_sum = 0.0;
        int part_count = 0;
        for (int j = 0; j < num_parts; ++j) {
            if (cl.cand[j] < 0) continue;
            const PartCandidate& cand = candidates[j][cl.cand[j]];
            pose.parts[j] = PosePart{grid.grid_to_image(cand.pos), cand.score};
            part_sum += cand.score;
            part_count++;
        }
        double limb_sum = 0.0;
        for (double s : cl.limb_scores) limb_sum += s;
        pose.instance_score = (part_count > 0 ? part_sum / part_count : 0.0) +
                              (cl.limb_scores.empty() ? 0.0
                                                      : limb_sum / cl.limb_scores.size());
        results.push_back(std::move(pose));
    }

    std::sort(results.begin(), results.end(), [](const PoseResult& a, const PoseResult& b) {
        if (a.instance_score != b.instance_score) return a.instance_score > b.instance_score;
        for (std::size_t j = 0; j < a.parts.size(); ++j) {
            const bool ha = a.parts[j].has_value(), hb = b.parts[j].has_value();
            if (ha != hb) return ha;
            if (!ha) continue;
            if (a.parts[j]->pos.y != b.parts[j]->pos.y) return a.parts[j]->pos.y < b.parts[j]->pos.y;
            if (a.parts[j]->pos.x != b.parts[j]->pos.x) return a.parts[j]->pos.x < b.parts[j]->pos.x;
        }
        return false;
    });
    return results;
}

}  // namespace paflab
