// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace paflab::cli {

namespace {

using nlohmann::json;

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file " + path.string());
    }
    return json::parse(in);
}

SkeletonSpec skeleton_from_json(const json& j) {
    SkeletonSpec s;
    s.part_names = j.at("part_names").get<std::vector<std::string>>();
    for (const auto& limb : j.at("limbs")) {
        s.limbs.emplace_back(limb.at(0).get<int>(), limb.at(1).get<int>());
    }
    if (j.contains("flip_pairs")) {
        for (const auto& pair : j["flip_pairs"]) {
            s.flip_pairs.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
        }
    }
    s.oks_kappas = j.at("oks_kappas").get<std::vector<double>>();
    s.validate();
    return s;
}

void read_corruption(const json& j, CorruptionConfig& out) {
    if (j.contains("protrusion")) out.protrusion = j["protrusion"].get<bool>();
    if (j.contains("occlusion_rate")) out.occlusion_rate = j["occlusion_rate"].get<double>();
    if (j.contains("miss_rate")) out.miss_rate = j["miss_rate"].get<double>();
    if (j.contains("drop_mask_rate")) out.drop_mask_rate = j["drop_mask_rate"].get<double>();
    if (j.contains("seed")) out.seed = j["seed"].get<std::uint64_t>();
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
    RunConfig cfg;
    const json root = load_json(path);

    if (root.contains("skeleton")) {
        const auto& sk = root["skeleton"];
        if (sk.is_string()) {
            cfg.skeleton_name = sk.get<std::string>();
            if (cfg.skeleton_name == "coco18") {
                cfg.skeleton = SkeletonSpec::coco18();
            } else if (cfg.skeleton_name == "coco17") {
                cfg.skeleton = SkeletonSpec::coco17();
            } else {
                throw std::runtime_error("unknown skeleton name: " + cfg.skeleton_name);
            }
        } else {
            cfg.skeleton = skeleton_from_json(sk);
            cfg.skeleton_name = "custom";
        }
    }
    if (root.contains("stride")) cfg.stride = root["stride"].get<double>();
    if (root.contains("sigma") && !root["sigma"].is_null()) {
        cfg.sigma = root["sigma"].get<double>();
    }
    if (root.contains("limb_width")) cfg.limb_width = root["limb_width"].get<double>();

    if (root.contains("parser")) {
        const auto& p = root["parser"];
        if (p.contains("peak_threshold")) cfg.parser.peak_threshold = p["peak_threshold"].get<double>();
        if (p.contains("n_samples")) cfg.parser.n_samples = p["n_samples"].get<int>();
        if (p.contains("min_limb_score")) cfg.parser.min_limb_score = p["min_limb_score"].get<double>();
        if (p.contains("min_sample_fraction")) {
            cfg.parser.min_sample_fraction = p["min_sample_fraction"].get<double>();
        }
    }
    if (root.contains("scene")) {
        const auto& s = root["scene"];
        if (s.contains("image_size")) {
            const double size = s["image_size"].get<double>();
            cfg.scene.image_dims = {size, size};
        }
        if (s.contains("min_height")) cfg.scene.min_height = s["min_height"].get<double>();
        if (s.contains("max_height")) cfg.scene.max_height = s["max_height"].get<double>();
        if (s.contains("margin")) cfg.scene.margin = s["margin"].get<double>();
        if (s.contains("min_gap")) cfg.scene.min_gap = s["min_gap"].get<double>();
        if (s.contains("enforce_separation")) {
            cfg.scene.enforce_separation = s["enforce_separation"].get<bool>();
        }
        if (s.contains("crowd_regions")) {
            cfg.scene.crowd_region_count = s["crowd_regions"].get<int>();
        }
    }
    if (root.contains("corruption")) read_corruption(root["corruption"], cfg.corruption);
    if (root.contains("teacher_alpha")) cfg.teacher_alpha = root["teacher_alpha"].get<double>();
    if (root.contains("teacher_blur")) cfg.teacher_blur = root["teacher_blur"].get<double>();
    return cfg;
}

void RunConfig::apply_corruption_file(const std::filesystem::path& path) {
    read_corruption(load_json(path), corruption);
}

GridSpec grid_for_image(int width, int height, double stride) {
    GridSpec grid;
    grid.stride = stride;
    grid.width = std::max(1, static_cast<int>(std::ceil(width / stride)));
    grid.height = std::max(1, static_cast<int>(std::ceil(height / stride)));
    grid.validate();
    return grid;
}

}  // namespace paflab::cli
