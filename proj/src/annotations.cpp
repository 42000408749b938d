// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include "paflab/annotations.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "paflab/tensor_file.hpp"

namespace paflab {

namespace {

using nlohmann::json;

// COCO-17 keypoint order -> stock 18-part order (neck synthesized separately).
constexpr int kCoco17ToStock18[17] = {
    0,   // nose
    15,  // left_eye
    14,  // right_eye
    17,  // left_ear
    16,  // right_ear
    5,   // left_shoulder
    2,   // right_shoulder
    6,   // left_elbow
    3,   // right_elbow
    7,   // left_wrist
    4,   // right_wrist
    11,  // left_hip
    8,   // right_hip
    12,  // left_knee
    9,   // right_knee
    13,  // left_ankle
    10,  // right_ankle
};
constexpr int kStockNeck = 1;
constexpr int kStockLeftShoulder = 5;
constexpr int kStockRightShoulder = 2;

[[noreturn]] void bad_annotation(long id, const std::string& what) {
    throw std::runtime_error("annotation " + std::to_string(id) + ": " + what);
}

Visibility visibility_from_flag(long id, int v) {
    switch (v) {
        case 0: return Visibility::Absent;
        case 1: return Visibility::OccludedLabeled;
        case 2: return Visibility::VisibleLabeled;
        default: bad_annotation(id, "unknown visibility flag " + std::to_string(v));
    }
}

bool is_stock18(const SkeletonSpec& skeleton) {
    static const std::vector<std::string> names = SkeletonSpec::coco18().part_names;
    return skeleton.part_names == names;
}

PersonAnnotation parse_person(long id, const json& ann, const SkeletonSpec& skeleton) {
    if (!ann.contains("keypoints") || !ann["keypoints"].is_array()) {
        bad_annotation(id, "missing keypoints array");
    }
    const auto& flat = ann["keypoints"];
    if (flat.size() % 3 != 0) bad_annotation(id, "keypoints length not a multiple of 3");
    const int n = static_cast<int>(flat.size()) / 3;
    const int num_parts = skeleton.part_count();

    std::vector<Keypoint> raw(n);
    for (int i = 0; i < n; ++i) {
        raw[i].x = flat[3 * i].get<double>();
        raw[i].y = flat[3 * i + 1].get<double>();
        raw[i].state = visibility_from_flag(id, flat[3 * i + 2].get<int>());
    }

    PersonAnnotation person;
    if (n == num_parts) {
        person.keypoints = std::move(raw);
    } else if (n == 17 && num_parts == 18 && is_stock18(skeleton)) {
        person.keypoints.assign(18, Keypoint{});
        for (int i = 0; i < 17; ++i) {
            person.keypoints[kCoco17ToStock18[i]] = raw[i];
        }
        const Keypoint& ls = person.keypoints[kStockLeftShoulder];
        const Keypoint& rs = person.keypoints[kStockRightShoulder];
        if (ls.labeled() && rs.labeled()) {
            const Visibility v = (ls.state == Visibility::VisibleLabeled &&
                                  rs.state == Visibility::VisibleLabeled)
                                     ? Visibility::VisibleLabeled
                                     : Visibility::OccludedLabeled;
            person.keypoints[kStockNeck] = {(ls.x + rs.x) / 2.0, (ls.y + rs.y) / 2.0, v};
        }
    } else {
        bad_annotation(id, "keypoint count " + std::to_string(n) +
                               " does not fit a " + std::to_string(num_parts) +
                               "-part skeleton");
    }
    if (ann.contains("area") && ann["area"].is_number()) {
        person.area = ann["area"].get<double>();
    }
    return person;
}

std::vector<IgnoreRegion> parse_segmentation(long id, const json& seg) {
    std::vector<IgnoreRegion> regions;
    if (seg.is_array()) {  // list of flat polygons
        for (const auto& poly_json : seg) {
            if (!poly_json.is_array() || poly_json.size() < 6 || poly_json.size() % 2 != 0) {
                bad_annotation(id, "bad polygon in segmentation");
            }
            Polygon poly;
            for (std::size_t i = 0; i < poly_json.size(); i += 2) {
                poly.vertices.push_back(
                    {poly_json[i].get<double>(), poly_json[i + 1].get<double>()});
            }
            regions.emplace_back(std::move(poly));
        }
    } else if (seg.is_object() && seg.contains("counts") && seg.contains("size")) {
        if (seg["counts"].is_string()) {
            bad_annotation(id, "unsupported encoding: compressed RLE");
        }
        if (!seg["counts"].is_array() || !seg["size"].is_array() || seg["size"].size() != 2) {
            bad_annotation(id, "bad RLE segmentation");
        }
        RleRegion rle;
        rle.height = seg["size"][0].get<int>();
        rle.width = seg["size"][1].get<int>();
        for (const auto& c : seg["counts"]) {
            rle.counts.push_back(c.get<std::uint32_t>());
        }
        regions.emplace_back(std::move(rle));
    } else {
        bad_annotation(id, "unrecognized segmentation encoding");
    }
    return regions;
}

}  // namespace

std::vector<ImageAnnotations> read_annotations(const std::filesystem::path& path,
                                               const SkeletonSpec& skeleton) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), 0, "cannot open file");
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path.string(), e.byte, e.what());
    }

    if (!root.contains("images") || !root["images"].is_array()) {
        throw std::runtime_error(path.string() + ": missing images array");
    }
    std::vector<ImageAnnotations> images;
    std::map<long, std::size_t> by_id;
    for (const auto& img : root["images"]) {
        ImageAnnotations entry;
        entry.image_id = img.at("id").get<long>();
        entry.width = img.at("width").get<int>();
        entry.height = img.at("height").get<int>();
        if (!by_id.emplace(entry.image_id, images.size()).second) {
            throw std::runtime_error(path.string() + ": duplicate image id " +
                                     std::to_string(entry.image_id));
        }
        images.push_back(std::move(entry));
    }

    if (root.contains("annotations")) {
        for (const auto& ann : root["annotations"]) {
            const long id = ann.contains("id") ? ann["id"].get<long>() : -1;
            if (!ann.contains("image_id")) bad_annotation(id, "missing image_id");
            const long image_id = ann["image_id"].get<long>();
            const auto it = by_id.find(image_id);
            if (it == by_id.end()) {
                bad_annotation(id, "references unknown image " + std::to_string(image_id));
            }
            ImageAnnotations& image = images[it->second];
            const int iscrowd = ann.contains("iscrowd") ? ann["iscrowd"].get<int>() : 0;
            if (iscrowd == 1) {
                if (!ann.contains("segmentation")) {
                    bad_annotation(id, "crowd annotation without segmentation");
                }
                for (auto& region : parse_segmentation(id, ann["segmentation"])) {
                    image.ignore_regions.push_back(std::move(region));
                }
            } else {
                image.persons.push_back(parse_person(id, ann, skeleton));
            }
        }
    }
    return images;
}

void write_annotations(const std::filesystem::path& path,
                       const std::vector<ImageAnnotations>& images,
                       const SkeletonSpec& skeleton) {
    json root;
    root["images"] = json::array();
    root["annotations"] = json::array();
    long next_id = 1;
    for (const auto& image : images) {
        root["images"].push_back(
            {{"id", image.image_id}, {"width", image.width}, {"height", image.height}});
        for (const auto& person : image.persons) {
            if (static_cast<int>(person.keypoints.size()) != skeleton.part_count()) {
                throw std::invalid_argument("write_annotations: part count mismatch");
            }
            json flat = json::array();
            int labeled = 0;
            for (const auto& kp : person.keypoints) {
                flat.push_back(kp.x);
                flat.push_back(kp.y);
                flat.push_back(static_cast<int>(kp.state));
                if (kp.labeled()) labeled++;
            }
            json ann = {{"id", next_id++},
                        {"image_id", image.image_id},
                        {"iscrowd", 0},
                        {"num_keypoints", labeled},
                        {"keypoints", std::move(flat)}};
            if (person.area.has_value()) ann["area"] = *person.area;
            root["annotations"].push_back(std::move(ann));
        }
        for (const auto& region : image.ignore_regions) {
            const auto* poly = std::get_if<Polygon>(&region);
            if (!poly) {
                throw std::invalid_argument(
                    "write_annotations: only polygon ignore regions are serializable");
            }
            json flat = json::array();
            for (const auto& v : poly->vertices) {
                flat.push_back(v.x);
                flat.push_back(v.y);
            }
            json zeros = json::array();
            for (int i = 0; i < skeleton.part_count() * 3; ++i) zeros.push_back(0);
            root["annotations"].push_back({{"id", next_id++},
                                           {"image_id", image.image_id},
                                           {"iscrowd", 1},
                                           {"num_keypoints", 0},
                                           {"keypoints", std::move(zeros)},
                                           {"segmentation", json::array({std::move(flat)})}});
        }
    }

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError(path.string(), 0, "cannot open file for writing");
        out << root.dump(1) << "\n";
        if (!out) throw IoError(path.string(), 0, "short write");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace paflab
