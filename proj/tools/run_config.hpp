// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "paflab/core.hpp"
#include "paflab/parser.hpp"
#include "paflab/synthetic.hpp"

namespace paflab::cli {

/// Everything the pipeline leaves tunable, loadable from one JSON file and
/// overridable per flag. Field names mirror the JSON keys.
struct RunConfig {
    SkeletonSpec skeleton = SkeletonSpec::coco18();
    std::string skeleton_name = "coco18";
    double stride = 8.0;
    std::optional<double> sigma;  // grid cells; empty -> 7.0 / stride
    double limb_width = 1.0;
    ParserConfig parser;
    SceneConfig scene;
    CorruptionConfig corruption;
    double teacher_alpha = 1.0;
    double teacher_blur = 0.0;

    double effective_sigma() const { return sigma.value_or(7.0 / stride); }

    static RunConfig load(const std::filesystem::path& path);
    void apply_corruption_file(const std::filesystem::path& path);
};

GridSpec grid_for_image(int width, int height, double stride);

}  // namespace paflab::cli
