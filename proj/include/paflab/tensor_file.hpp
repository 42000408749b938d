// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "paflab/core.hpp"

namespace paflab {

/// Structured I/O failure carrying the file path and byte offset.
class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, std::uint64_t offset, const std::string& what)
        : std::runtime_error(path + " @" + std::to_string(offset) + ": " + what),
          path_(path),
          offset_(offset) {}
    const std::string& path() const { return path_; }
    std::uint64_t offset() const { return offset_; }

private:
    std::string path_;
    std::uint64_t offset_;
};

/// Rank-N f32 array, row-major with the first dimension outermost.
struct Tensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    std::size_t element_count() const {
        std::size_t n = 1;
        for (auto d : dims) n *= d;
        return n;
    }
};

/// On-disk layout, all little-endian regardless of host:
///   "PLF1" | u32 dtype (1 = f32) | u32 rank | u32 dims[rank] | f32 payload
void write_tensor(const std::filesystem::path& path, const Tensor& tensor);
Tensor read_tensor(const std::filesystem::path& path);

/// Label-set container:
///   "PLS1" | u32 J | u32 C | u32 width | u32 height | f64 stride
///   | embedded tensor of shape [J + 2C + 1, height, width]
/// holding the J confidence maps, the x/y planes of the C PAFs, and the mask
/// (as 0/1 f32). Round trips are bit-exact.
void write_labelset(const std::filesystem::path& path, const LabelSet& labels);
LabelSet read_labelset(const std::filesystem::path& path);
/// Same, but validates J and C against a skeleton.
LabelSet read_labelset(const std::filesystem::path& path, const SkeletonSpec& expected);

}  // namespace paflab
