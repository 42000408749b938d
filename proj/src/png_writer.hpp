// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace paflab::detail {

/// Minimal RGB8 PNG encoder: zlib stream with stored deflate blocks, no
/// filtering. Output bytes depend only on the pixels, so renders diff cleanly.
std::string encode_png_rgb8(int width, int height, const std::vector<std::uint8_t>& rgb);

}  // namespace paflab::detail
