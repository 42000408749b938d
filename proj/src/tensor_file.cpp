// Copyright (c) 2026 the paflab authors
// SPDX-License-Identifier: Apache-2.0

#include "paflab/tensor_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace paflab {

namespace {

constexpr char kTensorMagic[4] = {'P', 'L', 'F', '1'};
constexpr char kLabelMagic[4] = {'P', 'L', 'S', '1'};
constexpr std::uint32_t kDtypeF32 = 1;

void put_u32(std::string& buf, std::uint32_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
    buf.push_back(static_cast<char>((v >> 16) & 0xff));
    buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
    put_u32(buf, static_cast<std::uint32_t>(v & 0xffffffffu));
    put_u32(buf, static_cast<std::uint32_t>(v >> 32));
}

void put_f32(std::string& buf, float v) { put_u32(buf, std::bit_cast<std::uint32_t>(v)); }
void put_f64(std::string& buf, double v) { put_u64(buf, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    Reader(const std::filesystem::path& path) : path_(path.string()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError(path_, 0, "cannot open file");
        bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }

    std::uint64_t offset() const { return pos_; }
    std::uint64_t remaining() const { return bytes_.size() - pos_; }

    void expect_magic(const char (&magic)[4], const char* what) {
        if (remaining() < 4) throw IoError(path_, pos_, std::string("truncated ") + what);
        if (std::memcmp(bytes_.data() + pos_, magic, 4) != 0) {
            throw IoError(path_, pos_, std::string("bad magic for ") + what);
        }
        pos_ += 4;
    }

    std::uint32_t read_u32(const char* what) {
        if (remaining() < 4) throw IoError(path_, pos_, std::string("truncated ") + what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        }
        pos_ += 4;
        return v;
    }

    std::uint64_t read_u64(const char* what) {
        const std::uint64_t lo = read_u32(what);
        const std::uint64_t hi = read_u32(what);
        return lo | (hi << 32);
    }

    float read_f32(const char* what) { return std::bit_cast<float>(read_u32(what)); }
    double read_f64(const char* what) { return std::bit_cast<double>(read_u64(what)); }

    void expect_end() {
        if (remaining() != 0) throw IoError(path_, pos_, "trailing bytes after payload");
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::string bytes_;
    std::uint64_t pos_ = 0;
};

void encode_tensor(std::string& buf, const Tensor& tensor) {
    buf.append(kTensorMagic, 4);
    put_u32(buf, kDtypeF32);
    put_u32(buf, static_cast<std::uint32_t>(tensor.dims.size()));
    for (auto d : tensor.dims) put_u32(buf, d);
    for (float v : tensor.data) put_f32(buf, v);
}

Tensor decode_tensor(Reader& reader) {
    reader.expect_magic(kTensorMagic, "tensor header");
    const std::uint32_t dtype = reader.read_u32("tensor dtype");
    if (dtype != kDtypeF32) {
        throw IoError(reader.path(), reader.offset(), "unsupported tensor dtype");
    }
    const std::uint32_t rank = reader.read_u32("tensor rank");
    if (rank > 8) throw IoError(reader.path(), reader.offset(), "implausible tensor rank");
    Tensor tensor;
    tensor.dims.resize(rank);
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
        tensor.dims[i] = reader.read_u32("tensor dims");
        count *= tensor.dims[i];
    }
    tensor.data.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        tensor.data.push_back(reader.read_f32("tensor payload"));
    }
    return tensor;
}

// Write via a temp file and rename, so readers never see partial output.
void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(path.string(), 0, "cannot open file for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError(path.string(), 0, "short write");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

void write_tensor(const std::filesystem::path& path, const Tensor& tensor) {
    if (tensor.data.size() != tensor.element_count()) {
        throw std::invalid_argument("write_tensor: payload does not match dims");
    }
    std::string buf;
    buf.reserve(16 + 4 * tensor.dims.size() + 4 * tensor.data.size());
    encode_tensor(buf, tensor);
    write_atomic(path, buf);
}

Tensor read_tensor(const std::filesystem::path& path) {
    Reader reader(path);
    Tensor tensor = decode_tensor(reader);
    reader.expect_end();
    return tensor;
}

void write_labelset(const std::filesystem::path& path, const LabelSet& labels) {
    const GridSpec& grid = labels.grid();
    grid.validate();
    const std::uint32_t j = static_cast<std::uint32_t>(labels.maps.size());
    const std::uint32_t c = static_cast<std::uint32_t>(labels.pafs.size());
    const std::size_t cells = grid.cell_count();

    Tensor tensor;
    tensor.dims = {j + 2 * c + 1, static_cast<std::uint32_t>(grid.height),
                   static_cast<std::uint32_t>(grid.width)};
    tensor.data.reserve(tensor.element_count());
    for (const auto& map : labels.maps) {
        if (!(map.grid == grid)) throw std::invalid_argument("write_labelset: grid mismatch");
        tensor.data.insert(tensor.data.end(), map.values.begin(), map.values.end());
    }
    for (const auto& paf : labels.pafs) {
        if (!(paf.grid == grid)) throw std::invalid_argument("write_labelset: grid mismatch");
        tensor.data.insert(tensor.data.end(), paf.values.begin(), paf.values.end());
    }
    for (std::size_t i = 0; i < cells; ++i) {
        tensor.data.push_back(labels.mask.values[i] ? 1.0f : 0.0f);
    }

    std::string buf;
    buf.reserve(28 + 16 + 4 * tensor.data.size());
    buf.append(kLabelMagic, 4);
    put_u32(buf, j);
    put_u32(buf, c);
    put_u32(buf, static_cast<std::uint32_t>(grid.width));
    put_u32(buf, static_cast<std::uint32_t>(grid.height));
    put_f64(buf, grid.stride);
    encode_tensor(buf, tensor);
    write_atomic(path, buf);
}

LabelSet read_labelset(const std::filesystem::path& path) {
    Reader reader(path);
    reader.expect_magic(kLabelMagic, "label-set header");
    const std::uint32_t j = reader.read_u32("part count");
    const std::uint32_t c = reader.read_u32("limb count");
    GridSpec grid;
    grid.width = static_cast<int>(reader.read_u32("grid width"));
    grid.height = static_cast<int>(reader.read_u32("grid height"));
    grid.stride = reader.read_f64("grid stride");
    grid.validate();

    Tensor tensor = decode_tensor(reader);
    reader.expect_end();
    const std::size_t cells = grid.cell_count();
    if (tensor.dims.size() != 3 || tensor.dims[0] != j + 2 * c + 1 ||
        tensor.dims[1] != static_cast<std::uint32_t>(grid.height) ||
        tensor.dims[2] != static_cast<std::uint32_t>(grid.width)) {
        throw IoError(path.string(), reader.offset(), "label-set tensor shape mismatch");
    }

    LabelSet labels;
    auto it = tensor.data.begin();
    for (std::uint32_t jj = 0; jj < j; ++jj) {
        ScalarField f = ScalarField::zeros(grid);
        std::copy(it, it + cells, f.values.begin());
        it += cells;
        labels.maps.push_back(std::move(f));
    }
    for (std::uint32_t cc = 0; cc < c; ++cc) {
        VectorField f = VectorField::zeros(grid);
        std::copy(it, it + 2 * cells, f.values.begin());
        it += 2 * cells;
        labels.pafs.push_back(std::move(f));
    }
    labels.mask = BinaryMask::ones(grid);
    for (std::size_t i = 0; i < cells; ++i, ++it) {
        const float v = *it;
        if (v != 0.0f && v != 1.0f) {
            throw IoError(path.string(), reader.offset(), "mask plane holds non-binary values");
        }
        labels.mask.values[i] = v != 0.0f ? 1 : 0;
    }
    return labels;
}

LabelSet read_labelset(const std::filesystem::path& path, const SkeletonSpec& expected) {
    LabelSet labels = read_labelset(path);
    if (labels.part_count() != expected.part_count() ||
        labels.limb_count() != expected.limb_count()) {
        throw IoError(path.string(), 0,
                      "label-set channel counts do not match the declared skeleton");
    }
    return labels;
}

}  // namespace paflab
