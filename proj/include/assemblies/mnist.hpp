#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace assemblies {

// Image set with pixel intensities already scaled to [0,1] (byte / 255).
struct Dataset {
    std::uint32_t count = 0;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<float> pixels;        // count * rows * cols, row-major
    std::vector<std::uint8_t> labels; // count entries, values 0..9

    std::size_t dim() const { return static_cast<std::size_t>(rows) * cols; }
    std::span<const float> image(std::size_t i) const {
        return {pixels.data() + i * dim(), dim()};
    }
};

// IDX binary pair (big-endian headers, magic 2051 for images / 2049 for
// labels, 28x28). Throws std::runtime_error on bad magic, truncation, wrong
// dimensions, or an image/label count mismatch.
Dataset load_mnist(const std::string& images_path, const std::string& labels_path);

// Re-serializes a subset in the same IDX layout (values round-trip exactly).
void write_idx(const Dataset& data, std::span<const std::uint32_t> indices,
               const std::string& images_path, const std::string& labels_path);

// First `limit` examples (0 = all).
Dataset head(const Dataset& data, std::uint32_t limit);

} // namespace assemblies
