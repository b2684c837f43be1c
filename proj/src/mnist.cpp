#include "assemblies/mnist.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace assemblies {

namespace {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;

std::uint32_t read_be32(std::istream& in, const std::string& what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw std::runtime_error("mnist: truncated file while reading " + what);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

} // namespace

Dataset load_mnist(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error("mnist: cannot open " + images_path);
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error("mnist: cannot open " + labels_path);

    if (read_be32(img, "image magic") != kImageMagic)
        throw std::runtime_error("mnist: bad image magic in " + images_path);
    Dataset data;
    data.count = read_be32(img, "image count");
    data.rows = read_be32(img, "rows");
    data.cols = read_be32(img, "cols");
    if (data.rows != 28 || data.cols != 28)
        throw std::runtime_error("mnist: expected 28x28 images");

    if (read_be32(lab, "label magic") != kLabelMagic)
        throw std::runtime_error("mnist: bad label magic in " + labels_path);
    std::uint32_t label_count = read_be32(lab, "label count");
    if (label_count != data.count)
        throw std::runtime_error("mnist: image/label count mismatch");

    const std::size_t total = static_cast<std::size_t>(data.count) * data.dim();
    std::vector<unsigned char> raw(total);
    if (!img.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(total)))
        throw std::runtime_error("mnist: truncated pixel data in " + images_path);
    data.pixels.resize(total);
    for (std::size_t i = 0; i < total; ++i)
        data.pixels[i] = static_cast<float>(raw[i]) / 255.0f;

    data.labels.resize(data.count);
    if (!lab.read(reinterpret_cast<char*>(data.labels.data()), data.count))
        throw std::runtime_error("mnist: truncated label data in " + labels_path);
    for (std::uint8_t l : data.labels)
        if (l > 9) throw std::runtime_error("mnist: label outside 0..9");
    return data;
}

void write_idx(const Dataset& data, std::span<const std::uint32_t> indices,
               const std::string& images_path, const std::string& labels_path) {
    std::ofstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error("mnist: cannot write " + images_path);
    std::ofstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error("mnist: cannot write " + labels_path);

    write_be32(img, kImageMagic);
    write_be32(img, static_cast<std::uint32_t>(indices.size()));
    write_be32(img, data.rows);
    write_be32(img, data.cols);
    std::vector<unsigned char> raw(data.dim());
    for (std::uint32_t idx : indices) {
        auto px = data.image(idx);
        for (std::size_t j = 0; j < px.size(); ++j)
            raw[j] = static_cast<unsigned char>(std::lround(px[j] * 255.0f));
        img.write(reinterpret_cast<const char*>(raw.data()),
                  static_cast<std::streamsize>(raw.size()));
    }

    write_be32(lab, kLabelMagic);
    write_be32(lab, static_cast<std::uint32_t>(indices.size()));
    for (std::uint32_t idx : indices) {
        char l = static_cast<char>(data.labels[idx]);
        lab.write(&l, 1);
    }
}

Dataset head(const Dataset& data, std::uint32_t limit) {
    if (limit == 0 || limit >= data.count) return data;
    Dataset out;
    out.count = limit;
    out.rows = data.rows;
    out.cols = data.cols;
    out.pixels.assign(data.pixels.begin(),
                      data.pixels.begin() + static_cast<std::ptrdiff_t>(limit * data.dim()));
    out.labels.assign(data.labels.begin(), data.labels.begin() + limit);
    return out;
}

} // namespace assemblies
