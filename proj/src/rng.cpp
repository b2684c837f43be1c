#include "assemblies/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace assemblies {

std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view label) {
    // FNV-1a over the label, then splitmix64 finalization mixed with the seed.
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull + (h | 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

Rng Rng::stream(std::uint64_t seed, std::string_view label) {
    return Rng(derive_stream_seed(seed, label));
}

Rng Rng::substream(std::string_view label) {
    return Rng(derive_stream_seed(next(), label));
}

std::uint64_t Rng::uniform_int(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_int: bound must be positive");
    // Lemire's multiply-shift rejection.
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
        std::uint64_t t = (0 - bound) % bound;
        while (lo < t) {
            m = static_cast<unsigned __int128>(next()) * bound;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 1.0 - uniform(); // (0, 1]
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::vector<std::uint32_t> Rng::sample_without_replacement(std::uint32_t n, std::uint32_t m) {
    if (m > n) throw std::invalid_argument("sample_without_replacement: m > n");
    std::vector<std::uint32_t> out;
    out.reserve(m);
    for (std::uint32_t j = n - m; j < n; ++j) {
        auto t = static_cast<std::uint32_t>(uniform_int(j + 1));
        if (std::find(out.begin(), out.end(), t) != out.end()) {
            out.push_back(j);
        } else {
            out.push_back(t);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t Rng::geometric_gap(double p) {
    // floor(ln(1-u) / ln(1-p)), exact for a Bernoulli(p) scan.
    double u = uniform();
    double g = std::floor(std::log1p(-u) / std::log1p(-p));
    if (g < 0) g = 0;
    return static_cast<std::uint64_t>(g);
}

} // namespace assemblies
