#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "assemblies/graph.hpp"
#include "assemblies/mnist.hpp"
#include "assemblies/rng.hpp"

namespace assemblies {

enum class ExtractorKind { linear, nonlinear, large_area, random_areas, split_areas };

ExtractorKind parse_extractor_kind(const std::string& name);
std::string extractor_kind_name(ExtractorKind kind);

struct ExtractorConfig {
    ExtractorKind kind = ExtractorKind::split_areas;
    std::uint32_t m = 1000;               // total feature count
    double p = 0.1;                       // connection probability (assembly kinds)
    double beta = 1.0;
    std::uint32_t examples_per_class = 5;
    double penalty_factor = 10.0;         // negative-bias strength (large/random areas)
    std::uint64_t seed = 0;
    unsigned threads = 0;                 // 0 = hardware default
};

struct FeatureMatrix {
    std::uint32_t count = 0;
    std::uint32_t dim = 0;
    bool sparse = false;
    std::vector<float> dense;             // count x dim when dense
    std::vector<std::uint64_t> offsets;   // count + 1 when sparse
    std::vector<std::uint32_t> indices;   // active (value-1) feature ids

    std::span<const float> row(std::size_t i) const {
        return {dense.data() + static_cast<std::size_t>(i) * dim, dim};
    }
    std::span<const std::uint32_t> active(std::size_t i) const {
        return {indices.data() + offsets[i],
                static_cast<std::size_t>(offsets[i + 1] - offsets[i])};
    }
};

// One trained brain area of an assembly extractor.
struct ExtractorArea {
    Area area;
    Fiber fiber;          // 784 -> area
    std::uint32_t cap = 0;
};

struct TrainedExtractor {
    ExtractorConfig config;
    std::uint32_t input_dim = 0;
    // linear / nonlinear
    std::vector<float> feature_weights;   // m x input_dim
    double fire_threshold = 0.0;          // nonlinear: 70 * 0.2
    // assembly kinds
    std::vector<ExtractorArea> areas;
};

// Fits extractor state. Linear: m weight vectors i.i.d. N(0, 0.1^2).
// Nonlinear: m binary neurons with Bernoulli(0.2) weights, firing when input
// exceeds 70*0.2. Assembly kinds train areas on the first
// `examples_per_class` images of each class, in dataset order.
TrainedExtractor fit_extractor(const ExtractorConfig& config, const Dataset& train);

// Feature matrix for a set of images; deterministic and schedule-invariant
// (each image's features are a pure function of the trained state).
FeatureMatrix extract_features(const TrainedExtractor& extractor, const Dataset& images);

} // namespace assemblies
