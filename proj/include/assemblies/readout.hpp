#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "assemblies/features.hpp"
#include "assemblies/rng.hpp"

namespace assemblies {

struct ReadoutConfig {
    std::uint32_t classes = 10;
    std::uint32_t epochs = 30;
    std::uint32_t batch_size = 128;
    double learning_rate = 0.1;   // decayed by 1/sqrt(epoch)
    std::uint64_t seed = 0;
};

// Multinomial logistic layer; weights are classes x (dim + 1), bias last.
struct Readout {
    std::uint32_t classes = 0;
    std::uint32_t dim = 0;
    std::vector<double> weights;

    double* row(std::uint32_t c) { return weights.data() + static_cast<std::size_t>(c) * (dim + 1); }
    const double* row(std::uint32_t c) const {
        return weights.data() + static_cast<std::size_t>(c) * (dim + 1);
    }
};

struct ReadoutResult {
    Readout model;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    std::vector<double> epoch_loss;
};

void logits(const Readout& model, const FeatureMatrix& features, std::size_t i,
            std::span<double> out);

std::uint32_t predict(const Readout& model, const FeatureMatrix& features, std::size_t i);

// Mean cross-entropy over the batch; accumulates the analytic gradient into
// `grad` (same layout as weights) when non-null. This is the exact function
// the finite-difference check differentiates.
double readout_batch_loss(const Readout& model, const FeatureMatrix& features,
                          std::span<const std::uint8_t> labels,
                          std::span<const std::uint32_t> batch,
                          std::vector<double>* grad);

// Mini-batch gradient descent on cross-entropy; deterministic under a fixed
// seed. Throws std::runtime_error with diagnostics if the loss goes NaN.
ReadoutResult train_linear_readout(const FeatureMatrix& train_features,
                                   std::span<const std::uint8_t> train_labels,
                                   const FeatureMatrix& test_features,
                                   std::span<const std::uint8_t> test_labels,
                                   const ReadoutConfig& config);

double accuracy(const Readout& model, const FeatureMatrix& features,
                std::span<const std::uint8_t> labels);

} // namespace assemblies
