#include "assemblies/readout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace assemblies {

void logits(const Readout& model, const FeatureMatrix& features, std::size_t i,
            std::span<double> out) {
    for (std::uint32_t c = 0; c < model.classes; ++c) {
        const double* w = model.row(c);
        double acc = w[model.dim];  // bias
        if (features.sparse) {
            for (std::uint32_t j : features.active(i)) acc += w[j];
        } else {
            auto x = features.row(i);
            for (std::uint32_t j = 0; j < model.dim; ++j) acc += w[j] * double(x[j]);
        }
        out[c] = acc;
    }
}

std::uint32_t predict(const Readout& model, const FeatureMatrix& features, std::size_t i) {
    std::vector<double> z(model.classes);
    logits(model, features, i, z);
    return static_cast<std::uint32_t>(
        std::max_element(z.begin(), z.end()) - z.begin());
}

namespace {

// Softmax probabilities in place; returns log(sum exp) shifted by the max.
void softmax(std::span<double> z) {
    double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

} // namespace

double readout_batch_loss(const Readout& model, const FeatureMatrix& features,
                          std::span<const std::uint8_t> labels,
                          std::span<const std::uint32_t> batch,
                          std::vector<double>* grad) {
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    std::vector<double> z(model.classes);
    double loss = 0.0;
    for (std::uint32_t idx : batch) {
        logits(model, features, idx, z);
        softmax(z);
        const std::uint8_t y = labels[idx];
        loss += -std::log(std::max(z[y], 1e-300));
        if (grad != nullptr) {
            for (std::uint32_t c = 0; c < model.classes; ++c) {
                const double diff = (z[c] - (c == y ? 1.0 : 0.0)) * inv_b;
                double* g = grad->data() + static_cast<std::size_t>(c) * (model.dim + 1);
                if (features.sparse) {
                    for (std::uint32_t j : features.active(idx)) g[j] += diff;
                } else {
                    auto x = features.row(idx);
                    for (std::uint32_t j = 0; j < model.dim; ++j) g[j] += diff * double(x[j]);
                }
                g[model.dim] += diff;
            }
        }
    }
    return loss * inv_b;
}

double accuracy(const Readout& model, const FeatureMatrix& features,
                std::span<const std::uint8_t> labels) {
    if (features.count == 0) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < features.count; ++i)
        if (predict(model, features, i) == labels[i]) ++correct;
    return static_cast<double>(correct) / features.count;
}

ReadoutResult train_linear_readout(const FeatureMatrix& train_features,
                                   std::span<const std::uint8_t> train_labels,
                                   const FeatureMatrix& test_features,
                                   std::span<const std::uint8_t> test_labels,
                                   const ReadoutConfig& config) {
    if (train_features.count == 0)
        throw std::invalid_argument("readout: empty training set");
    if (train_features.count != train_labels.size())
        throw std::invalid_argument("readout: feature/label count mismatch");
    if (test_features.count != test_labels.size())
        throw std::invalid_argument("readout: test feature/label count mismatch");

    ReadoutResult result;
    Readout& model = result.model;
    model.classes = config.classes;
    model.dim = train_features.dim;
    model.weights.assign(static_cast<std::size_t>(model.classes) * (model.dim + 1), 0.0);

    Rng rng = Rng::stream(config.seed, "readout");
    std::vector<std::uint32_t> order(train_features.count);
    std::iota(order.begin(), order.end(), 0u);
    std::vector<double> grad(model.weights.size());

    for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::uint32_t i = static_cast<std::uint32_t>(order.size()) - 1; i > 0; --i)
            std::swap(order[i], order[rng.uniform_int(i + 1)]);
        const double lr = config.learning_rate / std::sqrt(static_cast<double>(epoch + 1));
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            std::size_t stop = std::min(order.size(), start + config.batch_size);
            std::span<const std::uint32_t> batch(order.data() + start, stop - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            double loss = readout_batch_loss(model, train_features, train_labels, batch, &grad);
            if (!std::isfinite(loss))
                throw std::runtime_error(
                    "readout: non-finite loss at epoch " + std::to_string(epoch) +
                    ", batch " + std::to_string(batches) + "; reduce the step size");
            for (std::size_t i = 0; i < model.weights.size(); ++i)
                model.weights[i] -= lr * grad[i];
            epoch_loss += loss;
            ++batches;
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
    }

    result.train_accuracy = accuracy(model, train_features, train_labels);
    result.test_accuracy = accuracy(model, test_features, test_labels);
    return result;
}

} // namespace assemblies
