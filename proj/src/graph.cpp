#include "assemblies/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace assemblies {

void validate(const ModelConfig& config) {
    if (config.n == 0) throw std::invalid_argument("config: n must be positive");
    if (config.k == 0 || config.k > config.n)
        throw std::invalid_argument("config: need 0 < k <= n");
    if (!(config.p > 0.0) || !(config.p < 1.0))
        throw std::invalid_argument("config: need 0 < p < 1");
    if (!(config.beta >= 0.0))
        throw std::invalid_argument("config: need beta >= 0");
}

double SparseWeights::weight_between(std::uint32_t src, std::uint32_t tgt) const {
    auto edges = in_edges(tgt);
    auto it = std::lower_bound(edges.begin(), edges.end(), src);
    if (it == edges.end() || *it != src) return 0.0;
    return weights[offsets[tgt] + static_cast<std::uint64_t>(it - edges.begin())];
}

bool SparseWeights::has_edge(std::uint32_t src, std::uint32_t tgt) const {
    auto edges = in_edges(tgt);
    return std::binary_search(edges.begin(), edges.end(), src);
}

namespace {

void check_edge_budget(std::uint64_t n_src, std::uint64_t n_tgt, double p, double budget) {
    double expected = static_cast<double>(n_src) * static_cast<double>(n_tgt) * p;
    if (expected > budget)
        throw std::invalid_argument("graph size " + std::to_string(expected) +
                                    " expected edges exceeds budget " + std::to_string(budget));
}

// Appends the in-edge list of one target: Bernoulli(p) over virtual source
// positions [0, n_virtual) via geometric gaps, remapped around `skip` when a
// self-loop must be excluded.
void fill_in_edges(SparseWeights& w, std::uint32_t n_virtual, double p, Rng& rng,
                   std::int64_t skip) {
    std::uint64_t pos = rng.geometric_gap(p);
    while (pos < n_virtual) {
        auto src = static_cast<std::uint32_t>(pos);
        if (skip >= 0 && src >= static_cast<std::uint32_t>(skip)) ++src;
        w.sources.push_back(src);
        pos += 1 + rng.geometric_gap(p);
    }
}

} // namespace

SparseWeights sample_recurrent_graph(const ModelConfig& config, Rng& rng, double edge_budget) {
    validate(config);
    check_edge_budget(config.n, config.n, config.p, edge_budget);
    SparseWeights w;
    w.n_src = w.n_tgt = config.n;
    w.offsets.reserve(config.n + 1);
    w.offsets.push_back(0);
    auto expected = static_cast<std::size_t>(
        static_cast<double>(config.n) * config.n * config.p * 1.05);
    w.sources.reserve(expected);
    for (std::uint32_t tgt = 0; tgt < config.n; ++tgt) {
        fill_in_edges(w, config.n - 1, config.p, rng, static_cast<std::int64_t>(tgt));
        w.offsets.push_back(w.sources.size());
    }
    w.weights.assign(w.sources.size(), 1.0);
    return w;
}

Fiber sample_fiber(std::uint32_t n_src, std::uint32_t n_tgt, double p, Rng& rng,
                   double edge_budget) {
    if (n_src == 0 || n_tgt == 0)
        throw std::invalid_argument("fiber: need positive source and target sizes");
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("fiber: need 0 < p < 1");
    check_edge_budget(n_src, n_tgt, p, edge_budget);
    Fiber fiber;
    SparseWeights& w = fiber.weights;
    w.n_src = n_src;
    w.n_tgt = n_tgt;
    w.offsets.reserve(n_tgt + 1);
    w.offsets.push_back(0);
    w.sources.reserve(static_cast<std::size_t>(
        static_cast<double>(n_src) * n_tgt * p * 1.05));
    for (std::uint32_t tgt = 0; tgt < n_tgt; ++tgt) {
        fill_in_edges(w, n_src, p, rng, -1);
        w.offsets.push_back(w.sources.size());
    }
    w.weights.assign(w.sources.size(), 1.0);
    return fiber;
}

Area make_area(const ModelConfig& config, Rng& rng) {
    Area area;
    area.config = config;
    area.recurrent = sample_recurrent_graph(config, rng);
    area.firing_mask.assign(config.n, 0);
    area.ever_fired.assign(config.n, 0);
    return area;
}

void renormalize_incoming(std::span<SparseWeights* const> sets) {
    if (sets.empty()) return;
    std::uint32_t n_tgt = sets.front()->n_tgt;
    for (SparseWeights* w : sets)
        if (w->n_tgt != n_tgt)
            throw std::invalid_argument("renormalize_incoming: weight sets must share a target area");
    for (std::uint32_t tgt = 0; tgt < n_tgt; ++tgt) {
        double sum = 0.0;
        for (SparseWeights* w : sets)
            for (double v : w->in_weights(tgt)) sum += v;
        if (sum <= 0.0) continue;
        for (SparseWeights* w : sets)
            for (double& v : w->in_weights(tgt)) v /= sum;
    }
}

void renormalize_incoming(SparseWeights& weights) {
    SparseWeights* one[] = {&weights};
    renormalize_incoming(std::span<SparseWeights* const>(one));
}

} // namespace assemblies
