#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "assemblies/rng.hpp"

namespace assemblies {

// Global model parameters. Identical configs (including seed) reproduce
// bit-identical graphs, caps and metrics downstream.
struct ModelConfig {
    std::uint32_t n = 1000;   // neurons per area
    std::uint32_t k = 100;    // cap size
    double p = 0.1;           // connection probability, in (0,1)
    double beta = 0.1;        // plasticity parameter, >= 0
    std::uint64_t seed = 0;
};

// Throws std::invalid_argument on violated parameter ranges (k > n, p outside
// the open interval, negative beta). p = 0 and p = 1 are rejected: sparse
// storage degenerates at either end.
void validate(const ModelConfig& config);

// Sparse directed weights stored target-major: for each target neuron, the
// ascending list of source indices plus one weight per edge. The edge set is
// fixed at generation; only weights change, and they stay nonnegative.
struct SparseWeights {
    std::uint32_t n_src = 0;
    std::uint32_t n_tgt = 0;
    std::vector<std::uint64_t> offsets;  // n_tgt + 1 entries
    std::vector<std::uint32_t> sources;
    std::vector<double> weights;         // initialized to 1

    std::uint64_t edge_count() const { return sources.size(); }

    std::span<const std::uint32_t> in_edges(std::uint32_t tgt) const {
        return {sources.data() + offsets[tgt],
                static_cast<std::size_t>(offsets[tgt + 1] - offsets[tgt])};
    }
    std::span<const double> in_weights(std::uint32_t tgt) const {
        return {weights.data() + offsets[tgt],
                static_cast<std::size_t>(offsets[tgt + 1] - offsets[tgt])};
    }
    std::span<double> in_weights(std::uint32_t tgt) {
        return {weights.data() + offsets[tgt],
                static_cast<std::size_t>(offsets[tgt + 1] - offsets[tgt])};
    }

    // Weight of edge src->tgt, or 0 if the edge is absent. Test/analysis
    // utility; not for hot loops.
    double weight_between(std::uint32_t src, std::uint32_t tgt) const;
    bool has_edge(std::uint32_t src, std::uint32_t tgt) const;
};

// Afferent weights from a sensory area into a brain area.
struct Fiber {
    SparseWeights weights;
};

// One brain region: recurrent G(n,p) weights plus the dynamical state the
// step operator reads and writes.
struct Area {
    ModelConfig config;
    SparseWeights recurrent;                  // n x n, no self-loops
    std::vector<std::uint32_t> firing;        // sorted; empty at rest
    std::vector<std::uint8_t> firing_mask;    // n entries, synced with firing
    bool inhibited = false;
    std::vector<std::uint8_t> ever_fired;     // per training phase
};

// Expected-edge budget guard: generation refuses configs whose expected edge
// count would not fit a desk-scale memory budget.
constexpr double kDefaultEdgeBudget = 4e8;

// Each ordered pair (i,j), i != j, gets an edge independently with
// probability p; all weights start at 1.
SparseWeights sample_recurrent_graph(const ModelConfig& config, Rng& rng,
                                     double edge_budget = kDefaultEdgeBudget);

// Bipartite variant over distinct vertex sets (index coincidence allowed).
Fiber sample_fiber(std::uint32_t n_src, std::uint32_t n_tgt, double p, Rng& rng,
                   double edge_budget = kDefaultEdgeBudget);

Area make_area(const ModelConfig& config, Rng& rng);

// Homeostasis: for every target neuron with positive total incoming weight S
// across the given sets, divide each incoming weight by S. Neurons with
// S == 0 are left untouched.
void renormalize_incoming(std::span<SparseWeights* const> sets);
void renormalize_incoming(SparseWeights& weights);

} // namespace assemblies
