#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "assemblies/rng.hpp"

namespace assemblies {

struct LabeledExample {
    std::vector<float> activation;  // length n, values in [0,1]
    int label = 0;
};

// A labeled input distribution over binary sensory patterns: a core set of k
// neurons firing with probability r, everything else with probability q*k/n.
// q is stored as the scalar rate parameter; the per-neuron off-core
// probability is q*k/n.
struct StimulusClass {
    std::vector<std::uint32_t> core;  // sorted, |core| = k
    double r = 0.9;                   // in (0,1]
    double q = 0.1;                   // in [0,1)
    std::uint32_t n = 0;
};

// Core drawn uniformly without replacement; with `overlap_with`, exactly
// round(alpha*k) core neurons are shared with the given class and the rest
// avoid it entirely.
StimulusClass make_stimulus_class(std::uint32_t k, std::uint32_t n, double r, double q,
                                  Rng& rng,
                                  const StimulusClass* overlap_with = nullptr,
                                  double alpha = 0.0);

LabeledExample sample_stimulus(const StimulusClass& cls, Rng& rng, int label = 0);
void sample_stimulus_into(const StimulusClass& cls, Rng& rng, std::span<float> out);

// Linear-threshold class: nonnegative direction v of unit Euclidean norm and
// margin delta. Positive examples have coordinate means k/n + delta*v_i,
// negative examples k/n everywhere.
struct HalfspaceClass {
    std::vector<double> v;
    double delta = 1.0;
    std::uint32_t n = 0;
    std::uint32_t k = 0;
};

struct HalfspaceRegime {
    double l1_norm = 0.0;
    bool l1_below_k = false;      // ||v||_1 < k: outside the stated lower regime
    bool l1_above_sqrt = false;   // ||v||_1 > sqrt(n)/2
};

// Validates ||v||_2 = 1 (within 1e-9), nonnegativity (unless allow_signed),
// and the feasibility bound k/n + delta*max(v) <= 1. Regime bounds on ||v||_1
// are reported, not enforced.
HalfspaceClass make_halfspace_class(std::vector<double> v, double delta,
                                    std::uint32_t n, std::uint32_t k,
                                    bool allow_signed = false);
HalfspaceRegime halfspace_regime(const HalfspaceClass& cls);

// Unit-L2 v spread uniformly over a random support of the given size.
HalfspaceClass make_uniform_halfspace(std::uint32_t support_size, double delta,
                                      std::uint32_t n, std::uint32_t k, Rng& rng);

LabeledExample sample_halfspace(const HalfspaceClass& cls, bool positive, Rng& rng);
void sample_halfspace_into(const HalfspaceClass& cls, bool positive, Rng& rng,
                           std::span<float> out);

} // namespace assemblies
