#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "assemblies/graph.hpp"

namespace assemblies {

// One presented stimulus: sensory activations in [0,1] (binary for synthetic
// classes, graded for images), the afferent fiber, and the target area.
struct StepInput {
    std::span<const float> sensory_firing;
    Fiber* fiber = nullptr;
    Area* area = nullptr;
};

struct StepReport {
    std::vector<std::uint32_t> cap;       // sorted winners, |cap| = k
    std::uint32_t first_timers = 0;       // winners never in a cap this phase
    std::vector<double> synaptic_inputs;  // retained only on request
};

// SI(i) = sum over fiber edges (j->i) of sensory[j] * w_fiber(j,i)
//       + sum over recurrent edges (j->i), j currently firing, of w_rec(j,i).
// Uses weights as of before the step. Throws on dimension mismatch or when
// the area is inhibited.
std::vector<double> synaptic_input(const Area& area, const Fiber& fiber,
                                   std::span<const float> sensory_firing);

// Exactly k indices with the highest values; every selected value >= every
// unselected one; ties broken toward the lowest index. Result sorted.
std::vector<std::uint32_t> k_cap(std::span<const double> si, std::uint32_t k);
void k_cap(std::span<const double> si, std::uint32_t k,
           std::vector<std::uint32_t>& scratch, std::vector<std::uint32_t>& out);

// w(j,i) *= 1 + beta * pre(j) for every edge (j,i) with i in post_cap.
// Binary presynaptic firing reduces this to the (1+beta) rule.
void hebbian_update(SparseWeights& weights, std::span<const float> pre_activation,
                    std::span<const std::uint32_t> post_cap, double beta);
void hebbian_update(SparseWeights& weights, std::span<const std::uint8_t> pre_mask,
                    std::span<const std::uint32_t> post_cap, double beta);

// One step of the dynamical system: SI from pre-step weights and firing state,
// k-cap selection, then (if plastic) the Hebbian update on both fiber and
// recurrent weights, then the firing state advances to the cap.
StepReport area_step(const StepInput& input, double beta, bool plastic,
                     bool keep_si = false);

void inhibit(Area& area);      // clears firing, sets the flag; weights untouched
void disinhibit(Area& area);   // clears the flag only
void reset_phase(Area& area);  // ever_fired := false, firing cleared; weights untouched

void set_firing(Area& area, std::span<const std::uint32_t> cap);

} // namespace assemblies
