#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "assemblies/dynamics.hpp"
#include "assemblies/graph.hpp"
#include "assemblies/stimuli.hpp"

namespace assemblies {

struct TrainConfig {
    std::uint32_t samples_per_class = 5;  // T
    double beta = 0.1;
    bool homeostasis_between_classes = true;
    bool plastic = true;
};

// A learned class representation: the final training cap plus the union of
// all caps seen during the phase.
struct AssemblyRecord {
    int label = 0;
    std::vector<std::uint32_t> core_estimate;  // sorted, |core_estimate| = k
    std::vector<std::uint32_t> support;        // sorted, core_estimate subset
    double gamma_measured = 0.0;               // filled by analysis
};

// Per-class convergence trace: the cap of every training step plus first-timer
// counts, streamable as JSON-lines.
struct PhaseTrace {
    std::vector<std::vector<std::uint32_t>> caps;
    std::vector<std::uint32_t> first_timers;
};

// One JSON object per line: {"step", "first_timers", "cap_overlap_prev"}.
std::string to_jsonl(const PhaseTrace& trace);

// An untrained instantiation: one sensory->area fiber plus the area itself,
// built from labeled streams of the config seed.
struct Model {
    ModelConfig config;
    std::uint32_t sensory_n = 0;
    Area area;
    Fiber fiber;
};

Model make_model(const ModelConfig& config, std::uint32_t sensory_n = 0);

struct TrainedModel {
    Model model;
    std::vector<AssemblyRecord> assemblies;
    std::vector<PhaseTrace> traces;       // parallel to assemblies
    bool weights_normalized = false;
};

// Fills one sensory activation; deliberately label-free so a training phase
// cannot read labels (grouping samples by class is the only supervision).
using Sampler = std::function<void(std::span<float>)>;

// One phase of the learning protocol: reset first-timer accounting, run T
// plastic steps each on a fresh sample, record core (final cap) and support
// (union of caps), return the area to rest, then homeostasis if configured.
TrainedModel train_phases(Model&& model, std::span<const Sampler> samplers,
                          std::span<const int> labels, const TrainConfig& cfg);

TrainedModel train_classes(Model&& model, std::span<const StimulusClass> classes,
                           const TrainConfig& cfg, Rng& rng);

// Halfspace variant: only the positive distribution is presented, yielding a
// single assembly.
TrainedModel train_classes(Model&& model, const HalfspaceClass& cls,
                           const TrainConfig& cfg, Rng& rng);

// Cap evoked by one non-plastic step from rest (fiber input only). Pure:
// never mutates the model, so concurrent evaluation is safe.
std::vector<std::uint32_t> response_cap(const TrainedModel& trained,
                                        std::span<const float> activation);

std::uint32_t overlap_count(std::span<const std::uint32_t> sorted_a,
                            std::span<const std::uint32_t> sorted_b);

// Argmax over assemblies of |cap ∩ core_estimate|; ties go to the lowest
// label. Throws std::logic_error when no assembly has been trained.
int classify_overlap(const TrainedModel& trained, std::span<const float> activation,
                     bool* ambiguous = nullptr);

// Positive iff |cap ∩ core_estimate| >= epsilon_threshold * k.
bool classify_halfspace(const TrainedModel& trained, std::span<const float> activation,
                        double epsilon_threshold = 0.5);

// Assembly records (label, core, support, gamma) as a JSON array of index
// sets; pairs with the binary model snapshot for serialization.
std::string assemblies_to_json(const TrainedModel& trained);

struct ProjectReport {
    AssemblyRecord record;
    bool converged = false;        // zero first-timers reached within `rounds`
    std::uint32_t convergence_step = 0;  // 1-based; 0 when not converged
    PhaseTrace trace;
};

// Fires the assembly's core into a readout area for `rounds` plastic steps.
// Non-convergence is reported, not fatal.
ProjectReport project_to_readout(Area& readout, Fiber& readout_fiber,
                                 const AssemblyRecord& assembly,
                                 std::uint32_t source_n, std::uint32_t rounds,
                                 double beta);

} // namespace assemblies
