#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "assemblies/learning.hpp"
#include "assemblies/stimuli.hpp"

namespace assemblies {

/* Closed-form evaluators for the creation / recall / multiple-assembly /
 * classification / linear-threshold bounds, all pure functions of the model
 * parameters. Values outside a bound's meaningful range are flagged, never
 * clamped. L is always 2*ln(n/k), natural log.
 */

// Plasticity threshold for reliable assembly creation:
// beta0 = (1/r^2) * ((sqrt(2)-r^2)*sqrt(L) + sqrt(6)) / (sqrt(kp) + sqrt(L)).
double beta0(std::uint32_t n, std::uint32_t k, double p, double r);

// Full (r,q)-dependent variant kept for sensitivity studies; the simplified
// form above (r+q ~ 1) is the default everywhere.
double beta0_full(std::uint32_t n, std::uint32_t k, double p, double r, double q);

// |support| <= k / (1 - exp(-(beta/beta0)^2)).
double support_bound(double beta, double beta0_value, std::uint32_t k);

// Recall misses at most an e^{-kpr} fraction of the core.
double recall_defect_bound(std::uint32_t k, double p, double r);

// Average core-incoming weight needed for recall:
// 1 + (1/sqrt(r)) * (sqrt(2) + sqrt((2/(kpr)) ln(n/k) + 2)).
double gamma_recall_min(std::uint32_t n, std::uint32_t k, double p, double r);

// Upper bound on gamma compatible with overlap preservation:
// 1 + (sqrt(L) - sqrt(2 ln((1+r)/(r*alpha)))) / (alpha * r * sqrt(kp)).
// Vacuous (< 1) at desk scale; callers read the flag in BoundReport.
double gamma_multi_max(std::uint32_t n, std::uint32_t k, double p, double r, double alpha);

// Classification defect 2*exp(-(1/2)(gamma*alpha - 1)^2 kpr).
double classify_defect_bound(double gamma, double alpha, std::uint32_t k, double p, double r);

// Required Delta^2 * beta: sqrt(2k/p) * (sqrt(2 ln(n/k) + 2) + 1).
double halfspace_margin_requirement(std::uint32_t n, std::uint32_t k, double p);

// Rounds until a synapse reaches expected weight gamma:
// ceil((1/(p*q)) * ln(gamma) / ln(1+beta)).
long rounds_for_weight(double gamma, double p_fire_pre, double q_fire_post, double beta);

struct BoundReport {
    // inputs echoed
    std::uint32_t n = 0, k = 0;
    double p = 0, r = 0, q = 0, alpha = 0, gamma = 0, delta = 0, beta = 0;
    // bounds
    double beta0 = 0;
    double support_bound = 0;
    double recall_defect_bound = 0;
    double gamma_recall_min = 0;
    double gamma_multi_max = 0;
    double classify_defect_bound = 0;
    double halfspace_margin_req = 0;
    // vacuity flags (reported, never hidden)
    bool gamma_multi_vacuous = false;
    bool classify_vacuous = false;
    bool recall_vacuous = false;
};

BoundReport evaluate_bounds(std::uint32_t n, std::uint32_t k, double p, double r,
                            double q, double alpha, double gamma, double delta,
                            double beta);

std::string to_json(const BoundReport& report);

struct EmpiricalStats {
    // Per class, per training step.
    std::vector<std::vector<double>> mu_trace;  // first-timer fractions
    std::vector<std::vector<double>> nu_trace;  // overlap with previously trained cores
    double gamma_measured = 0.0;
    std::vector<std::vector<double>> input_overlap;     // mean |sample_i ∩ core_j|
    std::vector<std::vector<double>> assembly_overlap;  // |core_i ∩ core_j|
    std::vector<std::vector<double>> firing_probability; // per class, per neuron
};

// Mean weight over existing fiber edges core(class) -> core_estimate,
// normalized by the untrained per-edge baseline (1, or 1/in-degree once the
// weights have been renormalized), so gamma = 1 means "unstrengthened".
double measure_gamma(const TrainedModel& trained, const StimulusClass& cls,
                     const AssemblyRecord& assembly);

EmpiricalStats empirical_stats(const TrainedModel& trained,
                               std::span<const StimulusClass> classes,
                               std::uint32_t num_test, Rng& rng);

std::string to_json(const EmpiricalStats& stats);

} // namespace assemblies
