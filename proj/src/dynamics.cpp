#include "assemblies/dynamics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace assemblies {

namespace {

void accumulate_fiber(const SparseWeights& w, std::span<const float> act,
                      std::vector<double>& si) {
    for (std::uint32_t tgt = 0; tgt < w.n_tgt; ++tgt) {
        double acc = 0.0;
        const std::uint64_t lo = w.offsets[tgt], hi = w.offsets[tgt + 1];
        for (std::uint64_t e = lo; e < hi; ++e)
            acc += w.weights[e] * static_cast<double>(act[w.sources[e]]);
        si[tgt] += acc;
    }
}

void accumulate_recurrent(const SparseWeights& w, std::span<const std::uint8_t> mask,
                          std::vector<double>& si) {
    for (std::uint32_t tgt = 0; tgt < w.n_tgt; ++tgt) {
        double acc = 0.0;
        const std::uint64_t lo = w.offsets[tgt], hi = w.offsets[tgt + 1];
        for (std::uint64_t e = lo; e < hi; ++e)
            if (mask[w.sources[e]]) acc += w.weights[e];
        si[tgt] += acc;
    }
}

} // namespace

std::vector<double> synaptic_input(const Area& area, const Fiber& fiber,
                                   std::span<const float> sensory_firing) {
    if (area.inhibited)
        throw std::logic_error("synaptic_input: area is inhibited");
    if (sensory_firing.size() != fiber.weights.n_src)
        throw std::invalid_argument("synaptic_input: activation length != fiber source count");
    if (fiber.weights.n_tgt != area.config.n)
        throw std::invalid_argument("synaptic_input: fiber target count != area size");
    std::vector<double> si(area.config.n, 0.0);
    accumulate_fiber(fiber.weights, sensory_firing, si);
    if (!area.firing.empty())
        accumulate_recurrent(area.recurrent, area.firing_mask, si);
    return si;
}

void k_cap(std::span<const double> si, std::uint32_t k,
           std::vector<std::uint32_t>& scratch, std::vector<std::uint32_t>& out) {
    const auto n = static_cast<std::uint32_t>(si.size());
    if (k > n) throw std::invalid_argument("k_cap: k > n");
    scratch.resize(n);
    std::iota(scratch.begin(), scratch.end(), 0u);
    // Strict total order (value desc, index asc) makes the selection unique.
    auto before = [&si](std::uint32_t a, std::uint32_t b) {
        if (si[a] != si[b]) return si[a] > si[b];
        return a < b;
    };
    if (k < n)
        std::nth_element(scratch.begin(), scratch.begin() + k, scratch.end(), before);
    out.assign(scratch.begin(), scratch.begin() + k);
    std::sort(out.begin(), out.end());
}

std::vector<std::uint32_t> k_cap(std::span<const double> si, std::uint32_t k) {
    std::vector<std::uint32_t> scratch, out;
    k_cap(si, k, scratch, out);
    return out;
}

void hebbian_update(SparseWeights& weights, std::span<const float> pre_activation,
                    std::span<const std::uint32_t> post_cap, double beta) {
    if (beta == 0.0) return;
    if (pre_activation.size() != weights.n_src)
        throw std::invalid_argument("hebbian_update: activation length != source count");
    for (std::uint32_t tgt : post_cap) {
        const std::uint64_t lo = weights.offsets[tgt], hi = weights.offsets[tgt + 1];
        for (std::uint64_t e = lo; e < hi; ++e) {
            float a = pre_activation[weights.sources[e]];
            if (a > 0.0f) weights.weights[e] *= 1.0 + beta * static_cast<double>(a);
        }
    }
}

void hebbian_update(SparseWeights& weights, std::span<const std::uint8_t> pre_mask,
                    std::span<const std::uint32_t> post_cap, double beta) {
    if (beta == 0.0) return;
    if (pre_mask.size() != weights.n_src)
        throw std::invalid_argument("hebbian_update: mask length != source count");
    const double factor = 1.0 + beta;
    for (std::uint32_t tgt : post_cap) {
        const std::uint64_t lo = weights.offsets[tgt], hi = weights.offsets[tgt + 1];
        for (std::uint64_t e = lo; e < hi; ++e)
            if (pre_mask[weights.sources[e]]) weights.weights[e] *= factor;
    }
}

void set_firing(Area& area, std::span<const std::uint32_t> cap) {
    std::fill(area.firing_mask.begin(), area.firing_mask.end(), 0);
    area.firing.assign(cap.begin(), cap.end());
    for (std::uint32_t i : area.firing) area.firing_mask[i] = 1;
}

StepReport area_step(const StepInput& input, double beta, bool plastic, bool keep_si) {
    Area& area = *input.area;
    Fiber& fiber = *input.fiber;
    std::vector<double> si = synaptic_input(area, fiber, input.sensory_firing);

    StepReport report;
    report.cap = k_cap(si, area.config.k);

    if (plastic) {
        // Cap was selected from pre-update weights; only now do synapses move.
        hebbian_update(fiber.weights, input.sensory_firing, report.cap, beta);
        hebbian_update(area.recurrent, area.firing_mask, report.cap, beta);
    }

    for (std::uint32_t i : report.cap)
        if (!area.ever_fired[i]) ++report.first_timers;
    for (std::uint32_t i : report.cap) area.ever_fired[i] = 1;
    set_firing(area, report.cap);

    if (keep_si) report.synaptic_inputs = std::move(si);
    return report;
}

void inhibit(Area& area) {
    area.inhibited = true;
    area.firing.clear();
    std::fill(area.firing_mask.begin(), area.firing_mask.end(), 0);
}

void disinhibit(Area& area) {
    area.inhibited = false;
}

void reset_phase(Area& area) {
    std::fill(area.ever_fired.begin(), area.ever_fired.end(), 0);
    area.firing.clear();
    std::fill(area.firing_mask.begin(), area.firing_mask.end(), 0);
}

} // namespace assemblies
