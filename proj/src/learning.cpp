#include "assemblies/learning.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace assemblies {

Model make_model(const ModelConfig& config, std::uint32_t sensory_n) {
    validate(config);
    Model model;
    model.config = config;
    model.sensory_n = sensory_n == 0 ? config.n : sensory_n;
    Rng graph_rng = Rng::stream(config.seed, "graph");
    model.area = make_area(config, graph_rng);
    Rng fiber_rng = Rng::stream(config.seed, "fiber");
    model.fiber = sample_fiber(model.sensory_n, config.n, config.p, fiber_rng);
    return model;
}

TrainedModel train_phases(Model&& model, std::span<const Sampler> samplers,
                          std::span<const int> labels, const TrainConfig& cfg) {
    if (samplers.size() != labels.size())
        throw std::invalid_argument("train_phases: one label per phase");
    if (cfg.samples_per_class == 0)
        throw std::invalid_argument("train_phases: need T >= 1");

    TrainedModel trained;
    trained.model = std::move(model);
    Model& m = trained.model;

    std::vector<float> activation(m.sensory_n);
    std::vector<std::uint8_t> support_mask(m.config.n);
    for (std::size_t c = 0; c < samplers.size(); ++c) {
        reset_phase(m.area);
        disinhibit(m.area);
        std::fill(support_mask.begin(), support_mask.end(), 0);

        PhaseTrace trace;
        AssemblyRecord record;
        record.label = labels[c];
        for (std::uint32_t t = 0; t < cfg.samples_per_class; ++t) {
            samplers[c](activation);
            StepInput input{activation, &m.fiber, &m.area};
            StepReport report = area_step(input, cfg.beta, cfg.plastic);
            for (std::uint32_t i : report.cap) support_mask[i] = 1;
            trace.first_timers.push_back(report.first_timers);
            trace.caps.push_back(std::move(report.cap));
        }
        record.core_estimate = trace.caps.back();
        for (std::uint32_t i = 0; i < m.config.n; ++i)
            if (support_mask[i]) record.support.push_back(i);

        inhibit(m.area);  // the brain area returns to rest
        if (cfg.homeostasis_between_classes) {
            renormalize_incoming(m.fiber.weights);
            renormalize_incoming(m.area.recurrent);
            trained.weights_normalized = true;
        }
        trained.assemblies.push_back(std::move(record));
        trained.traces.push_back(std::move(trace));
    }
    disinhibit(m.area);
    return trained;
}

TrainedModel train_classes(Model&& model, std::span<const StimulusClass> classes,
                           const TrainConfig& cfg, Rng& rng) {
    std::vector<Sampler> samplers;
    std::vector<int> labels;
    samplers.reserve(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const StimulusClass* cls = &classes[c];
        if (cls->n != model.sensory_n)
            throw std::invalid_argument("train_classes: class size != sensory area size");
        samplers.push_back([cls, &rng](std::span<float> out) {
            sample_stimulus_into(*cls, rng, out);
        });
        labels.push_back(static_cast<int>(c));
    }
    return train_phases(std::move(model), samplers, labels, cfg);
}

TrainedModel train_classes(Model&& model, const HalfspaceClass& cls,
                           const TrainConfig& cfg, Rng& rng) {
    if (cls.n != model.sensory_n)
        throw std::invalid_argument("train_classes: class size != sensory area size");
    Sampler sampler = [&cls, &rng](std::span<float> out) {
        sample_halfspace_into(cls, true, rng, out);  // positives only
    };
    int label = 1;
    return train_phases(std::move(model), {&sampler, 1}, {&label, 1}, cfg);
}

std::string to_jsonl(const PhaseTrace& trace) {
    std::string out;
    for (std::size_t t = 0; t < trace.caps.size(); ++t) {
        nlohmann::json line;
        line["step"] = t + 1;
        line["first_timers"] = trace.first_timers[t];
        line["cap_overlap_prev"] =
            t == 0 ? 0 : overlap_count(trace.caps[t], trace.caps[t - 1]);
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::string assemblies_to_json(const TrainedModel& trained) {
    nlohmann::json arr = nlohmann::json::array();
    for (const AssemblyRecord& a : trained.assemblies) {
        arr.push_back({{"label", a.label},
                       {"core", a.core_estimate},
                       {"support", a.support},
                       {"gamma_measured", a.gamma_measured}});
    }
    return arr.dump(2);
}

std::vector<std::uint32_t> response_cap(const TrainedModel& trained,
                                        std::span<const float> activation) {
    const Model& m = trained.model;
    if (activation.size() != m.sensory_n)
        throw std::invalid_argument("response_cap: activation length != sensory size");
    const SparseWeights& w = m.fiber.weights;
    std::vector<double> si(m.config.n, 0.0);
    for (std::uint32_t tgt = 0; tgt < w.n_tgt; ++tgt) {
        double acc = 0.0;
        const std::uint64_t lo = w.offsets[tgt], hi = w.offsets[tgt + 1];
        for (std::uint64_t e = lo; e < hi; ++e)
            acc += w.weights[e] * static_cast<double>(activation[w.sources[e]]);
        si[tgt] = acc;
    }
    return k_cap(si, m.config.k);
}

std::uint32_t overlap_count(std::span<const std::uint32_t> sorted_a,
                            std::span<const std::uint32_t> sorted_b) {
    std::uint32_t count = 0;
    std::size_t i = 0, j = 0;
    while (i < sorted_a.size() && j < sorted_b.size()) {
        if (sorted_a[i] < sorted_b[j]) ++i;
        else if (sorted_b[j] < sorted_a[i]) ++j;
        else { ++count; ++i; ++j; }
    }
    return count;
}

int classify_overlap(const TrainedModel& trained, std::span<const float> activation,
                     bool* ambiguous) {
    if (trained.assemblies.empty())
        throw std::logic_error("classify_overlap: no assemblies trained");
    auto cap = response_cap(trained, activation);
    int best_label = trained.assemblies.front().label;
    std::uint32_t best = overlap_count(cap, trained.assemblies.front().core_estimate);
    bool all_equal = true;
    for (std::size_t i = 1; i < trained.assemblies.size(); ++i) {
        const AssemblyRecord& a = trained.assemblies[i];
        std::uint32_t ov = overlap_count(cap, a.core_estimate);
        if (ov != best) all_equal = false;
        if (ov > best || (ov == best && a.label < best_label)) {
            best = ov;
            best_label = a.label;
        }
    }
    if (ambiguous) *ambiguous = all_equal && trained.assemblies.size() > 1;
    return best_label;
}

bool classify_halfspace(const TrainedModel& trained, std::span<const float> activation,
                        double epsilon_threshold) {
    if (trained.assemblies.empty())
        throw std::logic_error("classify_halfspace: no assembly trained");
    auto cap = response_cap(trained, activation);
    const AssemblyRecord& a = trained.assemblies.front();
    double ov = overlap_count(cap, a.core_estimate);
    return ov >= epsilon_threshold * static_cast<double>(trained.model.config.k);
}

ProjectReport project_to_readout(Area& readout, Fiber& readout_fiber,
                                 const AssemblyRecord& assembly,
                                 std::uint32_t source_n, std::uint32_t rounds,
                                 double beta) {
    if (rounds == 0) throw std::invalid_argument("project_to_readout: need rounds >= 1");
    if (readout_fiber.weights.n_src != source_n)
        throw std::invalid_argument("project_to_readout: fiber source size mismatch");
    std::vector<float> activation(source_n, 0.0f);
    for (std::uint32_t i : assembly.core_estimate) activation[i] = 1.0f;

    reset_phase(readout);
    disinhibit(readout);
    ProjectReport out;
    out.record.label = assembly.label;
    std::vector<std::uint8_t> support_mask(readout.config.n, 0);
    for (std::uint32_t t = 0; t < rounds; ++t) {
        StepInput input{activation, &readout_fiber, &readout};
        StepReport report = area_step(input, beta, true);
        for (std::uint32_t i : report.cap) support_mask[i] = 1;
        if (report.first_timers == 0 && out.convergence_step == 0)
            out.convergence_step = t + 1;
        out.trace.first_timers.push_back(report.first_timers);
        out.trace.caps.push_back(std::move(report.cap));
    }
    out.converged = out.trace.first_timers.back() == 0;
    out.record.core_estimate = out.trace.caps.back();
    for (std::uint32_t i = 0; i < readout.config.n; ++i)
        if (support_mask[i]) out.record.support.push_back(i);
    return out;
}

} // namespace assemblies
