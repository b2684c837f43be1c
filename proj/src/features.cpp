#include "assemblies/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "assemblies/dynamics.hpp"
#include "assemblies/util.hpp"

namespace assemblies {

ExtractorKind parse_extractor_kind(const std::string& name) {
    if (name == "linear") return ExtractorKind::linear;
    if (name == "nonlinear") return ExtractorKind::nonlinear;
    if (name == "large-area" || name == "large_area") return ExtractorKind::large_area;
    if (name == "random-areas" || name == "random_areas") return ExtractorKind::random_areas;
    if (name == "split-areas" || name == "split_areas") return ExtractorKind::split_areas;
    throw std::invalid_argument("unknown extractor kind: " + name);
}

std::string extractor_kind_name(ExtractorKind kind) {
    switch (kind) {
        case ExtractorKind::linear: return "linear";
        case ExtractorKind::nonlinear: return "nonlinear";
        case ExtractorKind::large_area: return "large-area";
        case ExtractorKind::random_areas: return "random-areas";
        case ExtractorKind::split_areas: return "split-areas";
    }
    return "?";
}

namespace {

constexpr std::uint32_t kClasses = 10;

// First `per_class` image indices of each class, in dataset order.
std::vector<std::vector<std::uint32_t>> class_examples(const Dataset& train,
                                                       std::uint32_t per_class) {
    std::vector<std::vector<std::uint32_t>> out(kClasses);
    for (std::uint32_t i = 0; i < train.count; ++i) {
        auto label = train.labels[i];
        if (out[label].size() < per_class) out[label].push_back(i);
    }
    for (std::uint32_t c = 0; c < kClasses; ++c)
        if (out[c].empty())
            throw std::invalid_argument("extractor: training set has no examples of class " +
                                        std::to_string(c));
    return out;
}

// One plastic step with an optional subtractive bias on previously-fired
// neurons: penalized SI drops by penalty_factor times the step's max SI,
// which excludes those neurons while keeping the k-cap path uniform.
std::vector<std::uint32_t> biased_plastic_step(ExtractorArea& ex,
                                               std::span<const float> image,
                                               double beta,
                                               const std::vector<std::uint8_t>* penalized,
                                               double penalty_factor) {
    std::vector<double> si = synaptic_input(ex.area, ex.fiber, image);
    if (penalized != nullptr) {
        double max_si = 0.0;
        for (double v : si) max_si = std::max(max_si, v);
        const double penalty = penalty_factor * max_si;
        for (std::uint32_t i = 0; i < si.size(); ++i)
            if ((*penalized)[i]) si[i] -= penalty;
    }
    auto cap = k_cap(si, ex.cap);
    hebbian_update(ex.fiber.weights, image, cap, beta);
    hebbian_update(ex.area.recurrent, ex.area.firing_mask, cap, beta);
    for (std::uint32_t i : cap) ex.area.ever_fired[i] = 1;
    set_firing(ex.area, cap);
    return cap;
}

ExtractorArea make_extractor_area(std::uint32_t n, std::uint32_t cap, double p,
                                  std::uint32_t input_dim, Rng& rng) {
    ExtractorArea ex;
    ModelConfig cfg;
    cfg.n = n;
    cfg.k = cap;
    cfg.p = p;
    ex.area = make_area(cfg, rng);
    ex.fiber = sample_fiber(input_dim, n, p, rng);
    ex.cap = cap;
    return ex;
}

// The large-area protocol: each class presents `per_class` images; neurons
// that fired for an earlier class are penalized out of later caps;
// homeostasis after each class.
void train_area_all_classes(ExtractorArea& ex, const Dataset& train,
                            const std::vector<std::vector<std::uint32_t>>& examples,
                            std::span<const std::uint32_t> class_order,
                            double beta, double penalty_factor) {
    std::vector<std::uint8_t> penalized(ex.area.config.n, 0);
    for (std::uint32_t c : class_order) {
        reset_phase(ex.area);
        for (std::uint32_t idx : examples[c])
            biased_plastic_step(ex, train.image(idx), beta, &penalized, penalty_factor);
        for (std::uint32_t i = 0; i < ex.area.config.n; ++i)
            if (ex.area.ever_fired[i]) penalized[i] = 1;
        inhibit(ex.area);
        disinhibit(ex.area);
        renormalize_incoming(ex.fiber.weights);
        renormalize_incoming(ex.area.recurrent);
    }
}

} // namespace

TrainedExtractor fit_extractor(const ExtractorConfig& config, const Dataset& train) {
    TrainedExtractor ext;
    ext.config = config;
    ext.input_dim = static_cast<std::uint32_t>(train.dim());
    const std::uint32_t m = config.m;
    if (m == 0) throw std::invalid_argument("extractor: need m > 0");
    Rng rng = Rng::stream(config.seed, "extractor");

    switch (config.kind) {
        case ExtractorKind::linear: {
            ext.feature_weights.resize(static_cast<std::size_t>(m) * ext.input_dim);
            for (float& w : ext.feature_weights)
                w = static_cast<float>(0.1 * rng.normal());
            return ext;
        }
        case ExtractorKind::nonlinear: {
            ext.feature_weights.resize(static_cast<std::size_t>(m) * ext.input_dim);
            for (float& w : ext.feature_weights)
                w = rng.bernoulli(0.2) ? 1.0f : 0.0f;
            ext.fire_threshold = 70.0 * 0.2;
            return ext;
        }
        case ExtractorKind::large_area: {
            if (m % 10 != 0) throw std::invalid_argument("large-area: m must be divisible by 10");
            auto examples = class_examples(train, config.examples_per_class);
            ExtractorArea ex = make_extractor_area(m, m / 10, config.p, ext.input_dim, rng);
            std::vector<std::uint32_t> order(kClasses);
            for (std::uint32_t c = 0; c < kClasses; ++c) order[c] = c;
            train_area_all_classes(ex, train, examples, order, config.beta,
                                   config.penalty_factor);
            ext.areas.push_back(std::move(ex));
            return ext;
        }
        case ExtractorKind::random_areas: {
            if (m % 100 != 0)
                throw std::invalid_argument("random-areas: m must be divisible by 100");
            auto examples = class_examples(train, config.examples_per_class);
            const std::uint32_t area_count = m / 100;
            ext.areas.reserve(area_count);
            for (std::uint32_t a = 0; a < area_count; ++a) {
                Rng area_rng = rng.substream("area-" + std::to_string(a));
                ExtractorArea ex = make_extractor_area(100, 10, config.p, ext.input_dim, area_rng);
                // class presentation order randomized per area
                std::vector<std::uint32_t> order(kClasses);
                for (std::uint32_t c = 0; c < kClasses; ++c) order[c] = c;
                for (std::uint32_t c = kClasses - 1; c > 0; --c)
                    std::swap(order[c], order[area_rng.uniform_int(c + 1)]);
                train_area_all_classes(ex, train, examples, order, config.beta,
                                       config.penalty_factor);
                ext.areas.push_back(std::move(ex));
            }
            return ext;
        }
        case ExtractorKind::split_areas: {
            if (m % 100 != 0)
                throw std::invalid_argument("split-areas: m must be divisible by 100");
            auto examples = class_examples(train, config.examples_per_class);
            ext.areas.reserve(kClasses);
            for (std::uint32_t c = 0; c < kClasses; ++c) {
                Rng area_rng = rng.substream("area-" + std::to_string(c));
                ExtractorArea ex =
                    make_extractor_area(m / 10, m / 100, config.p, ext.input_dim, area_rng);
                // area c sees only class c
                for (std::uint32_t idx : examples[c])
                    biased_plastic_step(ex, train.image(idx), config.beta, nullptr, 0.0);
                inhibit(ex.area);
                disinhibit(ex.area);
                renormalize_incoming(ex.fiber.weights);
                renormalize_incoming(ex.area.recurrent);
                ext.areas.push_back(std::move(ex));
            }
            return ext;
        }
    }
    throw std::logic_error("unreachable extractor kind");
}

FeatureMatrix extract_features(const TrainedExtractor& ext, const Dataset& images) {
    FeatureMatrix fm;
    fm.count = images.count;
    fm.dim = ext.config.m;
    const auto dim = static_cast<std::size_t>(ext.input_dim);
    if (images.dim() != dim)
        throw std::invalid_argument("extract_features: image size mismatch");

    const ExtractorKind kind = ext.config.kind;
    if (kind == ExtractorKind::linear || kind == ExtractorKind::nonlinear) {
        fm.dense.assign(static_cast<std::size_t>(fm.count) * fm.dim, 0.0f);
        parallel_for(0, images.count, [&](std::size_t i) {
            auto px = images.image(i);
            float* out = fm.dense.data() + i * fm.dim;
            for (std::uint32_t f = 0; f < fm.dim; ++f) {
                const float* w = ext.feature_weights.data() + static_cast<std::size_t>(f) * dim;
                double acc = 0.0;
                for (std::size_t j = 0; j < dim; ++j) acc += double(w[j]) * double(px[j]);
                out[f] = kind == ExtractorKind::linear
                             ? static_cast<float>(acc)
                             : (acc > ext.fire_threshold ? 1.0f : 0.0f);
            }
        }, ext.config.threads);
        return fm;
    }

    // Assembly kinds: concatenated cap indicators. Every area contributes a
    // fixed-size cap, so the sparse layout is known up front.
    std::uint64_t per_image = 0;
    for (const ExtractorArea& ex : ext.areas) per_image += ex.cap;
    fm.sparse = true;
    fm.offsets.resize(fm.count + 1);
    for (std::uint32_t i = 0; i <= fm.count; ++i) fm.offsets[i] = i * per_image;
    fm.indices.assign(static_cast<std::size_t>(fm.count) * per_image, 0);

    // Feature-id offset of each area within the concatenated vector.
    std::vector<std::uint32_t> base(ext.areas.size(), 0);
    for (std::size_t a = 1; a < ext.areas.size(); ++a)
        base[a] = base[a - 1] + ext.areas[a - 1].area.config.n;

    parallel_for(0, images.count, [&](std::size_t i) {
        auto px = images.image(i);
        std::uint32_t* out = fm.indices.data() + i * per_image;
        std::vector<double> si;
        std::vector<std::uint32_t> scratch, cap;
        for (std::size_t a = 0; a < ext.areas.size(); ++a) {
            const SparseWeights& w = ext.areas[a].fiber.weights;
            si.assign(w.n_tgt, 0.0);
            for (std::uint32_t tgt = 0; tgt < w.n_tgt; ++tgt) {
                double acc = 0.0;
                const std::uint64_t lo = w.offsets[tgt], hi = w.offsets[tgt + 1];
                for (std::uint64_t e = lo; e < hi; ++e)
                    acc += w.weights[e] * double(px[w.sources[e]]);
                si[tgt] = acc;
            }
            k_cap(si, ext.areas[a].cap, scratch, cap);
            for (std::uint32_t idx : cap) *out++ = base[a] + idx;
        }
    }, ext.config.threads);
    return fm;
}

} // namespace assemblies
