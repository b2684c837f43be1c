#include "assemblies/stimuli.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace assemblies {

StimulusClass make_stimulus_class(std::uint32_t k, std::uint32_t n, double r, double q,
                                  Rng& rng, const StimulusClass* overlap_with,
                                  double alpha) {
    if (k == 0 || k > n) throw std::invalid_argument("stimulus class: need 0 < k <= n");
    if (!(r > q)) throw std::invalid_argument("stimulus class: need r > q");
    if (!(r > 0.0) || r > 1.0 || q < 0.0)
        throw std::invalid_argument("stimulus class: need r in (0,1], q in [0,1)");
    StimulusClass cls;
    cls.r = r;
    cls.q = q;
    cls.n = n;
    if (overlap_with == nullptr) {
        cls.core = rng.sample_without_replacement(n, k);
        return cls;
    }

    const auto& base = overlap_with->core;
    auto shared = static_cast<std::uint32_t>(std::llround(alpha * k));
    if (shared > k || shared > base.size())
        throw std::invalid_argument("stimulus class: infeasible overlap");
    if (k - shared > n - base.size())
        throw std::invalid_argument("stimulus class: not enough neurons outside the base core");

    // Shared part sampled from the base core, the rest from its complement.
    std::vector<std::uint32_t> core;
    core.reserve(k);
    auto pick = rng.sample_without_replacement(static_cast<std::uint32_t>(base.size()), shared);
    for (std::uint32_t idx : pick) core.push_back(base[idx]);

    std::vector<std::uint32_t> complement;
    complement.reserve(n - base.size());
    std::size_t b = 0;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (b < base.size() && base[b] == i) {
            ++b;
            continue;
        }
        complement.push_back(i);
    }
    auto rest = rng.sample_without_replacement(static_cast<std::uint32_t>(complement.size()),
                                               k - shared);
    for (std::uint32_t idx : rest) core.push_back(complement[idx]);
    std::sort(core.begin(), core.end());
    cls.core = std::move(core);
    return cls;
}

void sample_stimulus_into(const StimulusClass& cls, Rng& rng, std::span<float> out) {
    if (out.size() != cls.n) throw std::invalid_argument("sample_stimulus: bad output length");
    const double off_prob = cls.q * static_cast<double>(cls.core.size()) / cls.n;
    std::fill(out.begin(), out.end(), 0.0f);
    if (off_prob > 0.0) {
        for (std::uint32_t i = 0; i < cls.n; ++i)
            if (rng.bernoulli(off_prob)) out[i] = 1.0f;
        for (std::uint32_t i : cls.core) out[i] = 0.0f;
    }
    for (std::uint32_t i : cls.core)
        if (rng.bernoulli(cls.r)) out[i] = 1.0f;
}

LabeledExample sample_stimulus(const StimulusClass& cls, Rng& rng, int label) {
    LabeledExample ex;
    ex.label = label;
    ex.activation.resize(cls.n);
    sample_stimulus_into(cls, rng, ex.activation);
    return ex;
}

HalfspaceClass make_halfspace_class(std::vector<double> v, double delta,
                                    std::uint32_t n, std::uint32_t k,
                                    bool allow_signed) {
    if (v.size() != n) throw std::invalid_argument("halfspace: |v| != n");
    if (!(delta > 0.0)) throw std::invalid_argument("halfspace: need delta > 0");
    double norm2 = 0.0, vmax = 0.0;
    for (double x : v) {
        if (x < 0.0 && !allow_signed)
            throw std::invalid_argument("halfspace: v must be nonnegative");
        norm2 += x * x;
        vmax = std::max(vmax, x);
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9)
        throw std::invalid_argument("halfspace: v must have unit Euclidean norm");
    double base = static_cast<double>(k) / n;
    if (base + delta * vmax > 1.0 + 1e-12)
        throw std::invalid_argument("halfspace: mean k/n + delta*max(v) exceeds 1");
    HalfspaceClass cls;
    cls.v = std::move(v);
    cls.delta = delta;
    cls.n = n;
    cls.k = k;
    return cls;
}

HalfspaceRegime halfspace_regime(const HalfspaceClass& cls) {
    HalfspaceRegime regime;
    for (double x : cls.v) regime.l1_norm += std::abs(x);
    regime.l1_below_k = regime.l1_norm < static_cast<double>(cls.k);
    regime.l1_above_sqrt = regime.l1_norm > std::sqrt(static_cast<double>(cls.n)) / 2.0;
    return regime;
}

HalfspaceClass make_uniform_halfspace(std::uint32_t support_size, double delta,
                                      std::uint32_t n, std::uint32_t k, Rng& rng) {
    if (support_size == 0 || support_size > n)
        throw std::invalid_argument("halfspace: bad support size");
    std::vector<double> v(n, 0.0);
    double value = 1.0 / std::sqrt(static_cast<double>(support_size));
    for (std::uint32_t i : rng.sample_without_replacement(n, support_size)) v[i] = value;
    return make_halfspace_class(std::move(v), delta, n, k);
}

void sample_halfspace_into(const HalfspaceClass& cls, bool positive, Rng& rng,
                           std::span<float> out) {
    if (out.size() != cls.n) throw std::invalid_argument("sample_halfspace: bad output length");
    const double base = static_cast<double>(cls.k) / cls.n;
    if (positive) {
        for (std::uint32_t i = 0; i < cls.n; ++i)
            out[i] = rng.bernoulli(base + cls.delta * cls.v[i]) ? 1.0f : 0.0f;
    } else {
        for (std::uint32_t i = 0; i < cls.n; ++i)
            out[i] = rng.bernoulli(base) ? 1.0f : 0.0f;
    }
}

LabeledExample sample_halfspace(const HalfspaceClass& cls, bool positive, Rng& rng) {
    LabeledExample ex;
    ex.label = positive ? 1 : -1;
    ex.activation.resize(cls.n);
    sample_halfspace_into(cls, positive, rng, ex.activation);
    return ex;
}

} // namespace assemblies
