#include "assemblies/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "assemblies/util.hpp"
#include "json.hpp"

namespace assemblies {

namespace {

double big_l(std::uint32_t n, std::uint32_t k) {
    return 2.0 * std::log(static_cast<double>(n) / k);
}

} // namespace

double beta0(std::uint32_t n, std::uint32_t k, double p, double r) {
    if (n <= k) throw std::invalid_argument("beta0: need n > k");
    if (!(k * p > 0.0)) throw std::invalid_argument("beta0: need kp > 0");
    if (!(r > 0.0) || r > 1.0) throw std::invalid_argument("beta0: need r in (0,1]");
    const double L = big_l(n, k);
    const double kp = static_cast<double>(k) * p;
    return (1.0 / (r * r)) *
           ((std::sqrt(2.0) - r * r) * std::sqrt(L) + std::sqrt(6.0)) /
           (std::sqrt(kp) + std::sqrt(L));
}

double beta0_full(std::uint32_t n, std::uint32_t k, double p, double r, double q) {
    if (n <= k) throw std::invalid_argument("beta0_full: need n > k");
    if (!(r > 0.0) || r > 1.0 || q < 0.0)
        throw std::invalid_argument("beta0_full: need r in (0,1], q >= 0");
    const double L = big_l(n, k);
    const double kp = static_cast<double>(k) * p;
    const double s = r + q;
    return (std::sqrt(s) / (r * r)) *
           ((std::sqrt(1.0 + s) - r * r / std::sqrt(s)) * std::sqrt(L) +
            std::sqrt(2.0 * (1.0 + s))) /
           (std::sqrt(kp) + std::sqrt(L));
}

double support_bound(double beta, double beta0_value, std::uint32_t k) {
    if (!(beta > 0.0) || !(beta0_value > 0.0))
        throw std::invalid_argument("support_bound: need beta > 0 and beta0 > 0");
    const double ratio = beta / beta0_value;
    return static_cast<double>(k) / (1.0 - std::exp(-ratio * ratio));
}

double recall_defect_bound(std::uint32_t k, double p, double r) {
    return std::exp(-static_cast<double>(k) * p * r);
}

double gamma_recall_min(std::uint32_t n, std::uint32_t k, double p, double r) {
    if (n <= k) throw std::invalid_argument("gamma_recall_min: need n > k");
    const double kpr = static_cast<double>(k) * p * r;
    if (!(kpr > 0.0)) throw std::invalid_argument("gamma_recall_min: need kpr > 0");
    return 1.0 + (1.0 / std::sqrt(r)) *
               (std::sqrt(2.0) +
                std::sqrt((2.0 / kpr) * std::log(static_cast<double>(n) / k) + 2.0));
}

double gamma_multi_max(std::uint32_t n, std::uint32_t k, double p, double r, double alpha) {
    if (n <= k) throw std::invalid_argument("gamma_multi_max: need n > k");
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("gamma_multi_max: need alpha in (0,1]");
    if (!(r > 0.0) || r > 1.0) throw std::invalid_argument("gamma_multi_max: need r in (0,1]");
    const double L = big_l(n, k);
    const double kp = static_cast<double>(k) * p;
    const double inner = (1.0 + r) / (r * alpha);
    return 1.0 + (std::sqrt(L) - std::sqrt(2.0 * std::log(inner))) /
                     (alpha * r * std::sqrt(kp));
}

double classify_defect_bound(double gamma, double alpha, std::uint32_t k, double p, double r) {
    const double kpr = static_cast<double>(k) * p * r;
    const double margin = gamma * alpha - 1.0;
    return 2.0 * std::exp(-0.5 * margin * margin * kpr);
}

double halfspace_margin_requirement(std::uint32_t n, std::uint32_t k, double p) {
    if (n < k) throw std::invalid_argument("halfspace_margin_requirement: need n >= k");
    if (!(p > 0.0)) throw std::invalid_argument("halfspace_margin_requirement: need p > 0");
    const double L = big_l(n, k);
    return std::sqrt(2.0 * static_cast<double>(k) / p) * (std::sqrt(L + 2.0) + 1.0);
}

long rounds_for_weight(double gamma, double p_fire_pre, double q_fire_post, double beta) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("rounds_for_weight: need gamma >= 1");
    if (!(p_fire_pre > 0.0) || !(q_fire_post > 0.0))
        throw std::invalid_argument("rounds_for_weight: need positive firing rates");
    if (!(beta > 0.0)) throw std::invalid_argument("rounds_for_weight: need beta > 0");
    if (gamma == 1.0) return 0;
    const double t = std::log(gamma) / std::log1p(beta) / (p_fire_pre * q_fire_post);
    return static_cast<long>(std::ceil(t - 1e-9));
}

BoundReport evaluate_bounds(std::uint32_t n, std::uint32_t k, double p, double r,
                            double q, double alpha, double gamma, double delta,
                            double beta) {
    BoundReport rep;
    rep.n = n;
    rep.k = k;
    rep.p = p;
    rep.r = r;
    rep.q = q;
    rep.alpha = alpha;
    rep.gamma = gamma;
    rep.delta = delta;
    rep.beta = beta;
    rep.beta0 = beta0(n, k, p, r);
    rep.support_bound = support_bound(beta, rep.beta0, k);
    rep.recall_defect_bound = assemblies::recall_defect_bound(k, p, r);
    rep.recall_vacuous = rep.recall_defect_bound >= 1.0;
    rep.gamma_recall_min = assemblies::gamma_recall_min(n, k, p, r);
    rep.gamma_multi_max = assemblies::gamma_multi_max(n, k, p, r, alpha);
    rep.gamma_multi_vacuous = rep.gamma_multi_max < 1.0;
    rep.classify_defect_bound = assemblies::classify_defect_bound(gamma, alpha, k, p, r);
    rep.classify_vacuous = rep.classify_defect_bound >= 1.0;
    rep.halfspace_margin_req = halfspace_margin_requirement(n, k, p);
    return rep;
}

std::string to_json(const BoundReport& rep) {
    nlohmann::json j;
    j["inputs"] = {{"n", rep.n},      {"k", rep.k},        {"p", rep.p},
                   {"r", rep.r},      {"q", rep.q},        {"alpha", rep.alpha},
                   {"gamma", rep.gamma}, {"delta", rep.delta}, {"beta", rep.beta}};
    j["beta0"] = rep.beta0;
    j["support_bound"] = rep.support_bound;
    j["recall_defect_bound"] = rep.recall_defect_bound;
    j["gamma_recall_min"] = rep.gamma_recall_min;
    j["gamma_multi_max"] = rep.gamma_multi_max;
    j["classify_defect_bound"] = rep.classify_defect_bound;
    j["halfspace_margin_req"] = rep.halfspace_margin_req;
    j["flags"] = {{"gamma_multi_vacuous", rep.gamma_multi_vacuous},
                  {"classify_vacuous", rep.classify_vacuous},
                  {"recall_vacuous", rep.recall_vacuous}};
    return j.dump(2);
}

double measure_gamma(const TrainedModel& trained, const StimulusClass& cls,
                     const AssemblyRecord& assembly) {
    const SparseWeights& w = trained.model.fiber.weights;
    std::vector<std::uint8_t> in_core(w.n_src, 0);
    for (std::uint32_t j : cls.core) in_core[j] = 1;

    double total = 0.0;
    std::uint64_t edges = 0;
    for (std::uint32_t tgt : assembly.core_estimate) {
        const std::uint64_t lo = w.offsets[tgt], hi = w.offsets[tgt + 1];
        const double in_degree = static_cast<double>(hi - lo);
        // Baseline weight an untouched edge would carry: 1, or 1/in-degree
        // after renormalization spread unit mass over the row.
        const double baseline =
            trained.weights_normalized && in_degree > 0 ? 1.0 / in_degree : 1.0;
        for (std::uint64_t e = lo; e < hi; ++e) {
            if (!in_core[w.sources[e]]) continue;
            total += w.weights[e] / baseline;
            ++edges;
        }
    }
    return edges == 0 ? 0.0 : total / static_cast<double>(edges);
}

EmpiricalStats empirical_stats(const TrainedModel& trained,
                               std::span<const StimulusClass> classes,
                               std::uint32_t num_test, Rng& rng) {
    EmpiricalStats stats;
    const std::uint32_t k = trained.model.config.k;
    const std::uint32_t n = trained.model.config.n;
    const std::size_t c_count = trained.assemblies.size();

    // Training-time traces.
    std::vector<std::uint32_t> prev_cores;  // union of earlier cores, sorted
    for (std::size_t c = 0; c < trained.traces.size(); ++c) {
        const PhaseTrace& trace = trained.traces[c];
        std::vector<double> mu, nu;
        for (std::size_t t = 0; t < trace.caps.size(); ++t) {
            mu.push_back(static_cast<double>(trace.first_timers[t]) / k);
            nu.push_back(static_cast<double>(overlap_count(trace.caps[t], prev_cores)) / k);
        }
        stats.mu_trace.push_back(std::move(mu));
        stats.nu_trace.push_back(std::move(nu));
        std::vector<std::uint32_t> merged;
        std::set_union(prev_cores.begin(), prev_cores.end(),
                       trained.assemblies[c].core_estimate.begin(),
                       trained.assemblies[c].core_estimate.end(),
                       std::back_inserter(merged));
        prev_cores = std::move(merged);
    }

    stats.assembly_overlap.assign(c_count, std::vector<double>(c_count, 0.0));
    for (std::size_t i = 0; i < c_count; ++i)
        for (std::size_t j = 0; j < c_count; ++j)
            stats.assembly_overlap[i][j] = overlap_count(
                trained.assemblies[i].core_estimate, trained.assemblies[j].core_estimate);

    if (!classes.empty()) {
        double gamma_sum = 0.0;
        for (std::size_t c = 0; c < std::min(classes.size(), c_count); ++c)
            gamma_sum += measure_gamma(trained, classes[c], trained.assemblies[c]);
        stats.gamma_measured = gamma_sum / static_cast<double>(std::min(classes.size(), c_count));
    }

    if (num_test > 0 && !classes.empty()) {
        stats.input_overlap.assign(classes.size(), std::vector<double>(classes.size(), 0.0));
        stats.firing_probability.assign(classes.size(), std::vector<double>(n, 0.0));
        std::vector<float> activation(trained.model.sensory_n);
        for (std::size_t i = 0; i < classes.size(); ++i) {
            for (std::uint32_t t = 0; t < num_test; ++t) {
                sample_stimulus_into(classes[i], rng, activation);
                for (std::size_t j = 0; j < classes.size(); ++j) {
                    std::uint32_t ov = 0;
                    for (std::uint32_t idx : classes[j].core)
                        if (activation[idx] > 0.0f) ++ov;
                    stats.input_overlap[i][j] += ov;
                }
                auto cap = response_cap(trained, activation);
                for (std::uint32_t idx : cap) stats.firing_probability[i][idx] += 1.0;
            }
            for (std::size_t j = 0; j < classes.size(); ++j)
                stats.input_overlap[i][j] /= num_test;
            for (double& f : stats.firing_probability[i]) f /= num_test;
        }
    }
    return stats;
}

std::string to_json(const EmpiricalStats& stats) {
    nlohmann::json j;
    j["mu_trace"] = stats.mu_trace;
    j["nu_trace"] = stats.nu_trace;
    j["gamma_measured"] = stats.gamma_measured;
    j["input_overlap"] = stats.input_overlap;
    j["assembly_overlap"] = stats.assembly_overlap;
    j["firing_probability"] = stats.firing_probability;
    return j.dump(2);
}

} // namespace assemblies
