#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace assemblies {

/* Deterministic random streams. std::mt19937_64 output is fully specified by
 * the standard, and all distribution shaping is done here rather than with
 * std:: distributions (whose algorithms are implementation-defined), so a
 * given (seed, label) pair produces the same bytes on any platform.
 *
 * One global experiment seed fans out into labeled streams ("graph",
 * "stimuli", "trial-3", ...): distinct labels give statistically independent
 * streams, and consumers never share a stream.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Derive an independent stream from (seed, label).
    static Rng stream(std::uint64_t seed, std::string_view label);
    Rng substream(std::string_view label);

    std::uint64_t next() { return engine_(); }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Unbiased integer in [0, bound). bound must be > 0.
    std::uint64_t uniform_int(std::uint64_t bound);

    // Standard normal via Box-Muller (portable, unlike std::normal_distribution).
    double normal();

    // m distinct indices from [0, n), sorted ascending (Floyd's algorithm).
    std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t m);

    // Gap to the next success of a Bernoulli(p) process; 0 <= gap.
    std::uint64_t geometric_gap(double p);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Stable 64-bit stream id for (seed, label); exposed so emitted files can
// record the exact per-trial stream.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view label);

} // namespace assemblies
