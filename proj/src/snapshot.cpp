#include "assemblies/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "assemblies/dynamics.hpp"

namespace assemblies {

namespace {

constexpr char kMagic[4] = {'A', 'S', 'M', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void put_vec(std::ostream& out, const std::vector<T>& v) {
    put(out, static_cast<std::uint64_t>(v.size()));
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
T get(std::istream& in) {
    T v;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw std::runtime_error("snapshot: truncated file");
    return v;
}

template <typename T>
std::vector<T> get_vec(std::istream& in) {
    auto size = get<std::uint64_t>(in);
    std::vector<T> v(size);
    if (size && !in.read(reinterpret_cast<char*>(v.data()),
                         static_cast<std::streamsize>(size * sizeof(T))))
        throw std::runtime_error("snapshot: truncated file");
    return v;
}

void put_weights(std::ostream& out, const SparseWeights& w) {
    put(out, w.n_src);
    put(out, w.n_tgt);
    put_vec(out, w.offsets);
    put_vec(out, w.sources);
    put_vec(out, w.weights);
}

SparseWeights get_weights(std::istream& in) {
    SparseWeights w;
    w.n_src = get<std::uint32_t>(in);
    w.n_tgt = get<std::uint32_t>(in);
    w.offsets = get_vec<std::uint64_t>(in);
    w.sources = get_vec<std::uint32_t>(in);
    w.weights = get_vec<double>(in);
    if (w.offsets.size() != w.n_tgt + 1 || w.sources.size() != w.weights.size())
        throw std::runtime_error("snapshot: inconsistent weight block");
    return w;
}

} // namespace

void save_model(const TrainedModel& trained, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("snapshot: cannot write " + path);
    out.write(kMagic, 4);
    put(out, kVersion);
    const Model& m = trained.model;
    put(out, m.config.n);
    put(out, m.config.k);
    put(out, m.config.p);
    put(out, m.config.beta);
    put(out, m.config.seed);
    put(out, m.sensory_n);
    put(out, static_cast<std::uint8_t>(trained.weights_normalized));
    put(out, static_cast<std::uint8_t>(m.area.inhibited));
    put_weights(out, m.fiber.weights);
    put_weights(out, m.area.recurrent);
    put_vec(out, m.area.firing);
    put_vec(out, m.area.ever_fired);
    put(out, static_cast<std::uint32_t>(trained.assemblies.size()));
    for (const AssemblyRecord& a : trained.assemblies) {
        put(out, static_cast<std::int32_t>(a.label));
        put_vec(out, a.core_estimate);
        put_vec(out, a.support);
        put(out, a.gamma_measured);
    }
    if (!out) throw std::runtime_error("snapshot: write failed for " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("snapshot: bad magic in " + path);
    if (get<std::uint32_t>(in) != kVersion)
        throw std::runtime_error("snapshot: unsupported version in " + path);

    TrainedModel trained;
    Model& m = trained.model;
    m.config.n = get<std::uint32_t>(in);
    m.config.k = get<std::uint32_t>(in);
    m.config.p = get<double>(in);
    m.config.beta = get<double>(in);
    m.config.seed = get<std::uint64_t>(in);
    m.sensory_n = get<std::uint32_t>(in);
    trained.weights_normalized = get<std::uint8_t>(in) != 0;
    bool inhibited = get<std::uint8_t>(in) != 0;
    m.fiber.weights = get_weights(in);
    m.area.config = m.config;
    m.area.recurrent = get_weights(in);
    auto firing = get_vec<std::uint32_t>(in);
    m.area.ever_fired = get_vec<std::uint8_t>(in);
    m.area.firing_mask.assign(m.config.n, 0);
    set_firing(m.area, firing);
    m.area.inhibited = inhibited;

    auto count = get<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < count; ++i) {
        AssemblyRecord a;
        a.label = get<std::int32_t>(in);
        a.core_estimate = get_vec<std::uint32_t>(in);
        a.support = get_vec<std::uint32_t>(in);
        a.gamma_measured = get<double>(in);
        trained.assemblies.push_back(std::move(a));
    }
    return trained;
}

} // namespace assemblies
