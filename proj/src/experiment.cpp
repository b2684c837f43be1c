#include "assemblies/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "assemblies/analysis.hpp"
#include "assemblies/features.hpp"
#include "assemblies/learning.hpp"
#include "assemblies/mnist.hpp"
#include "assemblies/readout.hpp"
#include "assemblies/snapshot.hpp"
#include "assemblies/util.hpp"
#include "json.hpp"

namespace assemblies {

ExperimentKind parse_experiment_kind(const std::string& name) {
    if (name == "stimulus") return ExperimentKind::stimulus;
    if (name == "halfspace") return ExperimentKind::halfspace;
    if (name == "four-class" || name == "four_class") return ExperimentKind::four_class;
    if (name == "sweep") return ExperimentKind::sweep;
    if (name == "mnist") return ExperimentKind::mnist;
    throw std::invalid_argument("unknown experiment kind: " + name);
}

std::string experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::stimulus: return "stimulus";
        case ExperimentKind::halfspace: return "halfspace";
        case ExperimentKind::four_class: return "four-class";
        case ExperimentKind::sweep: return "sweep";
        case ExperimentKind::mnist: return "mnist";
    }
    return "?";
}

namespace {

std::string fmt_full(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double wall_seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int convergence_step(const PhaseTrace& trace) {
    for (std::size_t t = 0; t < trace.first_timers.size(); ++t)
        if (trace.first_timers[t] == 0) return static_cast<int>(t) + 1;
    return -1;
}

// Bounds evaluated at both the measured gamma and the recall threshold,
// paired with the empirical statistics, so bound looseness is visible in one
// document.
void emit_stats_doc(const ExperimentConfig& config, const TrainedModel& trained,
                    std::span<const StimulusClass> classes, std::uint64_t trial_seed) {
    Rng stats_rng = Rng::stream(trial_seed, "stats");
    EmpiricalStats stats =
        empirical_stats(trained, classes, config.num_test, stats_rng);
    const ModelConfig& mc = trained.model.config;
    double alpha = config.alpha > 0.0 ? config.alpha
                                      : static_cast<double>(mc.k) / mc.n;
    double measured = stats.gamma_measured > 0.0 ? stats.gamma_measured : 1.0;
    BoundReport at_measured = evaluate_bounds(mc.n, mc.k, mc.p, config.r, config.q,
                                              alpha, measured, config.delta, mc.beta);
    BoundReport at_threshold =
        evaluate_bounds(mc.n, mc.k, mc.p, config.r, config.q, alpha,
                        gamma_recall_min(mc.n, mc.k, mc.p, config.r), config.delta,
                        mc.beta);
    nlohmann::json doc;
    doc["empirical"] = nlohmann::json::parse(to_json(stats));
    doc["bounds_at_measured_gamma"] = nlohmann::json::parse(to_json(at_measured));
    doc["bounds_at_gamma_recall_min"] = nlohmann::json::parse(to_json(at_threshold));
    std::string path = config.out + ".stats.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << "\n";
}

void fill_trial_shape(TrialMetrics& tm, const TrainedModel& trained) {
    std::uint32_t support = 0;
    int conv = 1;
    bool any_unconverged = false;
    for (const AssemblyRecord& a : trained.assemblies)
        support = std::max(support, static_cast<std::uint32_t>(a.support.size()));
    for (const PhaseTrace& trace : trained.traces) {
        int c = convergence_step(trace);
        if (c < 0) any_unconverged = true;
        conv = std::max(conv, c);
    }
    tm.support = support;
    tm.converge_step = any_unconverged ? -1 : conv;
}

} // namespace

TrialMetrics run_stimulus_trial(const ExperimentConfig& config, std::uint64_t trial_seed,
                                std::uint32_t trial_index) {
    auto t0 = std::chrono::steady_clock::now();
    TrialMetrics tm;
    tm.param = "r";
    tm.value = config.r;
    tm.trial = trial_index;
    tm.seed = trial_seed;

    ModelConfig mc = config.model;
    mc.seed = trial_seed;
    Model model = make_model(mc);

    Rng class_rng = Rng::stream(trial_seed, "classes");
    std::vector<StimulusClass> classes;
    for (std::uint32_t c = 0; c < config.classes; ++c) {
        if (c > 0 && config.alpha >= 0.0)
            classes.push_back(make_stimulus_class(mc.k, model.sensory_n, config.r, config.q,
                                                  class_rng, &classes.front(), config.alpha));
        else
            classes.push_back(
                make_stimulus_class(mc.k, model.sensory_n, config.r, config.q, class_rng));
    }

    TrainConfig train_cfg;
    train_cfg.samples_per_class = config.samples_per_class;
    train_cfg.beta = mc.beta;
    train_cfg.homeostasis_between_classes = config.homeostasis;
    Rng train_rng = Rng::stream(trial_seed, "train");
    TrainedModel trained = train_classes(std::move(model), classes, train_cfg, train_rng);

    Rng test_rng = Rng::stream(trial_seed, "test");
    std::vector<float> activation(trained.model.sensory_n);
    std::size_t correct = 0, total = 0;
    for (std::uint32_t c = 0; c < config.classes; ++c) {
        for (std::uint32_t i = 0; i < config.num_test; ++i) {
            sample_stimulus_into(classes[c], test_rng, activation);
            if (classify_overlap(trained, activation) == static_cast<int>(c)) ++correct;
            ++total;
        }
    }
    tm.accuracy = total ? static_cast<double>(correct) / total : 0.0;
    fill_trial_shape(tm, trained);
    for (std::size_t c = 0; c < classes.size(); ++c)
        trained.assemblies[c].gamma_measured =
            measure_gamma(trained, classes[c], trained.assemblies[c]);
    if (trial_index == 0 && !config.save_model_path.empty())
        save_model(trained, config.save_model_path);
    if (trial_index == 0 && config.emit_stats && !config.out.empty())
        emit_stats_doc(config, trained, classes, trial_seed);
    tm.wall_seconds = wall_seconds_since(t0);
    return tm;
}

TrialMetrics run_halfspace_trial(const ExperimentConfig& config, std::uint64_t trial_seed,
                                 std::uint32_t trial_index) {
    auto t0 = std::chrono::steady_clock::now();
    TrialMetrics tm;
    tm.param = "delta";
    tm.value = config.delta;
    tm.trial = trial_index;
    tm.seed = trial_seed;

    ModelConfig mc = config.model;
    mc.seed = trial_seed;
    Model model = make_model(mc);
    const std::uint32_t n = model.sensory_n;

    // Margin slider: unit-L2 v spread over a random support; slider delta in
    // [0,1] maps to the effective margin delta*(1-k/n)*sqrt(|support|), so
    // support coordinates fire with probability k/n + delta*(1-k/n).
    auto support_size = static_cast<std::uint32_t>(
        std::max(1.0, std::round(config.v_support_frac * n)));
    const double base = static_cast<double>(mc.k) / n;
    const double delta_eff =
        config.delta * (1.0 - base) * std::sqrt(static_cast<double>(support_size));
    Rng class_rng = Rng::stream(trial_seed, "classes");
    HalfspaceClass cls = make_uniform_halfspace(support_size, delta_eff, n, mc.k, class_rng);

    TrainConfig train_cfg;
    train_cfg.samples_per_class = config.samples_per_class;
    train_cfg.beta = mc.beta;
    train_cfg.homeostasis_between_classes = config.homeostasis;
    Rng train_rng = Rng::stream(trial_seed, "train");
    TrainedModel trained = train_classes(std::move(model), cls, train_cfg, train_rng);

    Rng test_rng = Rng::stream(trial_seed, "test");
    std::vector<float> activation(n);
    std::size_t correct = 0, total = 0;
    for (std::uint32_t i = 0; i < config.num_test; ++i) {
        sample_halfspace_into(cls, true, test_rng, activation);
        if (classify_halfspace(trained, activation, config.threshold)) ++correct;
        ++total;
        sample_halfspace_into(cls, false, test_rng, activation);
        if (!classify_halfspace(trained, activation, config.threshold)) ++correct;
        ++total;
    }
    tm.accuracy = total ? static_cast<double>(correct) / total : 0.0;
    fill_trial_shape(tm, trained);
    if (trial_index == 0 && !config.save_model_path.empty())
        save_model(trained, config.save_model_path);
    if (trial_index == 0 && config.emit_stats && !config.out.empty())
        emit_stats_doc(config, trained, {}, trial_seed);
    tm.wall_seconds = wall_seconds_since(t0);
    return tm;
}

namespace {

struct GridPoint {
    std::string param;
    double value = 0.0;
    ExperimentConfig config;  // config with the parameter applied
};

std::vector<GridPoint> sweep_grid(const ExperimentConfig& config) {
    if (config.sweep_steps == 0) throw std::invalid_argument("sweep: need steps >= 1");
    if (config.sweep_param.empty()) throw std::invalid_argument("sweep: missing param");
    std::vector<GridPoint> grid;
    for (std::uint32_t s = 0; s < config.sweep_steps; ++s) {
        double v = config.sweep_steps == 1
                       ? config.sweep_from
                       : config.sweep_from + (config.sweep_to - config.sweep_from) * s /
                             (config.sweep_steps - 1);
        GridPoint pt;
        pt.param = config.sweep_param;
        pt.config = config;
        if (config.sweep_param == "r") {
            pt.config.kind = ExperimentKind::stimulus;
            pt.config.r = v;
        } else if (config.sweep_param == "delta") {
            pt.config.kind = ExperimentKind::halfspace;
            pt.config.delta = v;
        } else if (config.sweep_param == "n") {
            // n-sweep layout: k = n/10 and q = k/n as n varies.
            auto n = static_cast<std::uint32_t>(std::llround(v));
            pt.config.kind = ExperimentKind::stimulus;
            pt.config.model.n = n;
            pt.config.model.k = std::max(1u, n / 10);
            pt.config.q = static_cast<double>(pt.config.model.k) / n;
            v = n;
        } else if (config.sweep_param == "k") {
            auto k = static_cast<std::uint32_t>(std::llround(v));
            pt.config.kind = ExperimentKind::stimulus;
            pt.config.model.k = k;
            pt.config.q = static_cast<double>(k) / pt.config.model.n;
            v = k;
        } else {
            throw std::invalid_argument("sweep: unsupported param " + config.sweep_param);
        }
        pt.value = v;
        grid.push_back(std::move(pt));
    }
    return grid;
}

TrialMetrics run_point_trial(const GridPoint& pt, std::uint32_t trial,
                             std::uint64_t global_seed) {
    std::string label = "trial-" + pt.param + "-" + fmt_full(pt.value) + "-" +
                        std::to_string(trial);
    std::uint64_t trial_seed = derive_stream_seed(global_seed, label);
    TrialMetrics tm;
    try {
        tm = pt.config.kind == ExperimentKind::halfspace
                 ? run_halfspace_trial(pt.config, trial_seed, trial)
                 : run_stimulus_trial(pt.config, trial_seed, trial);
    } catch (const std::exception& e) {
        tm.trial = trial;
        tm.seed = trial_seed;
        tm.error = e.what();
    }
    tm.param = pt.param;
    tm.value = pt.value;
    return tm;
}

std::string mnist_file(const std::string& dir, const std::string& dashed,
                       const std::string& dotted) {
    std::string a = dir + "/" + dashed;
    if (std::ifstream(a).good()) return a;
    std::string b = dir + "/" + dotted;
    if (std::ifstream(b).good()) return b;
    throw std::runtime_error("mnist: cannot find " + dashed + " under " + dir);
}

std::string resolve_data_dir(const ExperimentConfig& config) {
    if (!config.data_dir.empty()) return config.data_dir;
    if (const char* env = std::getenv("ASSEMBLIES_MNIST_DIR")) return env;
    return "data";
}

void run_mnist(ExperimentResult& result) {
    const ExperimentConfig& config = result.config;
    std::string dir = resolve_data_dir(config);
    Dataset train = load_mnist(
        mnist_file(dir, "train-images-idx3-ubyte", "train-images.idx3-ubyte"),
        mnist_file(dir, "train-labels-idx1-ubyte", "train-labels.idx1-ubyte"));
    Dataset test = load_mnist(
        mnist_file(dir, "t10k-images-idx3-ubyte", "t10k-images.idx3-ubyte"),
        mnist_file(dir, "t10k-labels-idx1-ubyte", "t10k-labels.idx1-ubyte"));
    if (config.limit > 0) {
        train = head(train, config.limit);
        test = head(test, config.limit);
    }
    if (config.binarize) {
        for (float& px : train.pixels) px = px >= 0.5f ? 1.0f : 0.0f;
        for (float& px : test.pixels) px = px >= 0.5f ? 1.0f : 0.0f;
    }

    std::vector<std::string> kinds;
    if (config.extractor == "all") {
        kinds = {"linear", "nonlinear", "large-area", "random-areas", "split-areas"};
    } else {
        kinds.push_back(config.extractor);
    }

    for (const std::string& kind_name : kinds) {
        auto t0 = std::chrono::steady_clock::now();
        ExtractorConfig ec;
        ec.kind = parse_extractor_kind(kind_name);
        ec.m = config.m;
        ec.p = config.model.p;
        ec.beta = config.extractor_beta;
        ec.examples_per_class = config.extractor_examples;
        ec.penalty_factor = config.penalty_factor;
        ec.seed = derive_stream_seed(config.model.seed, "extractor-" + kind_name);
        ec.threads = config.threads;

        TrainedExtractor ext = fit_extractor(ec, train);
        FeatureMatrix train_features = extract_features(ext, train);
        FeatureMatrix test_features = extract_features(ext, test);

        ReadoutConfig rc;
        rc.epochs = config.readout_epochs;
        rc.batch_size = config.readout_batch;
        rc.learning_rate = config.readout_lr;
        rc.seed = derive_stream_seed(config.model.seed, "readout-" + kind_name);
        ReadoutResult ro = train_linear_readout(train_features, train.labels, test_features,
                                                test.labels, rc);

        result.mnist_test_accuracy[kind_name] = ro.test_accuracy;
        result.mnist_train_accuracy[kind_name] = ro.train_accuracy;
        TrialMetrics tm;
        tm.param = "m";
        tm.value = config.m;
        tm.trial = 0;
        tm.seed = ec.seed;
        tm.accuracy = ro.test_accuracy;
        tm.wall_seconds = wall_seconds_since(t0);
        tm.error = "";
        tm.converge_step = -1;
        result.trials.push_back(tm);
        if (!config.quiet)
            std::printf("mnist %-12s m=%u train=%s test=%s (%ss)\n", kind_name.c_str(),
                        config.m, fmt6(ro.train_accuracy).c_str(),
                        fmt6(ro.test_accuracy).c_str(), fmt6(tm.wall_seconds).c_str());
    }
}

void emit_files(ExperimentResult& result) {
    const ExperimentConfig& config = result.config;
    if (config.out.empty()) return;
    auto kv = to_string_map(config);

    // CSV: config comment header, then one row per trial, sorted.
    std::vector<const TrialMetrics*> rows;
    for (const TrialMetrics& tm : result.trials) rows.push_back(&tm);
    std::sort(rows.begin(), rows.end(), [](const TrialMetrics* a, const TrialMetrics* b) {
        if (a->param != b->param) return a->param < b->param;
        if (a->value != b->value) return a->value < b->value;
        return a->trial < b->trial;
    });

    std::string csv_path = config.out + ".csv";
    {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + csv_path);
        csv << "# assemblies-experiment-v1\n";
        for (const auto& [key, value] : kv) csv << "# " << key << "=" << value << "\n";
        csv << "param,value,trial,seed,accuracy,support,converge_step\n";
        for (const TrialMetrics* tm : rows) {
            csv << tm->param << ',' << fmt6(tm->value) << ',' << tm->trial << ',' << tm->seed
                << ',' << fmt6(tm->accuracy) << ',' << tm->support << ',' << tm->converge_step
                << "\n";
        }
    }
    result.emitted_files.push_back(csv_path);

    // JSON: config, per-trial metrics, per-grid-point aggregates.
    nlohmann::json doc;
    doc["schema"] = "assemblies-experiment-v1";
    doc["config"] = kv;
    nlohmann::json trials = nlohmann::json::array();
    for (const TrialMetrics* tm : rows) {
        trials.push_back({{"param", tm->param},
                          {"value", tm->value},
                          {"trial", tm->trial},
                          {"seed", tm->seed},
                          {"accuracy", tm->accuracy},
                          {"support", tm->support},
                          {"converge_step", tm->converge_step},
                          {"error", tm->error}});
    }
    doc["trials"] = trials;

    nlohmann::json aggregates = nlohmann::json::array();
    std::size_t i = 0;
    while (i < rows.size()) {
        std::size_t j = i;
        double sum = 0, lo = 1e300, hi = -1e300;
        std::size_t ok = 0;
        while (j < rows.size() && rows[j]->param == rows[i]->param &&
               rows[j]->value == rows[i]->value) {
            if (rows[j]->error.empty()) {
                sum += rows[j]->accuracy;
                lo = std::min(lo, rows[j]->accuracy);
                hi = std::max(hi, rows[j]->accuracy);
                ++ok;
            }
            ++j;
        }
        aggregates.push_back({{"param", rows[i]->param},
                              {"value", rows[i]->value},
                              {"trials", j - i},
                              {"mean", ok ? sum / static_cast<double>(ok) : 0.0},
                              {"min", ok ? lo : 0.0},
                              {"max", ok ? hi : 0.0}});
        i = j;
    }
    doc["aggregates"] = aggregates;
    if (!result.mnist_test_accuracy.empty()) {
        doc["mnist_test_accuracy"] = result.mnist_test_accuracy;
        doc["mnist_train_accuracy"] = result.mnist_train_accuracy;
    }

    std::string json_path = config.out + ".json";
    {
        std::ofstream js(json_path, std::ios::binary);
        if (!js) throw std::runtime_error("cannot write " + json_path);
        js << doc.dump(2) << "\n";
    }
    result.emitted_files.push_back(json_path);
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config_in) {
    ExperimentConfig config = config_in;
    validate(config.model);
    if (config.kind != ExperimentKind::mnist && config.trials == 0)
        throw std::invalid_argument("experiment: need trials >= 1");
    ExperimentResult result;
    result.config = config;

    if (config.kind == ExperimentKind::mnist) {
        run_mnist(result);
    } else {
        std::vector<GridPoint> grid;
        if (config.kind == ExperimentKind::sweep) {
            grid = sweep_grid(config);
        } else {
            GridPoint pt;
            pt.config = config;
            if (config.kind == ExperimentKind::four_class) {
                pt.config.kind = ExperimentKind::stimulus;
                pt.config.classes = 4;
                pt.param = "r";
                pt.value = config.r;
            } else if (config.kind == ExperimentKind::halfspace) {
                pt.param = "delta";
                pt.value = config.delta;
            } else {
                pt.param = "r";
                pt.value = config.r;
            }
            grid.push_back(std::move(pt));
        }

        const std::size_t total = grid.size() * config.trials;
        result.trials.assign(total, TrialMetrics{});
        parallel_for(0, total, [&](std::size_t flat) {
            const GridPoint& pt = grid[flat / config.trials];
            auto trial = static_cast<std::uint32_t>(flat % config.trials);
            result.trials[flat] = run_point_trial(pt, trial, config.model.seed);
        }, config.threads);

        if (!config.quiet) {
            for (const TrialMetrics& tm : result.trials) {
                if (!tm.error.empty())
                    std::printf("%s=%s trial=%u ERROR %s\n", tm.param.c_str(),
                                fmt6(tm.value).c_str(), tm.trial, tm.error.c_str());
            }
            std::size_t i = 0;
            std::sort(result.trials.begin(), result.trials.end(),
                      [](const TrialMetrics& a, const TrialMetrics& b) {
                          if (a.value != b.value) return a.value < b.value;
                          return a.trial < b.trial;
                      });
            while (i < result.trials.size()) {
                std::size_t j = i;
                double sum = 0;
                while (j < result.trials.size() && result.trials[j].value == result.trials[i].value)
                    sum += result.trials[j++].accuracy;
                std::printf("%s=%s trials=%zu mean_accuracy=%s\n",
                            result.trials[i].param.c_str(), fmt6(result.trials[i].value).c_str(),
                            j - i, fmt6(sum / static_cast<double>(j - i)).c_str());
                i = j;
            }
        }
    }

    emit_files(result);
    return result;
}

std::map<std::string, std::string> to_string_map(const ExperimentConfig& c) {
    std::map<std::string, std::string> kv;
    kv["kind"] = experiment_kind_name(c.kind);
    kv["n"] = std::to_string(c.model.n);
    kv["k"] = std::to_string(c.model.k);
    kv["p"] = fmt_full(c.model.p);
    kv["beta"] = fmt_full(c.model.beta);
    kv["seed"] = std::to_string(c.model.seed);
    kv["samples"] = std::to_string(c.samples_per_class);
    kv["homeostasis"] = c.homeostasis ? "1" : "0";
    kv["classes"] = std::to_string(c.classes);
    kv["r"] = fmt_full(c.r);
    kv["q"] = fmt_full(c.q);
    kv["alpha"] = fmt_full(c.alpha);
    kv["delta"] = fmt_full(c.delta);
    kv["v_support_frac"] = fmt_full(c.v_support_frac);
    kv["threshold"] = fmt_full(c.threshold);
    kv["num_test"] = std::to_string(c.num_test);
    kv["trials"] = std::to_string(c.trials);
    kv["sweep.param"] = c.sweep_param;
    kv["sweep.from"] = fmt_full(c.sweep_from);
    kv["sweep.to"] = fmt_full(c.sweep_to);
    kv["sweep.steps"] = std::to_string(c.sweep_steps);
    kv["mnist.extractor"] = c.extractor;
    kv["mnist.m"] = std::to_string(c.m);
    kv["mnist.data_dir"] = c.data_dir;
    kv["mnist.limit"] = std::to_string(c.limit);
    kv["mnist.binarize"] = c.binarize ? "1" : "0";
    kv["mnist.readout_epochs"] = std::to_string(c.readout_epochs);
    kv["mnist.readout_batch"] = std::to_string(c.readout_batch);
    kv["mnist.readout_lr"] = fmt_full(c.readout_lr);
    kv["mnist.extractor_beta"] = fmt_full(c.extractor_beta);
    kv["mnist.extractor_examples"] = std::to_string(c.extractor_examples);
    kv["mnist.penalty_factor"] = fmt_full(c.penalty_factor);
    // the output stem is deliberately not embedded: emitted documents are
    // location-independent so replay to a new path is byte-identical
    return kv;
}

namespace {

const std::string* find_key(const std::map<std::string, std::string>& kv,
                            const std::string& key) {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
}

void set_u32(const std::map<std::string, std::string>& kv, const std::string& key,
             std::uint32_t& out) {
    if (const std::string* v = find_key(kv, key)) out = static_cast<std::uint32_t>(std::stoul(*v));
}
void set_u64(const std::map<std::string, std::string>& kv, const std::string& key,
             std::uint64_t& out) {
    if (const std::string* v = find_key(kv, key)) out = std::stoull(*v);
}
void set_f64(const std::map<std::string, std::string>& kv, const std::string& key, double& out) {
    if (const std::string* v = find_key(kv, key)) out = std::stod(*v);
}
void set_str(const std::map<std::string, std::string>& kv, const std::string& key,
             std::string& out) {
    if (const std::string* v = find_key(kv, key)) out = *v;
}
void set_bool(const std::map<std::string, std::string>& kv, const std::string& key, bool& out) {
    if (const std::string* v = find_key(kv, key))
        out = *v == "1" || *v == "true" || *v == "yes";
}

} // namespace

ExperimentConfig config_from_string_map(const std::map<std::string, std::string>& kv) {
    ExperimentConfig c;
    if (const std::string* v = find_key(kv, "kind")) c.kind = parse_experiment_kind(*v);
    apply_config_keys(c, kv);
    return c;
}

void apply_config_keys(ExperimentConfig& c, const std::map<std::string, std::string>& kv) {
    if (const std::string* v = find_key(kv, "kind")) c.kind = parse_experiment_kind(*v);
    set_u32(kv, "n", c.model.n);
    set_u32(kv, "k", c.model.k);
    set_f64(kv, "p", c.model.p);
    set_f64(kv, "beta", c.model.beta);
    set_u64(kv, "seed", c.model.seed);
    set_u32(kv, "samples", c.samples_per_class);
    set_bool(kv, "homeostasis", c.homeostasis);
    set_u32(kv, "classes", c.classes);
    set_f64(kv, "r", c.r);
    set_f64(kv, "q", c.q);
    set_f64(kv, "alpha", c.alpha);
    set_f64(kv, "delta", c.delta);
    set_f64(kv, "v_support_frac", c.v_support_frac);
    set_f64(kv, "threshold", c.threshold);
    set_u32(kv, "num_test", c.num_test);
    set_u32(kv, "trials", c.trials);
    set_str(kv, "sweep.param", c.sweep_param);
    set_f64(kv, "sweep.from", c.sweep_from);
    set_f64(kv, "sweep.to", c.sweep_to);
    set_u32(kv, "sweep.steps", c.sweep_steps);
    set_str(kv, "mnist.extractor", c.extractor);
    set_u32(kv, "mnist.m", c.m);
    set_str(kv, "mnist.data_dir", c.data_dir);
    set_u32(kv, "mnist.limit", c.limit);
    set_bool(kv, "mnist.binarize", c.binarize);
    set_u32(kv, "mnist.readout_epochs", c.readout_epochs);
    set_u32(kv, "mnist.readout_batch", c.readout_batch);
    set_f64(kv, "mnist.readout_lr", c.readout_lr);
    set_f64(kv, "mnist.extractor_beta", c.extractor_beta);
    set_u32(kv, "mnist.extractor_examples", c.extractor_examples);
    set_f64(kv, "mnist.penalty_factor", c.penalty_factor);
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line, section;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto strip = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = strip(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key=value, got: " + line);
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));
        if (!section.empty() && key.rfind(section + ".", 0) != 0 &&
            (section == "sweep" || section == "mnist"))
            key = section + "." + key;
        kv[key] = value;
    }
    return kv;
}

ExperimentResult replay(const std::string& json_path, const std::string& out_override) {
    std::ifstream in(json_path);
    if (!in) throw std::invalid_argument("replay: cannot open " + json_path);
    nlohmann::json doc = nlohmann::json::parse(in);
    if (!doc.contains("config")) throw std::invalid_argument("replay: no config in " + json_path);
    std::map<std::string, std::string> kv;
    for (auto& [key, value] : doc["config"].items()) kv[key] = value.get<std::string>();
    ExperimentConfig config = config_from_string_map(kv);
    config.out = out_override.empty()
                     ? experiment_kind_name(config.kind) + "-seed" +
                           std::to_string(config.model.seed) + "-replay"
                     : out_override;
    config.quiet = true;
    return run_experiment(config);
}

} // namespace assemblies
