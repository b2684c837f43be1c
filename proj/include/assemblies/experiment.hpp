#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "assemblies/graph.hpp"

namespace assemblies {

enum class ExperimentKind { stimulus, halfspace, four_class, sweep, mnist };

ExperimentKind parse_experiment_kind(const std::string& name);
std::string experiment_kind_name(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::stimulus;
    ModelConfig model;                    // n, k, p, beta, seed
    std::uint32_t samples_per_class = 5;  // T
    bool homeostasis = true;

    // stimulus classes
    std::uint32_t classes = 2;
    double r = 0.9;
    double q = 0.1;
    double alpha = -1.0;  // < 0: independent cores; else prescribed overlap vs class 0

    // halfspace: margin slider in [0,1]; support coordinates of the unit-L2
    // direction fire with probability k/n + delta*(1-k/n)
    double delta = 1.0;
    double v_support_frac = 0.4;
    double threshold = 0.5;  // fraction of k

    std::uint32_t num_test = 100;  // per class / per sign
    std::uint32_t trials = 20;

    // sweep
    std::string sweep_param;  // r | delta | n | k
    double sweep_from = 0.0;
    double sweep_to = 0.0;
    std::uint32_t sweep_steps = 0;

    // mnist
    std::string extractor = "split-areas";  // or "all"
    std::uint32_t m = 10000;
    std::string data_dir;
    std::uint32_t limit = 0;
    bool binarize = false;  // pixels -> 1{px >= 0.5}, sensitivity check
    std::uint32_t readout_epochs = 30;
    std::uint32_t readout_batch = 128;
    double readout_lr = 0.1;
    double extractor_beta = 1.0;
    std::uint32_t extractor_examples = 5;
    double penalty_factor = 10.0;

    std::string out;  // output stem; files are <out>.csv and <out>.json
    std::string save_model_path;  // trial 0's trained model snapshot, if set
    bool emit_stats = false;      // also write <out>.stats.json for trial 0
    unsigned threads = 0;
    bool quiet = false;
};

struct TrialMetrics {
    std::string param;       // swept parameter name (or the kind's natural one)
    double value = 0.0;      // parameter value for this trial
    std::uint32_t trial = 0;
    std::uint64_t seed = 0;  // derived per-trial stream seed
    double accuracy = 0.0;
    std::uint32_t support = 0;    // largest per-class support
    int converge_step = -1;       // first step with zero first-timers (1-based)
    double wall_seconds = 0.0;
    std::string error;            // nonempty if the trial failed
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<TrialMetrics> trials;
    std::vector<std::string> emitted_files;
    // mnist: accuracy per extractor kind at the configured m
    std::map<std::string, double> mnist_test_accuracy;
    std::map<std::string, double> mnist_train_accuracy;
};

// Flat key=value view of a fully-resolved config; embedded in every emitted
// file and sufficient to replay the run.
std::map<std::string, std::string> to_string_map(const ExperimentConfig& config);
ExperimentConfig config_from_string_map(const std::map<std::string, std::string>& kv);

// Key=value config file with optional [section] blocks; keys inside a section
// are stored as "section.key". '#' starts a comment.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Applies file keys onto a config: bare keys first, then keys from the
// section matching the config's kind.
void apply_config_keys(ExperimentConfig& config,
                       const std::map<std::string, std::string>& kv);

ExperimentResult run_experiment(const ExperimentConfig& config);

// Re-runs the experiment recorded in an emitted JSON document. Outputs are
// byte-identical to the original emission.
ExperimentResult replay(const std::string& json_path, const std::string& out_override = "");

// Single-trial runners, reused by the acceptance suite.
TrialMetrics run_stimulus_trial(const ExperimentConfig& config, std::uint64_t trial_seed,
                                std::uint32_t trial_index);
TrialMetrics run_halfspace_trial(const ExperimentConfig& config, std::uint64_t trial_seed,
                                 std::uint32_t trial_index);

} // namespace assemblies
