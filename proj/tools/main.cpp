#include <cstdio>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "assemblies/analysis.hpp"
#include "assemblies/experiment.hpp"
#include "assemblies/util.hpp"

namespace {

using assemblies::ExperimentConfig;
using assemblies::ExperimentKind;

struct GlobalFlags {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    std::uint32_t trials = 0;
    unsigned threads = 0;
    bool quiet = false;
    bool seed_set = false, out_set = false, trials_set = false;
};

// Config-file keys are applied to the bound structs before argv parsing, so
// explicit flags always win; this only layers the global flags on top.
void finalize(ExperimentConfig& config, const GlobalFlags& flags) {
    if (flags.seed_set) config.model.seed = flags.seed;
    if (flags.out_set) config.out = flags.out;
    if (flags.trials_set) config.trials = flags.trials;
    config.threads = flags.threads;
    config.quiet = flags.quiet;
    if (config.out.empty())
        config.out = assemblies::experiment_kind_name(config.kind) + "-seed" +
                     std::to_string(config.model.seed);
}

// Pre-scan for --config so file keys become the parse-time defaults. The
// subcommand, not the file, decides the experiment kind.
std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

void add_model_flags(CLI::App* cmd, ExperimentConfig& config) {
    cmd->add_option("--n", config.model.n, "neurons per area");
    cmd->add_option("--k", config.model.k, "cap size");
    cmd->add_option("--p", config.model.p, "connection probability");
    cmd->add_option("--beta", config.model.beta, "plasticity parameter");
    cmd->add_option("--samples", config.samples_per_class, "training samples per class (T)");
    cmd->add_option("--num-test", config.num_test, "test samples per class");
    cmd->add_flag("--no-homeostasis", [&config](std::int64_t) { config.homeostasis = false; },
                  "disable between-class renormalization");
}

int run(ExperimentConfig config, const GlobalFlags& flags) {
    finalize(config, flags);
    auto result = assemblies::run_experiment(config);
    if (!flags.quiet)
        for (const std::string& f : result.emitted_files) std::printf("wrote %s\n", f.c_str());
    for (const auto& tm : result.trials)
        if (!tm.error.empty()) return 2;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"assembly learning simulator and experiment harness"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalFlags flags;
    app.add_option("--config", flags.config_path, "key=value config file")->expected(1);
    auto* seed_opt = app.add_option("--seed", flags.seed, "global experiment seed");
    auto* out_opt = app.add_option("--out", flags.out, "output file stem");
    auto* trials_opt = app.add_option("--trials", flags.trials, "trials per grid point");
    app.add_option("--threads", flags.threads, "worker threads (0 = hardware)");
    app.add_flag("--quiet", flags.quiet, "suppress progress output");

    // bounds
    auto* bounds_cmd = app.add_subcommand("bounds", "evaluate the closed-form bounds");
    struct {
        std::uint32_t n = 1000, k = 100;
        double p = 0.1, r = 0.9, q = 0.1, alpha = 0.2, gamma = 1.5, delta = 1.0, beta = 1.0;
    } bp;
    bounds_cmd->add_option("--n", bp.n);
    bounds_cmd->add_option("--k", bp.k);
    bounds_cmd->add_option("--p", bp.p);
    bounds_cmd->add_option("--r", bp.r);
    bounds_cmd->add_option("--q", bp.q);
    bounds_cmd->add_option("--alpha", bp.alpha);
    bounds_cmd->add_option("--gamma", bp.gamma);
    bounds_cmd->add_option("--delta", bp.delta);
    bounds_cmd->add_option("--beta", bp.beta);

    // train-stimulus
    ExperimentConfig stim_cfg;
    stim_cfg.kind = ExperimentKind::stimulus;
    auto* stim_cmd = app.add_subcommand("train-stimulus", "learn stimulus classes");
    add_model_flags(stim_cmd, stim_cfg);
    stim_cmd->add_option("--classes", stim_cfg.classes, "number of classes");
    stim_cmd->add_option("--r", stim_cfg.r, "core firing probability");
    stim_cmd->add_option("--q", stim_cfg.q, "off-core rate parameter");
    stim_cmd->add_option("--alpha", stim_cfg.alpha, "prescribed core overlap vs class 0");
    stim_cmd->add_option("--save-model", stim_cfg.save_model_path,
                         "write trial 0's trained model snapshot here");
    stim_cmd->add_flag("--stats", stim_cfg.emit_stats,
                       "also emit trial 0's bounds + empirical statistics");

    // train-halfspace
    ExperimentConfig half_cfg;
    half_cfg.kind = ExperimentKind::halfspace;
    half_cfg.model.beta = 1.0;
    auto* half_cmd = app.add_subcommand("train-halfspace", "learn a linear threshold");
    add_model_flags(half_cmd, half_cfg);
    half_cmd->add_option("--delta", half_cfg.delta, "margin slider in [0,1]");
    half_cmd->add_option("--support-frac", half_cfg.v_support_frac,
                         "fraction of coordinates in the direction's support");
    half_cmd->add_option("--threshold", half_cfg.threshold, "decision threshold (fraction of k)");
    half_cmd->add_option("--save-model", half_cfg.save_model_path,
                         "write trial 0's trained model snapshot here");
    half_cmd->add_flag("--stats", half_cfg.emit_stats,
                       "also emit trial 0's bounds + empirical statistics");

    // sweep
    ExperimentConfig sweep_cfg;
    sweep_cfg.kind = ExperimentKind::sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep with parallel trials");
    add_model_flags(sweep_cmd, sweep_cfg);
    sweep_cmd->add_option("--param", sweep_cfg.sweep_param, "r | delta | n | k")->required();
    sweep_cmd->add_option("--from", sweep_cfg.sweep_from)->required();
    sweep_cmd->add_option("--to", sweep_cfg.sweep_to)->required();
    sweep_cmd->add_option("--steps", sweep_cfg.sweep_steps)->required();
    sweep_cmd->add_option("--classes", sweep_cfg.classes);
    sweep_cmd->add_option("--r", sweep_cfg.r);
    sweep_cmd->add_option("--q", sweep_cfg.q);
    sweep_cmd->add_option("--support-frac", sweep_cfg.v_support_frac);
    sweep_cmd->add_option("--threshold", sweep_cfg.threshold);

    // four-class convenience
    ExperimentConfig four_cfg;
    four_cfg.kind = ExperimentKind::four_class;
    auto* four_cmd = app.add_subcommand("train-four-class", "learn four stimulus classes");
    add_model_flags(four_cmd, four_cfg);
    four_cmd->add_option("--r", four_cfg.r);
    four_cmd->add_option("--q", four_cfg.q);

    // mnist
    ExperimentConfig mnist_cfg;
    mnist_cfg.kind = ExperimentKind::mnist;
    auto* mnist_cmd = app.add_subcommand("mnist", "MNIST feature extraction + linear readout");
    mnist_cmd->add_option("--extractor", mnist_cfg.extractor,
                          "linear|nonlinear|large-area|random-areas|split-areas|all");
    mnist_cmd->add_option("--m", mnist_cfg.m, "total feature count");
    mnist_cmd->add_option("--data-dir", mnist_cfg.data_dir,
                          "IDX directory (default $ASSEMBLIES_MNIST_DIR, then ./data)");
    mnist_cmd->add_option("--limit", mnist_cfg.limit, "truncate train/test sets (smoke mode)");
    mnist_cmd->add_option("--epochs", mnist_cfg.readout_epochs);
    mnist_cmd->add_option("--batch", mnist_cfg.readout_batch);
    mnist_cmd->add_option("--lr", mnist_cfg.readout_lr);
    mnist_cmd->add_option("--extractor-beta", mnist_cfg.extractor_beta);
    mnist_cmd->add_option("--examples", mnist_cfg.extractor_examples, "examples per class");
    mnist_cmd->add_option("--penalty", mnist_cfg.penalty_factor, "negative-bias factor");
    mnist_cmd->add_option("--extractor-p", mnist_cfg.model.p, "fiber/recurrent density");
    mnist_cmd->add_flag("--binarize", mnist_cfg.binarize, "threshold pixels at 0.5");

    // replay
    std::string replay_from;
    auto* replay_cmd = app.add_subcommand("replay", "re-run a recorded experiment");
    replay_cmd->add_option("--from", replay_from, "emitted .json document")->required();

    std::string config_path = find_config_path(argc, argv);
    if (!config_path.empty()) {
        try {
            auto kv = assemblies::parse_config_file(config_path);
            kv.erase("kind");
            for (ExperimentConfig* cfg :
                 {&stim_cfg, &half_cfg, &sweep_cfg, &four_cfg, &mnist_cfg})
                assemblies::apply_config_keys(*cfg, kv);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 1;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    flags.seed_set = seed_opt->count() > 0;
    flags.out_set = out_opt->count() > 0;
    flags.trials_set = trials_opt->count() > 0;

    try {
        if (bounds_cmd->parsed()) {
            auto report = assemblies::evaluate_bounds(bp.n, bp.k, bp.p, bp.r, bp.q, bp.alpha,
                                                      bp.gamma, bp.delta, bp.beta);
            std::string json = assemblies::to_json(report);
            std::printf("%s\n", json.c_str());
            if (!flags.out.empty()) {
                std::FILE* f = std::fopen((flags.out + ".json").c_str(), "wb");
                if (!f) throw std::runtime_error("cannot write " + flags.out + ".json");
                std::fprintf(f, "%s\n", json.c_str());
                std::fclose(f);
            }
            return 0;
        }
        if (stim_cmd->parsed()) return run(stim_cfg, flags);
        if (half_cmd->parsed()) return run(half_cfg, flags);
        if (sweep_cmd->parsed()) return run(sweep_cfg, flags);
        if (four_cmd->parsed()) return run(four_cfg, flags);
        if (mnist_cmd->parsed()) {
            mnist_cfg.trials = 1;
            return run(mnist_cfg, flags);
        }
        if (replay_cmd->parsed()) {
            auto result = assemblies::replay(replay_from, flags.out_set ? flags.out : "");
            if (!flags.quiet)
                for (const std::string& f : result.emitted_files)
                    std::printf("wrote %s\n", f.c_str());
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 2;
    }
    return 1;
}
