#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "assemblies/analysis.hpp"
#include "assemblies/learning.hpp"

using namespace assemblies;

/* Independent oracle: the same closed forms evaluated in long double with a
 * different association order, plus constants frozen from an external
 * high-precision calculation. The implementation under test never feeds
 * these.
 */
namespace oracle {

long double beta0(long double n, long double k, long double p, long double r) {
    long double L = 2.0L * std::log(n / k);
    long double denom = std::sqrt(k * p) + std::sqrt(L);
    return (std::sqrt(2.0L) - r * r) / (r * r) * std::sqrt(L) / denom +
           std::sqrt(6.0L) / (r * r * denom);
}

long double support(long double beta, long double b0, long double k) {
    return k / (-std::expm1(-(beta / b0) * (beta / b0)));
}

long double margin_req(long double n, long double k, long double p) {
    long double L = 2.0L * std::log(n / k);
    return std::sqrt(2.0L * k) / std::sqrt(p) * (std::sqrt(L + 2.0L) + 1.0L);
}

// frozen from an independent evaluation
constexpr double kBeta0Desk = 0.8712540927907423;
constexpr double kSupportAtBeta0 = 158.19767068693264;
constexpr double kSupportAtBeta1 = 136.58155332352024;
constexpr double kRecallDefect = 1.2340980408667956e-4;
constexpr double kGammaRecallMin = 4.161269302590776;
constexpr double kGammaMultiBrain = 3.7158827009284474;
constexpr double kGammaMultiDesk = 0.9559940465012889;
constexpr double kClassifyDefect = 0.22050105060897054;
constexpr double kMarginReq = 159.65760436413692;

} // namespace oracle

TEST_CASE("beta0 at desk scale matches the independent oracle") {
    double b0 = beta0(1000, 100, 0.1, 0.9);
    CHECK(b0 == doctest::Approx(oracle::kBeta0Desk).epsilon(1e-12));
    CHECK(b0 == doctest::Approx(double(oracle::beta0(1000.0L, 100.0L, 0.1L, 0.9L)))
                    .epsilon(1e-12));
    CHECK(std::abs(b0 - 0.8713) < 0.001);
}

TEST_CASE("beta0 decreases in kp and in r") {
    double prev = 1e9;
    for (double kp = 5; kp <= 100; kp += 5) {
        double b0 = beta0(1000, 100, kp / 100.0, 0.9);
        CHECK(b0 < prev);
        prev = b0;
    }
    double r_prev = 1e9;
    for (double r : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
        double b0 = beta0(1000, 100, 0.1, r);
        CHECK(b0 < r_prev);
        r_prev = b0;
    }
    // grid assertion over r x kp
    for (double r = 0.5; r <= 1.0; r += 0.1) {
        double prev_kp = 1e9;
        for (double kp = 5; kp <= 100; kp += 5) {
            double b0 = beta0(1000, 100, kp / 100.0, r);
            REQUIRE(b0 < prev_kp);
            prev_kp = b0;
        }
    }
}

TEST_CASE("beta0 domain errors") {
    CHECK_THROWS_AS(beta0(100, 100, 0.1, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(beta0(1000, 100, 0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(beta0(1000, 100, 0.1, 1.5), std::invalid_argument);
}

TEST_CASE("the full (r,q) beta0 variant reduces sensibly") {
    // At desk parameters the full form differs from the simplified default;
    // both stay in the same ballpark.
    double simplified = beta0(1000, 100, 0.1, 0.9);
    double full = beta0_full(1000, 100, 0.1, 0.9, 0.1);
    CHECK(full == doctest::Approx(0.7667137511726649).epsilon(1e-12));
    CHECK(std::abs(full - simplified) < 0.2);
}

TEST_CASE("support bound values and limits") {
    double b0 = beta0(1000, 100, 0.1, 0.9);
    CHECK(support_bound(b0, b0, 100) == doctest::Approx(oracle::kSupportAtBeta0).epsilon(1e-12));
    CHECK(support_bound(1.0, b0, 100) == doctest::Approx(oracle::kSupportAtBeta1).epsilon(1e-12));
    CHECK(support_bound(1.0, b0, 100) ==
          doctest::Approx(double(oracle::support(1.0L, oracle::beta0(1000.0L, 100.0L, 0.1L, 0.9L),
                                                 100.0L)))
              .epsilon(1e-10));
    // beta -> infinity approaches k from above, monotonically
    double prev = 1e18;
    for (double beta : {0.5, 1.0, 2.0, 3.0, 4.0}) {
        double s = support_bound(beta, b0, 100);
        CHECK(s >= 100.0);
        CHECK(s < prev);
        prev = s;
    }
    CHECK(support_bound(64.0, b0, 100) == doctest::Approx(100.0));
    CHECK(support_bound(64.0, b0, 100) >= 100.0);
}

TEST_CASE("recall defect bound") {
    CHECK(recall_defect_bound(100, 0.1, 0.9) ==
          doctest::Approx(oracle::kRecallDefect).epsilon(1e-12));
    CHECK(recall_defect_bound(100, 0.1, 0.0) == 1.0);  // vacuous
    // kpr = ln 2 -> 0.5
    CHECK(recall_defect_bound(100, std::log(2.0) / 100.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("gamma_recall_min value, limit and monotonicity") {
    CHECK(gamma_recall_min(1000, 100, 0.1, 0.9) ==
          doctest::Approx(oracle::kGammaRecallMin).epsilon(1e-12));
    // r = 1 and kp -> infinity with n/k fixed: 1 + 2*sqrt(2)
    CHECK(gamma_recall_min(2000000, 1000000, 0.9, 1.0) ==
          doctest::Approx(1.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-5));
    double prev = 1e18;
    for (double r : {0.5, 0.7, 0.9, 1.0}) {
        double g = gamma_recall_min(1000, 100, 0.1, r);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("gamma_multi_max at brain and desk scales") {
    CHECK(gamma_multi_max(10000000, 10000, 0.001, 0.9, 0.2) ==
          doctest::Approx(oracle::kGammaMultiBrain).epsilon(1e-12));
    double desk = gamma_multi_max(1000, 100, 0.1, 0.9, 0.2);
    CHECK(desk == doctest::Approx(oracle::kGammaMultiDesk).epsilon(1e-12));
    CHECK(desk < 1.0);  // vacuous at desk scale, reported not clamped
    CHECK_THROWS_AS(gamma_multi_max(1000, 100, 0.1, 0.9, 0.0), std::invalid_argument);
}

TEST_CASE("classification defect bound") {
    CHECK(classify_defect_bound(1.5, 0.2, 100, 0.1, 0.9) ==
          doctest::Approx(oracle::kClassifyDefect).epsilon(1e-12));
    CHECK(classify_defect_bound(5.0, 0.2, 100, 0.1, 0.9) == 2.0);  // gamma*alpha = 1: vacuous
    CHECK(classify_defect_bound(1.5, 0.2, 100000, 0.1, 0.9) < 1e-100);  // kpr -> infinity
}

TEST_CASE("halfspace margin requirement") {
    double req = halfspace_margin_requirement(1000, 100, 0.1);
    CHECK(req == doctest::Approx(oracle::kMarginReq).epsilon(1e-12));
    CHECK(req == doctest::Approx(double(oracle::margin_req(1000.0L, 100.0L, 0.1L)))
                     .epsilon(1e-12));
    CHECK(std::abs(req - 159.7) < 0.5);
    // at beta = 1 the required margin is sqrt(req)
    CHECK(std::sqrt(req) == doctest::Approx(12.635569016238916).epsilon(1e-12));
    // the constant-beta remark form agrees numerically
    double beta = 1.0;
    double remark = std::pow(2.0 * 100 / (beta * beta * 0.1), 0.25) *
                    std::sqrt(std::sqrt(2.0 * std::log(10.0) + 2.0) + 1.0);
    CHECK(remark == doctest::Approx(std::sqrt(req / beta)).epsilon(1e-9));
    // n = k: the log collapses, the value stays finite
    CHECK(halfspace_margin_requirement(100, 100, 0.1) ==
          doctest::Approx(107.96691275336337).epsilon(1e-12));
}

TEST_CASE("rounds_for_weight inverts the growth rule") {
    CHECK(rounds_for_weight(std::pow(1.1, 5), 1.0, 1.0, 0.1) == 5);
    CHECK(rounds_for_weight(2.0, 0.9, 1.0, 0.1) == 9);
    CHECK(rounds_for_weight(1.0, 0.5, 0.5, 0.1) == 0);
    CHECK_THROWS_AS(rounds_for_weight(0.5, 1.0, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("evaluate_bounds echoes inputs and flags vacuity") {
    BoundReport rep = evaluate_bounds(1000, 100, 0.1, 0.9, 0.1, 0.2, 1.5, 1.0, 1.0);
    CHECK(rep.n == 1000);
    CHECK(rep.beta0 == doctest::Approx(oracle::kBeta0Desk));
    CHECK(rep.gamma_multi_vacuous);
    CHECK(!rep.classify_vacuous);
    CHECK(!rep.recall_vacuous);
    std::string json = to_json(rep);
    CHECK(json.find("\"beta0\"") != std::string::npos);
    CHECK(json.find("gamma_multi_vacuous") != std::string::npos);
}

TEST_CASE("evaluators are pure: repeated calls bit-identical") {
    for (int i = 0; i < 3; ++i) {
        CHECK(beta0(1000, 100, 0.1, 0.9) == beta0(1000, 100, 0.1, 0.9));
        CHECK(halfspace_margin_requirement(777, 33, 0.25) ==
              halfspace_margin_requirement(777, 33, 0.25));
    }
}

namespace {

ModelConfig desk(std::uint64_t seed, double beta) {
    ModelConfig c;
    c.n = 1000;
    c.k = 100;
    c.p = 0.1;
    c.beta = beta;
    c.seed = seed;
    return c;
}

TrainedModel quick_train(std::uint64_t seed, double beta, std::uint32_t T,
                         std::vector<StimulusClass>& classes_out, std::uint32_t n_classes = 1) {
    ModelConfig mc = desk(seed, beta);
    Model model = make_model(mc);
    Rng crng = Rng::stream(mc.seed, "classes");
    for (std::uint32_t c = 0; c < n_classes; ++c)
        classes_out.push_back(make_stimulus_class(mc.k, mc.n, 0.9, 0.1, crng));
    TrainConfig cfg;
    cfg.samples_per_class = T;
    cfg.beta = beta;
    Rng trng = Rng::stream(mc.seed, "train");
    return train_classes(std::move(model), classes_out, cfg, trng);
}

} // namespace

TEST_CASE("measure_gamma is exactly 1 on untrained and beta=0 models") {
    std::vector<StimulusClass> classes;
    TrainedModel trained = quick_train(100, 0.0, 5, classes);
    CHECK(measure_gamma(trained, classes[0], trained.assemblies[0]) == 1.0);

    // untrained: fabricate an assembly over raw weights
    ModelConfig mc = desk(101, 0.1);
    Model model = make_model(mc);
    TrainedModel raw;
    raw.model = std::move(model);
    AssemblyRecord fake;
    Rng rng(5);
    fake.core_estimate = rng.sample_without_replacement(mc.n, mc.k);
    raw.assemblies.push_back(fake);
    CHECK(measure_gamma(raw, classes[0], raw.assemblies[0]) == 1.0);
}

TEST_CASE("measure_gamma grows with training and tracks the expected rate") {
    std::vector<StimulusClass> classes;
    const std::uint32_t T = 5;
    TrainedModel trained = quick_train(102, 1.0, T, classes);
    double gamma = measure_gamma(trained, classes[0], trained.assemblies[0]);
    CHECK(gamma > 1.5);
    // Expected growth regime (1+beta)^(T r) with slack for cap churn; the
    // measured value lands within a factor of ~4 of the point estimate.
    double regime = std::pow(2.0, T * 0.9);
    CHECK(gamma > regime / 6.0);
    CHECK(gamma < regime * 6.0);
}

TEST_CASE("empirical_stats fills traces, overlaps and firing probabilities") {
    std::vector<StimulusClass> classes;
    TrainedModel trained = quick_train(103, 0.1, 5, classes, 2);
    Rng rng = Rng::stream(103, "stats");
    EmpiricalStats stats = empirical_stats(trained, classes, 200, rng);

    REQUIRE(stats.mu_trace.size() == 2);
    CHECK(stats.mu_trace[0][0] == 1.0);  // first step: all winners are first-timers
    for (const auto& class_trace : stats.mu_trace)
        for (double mu : class_trace) {
            REQUIRE(mu >= 0.0);
            REQUIRE(mu <= 1.0);
        }
    // nu is overlap with previously trained cores: zero for the first class
    for (double nu : stats.nu_trace[0]) CHECK(nu == 0.0);

    CHECK(stats.assembly_overlap[0][0] == 100.0);
    CHECK(stats.assembly_overlap[1][1] == 100.0);
    CHECK(stats.assembly_overlap[0][1] == stats.assembly_overlap[1][0]);

    // input overlap diagonal ~ kr = 90
    CHECK(std::abs(stats.input_overlap[0][0] - 90.0) < 3.0);
    CHECK(std::abs(stats.input_overlap[1][1] - 90.0) < 3.0);
    // off-diagonal ~ alpha-level: independent cores overlap ~ k^2/n = 10 of
    // which r^2 fire together, plus q-level noise
    CHECK(stats.input_overlap[0][1] < 30.0);

    std::string json = to_json(stats);
    CHECK(json.find("mu_trace") != std::string::npos);
}

TEST_CASE("firing probability concentrates on the core of a strong assembly") {
    // Single class in the creation regime (beta >= beta0): the response to
    // fresh samples fires the core nearly always and the far outside never.
    std::vector<StimulusClass> classes;
    TrainedModel trained = quick_train(104, 1.0, 8, classes, 1);
    Rng rng = Rng::stream(104, "stats");
    EmpiricalStats stats = empirical_stats(trained, classes, 200, rng);

    const auto& fp = stats.firing_probability[0];
    double core_mean = 0;
    for (std::uint32_t i : trained.assemblies[0].core_estimate) core_mean += fp[i];
    core_mean /= trained.assemblies[0].core_estimate.size();
    CHECK(core_mean > 0.9);
    std::vector<std::uint8_t> in_support(1000, 0);
    for (std::uint32_t i : trained.assemblies[0].support) in_support[i] = 1;
    double outside = 0;
    int outside_n = 0;
    for (std::uint32_t i = 0; i < 1000; ++i)
        if (!in_support[i]) {
            outside += fp[i];
            ++outside_n;
        }
    CHECK(outside / outside_n < 0.05);
}
