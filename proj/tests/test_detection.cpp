#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spcd/detect.hpp"
#include "spcd/stats.hpp"
#include "spcd/sym_matrix.hpp"

using namespace spcd;

namespace {

TestConfig base_cfg() {
    TestConfig cfg;
    cfg.p = 500;
    cfg.n = 200;
    cfg.k = 30;
    cfg.delta = 0.05;
    cfg.theta = 4.0;
    return cfg;
}

constexpr double kRel = 1e-12;

}  // namespace

TEST_CASE("config validation") {
    TestConfig cfg = base_cfg();
    CHECK_NOTHROW(validate(cfg));
    cfg.p = 0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = base_cfg();
    cfg.n = -1;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = base_cfg();
    cfg.k = 0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = base_cfg();
    cfg.k = 501;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = base_cfg();
    cfg.delta = 1.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = base_cfg();
    cfg.delta = 0.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = base_cfg();
    cfg.theta = 0.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    CHECK_NOTHROW(validate(cfg, false));  // theta unused by null-only rules
}

TEST_CASE("exhaustive-statistic thresholds at a frozen reference point") {
    Thresholds t = thresholds_lambda(base_cfg());
    CHECK(t.tau0 == doctest::Approx(8.495810580709026).epsilon(kRel));
    CHECK(t.tau1 == doctest::Approx(3.7761265846595915).epsilon(kRel));
    CHECK(t.theta_bar == doctest::Approx(7.985359946845191).epsilon(kRel));
    CHECK_FALSE(t.feasible);

    // strong signal clears the null quantile
    TestConfig hot = base_cfg();
    hot.theta = 15.0;
    CHECK(thresholds_lambda(hot).feasible);
}

TEST_CASE("relaxation thresholds at the frozen reference point") {
    Thresholds t = thresholds_sdp(base_cfg());
    CHECK(t.tau0 == doctest::Approx(23.982927844592915).epsilon(kRel));
    CHECK(t.tau1 == doctest::Approx(3.7761265846595915).epsilon(kRel));
    CHECK(t.theta_bar == doctest::Approx(23.472477210729078).epsilon(kRel));
    CHECK_FALSE(t.feasible);
    // the alternative-side quantile is shared with the exhaustive rule
    CHECK(t.tau1 == thresholds_lambda(base_cfg()).tau1);
}

TEST_CASE("diagonal thresholds at the frozen reference point") {
    Thresholds t = thresholds_diag(base_cfg());
    CHECK(t.null_bound() == doctest::Approx(1.5212966089776314).epsilon(kRel));
    CHECK(t.alt_bound() == doctest::Approx(0.8559220258561742).epsilon(kRel));
    CHECK(t.theta_bar == doctest::Approx(30.430837322477064).epsilon(kRel));
    CHECK_FALSE(t.feasible);

    TestConfig hot = base_cfg();
    hot.theta = 40.0;  // above the closed-form minimal level
    CHECK(thresholds_diag(hot).feasible);

    // tiny n: 1 - 2 sqrt(log(1/delta)/n) <= 0, no detectable theta
    TestConfig tiny = base_cfg();
    tiny.p = 10;
    tiny.n = 4;
    tiny.k = 2;
    CHECK(std::isinf(thresholds_diag(tiny).theta_bar));

    // k = 1: alternative bound coincides exactly with the exhaustive rule
    TestConfig one = base_cfg();
    one.k = 1;
    CHECK(thresholds_diag(one).alt_bound() == thresholds_lambda(one).tau1);
}

TEST_CASE("weak-signal limits of the threshold formulas") {
    // delta -> 1: log(1/delta) -> 0, alternative quantile -> 1 + theta
    TestConfig cfg = base_cfg();
    cfg.delta = 1.0 - 1e-12;
    CHECK(thresholds_lambda(cfg).tau1 == doctest::Approx(1.0 + cfg.theta).epsilon(1e-6));

    // minimal detectable level shrinks as n grows, for every rule
    double prev_l = std::numeric_limits<double>::infinity();
    double prev_s = prev_l, prev_d = prev_l;
    for (int n : {100, 200, 400, 800, 1600, 3200}) {
        TestConfig c = base_cfg();
        c.n = n;
        double l = thresholds_lambda(c).theta_bar;
        double s = thresholds_sdp(c).theta_bar;
        double d = thresholds_diag(c).theta_bar;
        CHECK(l < prev_l);
        CHECK(s < prev_s);
        CHECK(d < prev_d);
        prev_l = l;
        prev_s = s;
        prev_d = d;
    }
}

TEST_CASE("threshold scaling bands across the parameter grid") {
    for (int p : {100, 500, 2000})
        for (int k : {5, 30})
            for (int n : {100, 400, 1600, 6400}) {
                TestConfig cfg;
                cfg.p = p;
                cfg.n = n;
                cfg.k = k;
                cfg.delta = 0.05;
                cfg.theta = 1.0;
                double lead = k * std::log(9.0 * std::exp(1.0) * p / k);
                double scaled = thresholds_lambda(cfg).theta_bar * std::sqrt(n / lead);
                CHECK(scaled >= 4.0);
                CHECK(scaled <= 13.0);
                double ratio = thresholds_sdp(cfg).theta_bar / thresholds_lambda(cfg).theta_bar;
                CHECK(ratio >= 0.2 * std::sqrt(static_cast<double>(k)));
                CHECK(ratio <= 5.0 * std::sqrt(static_cast<double>(k)));
            }
}

TEST_CASE("minimax detection level") {
    CHECK(detection_lower_bound(0.4, 500, 1000, 10) ==
          doctest::Approx(0.12030708024823365).epsilon(kRel));
    // cap at 1/sqrt(2) for loud regimes
    CHECK(detection_lower_bound(0.4, 1000000, 10, 100) == 1.0 / std::sqrt(2.0));
    // nonpositive constant: refused rather than silently NaN
    CHECK_THROWS_AS(detection_lower_bound(0.25, 500, 1000, 10), std::invalid_argument);
    CHECK_THROWS_AS(detection_lower_bound(0.1, 500, 1000, 10), std::invalid_argument);
    CHECK_THROWS_AS(detection_lower_bound(0.5, 500, 1000, 10), std::invalid_argument);
    CHECK_THROWS_AS(detection_lower_bound(0.0, 500, 1000, 10), std::invalid_argument);
    CHECK_THROWS_AS(detection_lower_bound(0.4, 0, 1000, 10), std::invalid_argument);
}

TEST_CASE("distribution-robust thresholds") {
    TestConfig cfg;
    cfg.p = 100;
    cfg.n = 10000;
    cfg.k = 5;
    cfg.delta = 0.05;
    cfg.theta = 0.5;

    cfg.statistic = StatName::LAMBDA_K;
    Thresholds tl = sub_gaussian_thresholds(cfg);
    CHECK(tl.tau0 == doctest::Approx(24.160929534501037).epsilon(kRel));
    CHECK(tl.tau1 == doctest::Approx(-2.3292924897064706).epsilon(kRel));
    CHECK_FALSE(tl.feasible);

    cfg.statistic = StatName::MDP;
    Thresholds tm = sub_gaussian_thresholds(cfg);
    CHECK(tm.tau0 == doctest::Approx(77.005697628878).epsilon(kRel));
    CHECK(tm.tau1 == tl.tau1);
    cfg.statistic = StatName::SDP;
    CHECK(sub_gaussian_thresholds(cfg).tau0 == tm.tau0);

    cfg.statistic = StatName::DIAG;
    CHECK_THROWS_AS(sub_gaussian_thresholds(cfg), std::invalid_argument);
    cfg.statistic = StatName::MDP;
    cfg.theta = 1.5;
    CHECK_THROWS_AS(sub_gaussian_thresholds(cfg), std::invalid_argument);
}

TEST_CASE("generic decision rule is strict and rejects bad inputs") {
    TestConfig cfg = base_cfg();
    StatValue s;
    s.name = StatName::MDP;
    s.value = 1.0;
    CHECK(run_test(s, 1.0, cfg).decision == 0);
    s.value = 1.5;
    TestReport r = run_test(s, 1.2, cfg);
    CHECK(r.decision == 1);
    CHECK(r.tau == 1.2);
    CHECK(r.stat.value == 1.5);
    s.value = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(run_test(s, 1.2, cfg), std::invalid_argument);
    s.value = 1.0;
    CHECK_THROWS_AS(run_test(s, std::numeric_limits<double>::infinity(), cfg),
                    std::invalid_argument);
}

TEST_CASE("multiple-sparsity correction divides the error budget") {
    TestConfig cfg = base_cfg();
    std::vector<int> ks = {2, 3, 5};
    std::vector<Thresholds> out = bonferroni_thresholds(cfg, ks, &thresholds_lambda);
    REQUIRE(out.size() == 3);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        TestConfig c = cfg;
        c.k = ks[i];
        c.delta = cfg.delta / 3.0;
        Thresholds direct = thresholds_lambda(c);
        CHECK(out[i].tau0 == direct.tau0);
        CHECK(out[i].tau1 == direct.tau1);
    }
    CHECK_THROWS_AS(bonferroni_thresholds(cfg, {}, &thresholds_lambda), std::invalid_argument);
}

TEST_CASE("threshold dispatch follows the statistic name") {
    TestConfig cfg = base_cfg();
    cfg.statistic = StatName::LAMBDA_K;
    CHECK(thresholds_for(cfg).tau0 == thresholds_lambda(cfg).tau0);
    cfg.statistic = StatName::SDP;
    CHECK(thresholds_for(cfg).tau0 == thresholds_sdp(cfg).tau0);
    cfg.statistic = StatName::MDP;
    CHECK(thresholds_for(cfg).tau0 == thresholds_sdp(cfg).tau0);
    cfg.statistic = StatName::DIAG;
    CHECK(thresholds_for(cfg).tau0 == thresholds_diag(cfg).tau0);
}

TEST_CASE("perturbation-robust test on clean and spiked inputs") {
    TestConfig cfg;
    cfg.p = 50;
    cfg.n = 100;
    cfg.k = 5;
    cfg.delta = 0.05;
    cfg.statistic = StatName::MDP;

    double root = std::sqrt(std::log(cfg.p / cfg.delta) / cfg.n);
    double tau = 1.0 + cfg.k * root;

    // frozen reference point for the threshold arithmetic
    TestConfig big = base_cfg();
    big.statistic = StatName::MDP;
    SymMatrix eye_big = SymMatrix::identity(500);
    TestReport rb = adversarial_test(eye_big, big);
    CHECK(rb.tau == doctest::Approx(7.437898078868042).epsilon(kRel));
    CHECK(rb.theta_guarantee == doctest::Approx(12.875796157736085).epsilon(kRel));
    CHECK(rb.decision == 0);
    CHECK_FALSE(rb.near_boundary);  // value is exactly 1, not above it

    // spike above the guaranteed level: detected
    std::vector<int> supp = {3, 11, 20, 31, 44};
    double inv = 1.0 / std::sqrt(5.0);
    SymMatrix spiked = SymMatrix::identity(50);
    double theta = 4.0;
    for (std::size_t a = 0; a < supp.size(); ++a)
        for (std::size_t b = a; b < supp.size(); ++b)
            spiked.add(supp[a], supp[b], theta * inv * inv);
    CHECK(theta > 2.0 * cfg.k * root);
    TestReport r1 = adversarial_test(spiked, cfg);
    CHECK(r1.tau == doctest::Approx(tau).epsilon(1e-14));
    CHECK(r1.decision == 1);
    CHECK_FALSE(r1.near_boundary);

    // worst-case perturbed input: half the guaranteed level lands inside
    // the indistinguishable band (1, tau]
    double theta_low = 0.9 * 2.0 * cfg.k * root;
    SymMatrix masked = SymMatrix::identity(50);
    for (std::size_t a = 0; a < supp.size(); ++a)
        for (std::size_t b = a; b < supp.size(); ++b)
            masked.add(supp[a], supp[b], 0.5 * theta_low * inv * inv);
    TestReport r0 = adversarial_test(masked, cfg);
    CHECK(r0.decision == 0);
    CHECK(r0.near_boundary);

    // single loud diagonal entry below tau: flagged as near-boundary
    SymMatrix bump = SymMatrix::identity(50);
    bump.set(0, 0, 1.5);
    TestReport rn = adversarial_test(bump, cfg);
    CHECK(rn.decision == 0);
    CHECK(rn.near_boundary);

    cfg.statistic = StatName::DIAG;
    CHECK_THROWS_AS(adversarial_test(bump, cfg), std::invalid_argument);
    cfg.statistic = StatName::MDP;
    cfg.p = 49;
    CHECK_THROWS_AS(adversarial_test(bump, cfg), std::invalid_argument);
}

TEST_CASE("exact exhaustive decision via certified shortcuts") {
    // p = 40, k = 12: C(40,12) is far over the enumeration budget, yet the
    // decision is still exact through the diagonal / relaxation bounds.
    SymMatrix A = SymMatrix::identity(40);
    CHECK(lambda_k_test_decision(A, 12, 1.5) == 0);
    A.set(7, 7, 2.0);
    CHECK(lambda_k_test_decision(A, 12, 1.5) == 1);

    // straddling case on a small matrix falls back to enumeration
    SymMatrix B = SymMatrix::identity(8);
    B.set(1, 2, 0.45);
    B.set(1, 5, 0.45);
    B.set(2, 5, 0.45);
    double exact = lambda_k_max(B, 3).value;
    CHECK(lambda_k_test_decision(B, 3, exact - 1e-6) == 1);
    CHECK(lambda_k_test_decision(B, 3, exact + 1e-6) == 0);
}
