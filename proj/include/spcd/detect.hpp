#pragma once

#include <limits>
#include <vector>

#include "spcd/stats.hpp"
#include "spcd/sym_matrix.hpp"

namespace spcd {

// Problem size and test parameters. `theta` is the signal strength assumed
// under the alternative; it only enters alternative-side quantiles.
struct TestConfig {
    int p = 0;
    int n = 0;
    int k = 0;
    double delta = 0.05;
    double theta = 1.0;
    StatName statistic = StatName::MDP;
};

// Throws std::invalid_argument on a bad config. Alternative-side rules also
// need theta > 0; pass need_theta = false for rules that never touch it.
void validate(const TestConfig& cfg, bool need_theta = true);

// A null/alternative quantile pair. tau0 bounds the statistic under the null
// with probability 1-delta, tau1 lower-bounds it under the alternative. For
// the diagonal statistic the two printed displays are exposed by mathematical
// role (which display bounds which side), via the named accessors.
struct Thresholds {
    double tau0 = 0.0;
    double tau1 = 0.0;
    // Minimal detectable signal strength for this rule; +inf when no theta
    // is detectable, NaN when the rule does not define one in closed form.
    double theta_bar = std::numeric_limits<double>::quiet_NaN();
    bool feasible = false;  // tau1 > tau0
    double null_bound() const { return tau0; }
    double alt_bound() const { return tau1; }
};

struct TestReport {
    TestConfig config;
    StatValue stat;
    double tau = 0.0;
    int decision = 0;  // 1 iff stat.value > tau, strict
    // Set by the adversarial test only: the signal strength above which the
    // rule is guaranteed to detect, and whether the observed value sits in
    // the indistinguishable band (1, tau].
    double theta_guarantee = std::numeric_limits<double>::quiet_NaN();
    bool near_boundary = false;
};

// Exhaustive-statistic thresholds:
//   tau0 = 1 + 4 sqrt(E) + 4 E,  E = (k log(9ep/k) + log(1/delta)) / n
//   tau1 = 1 + theta - 2 (1+theta) sqrt(log(1/delta)/n)
//   theta_bar = 4 sqrt(E) + 4 E + 4 sqrt(log(1/delta)/n)
Thresholds thresholds_lambda(const TestConfig& cfg);

// Convex-relaxation thresholds; valid for both the SDP and MDP statistics.
Thresholds thresholds_sdp(const TestConfig& cfg);

// Diagonal-statistic bounds; theta_bar is the closed-form solution of
// alt_bound > null_bound in theta (+inf when no theta satisfies it).
Thresholds thresholds_diag(const TestConfig& cfg);

// Minimax lower-bound level: theta_nu = sqrt(k log(C_nu p/k^2 + 1)/n) capped
// at 1/sqrt(2), with C_nu = log(min(1+8 nu^2, log(e/(2-4 nu)))). Requires
// nu in (0, 1/2); refuses nu where C_nu <= 0 (the printed constant is
// nonpositive for nu <= 1/4, making the level ill-defined).
double detection_lower_bound(double nu, int p, int n, int k);

// Distribution-robust bounds under a sub-Gaussian sampling assumption. The
// null bound is selected by cfg.statistic (LAMBDA_K vs SDP/MDP; no bound is
// provided for DIAG). The alternative bound requires theta <= 1.
Thresholds sub_gaussian_thresholds(const TestConfig& cfg);

// Test under adversarially perturbed covariance input: threshold
// 1 + k sqrt(log(p/delta)/n), detection guaranteed for
// theta > 2 k sqrt(log(p/delta)/n). Computes cfg.statistic from sigma_hat
// (MDP, SDP or LAMBDA_K only).
TestReport adversarial_test(const SymMatrix& sigma_hat, const TestConfig& cfg);

// The generic decision rule: decision = 1 iff stat.value > tau (strict).
// A NaN statistic value is an error, never a decision.
TestReport run_test(const StatValue& stat, double tau, const TestConfig& cfg);

// Multiple-sparsity correction: evaluates `rule` at each k in ks with delta
// replaced by delta/|ks|. Result order matches ks.
std::vector<Thresholds> bonferroni_thresholds(const TestConfig& base, const std::vector<int>& ks,
                                              Thresholds (*rule)(const TestConfig&));

// Dispatch to the thresholds rule matching cfg.statistic.
Thresholds thresholds_for(const TestConfig& cfg);

// Exact decision for the exhaustive-statistic test, with certified
// shortcuts: the max diagonal entry lower-bounds lambda_k (decision 1 when
// it already exceeds tau) and MDP upper-bounds it (decision 0 when MDP is
// at most tau). Exhaustive enumeration runs only when the two bounds
// straddle tau, so the decision is always exact even when C(p,k) makes the
// direct statistic unaffordable.
int lambda_k_test_decision(const SymMatrix& A, int k, double tau, int grid_size = 256);

}  // namespace spcd
