#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spcd/detect.hpp"
#include "spcd/models.hpp"
#include "spcd/stats.hpp"

namespace spcd {

inline constexpr const char* kToolVersion = "1.0.0";

// SDP is skipped above this dimension in experiment drivers (the splitting
// solver's full eigendecompositions get expensive); MDP has no such cap.
inline constexpr int kSdpDimBudget = 128;

// One Monte Carlo campaign. Singleton grids describe simple two-arm runs;
// the phase-transition driver consumes ps and etas and derives the rest.
struct ExperimentPlan {
    StatName statistic = StatName::MDP;
    int trials = 200;  // N per arm
    std::vector<double> alphas = {0.05, 0.01};
    std::uint64_t seed = 12345;
    int threads = 1;

    std::vector<int> ps, ns, ks;
    std::vector<double> thetas;
    std::vector<double> etas;  // phase transition targets; empty = default grid

    // Flat 1/sqrt(k) direction: per-coordinate signal mass is exactly theta/k,
    // the regime where the thresholded statistic separates the hypotheses while
    // the max-diagonal statistic cannot. A sphere-drawn direction concentrates
    // ~5x more mass on its largest coordinate and hands the diagonal statistic
    // the alternative for free.
    SpikeMode spike_mode = SpikeMode::UNIFORM_KGRID;
    std::optional<SubGaussianFamily> family;  // unset = Gaussian sampling
    int mdp_grid = 512;
    int n_max = 100000;  // grid points needing larger n are skipped
};

void validate(const ExperimentPlan& plan);

struct GridPoint {
    int p = 0, n = 0, k = 0;
    double theta = 1.0;
    double eta_star = 0.0;  // (k/n) log(p/k), from the realized n
    double eta_circ = 0.0;  // (k^2/n) log(p/k)
    int scaling_power = 1;  // the a in n = round(k^a log(p/k) / eta)
    std::vector<double> p2;  // type II rate per plan alpha
    bool skipped = false;
    std::string note;
};

struct ExperimentResult {
    std::vector<double> null_draws, alt_draws;
    std::vector<double> quantiles;  // aligned with plan.alphas
    double type1 = std::numeric_limits<double>::quiet_NaN();
    double type2 = std::numeric_limits<double>::quiet_NaN();
    std::vector<GridPoint> grid;
    std::vector<std::string> warnings;
};

// ceil((1-alpha) N)-th order statistic of the draws: a conservative upper
// quantile. Requires N*alpha >= 1 (below that the estimate has no
// resolution) and draws nonempty.
double conservative_quantile(std::vector<double> draws, double alpha);

// Null-arm draws plus the conservative quantile per alpha. Uses the first
// entry of each grid list.
ExperimentResult null_quantiles(const ExperimentPlan& plan);

// Two-arm run against a fixed threshold: type1 = P(stat > tau | H0),
// type2 = P(stat <= tau | H1).
ExperimentResult error_rates(const ExperimentPlan& plan, double tau);

// Paired two-statistic design: per trial one dataset, one covariance, both
// the max-diagonal statistic and MDP evaluated on it.
struct DensityResult {
    std::vector<double> null_mdp, alt_mdp, null_diag, alt_diag;
    std::vector<std::string> warnings;
};
DensityResult density_experiment(const ExperimentPlan& plan);

// Phase-transition sweep: for each p (k = floor(sqrt(p)), theta = 1), each
// target eta, and each scaling power a in {1,2}, set n = round(k^a
// log(p/k)/eta), estimate null quantiles at each alpha and the type II rate
// at those thresholds. Points needing n > plan.n_max are emitted as skipped.
ExperimentResult phase_transition(const ExperimentPlan& plan);

// Interpolated eta where type II error crosses 0.5, linear in log eta
// between the last point at or below 0.5 and its successor; NaN when the
// curve never crosses. `curve` is (eta, P_II) sorted by eta ascending.
double crossing_eta(const std::vector<std::pair<double, double>>& curve);

// Monte Carlo check of the likelihood-ratio second-moment identity: S and T
// are k-subsets overlapping in r coordinates, the per-sample integrand is
// (dP_S/dP_0)(X) (dP_T/dP_0)(X) under X ~ N(0, I_p), and the closed-form
// target is (1 - theta^2 (r/k)^2)^{-1/2}. Requires theta in (0, 1/2).
struct AffinityResult {
    double mc_estimate = 0.0;
    double closed_form = 0.0;
    double std_error = 0.0;
    long long trials = 0;
};
AffinityResult lr_affinity_check(int p, int k, double theta, int r, long long trials, Seed seed);

// Mean top eigenvalue of null empirical covariances against the
// (1+sqrt(p/n))^2 bulk-edge prediction.
struct EdgeResult {
    double mean_lambda_max = 0.0;
    double predicted_edge = 0.0;
    std::vector<double> draws;
};
EdgeResult mp_edge_check(int p, int n, int trials, Seed seed);

// Planted-clique detection through the Gaussianization reduction. Both arms
// (planted, null graph) get `trials` runs of the MDP statistic at sparsity
// k, plus a genuine-Gaussian arm of the same shape for the distributional
// sanity check; SDP runs alongside when n <= kSdpDimBudget. tau is the
// empirical (1-delta) null-graph quantile.
struct CliqueReport {
    int n = 0, k = 0, trials = 0;
    double delta = 0.1;
    double lemma_floor = 0.0;  // 1 + k^2/(4 pi n) - 3 sqrt(k log(2/delta)/n)
    double null_quantile = 0.0;
    double power = 0.0;  // fraction of planted draws above null_quantile
    double planted_mean = 0.0, null_mean = 0.0;
    double welch_t = 0.0, welch_p = 0.0;  // one-sided, planted > null
    double ks_stat = 0.0, ks_crit_1pct = 0.0;  // null-graph vs Gaussian arms
    bool sdp_used = false;
    std::vector<double> planted_draws, null_draws, gauss_draws;
    std::vector<double> planted_sdp, null_sdp;
    std::vector<std::string> warnings;
};
CliqueReport clique_detection_experiment(int n, int k, int trials, double delta, Seed seed,
                                         int threads = 1, int mdp_grid = 512);

// ---- small statistics helpers used by the reports ----

double normal_cdf(double x);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p_one_sided = 1.0;  // H1: mean(a) > mean(b), normal approximation
};
WelchResult welch_one_sided(const std::vector<double>& a, const std::vector<double>& b);

// Two-sample Kolmogorov-Smirnov statistic and the asymptotic critical value
// c(alpha) sqrt((m+n)/(m n)) with c(alpha) = sqrt(-log(alpha/2)/2).
double ks_two_sample(std::vector<double> a, std::vector<double> b);
double ks_critical(double alpha, std::size_t m, std::size_t n);

// 64 equal bins covering [min, max]; the bin width honors the
// Freedman-Diaconis rule as a lower bound on resolution (width is widened
// to cover the range when the rule's bins would not reach).
struct Histogram {
    double lo = 0.0;
    double width = 0.0;
    std::vector<long long> counts;
};
Histogram fd_histogram(const std::vector<double>& draws, int bins = 64);

// ---- deterministic parallel trial runner ----

// Runs fn(trial) for trial in [0, count) on up to `threads` workers. The
// caller must make fn write only to its own index-addressed slot; results
// are then identical for every worker count. The first exception thrown by
// any worker is rethrown after all workers join.
void parallel_trials(int count, int threads, const std::function<void(int)>& fn);

// ---- text emitters ----

// "trial_id,hypothesis,statistic,value" rows; hypothesis is "H0"/"H1" (or a
// caller-supplied label per series).
std::string trials_csv(const std::vector<std::pair<std::string, const std::vector<double>*>>& arms,
                       StatName statistic);

// eta grid CSV: p,n,k,scaling_power,eta_star,eta_circ then one P_II column
// per alpha, plus a skipped flag column.
std::string grid_csv(const std::vector<GridPoint>& grid, const std::vector<double>& alphas);

std::string histogram_csv(const Histogram& h);

// Minimal standalone SVG: one polyline per named series, log or linear x,
// y clamped to [0, max observed].
struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};
std::string svg_curve_plot(const std::string& title, const std::string& x_label,
                           const std::vector<SvgSeries>& series, bool log_x = true);

}  // namespace spcd
