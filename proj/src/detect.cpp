#include "spcd/detect.hpp"

#include <cmath>
#include <stdexcept>

namespace spcd {

void validate(const TestConfig& cfg, bool need_theta) {
    if (cfg.p < 1 || cfg.n < 1 || cfg.k < 1)
        throw std::invalid_argument("config: p, n, k must be positive");
    if (cfg.k > cfg.p) throw std::invalid_argument("config: k must be <= p");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
        throw std::invalid_argument("config: delta must lie in (0,1)");
    if (need_theta && !(cfg.theta > 0.0))
        throw std::invalid_argument("config: theta must be > 0");
}

namespace {

const double kE = 2.718281828459045235360287;

double alt_quantile(double theta, double l1) { return 1.0 + theta - 2.0 * (1.0 + theta) * std::sqrt(l1); }

}  // namespace

Thresholds thresholds_lambda(const TestConfig& cfg) {
    validate(cfg);
    double n = cfg.n, k = cfg.k, p = cfg.p;
    double l1 = std::log(1.0 / cfg.delta) / n;
    double e = (k * std::log(9.0 * kE * p / k) + std::log(1.0 / cfg.delta)) / n;
    Thresholds t;
    t.tau0 = 1.0 + 4.0 * std::sqrt(e) + 4.0 * e;
    t.tau1 = alt_quantile(cfg.theta, l1);
    t.theta_bar = 4.0 * std::sqrt(e) + 4.0 * e + 4.0 * std::sqrt(l1);
    t.feasible = t.tau1 > t.tau0;
    return t;
}

Thresholds thresholds_sdp(const TestConfig& cfg) {
    validate(cfg);
    double n = cfg.n, k = cfg.k, p = cfg.p;
    double l1 = std::log(1.0 / cfg.delta) / n;
    double lg4 = std::log(4.0 * p * p / cfg.delta);
    double lg2 = std::log(2.0 * p / cfg.delta);
    Thresholds t;
    t.tau0 = 1.0 + 2.0 * std::sqrt(k * k * lg4 / n) + 2.0 * k * lg4 / n +
             2.0 * std::sqrt(lg2 / n) + 2.0 * lg2 / n;
    t.tau1 = alt_quantile(cfg.theta, l1);
    t.theta_bar = (t.tau0 - 1.0) + 4.0 * std::sqrt(l1);
    t.feasible = t.tau1 > t.tau0;
    return t;
}

Thresholds thresholds_diag(const TestConfig& cfg) {
    validate(cfg);
    double n = cfg.n, k = cfg.k, p = cfg.p;
    double l1 = std::log(1.0 / cfg.delta) / n;
    double lp = std::log(p / cfg.delta) / n;
    Thresholds t;
    t.tau0 = 1.0 + 2.0 * std::sqrt(lp) + 2.0 * lp;  // null side
    t.tau1 = alt_quantile(cfg.theta / k, l1);       // alternative side
    double denom = 1.0 - 2.0 * std::sqrt(l1);
    t.theta_bar = denom > 0.0
                      ? k * (2.0 * std::sqrt(l1) + 2.0 * std::sqrt(lp) + 2.0 * lp) / denom
                      : std::numeric_limits<double>::infinity();
    t.feasible = t.tau1 > t.tau0;
    return t;
}

double detection_lower_bound(double nu, int p, int n, int k) {
    if (!(nu > 0.0 && nu < 0.5))
        throw std::invalid_argument("detection_lower_bound: nu must lie in (0, 1/2)");
    if (p < 1 || n < 1 || k < 1)
        throw std::invalid_argument("detection_lower_bound: p, n, k must be positive");
    double inner = std::min(1.0 + 8.0 * nu * nu, 1.0 - std::log(2.0 - 4.0 * nu));
    double c = std::log(inner);
    if (!(c > 0.0))
        throw std::invalid_argument(
            "detection_lower_bound: C_nu <= 0 (the printed constant is nonpositive for "
            "nu <= 1/4), so the level is ill-defined; choose nu in (1/4, 1/2)");
    double theta = std::sqrt(static_cast<double>(k) *
                             std::log(c * p / (static_cast<double>(k) * k) + 1.0) / n);
    return std::min(theta, 1.0 / std::sqrt(2.0));
}

Thresholds sub_gaussian_thresholds(const TestConfig& cfg) {
    validate(cfg);
    if (cfg.statistic == StatName::DIAG)
        throw std::invalid_argument(
            "sub_gaussian_thresholds: no bound is provided for the diagonal statistic");
    if (cfg.theta > 1.0)
        throw std::invalid_argument(
            "sub_gaussian_thresholds: the alternative bound requires theta <= 1");
    double n = cfg.n, k = cfg.k, p = cfg.p;
    double l2 = std::log(2.0 / cfg.delta) / n;
    Thresholds t;
    t.tau1 = 1.0 + cfg.theta - 6.0 * (64.0 * l2 + 32.0 * std::sqrt(l2));
    if (cfg.statistic == StatName::LAMBDA_K) {
        double en = (k * std::log(9.0 * kE * p / k) + std::log(2.0 / cfg.delta)) / n;
        t.tau0 = 1.0 + 352.0 * (2.0 * en + std::sqrt(en));
    } else {
        double lg4 = std::log(4.0 * p * p / cfg.delta);
        t.tau0 = 1.0 + 6.0 * (64.0 * std::sqrt(k * k * lg4 / n) + 128.0 * k * lg4 / n);
    }
    t.feasible = t.tau1 > t.tau0;
    return t;
}

TestReport adversarial_test(const SymMatrix& sigma_hat, const TestConfig& cfg) {
    validate(cfg, false);
    if (sigma_hat.dim() != cfg.p)
        throw std::invalid_argument("adversarial_test: matrix dimension does not match cfg.p");

    TestReport r;
    r.config = cfg;
    switch (cfg.statistic) {
        case StatName::MDP: r.stat = mdp(sigma_hat, cfg.k); break;
        case StatName::SDP: r.stat = sdp(sigma_hat, cfg.k); break;
        case StatName::LAMBDA_K: r.stat = lambda_k_max(sigma_hat, cfg.k); break;
        case StatName::DIAG:
            throw std::invalid_argument(
                "adversarial_test: supported statistics are MDP, SDP, LAMBDA_K");
    }
    double root = std::sqrt(std::log(cfg.p / cfg.delta) / cfg.n);
    r.tau = 1.0 + cfg.k * root;
    r.decision = r.stat.value > r.tau ? 1 : 0;
    r.theta_guarantee = 2.0 * cfg.k * root;
    r.near_boundary = r.stat.value > 1.0 && r.stat.value <= r.tau;
    return r;
}

TestReport run_test(const StatValue& stat, double tau, const TestConfig& cfg) {
    if (std::isnan(stat.value)) throw std::invalid_argument("run_test: statistic value is NaN");
    if (!std::isfinite(tau)) throw std::invalid_argument("run_test: tau must be finite");
    TestReport r;
    r.config = cfg;
    r.stat = stat;
    r.tau = tau;
    r.decision = stat.value > tau ? 1 : 0;
    return r;
}

std::vector<Thresholds> bonferroni_thresholds(const TestConfig& base, const std::vector<int>& ks,
                                              Thresholds (*rule)(const TestConfig&)) {
    if (ks.empty()) throw std::invalid_argument("bonferroni_thresholds: empty sparsity set");
    std::vector<Thresholds> out;
    out.reserve(ks.size());
    TestConfig cfg = base;
    cfg.delta = base.delta / static_cast<double>(ks.size());
    for (int k : ks) {
        cfg.k = k;
        out.push_back(rule(cfg));
    }
    return out;
}

Thresholds thresholds_for(const TestConfig& cfg) {
    switch (cfg.statistic) {
        case StatName::LAMBDA_K: return thresholds_lambda(cfg);
        case StatName::SDP:
        case StatName::MDP: return thresholds_sdp(cfg);
        case StatName::DIAG: return thresholds_diag(cfg);
    }
    throw std::invalid_argument("thresholds_for: unknown statistic");
}

int lambda_k_test_decision(const SymMatrix& A, int k, double tau, int grid_size) {
    // lambda_k >= max diagonal entry (any submatrix containing the argmax).
    if (A.max_diag() > tau) return 1;
    // lambda_k <= SDP <= MDP for any symmetric input.
    if (mdp(A, k, grid_size).value <= tau) return 0;
    return lambda_k_max(A, k).value > tau ? 1 : 0;
}

}  // namespace spcd
