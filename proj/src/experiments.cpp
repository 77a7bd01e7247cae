#include "spcd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "spcd/eigen.hpp"
#include "spcd/format.hpp"

namespace spcd {

void validate(const ExperimentPlan& plan) {
    if (plan.trials < 2) throw std::invalid_argument("plan: trials must be >= 2");
    if (plan.alphas.empty()) throw std::invalid_argument("plan: alphas must be nonempty");
    for (double a : plan.alphas)
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("plan: alpha must lie in (0,1)");
    if (plan.threads < 1) throw std::invalid_argument("plan: threads must be >= 1");
    if (plan.mdp_grid < 2) throw std::invalid_argument("plan: mdp_grid must be >= 2");
    if (plan.n_max < 1) throw std::invalid_argument("plan: n_max must be >= 1");
}

double conservative_quantile(std::vector<double> draws, double alpha) {
    if (draws.empty()) throw std::invalid_argument("quantile: no draws");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("quantile: alpha in (0,1)");
    double n_alpha = static_cast<double>(draws.size()) * alpha;
    if (n_alpha < 1.0)
        throw std::invalid_argument("quantile: N*alpha < 1, insufficient resolution for alpha = " +
                                    format_g17(alpha));
    std::sort(draws.begin(), draws.end());
    std::size_t rank = static_cast<std::size_t>(
        std::ceil((1.0 - alpha) * static_cast<double>(draws.size())));
    if (rank < 1) rank = 1;
    if (rank > draws.size()) rank = draws.size();
    return draws[rank - 1];
}

namespace {

// Disjoint stream labels per (grid point, role, trial). Roles keep data,
// spike and graph draws on independent streams within one trial.
std::uint64_t trial_stream(int point, int role, int t) {
    return (static_cast<std::uint64_t>(point) << 40) |
           (static_cast<std::uint64_t>(role) << 32) | static_cast<std::uint64_t>(t);
}

double stat_on(const SymMatrix& sigma, StatName name, int k, int grid) {
    switch (name) {
        case StatName::LAMBDA_K: return lambda_k_max(sigma, k).value;
        case StatName::SDP: return sdp(sigma, k).value;
        case StatName::MDP: return mdp(sigma, k, grid).value;
        case StatName::DIAG: return diag_stat(sigma).value;
    }
    throw std::invalid_argument("unknown statistic");
}

DataMatrix draw_null_data(const ExperimentPlan& plan, int p, int n, Seed s) {
    if (plan.family) return sample_subgaussian(std::nullopt, p, n, *plan.family, s);
    return sample_null(p, n, s);
}

DataMatrix draw_alt_data(const ExperimentPlan& plan, int p, int n, int k, double theta,
                         Seed spike_seed, Seed data_seed) {
    SpikeSpec spike = random_sparse_spike(p, k, spike_seed, plan.spike_mode, theta);
    if (plan.family) return sample_subgaussian(spike, p, n, *plan.family, data_seed);
    return sample_spiked(spike, n, data_seed);
}

// N draws of the statistic per arm on fresh data. Roles: 0 null data,
// 1 alt data, 2 alt spike.
void two_arm_draws(const ExperimentPlan& plan, int point, int p, int n, int k, double theta,
                   std::vector<double>& null_draws, std::vector<double>& alt_draws) {
    int N = plan.trials;
    null_draws.assign(N, 0.0);
    alt_draws.assign(N, 0.0);
    parallel_trials(2 * N, plan.threads, [&](int idx) {
        bool alt = idx >= N;
        int t = alt ? idx - N : idx;
        DataMatrix X =
            alt ? draw_alt_data(plan, p, n, k, theta,
                                stream_seed(plan.seed, trial_stream(point, 2, t)),
                                stream_seed(plan.seed, trial_stream(point, 1, t)))
                : draw_null_data(plan, p, n, stream_seed(plan.seed, trial_stream(point, 0, t)));
        double v = stat_on(empirical_covariance(X), plan.statistic, k, plan.mdp_grid);
        (alt ? alt_draws : null_draws)[t] = v;
    });
}

void require_singleton_grid(const ExperimentPlan& plan, bool need_theta) {
    if (plan.ps.empty() || plan.ns.empty() || plan.ks.empty())
        throw std::invalid_argument("plan: p, n, k grids must be nonempty");
    if (need_theta && plan.thetas.empty())
        throw std::invalid_argument("plan: theta grid must be nonempty");
}

}  // namespace

ExperimentResult null_quantiles(const ExperimentPlan& plan) {
    validate(plan);
    require_singleton_grid(plan, false);
    int p = plan.ps[0], n = plan.ns[0], k = plan.ks[0];
    for (double a : plan.alphas)
        if (static_cast<double>(plan.trials) * a < 1.0)
            throw std::invalid_argument("plan: trials too small for alpha = " + format_g17(a));

    ExperimentResult res;
    res.null_draws.assign(plan.trials, 0.0);
    parallel_trials(plan.trials, plan.threads, [&](int t) {
        DataMatrix X = draw_null_data(plan, p, n, stream_seed(plan.seed, trial_stream(0, 0, t)));
        res.null_draws[t] = stat_on(empirical_covariance(X), plan.statistic, k, plan.mdp_grid);
    });
    for (double a : plan.alphas) res.quantiles.push_back(conservative_quantile(res.null_draws, a));
    return res;
}

ExperimentResult error_rates(const ExperimentPlan& plan, double tau) {
    validate(plan);
    require_singleton_grid(plan, true);
    if (std::isnan(tau)) throw std::invalid_argument("error_rates: tau is NaN");
    int p = plan.ps[0], n = plan.ns[0], k = plan.ks[0];
    double theta = plan.thetas[0];

    ExperimentResult res;
    two_arm_draws(plan, 0, p, n, k, theta, res.null_draws, res.alt_draws);
    int N = plan.trials;
    int rej = 0, acc = 0;
    for (double v : res.null_draws) rej += v > tau;
    for (double v : res.alt_draws) acc += v <= tau;
    res.type1 = static_cast<double>(rej) / N;
    res.type2 = static_cast<double>(acc) / N;
    return res;
}

DensityResult density_experiment(const ExperimentPlan& plan) {
    validate(plan);
    require_singleton_grid(plan, true);
    int p = plan.ps[0], n = plan.ns[0], k = plan.ks[0];
    double theta = plan.thetas[0];
    int N = plan.trials;

    DensityResult res;
    res.null_mdp.assign(N, 0.0);
    res.alt_mdp.assign(N, 0.0);
    res.null_diag.assign(N, 0.0);
    res.alt_diag.assign(N, 0.0);
    parallel_trials(2 * N, plan.threads, [&](int idx) {
        bool alt = idx >= N;
        int t = alt ? idx - N : idx;
        DataMatrix X =
            alt ? draw_alt_data(plan, p, n, k, theta,
                                stream_seed(plan.seed, trial_stream(0, 2, t)),
                                stream_seed(plan.seed, trial_stream(0, 1, t)))
                : draw_null_data(plan, p, n, stream_seed(plan.seed, trial_stream(0, 0, t)));
        SymMatrix sigma = empirical_covariance(X);  // one covariance, both statistics
        double m = mdp(sigma, k, plan.mdp_grid).value;
        double d = diag_stat(sigma).value;
        if (alt) {
            res.alt_mdp[t] = m;
            res.alt_diag[t] = d;
        } else {
            res.null_mdp[t] = m;
            res.null_diag[t] = d;
        }
    });
    return res;
}

ExperimentResult phase_transition(const ExperimentPlan& plan) {
    validate(plan);
    if (plan.ps.empty()) throw std::invalid_argument("plan: p grid must be nonempty");
    for (double a : plan.alphas)
        if (static_cast<double>(plan.trials) * a < 1.0)
            throw std::invalid_argument("plan: trials too small for alpha = " + format_g17(a));

    std::vector<double> etas = plan.etas;
    if (etas.empty()) {
        for (int i = 0; i < 12; ++i) etas.push_back(std::pow(10.0, -2.0 + 2.0 * i / 11.0));
    }

    ExperimentResult res;
    int point = 0;
    for (int p : plan.ps) {
        int k = static_cast<int>(std::floor(std::sqrt(static_cast<double>(p))));
        double lg = std::log(static_cast<double>(p) / k);
        for (int a = 1; a <= 2; ++a) {
            for (double eta : etas) {
                ++point;
                GridPoint gp;
                gp.p = p;
                gp.k = k;
                gp.theta = 1.0;
                gp.scaling_power = a;
                long long n_ll =
                    std::llround(std::pow(static_cast<double>(k), a) * lg / eta);
                if (n_ll < 1) n_ll = 1;
                if (n_ll > plan.n_max) {
                    gp.n = -1;
                    gp.eta_star = k * lg / static_cast<double>(n_ll);
                    gp.eta_circ = static_cast<double>(k) * k * lg / static_cast<double>(n_ll);
                    gp.skipped = true;
                    gp.note = "n = " + std::to_string(n_ll) + " exceeds n_max = " +
                              std::to_string(plan.n_max);
                    gp.p2.assign(plan.alphas.size(), std::numeric_limits<double>::quiet_NaN());
                    res.warnings.push_back("skipped p=" + std::to_string(p) + " a=" +
                                           std::to_string(a) + " eta=" + format_g17(eta) + ": " +
                                           gp.note);
                    res.grid.push_back(std::move(gp));
                    continue;
                }
                int n = static_cast<int>(n_ll);
                gp.n = n;
                gp.eta_star = k * lg / n;
                gp.eta_circ = static_cast<double>(k) * k * lg / n;

                std::vector<double> null_draws, alt_draws;
                two_arm_draws(plan, point, p, n, k, 1.0, null_draws, alt_draws);
                for (double alpha : plan.alphas) {
                    double q = conservative_quantile(null_draws, alpha);
                    int acc = 0;
                    for (double v : alt_draws) acc += v <= q;
                    gp.p2.push_back(static_cast<double>(acc) / plan.trials);
                }
                res.grid.push_back(std::move(gp));
            }
        }
    }
    return res;
}

double crossing_eta(const std::vector<std::pair<double, double>>& curve) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (curve.size() < 2) return nan;
    int istar = -1;
    for (std::size_t i = 0; i < curve.size(); ++i)
        if (curve[i].second <= 0.5) istar = static_cast<int>(i);
    if (istar < 0 || istar + 1 >= static_cast<int>(curve.size())) return nan;
    double e0 = curve[istar].first, p0 = curve[istar].second;
    double e1 = curve[istar + 1].first, p1 = curve[istar + 1].second;
    if (!(p1 > 0.5)) return nan;
    double t = (0.5 - p0) / (p1 - p0);
    return std::exp(std::log(e0) + t * (std::log(e1) - std::log(e0)));
}

AffinityResult lr_affinity_check(int p, int k, double theta, int r, long long trials, Seed seed) {
    if (k < 1 || k > p) throw std::invalid_argument("lr_affinity_check: need 1 <= k <= p");
    if (r < 0 || r > k) throw std::invalid_argument("lr_affinity_check: need 0 <= r <= k");
    if (2 * k - r > p)
        throw std::invalid_argument("lr_affinity_check: need p >= 2k - r to fit both supports");
    if (!(theta > 0.0 && theta < 0.5))
        throw std::invalid_argument("lr_affinity_check: theta must lie in (0, 1/2)");
    if (trials < 2) throw std::invalid_argument("lr_affinity_check: trials must be >= 2");

    // S = {0..k-1}, T = {0..r-1} u {k..2k-r-1}; only the 2k-r coordinates in
    // S u T enter the two projections X^T u(S), X^T u(T).
    int m = 2 * k - r;
    double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));
    double c = 0.5 * theta / (1.0 + theta);
    double w0 = 1.0 / (1.0 + theta);  // (1+theta)^{-1/2} squared, two factors

    Rng rng(Seed{seed.master, seed.stream ^ 0x5cafeULL});
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> g(m);
    for (long long i = 0; i < trials; ++i) {
        for (double& x : g) x = rng.gaussian();
        double a = 0.0, b = 0.0;
        for (int j = 0; j < k; ++j) a += g[j];
        for (int j = 0; j < r; ++j) b += g[j];
        for (int j = k; j < m; ++j) b += g[j];
        a *= inv_sqrt_k;
        b *= inv_sqrt_k;
        double w = w0 * std::exp(c * (a * a + b * b));
        sum += w;
        sumsq += w * w;
    }
    AffinityResult res;
    res.trials = trials;
    res.mc_estimate = sum / static_cast<double>(trials);
    double var = (sumsq - static_cast<double>(trials) * res.mc_estimate * res.mc_estimate) /
                 static_cast<double>(trials - 1);
    res.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(trials));
    double rho = static_cast<double>(r) / k;
    res.closed_form = 1.0 / std::sqrt(1.0 - theta * theta * rho * rho);
    return res;
}

EdgeResult mp_edge_check(int p, int n, int trials, Seed seed) {
    if (p < 1 || n < 1 || trials < 1)
        throw std::invalid_argument("mp_edge_check: need p, n, trials >= 1");
    EdgeResult res;
    res.draws.assign(trials, 0.0);
    for (int t = 0; t < trials; ++t) {
        Seed s = stream_seed(seed.master, seed.stream ^ trial_stream(0, 0, t));
        SymMatrix sigma = empirical_covariance(sample_null(p, n, s));
        res.draws[t] = largest_eigenvalue(sigma, 1e-8).value;
    }
    res.mean_lambda_max =
        std::accumulate(res.draws.begin(), res.draws.end(), 0.0) / res.draws.size();
    double root = std::sqrt(static_cast<double>(p) / n);
    res.predicted_edge = (1.0 + root) * (1.0 + root);
    return res;
}

CliqueReport clique_detection_experiment(int n, int k, int trials, double delta, Seed seed,
                                         int threads, int mdp_grid) {
    if (n < 1 || k < 0 || k > n)
        throw std::invalid_argument("clique_detection_experiment: need 0 <= k <= n");
    if (trials < 2) throw std::invalid_argument("clique_detection_experiment: trials >= 2");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("clique_detection_experiment: delta in (0,1)");
    if (static_cast<double>(trials) * delta < 1.0)
        throw std::invalid_argument("clique_detection_experiment: trials too small for delta");

    CliqueReport rep;
    rep.n = n;
    rep.k = k;
    rep.trials = trials;
    rep.delta = delta;
    rep.sdp_used = n <= kSdpDimBudget;
    if (k < 14 || k % 2 != 0)
        rep.warnings.push_back(
            "the theoretical floor is quoted outside its validity range (requires k >= 14 and "
            "even)");
    rep.lemma_floor = 1.0 + static_cast<double>(k) * k / (4.0 * M_PI * n) -
                      3.0 * std::sqrt(k * std::log(2.0 / delta) / n);

    rep.planted_draws.assign(trials, 0.0);
    rep.null_draws.assign(trials, 0.0);
    rep.gauss_draws.assign(trials, 0.0);
    if (rep.sdp_used) {
        rep.planted_sdp.assign(trials, 0.0);
        rep.null_sdp.assign(trials, 0.0);
    }

    // Roles: 0/1 planted graph+reduction, 2/3 null graph+reduction,
    // 4 Gaussian arm.
    auto tseed = [&](int role, int t) {
        return stream_seed(seed.master, seed.stream ^ trial_stream(0, role, t));
    };
    parallel_trials(3 * trials, threads, [&](int idx) {
        int arm = idx / trials;
        int t = idx % trials;
        SymMatrix sigma;
        if (arm == 2) {
            sigma = empirical_covariance(sample_null(n, n, tseed(4, t)));
        } else {
            int kk = arm == 0 ? k : 0;
            GraphSample g = planted_clique_graph(n, kk, tseed(arm == 0 ? 0 : 2, t));
            sigma = empirical_covariance(clique_reduction(g, tseed(arm == 0 ? 1 : 3, t)));
        }
        double v = mdp(sigma, std::max(k, 1), mdp_grid).value;
        if (arm == 0) {
            rep.planted_draws[t] = v;
            if (rep.sdp_used) rep.planted_sdp[t] = sdp(sigma, std::max(k, 1)).value;
        } else if (arm == 1) {
            rep.null_draws[t] = v;
            if (rep.sdp_used) rep.null_sdp[t] = sdp(sigma, std::max(k, 1)).value;
        } else {
            rep.gauss_draws[t] = v;
        }
    });

    rep.null_quantile = conservative_quantile(rep.null_draws, delta);
    int above = 0;
    for (double v : rep.planted_draws) above += v > rep.null_quantile;
    rep.power = static_cast<double>(above) / trials;
    rep.planted_mean = std::accumulate(rep.planted_draws.begin(), rep.planted_draws.end(), 0.0) /
                       trials;
    rep.null_mean =
        std::accumulate(rep.null_draws.begin(), rep.null_draws.end(), 0.0) / trials;
    WelchResult w = welch_one_sided(rep.planted_draws, rep.null_draws);
    rep.welch_t = w.t;
    rep.welch_p = w.p_one_sided;
    rep.ks_stat = ks_two_sample(rep.null_draws, rep.gauss_draws);
    rep.ks_crit_1pct = ks_critical(0.01, rep.null_draws.size(), rep.gauss_draws.size());
    return rep;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

WelchResult welch_one_sided(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("welch_one_sided: need >= 2 draws per arm");
    auto moments = [](const std::vector<double>& v) {
        double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double s2 = 0.0;
        for (double x : v) s2 += (x - m) * (x - m);
        s2 /= static_cast<double>(v.size() - 1);
        return std::pair<double, double>{m, s2};
    };
    auto [ma, va] = moments(a);
    auto [mb, vb] = moments(b);
    double sa = va / a.size(), sb = vb / b.size();
    WelchResult res;
    double denom = std::sqrt(sa + sb);
    res.t = denom > 0.0 ? (ma - mb) / denom : 0.0;
    double num = (sa + sb) * (sa + sb);
    double den = sa * sa / (a.size() - 1) + sb * sb / (b.size() - 1);
    res.df = den > 0.0 ? num / den : static_cast<double>(a.size() + b.size() - 2);
    res.p_one_sided = 1.0 - normal_cdf(res.t);  // normal approximation to the t tail
    return res;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / a.size() -
                                  static_cast<double>(j) / b.size()));
    }
    return d;
}

double ks_critical(double alpha, std::size_t m, std::size_t n) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ks_critical: alpha in (0,1)");
    if (m == 0 || n == 0) throw std::invalid_argument("ks_critical: empty sample");
    double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
    return c * std::sqrt(static_cast<double>(m + n) / (static_cast<double>(m) * n));
}

Histogram fd_histogram(const std::vector<double>& draws, int bins) {
    if (draws.size() < 2) throw std::invalid_argument("fd_histogram: need >= 2 draws");
    if (bins < 1) throw std::invalid_argument("fd_histogram: bins >= 1");
    std::vector<double> s = draws;
    std::sort(s.begin(), s.end());
    auto quant = [&](double q) {
        double pos = q * static_cast<double>(s.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        double frac = pos - static_cast<double>(lo);
        return lo + 1 < s.size() ? s[lo] * (1.0 - frac) + s[lo + 1] * frac : s[lo];
    };
    double iqr = quant(0.75) - quant(0.25);
    double fd = 2.0 * iqr / std::cbrt(static_cast<double>(s.size()));
    double range = s.back() - s.front();

    Histogram h;
    h.lo = s.front();
    h.width = std::max({fd, range / bins, 1e-300});
    h.counts.assign(bins, 0);
    for (double x : s) {
        int b = static_cast<int>((x - h.lo) / h.width);
        if (b >= bins) b = bins - 1;
        if (b < 0) b = 0;
        ++h.counts[b];
    }
    return h;
}

void parallel_trials(int count, int threads, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int t = 0; t < count; ++t) fn(t);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    std::exception_ptr err;
    auto worker = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            int t = next.fetch_add(1, std::memory_order_relaxed);
            if (t >= count) return;
            try {
                fn(t);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

std::string trials_csv(const std::vector<std::pair<std::string, const std::vector<double>*>>& arms,
                       StatName statistic) {
    std::string out = "trial_id,hypothesis,statistic,value\n";
    std::string stat = to_string(statistic);
    for (const auto& [label, draws] : arms) {
        for (std::size_t t = 0; t < draws->size(); ++t) {
            out += std::to_string(t);
            out += ',';
            out += label;
            out += ',';
            out += stat;
            out += ',';
            out += format_g17((*draws)[t]);
            out += '\n';
        }
    }
    return out;
}

std::string grid_csv(const std::vector<GridPoint>& grid, const std::vector<double>& alphas) {
    std::string out = "p,n,k,scaling_power,eta_star,eta_circ,skipped";
    for (double a : alphas) {
        char buf[32];
        std::snprintf(buf, sizeof buf, ",p2_%g", a);
        out += buf;
    }
    out += '\n';
    for (const GridPoint& gp : grid) {
        out += std::to_string(gp.p) + ',' + std::to_string(gp.n) + ',' + std::to_string(gp.k) +
               ',' + std::to_string(gp.scaling_power) + ',' + format_g17(gp.eta_star) + ',' +
               format_g17(gp.eta_circ) + ',' + (gp.skipped ? '1' : '0');
        for (double v : gp.p2) {
            out += ',';
            out += std::isnan(v) ? std::string("nan") : format_g17(v);
        }
        out += '\n';
    }
    return out;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        out += format_g17(h.lo + h.width * static_cast<double>(b));
        out += ',';
        out += format_g17(h.lo + h.width * static_cast<double>(b + 1));
        out += ',';
        out += std::to_string(h.counts[b]);
        out += '\n';
    }
    return out;
}

std::string svg_curve_plot(const std::string& title, const std::string& x_label,
                           const std::vector<SvgSeries>& series, bool log_x) {
    const double W = 720, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymax = 0.0;
    for (const SvgSeries& s : series)
        for (const auto& [x, y] : s.points) {
            if (log_x && !(x > 0)) continue;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymax = std::max(ymax, y);
        }
    if (!(xmin < xmax)) {
        xmin = log_x ? 0.01 : 0.0;
        xmax = 1.0;
    }
    if (!(ymax > 0.0)) ymax = 1.0;
    double lx0 = log_x ? std::log10(xmin) : xmin;
    double lx1 = log_x ? std::log10(xmax) : xmax;
    auto X = [&](double x) {
        double u = log_x ? std::log10(x) : x;
        return ml + (u - lx0) / (lx1 - lx0) * (W - ml - mr);
    };
    auto Y = [&](double y) { return H - mb - y / ymax * (H - mt - mb); };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    const char* colors[] = {"#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#16a085"};

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 720 480\" "
         "font-family=\"sans-serif\" font-size=\"13\">\n";
    s += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
    s += "<text x=\"360\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + title +
         "</text>\n";
    // axes
    s += "<line x1=\"" + num(ml) + "\" y1=\"" + num(H - mb) + "\" x2=\"" + num(W - mr) +
         "\" y2=\"" + num(H - mb) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) + "\" y2=\"" +
         num(H - mb) + "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double y = ymax * i / 4.0;
        s += "<line x1=\"" + num(ml - 4) + "\" y1=\"" + num(Y(y)) + "\" x2=\"" + num(ml) +
             "\" y2=\"" + num(Y(y)) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(Y(y) + 4) +
             "\" text-anchor=\"end\">" + num(y) + "</text>\n";
    }
    if (log_x) {
        for (int e = static_cast<int>(std::ceil(lx0)); e <= static_cast<int>(std::floor(lx1));
             ++e) {
            double x = std::pow(10.0, e);
            s += "<line x1=\"" + num(X(x)) + "\" y1=\"" + num(H - mb) + "\" x2=\"" + num(X(x)) +
                 "\" y2=\"" + num(H - mb + 4) + "\" stroke=\"black\"/>\n";
            s += "<text x=\"" + num(X(x)) + "\" y=\"" + num(H - mb + 18) +
                 "\" text-anchor=\"middle\">1e" + std::to_string(e) + "</text>\n";
        }
    } else {
        for (int i = 0; i <= 4; ++i) {
            double x = xmin + (xmax - xmin) * i / 4.0;
            s += "<line x1=\"" + num(X(x)) + "\" y1=\"" + num(H - mb) + "\" x2=\"" + num(X(x)) +
                 "\" y2=\"" + num(H - mb + 4) + "\" stroke=\"black\"/>\n";
            s += "<text x=\"" + num(X(x)) + "\" y=\"" + num(H - mb + 18) +
                 "\" text-anchor=\"middle\">" + num(x) + "</text>\n";
        }
    }
    s += "<text x=\"" + num((ml + W - mr) / 2) + "\" y=\"" + num(H - 14) +
         "\" text-anchor=\"middle\">" + x_label + "</text>\n";
    if (ymax >= 0.5)
        s += "<line x1=\"" + num(ml) + "\" y1=\"" + num(Y(0.5)) + "\" x2=\"" + num(W - mr) +
             "\" y2=\"" + num(Y(0.5)) + "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4,4\"/>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const SvgSeries& ser = series[si];
        const char* color = colors[si % 6];
        std::string pts;
        for (const auto& [x, y] : ser.points)
            if (!log_x || x > 0) pts += num(X(x)) + "," + num(Y(y)) + " ";
        s += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
        double ly = mt + 16.0 * static_cast<double>(si);
        s += "<line x1=\"" + num(W - mr - 150) + "\" y1=\"" + num(ly) + "\" x2=\"" +
             num(W - mr - 126) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + num(W - mr - 120) + "\" y=\"" + num(ly + 4) + "\">" + ser.label +
             "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace spcd
