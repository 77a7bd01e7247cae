// Command-line frontend. Thin shell over the library: parses flags, wires
// seeds, prints machine-readable JSON (17 significant digits everywhere) and
// writes CSV/SVG artifacts. All randomness flows from --seed through fixed
// stream labels, so reruns are byte-identical regardless of --threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spcd/detect.hpp"
#include "spcd/eigen.hpp"
#include "spcd/experiments.hpp"
#include "spcd/format.hpp"
#include "spcd/json_writer.hpp"
#include "spcd/models.hpp"
#include "spcd/rng.hpp"
#include "spcd/stats.hpp"
#include "spcd/sym_matrix.hpp"

namespace {

using namespace spcd;

// Stream labels for the CLI's top-level draws. Data and the spike direction
// get independent streams so --exact-cov and sampled runs agree on the spike.
constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kSpikeStream = 1;
constexpr std::uint64_t kAuxStream = 2;

struct CommonOpts {
    std::uint64_t seed = 12345;
    int threads = std::max(1u, std::thread::hardware_concurrency());
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--seed", c.seed, "Master seed; every draw derives from it")
        ->capture_default_str();
    cmd->add_option("--threads", c.threads, "Worker threads (results identical at any count)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out-dir", c.out_dir, "Directory for output files")->capture_default_str();
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir + "/" + name;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty() && dir != ".") std::filesystem::create_directories(dir);
}

// ---- key=value lists ----------------------------------------------------

class KvArgs {
  public:
    KvArgs(const std::string& text, const std::string& ctx,
           std::initializer_list<const char*> allowed)
        : ctx_(ctx) {
        std::stringstream ss(text);
        std::string token;
        while (std::getline(ss, token, ',')) {
            auto eq = token.find('=');
            if (eq == std::string::npos || eq == 0)
                throw std::invalid_argument(ctx_ + ": expected key=value, got '" + token + "'");
            m_[token.substr(0, eq)] = token.substr(eq + 1);
        }
        if (m_.empty()) throw std::invalid_argument(ctx_ + ": empty parameter list");
        for (const auto& [k, v] : m_) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) throw std::invalid_argument(ctx_ + ": unknown key '" + k + "'");
        }
    }

    bool has(const std::string& k) const { return m_.count(k) > 0; }

    long long get_int(const std::string& k) const {
        require(k);
        return to_int(k, m_.at(k));
    }
    long long get_int(const std::string& k, long long dflt) const {
        return has(k) ? to_int(k, m_.at(k)) : dflt;
    }
    double get_num(const std::string& k) const {
        require(k);
        return to_num(k, m_.at(k));
    }
    double get_num(const std::string& k, double dflt) const {
        return has(k) ? to_num(k, m_.at(k)) : dflt;
    }
    std::string get_str(const std::string& k, const std::string& dflt) const {
        return has(k) ? m_.at(k) : dflt;
    }

  private:
    void require(const std::string& k) const {
        if (!has(k)) throw std::invalid_argument(ctx_ + ": missing required key '" + k + "'");
    }
    long long to_int(const std::string& k, const std::string& v) const {
        std::size_t pos = 0;
        long long r = 0;
        try {
            r = std::stoll(v, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != v.size())
            throw std::invalid_argument(ctx_ + ": '" + k + "' must be an integer, got '" + v +
                                        "'");
        return r;
    }
    double to_num(const std::string& k, const std::string& v) const {
        std::size_t pos = 0;
        double r = 0;
        try {
            r = std::stod(v, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != v.size())
            throw std::invalid_argument(ctx_ + ": '" + k + "' must be a number, got '" + v + "'");
        return r;
    }

    std::map<std::string, std::string> m_;
    std::string ctx_;
};

SpikeMode mode_from(const std::string& s) {
    if (s == "fixed") return SpikeMode::FIXED_SUPPORT;
    if (s == "random") return SpikeMode::RANDOM_SUPPORT;
    if (s == "kgrid") return SpikeMode::UNIFORM_KGRID;
    throw std::invalid_argument("unknown support mode '" + s + "' (fixed|random|kgrid)");
}

SubGaussianFamily family_from(const std::string& s) {
    if (s == "rademacher") return SubGaussianFamily::RADEMACHER;
    if (s == "uniform") return SubGaussianFamily::UNIFORM;
    throw std::invalid_argument("unknown family '" + s + "' (rademacher|uniform)");
}

// ---- generative model shared by stat/test/generate ----------------------

struct ModelFlags {
    int identity = 0;
    std::string matrix_file, null_kv, spiked_kv;
    bool exact_cov = false;
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf, bool with_identity) {
    if (with_identity)
        cmd->add_option("--identity", mf.identity, "Use the p x p identity matrix");
    cmd->add_option("--matrix", mf.matrix_file, "Read a symmetric matrix from a text file");
    cmd->add_option("--null", mf.null_kv, "Null model: p=..,n=..[,family=rademacher|uniform]");
    cmd->add_option("--spiked", mf.spiked_kv,
                    "Spiked model: p=..,k=..[,theta=..,n=..,support=fixed|random|kgrid,family=..]");
    cmd->add_flag("--exact-cov", mf.exact_cov,
                  "Use the population covariance instead of sampling data");
}

struct ResolvedModel {
    std::string kind;  // identity | matrix | null | spiked
    int p = 0, n = 0, k = 0;
    double theta = 0.0;
    std::string support_mode = "fixed";
    std::string family;  // empty = Gaussian
    bool exact_cov = false;
    std::string matrix_file;
    std::optional<SpikeSpec> spike;
    std::optional<SymMatrix> matrix;
};

ResolvedModel resolve_model(const ModelFlags& mf, std::uint64_t seed) {
    int sources = (mf.identity != 0) + !mf.matrix_file.empty() + !mf.null_kv.empty() +
                  !mf.spiked_kv.empty();
    if (sources != 1)
        throw std::invalid_argument(
            "exactly one of --identity / --matrix / --null / --spiked is required");

    ResolvedModel m;
    m.exact_cov = mf.exact_cov;
    if (mf.identity != 0) {
        if (mf.identity < 1) throw std::invalid_argument("--identity: p must be >= 1");
        m.kind = "identity";
        m.p = mf.identity;
    } else if (!mf.matrix_file.empty()) {
        m.kind = "matrix";
        m.matrix_file = mf.matrix_file;
        m.matrix = read_matrix_file(mf.matrix_file);
        m.p = m.matrix->dim();
        if (m.exact_cov) throw std::invalid_argument("--exact-cov needs a generative model");
    } else if (!mf.null_kv.empty()) {
        KvArgs a(mf.null_kv, "--null", {"p", "n", "family"});
        m.kind = "null";
        m.p = static_cast<int>(a.get_int("p"));
        m.n = static_cast<int>(a.get_int("n", 0));
        m.family = a.get_str("family", "");
    } else {
        KvArgs a(mf.spiked_kv, "--spiked", {"p", "n", "k", "theta", "support", "family"});
        m.kind = "spiked";
        m.p = static_cast<int>(a.get_int("p"));
        m.k = static_cast<int>(a.get_int("k"));
        m.theta = a.get_num("theta", 1.0);
        m.n = static_cast<int>(a.get_int("n", 0));
        m.support_mode = a.get_str("support", "fixed");
        m.family = a.get_str("family", "");
        m.spike = random_sparse_spike(m.p, m.k, stream_seed(seed, kSpikeStream),
                                      mode_from(m.support_mode), m.theta);
    }
    if (!m.family.empty()) family_from(m.family);  // validate early
    if (!m.exact_cov && (m.kind == "null" || m.kind == "spiked") && m.n <= 0)
        throw std::invalid_argument(m.kind == "null"
                                        ? "--null: n=.. is required (or pass --exact-cov)"
                                        : "--spiked: n=.. is required (or pass --exact-cov)");
    return m;
}

DataMatrix model_data(const ResolvedModel& m, std::uint64_t seed) {
    Seed s = stream_seed(seed, kDataStream);
    if (m.kind == "null") {
        if (m.family.empty()) return sample_null(m.p, m.n, s);
        return sample_subgaussian(std::nullopt, m.p, m.n, family_from(m.family), s);
    }
    if (m.kind == "spiked") {
        if (m.family.empty()) return sample_spiked(*m.spike, m.n, s);
        return sample_subgaussian(m.spike, m.p, m.n, family_from(m.family), s);
    }
    throw std::invalid_argument("model '" + m.kind + "' cannot generate data");
}

SymMatrix model_covariance(const ResolvedModel& m, std::uint64_t seed) {
    if (m.kind == "identity") return SymMatrix::identity(m.p);
    if (m.kind == "matrix") return *m.matrix;
    if (m.exact_cov) {
        SymMatrix S = SymMatrix::identity(m.p);
        if (m.kind == "spiked") {
            std::vector<double> v = full_vector(*m.spike);
            for (int i = 0; i < m.p; ++i)
                for (int j = i; j < m.p; ++j) S.add(i, j, m.spike->theta * v[i] * v[j]);
        }
        return S;
    }
    return empirical_covariance(model_data(m, seed));
}

// ---- JSON plumbing -------------------------------------------------------

void emit_header(JsonWriter& w, const std::string& command, const CommonOpts& c) {
    w.kv("schema", 1);
    w.kv("tool", std::string("spcd"));
    w.kv("version", std::string(kToolVersion));
    w.kv("command", command);
    w.kv("seed", static_cast<unsigned long long>(c.seed));
    w.kv("threads", c.threads);
}

void echo_model(JsonWriter& w, const ResolvedModel& m) {
    w.key("model");
    w.begin_object();
    w.kv("kind", m.kind);
    if (m.kind == "matrix") w.kv("file", m.matrix_file);
    w.kv("p", m.p);
    if (m.n > 0) w.kv("n", m.n);
    if (m.kind == "spiked") {
        w.kv("k", m.k);
        w.kv("theta", m.theta);
        w.kv("support_mode", m.support_mode);
        w.key("support");
        w.begin_array();
        for (int i : m.spike->support) w.value(i);
        w.end_array();
    }
    if (!m.family.empty()) w.kv("family", m.family);
    w.kv("exact_cov", m.exact_cov);
    w.end_object();
}

void emit_stat_fields(JsonWriter& w, const StatValue& s) {
    w.kv("statistic", to_string(s.name));
    w.kv("value", s.value);
    if (s.support) {
        w.key("support");
        w.begin_array();
        for (int i : *s.support) w.value(i);
        w.end_array();
    }
    double nan = std::numeric_limits<double>::quiet_NaN();
    w.kv("z_star", s.z_star ? *s.z_star : nan);
    w.kv("lower", s.lower_cert ? *s.lower_cert : nan);
    w.kv("upper", s.upper_cert ? *s.upper_cert : nan);
    w.kv("iterations", s.iterations);
}

void emit_strings(JsonWriter& w, const std::string& key, const std::vector<std::string>& xs) {
    w.key(key);
    w.begin_array();
    for (const std::string& x : xs) w.value(x);
    w.end_array();
}

void print_json(const JsonWriter& w) { std::cout << w.str() << "\n"; }

StatValue compute_stat(const SymMatrix& A, StatName s, int k, double eps, int grid) {
    switch (s) {
        case StatName::LAMBDA_K:
            return lambda_k_max(A, k);
        case StatName::SDP: {
            SdpSolverConfig cfg;
            cfg.eps = eps;
            return sdp(A, k, cfg);
        }
        case StatName::MDP:
            return mdp(A, k, grid);
        case StatName::DIAG:
            return diag_stat(A);
    }
    throw std::invalid_argument("unknown statistic");
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// ---- stat ----------------------------------------------------------------

struct StatOpts {
    ModelFlags mf;
    std::string stat = "mdp";
    int k = 0;
    double eps = 1e-3;
    int grid = 512;
};

int cmd_stat(const CommonOpts& c, const StatOpts& o) {
    ResolvedModel m = resolve_model(o.mf, c.seed);
    StatName s = stat_from_string(o.stat);
    if (s != StatName::DIAG && o.k < 1)
        throw std::invalid_argument("--k >= 1 is required for --stat " + to_string(s));
    SymMatrix A = model_covariance(m, c.seed);

    JsonWriter w;
    w.begin_object();
    emit_header(w, "stat", c);
    w.key("config");
    w.begin_object();
    w.kv("statistic", to_string(s));
    w.kv("k", o.k);
    w.kv("eps", o.eps);
    w.kv("grid", o.grid);
    echo_model(w, m);
    w.end_object();
    try {
        StatValue v = compute_stat(A, s, o.k, o.eps, o.grid);
        w.key("result");
        w.begin_object();
        emit_stat_fields(w, v);
        w.end_object();
        w.end_object();
        print_json(w);
        return 0;
    } catch (const SolverError& e) {
        w.key("result");
        w.begin_object();
        w.kv("statistic", to_string(s));
        w.kv("error", std::string(e.what()));
        w.kv("lower", e.lower());
        w.kv("upper", e.upper());
        w.end_object();
        w.end_object();
        print_json(w);
        return 3;
    }
}

// ---- test ----------------------------------------------------------------

struct TestOpts {
    ModelFlags mf;
    std::string stat = "mdp";
    int k = 0;
    int n = 0;  // for --matrix / --identity sources
    double delta = 0.05;
    double theta = 1.0;
    bool theta_given = false;
    std::string rule = "auto";
    double tau = 0.0;
    bool tau_given = false;
    double eps = 1e-3;
    int grid = 512;
};

int cmd_test(const CommonOpts& c, const TestOpts& o) {
    ResolvedModel m = resolve_model(o.mf, c.seed);
    TestConfig cfg;
    cfg.p = m.p;
    cfg.n = m.n > 0 ? m.n : o.n;
    cfg.k = o.k > 0 ? o.k : m.k;
    cfg.delta = o.delta;
    cfg.theta = (m.kind == "spiked" && !o.theta_given) ? m.theta : o.theta;
    cfg.statistic = stat_from_string(o.stat);
    if (cfg.n <= 0)
        throw std::invalid_argument("sample size is required (--n, or n=.. in the model flags)");
    if (cfg.k <= 0) throw std::invalid_argument("--k >= 1 is required");

    SymMatrix A = model_covariance(m, c.seed);

    JsonWriter w;
    w.begin_object();
    emit_header(w, "test", c);
    w.key("config");
    w.begin_object();
    w.kv("statistic", to_string(cfg.statistic));
    w.kv("p", cfg.p);
    w.kv("n", cfg.n);
    w.kv("k", cfg.k);
    w.kv("delta", cfg.delta);
    w.kv("theta", cfg.theta);
    w.kv("tau_rule", o.rule);
    w.kv("eps", o.eps);
    w.kv("grid", o.grid);
    echo_model(w, m);
    w.end_object();

    try {
        TestReport rep;
        bool have_th = false;
        Thresholds th;
        if (o.rule == "adversarial") {
            rep = adversarial_test(A, cfg);
        } else {
            double tau;
            if (o.rule == "fixed") {
                if (!o.tau_given)
                    throw std::invalid_argument("--tau is required with --tau-rule fixed");
                tau = o.tau;
            } else if (o.rule == "auto" || o.rule == "lambda" || o.rule == "sdp" ||
                       o.rule == "diag") {
                th = o.rule == "auto"     ? thresholds_for(cfg)
                     : o.rule == "lambda" ? thresholds_lambda(cfg)
                     : o.rule == "sdp"    ? thresholds_sdp(cfg)
                                          : thresholds_diag(cfg);
                have_th = true;
                tau = th.null_bound();
            } else {
                throw std::invalid_argument("unknown --tau-rule '" + o.rule +
                                            "' (auto|lambda|sdp|diag|adversarial|fixed)");
            }
            StatValue v = compute_stat(A, cfg.statistic, cfg.k, o.eps, o.grid);
            rep = run_test(v, tau, cfg);
        }
        if (have_th) {
            w.key("thresholds");
            w.begin_object();
            w.kv("tau0", th.tau0);
            w.kv("tau1", th.tau1);
            w.kv("theta_bar", th.theta_bar);
            w.kv("feasible", th.feasible);
            w.end_object();
        }
        w.key("result");
        w.begin_object();
        emit_stat_fields(w, rep.stat);
        w.kv("tau", rep.tau);
        w.kv("decision", rep.decision);
        w.kv("theta_guarantee", rep.theta_guarantee);
        w.kv("near_boundary", rep.near_boundary);
        w.end_object();
        w.end_object();
        print_json(w);
        return 0;  // the decision is data, not a status code
    } catch (const SolverError& e) {
        w.key("result");
        w.begin_object();
        w.kv("error", std::string(e.what()));
        w.kv("lower", e.lower());
        w.kv("upper", e.upper());
        w.end_object();
        w.end_object();
        print_json(w);
        return 3;
    }
}

// ---- experiment figure1 (statistic densities under H0/H1) ----------------

struct Fig1Opts {
    int p = 500, n = 200, k = 30;
    double theta = 4.0;
    int trials = 200;
    int grid = 512;
    bool full = false;
    bool plot = false;
};

std::vector<std::pair<double, double>> hist_curve(const std::vector<double>& draws) {
    Histogram h = fd_histogram(draws);
    std::vector<std::pair<double, double>> pts;
    double n = static_cast<double>(draws.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        pts.push_back({h.lo + h.width * (static_cast<double>(b) + 0.5),
                       static_cast<double>(h.counts[b]) / (n * h.width)});
    return pts;
}

int cmd_figure1(const CommonOpts& c, const Fig1Opts& o) {
    ExperimentPlan plan;
    plan.statistic = StatName::MDP;
    plan.trials = o.full ? 1000 : o.trials;
    plan.seed = c.seed;
    plan.threads = c.threads;
    plan.ps = {o.p};
    plan.ns = {o.n};
    plan.ks = {o.k};
    plan.thetas = {o.theta};
    plan.mdp_grid = o.grid;
    DensityResult r = density_experiment(plan);

    ensure_dir(c.out_dir);
    std::vector<std::pair<std::string, std::string>> files;
    auto put = [&](const std::string& name, const std::string& content) {
        std::string path = join_path(c.out_dir, name);
        write_file(path, content);
        files.push_back({name, path});
    };
    put("fig1_trials_mdp.csv",
        trials_csv({{"H0", &r.null_mdp}, {"H1", &r.alt_mdp}}, StatName::MDP));
    put("fig1_trials_diag.csv",
        trials_csv({{"H0", &r.null_diag}, {"H1", &r.alt_diag}}, StatName::DIAG));
    put("fig1_hist_mdp_null.csv", histogram_csv(fd_histogram(r.null_mdp)));
    put("fig1_hist_mdp_alt.csv", histogram_csv(fd_histogram(r.alt_mdp)));
    put("fig1_hist_diag_null.csv", histogram_csv(fd_histogram(r.null_diag)));
    put("fig1_hist_diag_alt.csv", histogram_csv(fd_histogram(r.alt_diag)));
    if (o.plot) {
        put("fig1_mdp.svg",
            svg_curve_plot("thresholded statistic under H0 / H1", "statistic value",
                           {{"H0", hist_curve(r.null_mdp)}, {"H1", hist_curve(r.alt_mdp)}},
                           false));
        put("fig1_diag.svg",
            svg_curve_plot("max diagonal under H0 / H1", "statistic value",
                           {{"H0", hist_curve(r.null_diag)}, {"H1", hist_curve(r.alt_diag)}},
                           false));
    }

    double N = static_cast<double>(plan.trials);
    auto summary_block = [&](JsonWriter& w, const char* key, const std::vector<double>& null_d,
                             const std::vector<double>& alt_d) {
        double q95 = conservative_quantile(null_d, 0.05);
        int below = 0;
        for (double v : alt_d) below += v <= q95;
        w.key(key);
        w.begin_object();
        w.kv("null_q95", q95);
        w.kv("alt_below_null_q95", static_cast<double>(below) / N);
        w.kv("null_mean", mean_of(null_d));
        w.kv("alt_mean", mean_of(alt_d));
        w.end_object();
    };

    JsonWriter w;
    w.begin_object();
    emit_header(w, "experiment figure1", c);
    w.key("config");
    w.begin_object();
    w.kv("p", o.p);
    w.kv("n", o.n);
    w.kv("k", o.k);
    w.kv("theta", o.theta);
    w.kv("trials", plan.trials);
    w.kv("grid", o.grid);
    w.kv("full", o.full);
    w.end_object();
    w.key("result");
    w.begin_object();
    summary_block(w, "mdp", r.null_mdp, r.alt_mdp);
    summary_block(w, "diag", r.null_diag, r.alt_diag);
    w.end_object();
    emit_strings(w, "warnings", r.warnings);
    w.key("files");
    w.begin_object();
    for (const auto& [name, path] : files) w.kv(name, path);
    w.end_object();
    w.end_object();
    write_file(join_path(c.out_dir, "fig1_summary.json"), w.str() + "\n");
    print_json(w);
    return 0;
}

// ---- experiment figure2 (phase transition sweep) --------------------------

struct Fig2Opts {
    std::vector<int> ps = {50, 100};
    int trials = 200;
    std::vector<double> alphas = {0.05};
    std::vector<double> etas;
    double theta = 1.0;
    int grid = 512;
    int n_max = 100000;
    bool full = false;
    bool plot = false;
};

int cmd_figure2(const CommonOpts& c, const Fig2Opts& o) {
    ExperimentPlan plan;
    plan.statistic = StatName::MDP;
    plan.trials = o.full ? 1400 : o.trials;
    plan.alphas = o.alphas;
    plan.seed = c.seed;
    plan.threads = c.threads;
    plan.ps = o.full ? std::vector<int>{50, 100, 200, 500} : o.ps;
    plan.thetas = {o.theta};
    plan.etas = o.etas;
    if (plan.etas.empty())
        for (int i = 0; i < 12; ++i)
            plan.etas.push_back(std::pow(10.0, -2.0 + 2.0 * static_cast<double>(i) / 11.0));
    plan.mdp_grid = o.grid;
    plan.n_max = o.n_max;
    ExperimentResult r = phase_transition(plan);

    ensure_dir(c.out_dir);
    std::vector<std::pair<std::string, std::string>> files;
    auto put = [&](const std::string& name, const std::string& content) {
        std::string path = join_path(c.out_dir, name);
        write_file(path, content);
        files.push_back({name, path});
    };
    put("fig2_grid.csv", grid_csv(r.grid, plan.alphas));

    auto curve_for = [&](int p, int a, std::size_t ai) {
        std::vector<std::pair<double, double>> cur;
        for (const GridPoint& g : r.grid)
            if (g.p == p && g.scaling_power == a && !g.skipped && ai < g.p2.size() &&
                std::isfinite(g.p2[ai]))
                cur.push_back({a == 2 ? g.eta_circ : g.eta_star, g.p2[ai]});
        std::sort(cur.begin(), cur.end());
        return cur;
    };

    if (o.plot) {
        std::vector<SvgSeries> series;
        for (int p : plan.ps)
            for (int a : {1, 2}) {
                SvgSeries s;
                s.label = "p=" + std::to_string(p) + " a=" + std::to_string(a);
                s.points = curve_for(p, a, 0);
                series.push_back(std::move(s));
            }
        put("fig2.svg", svg_curve_plot("type II error across the sparsity scalings",
                                       "eta (log scale)", series, true));
    }

    JsonWriter w;
    w.begin_object();
    emit_header(w, "experiment figure2", c);
    w.key("config");
    w.begin_object();
    w.key("ps");
    w.begin_array();
    for (int p : plan.ps) w.value(p);
    w.end_array();
    w.kv("trials", plan.trials);
    w.array("alphas", plan.alphas);
    w.array("etas", plan.etas);
    w.kv("theta", o.theta);
    w.kv("grid", o.grid);
    w.kv("n_max", o.n_max);
    w.kv("full", o.full);
    w.end_object();
    w.key("result");
    w.begin_object();
    w.key("crossings");
    w.begin_array();
    for (int p : plan.ps)
        for (int a : {1, 2})
            for (std::size_t ai = 0; ai < plan.alphas.size(); ++ai) {
                w.begin_object();
                w.kv("p", p);
                w.kv("scaling_power", a);
                w.kv("alpha", plan.alphas[ai]);
                w.kv("coordinate", std::string(a == 2 ? "eta_circ" : "eta_star"));
                w.kv("crossing", crossing_eta(curve_for(p, a, ai)));
                w.end_object();
            }
    w.end_array();
    w.end_object();
    emit_strings(w, "warnings", r.warnings);
    w.key("files");
    w.begin_object();
    for (const auto& [name, path] : files) w.kv(name, path);
    w.end_object();
    w.end_object();
    write_file(join_path(c.out_dir, "fig2_summary.json"), w.str() + "\n");
    print_json(w);
    return 0;
}

// ---- experiment mp-edge ----------------------------------------------------

struct EdgeOpts {
    int p = 200, n = 200, trials = 50;
};

int cmd_mp_edge(const CommonOpts& c, const EdgeOpts& o) {
    EdgeResult r = mp_edge_check(o.p, o.n, o.trials, stream_seed(c.seed, kDataStream));
    ensure_dir(c.out_dir);
    write_file(join_path(c.out_dir, "mp_edge_trials.csv"),
               trials_csv({{"H0", &r.draws}}, StatName::LAMBDA_K));

    JsonWriter w;
    w.begin_object();
    emit_header(w, "experiment mp-edge", c);
    w.key("config");
    w.begin_object();
    w.kv("p", o.p);
    w.kv("n", o.n);
    w.kv("trials", o.trials);
    w.end_object();
    w.key("result");
    w.begin_object();
    w.kv("mean_lambda_max", r.mean_lambda_max);
    w.kv("predicted_edge", r.predicted_edge);
    w.kv("ratio", r.mean_lambda_max / r.predicted_edge);
    w.end_object();
    w.end_object();
    write_file(join_path(c.out_dir, "mp_edge.json"), w.str() + "\n");
    print_json(w);
    return 0;
}

// ---- experiment lr-check ---------------------------------------------------

struct LrOpts {
    int p = 6, k = 2, r = 0;
    double theta = 0.4;
    long long trials = 1000000;
};

int cmd_lr_check(const CommonOpts& c, const LrOpts& o) {
    AffinityResult r =
        lr_affinity_check(o.p, o.k, o.theta, o.r, o.trials, stream_seed(c.seed, kDataStream));
    ensure_dir(c.out_dir);

    JsonWriter w;
    w.begin_object();
    emit_header(w, "experiment lr-check", c);
    w.key("config");
    w.begin_object();
    w.kv("p", o.p);
    w.kv("k", o.k);
    w.kv("theta", o.theta);
    w.kv("r", o.r);
    w.kv("trials", o.trials);
    w.end_object();
    w.key("result");
    w.begin_object();
    w.kv("mc_estimate", r.mc_estimate);
    w.kv("closed_form", r.closed_form);
    w.kv("std_error", r.std_error);
    w.kv("abs_error", std::fabs(r.mc_estimate - r.closed_form));
    w.kv("sigmas", r.std_error > 0.0
                       ? std::fabs(r.mc_estimate - r.closed_form) / r.std_error
                       : std::numeric_limits<double>::quiet_NaN());
    w.end_object();
    w.end_object();
    write_file(join_path(c.out_dir, "lr_check.json"), w.str() + "\n");
    print_json(w);
    return 0;
}

// ---- experiment custom (plan file) ----------------------------------------

struct CustomOpts {
    std::string plan_file;
};

int cmd_custom(const CommonOpts& c, const CustomOpts& o) {
    std::ifstream f(o.plan_file);
    if (!f) throw std::invalid_argument("cannot open plan file: " + o.plan_file);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("plan parse error: " + std::string(e.what()));
    }
    if (!j.contains("driver"))
        throw std::invalid_argument("plan needs a 'driver' field "
                                    "(null_quantiles|error_rates|density|phase)");
    std::string driver = j.at("driver").get<std::string>();

    ExperimentPlan plan;
    plan.statistic = stat_from_string(j.value("statistic", std::string("mdp")));
    plan.trials = j.value("trials", plan.trials);
    plan.alphas = j.value("alphas", plan.alphas);
    plan.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : c.seed;
    plan.threads = j.value("threads", c.threads);
    plan.ps = j.value("ps", plan.ps);
    plan.ns = j.value("ns", plan.ns);
    plan.ks = j.value("ks", plan.ks);
    plan.thetas = j.value("thetas", plan.thetas);
    plan.etas = j.value("etas", plan.etas);
    plan.spike_mode = mode_from(j.value("spike_mode", std::string("kgrid")));
    if (j.contains("family")) plan.family = family_from(j.at("family").get<std::string>());
    plan.mdp_grid = j.value("mdp_grid", plan.mdp_grid);
    plan.n_max = j.value("n_max", plan.n_max);

    ensure_dir(c.out_dir);
    std::vector<std::pair<std::string, std::string>> files;
    auto put = [&](const std::string& name, const std::string& content) {
        std::string path = join_path(c.out_dir, name);
        write_file(path, content);
        files.push_back({name, path});
    };

    JsonWriter w;
    w.begin_object();
    emit_header(w, "experiment custom", c);
    w.key("config");
    w.begin_object();
    w.kv("plan_file", o.plan_file);
    w.kv("driver", driver);
    w.kv("statistic", to_string(plan.statistic));
    w.kv("trials", plan.trials);
    w.array("alphas", plan.alphas);
    w.kv("plan_seed", static_cast<unsigned long long>(plan.seed));
    w.end_object();
    w.key("result");
    w.begin_object();
    if (driver == "null_quantiles") {
        ExperimentResult r = null_quantiles(plan);
        put("custom_trials.csv", trials_csv({{"H0", &r.null_draws}}, plan.statistic));
        w.array("quantiles", r.quantiles);
        w.end_object();
        emit_strings(w, "warnings", r.warnings);
    } else if (driver == "error_rates") {
        if (!j.contains("tau"))
            throw std::invalid_argument("error_rates plan needs a 'tau' field");
        ExperimentResult r = error_rates(plan, j.at("tau").get<double>());
        put("custom_trials.csv",
            trials_csv({{"H0", &r.null_draws}, {"H1", &r.alt_draws}}, plan.statistic));
        w.kv("tau", j.at("tau").get<double>());
        w.kv("type1", r.type1);
        w.kv("type2", r.type2);
        w.end_object();
        emit_strings(w, "warnings", r.warnings);
    } else if (driver == "density") {
        DensityResult r = density_experiment(plan);
        put("custom_trials_mdp.csv",
            trials_csv({{"H0", &r.null_mdp}, {"H1", &r.alt_mdp}}, StatName::MDP));
        put("custom_trials_diag.csv",
            trials_csv({{"H0", &r.null_diag}, {"H1", &r.alt_diag}}, StatName::DIAG));
        w.kv("null_mdp_mean", mean_of(r.null_mdp));
        w.kv("alt_mdp_mean", mean_of(r.alt_mdp));
        w.kv("null_diag_mean", mean_of(r.null_diag));
        w.kv("alt_diag_mean", mean_of(r.alt_diag));
        w.end_object();
        emit_strings(w, "warnings", r.warnings);
    } else if (driver == "phase") {
        ExperimentResult r = phase_transition(plan);
        put("custom_grid.csv", grid_csv(r.grid, plan.alphas));
        w.kv("grid_points", static_cast<int>(r.grid.size()));
        w.end_object();
        emit_strings(w, "warnings", r.warnings);
    } else {
        throw std::invalid_argument("unknown driver '" + driver +
                                    "' (null_quantiles|error_rates|density|phase)");
    }
    w.key("files");
    w.begin_object();
    for (const auto& [name, path] : files) w.kv(name, path);
    w.end_object();
    w.end_object();
    write_file(join_path(c.out_dir, "custom_summary.json"), w.str() + "\n");
    print_json(w);
    return 0;
}

// ---- clique ----------------------------------------------------------------

struct CliqueOpts {
    int n = 400, k = 30, trials = 50;
    double delta = 0.1;
    int grid = 512;
};

int cmd_clique(const CommonOpts& c, const CliqueOpts& o) {
    CliqueReport r = clique_detection_experiment(o.n, o.k, o.trials, o.delta,
                                                 stream_seed(c.seed, kDataStream), c.threads,
                                                 o.grid);
    ensure_dir(c.out_dir);
    std::vector<std::pair<std::string, std::string>> files;
    auto put = [&](const std::string& name, const std::string& content) {
        std::string path = join_path(c.out_dir, name);
        write_file(path, content);
        files.push_back({name, path});
    };
    put("clique_trials.csv", trials_csv({{"planted", &r.planted_draws},
                                         {"null", &r.null_draws},
                                         {"gauss", &r.gauss_draws}},
                                        StatName::MDP));
    if (r.sdp_used)
        put("clique_sdp_trials.csv",
            trials_csv({{"planted", &r.planted_sdp}, {"null", &r.null_sdp}}, StatName::SDP));

    JsonWriter w;
    w.begin_object();
    emit_header(w, "clique", c);
    w.key("config");
    w.begin_object();
    w.kv("n", o.n);
    w.kv("k", o.k);
    w.kv("trials", o.trials);
    w.kv("delta", o.delta);
    w.kv("grid", o.grid);
    w.end_object();
    w.key("result");
    w.begin_object();
    w.kv("lemma_floor", r.lemma_floor);
    w.kv("null_quantile", r.null_quantile);
    w.kv("power", r.power);
    w.kv("planted_mean", r.planted_mean);
    w.kv("null_mean", r.null_mean);
    w.kv("welch_t", r.welch_t);
    w.kv("welch_p", r.welch_p);
    w.kv("ks_stat", r.ks_stat);
    w.kv("ks_crit_1pct", r.ks_crit_1pct);
    w.kv("sdp_used", r.sdp_used);
    w.end_object();
    emit_strings(w, "warnings", r.warnings);
    w.key("files");
    w.begin_object();
    for (const auto& [name, path] : files) w.kv(name, path);
    w.end_object();
    w.end_object();
    write_file(join_path(c.out_dir, "clique_summary.json"), w.str() + "\n");
    print_json(w);
    return 0;
}

// ---- generate ----------------------------------------------------------------

struct GenOpts {
    ModelFlags mf;
    std::string clique_kv, clique_data_kv, adversarial_kv, lq_kv;
    std::string out;
};

int cmd_generate(const CommonOpts& c, const GenOpts& o) {
    if (!o.mf.matrix_file.empty())
        throw std::invalid_argument("generate needs a generative source, not --matrix");
    int sources = !o.mf.null_kv.empty() + !o.mf.spiked_kv.empty() + !o.clique_kv.empty() +
                  !o.clique_data_kv.empty() + !o.adversarial_kv.empty() + !o.lq_kv.empty();
    if (sources != 1)
        throw std::invalid_argument(
            "exactly one of --null / --spiked / --clique / --clique-data / "
            "--adversarial / --lq is required");

    std::string content, default_name, kind;
    std::vector<std::string> warnings;
    JsonWriter cfg;  // generator-specific config fragment
    cfg.begin_object();

    if (!o.mf.null_kv.empty() || !o.mf.spiked_kv.empty()) {
        ResolvedModel m = resolve_model(o.mf, c.seed);
        kind = m.kind;
        if (m.exact_cov) {
            content = format_matrix_text(model_covariance(m, c.seed));
            default_name = "matrix.txt";
        } else {
            content = data_matrix_csv(model_data(m, c.seed));
            default_name = "data.csv";
        }
        echo_model(cfg, m);
    } else if (!o.clique_kv.empty() || !o.clique_data_kv.empty()) {
        bool data = !o.clique_data_kv.empty();
        KvArgs a(data ? o.clique_data_kv : o.clique_kv, data ? "--clique-data" : "--clique",
                 {"n", "k"});
        int n = static_cast<int>(a.get_int("n"));
        int k = static_cast<int>(a.get_int("k", 0));
        GraphSample g = planted_clique_graph(n, k, stream_seed(c.seed, kDataStream));
        kind = data ? "clique-data" : "clique";
        if (data) {
            content = data_matrix_csv(clique_reduction(g, stream_seed(c.seed, kAuxStream)));
            default_name = "data.csv";
        } else {
            content = edge_list_text(g);
            default_name = "graph.txt";
        }
        cfg.kv("n", n);
        cfg.kv("k", k);
        if (g.planted) {
            cfg.key("planted");
            cfg.begin_array();
            for (int v : *g.planted) cfg.value(v);
            cfg.end_array();
        }
    } else if (!o.adversarial_kv.empty()) {
        KvArgs a(o.adversarial_kv, "--adversarial", {"p", "n", "k", "theta"});
        int p = static_cast<int>(a.get_int("p"));
        int n = static_cast<int>(a.get_int("n"));
        int k = static_cast<int>(a.get_int("k"));
        double theta = a.get_num("theta");
        std::string warn;
        SymMatrix A =
            adversarial_covariance(p, n, k, theta, stream_seed(c.seed, kDataStream), &warn);
        if (!warn.empty()) warnings.push_back(warn);
        content = format_matrix_text(A);
        default_name = "matrix.txt";
        kind = "adversarial";
        cfg.kv("p", p);
        cfg.kv("n", n);
        cfg.kv("k", k);
        cfg.kv("theta", theta);
    } else {
        KvArgs a(o.lq_kv, "--lq", {"p", "k", "q"});
        int p = static_cast<int>(a.get_int("p"));
        int k = static_cast<int>(a.get_int("k"));
        double q = a.get_num("q");
        std::vector<double> v = lq_spike(p, k, q, stream_seed(c.seed, kDataStream));
        DataMatrix X(1, p);
        for (int i = 0; i < p; ++i) X(0, i) = v[i];
        content = data_matrix_csv(X);
        default_name = "data.csv";
        kind = "lq";
        cfg.kv("p", p);
        cfg.kv("k", k);
        cfg.kv("q", q);
    }
    cfg.end_object();

    ensure_dir(c.out_dir);
    std::string path = o.out.empty() ? join_path(c.out_dir, default_name) : o.out;
    write_file(path, content);

    JsonWriter w;
    w.begin_object();
    emit_header(w, "generate", c);
    w.key("config");
    w.begin_object();
    w.kv("kind", kind);
    w.key("params");
    w.raw(cfg.str());
    w.end_object();
    emit_strings(w, "warnings", warnings);
    w.kv("file", path);
    w.end_object();
    print_json(w);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse principal component detection toolkit"};
    app.require_subcommand(1);

    CommonOpts common;
    int rc = 0;

    StatOpts so;
    auto* st = app.add_subcommand(
        "stat", "Compute a sparse-eigenvalue statistic on a matrix or a generated model");
    add_model_flags(st, so.mf, true);
    st->add_option("--stat", so.stat, "lambda_k | sdp | mdp | diag")->capture_default_str();
    st->add_option("--k", so.k, "Sparsity parameter");
    st->add_option("--eps", so.eps, "SDP certified half-width target")->capture_default_str();
    st->add_option("--grid", so.grid, "MDP threshold grid size")->capture_default_str();
    add_common(st, common);
    st->callback([&] { rc = cmd_stat(common, so); });

    TestOpts to;
    auto* ts = app.add_subcommand("test", "Run a calibrated detection test on sampled data");
    add_model_flags(ts, to.mf, true);
    ts->add_option("--stat", to.stat, "lambda_k | sdp | mdp | diag")->capture_default_str();
    ts->add_option("--k", to.k, "Sparsity parameter (defaults to the model's k)");
    ts->add_option("--n", to.n, "Sample size when the source is --matrix or --identity");
    ts->add_option("--delta", to.delta, "Error budget")->capture_default_str();
    auto* theta_opt =
        ts->add_option("--theta", to.theta, "Signal strength used by the alternative-side bound")
            ->capture_default_str();
    ts->add_option("--tau-rule", to.rule, "auto | lambda | sdp | diag | adversarial | fixed")
        ->capture_default_str();
    auto* tau_opt = ts->add_option("--tau", to.tau, "Threshold for --tau-rule fixed");
    ts->add_option("--eps", to.eps, "SDP certified half-width target")->capture_default_str();
    ts->add_option("--grid", to.grid, "MDP threshold grid size")->capture_default_str();
    add_common(ts, common);
    ts->callback([&] {
        to.theta_given = theta_opt->count() > 0;
        to.tau_given = tau_opt->count() > 0;
        rc = cmd_test(common, to);
    });

    auto* ex = app.add_subcommand("experiment", "Reproducible experiment drivers");
    ex->require_subcommand(1);

    Fig1Opts f1;
    auto* e1 = ex->add_subcommand("figure1",
                                  "Null/alternative densities of the thresholded statistic "
                                  "and the max diagonal");
    e1->add_option("--p", f1.p, "Dimension")->capture_default_str();
    e1->add_option("--n", f1.n, "Sample size")->capture_default_str();
    e1->add_option("--k", f1.k, "Sparsity")->capture_default_str();
    e1->add_option("--theta", f1.theta, "Signal strength")->capture_default_str();
    e1->add_option("--n-trials", f1.trials, "Trials per arm")->capture_default_str();
    e1->add_option("--grid", f1.grid, "MDP threshold grid size")->capture_default_str();
    e1->add_flag("--full", f1.full, "Publication size (1000 trials per arm)");
    e1->add_flag("--plot", f1.plot, "Also write SVG density plots");
    add_common(e1, common);
    e1->callback([&] { rc = cmd_figure1(common, f1); });

    Fig2Opts f2;
    auto* e2 = ex->add_subcommand("figure2", "Type II error sweep across sparsity scalings");
    e2->add_option("--p", f2.ps, "Dimensions (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    e2->add_option("--n-trials", f2.trials, "Trials per arm per grid point")
        ->capture_default_str();
    e2->add_option("--alpha", f2.alphas, "Null quantile levels (comma separated)")
        ->delimiter(',')
        ->capture_default_str();
    e2->add_option("--eta", f2.etas, "Target eta grid (default: 12 log-spaced in [0.01, 1])")
        ->delimiter(',');
    e2->add_option("--theta", f2.theta, "Signal strength")->capture_default_str();
    e2->add_option("--grid", f2.grid, "MDP threshold grid size")->capture_default_str();
    e2->add_option("--n-max", f2.n_max, "Skip grid points needing a larger sample size")
        ->capture_default_str();
    e2->add_flag("--full", f2.full, "Publication size (1400 trials, p = 50,100,200,500)");
    e2->add_flag("--plot", f2.plot, "Also write an SVG of the curves");
    add_common(e2, common);
    e2->callback([&] { rc = cmd_figure2(common, f2); });

    EdgeOpts eo;
    auto* e3 = ex->add_subcommand("mp-edge",
                                  "Mean top eigenvalue of null covariances vs the bulk edge");
    e3->add_option("--p", eo.p, "Dimension")->capture_default_str();
    e3->add_option("--n", eo.n, "Sample size")->capture_default_str();
    e3->add_option("--trials", eo.trials, "Number of draws")->capture_default_str();
    add_common(e3, common);
    e3->callback([&] { rc = cmd_mp_edge(common, eo); });

    LrOpts lo;
    auto* e4 = ex->add_subcommand("lr-check",
                                  "Monte Carlo check of the likelihood-ratio second moment");
    e4->add_option("--p", lo.p, "Dimension")->capture_default_str();
    e4->add_option("--k", lo.k, "Support size")->capture_default_str();
    e4->add_option("--theta", lo.theta, "Signal strength, in (0, 1/2)")->capture_default_str();
    e4->add_option("--r", lo.r, "Support overlap")->capture_default_str();
    e4->add_option("--n-trials", lo.trials, "Monte Carlo sample count")->capture_default_str();
    add_common(e4, common);
    e4->callback([&] { rc = cmd_lr_check(common, lo); });

    CustomOpts co;
    auto* e5 = ex->add_subcommand("custom", "Run a driver described by a JSON plan file");
    e5->add_option("--plan", co.plan_file, "Plan file path")->required();
    add_common(e5, common);
    e5->callback([&] { rc = cmd_custom(common, co); });

    CliqueOpts qo;
    auto* cq = app.add_subcommand("clique",
                                  "Planted clique detection through the Gaussianization "
                                  "reduction");
    cq->add_option("--n", qo.n, "Graph size")->capture_default_str();
    cq->add_option("--k", qo.k, "Clique size (0 = null calibration)")->capture_default_str();
    cq->add_option("--trials", qo.trials, "Trials per arm")->capture_default_str();
    cq->add_option("--delta", qo.delta, "Null quantile level")->capture_default_str();
    cq->add_option("--grid", qo.grid, "MDP threshold grid size")->capture_default_str();
    add_common(cq, common);
    cq->callback([&] { rc = cmd_clique(common, qo); });

    GenOpts go;
    auto* gn = app.add_subcommand("generate", "Write sampled data, graphs, or matrices to disk");
    add_model_flags(gn, go.mf, false);
    gn->add_option("--clique", go.clique_kv, "Planted clique graph: n=..,k=..");
    gn->add_option("--clique-data", go.clique_data_kv,
                   "Gaussianized clique reduction: n=..,k=..");
    gn->add_option("--adversarial", go.adversarial_kv,
                   "Indistinguishable covariance: p=..,n=..,k=..,theta=..");
    gn->add_option("--lq", go.lq_kv, "Unit vector in the lq ball: p=..,k=..,q=..");
    gn->add_option("--out", go.out, "Output path (default: a name in --out-dir)");
    add_common(gn, common);
    gn->callback([&] { rc = cmd_generate(common, go); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const spcd::SolverError& e) {
        JsonWriter w;
        w.begin_object();
        w.kv("schema", 1);
        w.kv("error", std::string(e.what()));
        w.kv("lower", e.lower());
        w.kv("upper", e.upper());
        w.end_object();
        std::cout << w.str() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
