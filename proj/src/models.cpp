#include "spcd/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "spcd/format.hpp"

namespace spcd {

std::vector<double> full_vector(const SpikeSpec& spike) {
    std::vector<double> v(spike.p, 0.0);
    for (int t = 0; t < spike.k; ++t) v[spike.support[t]] = spike.direction[t];
    return v;
}

void validate(const SpikeSpec& spike, bool need_theta) {
    if (spike.p < 1 || spike.k < 1 || spike.k > spike.p)
        throw std::invalid_argument("spike: need 1 <= k <= p");
    if (static_cast<int>(spike.support.size()) != spike.k ||
        static_cast<int>(spike.direction.size()) != spike.k)
        throw std::invalid_argument("spike: support and direction must have size k");
    for (int t = 0; t < spike.k; ++t) {
        if (spike.support[t] < 0 || spike.support[t] >= spike.p)
            throw std::invalid_argument("spike: support index out of range");
        if (t > 0 && spike.support[t] <= spike.support[t - 1])
            throw std::invalid_argument("spike: support must be strictly increasing");
    }
    double n2 = std::inner_product(spike.direction.begin(), spike.direction.end(),
                                   spike.direction.begin(), 0.0);
    if (std::fabs(std::sqrt(n2) - 1.0) > 1e-12)
        throw std::invalid_argument("spike: direction must be a unit vector");
    if (need_theta && !(spike.theta > 0.0))
        throw std::invalid_argument("spike: theta must be > 0");
}

namespace {

std::vector<int> draw_support(Rng& rng, int p, int k) {
    std::vector<int> pool(p);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
        int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(p - i)));
        std::swap(pool[i], pool[j]);
    }
    std::vector<int> s(pool.begin(), pool.begin() + k);
    std::sort(s.begin(), s.end());
    return s;
}

std::vector<double> draw_sphere(Rng& rng, int k) {
    std::vector<double> v(k);
    for (;;) {
        double n2 = 0.0;
        for (double& x : v) {
            x = rng.gaussian();
            n2 += x * x;
        }
        if (n2 > 0.0) {
            if (k == 1) {  // g / sqrt(g*g) can miss +-1 by an ulp
                v[0] = v[0] > 0.0 ? 1.0 : -1.0;
                return v;
            }
            double inv = 1.0 / std::sqrt(n2);
            for (double& x : v) x *= inv;
            return v;
        }
    }
}

}  // namespace

SpikeSpec random_sparse_spike(int p, int k, Seed seed, SpikeMode mode, double theta) {
    if (p < 1 || k < 1 || k > p)
        throw std::invalid_argument("random_sparse_spike: need 1 <= k <= p");
    Rng rng(seed);
    SpikeSpec s;
    s.p = p;
    s.k = k;
    s.theta = theta;
    if (mode == SpikeMode::RANDOM_SUPPORT) {
        s.support = draw_support(rng, p, k);
    } else {
        s.support.resize(k);
        std::iota(s.support.begin(), s.support.end(), 0);
    }
    if (mode == SpikeMode::UNIFORM_KGRID) {
        s.direction.assign(k, 1.0 / std::sqrt(static_cast<double>(k)));
    } else {
        s.direction = draw_sphere(rng, k);
    }
    return s;
}

DataMatrix sample_null(int p, int n, Seed seed) {
    if (p < 1 || n < 1) throw std::invalid_argument("sample_null: need n, p >= 1");
    Rng rng(seed);
    DataMatrix X(n, p);
    for (int i = 0; i < n; ++i) {
        double* r = X.row(i);
        for (int j = 0; j < p; ++j) r[j] = rng.gaussian();
    }
    return X;
}

DataMatrix sample_spiked(const SpikeSpec& spike, int n, Seed seed) {
    validate(spike);
    if (n < 1) throw std::invalid_argument("sample_spiked: need n >= 1");
    DataMatrix X = sample_null(spike.p, n, seed);
    double scale = std::sqrt(1.0 + spike.theta) - 1.0;
    if (scale == 0.0) return X;  // bit-for-bit the null path
    for (int i = 0; i < n; ++i) {
        double* r = X.row(i);
        double dot = 0.0;
        for (int t = 0; t < spike.k; ++t) dot += spike.direction[t] * r[spike.support[t]];
        double c = scale * dot;
        for (int t = 0; t < spike.k; ++t) r[spike.support[t]] += c * spike.direction[t];
    }
    return X;
}

DataMatrix sample_subgaussian(const std::optional<SpikeSpec>& spike, int p, int n,
                              SubGaussianFamily family, Seed seed) {
    if (p < 1 || n < 1) throw std::invalid_argument("sample_subgaussian: need n, p >= 1");
    if (spike) {
        validate(*spike);
        if (spike->p != p) throw std::invalid_argument("sample_subgaussian: spike.p != p");
    }
    Rng rng(seed);
    DataMatrix X(n, p);
    for (int i = 0; i < n; ++i) {
        double* r = X.row(i);
        for (int j = 0; j < p; ++j)
            r[j] = family == SubGaussianFamily::RADEMACHER ? rng.rademacher()
                                                           : rng.uniform_unitvar();
    }
    if (!spike) return X;
    double scale = std::sqrt(1.0 + spike->theta) - 1.0;
    if (scale == 0.0) return X;
    for (int i = 0; i < n; ++i) {
        double* r = X.row(i);
        double dot = 0.0;
        for (int t = 0; t < spike->k; ++t) dot += spike->direction[t] * r[spike->support[t]];
        double c = scale * dot;
        for (int t = 0; t < spike->k; ++t) r[spike->support[t]] += c * spike->direction[t];
    }
    return X;
}

std::vector<double> lq_spike(int p, int k, double q, Seed seed) {
    if (p < 1 || k < 1 || k > p) throw std::invalid_argument("lq_spike: need 1 <= k <= p");
    if (!(q > 0.0 && q < 2.0)) throw std::invalid_argument("lq_spike: q must lie in (0,2)");
    double budget = std::pow(static_cast<double>(k), 1.0 / q - 0.5);

    Rng rng(seed);
    std::vector<int> support = draw_support(rng, p, k);
    std::vector<double> dir = draw_sphere(rng, k);
    std::vector<double> sparse(p, 0.0);
    for (int t = 0; t < k; ++t) sparse[support[t]] = dir[t];
    if (k == p) return sparse;  // no room for a tail

    // Dense tail: geometric decay with fixed random signs, shrunk until the
    // lq budget holds. A k-sparse unit vector meets the budget on its own,
    // so the shrink loop always terminates with a valid vector.
    std::vector<double> signs(p, 0.0);
    for (int j = 0; j < p; ++j)
        if (sparse[j] == 0.0) signs[j] = rng.rademacher();

    double amp = 0.05 / std::sqrt(static_cast<double>(p));
    auto lq_norm = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += std::pow(std::fabs(x), q);
        return std::pow(s, 1.0 / q);
    };
    for (int attempt = 0; attempt < 60; ++attempt) {
        std::vector<double> v = sparse;
        double decay = 1.0;
        for (int j = 0; j < p; ++j) {
            if (signs[j] == 0.0) continue;
            v[j] = signs[j] * amp * decay;
            decay *= 0.7;
        }
        double n2 = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
        double inv = 1.0 / std::sqrt(n2);
        for (double& x : v) x *= inv;
        if (lq_norm(v) <= budget + 1e-15) return v;
        amp *= 0.5;
    }
    return sparse;
}

SymMatrix adversarial_covariance(int p, int n, int k, double theta, Seed seed,
                                 std::string* warning) {
    if (p < 1 || n < 1 || k < 1 || k > p)
        throw std::invalid_argument("adversarial_covariance: need 1 <= k <= p, n >= 1");
    if (!(theta > 0.0)) throw std::invalid_argument("adversarial_covariance: theta must be > 0");

    double regime = 2.0 * k * std::sqrt(std::log(static_cast<double>(p)) / n);
    if (warning) {
        warning->clear();
        if (theta > regime)
            *warning = "theta " + format_g17(theta) +
                       " exceeds the indistinguishability regime bound 2k sqrt(log(p)/n) = " +
                       format_g17(regime) + "; the construction is no longer worst-case";
    }

    // The hypothesis label is drawn but both labels yield the same matrix;
    // that coincidence is the entire point of the construction.
    Rng rng(seed);
    (void)rng.bernoulli_half();

    SymMatrix sigma = SymMatrix::identity(p);
    double w = (theta / 2.0) / static_cast<double>(k);  // (theta/2) v_i v_j at 1/sqrt(k)
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) sigma.add(i, j, w);
    sigma.set_psd_flag(true);
    return sigma;
}

SymMatrix adversarial_covariance(const SymMatrix& sigma, const SymMatrix& noise, int n,
                                 double delta) {
    if (sigma.dim() != noise.dim())
        throw std::invalid_argument("adversarial_covariance: dimension mismatch");
    if (n < 1) throw std::invalid_argument("adversarial_covariance: need n >= 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("adversarial_covariance: delta must lie in (0,1)");
    double budget = std::sqrt(std::log(sigma.dim() / delta) / n);
    if (noise.max_abs() > budget)
        throw std::invalid_argument(
            "adversarial_covariance: |N|_inf = " + format_g17(noise.max_abs()) +
            " exceeds the contamination budget sqrt(log(p/delta)/n) = " + format_g17(budget));
    SymMatrix out = sigma;
    std::vector<double>& o = out.packed_mut();
    const std::vector<double>& np = noise.packed();
    for (std::size_t t = 0; t < o.size(); ++t) o[t] += np[t];
    out.set_psd_flag(false);
    return out;
}

GraphSample planted_clique_graph(int n, int k, Seed seed) {
    if (n < 1 || k < 0 || k > n)
        throw std::invalid_argument("planted_clique_graph: need 0 <= k <= n");
    Rng rng(seed);
    GraphSample g;
    g.n = n;
    g.adjacency = SymMatrix(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.adjacency.set(i, j, rng.bernoulli_half() ? 1.0 : 0.0);
    if (k > 0) {
        std::vector<int> clique = draw_support(rng, n, k);
        for (std::size_t a = 0; a < clique.size(); ++a)
            for (std::size_t b = a + 1; b < clique.size(); ++b)
                g.adjacency.set(clique[a], clique[b], 1.0);
        g.planted = std::move(clique);
    }
    return g;
}

DataMatrix clique_reduction(const GraphSample& g, Seed seed) {
    int n = g.n;
    Rng rng(seed);
    DataMatrix X(n, n);
    for (int i = 0; i < n; ++i) {
        double* r = X.row(i);
        for (int j = 0; j < n; ++j) {
            double z = std::fabs(rng.gaussian());
            double u = i < j ? 2.0 * g.adjacency(i, j) - 1.0 : rng.rademacher();
            r[j] = z * u;
        }
    }
    return X;
}

std::string data_matrix_csv(const DataMatrix& X) {
    std::string out;
    out.reserve(static_cast<std::size_t>(X.n()) * X.p() * 20 + 8 * X.p());
    for (int j = 0; j < X.p(); ++j) {
        if (j) out += ',';
        out += 'x';
        out += std::to_string(j + 1);
    }
    out += '\n';
    for (int i = 0; i < X.n(); ++i) {
        for (int j = 0; j < X.p(); ++j) {
            if (j) out += ',';
            out += format_g17(X(i, j));
        }
        out += '\n';
    }
    return out;
}

std::string edge_list_text(const GraphSample& g) {
    std::string out;
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j)
            if (g.adjacency(i, j) != 0.0) {
                out += std::to_string(i + 1);
                out += ' ';
                out += std::to_string(j + 1);
                out += '\n';
            }
    return out;
}

}  // namespace spcd
