#include "spcd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "spcd/eigen.hpp"

namespace spcd {

std::string to_string(StatName s) {
    switch (s) {
        case StatName::LAMBDA_K: return "lambda_k";
        case StatName::SDP: return "sdp";
        case StatName::MDP: return "mdp";
        case StatName::DIAG: return "diag";
    }
    return "?";
}

StatName stat_from_string(const std::string& s) {
    if (s == "lambda_k") return StatName::LAMBDA_K;
    if (s == "sdp") return StatName::SDP;
    if (s == "mdp") return StatName::MDP;
    if (s == "diag") return StatName::DIAG;
    throw std::invalid_argument("unknown statistic: " + s);
}

unsigned long long subset_count(int p, int k) {
    if (k < 0 || k > p) return 0;
    k = std::min(k, p - k);
    const unsigned long long cap = ~0ULL >> 1;
    unsigned long long c = 1;
    for (int i = 1; i <= k; ++i) {
        unsigned long long num = static_cast<unsigned long long>(p - k + i);
        if (c > cap / num) return cap;  // saturate
        c = c * num / i;                // exact: C(p-k+i, i) is integral
    }
    return c;
}

namespace {

double lambda_max_value(const SymMatrix& A) {
    if (A.dim() <= 64) return jacobi_eigen(A, false).values.back();
    return largest_eigenvalue(A, 1e-11).value;
}

// Next k-subset of {0..p-1} in colex order; returns false after the last.
bool next_colex(std::vector<int>& c, int p) {
    int k = static_cast<int>(c.size());
    for (int i = 0; i < k; ++i) {
        int limit = (i + 1 < k) ? c[i + 1] : p;
        if (c[i] + 1 < limit) {
            ++c[i];
            for (int j = 0; j < i; ++j) c[j] = j;
            return true;
        }
    }
    return false;
}

}  // namespace

StatValue lambda_k_max(const SymMatrix& A, int k) {
    int p = A.dim();
    if (k < 1 || k > p) throw std::invalid_argument("lambda_k_max: need 1 <= k <= p");
    const unsigned long long budget = 10000000ULL;
    if (subset_count(p, k) > budget)
        throw std::invalid_argument(
            "lambda_k_max: C(p,k) exceeds the enumeration budget of 10^7 subsets; "
            "use the MDP or SDP statistic instead");

    StatValue out;
    out.name = StatName::LAMBDA_K;

    if (k == 1) {
        int i = A.argmax_diag();
        out.value = A(i, i);
        out.support = std::vector<int>{i};
        out.iterations = p;
        return out;
    }
    if (k == p) {
        out.value = lambda_max_value(A);
        std::vector<int> all(p);
        std::iota(all.begin(), all.end(), 0);
        out.support = std::move(all);
        out.iterations = 1;
        return out;
    }

    // Colex enumeration; the cached submatrix is patched only on the rows
    // and columns that changed between consecutive subsets (single-element
    // "revolving door" steps are the common case).
    std::vector<int> cur(k);
    std::iota(cur.begin(), cur.end(), 0);
    SymMatrix sub(k);
    auto fill_rowcol = [&](int t) {
        for (int u = 0; u < k; ++u) sub.set(std::min(t, u), std::max(t, u), A(cur[t], cur[u]));
    };
    for (int t = 0; t < k; ++t) fill_rowcol(t);

    std::vector<int> prev = cur;
    std::vector<int> best_support = cur;
    double best = lambda_max_value(sub);
    long long visited = 1;
    const double tie_tol = 1e-12;

    while (next_colex(cur, p)) {
        for (int t = 0; t < k; ++t)
            if (cur[t] != prev[t]) fill_rowcol(t);
        prev = cur;
        ++visited;
        double v = lambda_max_value(sub);
        if (v > best + tie_tol) {
            best = v;
            best_support = cur;
        } else if (v >= best - tie_tol &&
                   std::lexicographical_compare(cur.begin(), cur.end(),
                                                best_support.begin(), best_support.end())) {
            // Equal within tolerance: prefer the lexicographically smaller
            // support, and keep the larger of the two tied values.
            best = std::max(best, v);
            best_support = cur;
        }
    }

    out.value = best;
    out.support = best_support;
    out.iterations = static_cast<int>(std::min<long long>(visited, INT32_MAX));
    return out;
}

namespace {

void soft_threshold_into(const SymMatrix& A, double z, SymMatrix& B) {
    const std::vector<double>& in = A.packed();
    std::vector<double>& out = B.packed_mut();
    for (std::size_t t = 0; t < in.size(); ++t) {
        double v = in[t];
        double m = std::fabs(v) - z;
        out[t] = m > 0.0 ? (v > 0.0 ? m : -m) : 0.0;
    }
}

}  // namespace

StatValue mdp(const SymMatrix& A, int k, int grid_size) {
    int p = A.dim();
    if (k < 1) throw std::invalid_argument("mdp: k must be >= 1");
    if (k > p) throw std::invalid_argument("mdp: k must be <= p");
    if (grid_size < 2) throw std::invalid_argument("mdp: grid_size must be >= 2");

    StatValue out;
    out.name = StatName::MDP;

    double zmax = A.max_abs();
    if (zmax == 0.0) {
        out.value = 0.0;
        out.z_star = 0.0;
        out.iterations = 1;
        return out;
    }

    const double eig_tol = 1e-9;
    SymMatrix st(p);
    std::vector<std::vector<double>> warm;
    int evals = 0;
    auto phi = [&](double z) {
        soft_threshold_into(A, z, st);
        EigenPair e = largest_eigenvalue_warm(st, eig_tol, warm);
        ++evals;
        return e.value + k * z;
    };

    double best_val = std::numeric_limits<double>::infinity();
    double best_z = 0.0;
    int best_i = 0;
    for (int i = 0; i < grid_size; ++i) {
        double z = zmax * static_cast<double>(i) / (grid_size - 1);
        double v = phi(z);
        if (v < best_val) {
            best_val = v;
            best_z = z;
            best_i = i;
        }
    }

    // Golden-section refinement inside the bracketing cell of the best grid
    // point. Multimodality cannot hurt: the final value is the minimum over
    // everything evaluated.
    double lo = zmax * static_cast<double>(std::max(best_i - 1, 0)) / (grid_size - 1);
    double hi = zmax * static_cast<double>(std::min(best_i + 1, grid_size - 1)) / (grid_size - 1);
    const double gr = 0.6180339887498948482;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = phi(c), fd = phi(d);
    auto note = [&](double z, double v) {
        if (v < best_val) {
            best_val = v;
            best_z = z;
        }
    };
    note(c, fc);
    note(d, fd);
    for (int it = 0; it < 48; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = phi(c);
            note(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = phi(d);
            note(d, fd);
        }
    }

    out.value = best_val;
    out.z_star = best_z;
    out.iterations = evals;
    return out;
}

StatValue diag_stat(const SymMatrix& A) {
    StatValue out;
    out.name = StatName::DIAG;
    int i = A.argmax_diag();
    out.value = A(i, i);
    out.support = std::vector<int>{i};
    out.iterations = A.dim();
    return out;
}

int k_q(int k, double q, double eps) {
    if (k < 1) throw std::invalid_argument("k_q: k must be >= 1");
    if (!(q > 0.0 && q < 2.0))
        throw std::invalid_argument("k_q: q must lie in (0,2); q = 2 requires different techniques");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("k_q: eps must lie in (0,1)");
    double x = k * std::pow(eps, 1.0 / (1.0 - 2.0 / q));
    double r = std::round(x);
    if (std::fabs(x - r) <= 1e-9 * std::max(1.0, std::fabs(x))) return static_cast<int>(r);
    return static_cast<int>(std::ceil(x));
}

std::vector<double> sparse_truncate(const std::vector<double>& v, int r) {
    int p = static_cast<int>(v.size());
    if (p == 0) throw std::invalid_argument("sparse_truncate: empty vector");
    if (r < 1 || r > p) throw std::invalid_argument("sparse_truncate: need 1 <= r <= p");
    double n2 = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
    if (std::fabs(std::sqrt(n2) - 1.0) > 1e-10)
        throw std::invalid_argument("sparse_truncate: input must be a unit vector");

    std::vector<int> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        double fa = std::fabs(v[a]), fb = std::fabs(v[b]);
        if (fa != fb) return fa > fb;
        return a < b;
    });
    std::vector<double> out(p, 0.0);
    double kept = 0.0;
    for (int t = 0; t < r; ++t) {
        out[idx[t]] = v[idx[t]];
        kept += v[idx[t]] * v[idx[t]];
    }
    double nrm = std::sqrt(kept);
    if (nrm == 0.0) throw std::invalid_argument("sparse_truncate: zero vector");
    for (double& x : out) x /= nrm;
    return out;
}

std::vector<double> project_simplex(const std::vector<double>& w) {
    std::vector<double> u = w;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    int rho = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            rho = static_cast<int>(i + 1);
            theta = t;
        }
    }
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = std::max(w[i] - theta, 0.0);
    return out;
}

double l1_norm_full(const SymMatrix& M) {
    double s = 0.0;
    int p = M.dim();
    for (int i = 0; i < p; ++i) {
        s += std::fabs(M(i, i));
        for (int j = i + 1; j < p; ++j) s += 2.0 * std::fabs(M(i, j));
    }
    return s;
}

SymMatrix project_l1_ball(const SymMatrix& M, double budget) {
    if (budget <= 0.0) throw std::invalid_argument("project_l1_ball: budget must be > 0");
    if (l1_norm_full(M) <= budget) return M;

    // In Frobenius geometry the per-entry weights cancel: the projection is a
    // uniform soft-threshold at the level t where the weighted l1 norm hits
    // the budget. Walk the sorted breakpoints; g(t) is piecewise linear and
    // strictly decreasing until it reaches 0.
    int p = M.dim();
    std::vector<std::pair<double, double>> mag;  // (|entry|, weight)
    mag.reserve(M.packed_size());
    for (int i = 0; i < p; ++i) {
        mag.emplace_back(std::fabs(M(i, i)), 1.0);
        for (int j = i + 1; j < p; ++j) mag.emplace_back(std::fabs(M(i, j)), 2.0);
    }
    std::sort(mag.begin(), mag.end(), std::greater<>());

    double wsum = 0.0, wmsum = 0.0, t = 0.0;
    for (std::size_t i = 0; i < mag.size(); ++i) {
        wsum += mag[i].second;
        wmsum += mag[i].second * mag[i].first;
        double next = (i + 1 < mag.size()) ? mag[i + 1].first : 0.0;
        // On (next, mag[i].first], g(t) = wmsum - wsum * t.
        double cand = (wmsum - budget) / wsum;
        if (cand >= next - 1e-300) {
            t = std::max(cand, 0.0);
            break;
        }
    }
    return soft_threshold(M, t);
}

}  // namespace spcd
