#include "spcd/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spcd/rng.hpp"

namespace spcd {

namespace {

void check_finite(const SymMatrix& A) {
    for (double v : A.packed())
        if (!std::isfinite(v)) throw std::invalid_argument("eigensolver: non-finite entry");
}

// Deterministic pseudo-random unit vector, index-hash based; used for solver
// starts so no input can be exactly orthogonal to it by construction.
std::vector<double> hash_vector(int p, std::uint64_t salt) {
    std::vector<double> v(p);
    for (int i = 0; i < p; ++i) {
        std::uint64_t h = detail::mix64(salt + 0x9E3779B97F4A7C15ULL * (i + 1));
        v[i] = (static_cast<double>(h >> 11) + 0.5) * 0x1p-53 - 0.5;
    }
    double nrm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (double& x : v) x /= nrm;
    return v;
}

double norm2(const std::vector<double>& v) {
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

void canonicalize_sign(std::vector<double>& v) {
    std::size_t lead = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::fabs(v[i]) > std::fabs(v[lead])) lead = i;
    if (v[lead] < 0.0)
        for (double& x : v) x = -x;
}

EigenDecomposition jacobi_eigen(const SymMatrix& A, bool want_vectors) {
    check_finite(A);
    int p = A.dim();
    std::vector<double> m(static_cast<std::size_t>(p) * p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) m[static_cast<std::size_t>(i) * p + j] = A(i, j);
    std::vector<double> v;
    if (want_vectors) {
        v.assign(static_cast<std::size_t>(p) * p, 0.0);
        for (int i = 0; i < p; ++i) v[static_cast<std::size_t>(i) * p + i] = 1.0;
    }
    auto at = [&](std::vector<double>& w, int i, int j) -> double& {
        return w[static_cast<std::size_t>(i) * p + j];
    };

    double fro2 = 0.0;
    for (double x : m) fro2 += x * x;
    double stop = 1e-28 * std::max(fro2, 1e-300);

    int sweep = 0;
    for (; sweep < 64; ++sweep) {
        double off2 = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) off2 += 2.0 * at(m, i, j) * at(m, i, j);
        if (off2 <= stop) break;
        for (int i = 0; i < p; ++i) {
            for (int j = i + 1; j < p; ++j) {
                double apq = at(m, i, j);
                if (apq == 0.0) continue;
                double theta = (at(m, j, j) - at(m, i, i)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                for (int r = 0; r < p; ++r) {
                    double mri = at(m, r, i), mrj = at(m, r, j);
                    at(m, r, i) = c * mri - s * mrj;
                    at(m, r, j) = s * mri + c * mrj;
                }
                for (int r = 0; r < p; ++r) {
                    double mir = at(m, i, r), mjr = at(m, j, r);
                    at(m, i, r) = c * mir - s * mjr;
                    at(m, j, r) = s * mir + c * mjr;
                }
                if (want_vectors) {
                    for (int r = 0; r < p; ++r) {
                        double vri = at(v, r, i), vrj = at(v, r, j);
                        at(v, r, i) = c * vri - s * vrj;
                        at(v, r, j) = s * vri + c * vrj;
                    }
                }
            }
        }
    }

    EigenDecomposition out;
    out.sweeps = sweep;
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return m[static_cast<std::size_t>(a) * p + a] < m[static_cast<std::size_t>(b) * p + b];
    });
    out.values.resize(p);
    if (want_vectors) out.vectors.resize(p);
    for (int k = 0; k < p; ++k) {
        out.values[k] = m[static_cast<std::size_t>(order[k]) * p + order[k]];
        if (want_vectors) {
            out.vectors[k].resize(p);
            for (int r = 0; r < p; ++r)
                out.vectors[k][r] = v[static_cast<std::size_t>(r) * p + order[k]];
            canonicalize_sign(out.vectors[k]);
        }
    }
    return out;
}

namespace {

// Top eigenvalue of [[a,b],[b,c]]; optionally its eigenvector. Of the two
// algebraic eigenvector forms take the one whose subtraction keeps precision.
double eig2x2(double a, double b, double c, double* e0 = nullptr, double* e1 = nullptr) {
    double half = 0.5 * (a + c);
    double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    double val = half + disc;
    if (e0 != nullptr) {
        double u0, u1;
        double da = val - a, dc = val - c;
        if (std::fabs(da) >= std::fabs(dc)) {
            u0 = b;
            u1 = da;
        } else {
            u0 = dc;
            u1 = b;
        }
        double n = std::sqrt(u0 * u0 + u1 * u1);
        if (n > 0.0) {
            *e0 = u0 / n;
            *e1 = u1 / n;
        } else {  // multiple of I: any direction
            *e0 = 1.0;
            *e1 = 0.0;
        }
    }
    return val;
}

// Shifted block power iteration, block size 2. The shift makes the target
// eigenvalue dominant in magnitude; Rayleigh-Ritz on the block gives the
// estimate and its residual. With an orthonormal block the Ritz value never
// exceeds lambda_max, so the returned value underestimates by at most the
// residual norm. A small residual alone cannot tell the top eigenpair from
// an interior one the iterate got confined to, so convergence is additionally
// checked against the best 2x2 principal-submatrix eigenvalue (a true lower
// bound on lambda_max); a converged value below it means confinement, and the
// witnessing pair direction is injected to break out.
EigenPair block_power(const SymMatrix& A, double tol,
                      std::vector<std::vector<double>>& warm) {
    int p = A.dim();
    if (p == 1) {
        warm.assign(1, std::vector<double>{1.0});
        return EigenPair{A(0, 0), {1.0}, 0};
    }

    double shift = 0.0;
    double gersh_high = -std::numeric_limits<double>::infinity();
    {
        double low = std::numeric_limits<double>::infinity();
        for (int i = 0; i < p; ++i) {
            double row = 0.0;
            for (int j = 0; j < p; ++j)
                if (j != i) row += std::fabs(A(i, j));
            low = std::min(low, A(i, i) - row);
            gersh_high = std::max(gersh_high, A(i, i) + row);
        }
        if (low < 0.0) shift = -low;
    }

    // Best pair bound: lambda_max(A) >= lambda_max of every 2x2 principal
    // submatrix (and of every diagonal entry, the b = 0 case subsumes it).
    double pair_bound = -std::numeric_limits<double>::infinity();
    int pbi = 0, pbj = 1;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            double val = eig2x2(A(i, i), A(i, j), A(j, j));
            if (val > pair_bound) {
                pair_bound = val;
                pbi = i;
                pbj = j;
            }
        }

    std::vector<double> x0, x1;
    if (warm.size() >= 1 && static_cast<int>(warm[0].size()) == p) x0 = warm[0];
    else {
        x0.assign(p, 1.0 / std::sqrt(static_cast<double>(p)));
        x0[A.argmax_diag()] += 1.0;
    }
    if (warm.size() >= 2 && static_cast<int>(warm[1].size()) == p) x1 = warm[1];
    else x1 = hash_vector(p, 0xA5A5A5A5u);

    auto renorm = [&](std::vector<double>& v) {
        double n = norm2(v);
        if (!(n > 1e-300)) v = hash_vector(p, 0x5EED5EEDu);  // also catches NaN
        else for (double& x : v) x /= n;
    };
    renorm(x0);
    double c = dot(x0, x1);
    for (int i = 0; i < p; ++i) x1[i] -= c * x0[i];
    renorm(x1);

    std::vector<double> z0(p), z1(p), resid(p);
    EigenPair best;
    double best_resid = std::numeric_limits<double>::infinity();
    const int max_iter = 200000;
    int stall = 0;
    int injections = 0;
    bool reseed = false;

    for (int it = 1; it <= max_iter; ++it) {
        A.apply(x0.data(), z0.data());
        A.apply(x1.data(), z1.data());
        if (shift != 0.0)
            for (int i = 0; i < p; ++i) {
                z0[i] += shift * x0[i];
                z1[i] += shift * x1[i];
            }
        // Rayleigh-Ritz on span{x0, x1}: 2x2 symmetric eigenproblem. When s01
        // is negligible the naive eigenvector form (s01, rho - s00) is pure
        // roundoff and can pick the wrong basis vector; eig2x2 avoids that.
        double s00 = dot(x0, z0), s01 = dot(x0, z1), s11 = dot(x1, z1);
        double c0, c1;
        double rho = eig2x2(s00, s01, s11, &c0, &c1);

        double lam = rho - shift;
        double rn = 0.0;
        for (int i = 0; i < p; ++i) {
            double vi = c0 * x0[i] + c1 * x1[i];
            double ri = c0 * z0[i] + c1 * z1[i] - rho * vi;
            resid[i] = vi;  // reuse as the Ritz vector buffer
            rn += ri * ri;
        }
        rn = std::sqrt(rn);

        if (rn < best_resid) {
            best_resid = rn;
            best.value = lam;
            best.vector = resid;
            best.iterations = it;
            stall = 0;
        } else if (++stall >= 300) {
            reseed = true;  // applied after the block update so it survives it
            stall = 0;
        }

        if (rn <= tol * (1.0 + std::fabs(lam))) {
            if (lam + tol * (1.0 + std::fabs(lam)) >= pair_bound || injections >= 32) {
                double nv = norm2(resid);
                for (double& x : resid) x /= nv;
                canonicalize_sign(resid);
                warm.assign(2, std::vector<double>());
                warm[0] = resid;
                warm[1] = x1;
                return EigenPair{lam, resid, it};
            }
            // Converged below a certified lower bound: the iterate is stuck in
            // an invariant subspace missing the top eigenvector. The best pair
            // direction has Rayleigh quotient >= pair_bound, so spanning it
            // pushes the next Ritz value above the false limit.
            ++injections;
            double e0, e1;
            eig2x2(A(pbi, pbi), A(pbi, pbj), A(pbj, pbj), &e0, &e1);
            x1.assign(p, 0.0);
            x1[pbi] = e0;
            x1[pbj] = e1;
            double dj = dot(x0, x1);
            for (int i = 0; i < p; ++i) x1[i] -= dj * x0[i];
            renorm(x1);
            stall = 0;
            continue;  // recompute the block products with the injected pair
        }

        // Next block: the two Ritz directions, power-stepped.
        std::vector<double> y0(p), y1(p);
        for (int i = 0; i < p; ++i) {
            y0[i] = c0 * z0[i] + c1 * z1[i];
            y1[i] = -c1 * z0[i] + c0 * z1[i];
        }
        x0 = std::move(y0);
        x1 = std::move(y1);
        renorm(x0);
        double pre = norm2(x1);
        double d = dot(x0, x1);
        for (int i = 0; i < p; ++i) x1[i] -= d * x0[i];
        double post = norm2(x1);
        // The second direction degenerates when the iterate is rank deficient
        // (the rotation cancels y1 down to roundoff, e.g. one surviving entry
        // after soft thresholding). Reseed it orthogonally to x0, salted by
        // the iteration count so no state can ever repeat exactly; the Ritz
        // step needs an orthonormal basis or its value stops being a bound.
        if (reseed || !(post > 1e-8 * pre)) {
            x1 = hash_vector(p, 0xC0FFEEULL + static_cast<std::uint64_t>(it));
            double d2 = dot(x0, x1);
            for (int i = 0; i < p; ++i) x1[i] -= d2 * x0[i];
            renorm(x1);
            reseed = false;
        } else {
            for (double& x : x1) x /= post;
        }
    }

    // The Ritz value and the pair bound are true lower bounds; the Gershgorin
    // row bound is a true upper bound even when the iteration went nowhere.
    throw SolverError("largest_eigenvalue: iteration budget exhausted",
                      std::max(best.value, pair_bound), gersh_high);
}

// Connected components of the off-diagonal nonzero pattern, as sorted index
// lists ordered by smallest member. Union-find with path halving.
std::vector<std::vector<int>> components(const SymMatrix& A) {
    int p = A.dim();
    std::vector<int> parent(p);
    for (int i = 0; i < p; ++i) parent[i] = i;
    auto find = [&](int i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    const std::vector<double>& a = A.packed();
    std::size_t t = 0;
    for (int i = 0; i < p; ++i) {
        ++t;  // diagonal entry
        for (int j = i + 1; j < p; ++j, ++t)
            if (a[t] != 0.0) {
                int ri = find(i), rj = find(j);
                if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
            }
    }
    std::vector<std::vector<int>> comps;
    std::vector<int> slot(p, -1);
    for (int i = 0; i < p; ++i) {
        int r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(comps.size());
            comps.emplace_back();
        }
        comps[slot[r]].push_back(i);
    }
    return comps;
}

}  // namespace

EigenPair largest_eigenvalue_warm(const SymMatrix& A, double tol,
                                  std::vector<std::vector<double>>& warm) {
    if (tol <= 0.0) throw std::invalid_argument("largest_eigenvalue: tol must be > 0");
    check_finite(A);
    int p = A.dim();

    // Zeroed entries (soft thresholding) decouple the matrix into independent
    // blocks. Power iterates carry exactly zero mass across blocks, so a warm
    // start from a previous matrix can never discover a top eigenvector that
    // moved to another block; solving per component removes that failure mode
    // and makes the isolated-vertex tail of the threshold grid free.
    std::vector<std::vector<int>> comps = components(A);
    if (comps.size() == 1) return block_power(A, tol, warm);

    EigenPair bestp;
    bestp.value = -std::numeric_limits<double>::infinity();
    std::vector<int> best_comp;
    std::vector<std::vector<double>> best_subwarm;
    bool best_has_block = false;
    int iters = 0;

    for (const std::vector<int>& comp : comps) {
        double val;
        std::vector<double> vec;
        std::vector<std::vector<double>> subwarm;
        bool has_block = false;
        if (comp.size() == 1) {
            val = A(comp[0], comp[0]);
            vec = {1.0};
        } else {
            SymMatrix sub = principal_submatrix(A, comp);
            // Restrict the warm block to this component; keep a row only if
            // it retains enough mass to be a meaningful start.
            for (const std::vector<double>& w : warm) {
                if (static_cast<int>(w.size()) != p) continue;
                std::vector<double> r(comp.size());
                for (std::size_t t = 0; t < comp.size(); ++t) r[t] = w[comp[t]];
                if (norm2(r) > 1e-6) subwarm.push_back(std::move(r));
            }
            if (comp.size() <= 32) {
                EigenDecomposition d = jacobi_eigen(sub, true);
                val = d.values.back();
                vec = d.vectors.back();
                iters += d.sweeps;
            } else {
                EigenPair e = block_power(sub, tol, subwarm);
                val = e.value;
                vec = std::move(e.vector);
                iters += e.iterations;
                has_block = true;
            }
        }
        if (val > bestp.value) {
            bestp.value = val;
            bestp.vector = std::move(vec);
            best_comp = comp;
            best_subwarm = std::move(subwarm);
            best_has_block = has_block;
        }
    }

    std::vector<double> full(p, 0.0);
    for (std::size_t t = 0; t < best_comp.size(); ++t)
        full[best_comp[t]] = bestp.vector[t];
    bestp.vector = full;
    bestp.iterations = iters;

    warm.assign(1, bestp.vector);
    if (best_has_block && best_subwarm.size() >= 2) {
        std::vector<double> x1(p, 0.0);
        for (std::size_t t = 0; t < best_comp.size(); ++t)
            x1[best_comp[t]] = best_subwarm[1][t];
        warm.push_back(std::move(x1));
    }
    return bestp;
}

EigenPair largest_eigenvalue(const SymMatrix& A, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("largest_eigenvalue: tol must be > 0");
    check_finite(A);
    if (A.dim() <= 64) {
        EigenDecomposition d = jacobi_eigen(A, true);
        EigenPair out;
        out.value = d.values.back();
        out.vector = d.vectors.back();
        out.iterations = d.sweeps;
        return out;
    }
    std::vector<std::vector<double>> warm;
    return largest_eigenvalue_warm(A, tol, warm);
}

}  // namespace spcd
