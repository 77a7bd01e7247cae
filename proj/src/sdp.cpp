#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "spcd/eigen.hpp"
#include "spcd/stats.hpp"

namespace spcd {

namespace {

// sum_ij A_ij B_ij over the full matrix (off-diagonal pairs counted twice).
double trace_product(const SymMatrix& A, const SymMatrix& B) {
    const std::vector<double>& a = A.packed();
    const std::vector<double>& b = B.packed();
    int p = A.dim();
    double s = 0.0;
    std::size_t t = 0;
    for (int i = 0; i < p; ++i) {
        s += a[t] * b[t];
        ++t;
        for (int j = i + 1; j < p; ++j, ++t) s += 2.0 * a[t] * b[t];
    }
    return s;
}

double frobenius_diff(const SymMatrix& A, const SymMatrix& B) {
    const std::vector<double>& a = A.packed();
    const std::vector<double>& b = B.packed();
    int p = A.dim();
    double s = 0.0;
    std::size_t t = 0;
    for (int i = 0; i < p; ++i) {
        double d = a[t] - b[t];
        s += d * d;
        ++t;
        for (int j = i + 1; j < p; ++j, ++t) {
            d = a[t] - b[t];
            s += 2.0 * d * d;
        }
    }
    return std::sqrt(s);
}

// Nearest point (Frobenius) on {Z psd, Tr Z = 1}: eigendecompose and project
// the spectrum onto the probability simplex.
SymMatrix proj_spectahedron(const SymMatrix& M) {
    EigenDecomposition ed = jacobi_eigen(M, true);
    std::vector<double> w = project_simplex(ed.values);
    int p = M.dim();
    SymMatrix Z(p);
    for (std::size_t t = 0; t < w.size(); ++t) {
        if (w[t] <= 0.0) continue;
        const std::vector<double>& v = ed.vectors[t];
        for (int i = 0; i < p; ++i)
            for (int j = i; j < p; ++j) Z.add(i, j, w[t] * v[i] * v[j]);
    }
    Z.set_psd_flag(true);
    return Z;
}

// lambda_max with a rigorous upper enclosure even when the iterative solver
// runs out of budget (its exception carries the certified interval).
double lambda_max_upper(const SymMatrix& A, double tol) {
    try {
        EigenPair e = largest_eigenvalue(A, tol);
        return e.value + tol * (1.0 + std::fabs(e.value));
    } catch (const SolverError& err) {
        return err.upper();
    }
}

// A feasible point built from any spectahedron element: if its full l1 norm
// exceeds k, blend toward the best single-coordinate matrix e_i e_i^T until
// the l1 constraint holds. Trace and psd-ness are preserved.
double feasible_lower(const SymMatrix& A, const SymMatrix& Z, int k, int istar) {
    double l1 = l1_norm_full(Z);
    double base = trace_product(A, Z);
    if (l1 <= static_cast<double>(k)) return base;
    double t = (l1 - k) / (l1 - 1.0);
    t = std::min(1.0, std::max(0.0, t));
    return (1.0 - t) * base + t * A(istar, istar);
}

}  // namespace

StatValue sdp(const SymMatrix& A, int k, const SdpSolverConfig& cfg) {
    int p = A.dim();
    if (k < 1) throw std::invalid_argument("sdp: k must be >= 1");
    if (!(cfg.eps > 0.0)) throw std::invalid_argument("sdp: eps must be > 0");
    if (cfg.max_outer < 1 || cfg.max_inner < 1)
        throw std::invalid_argument("sdp: iteration caps must be >= 1");

    StatValue out;
    out.name = StatName::SDP;

    if (k == 1) {
        // l1 <= 1 with trace 1 forces a diagonal matrix with simplex weights.
        out.value = A(A.argmax_diag(), A.argmax_diag());
        out.lower_cert = out.value;
        out.upper_cert = out.value;
        out.iterations = 0;
        return out;
    }
    if (k >= p) {
        // Any unit v has |vv^T|_1 = (sum |v_i|)^2 <= p <= k, so the l1
        // constraint is slack and the optimum is the top eigenvalue.
        const double tol = 1e-12;
        EigenPair e = largest_eigenvalue(A, tol);
        out.value = e.value;
        out.lower_cert = e.value;
        out.upper_cert = e.value + tol * (1.0 + std::fabs(e.value));
        out.iterations = e.iterations;
        return out;
    }

    int istar = A.argmax_diag();
    double best_lower = A(istar, istar);  // e_istar e_istar^T is feasible
    // Every soft-threshold level z gives the dual bound
    // lambda_max(st_z(A)) + k z >= SDP_k(A); a coarse scan seeds the upper
    // certificate before the splitting iteration produces dual iterates.
    double best_upper = mdp(A, k, 33).value;

    if (best_upper - best_lower <= 2.0 * cfg.eps) {
        out.value = 0.5 * (best_lower + best_upper);
        out.lower_cert = best_lower;
        out.upper_cert = best_upper;
        out.iterations = 0;
        return out;
    }

    // Splitting iteration: alternate projections onto the spectahedron and
    // the weighted l1 ball, with a scaled dual accumulator W. The iterates
    // themselves are never trusted: each round produces an independent
    // primal witness (feasible Z) and dual witness (U = +-rho W) and the
    // returned interval comes from those certificates alone.
    double rho = 1.0;
    SymMatrix Z(p), Y(p), W(p), T(p), Yprev(p), B(p);
    const std::vector<double>& ap = A.packed();
    int total_iters = 0;

    for (int round = 0; round < cfg.max_outer; ++round) {
        for (int inner = 0; inner < cfg.max_inner; ++inner) {
            {
                std::vector<double>& tp = T.packed_mut();
                const std::vector<double>& yp = Y.packed();
                const std::vector<double>& wp = W.packed();
                for (std::size_t i = 0; i < tp.size(); ++i)
                    tp[i] = yp[i] - wp[i] + ap[i] / rho;
            }
            Z = proj_spectahedron(T);
            {
                std::vector<double>& tp = T.packed_mut();
                const std::vector<double>& zp = Z.packed();
                const std::vector<double>& wp = W.packed();
                for (std::size_t i = 0; i < tp.size(); ++i) tp[i] = zp[i] + wp[i];
            }
            Yprev = Y;
            Y = project_l1_ball(T, static_cast<double>(k));
            {
                std::vector<double>& wp = W.packed_mut();
                const std::vector<double>& zp = Z.packed();
                const std::vector<double>& yp = Y.packed();
                for (std::size_t i = 0; i < wp.size(); ++i) wp[i] += zp[i] - yp[i];
            }
            ++total_iters;

            if (cfg.step_rule == SdpSolverConfig::StepRule::BACKTRACKING) {
                double rp = frobenius_diff(Z, Y);
                double rd = rho * frobenius_diff(Y, Yprev);
                if (rp > 10.0 * rd) {
                    rho *= 2.0;
                    for (double& w : W.packed_mut()) w *= 0.5;
                } else if (rd > 10.0 * rp) {
                    rho *= 0.5;
                    for (double& w : W.packed_mut()) w *= 2.0;
                }
            }
        }

        best_lower = std::max(best_lower, feasible_lower(A, Z, k, istar));
        double winf = W.max_abs();
        for (double sgn : {1.0, -1.0}) {
            double uinf = rho * winf;
            const std::vector<double>& wp = W.packed();
            std::vector<double>& bp = B.packed_mut();
            for (std::size_t i = 0; i < bp.size(); ++i) bp[i] = ap[i] + sgn * rho * wp[i];
            best_upper = std::min(best_upper, lambda_max_upper(B, 1e-10) + k * uinf);
        }

        if (best_upper - best_lower <= 2.0 * cfg.eps) {
            if (best_upper < best_lower) {
                double mid = 0.5 * (best_lower + best_upper);
                best_lower = best_upper = mid;
            }
            out.value = 0.5 * (best_lower + best_upper);
            out.lower_cert = best_lower;
            out.upper_cert = best_upper;
            out.iterations = total_iters;
            return out;
        }
    }

    throw SolverError(
        "sdp: certificate width " + std::to_string(best_upper - best_lower) +
            " above target " + std::to_string(2.0 * cfg.eps) + " after " +
            std::to_string(total_iters) + " iterations",
        best_lower, best_upper);
}

}  // namespace spcd
