#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spcd/sym_matrix.hpp"

namespace spcd {

enum class StatName { LAMBDA_K, SDP, MDP, DIAG };

std::string to_string(StatName s);
StatName stat_from_string(const std::string& s);

struct StatValue {
    StatName name = StatName::DIAG;
    double value = 0.0;
    std::optional<std::vector<int>> support;  // attaining subset (LAMBDA_K)
    std::optional<double> z_star;             // attaining threshold (MDP)
    std::optional<double> lower_cert;         // certified bounds (SDP)
    std::optional<double> upper_cert;
    int iterations = 0;
};

struct SdpSolverConfig {
    double eps = 1e-3;  // certified half-width target: upper - lower <= 2 eps
    int max_outer = 80;   // certificate rounds
    int max_inner = 50;   // splitting iterations per round
    enum class StepRule { FIXED, BACKTRACKING } step_rule = StepRule::BACKTRACKING;
};

// Exact k-sparse largest eigenvalue: max over |S| = k of lambda_max(A_S).
// Exhaustive scan in colex order with revolving-door subset updates; the
// enumeration budget C(p,k) <= 10^7 guards against accidental blowup.
// Tie-break: lexicographically smallest attaining S under value-equality
// tolerance 1e-12.
StatValue lambda_k_max(const SymMatrix& A, int k);

// Number of k-subsets, saturating at 2^63-1; used for the budget guard.
unsigned long long subset_count(int p, int k);

// min over z >= 0 of lambda_max(soft_threshold(A, z)) + k z. Uniform grid of
// grid_size points on [0, |A|_inf] (phi(z) = kz beyond that), then
// golden-section refinement inside the best point's bracketing cell. The
// objective is not assumed unimodal: the result never exceeds the grid
// minimum. Every evaluated phi(z) upper-bounds the SDP relaxation, so the
// value is a certified upper bound for it and for the k-sparse eigenvalue.
StatValue mdp(const SymMatrix& A, int k, int grid_size = 512);

// Semidefinite relaxation: max Tr(AZ) over PSD Z, Tr Z = 1, |Z|_1 <= k.
// Certified: lower_cert from an exactly feasible Z, upper_cert from dual
// candidates U via lambda_max(A+U) + k|U|_inf (valid for any symmetric U);
// returns with upper - lower <= 2 cfg.eps or throws SolverError carrying the
// best interval. k = 1 reduces exactly to the diagonal maximum; k >= p makes
// the l1 constraint inactive (|Z|_1 <= p on the spectahedron) and reduces to
// lambda_max.
StatValue sdp(const SymMatrix& A, int k, const SdpSolverConfig& cfg = {});

// Max diagonal entry; ties broken by smallest index.
StatValue diag_stat(const SymMatrix& A);

// Smallest integer >= k * eps^(1/(1-2/q)); the effective sparsity at which
// truncation of an lq-ball vector loses at most eps of squared overlap.
int k_q(int k, double q, double eps);

// Keep the r largest-|v_i)| coordinates (ties by smallest index), zero the
// rest, renormalize. Requires |v|_2 = 1 within 1e-10.
std::vector<double> sparse_truncate(const std::vector<double>& v, int r);

// Projection of w onto the probability simplex {x >= 0, sum x = 1}.
std::vector<double> project_simplex(const std::vector<double>& w);

// Nearest symmetric matrix (Frobenius) with full-matrix l1 norm <= budget;
// off-diagonal entries count twice. Uniform soft-threshold at an exactly
// computed level.
SymMatrix project_l1_ball(const SymMatrix& M, double budget);

// Full-matrix l1 norm |M|_1 with off-diagonal entries counted twice.
double l1_norm_full(const SymMatrix& M);

}  // namespace spcd
