#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spcd/rng.hpp"
#include "spcd/sym_matrix.hpp"

namespace spcd {

// A rank-one spike: the planted direction v is k-sparse with the given
// support, and `direction` is its restriction to the support (unit vector).
struct SpikeSpec {
    int p = 0;
    int k = 0;
    std::vector<int> support;       // sorted, size k
    std::vector<double> direction;  // size k, |.|_2 = 1 within 1e-12
    double theta = 1.0;
};

// Embeds the spike into R^p (zeros off the support).
std::vector<double> full_vector(const SpikeSpec& spike);

// Throws std::invalid_argument when the SpikeSpec invariants fail.
void validate(const SpikeSpec& spike, bool need_theta = true);

enum class SpikeMode {
    FIXED_SUPPORT,   // S = {0..k-1}, direction uniform on the k-sphere
    RANDOM_SUPPORT,  // S uniform over k-subsets, direction uniform
    UNIFORM_KGRID    // S = {0..k-1}, all coordinates 1/sqrt(k)
};
SpikeSpec random_sparse_spike(int p, int k, Seed seed, SpikeMode mode, double theta = 1.0);

// n i.i.d. rows from N(0, I_p).
DataMatrix sample_null(int p, int n, Seed seed);

// n i.i.d. rows with covariance exactly I + theta v v^T, via the rank-one
// square root: X = Z + (sqrt(1+theta) - 1)(v^T Z) v. theta <= 0 is an error
// (use sample_null). When the rank-one scale underflows to exactly 0 the
// null path is reproduced bit-for-bit.
DataMatrix sample_spiked(const SpikeSpec& spike, int n, Seed seed);

enum class SubGaussianFamily {
    RADEMACHER,  // +-1, variance 1
    UNIFORM      // uniform on [-sqrt(3), sqrt(3)], variance 1
};
// Rows Sigma^{1/2} Z with i.i.d. variance-1 sub-Gaussian coefficients Z and
// Sigma = I (no spike) or I + theta v v^T.
DataMatrix sample_subgaussian(const std::optional<SpikeSpec>& spike, int p, int n,
                              SubGaussianFamily family, Seed seed);

// Unit vector with |v|_q <= k^{1/q - 1/2}: a k-sparse spherical base (which
// meets the budget automatically) plus a geometrically decaying dense tail,
// rejected and shrunk until the budget holds.
std::vector<double> lq_spike(int p, int k, double q, Seed seed);

// Worst-case covariance perturbation where both hypotheses produce the
// identical matrix I + (theta/2) v v^T (v uniform on the first k
// coordinates). If warning is non-null it receives a note when theta lies
// outside the regime theta <= 2k sqrt(log(p)/n) that makes the construction
// indistinguishable.
SymMatrix adversarial_covariance(int p, int n, int k, double theta, Seed seed,
                                 std::string* warning = nullptr);

// Generic perturbed-input path: Sigma + N, validating the contamination
// budget |N|_inf <= sqrt(log(p/delta)/n). Violations are an error.
SymMatrix adversarial_covariance(const SymMatrix& sigma, const SymMatrix& noise, int n,
                                 double delta);

struct GraphSample {
    int n = 0;
    SymMatrix adjacency;  // 0/1 entries, zero diagonal
    std::optional<std::vector<int>> planted;
};

// G(n, 1/2) with a clique planted on k uniformly random vertices; k = 0 is
// the plain Erdos-Renyi null.
GraphSample planted_clique_graph(int n, int k, Seed seed);

// Gaussianization of a graph into an n x n data matrix: X_ij = |Z_j^(i)| U_ij
// with U_ij = 2 A_ij - 1 above the diagonal and independent Rademacher signs
// on and below it. With no planted clique the rows are i.i.d. N(0, I_n).
DataMatrix clique_reduction(const GraphSample& g, Seed seed);

// CSV with header "x1,...,xp", one observation per line, %.17g entries.
std::string data_matrix_csv(const DataMatrix& X);

// One "u v" line per edge, vertices 1-indexed, u < v.
std::string edge_list_text(const GraphSample& g);

}  // namespace spcd
