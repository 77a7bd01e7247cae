#pragma once

#include <stdexcept>
#include <vector>

#include "spcd/sym_matrix.hpp"

namespace spcd {

// Thrown when an iterative solver exhausts its budget. Carries the best
// certified enclosure so callers can still report a rigorous interval.
class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& what, double lower, double upper)
        : std::runtime_error(what), lower_(lower), upper_(upper) {}
    double lower() const { return lower_; }
    double upper() const { return upper_; }

  private:
    double lower_, upper_;
};

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
    int iterations = 0;
};

// Full symmetric eigendecomposition by cyclic Jacobi rotations.
// values come back sorted ascending; vectors[k] is the eigenvector for
// values[k]. Deterministic for a given input.
struct EigenDecomposition {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
    int sweeps = 0;
};
EigenDecomposition jacobi_eigen(const SymMatrix& A, bool want_vectors = true);

// Largest eigenpair. Dispatch: full Jacobi decomposition for p <= 64,
// shifted block power iteration (block 2, Rayleigh-Ritz extraction) above.
// Contract: |A v - value v|_2 <= tol (1 + |value|), |v|_2 = 1 within 1e-12.
// The Rayleigh quotient never exceeds lambda_max, so `value` approaches
// the true maximum from below by at most the residual norm.
EigenPair largest_eigenvalue(const SymMatrix& A, double tol = 1e-10);

// Iterative path with caller-managed warm start, used by the soft-threshold
// grid scans where consecutive matrices are close. `warm` supplies the
// previous dominant vector (and optionally a second basis vector); on return
// it holds the new block for the next call. Works at every dimension.
// Solves per connected component of the off-diagonal pattern: zeroed entries
// decouple the matrix into blocks a power iterate cannot cross, so a stale
// warm vector could otherwise pin the result to the wrong block.
EigenPair largest_eigenvalue_warm(const SymMatrix& A, double tol,
                                  std::vector<std::vector<double>>& warm);

// Eigenvector sign convention used across the library: the entry of largest
// magnitude (smallest index on ties) is made positive.
void canonicalize_sign(std::vector<double>& v);

}  // namespace spcd
