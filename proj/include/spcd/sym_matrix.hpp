#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace spcd {

// Dense symmetric matrix with a single stored copy of each entry (packed
// upper triangle, row-major). Symmetry is structural: A_ij and A_ji are the
// same memory. The PSD flag is advisory metadata set by constructors that
// guarantee it (e.g. empirical covariance); it is asserted only in tests.
class SymMatrix {
  public:
    SymMatrix() = default;
    explicit SymMatrix(int dim, double fill = 0.0);

    static SymMatrix identity(int dim);

    int dim() const { return dim_; }

    double operator()(int i, int j) const { return a_[index(i, j)]; }
    void set(int i, int j, double v) { a_[index(i, j)] = v; }
    void add(int i, int j, double v) { a_[index(i, j)] += v; }

    bool psd_flag() const { return psd_flag_; }
    void set_psd_flag(bool f) { psd_flag_ = f; }

    // y = A x. Each packed entry is visited once.
    void apply(const double* x, double* y) const;
    void apply(const std::vector<double>& x, std::vector<double>& y) const;

    double quad_form(const std::vector<double>& x) const;

    double max_abs() const;          // |A|_inf, entrywise over the full matrix
    double max_diag() const;
    int argmax_diag() const;         // smallest index on ties
    double trace() const;
    double frobenius_norm() const;

    // Packed storage access for kernels that stream all entries.
    std::size_t packed_size() const { return a_.size(); }
    const std::vector<double>& packed() const { return a_; }
    std::vector<double>& packed_mut() { return a_; }

    std::size_t index(int i, int j) const {
        if (i > j) std::swap(i, j);
        return static_cast<std::size_t>(i) * (2 * dim_ - i - 1) / 2 + j;
    }

  private:
    int dim_ = 0;
    std::vector<double> a_;
    bool psd_flag_ = false;
};

// n x p data matrix, rows are observations. Entries must be finite.
class DataMatrix {
  public:
    DataMatrix() = default;
    DataMatrix(int n, int p);

    int n() const { return n_; }
    int p() const { return p_; }

    double operator()(int i, int j) const { return x_[static_cast<std::size_t>(i) * p_ + j]; }
    double& operator()(int i, int j) { return x_[static_cast<std::size_t>(i) * p_ + j]; }

    const double* row(int i) const { return x_.data() + static_cast<std::size_t>(i) * p_; }
    double* row(int i) { return x_.data() + static_cast<std::size_t>(i) * p_; }

    const std::vector<double>& flat() const { return x_; }

  private:
    int n_ = 0;
    int p_ = 0;
    std::vector<double> x_;
};

// (1/n) sum_i X_i X_i^T, no mean-centering (the model is mean-zero).
// Result is PSD-flagged. Throws std::invalid_argument on empty data.
SymMatrix empirical_covariance(const DataMatrix& X);

// (A_ij) for i, j in S, in sorted order of S. S must be nonempty, in-range,
// duplicate-free.
SymMatrix principal_submatrix(const SymMatrix& A, const std::vector<int>& S);

// Entrywise sign(a)(|a| - z)_+, diagonal included. z >= 0.
SymMatrix soft_threshold(const SymMatrix& A, double z);

// A = Delta + Psi with Delta carrying the diagonal and Psi the off-diagonal
// entries; recomposition is exact.
std::pair<SymMatrix, SymMatrix> diag_offdiag_split(const SymMatrix& A);

// Text format: first line "p", then p rows of p space-separated values.
// Parsing rejects asymmetry beyond 1e-12 and symmetrizes the rest by
// averaging (packed storage keeps one copy per pair).
std::string format_matrix_text(const SymMatrix& A);
SymMatrix parse_matrix_text(const std::string& text);
SymMatrix read_matrix_file(const std::string& path);

}  // namespace spcd
