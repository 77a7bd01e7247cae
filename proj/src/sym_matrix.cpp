#include "spcd/sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spcd {

SymMatrix::SymMatrix(int dim, double fill)
    : dim_(dim), a_(static_cast<std::size_t>(dim) * (dim + 1) / 2, fill) {
    if (dim < 1) throw std::invalid_argument("SymMatrix: dim must be >= 1");
}

SymMatrix SymMatrix::identity(int dim) {
    SymMatrix a(dim);
    for (int i = 0; i < dim; ++i) a.set(i, i, 1.0);
    a.set_psd_flag(true);
    return a;
}

void SymMatrix::apply(const double* x, double* y) const {
    for (int i = 0; i < dim_; ++i) y[i] = 0.0;
    const double* a = a_.data();
    for (int i = 0; i < dim_; ++i) {
        double xi = x[i];
        double acc = (*a) * xi;  // diagonal term
        ++a;
        for (int j = i + 1; j < dim_; ++j, ++a) {
            acc += (*a) * x[j];
            y[j] += (*a) * xi;
        }
        y[i] += acc;
    }
}

void SymMatrix::apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.resize(static_cast<std::size_t>(dim_));
    apply(x.data(), y.data());
}

double SymMatrix::quad_form(const std::vector<double>& x) const {
    std::vector<double> y;
    apply(x, y);
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += x[i] * y[i];
    return s;
}

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
}

double SymMatrix::max_diag() const {
    double m = (*this)(0, 0);
    for (int i = 1; i < dim_; ++i) m = std::max(m, (*this)(i, i));
    return m;
}

int SymMatrix::argmax_diag() const {
    int best = 0;
    for (int i = 1; i < dim_; ++i)
        if ((*this)(i, i) > (*this)(best, best)) best = i;
    return best;
}

double SymMatrix::trace() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += (*this)(i, i);
    return s;
}

double SymMatrix::frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
        double d = (*this)(i, i);
        s += d * d;
        for (int j = i + 1; j < dim_; ++j) {
            double v = (*this)(i, j);
            s += 2.0 * v * v;
        }
    }
    return std::sqrt(s);
}

DataMatrix::DataMatrix(int n, int p)
    : n_(n), p_(p), x_(static_cast<std::size_t>(n) * p, 0.0) {
    if (n < 1 || p < 1) throw std::invalid_argument("DataMatrix: n and p must be >= 1");
}

SymMatrix empirical_covariance(const DataMatrix& X) {
    if (X.n() < 1) throw std::invalid_argument("empirical_covariance: empty sample");
    int n = X.n(), p = X.p();
    SymMatrix S(p);
    std::vector<double>& a = S.packed_mut();
    for (int r = 0; r < n; ++r) {
        const double* x = X.row(r);
        double* out = a.data();
        for (int i = 0; i < p; ++i) {
            double xi = x[i];
            for (int j = i; j < p; ++j, ++out) *out += xi * x[j];
        }
    }
    double inv = 1.0 / n;
    for (double& v : a) v *= inv;
    S.set_psd_flag(true);
    return S;
}

SymMatrix principal_submatrix(const SymMatrix& A, const std::vector<int>& S) {
    if (S.empty()) throw std::invalid_argument("principal_submatrix: empty index set");
    std::vector<int> s = S;
    std::sort(s.begin(), s.end());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] >= A.dim())
            throw std::invalid_argument("principal_submatrix: index out of range");
        if (i > 0 && s[i] == s[i - 1])
            throw std::invalid_argument("principal_submatrix: duplicate index");
    }
    SymMatrix B(static_cast<int>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i; j < s.size(); ++j) B.set(static_cast<int>(i), static_cast<int>(j), A(s[i], s[j]));
    B.set_psd_flag(A.psd_flag());
    return B;
}

SymMatrix soft_threshold(const SymMatrix& A, double z) {
    if (z < 0.0 || !std::isfinite(z))
        throw std::invalid_argument("soft_threshold: z must be >= 0 and finite");
    SymMatrix B(A.dim());
    const std::vector<double>& in = A.packed();
    std::vector<double>& out = B.packed_mut();
    for (std::size_t t = 0; t < in.size(); ++t) {
        double v = in[t];
        double m = std::fabs(v) - z;
        out[t] = m > 0.0 ? (v > 0.0 ? m : -m) : 0.0;
    }
    return B;
}

std::pair<SymMatrix, SymMatrix> diag_offdiag_split(const SymMatrix& A) {
    int p = A.dim();
    SymMatrix d(p), o(p);
    for (int i = 0; i < p; ++i) {
        d.set(i, i, A(i, i));
        for (int j = i + 1; j < p; ++j) o.set(i, j, A(i, j));
    }
    return {d, o};
}

std::string format_matrix_text(const SymMatrix& A) {
    std::ostringstream out;
    out << A.dim() << "\n";
    char buf[40];
    for (int i = 0; i < A.dim(); ++i) {
        for (int j = 0; j < A.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", A(i, j));
            out << (j ? " " : "") << buf;
        }
        out << "\n";
    }
    return out.str();
}

SymMatrix parse_matrix_text(const std::string& text) {
    std::istringstream in(text);
    int p = 0;
    if (!(in >> p) || p < 1) throw std::invalid_argument("matrix text: bad dimension line");
    std::vector<double> full(static_cast<std::size_t>(p) * p);
    for (std::size_t t = 0; t < full.size(); ++t)
        if (!(in >> full[t])) throw std::invalid_argument("matrix text: too few entries");
    SymMatrix A(p);
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            double u = full[static_cast<std::size_t>(i) * p + j];
            double l = full[static_cast<std::size_t>(j) * p + i];
            if (std::fabs(u - l) > 1e-12)
                throw std::invalid_argument("matrix text: asymmetry beyond 1e-12");
            A.set(i, j, 0.5 * (u + l));
        }
    }
    return A;
}

SymMatrix read_matrix_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open matrix file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_matrix_text(ss.str());
}

}  // namespace spcd
