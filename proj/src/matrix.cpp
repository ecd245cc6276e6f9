#include "lowrank/matrix.hpp"

#include <cmath>
#include <cstdlib>

#include "lowrank/errors.hpp"

namespace lowrank {

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw InvalidInput("Matrix: negative dimension");
    a_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.cols() != rhs.rows()) throw InvalidInput("Matrix multiply: shape mismatch");
    Matrix out(lhs.rows(), rhs.cols());
    for (int i = 0; i < lhs.rows(); ++i) {
        for (int k = 0; k < lhs.cols(); ++k) {
            const double lik = lhs(i, k);
            if (lik == 0.0) continue;
            for (int j = 0; j < rhs.cols(); ++j) out(i, j) += lik * rhs(k, j);
        }
    }
    return out;
}

SymMatrix::SymMatrix(int dim) : dim_(dim) {
    if (dim < 1) throw InvalidInput("SymMatrix: dim must be >= 1");
    a_.assign(static_cast<std::size_t>(dim) * dim, 0.0);
}

SymMatrix SymMatrix::identity(int dim) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diag(std::span<const double> d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim(); ++i) m.set(i, i, d[i]);
    return m;
}

SymMatrix SymMatrix::from_rows(int dim, std::span<const double> row_major) {
    if (static_cast<std::size_t>(dim) * dim != row_major.size())
        throw InvalidInput("SymMatrix::from_rows: size mismatch");
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) {
            double lo = row_major[static_cast<std::size_t>(i) * dim + j];
            double hi = row_major[static_cast<std::size_t>(j) * dim + i];
            if (lo != hi) throw InvalidInput("SymMatrix::from_rows: input not symmetric");
            m.set(i, j, lo);
        }
    }
    return m;
}

SymMatrix SymMatrix::symmetrized(const Matrix& m) {
    if (m.rows() != m.cols()) throw InvalidInput("SymMatrix::symmetrized: not square");
    SymMatrix out(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j <= i; ++j) out.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    return out;
}

void SymMatrix::set(int i, int j, double v) {
    a_[static_cast<std::size_t>(i) * dim_ + j] = v;
    a_[static_cast<std::size_t>(j) * dim_ + i] = v;
}

double SymMatrix::trace() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += (*this)(i, i);
    return s;
}

double SymMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

bool SymMatrix::all_finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& rhs) {
    if (dim_ != rhs.dim_) throw InvalidInput("SymMatrix: dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += rhs.a_[i];
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& rhs) {
    if (dim_ != rhs.dim_) throw InvalidInput("SymMatrix: dimension mismatch");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= rhs.a_[i];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

SymMatrix operator+(SymMatrix lhs, const SymMatrix& rhs) { return lhs += rhs; }
SymMatrix operator-(SymMatrix lhs, const SymMatrix& rhs) { return lhs -= rhs; }
SymMatrix operator*(double s, SymMatrix m) { return m *= s; }

double inner(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw InvalidInput("inner: dimension mismatch");
    double s = 0.0;
    auto da = a.data();
    auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) s += da[i] * db[i];
    return s;
}

double frobenius_distance(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) throw InvalidInput("frobenius_distance: dimension mismatch");
    double s = 0.0;
    auto da = a.data();
    auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        double d = da[i] - db[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace lowrank
