#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lowrank {

// Dense row-major rectangular matrix. Used for eigenvector blocks and the
// rectangular input of the self-adjoint dilation.
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols);
    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    std::span<const double> data() const { return a_; }
    std::span<double> data() { return a_; }

    Matrix transposed() const;
    double frobenius_norm() const;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

Matrix operator*(const Matrix& lhs, const Matrix& rhs);

// Dense symmetric p-by-p matrix. Full storage; every mutation path writes
// both (i,j) and (j,i), so entries are mirror-equal exactly, not just to
// rounding.
class SymMatrix {
  public:
    SymMatrix() = default;
    explicit SymMatrix(int dim); // zero matrix
    static SymMatrix identity(int dim);
    static SymMatrix diag(std::span<const double> d);
    // Validates exact symmetry of the input.
    static SymMatrix from_rows(int dim, std::span<const double> row_major);
    // Averages (i,j) and (j,i); for inputs symmetric only up to rounding.
    static SymMatrix symmetrized(const Matrix& m);

    int dim() const { return dim_; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
    void set(int i, int j, double v);

    std::span<const double> data() const { return a_; }

    double trace() const;
    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;

    SymMatrix& operator+=(const SymMatrix& rhs);
    SymMatrix& operator-=(const SymMatrix& rhs);
    SymMatrix& operator*=(double s);

  private:
    int dim_ = 0;
    std::vector<double> a_;
};

SymMatrix operator+(SymMatrix lhs, const SymMatrix& rhs);
SymMatrix operator-(SymMatrix lhs, const SymMatrix& rhs);
SymMatrix operator*(double s, SymMatrix m);

// Frobenius inner product <a, b> = sum_ij a_ij b_ij.
double inner(const SymMatrix& a, const SymMatrix& b);
double frobenius_distance(const SymMatrix& a, const SymMatrix& b);

} // namespace lowrank
