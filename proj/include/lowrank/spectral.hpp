#pragma once

#include <functional>
#include <vector>

#include "lowrank/matrix.hpp"

namespace lowrank {

// Eigendecomposition of a symmetric matrix: X = Q diag(w) Q^T with
// eigenvalues sorted descending and Q's columns orthonormal.
struct SpectralDecomp {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;

    int dim() const { return static_cast<int>(eigenvalues.size()); }
    double spectral_radius() const;
};

inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kJacobiTolFactor = 1e-12; // off-diagonal target, relative to ||X||_F
inline constexpr double kDefaultRankTol = 1e-8;

// Cyclic Jacobi. Deterministic for a fixed input; throws InvalidInput on
// non-finite entries, NumericalFailure if the sweep limit is exhausted.
SpectralDecomp eig_sym(const SymMatrix& x);

// Q diag(w) Q^T (exactly symmetric output).
SymMatrix reconstruct(const SpectralDecomp& d);

// Q diag(g(w)) Q^T for a scalar function g applied to the spectrum.
SymMatrix apply_spectral(const SymMatrix& x, const std::function<double(double)>& g);
SymMatrix apply_spectral(const SpectralDecomp& d, const std::function<double(double)>& g);

// Frobenius projection onto {X PSD : sigma_max(X) <= radius}; clamps the
// spectrum to [0, radius].
SymMatrix project_psd_ball(const SymMatrix& x, double radius);

// Self-adjoint dilation [0 M; M^T 0]; its nonzero eigenvalues are plus and
// minus the singular values of M.
SymMatrix dilate(const Matrix& m);

// Number of eigenvalues above tol * max(1, spectral radius).
int numerical_rank(const SpectralDecomp& d, double tol = kDefaultRankTol);
int numerical_rank(const SymMatrix& x, double tol = kDefaultRankTol);

// Sum of singular values; equals the trace on the PSD cone.
double nuclear_norm(const SymMatrix& x);

} // namespace lowrank
