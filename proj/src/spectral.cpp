#include "lowrank/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lowrank/errors.hpp"

namespace lowrank {

double SpectralDecomp::spectral_radius() const {
    if (eigenvalues.empty()) return 0.0;
    return std::max(std::abs(eigenvalues.front()), std::abs(eigenvalues.back()));
}

namespace {

double offdiag_norm(const Matrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
}

} // namespace

SpectralDecomp eig_sym(const SymMatrix& x) {
    if (!x.all_finite()) throw InvalidInput("eig_sym: non-finite entries");
    const int p = x.dim();

    Matrix a(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a(i, j) = x(i, j);
    Matrix q = Matrix::identity(p);

    const double target = kJacobiTolFactor * x.frobenius_norm();

    bool converged = offdiag_norm(a) <= target;
    for (int sweep = 0; sweep < kJacobiMaxSweeps && !converged; ++sweep) {
        for (int i = 0; i < p - 1; ++i) {
            for (int j = i + 1; j < p; ++j) {
                const double apq = a(i, j);
                if (apq == 0.0) continue;
                const double app = a(i, i);
                const double aqq = a(j, j);
                // Rotation angle from the 2x2 block; branch keeps |t| <= 1
                // for numerical stability.
                const double theta = 0.5 * (aqq - app) / apq;
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (int k = 0; k < p; ++k) {
                    const double aki = a(k, i);
                    const double akj = a(k, j);
                    a(k, i) = c * aki - s * akj;
                    a(k, j) = s * aki + c * akj;
                }
                for (int k = 0; k < p; ++k) {
                    const double aik = a(i, k);
                    const double ajk = a(j, k);
                    a(i, k) = c * aik - s * ajk;
                    a(j, k) = s * aik + c * ajk;
                }
                a(i, j) = 0.0;
                a(j, i) = 0.0;
                for (int k = 0; k < p; ++k) {
                    const double qki = q(k, i);
                    const double qkj = q(k, j);
                    q(k, i) = c * qki - s * qkj;
                    q(k, j) = s * qki + c * qkj;
                }
            }
        }
        converged = offdiag_norm(a) <= target;
    }
    if (!converged) throw NumericalFailure("eig_sym: Jacobi sweeps exhausted");

    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int lhs, int rhs) { return a(lhs, lhs) > a(rhs, rhs); });

    SpectralDecomp d;
    d.eigenvalues.resize(p);
    d.eigenvectors = Matrix(p, p);
    for (int j = 0; j < p; ++j) {
        d.eigenvalues[j] = a(order[j], order[j]);
        for (int i = 0; i < p; ++i) d.eigenvectors(i, j) = q(i, order[j]);
    }
    return d;
}

SymMatrix reconstruct(const SpectralDecomp& d) {
    const int p = d.dim();
    const Matrix& q = d.eigenvectors;
    SymMatrix out(p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int k = 0; k < p; ++k) s += q(i, k) * d.eigenvalues[k] * q(j, k);
            out.set(i, j, s);
        }
    }
    return out;
}

SymMatrix apply_spectral(const SpectralDecomp& d, const std::function<double(double)>& g) {
    SpectralDecomp mapped = d;
    for (double& w : mapped.eigenvalues) w = g(w);
    return reconstruct(mapped);
}

SymMatrix apply_spectral(const SymMatrix& x, const std::function<double(double)>& g) {
    return apply_spectral(eig_sym(x), g);
}

SymMatrix project_psd_ball(const SymMatrix& x, double radius) {
    if (radius <= 0.0) throw InvalidInput("project_psd_ball: radius must be positive");
    return apply_spectral(x, [radius](double w) { return std::clamp(w, 0.0, radius); });
}

SymMatrix dilate(const Matrix& m) {
    const int p = m.rows();
    const int q = m.cols();
    if (p < 1 || q < 1) throw InvalidInput("dilate: empty matrix");
    for (double v : m.data())
        if (!std::isfinite(v)) throw InvalidInput("dilate: non-finite entries");
    SymMatrix out(p + q);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < q; ++j) out.set(i, p + j, m(i, j));
    return out;
}

int numerical_rank(const SpectralDecomp& d, double tol) {
    if (tol < 0.0) throw InvalidInput("numerical_rank: tol must be >= 0");
    const double cutoff = tol * std::max(1.0, d.spectral_radius());
    int r = 0;
    for (double w : d.eigenvalues)
        if (w > cutoff) ++r;
    return r;
}

int numerical_rank(const SymMatrix& x, double tol) { return numerical_rank(eig_sym(x), tol); }

double nuclear_norm(const SymMatrix& x) {
    const SpectralDecomp d = eig_sym(x);
    double s = 0.0;
    for (double w : d.eigenvalues) s += std::abs(w);
    return s;
}

} // namespace lowrank
