#ifndef SHARPCONE_KERNEL_HPP
#define SHARPCONE_KERNEL_HPP

//
// Dense complex linear algebra shared by every other module: Hermitian
// eigendecomposition, guarded least squares, antilinear operators and
// their polar decomposition, seeded random matrices.
//
// Inner products are linear in the first argument:
//   <u, v> = sum_i u_i conj(v_i) = v^* u.
//

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace sharpcone {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

struct TolerancePolicy {
    double eq_rel = 1e-8;
    double psd_rel = 1e-9;
    double cluster_abs = 1e-6;
    double cond_max = 1e10;

    void validate() const
    {
        if (!(eq_rel > 0 && psd_rel > 0 && cluster_abs > 0 && cond_max > 0))
            throw Error(ErrorKind::InvalidInput, "tolerances must be strictly positive");
        if (!(eq_rel > psd_rel))
            throw Error(ErrorKind::InvalidInput, "eq_rel must exceed psd_rel");
    }
};

// ---------------------------------------------------------------------------
// small helpers
// ---------------------------------------------------------------------------

inline double fro(const CMatrix& a) { return a.norm(); }

/// <u, v>, linear in u.
inline Complex inner(const CVector& u, const CVector& v) { return v.dot(u); }

inline CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

inline bool all_finite(const CMatrix& a) { return a.allFinite(); }

/// Residual ||a - b|| scaled by max(1, scale).
inline double rel_residual(double abs_residual, double scale)
{
    return abs_residual / std::max(1.0, scale);
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b)
{
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Operator norm of a matrix.
inline double op_norm(const CMatrix& a)
{
    if (a.size() == 0)
        return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition
// ---------------------------------------------------------------------------

struct HermEig {
    RVector values;  // ascending
    CMatrix vectors; // unitary, columns are eigenvectors
};

inline double hermitian_residual(const CMatrix& a) { return (a - a.adjoint()).norm(); }

inline HermEig herm_eig(const CMatrix& a, const TolerancePolicy& tol = {})
{
    if (a.rows() != a.cols())
        throw Error(ErrorKind::ShapeMismatch, "herm_eig needs a square matrix");
    const double scale = a.norm();
    if (hermitian_residual(a) > tol.eq_rel * scale)
        throw Error(ErrorKind::NotHermitian,
                    "symmetry residual " + std::to_string(hermitian_residual(a)));
    if (a.rows() == 0)
        return {RVector(0), CMatrix(0, 0)};
    const CMatrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// f(A) for Hermitian A through its eigendecomposition.
template <typename F>
CMatrix spectral_apply(const HermEig& eig, F&& f)
{
    const Eigen::Index n = eig.values.size();
    CVector fv(n);
    for (Eigen::Index i = 0; i < n; ++i)
        fv(i) = f(eig.values(i));
    return eig.vectors * fv.asDiagonal() * eig.vectors.adjoint();
}

/// Groups ascending eigenvalues whose gap, measured after dividing by the
/// spectral radius, is at most cluster_abs. Returns [begin, end) index pairs.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>>
cluster_eigenvalues(const RVector& values, double cluster_abs)
{
    std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
    const Eigen::Index n = values.size();
    if (n == 0)
        return out;
    const double radius = std::max(values.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= n; ++i) {
        if (i == n || (values(i) - values(i - 1)) / radius > cluster_abs) {
            out.emplace_back(start, i);
            start = i;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// least squares
// ---------------------------------------------------------------------------

template <typename Rhs>
struct SolveResult {
    Rhs x;
    double residual = 0.0;
    double condition = 1.0;
};

/// Least-squares solution of A x = b with a condition guard. The zero map is
/// accepted and returns x = 0 with residual ||b||.
template <typename Rhs>
SolveResult<Rhs> lin_solve(const CMatrix& a, const Rhs& b, const TolerancePolicy& tol = {})
{
    if (a.rows() != b.rows())
        throw Error(ErrorKind::ShapeMismatch, "lin_solve: row count mismatch");
    if (a.cols() > a.rows())
        throw Error(ErrorKind::ShapeMismatch, "lin_solve: underdetermined system");
    SolveResult<Rhs> out;
    if (a.cols() == 0 || a.norm() == 0.0) {
        out.x = Rhs::Zero(a.cols(), b.cols());
        out.residual = b.norm();
        out.condition = std::numeric_limits<double>::infinity();
        return out;
    }
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    out.condition = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (out.condition > tol.cond_max)
        throw Error(ErrorKind::IllConditioned, "condition estimate " + std::to_string(out.condition));
    out.x = svd.solve(b);
    out.residual = (a * out.x - b).norm();
    return out;
}

// ---------------------------------------------------------------------------
// antilinear operators
// ---------------------------------------------------------------------------

/// zeta -> mat * conj(zeta).
struct AntilinearOp {
    CMatrix mat;

    Eigen::Index dim() const { return mat.rows(); }

    CVector apply(const CVector& z) const { return mat * z.conjugate(); }

    /// <S zeta, eta> = <S^dagger eta, zeta>.
    AntilinearOp adjoint() const { return {mat.transpose()}; }

    /// this * other is linear.
    CMatrix compose(const AntilinearOp& other) const { return mat * other.mat.conjugate(); }

    /// this * L.
    AntilinearOp after(const CMatrix& linear) const { return {mat * linear.conjugate()}; }

    /// L * this.
    AntilinearOp before(const CMatrix& linear) const { return {linear * mat}; }

    /// this * X * this, a linear operator.
    CMatrix conjugate_linear(const CMatrix& x) const
    {
        return mat * x.conjugate() * mat.conjugate();
    }

    static AntilinearOp conjugation(Eigen::Index n) { return {identity(n)}; }
};

struct PolarResult {
    AntilinearOp J;
    CMatrix Delta;
};

/// S = J Delta^(1/2) with Delta = S^dagger S positive definite and J antiunitary.
/// For S zeta = A conj(zeta): Delta = conj(A^* A) and J has matrix U V^* where
/// A = U Sigma V^* is a singular value decomposition.
inline PolarResult antilinear_polar(const AntilinearOp& s, const TolerancePolicy& tol = {})
{
    const CMatrix& a = s.mat;
    if (a.rows() != a.cols())
        throw Error(ErrorKind::ShapeMismatch, "antilinear_polar needs a square operator");
    if (a.rows() == 0)
        return {AntilinearOp{CMatrix(0, 0)}, CMatrix(0, 0)};
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVector& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= sv(0) / tol.cond_max || sv(0) == 0.0)
        throw Error(ErrorKind::Singular, "antilinear operator is not invertible");
    const CMatrix& u = svd.matrixU();
    const CMatrix& v = svd.matrixV();
    const CMatrix a_star_a = v * sv.array().square().matrix().cast<Complex>().asDiagonal() * v.adjoint();
    CMatrix delta = a_star_a.conjugate();
    delta = 0.5 * (delta + delta.adjoint()).eval();
    return {AntilinearOp{u * v.adjoint()}, delta};
}

// ---------------------------------------------------------------------------
// seeded generators
// ---------------------------------------------------------------------------

inline CMatrix rand_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    CMatrix g(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            g(i, j) = rng.complex_gaussian();
    return g;
}

inline CMatrix rand_hermitian(Eigen::Index dim, Rng& rng)
{
    const CMatrix g = rand_gaussian(dim, dim, rng);
    return 0.5 * (g + g.adjoint());
}

inline CMatrix rand_hermitian(Eigen::Index dim, std::uint64_t seed)
{
    Rng rng(seed);
    return rand_hermitian(dim, rng);
}

/// Haar unitary: QR of a complex Gaussian matrix with the phases of R's
/// diagonal moved into Q.
inline CMatrix rand_unitary(Eigen::Index dim, Rng& rng)
{
    const CMatrix g = rand_gaussian(dim, dim, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * identity(dim);
    const CMatrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < dim; ++j) {
        const Complex d = r(j, j);
        const double mag = std::abs(d);
        q.col(j) *= mag > 0 ? d / mag : Complex(1.0);
    }
    return q;
}

inline CMatrix rand_unitary(Eigen::Index dim, std::uint64_t seed)
{
    Rng rng(seed);
    return rand_unitary(dim, rng);
}

/// Random orthogonal projection of the given rank in dimension dim.
inline CMatrix rand_projection(Eigen::Index dim, Eigen::Index rank, Rng& rng)
{
    const CMatrix u = rand_unitary(dim, rng);
    const CMatrix v = u.leftCols(rank);
    return v * v.adjoint();
}

/// Random density matrix: unit trace, eigenvalues proportional to draws from
/// [lo, hi] in a Haar-random eigenbasis.
inline CMatrix rand_density(Eigen::Index dim, Rng& rng, double lo = 0.2, double hi = 1.0)
{
    const CMatrix u = rand_unitary(dim, rng);
    RVector ev(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        ev(i) = lo + (hi - lo) * rng.uniform();
    ev /= ev.sum();
    return u * ev.cast<Complex>().asDiagonal() * u.adjoint();
}

} // namespace sharpcone

#endif
