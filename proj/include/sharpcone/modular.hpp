#ifndef SHARPCONE_MODULAR_HPP
#define SHARPCONE_MODULAR_HPP

//
// Tomita-Takesaki data of an algebra with a cyclic separating vector.
//
// S is determined by S(x xi0) = x^* xi0 on a basis of the algebra. Writing
// X = [x_i xi0] and Y = [x_i^* xi0], S zeta = Y conj(X^{-1} zeta), so the
// matrix of S (as zeta -> mat conj(zeta)) is Y conj(X)^{-1}.
//

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "algebra.hpp"

namespace sharpcone {

struct ModularData {
    OperatorSubspace algebra;
    std::optional<ConcreteAlgebra> concrete;
    CVector xi0;
    AntilinearOp S;
    AntilinearOp J;
    CMatrix Delta;
    HermEig delta_eig;
    TolerancePolicy tol;

    Eigen::Index dim() const { return xi0.size(); }

    /// Delta^{it}.
    CMatrix delta_it(double t) const
    {
        return spectral_apply(delta_eig, [t](double l) { return std::exp(Complex(0, t * std::log(l))); });
    }

    /// Delta^{s} for real s.
    CMatrix delta_pow(double s) const
    {
        return spectral_apply(delta_eig, [s](double l) { return Complex(std::pow(l, s), 0); });
    }

    /// J T J for a linear operator T.
    CMatrix j_conjugate(const CMatrix& t) const { return J.conjugate_linear(t); }
};

namespace detail {

inline ModularData build_modular(OperatorSubspace algebra, const std::vector<CMatrix>& basis,
                                 const CVector& xi0, const TolerancePolicy& tol)
{
    const Eigen::Index d = xi0.size();
    if (algebra.ambient_dim() != d)
        throw Error(ErrorKind::ShapeMismatch, "vector does not live on the algebra's space");
    if (static_cast<Eigen::Index>(basis.size()) != d || !check_cyclic(algebra, xi0, tol)
        || !check_separating(algebra, xi0, tol))
        throw Error(ErrorKind::NotCyclicSeparating, "vector is not cyclic and separating");
    CMatrix x(d, d), y(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        x.col(i) = basis[i] * xi0;
        y.col(i) = basis[i].adjoint() * xi0;
    }
    ModularData md;
    try {
        // mat conj(X) = Y  <=>  conj(X)^T mat^T = Y^T
        const auto sol = lin_solve(CMatrix(x.conjugate().transpose()), CMatrix(y.transpose()), tol);
        md.S = AntilinearOp{sol.x.transpose()};
    } catch (const Error& err) {
        if (err.kind() == ErrorKind::IllConditioned)
            throw Error(ErrorKind::NotCyclicSeparating, std::string("orbit basis too ill-conditioned: ") + err.what());
        throw;
    }
    auto polar = antilinear_polar(md.S, tol);
    md.J = polar.J;
    md.Delta = polar.Delta;
    md.delta_eig = herm_eig(md.Delta, tol);
    md.algebra = std::move(algebra);
    md.xi0 = xi0;
    md.tol = tol;
    return md;
}

} // namespace detail

/// Modular data of a concrete algebra; S is assembled on the matrix-unit basis.
inline ModularData standard_form(const ConcreteAlgebra& a, const CVector& xi0, const TolerancePolicy& tol = {})
{
    if (xi0.size() != a.hilbert_dim())
        throw Error(ErrorKind::ShapeMismatch, "vector length does not match the algebra");
    if (!check_cyclic(a, xi0, tol) || !check_separating(a, xi0, tol))
        throw Error(ErrorKind::NotCyclicSeparating, "vector is not cyclic and separating");
    auto md = detail::build_modular(a.subspace(), a.embedded_basis(), xi0, tol);
    md.concrete = a;
    return md;
}

inline ModularData standard_form(const ConcreteAlgebra& a, const StateVector& xi0, const TolerancePolicy& tol = {})
{
    return standard_form(a, a.from_blocks(xi0), tol);
}

/// Modular data of an abstract self-adjoint algebra of operators.
inline ModularData standard_form(const OperatorSubspace& a, const CVector& xi0, const TolerancePolicy& tol = {})
{
    return detail::build_modular(a, a.basis(), xi0, tol);
}

inline CVector s_apply(const ModularData& md, const CVector& zeta) { return md.S.apply(zeta); }

/// sigma_t(x) = Delta^{it} x Delta^{-it}; throws NotInvariant if the result
/// leaves the algebra.
inline CMatrix modular_flow(const ModularData& md, double t, const CMatrix& x)
{
    const CMatrix u = md.delta_it(t);
    const CMatrix out = u * x * u.adjoint();
    const auto m = md.algebra.member(out, md.tol.eq_rel);
    if (!m.member && out.norm() > 0)
        throw Error(ErrorKind::NotInvariant, "modular flow left the algebra, residual " + std::to_string(m.residual));
    return out;
}

inline AlgebraElement modular_flow(const ModularData& md, double t, const AlgebraElement& x)
{
    if (!md.concrete)
        throw Error(ErrorKind::InvalidInput, "modular data has no block structure");
    return md.concrete->extract(modular_flow(md, t, md.concrete->embed(x)));
}

/// {x in A : x Delta = Delta x}.
inline OperatorSubspace fixed_point_algebra(const ModularData& md)
{
    auto out = commutant_within({md.Delta}, md.algebra.coordinates_matrix(), md.dim(), md.tol);
    out.mark_algebra(true);
    return out;
}

/// Largest |<xy xi, xi> - <yx xi, xi>| over basis pairs, through the Gram
/// matrix G_ij = <x_j xi, x_i^* xi>, which is symmetric exactly when xi is
/// tracial.
inline double tracial_residual(const OperatorSubspace& a, const CVector& xi)
{
    if (a.dim() == 0)
        return 0.0;
    CMatrix x(xi.size(), a.dim()), y(xi.size(), a.dim());
    for (int i = 0; i < a.dim(); ++i) {
        x.col(i) = a.basis()[i] * xi;
        y.col(i) = a.basis()[i].adjoint() * xi;
    }
    const CMatrix g = y.adjoint() * x;
    return (g - g.transpose()).cwiseAbs().maxCoeff();
}

inline bool is_tracial(const OperatorSubspace& a, const CVector& xi, const TolerancePolicy& tol = {})
{
    return tracial_residual(a, xi) <= tol.eq_rel * std::max(1.0, xi.squaredNorm());
}

inline bool is_tracial(const ConcreteAlgebra& a, const StateVector& xi, const TolerancePolicy& tol = {})
{
    return is_tracial(a.subspace(), a.from_blocks(xi), tol);
}

// ---------------------------------------------------------------------------
// invariant residuals
// ---------------------------------------------------------------------------

struct ModularResiduals {
    double s_defining = 0;    // max ||S x xi0 - x^* xi0|| / max(1, ||x^* xi0||)
    double polar = 0;         // ||S - J Delta^{1/2}|| / ||S||
    double j_involution = 0;  // ||J^2 - I||
    double j_antiunitary = 0; // ||J^* J - I|| for the matrix of J
    double jdj = 0;           // ||J Delta J - Delta^{-1}|| / ||Delta^{-1}||
    double xi0_fixed = 0;     // max of ||S xi0 - xi0||, ||Delta xi0 - xi0||, ||J xi0 - xi0||, over ||xi0||
    double jmj_commutant = 0; // J M J versus M', containment both ways
    double flow = 0;          // max membership residual of sigma_t(x), t in {0.3, 1, pi}
};

inline ModularResiduals modular_residuals(const ModularData& md, const OperatorSubspace& commutant_space)
{
    ModularResiduals r;
    const Eigen::Index d = md.dim();
    const CMatrix id = identity(d);
    for (const auto& b : md.algebra.basis()) {
        const CVector want = b.adjoint() * md.xi0;
        r.s_defining = std::max(r.s_defining, (md.S.apply(b * md.xi0) - want).norm() / std::max(1.0, want.norm()));
    }
    const CMatrix half = md.delta_pow(0.5);
    r.polar = (md.S.mat - md.J.mat * half.conjugate()).norm() / std::max(1.0, md.S.mat.norm());
    r.j_involution = (md.J.compose(md.J) - id).norm();
    r.j_antiunitary = (md.J.mat.adjoint() * md.J.mat - id).norm();
    const CMatrix inv = md.delta_pow(-1.0);
    r.jdj = (md.j_conjugate(md.Delta) - inv).norm() / std::max(1.0, inv.norm());
    const double xn = std::max(1e-300, md.xi0.norm());
    r.xi0_fixed = std::max({(md.S.apply(md.xi0) - md.xi0).norm(), (md.Delta * md.xi0 - md.xi0).norm(),
                            (md.J.apply(md.xi0) - md.xi0).norm()})
                  / xn;
    std::vector<CMatrix> jmj;
    for (const auto& b : md.algebra.basis())
        jmj.push_back(md.j_conjugate(b));
    const auto jmj_space = OperatorSubspace::span(d, jmj, md.tol.eq_rel);
    double c = 0;
    for (const auto& b : jmj_space.basis())
        c = std::max(c, commutant_space.member(b, 1.0).residual);
    for (const auto& b : commutant_space.basis())
        c = std::max(c, jmj_space.member(b, 1.0).residual);
    if (jmj_space.dim() != commutant_space.dim())
        c = std::max(c, 1.0);
    r.jmj_commutant = c;
    for (double t : {0.3, 1.0, std::numbers::pi}) {
        const CMatrix u = md.delta_it(t);
        for (const auto& b : md.algebra.basis()) {
            const CMatrix f = u * b * u.adjoint();
            r.flow = std::max(r.flow, md.algebra.member(f, 1.0).residual / std::max(1.0, f.norm()));
        }
    }
    return r;
}

inline ModularResiduals modular_residuals(const ModularData& md)
{
    if (md.concrete)
        return modular_residuals(md, md.concrete->commutant_subspace());
    return modular_residuals(md, commutant(md.algebra, md.tol));
}

} // namespace sharpcone

#endif
