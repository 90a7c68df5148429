#ifndef SHARPCONE_CONE_HPP
#define SHARPCONE_CONE_HPP

//
// The cone P = closure(M_+ xi0) for a cyclic separating xi0, its order,
// distinguished vectors, sharp norm, and the Jordan structure on K + iK.
//
// Every vector zeta of H is x xi0 for a unique x in M (the representing
// element, "rep"). Cone questions reduce to spectral questions about rep.
//

#include <cmath>
#include <vector>

#include "modular.hpp"

namespace sharpcone {

struct ConeElement {
    CVector vec;
    AlgebraElement rep;
    double psd_floor = 0.0; // smallest eigenvalue of the Hermitian part of rep
};

enum class ConeStatus { Member, Boundary, Outside };

inline const char* to_string(ConeStatus s)
{
    switch (s) {
    case ConeStatus::Member: return "member";
    case ConeStatus::Boundary: return "boundary";
    case ConeStatus::Outside: return "outside";
    }
    return "unknown";
}

struct ConeVerdict {
    ConeStatus status = ConeStatus::Outside;
    double hermitian_residual = 0.0;
    double lambda_min = 0.0;
    double floor = 0.0; // -psd_rel * max(1, ||rep||)

    bool member() const { return status != ConeStatus::Outside; }
};

struct Classification {
    bool contractive = false;      // rep <= I, decided by the order
    bool projective = false;       // contractive and <zeta, xi0 - zeta> = 0
    bool contractive_op = false;   // lambda_max(rep) <= 1, decided on the operator
    bool projective_op = false;    // rep^2 = rep
    double orthogonality_residual = 0.0;
    double idempotence_residual = 0.0;

    bool consistent() const { return contractive == contractive_op && projective == projective_op; }
};

struct OrthogonalityVerdict {
    bool orthogonal = false;
    bool order_test = false;
    bool operator_test = false;
    double product_residual = 0.0;
};

struct JordanDecomposition {
    ConeElement positive;
    ConeElement negative;
};

class ConeContext {
public:
    ConeContext(ConcreteAlgebra m, const CVector& xi0, const TolerancePolicy& tol = {})
        : md_(standard_form(m, xi0, tol))
        , m_(std::move(m))
        , tol_(tol)
    {
        const StateVector blocks = m_.to_blocks(xi0);
        for (int k = 0; k < m_.spec().num_blocks(); ++k) {
            const CMatrix& xi = blocks.block(k);
            Eigen::JacobiSVD<CMatrix> svd(xi);
            const auto& sv = svd.singularValues();
            if (sv(sv.size() - 1) * tol.cond_max < sv(0))
                throw Error(ErrorKind::IllConditioned, "xi0 block " + std::to_string(k) + " is ill-conditioned");
            xi_inv_.push_back(xi.inverse());
        }
    }

    const ConcreteAlgebra& algebra() const { return m_; }
    const ModularData& modular() const { return md_; }
    const CVector& xi0() const { return md_.xi0; }
    const TolerancePolicy& tol() const { return tol_; }
    Eigen::Index dim() const { return md_.xi0.size(); }

    /// The unique x in M with x xi0 = zeta.
    AlgebraElement vector_to_operator(const CVector& zeta) const
    {
        if (zeta.size() != dim())
            throw Error(ErrorKind::ShapeMismatch, "vector length does not match the context");
        const StateVector w = m_.to_blocks(zeta);
        std::vector<CMatrix> out;
        for (int k = 0; k < m_.spec().num_blocks(); ++k)
            out.push_back(w.block(k) * xi_inv_[k]);
        return AlgebraElement(std::move(out));
    }

    CVector operator_to_vector(const AlgebraElement& x) const { return m_.embed(x) * md_.xi0; }

    ConeElement element(const CVector& zeta) const
    {
        ConeElement e{zeta, vector_to_operator(zeta), 0.0};
        e.psd_floor = lambda_min(e.rep);
        return e;
    }

    ConeVerdict status(const CVector& zeta) const { return status_of(vector_to_operator(zeta)); }

    ConeVerdict status_of(const AlgebraElement& rep) const
    {
        ConeVerdict v;
        const double scale = std::max(1.0, rep.norm());
        v.hermitian_residual = rep.hermitian_residual();
        v.floor = -tol_.psd_rel * scale;
        if (v.hermitian_residual > tol_.eq_rel * std::max(1.0, rep.frobenius())) {
            v.status = ConeStatus::Outside;
            v.lambda_min = lambda_min(rep);
            return v;
        }
        v.lambda_min = lambda_min(rep);
        if (v.lambda_min < v.floor)
            v.status = ConeStatus::Outside;
        else if (v.lambda_min <= -v.floor)
            v.status = ConeStatus::Boundary;
        else
            v.status = ConeStatus::Member;
        return v;
    }

    bool is_hermitian_rep(const AlgebraElement& rep) const
    {
        return rep.hermitian_residual() <= tol_.eq_rel * std::max(1.0, rep.frobenius());
    }

    /// Smallest eigenvalue over blocks of the Hermitian part.
    static double lambda_min(const AlgebraElement& rep)
    {
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& b : rep.blocks()) {
            const CMatrix h = 0.5 * (b + b.adjoint());
            Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
            lo = std::min(lo, es.eigenvalues()(0));
        }
        return lo;
    }

    static double lambda_max(const AlgebraElement& rep)
    {
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& b : rep.blocks()) {
            const CMatrix h = 0.5 * (b + b.adjoint());
            Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
            hi = std::max(hi, es.eigenvalues()(es.eigenvalues().size() - 1));
        }
        return hi;
    }

private:
    ModularData md_;
    ConcreteAlgebra m_;
    TolerancePolicy tol_;
    std::vector<CMatrix> xi_inv_;
};

inline AlgebraElement vector_to_operator(const ConeContext& ctx, const CVector& zeta)
{
    return ctx.vector_to_operator(zeta);
}

inline bool cone_member(const ConeContext& ctx, const CVector& zeta) { return ctx.status(zeta).member(); }

/// zeta <= eta.
inline bool leq(const ConeContext& ctx, const CVector& zeta, const CVector& eta)
{
    return cone_member(ctx, eta - zeta);
}

inline Classification classify(const ConeContext& ctx, const CVector& zeta)
{
    const ConeElement e = ctx.element(zeta);
    if (!ctx.status_of(e.rep).member())
        throw Error(ErrorKind::NotInCone, "vector is not in the cone");
    const auto& tol = ctx.tol();
    Classification c;
    const double scale = std::max(1.0, e.rep.norm());
    c.contractive = leq(ctx, zeta, ctx.xi0());
    c.contractive_op = ConeContext::lambda_max(e.rep) <= 1.0 + tol.psd_rel * scale;
    c.orthogonality_residual = std::abs(inner(zeta, CVector(ctx.xi0() - zeta)));
    c.projective = c.contractive
                   && c.orthogonality_residual <= tol.eq_rel * std::max(1.0, zeta.norm() * ctx.xi0().norm());
    const AlgebraElement sq = e.rep * e.rep;
    c.idempotence_residual = (sq - e.rep).frobenius();
    c.projective_op = c.idempotence_residual <= tol.eq_rel * std::max(1.0, e.rep.frobenius());
    return c;
}

inline bool is_projective(const ConeContext& ctx, const CVector& zeta)
{
    if (!cone_member(ctx, zeta))
        return false;
    return classify(ctx, zeta).projective;
}

inline OrthogonalityVerdict op_orthogonal(const ConeContext& ctx, const CVector& eta, const CVector& zeta)
{
    if (!is_projective(ctx, eta) || !is_projective(ctx, zeta))
        throw Error(ErrorKind::NotProjective, "operational orthogonality needs projective vectors");
    OrthogonalityVerdict v;
    v.order_test = leq(ctx, zeta, CVector(ctx.xi0() - eta));
    const AlgebraElement p = ctx.vector_to_operator(eta) * ctx.vector_to_operator(zeta);
    v.product_residual = p.frobenius();
    v.operator_test = v.product_residual <= ctx.tol().eq_rel;
    v.orthogonal = v.order_test && v.operator_test;
    return v;
}

namespace detail {

/// Per-block spectral map on the Hermitian part of rep.
template <typename F>
AlgebraElement block_spectral(const AlgebraElement& rep, const TolerancePolicy& tol, F&& f)
{
    std::vector<CMatrix> out;
    for (const auto& b : rep.blocks()) {
        const CMatrix h = 0.5 * (b + b.adjoint());
        out.push_back(spectral_apply(herm_eig(h, tol), f));
    }
    return AlgebraElement(std::move(out));
}


inline CVector random_unit(int n, Rng& rng)
{
    CVector v = rand_gaussian(n, 1, rng);
    return v / v.norm();
}

/// Deterministic rays: e_a, (e_a + e_b)/sqrt2, (e_a + i e_b)/sqrt2.
inline std::vector<CVector> structured_rays(int n)
{
    std::vector<CVector> out;
    for (int a = 0; a < n; ++a) {
        CVector v = CVector::Zero(n);
        v(a) = 1.0;
        out.push_back(v);
        for (int b = a + 1; b < n; ++b) {
            CVector w = CVector::Zero(n);
            w(a) = 1.0 / std::sqrt(2.0);
            w(b) = 1.0 / std::sqrt(2.0);
            out.push_back(w);
            w(b) = Complex(0, 1.0 / std::sqrt(2.0));
            out.push_back(w);
        }
    }
    return out;
}

} // namespace detail

/// Least projective vector dominating a positive multiple of zeta: e xi0
/// with e the support projection of rep(zeta).
inline ConeElement support_vector(const ConeContext& ctx, const CVector& zeta)
{
    const ConeElement e = ctx.element(zeta);
    if (!ctx.status_of(e.rep).member())
        throw Error(ErrorKind::NotInCone, "vector is not in the cone");
    const double thr = ctx.tol().psd_rel * std::max(1.0, e.rep.norm());
    const AlgebraElement s = detail::block_spectral(e.rep, ctx.tol(), [thr](double l) {
        return Complex(l > thr ? 1.0 : 0.0, 0.0);
    });
    return ConeElement{ctx.operator_to_vector(s), s, 0.0};
}

inline JordanDecomposition jordan_decompose(const ConeContext& ctx, const CVector& zeta)
{
    const AlgebraElement rep = ctx.vector_to_operator(zeta);
    if (!ctx.is_hermitian_rep(rep))
        throw Error(ErrorKind::NotHermitianRep, "vector is not in K");
    const AlgebraElement pos =
        detail::block_spectral(rep, ctx.tol(), [](double l) { return Complex(std::max(l, 0.0), 0.0); });
    const AlgebraElement neg =
        detail::block_spectral(rep, ctx.tol(), [](double l) { return Complex(std::max(-l, 0.0), 0.0); });
    JordanDecomposition d;
    d.positive = ConeElement{ctx.operator_to_vector(pos), pos, 0.0};
    d.negative = ConeElement{ctx.operator_to_vector(neg), neg, 0.0};
    return d;
}

/// Operator norm of the Hermitian rep of zeta in K.
inline double sharp_norm(const ConeContext& ctx, const CVector& zeta)
{
    const AlgebraElement rep = ctx.vector_to_operator(zeta);
    if (!ctx.is_hermitian_rep(rep))
        throw Error(ErrorKind::NotHermitianRep, "vector is not in K");
    double r = 0;
    for (const auto& b : rep.blocks()) {
        const CMatrix h = 0.5 * (b + b.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
        r = std::max(r, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    return r;
}

/// inf{c > 0 : zeta / c <= xi0} for zeta in the cone, located purely through
/// order queries: bracket [c, 2c] by doubling or halving, then bisect.
inline double sharp_norm_by_order(const ConeContext& ctx, const CVector& zeta, int iterations = 20)
{
    if (!cone_member(ctx, zeta))
        throw Error(ErrorKind::NotInCone, "order-based sharp norm needs a cone element");
    const CVector& xi0 = ctx.xi0();
    auto dominated = [&](double c) { return leq(ctx, CVector(zeta / c), xi0); };
    if (zeta.norm() == 0.0)
        return 0.0;
    double hi = 1.0;
    int guard = 0;
    if (dominated(hi)) {
        while (dominated(hi / 2.0)) {
            hi /= 2.0;
            if (++guard > 2000)
                return 0.0;
        }
    } else {
        while (!dominated(hi)) {
            hi *= 2.0;
            if (++guard > 2000)
                throw Error(ErrorKind::InvalidInput, "order-based sharp norm did not bracket");
        }
    }
    double lo = hi / 2.0;
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (dominated(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Sharp norm on K through the Jordan decomposition: max of the order-based
/// norms of the positive and negative parts.
inline double sharp_norm_by_order_k(const ConeContext& ctx, const CVector& zeta, int iterations = 20)
{
    const auto d = jordan_decompose(ctx, zeta);
    return std::max(sharp_norm_by_order(ctx, d.positive.vec, iterations),
                    sharp_norm_by_order(ctx, d.negative.vec, iterations));
}

// ---------------------------------------------------------------------------
// Jordan structure on K + iK
// ---------------------------------------------------------------------------

namespace detail {

/// Square of zeta in K: split rep into rank-one eigenprojections of each
/// block (operationally orthogonal projective vectors zeta_j) with
/// coefficients c_j and return sum c_j^2 zeta_j.
inline CVector real_square(const ConeContext& ctx, const CVector& zeta)
{
    const AlgebraElement rep = ctx.vector_to_operator(zeta);
    if (!ctx.is_hermitian_rep(rep))
        throw Error(ErrorKind::NotRepresentable, "real part is not in K");
    const auto& spec = ctx.algebra().spec();
    CVector out = CVector::Zero(ctx.dim());
    for (int k = 0; k < spec.num_blocks(); ++k) {
        const CMatrix h = 0.5 * (rep.block(k) + rep.block(k).adjoint());
        const HermEig eig = herm_eig(h, ctx.tol());
        for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
            const double c = eig.values(j);
            if (c == 0.0)
                continue;
            AlgebraElement p = AlgebraElement::zero(spec);
            p.blocks()[k] = eig.vectors.col(j) * eig.vectors.col(j).adjoint();
            out += (c * c) * ctx.operator_to_vector(p);
        }
    }
    return out;
}

} // namespace detail

/// zeta^2 by the order-theoretic construction, extended to K + iK through
/// zeta = zeta1 + i zeta2 with zeta1, zeta2 in K:
///   zeta^2 = zeta1^2 - zeta2^2 + i ((zeta1 + zeta2)^2 - zeta1^2 - zeta2^2).
inline CVector square(const ConeContext& ctx, const CVector& zeta)
{
    const CVector s = s_apply(ctx.modular(), zeta);
    const CVector z1 = 0.5 * (zeta + s);
    const CVector z2 = (zeta - s) / Complex(0, 2);
    const CVector a = detail::real_square(ctx, z1);
    const CVector b = detail::real_square(ctx, z2);
    const CVector c = detail::real_square(ctx, CVector(z1 + z2));
    return a - b + Complex(0, 1) * (c - a - b);
}

/// rep(zeta)^2 xi0.
inline CVector square_oracle(const ConeContext& ctx, const CVector& zeta)
{
    const AlgebraElement x = ctx.vector_to_operator(zeta);
    return ctx.operator_to_vector(x * x);
}

/// eta zeta + zeta eta = (eta + zeta)^2 - eta^2 - zeta^2.
inline CVector jordan_product(const ConeContext& ctx, const CVector& eta, const CVector& zeta)
{
    return square(ctx, CVector(eta + zeta)) - square(ctx, eta) - square(ctx, zeta);
}

/// zeta eta zeta = 1/2 [(zeta eta + eta zeta) zeta + zeta (zeta eta + eta zeta)]
///               - 1/2 (zeta^2 eta + eta zeta^2).
inline CVector triple_product(const ConeContext& ctx, const CVector& zeta, const CVector& eta)
{
    const CVector je = jordan_product(ctx, zeta, eta);
    return 0.5 * jordan_product(ctx, je, zeta) - 0.5 * jordan_product(ctx, square(ctx, zeta), eta);
}

inline CVector corner(const ConeContext& ctx, const CVector& zeta, const CVector& eta)
{
    if (!is_projective(ctx, zeta))
        throw Error(ErrorKind::NotProjective, "corner needs a projective vector");
    return triple_product(ctx, zeta, eta);
}

inline CVector offdiag(const ConeContext& ctx, const CVector& zeta, const CVector& eta)
{
    if (!is_projective(ctx, zeta))
        throw Error(ErrorKind::NotProjective, "off-diagonal part needs a projective vector");
    const CVector perp = ctx.xi0() - zeta;
    return eta - triple_product(ctx, zeta, eta) - triple_product(ctx, perp, eta);
}

/// e y e xi0 with e = rep(zeta), y = rep(eta).
inline CVector corner_oracle(const ConeContext& ctx, const CVector& zeta, const CVector& eta)
{
    const AlgebraElement e = ctx.vector_to_operator(zeta);
    const AlgebraElement y = ctx.vector_to_operator(eta);
    return ctx.operator_to_vector(e * y * e);
}

/// (e y e^perp + e^perp y e) xi0.
inline CVector offdiag_oracle(const ConeContext& ctx, const CVector& zeta, const CVector& eta)
{
    const AlgebraElement e = ctx.vector_to_operator(zeta);
    const AlgebraElement ep = AlgebraElement::identity(ctx.algebra().spec()) - e;
    const AlgebraElement y = ctx.vector_to_operator(eta);
    return ctx.operator_to_vector(e * y * ep + ep * y * e);
}

} // namespace sharpcone

#endif
