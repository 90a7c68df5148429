#ifndef SHARPCONE_EMBEDDINGS_HPP
#define SHARPCONE_EMBEDDINGS_HPP

//
// A second algebra N on the same space with N_+ xi0 inside the cone of M
// induces a positive unital map alpha : N -> M, alpha(a) xi0 = a xi0. The
// map is a Jordan homomorphism; a central projection g of alpha(N)'' splits
// it into a homomorphism beta = alpha(.) g and an antihomomorphism
// gamma = alpha(.) (1 - g), with supports e and f in the center of N.
//

#include <optional>
#include <string>
#include <vector>

#include "cone.hpp"
#include "feasibility.hpp"

namespace sharpcone {

// ---------------------------------------------------------------------------
// cone inclusion
// ---------------------------------------------------------------------------

struct InclusionWitness {
    int block = 0;      // block of N
    CVector v;          // the ray is v v^* in that block
    double lambda_min = 0.0;
    double hermitian_residual = 0.0;
};

struct InclusionCheck {
    bool holds = true; // up to sampling
    int rays_checked = 0;
    double worst_lambda = 0.0; // most negative scaled eigenvalue seen
    std::optional<InclusionWitness> witness;
};

/// T(E_i) = rep(E_i xi0) for the matrix units E_i of N.
inline std::vector<AlgebraElement> transfer_images(const ConcreteAlgebra& n, const ConeContext& ctx)
{
    if (n.hilbert_dim() != ctx.dim())
        throw Error(ErrorKind::ShapeMismatch, "algebras act on different spaces");
    std::vector<AlgebraElement> out;
    for (const auto& op : n.embedded_basis())
        out.push_back(ctx.vector_to_operator(op * ctx.xi0()));
    return out;
}

namespace detail {

/// T(v v^*) for v supported on block k of N.
inline AlgebraElement ray_image(const AlgebraSpec& nspec, const std::vector<AlgebraElement>& t, int k,
                                const CVector& v, const AlgebraSpec& mspec)
{
    AlgebraElement out = AlgebraElement::zero(mspec);
    const int n = nspec.block(k).n;
    const int off = nspec.algebra_offset(k);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const Complex c = v(a) * std::conj(v(b));
            if (c != Complex(0))
                out += c * t[static_cast<std::size_t>(off + a * n + b)];
        }
    return out;
}

} // namespace detail

/// Checks T(v v^*) >= 0 on structured and seeded random rays of every block of N.
inline InclusionCheck verify_cone_inclusion(const ConcreteAlgebra& n, const ConeContext& ctx, int n_samples = 16,
                                            std::uint64_t seed = 0)
{
    const auto t = transfer_images(n, ctx);
    const auto& nspec = n.spec();
    const auto& mspec = ctx.algebra().spec();
    Rng rng(seed ^ 0x9E6C63D0676A9A99ULL);
    InclusionCheck out;
    for (int k = 0; k < nspec.num_blocks(); ++k) {
        auto rays = detail::structured_rays(nspec.block(k).n);
        for (int s = 0; s < n_samples; ++s)
            rays.push_back(detail::random_unit(nspec.block(k).n, rng));
        for (const auto& v : rays) {
            const AlgebraElement img = detail::ray_image(nspec, t, k, v, mspec);
            const ConeVerdict verdict = ctx.status_of(img);
            ++out.rays_checked;
            const double scaled = verdict.lambda_min / std::max(1.0, img.norm());
            const bool bad_herm = !ctx.is_hermitian_rep(img);
            if (bad_herm || !verdict.member()) {
                if (!out.witness || scaled < out.witness->lambda_min || bad_herm)
                    out.witness = InclusionWitness{k, v, scaled, verdict.hermitian_residual};
                out.holds = false;
            }
            out.worst_lambda = std::min(out.worst_lambda, scaled);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// alpha and its splitting
// ---------------------------------------------------------------------------

struct SummandClass {
    CMatrix z;               // minimal central projection of alpha(N)''
    bool homomorphic = false;
    bool antihomomorphic = false;
    double homo_residual = 0.0;
    double anti_residual = 0.0;
};

struct EmbeddingAnalysis {
    ConcreteAlgebra N;
    ConcreteAlgebra M;
    CVector xi0;
    TolerancePolicy tol;
    std::vector<AlgebraElement> images; // alpha(E_i) in the block form of M
    std::vector<CMatrix> embedded;      // the same images as operators on H
    double defining_residual = 0.0;     // max ||alpha(x) xi0 - x xi0|| / max(1, ||x xi0||)

    // filled by split_homo_antihomo
    bool split_done = false;
    std::vector<SummandClass> summands;
    CMatrix g;             // central projection of alpha(N)'' on H
    AlgebraElement g_in_m; // g in the block form of M
    AlgebraElement e;      // support of beta, central in N
    AlgebraElement f;      // support of gamma, central in N
    double g_membership_residual = 0.0;
    double beta_multiplicative = 0.0;
    double gamma_antimultiplicative = 0.0;
    double beta_gamma_orthogonal = 0.0;

    int dim_n() const { return static_cast<int>(images.size()); }

    CMatrix alpha_op(const AlgebraElement& x) const
    {
        const CVector c = x.coordinates();
        CMatrix out = CMatrix::Zero(M.hilbert_dim(), M.hilbert_dim());
        for (Eigen::Index i = 0; i < c.size(); ++i)
            if (c(i) != Complex(0))
                out += c(i) * embedded[static_cast<std::size_t>(i)];
        return out;
    }

    AlgebraElement alpha(const AlgebraElement& x) const
    {
        const CVector c = x.coordinates();
        AlgebraElement out = AlgebraElement::zero(M.spec());
        for (Eigen::Index i = 0; i < c.size(); ++i)
            if (c(i) != Complex(0))
                out += c(i) * images[static_cast<std::size_t>(i)];
        return out;
    }

    CMatrix beta(const AlgebraElement& x) const { return alpha_op(x) * g; }
    CMatrix gamma(const AlgebraElement& x) const { return alpha_op(x) * (identity(M.hilbert_dim()) - g); }

    bool ef_zero() const
    {
        for (int k = 0; k < e.num_blocks(); ++k)
            if (e.block(k).norm() > 0.5 && f.block(k).norm() > 0.5)
                return false;
        return true;
    }
};

/// Wraps an arbitrary linear map N -> M given on matrix units, e.g. to
/// test check_jordan on maps that do not come from a cone inclusion.
inline EmbeddingAnalysis make_analysis(const ConcreteAlgebra& n, const ConcreteAlgebra& m, const CVector& xi0,
                                       std::vector<AlgebraElement> images, const TolerancePolicy& tol = {})
{
    if (static_cast<int>(images.size()) != n.dim())
        throw Error(ErrorKind::ShapeMismatch, "one image per matrix unit of N is required");
    EmbeddingAnalysis a{n, m, xi0, tol};
    a.images = std::move(images);
    for (const auto& img : a.images)
        a.embedded.push_back(m.embed(img));
    for (std::size_t i = 0; i < a.images.size(); ++i) {
        const CVector want = n.embedded_basis()[i] * xi0;
        a.defining_residual = std::max(a.defining_residual,
                                       (a.embedded[i] * xi0 - want).norm() / std::max(1.0, want.norm()));
    }
    return a;
}

/// alpha(a) = rep(a xi0) on the matrix units of N.
inline EmbeddingAnalysis compute_alpha(const ConcreteAlgebra& n, const ConeContext& ctx)
{
    return make_analysis(n, ctx.algebra(), ctx.xi0(), transfer_images(n, ctx), ctx.tol());
}

struct JordanReport {
    double anticommutator = 0.0; // max relative residual of alpha(xy + yx) - alpha(x)alpha(y) - alpha(y)alpha(x)
    double projections = 0.0;    // max of ||alpha(p)^2 - alpha(p)|| and ||alpha(p)^* - alpha(p)||
    int pairs = 0;
    int projections_checked = 0;
    bool passed = false;
};

namespace detail {

/// Index of matrix unit (k, a, b) in the coordinates of spec.
inline int unit_index(const AlgebraSpec& spec, int k, int a, int b)
{
    return spec.algebra_offset(k) + a * spec.block(k).n + b;
}

struct UnitRef {
    int k, a, b;
};

inline std::vector<UnitRef> unit_refs(const AlgebraSpec& spec)
{
    std::vector<UnitRef> out;
    for (int k = 0; k < spec.num_blocks(); ++k)
        for (int a = 0; a < spec.block(k).n; ++a)
            for (int b = 0; b < spec.block(k).n; ++b)
                out.push_back({k, a, b});
    return out;
}

} // namespace detail

inline JordanReport check_jordan(const EmbeddingAnalysis& an, int n_projections = 8, std::uint64_t seed = 0)
{
    JordanReport rep;
    const auto& nspec = an.N.spec();
    const auto units = detail::unit_refs(nspec);
    const Eigen::Index d = an.M.hilbert_dim();
    for (std::size_t i = 0; i < units.size(); ++i)
        for (std::size_t j = i; j < units.size(); ++j) {
            const auto& x = units[i];
            const auto& y = units[j];
            CMatrix lhs = CMatrix::Zero(d, d);
            if (x.k == y.k) {
                if (x.b == y.a)
                    lhs += an.embedded[static_cast<std::size_t>(detail::unit_index(nspec, x.k, x.a, y.b))];
                if (y.b == x.a)
                    lhs += an.embedded[static_cast<std::size_t>(detail::unit_index(nspec, x.k, y.a, x.b))];
            }
            const CMatrix& ax = an.embedded[i];
            const CMatrix& ay = an.embedded[j];
            const double r = (lhs - ax * ay - ay * ax).norm() / std::max(1.0, ax.norm() * ay.norm());
            rep.anticommutator = std::max(rep.anticommutator, r);
            ++rep.pairs;
        }
    Rng rng(seed ^ 0xD1B54A32D192ED03ULL);
    for (int s = 0; s < n_projections; ++s) {
        std::vector<CMatrix> blocks;
        for (const auto& b : nspec.blocks())
            blocks.push_back(rand_projection(b.n, rng.uniform_int(0, b.n), rng));
        const CMatrix ap = an.alpha_op(AlgebraElement(blocks));
        const double r = std::max((ap * ap - ap).norm(), (ap.adjoint() - ap).norm()) / std::max(1.0, ap.norm());
        rep.projections = std::max(rep.projections, r);
        ++rep.projections_checked;
    }
    rep.passed = rep.anticommutator <= an.tol.eq_rel && rep.projections <= an.tol.eq_rel;
    return rep;
}

/// Locates g and the supports e, f. Throws UnclassifiableBlock when a
/// minimal central summand of alpha(N)'' is neither multiplicative nor
/// antimultiplicative.
inline EmbeddingAnalysis& split_homo_antihomo(EmbeddingAnalysis& an, std::uint64_t seed = 0)
{
    const auto& tol = an.tol;
    const auto& nspec = an.N.spec();
    const Eigen::Index d = an.M.hilbert_dim();
    const CMatrix id = identity(d);
    const auto a = double_commutant(an.embedded, tol);
    const auto zs = minimal_central_projections(a, seed, tol);
    const auto units = detail::unit_refs(nspec);

    auto product_unit = [&](const detail::UnitRef& x, const detail::UnitRef& y) -> const CMatrix* {
        if (x.k != y.k || x.b != y.a)
            return nullptr;
        return &an.embedded[static_cast<std::size_t>(detail::unit_index(nspec, x.k, x.a, y.b))];
    };

    an.summands.clear();
    an.g = CMatrix::Zero(d, d);
    for (const auto& z : zs) {
        SummandClass sc{z};
        for (std::size_t i = 0; i < units.size(); ++i)
            for (std::size_t j = 0; j < units.size(); ++j) {
                const CMatrix* xy = product_unit(units[i], units[j]);
                const CMatrix& ax = an.embedded[i];
                const CMatrix& ay = an.embedded[j];
                const double scale = std::max(1.0, ax.norm() * ay.norm());
                CMatrix h = -(ax * ay);
                CMatrix t = -(ay * ax);
                if (xy) {
                    h += *xy;
                    t += *xy;
                }
                sc.homo_residual = std::max(sc.homo_residual, (z * h).norm() / scale);
                sc.anti_residual = std::max(sc.anti_residual, (z * t).norm() / scale);
            }
        sc.homomorphic = sc.homo_residual <= tol.eq_rel;
        sc.antihomomorphic = sc.anti_residual <= tol.eq_rel;
        if (!sc.homomorphic && !sc.antihomomorphic)
            throw Error(ErrorKind::UnclassifiableBlock,
                        "central summand is neither multiplicative (" + std::to_string(sc.homo_residual)
                            + ") nor antimultiplicative (" + std::to_string(sc.anti_residual) + ")");
        if (sc.homomorphic)
            an.g += z; // ties go to the homomorphic side
        an.summands.push_back(sc);
    }
    an.g = 0.5 * (an.g + an.g.adjoint()).eval();
    an.g_in_m = an.M.extract(an.g);
    an.g_membership_residual = (an.M.embed(an.g_in_m) - an.g).norm();

    // supports of beta and gamma among the central blocks of N
    std::vector<int> e_blocks, f_blocks;
    const CMatrix gp = id - an.g;
    for (int k = 0; k < nspec.num_blocks(); ++k) {
        double bmax = 0, cmax = 0, amax = 0;
        for (std::size_t i = 0; i < units.size(); ++i) {
            if (units[i].k != k)
                continue;
            amax = std::max(amax, an.embedded[i].norm());
            bmax = std::max(bmax, (an.embedded[i] * an.g).norm());
            cmax = std::max(cmax, (an.embedded[i] * gp).norm());
        }
        const double thr = tol.eq_rel * std::max(1.0, amax);
        if (bmax > thr)
            e_blocks.push_back(k);
        if (cmax > thr)
            f_blocks.push_back(k);
    }
    an.e = AlgebraElement::block_indicator(nspec, e_blocks);
    an.f = AlgebraElement::block_indicator(nspec, f_blocks);

    an.beta_multiplicative = an.gamma_antimultiplicative = an.beta_gamma_orthogonal = 0.0;
    for (std::size_t i = 0; i < units.size(); ++i)
        for (std::size_t j = 0; j < units.size(); ++j) {
            const CMatrix* xy = product_unit(units[i], units[j]);
            const CMatrix bx = an.embedded[i] * an.g, by = an.embedded[j] * an.g;
            const CMatrix cx = an.embedded[i] * gp, cy = an.embedded[j] * gp;
            const double scale = std::max(1.0, an.embedded[i].norm() * an.embedded[j].norm());
            CMatrix bxy = CMatrix::Zero(d, d), cxy = CMatrix::Zero(d, d);
            if (xy) {
                bxy = *xy * an.g;
                cxy = *xy * gp;
            }
            an.beta_multiplicative = std::max(an.beta_multiplicative, (bxy - bx * by).norm() / scale);
            an.gamma_antimultiplicative = std::max(an.gamma_antimultiplicative, (cxy - cy * cx).norm() / scale);
            an.beta_gamma_orthogonal = std::max(an.beta_gamma_orthogonal, (bx * cy).norm() / scale);
        }
    an.split_done = true;
    return an;
}

// ---------------------------------------------------------------------------
// the two-case theorem
// ---------------------------------------------------------------------------

struct CaseReport {
    int case_number = 0; // 1 when ef = 0, 2 otherwise
    // case 1
    double subalgebra_residual = 0.0; // span alpha(N) closed under products, inside M
    bool m1_is_algebra = false;
    int cone_samples = 0;
    int cone_failures = 0;
    // case 2
    int dim_generated = 0;
    int dim_beta = 0;
    int dim_gamma = 0;
    bool direct_sum = false;
    bool witness_found = false;
    CVector witness;
    FeasibilityResult witness_result;
    bool passed = false;
};

namespace detail {

inline OperatorSubspace n_subspace_on_blocks(const ConcreteAlgebra& n, const AlgebraElement& which)
{
    std::vector<CMatrix> ops;
    const auto units = unit_refs(n.spec());
    for (std::size_t i = 0; i < units.size(); ++i)
        if (which.block(units[i].k).norm() > 0.5)
            ops.push_back(n.embedded_basis()[i]);
    return OperatorSubspace::span(n.hilbert_dim(), ops).mark_algebra(true);
}

} // namespace detail

inline CaseReport theorem_gen_evaluate(const EmbeddingAnalysis& an, int n_samples = 8, std::uint64_t seed = 0)
{
    if (!an.split_done)
        throw Error(ErrorKind::InvalidInput, "split_homo_antihomo must run first");
    const auto& tol = an.tol;
    const Eigen::Index d = an.M.hilbert_dim();
    CaseReport rep;
    Rng rng(seed ^ 0x2545F4914F6CDD1DULL);
    FeasibilityOptions fopt;
    fopt.seed = seed;

    if (an.ef_zero()) {
        rep.case_number = 1;
        const auto m1 = OperatorSubspace::span(d, an.embedded, tol.eq_rel);
        rep.m1_is_algebra = m1.verify_algebra(tol.eq_rel);
        const auto msub = an.M.subspace();
        rep.subalgebra_residual = m1.containment_residual(msub);
        for (const auto& x : m1.basis())
            for (const auto& y : m1.basis()) {
                const CMatrix p = x * y;
                rep.subalgebra_residual = std::max(rep.subalgebra_residual, (p - m1.project(p)).norm());
            }
        const auto nsub = an.N.subspace();
        // N_+ xi0 inside closure(M1_+ xi0)
        for (int s = 0; s < n_samples; ++s) {
            std::vector<CMatrix> blocks;
            for (const auto& b : an.N.spec().blocks()) {
                const CMatrix gmat = rand_gaussian(b.n, b.n, rng);
                blocks.push_back(gmat * gmat.adjoint());
            }
            const CVector zeta = an.N.embed(AlgebraElement(blocks)) * an.xi0;
            ++rep.cone_samples;
            fopt.seed = seed + static_cast<std::uint64_t>(s);
            if (!cone_member_general(m1, an.xi0, zeta, tol, fopt).member)
                ++rep.cone_failures;
        }
        // M1_+ xi0 inside closure(N_+ xi0)
        const auto herm = detail::hermitian_basis(m1, tol.eq_rel);
        for (int s = 0; s < n_samples; ++s) {
            CMatrix h = CMatrix::Zero(d, d);
            for (const auto& b : herm)
                h += rng.gaussian() * b;
            const CVector zeta = h * h * an.xi0;
            ++rep.cone_samples;
            fopt.seed = seed + 1000 + static_cast<std::uint64_t>(s);
            if (!cone_member_general(nsub, an.xi0, zeta, tol, fopt).member)
                ++rep.cone_failures;
        }
        rep.passed = rep.m1_is_algebra && rep.subalgebra_residual <= tol.eq_rel * std::sqrt(double(d))
                     && rep.cone_failures == 0;
        return rep;
    }

    rep.case_number = 2;
    const AlgebraElement ef = an.e * an.f;
    const auto units = detail::unit_refs(an.N.spec());
    const CMatrix gp = identity(d) - an.g;
    std::vector<CMatrix> imgs, bimgs, gimgs;
    for (std::size_t i = 0; i < units.size(); ++i)
        if (ef.block(units[i].k).norm() > 0.5) {
            imgs.push_back(an.embedded[i]);
            bimgs.push_back(an.embedded[i] * an.g);
            gimgs.push_back(an.embedded[i] * gp);
        }
    const auto gen = generated_algebra(imgs, d, tol);
    rep.dim_generated = gen.dim();
    rep.dim_beta = OperatorSubspace::span(d, bimgs, tol.eq_rel).dim();
    rep.dim_gamma = OperatorSubspace::span(d, gimgs, tol.eq_rel).dim();
    bool inside = true;
    for (const auto& b : bimgs)
        inside = inside && gen.member(b, tol.eq_rel).member;
    for (const auto& c : gimgs)
        inside = inside && gen.member(c, tol.eq_rel).member;
    rep.direct_sum = inside && rep.dim_generated == rep.dim_beta + rep.dim_gamma;

    // witness: g a xi0 outside closure((Nef)_+ xi0) for some a in (Nef)_+
    const auto nef = detail::n_subspace_on_blocks(an.N, ef);
    std::vector<AlgebraElement> candidates = {ef};
    for (int s = 0; s < n_samples; ++s) {
        std::vector<CMatrix> blocks;
        for (int k = 0; k < an.N.spec().num_blocks(); ++k) {
            const int n = an.N.spec().block(k).n;
            const CVector v = detail::random_unit(n, rng);
            blocks.push_back(ef.block(k).norm() > 0.5 ? CMatrix(v * v.adjoint()) : CMatrix(CMatrix::Zero(n, n)));
        }
        candidates.emplace_back(blocks);
    }
    for (const auto& c : candidates) {
        const CVector w = an.g * (an.N.embed(c) * an.xi0);
        fopt.seed = seed + 2000;
        const auto r = cone_member_general(nef, an.xi0, w, tol, fopt);
        if (!r.member) {
            rep.witness_found = true;
            rep.witness = w;
            rep.witness_result = r;
            break;
        }
    }
    rep.passed = rep.direct_sum && rep.witness_found;
    return rep;
}

// ---------------------------------------------------------------------------
// the cyclic case
// ---------------------------------------------------------------------------

struct StatementCheck {
    bool passed = false;
    double residual = 0.0;
};

struct CyclicReport {
    bool cyclic_for_n = false; // precondition
    StatementCheck separating;      // (1) xi0 separating for N
    StatementCheck ne_in_m;         // (2) e central in N and N e inside M
    StatementCheck tracial;         // (3) e^perp xi0 tracial for N e^perp
    StatementCheck jnj_in_m;        // (4) J N e^perp J inside M
    StatementCheck alpha_formula;   // (5) alpha(x) = g x + J g^perp x^* J and g = e
    bool passed = false;
    std::string first_failure;
};

/// Lifts an operator on range(W) back to H.
inline CMatrix lift(const CMatrix& w, const CMatrix& y) { return w * y * w.adjoint(); }

inline CyclicReport cyclic_case_report(const EmbeddingAnalysis& an)
{
    if (!an.split_done)
        throw Error(ErrorKind::InvalidInput, "split_homo_antihomo must run first");
    const auto& tol = an.tol;
    const Eigen::Index d = an.M.hilbert_dim();
    CyclicReport rep;
    rep.cyclic_for_n = check_cyclic(an.N, an.xi0, tol);
    if (!rep.cyclic_for_n) {
        rep.first_failure = "precondition: xi0 is not cyclic for N";
        return rep;
    }
    auto fail = [&](const char* what) {
        if (rep.first_failure.empty())
            rep.first_failure = what;
    };

    rep.separating.passed = check_separating(an.N, an.xi0, tol);
    if (!rep.separating.passed)
        fail("(1) xi0 separating for N");

    const auto nsub = an.N.subspace();
    const auto msub = an.M.subspace();
    const CMatrix e_op = an.N.embed(an.e);
    const CMatrix ep_op = identity(d) - e_op;
    double r2 = 0;
    for (const auto& b : nsub.basis())
        r2 = std::max(r2, (e_op * b - b * e_op).norm());
    for (const auto& x : an.N.embedded_basis()) {
        const CMatrix xe = x * e_op;
        if (xe.norm() > 0)
            r2 = std::max(r2, msub.member(xe, 1.0).residual / std::max(1.0, xe.norm()));
    }
    rep.ne_in_m = {r2 <= tol.eq_rel, r2};
    if (!rep.ne_in_m.passed)
        fail("(2) N e inside M");

    const Reduction red = reduce(nsub, ep_op, an.xi0, tol);
    if (red.isometry.cols() == 0) {
        rep.tracial = {true, 0.0};
        rep.jnj_in_m = {true, 0.0};
    } else {
        const double tr = tracial_residual(red.algebra, red.vector);
        rep.tracial = {tr <= tol.eq_rel * std::max(1.0, red.vector.squaredNorm()), tr};
    }
    if (!rep.tracial.passed)
        fail("(3) e-perp xi0 tracial for N e-perp");

    double r5 = (an.g - e_op).norm();
    if (red.isometry.cols() > 0) {
        try {
            const ModularData rmd = standard_form(red.algebra, red.vector, tol);
            double r4 = 0;
            for (const auto& y : red.algebra.basis()) {
                const CMatrix jyj = lift(red.isometry, rmd.j_conjugate(y));
                r4 = std::max(r4, msub.member(jyj, 1.0).residual / std::max(1.0, jyj.norm()));
            }
            rep.jnj_in_m = {r4 <= tol.eq_rel, r4};
            const CMatrix& w = red.isometry;
            for (std::size_t i = 0; i < an.embedded.size(); ++i) {
                const CMatrix& x = an.N.embedded_basis()[i];
                const CMatrix y = w.adjoint() * x.adjoint() * w;
                const CMatrix formula = an.g * x + lift(w, rmd.j_conjugate(y));
                r5 = std::max(r5, (formula - an.embedded[i]).norm() / std::max(1.0, an.embedded[i].norm()));
            }
        } catch (const Error&) {
            rep.jnj_in_m = {false, 1.0};
            r5 = std::max(r5, 1.0);
        }
    } else {
        for (std::size_t i = 0; i < an.embedded.size(); ++i) {
            const CMatrix formula = an.g * an.N.embedded_basis()[i];
            r5 = std::max(r5, (formula - an.embedded[i]).norm() / std::max(1.0, an.embedded[i].norm()));
        }
    }
    if (!rep.jnj_in_m.passed)
        fail("(4) J N e-perp J inside M");
    rep.alpha_formula = {r5 <= tol.eq_rel, r5};
    if (!rep.alpha_formula.passed)
        fail("(5) alpha formula and g = e");
    rep.passed = rep.first_failure.empty();
    return rep;
}

/// As cyclic_case_report, but throws PreconditionFailed when xi0 is not
/// cyclic for N and HypothesisFailed with the first broken statement.
inline CyclicReport cyclic_case_verify(const EmbeddingAnalysis& an)
{
    CyclicReport rep = cyclic_case_report(an);
    if (!rep.cyclic_for_n)
        throw Error(ErrorKind::PreconditionFailed, rep.first_failure);
    if (!rep.passed)
        throw Error(ErrorKind::HypothesisFailed, rep.first_failure);
    return rep;
}

// ---------------------------------------------------------------------------
// finite coincidence
// ---------------------------------------------------------------------------

struct FinCoincReport {
    bool contained = false;
    bool cyclic_a = false, separating_a = false;
    bool cyclic_b = false, separating_b = false;
    bool preconditions = false;
    int dim_a = 0, dim_b = 0;
    double containment_residual = 0.0;
};

/// For A inside B with a common cyclic separating vector, A = B. Throws
/// LemmaViolated if the preconditions hold and the dimensions differ.
inline FinCoincReport fin_coinc_check(const OperatorSubspace& a, const OperatorSubspace& b, const CVector& xi0,
                                      const TolerancePolicy& tol = {})
{
    FinCoincReport r;
    r.dim_a = a.dim();
    r.dim_b = b.dim();
    r.containment_residual = a.containment_residual(b);
    r.contained = r.containment_residual <= tol.eq_rel * std::sqrt(double(std::max(1, a.dim())));
    r.cyclic_a = check_cyclic(a, xi0, tol);
    r.separating_a = check_separating(a, xi0, tol);
    r.cyclic_b = check_cyclic(b, xi0, tol);
    r.separating_b = check_separating(b, xi0, tol);
    r.preconditions = r.contained && r.cyclic_a && r.separating_a && r.cyclic_b && r.separating_b;
    if (r.preconditions && r.dim_a != r.dim_b)
        throw Error(ErrorKind::LemmaViolated, "proper inclusion with a common cyclic separating vector");
    return r;
}

} // namespace sharpcone

#endif
