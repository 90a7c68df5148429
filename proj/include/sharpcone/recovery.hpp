#ifndef SHARPCONE_RECOVERY_HPP
#define SHARPCONE_RECOVERY_HPP

//
// Projections p on H seen through the cone: detection of central
// projections of M from cone preservation, and the conditions under which
// p = q e + J q^perp e J with q central and q^perp e fixed by the modular
// group.
//

#include <algorithm>
#include <cmath>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "cone.hpp"

namespace sharpcone {

inline void validate_projection(const CMatrix& p, Eigen::Index dim, const TolerancePolicy& tol)
{
    if (p.rows() != dim || p.cols() != dim)
        throw Error(ErrorKind::ShapeMismatch, "projection does not act on H");
    const double scale = std::max(1.0, p.norm());
    if ((p - p.adjoint()).norm() > tol.eq_rel * scale || (p * p - p).norm() > tol.eq_rel * scale)
        throw Error(ErrorKind::InvalidInput, "operator is not an orthogonal projection");
}

/// T(E_i) = rep(p E_i xi0) for the matrix units of M.
inline std::vector<AlgebraElement> projection_transfer(const ConeContext& ctx, const CMatrix& p)
{
    std::vector<AlgebraElement> out;
    for (const auto& b : ctx.algebra().embedded_basis())
        out.push_back(ctx.vector_to_operator(p * (b * ctx.xi0())));
    return out;
}

// ---------------------------------------------------------------------------
// cone preservation
// ---------------------------------------------------------------------------

struct PreservationWitness {
    int block = 0; // block of M
    CVector v;     // p v v^* xi0 is outside the cone
    double lambda_min = 0.0;
    double hermitian_residual = 0.0;
};

struct PreservationCheck {
    bool holds = true; // up to sampling
    int rays_checked = 0;
    double worst_score = 0.0;
    std::optional<PreservationWitness> witness;
};

namespace detail {

/// Lower is worse: lambda_min of the Hermitian part minus the anti-Hermitian size.
inline double ray_score(const AlgebraElement& img)
{
    return ConeContext::lambda_min(img) - img.hermitian_residual();
}

} // namespace detail

/// Samples rays v v^* of M (structured, seeded random, then a local search
/// from the worst starts) and checks that p maps them into the cone.
inline PreservationCheck preserves_cone(const ConeContext& ctx, const CMatrix& p, int n_samples = 16,
                                        std::uint64_t seed = 0)
{
    validate_projection(p, ctx.dim(), ctx.tol());
    const auto t = projection_transfer(ctx, p);
    const auto& spec = ctx.algebra().spec();
    Rng rng(seed ^ 0xA0761D6478BD642FULL);
    PreservationCheck out;

    auto evaluate = [&](int k, const CVector& v) {
        AlgebraElement img = AlgebraElement::zero(spec);
        const int n = spec.block(k).n;
        const int off = spec.algebra_offset(k);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                img += (v(a) * std::conj(v(b))) * t[static_cast<std::size_t>(off + a * n + b)];
        ++out.rays_checked;
        const ConeVerdict verdict = ctx.status_of(img);
        const double score = detail::ray_score(img) / std::max(1.0, img.norm());
        out.worst_score = std::min(out.worst_score, score);
        if (!verdict.member() && (!out.witness || score < out.witness->lambda_min)) {
            out.holds = false;
            out.witness = PreservationWitness{k, v, score, verdict.hermitian_residual};
        }
        return score;
    };

    for (int k = 0; k < spec.num_blocks(); ++k) {
        const int n = spec.block(k).n;
        std::vector<std::pair<double, CVector>> starts;
        for (const auto& v : detail::structured_rays(n))
            starts.emplace_back(evaluate(k, v), v);
        for (int s = 0; s < n_samples; ++s) {
            CVector v = rand_gaussian(n, 1, rng);
            v /= v.norm();
            starts.emplace_back(evaluate(k, v), v);
        }
        if (n == 1)
            continue;
        std::sort(starts.begin(), starts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        const std::size_t climbs = std::min<std::size_t>(3, starts.size());
        for (std::size_t c = 0; c < climbs; ++c) {
            auto [score, v] = starts[c];
            double step = 0.5;
            for (int it = 0; it < 40 && step > 1e-4; ++it) {
                CVector w = v + step * rand_gaussian(n, 1, rng);
                w /= w.norm();
                const double sw = evaluate(k, w);
                if (sw < score) {
                    score = sw;
                    v = w;
                } else {
                    step *= 0.7;
                }
            }
        }
    }
    return out;
}

/// max ||T(T(E_i)) - T(E_i)|| over the matrix units; T is idempotent when p
/// preserves the cone.
inline double transfer_idempotence_residual(const ConeContext& ctx, const CMatrix& p)
{
    const auto t = projection_transfer(ctx, p);
    double r = 0;
    for (const auto& ti : t) {
        const CVector c = ti.coordinates();
        AlgebraElement tt = AlgebraElement::zero(ctx.algebra().spec());
        for (Eigen::Index j = 0; j < c.size(); ++j)
            if (c(j) != Complex(0))
                tt += c(j) * t[static_cast<std::size_t>(j)];
        r = std::max(r, (tt - ti).frobenius() / std::max(1.0, ti.frobenius()));
    }
    return r;
}

// ---------------------------------------------------------------------------
// central projections
// ---------------------------------------------------------------------------

struct CentralDetection {
    bool central = false;
    AlgebraElement e;               // candidate support of T
    double basis_residual = 0.0;    // max ||p x xi0 - e x xi0|| / max(1, ||x xi0||)
    double commutation_residual = 0.0;
    PreservationCheck p_check;      // filled only on rejection
    PreservationCheck perp_check;
};

/// Accepts p iff p x xi0 = e x xi0 on a basis, with e the sum of the blocks
/// of M on which T does not vanish. The basis test is exact; the cone
/// preservation checks are run only to produce a witness on rejection.
inline CentralDetection central_detect_report(const ConeContext& ctx, const CMatrix& p, int n_samples = 16,
                                              std::uint64_t seed = 0)
{
    const auto& tol = ctx.tol();
    validate_projection(p, ctx.dim(), tol);
    const auto& m = ctx.algebra();
    const auto& spec = m.spec();
    const auto t = projection_transfer(ctx, p);
    std::vector<int> support;
    for (int k = 0; k < spec.num_blocks(); ++k) {
        const auto [lo, hi] = m.block_coordinate_range(k);
        double mx = 0;
        for (int i = lo; i < hi; ++i)
            mx = std::max(mx, t[static_cast<std::size_t>(i)].frobenius());
        if (mx > tol.eq_rel)
            support.push_back(k);
    }
    CentralDetection out;
    out.e = AlgebraElement::block_indicator(spec, support);
    const CMatrix e_op = m.embed(out.e);
    for (const auto& b : m.embedded_basis()) {
        const CVector xv = b * ctx.xi0();
        out.basis_residual =
            std::max(out.basis_residual, (p * xv - e_op * xv).norm() / std::max(1.0, xv.norm()));
        out.commutation_residual = std::max(out.commutation_residual, (e_op * b - b * e_op).norm());
    }
    out.central = out.basis_residual <= tol.eq_rel && out.commutation_residual <= tol.eq_rel;
    if (!out.central) {
        out.p_check = preserves_cone(ctx, p, n_samples, seed);
        out.perp_check = preserves_cone(ctx, CMatrix(identity(ctx.dim()) - p), n_samples, seed + 1);
    }
    return out;
}

/// Returns the central projection e with p = embed(e), or throws NotCentral.
inline AlgebraElement central_detect(const ConeContext& ctx, const CMatrix& p, int n_samples = 16,
                                     std::uint64_t seed = 0)
{
    const auto r = central_detect_report(ctx, p, n_samples, seed);
    if (!r.central) {
        std::string msg = "projection is not central (basis residual " + std::to_string(r.basis_residual) + ")";
        if (r.p_check.witness)
            msg += "; p breaks cone preservation on block " + std::to_string(r.p_check.witness->block);
        else if (r.perp_check.witness)
            msg += "; 1 - p breaks cone preservation on block " + std::to_string(r.perp_check.witness->block);
        throw Error(ErrorKind::NotCentral, msg);
    }
    return r.e;
}

// ---------------------------------------------------------------------------
// right action of a projection of M
// ---------------------------------------------------------------------------

/// The unique linear P with P x xi0 = x e xi0 for every x in M.
inline CMatrix right_action_operator(const ConeContext& ctx, const AlgebraElement& e)
{
    const auto& m = ctx.algebra();
    const Eigen::Index d = ctx.dim();
    const CMatrix e_op = m.embed(e);
    CMatrix x(d, m.dim()), xe(d, m.dim());
    for (int i = 0; i < m.dim(); ++i) {
        x.col(i) = m.embedded_basis()[i] * ctx.xi0();
        xe.col(i) = m.embedded_basis()[i] * (e_op * ctx.xi0());
    }
    // P x = xe, i.e. x^T P^T = xe^T
    const auto sol = lin_solve(CMatrix(x.transpose()), CMatrix(xe.transpose()), ctx.tol());
    return sol.x.transpose();
}

struct FixedLemmaReport {
    double precondition_residual = 0.0; // max ||p x xi0 - x e xi0|| / max(1, ||x xi0||)
    double delta_commutator = 0.0;      // ||Delta E - E Delta|| / max(1, ||Delta||)
    double jej_residual = 0.0;          // ||p - J E J||
    bool passed = false;
};

/// If p x xi0 = x e xi0 on a basis then e commutes with Delta and p = J e J.
/// Throws PreconditionFailed when the hypothesis does not hold.
inline FixedLemmaReport fixed_lemma_check(const ConeContext& ctx, const AlgebraElement& e, const CMatrix& p)
{
    const auto& tol = ctx.tol();
    const auto& m = ctx.algebra();
    const auto& md = ctx.modular();
    const CMatrix e_op = m.embed(e);
    FixedLemmaReport r;
    for (const auto& b : m.embedded_basis()) {
        const CVector xv = b * ctx.xi0();
        r.precondition_residual = std::max(r.precondition_residual,
                                           (p * xv - b * (e_op * ctx.xi0())).norm() / std::max(1.0, xv.norm()));
    }
    if (r.precondition_residual > tol.eq_rel)
        throw Error(ErrorKind::PreconditionFailed,
                    "p x xi0 = x e xi0 fails (residual " + std::to_string(r.precondition_residual) + ")");
    r.delta_commutator = (md.Delta * e_op - e_op * md.Delta).norm() / std::max(1.0, md.Delta.norm());
    r.jej_residual = (p - md.j_conjugate(e_op)).norm();
    r.passed = r.delta_commutator <= tol.eq_rel && r.jej_residual <= tol.eq_rel;
    return r;
}

// ---------------------------------------------------------------------------
// projection recovery
// ---------------------------------------------------------------------------

struct ConditionRecord {
    std::string name;
    bool passed = false;
    bool skipped = false; // not evaluated because a prerequisite failed
    double residual = 0.0;
    double tolerance = 0.0;
};

struct ConditionReport {
    std::vector<ConditionRecord> records;
    AlgebraElement rep;     // rep(p xi0)
    bool all_passed = false;

    const ConditionRecord* find(const std::string& name) const
    {
        for (const auto& r : records)
            if (r.name == name)
                return &r;
        return nullptr;
    }

    /// First failing record, or nullptr.
    const ConditionRecord* first_failure() const
    {
        for (const auto& r : records)
            if (!r.passed)
                return &r;
        return nullptr;
    }
};

namespace recovery_names {
inline constexpr const char* pre_k = "pre: p xi0 in K";
inline constexpr const char* pre_cone = "pre: p xi0 in cone";
inline constexpr const char* cond1 = "1: p xi0 <= xi0";
inline constexpr const char* cond2 = "2: p fixes the face below p xi0";
inline constexpr const char* cond3 = "3: p-perp fixes the face below p-perp xi0";
inline constexpr const char* projective = "4: p xi0 projective";
inline constexpr const char* cond4_rep = "4: p xi in K + iK";
inline constexpr const char* cond4a = "4(a): corner(p xi0, p od) = 0";
inline constexpr const char* cond4b = "4(b): corner(p-perp xi0, p od) = 0";
inline constexpr const char* cond4c = "4(c): (p od)^2 = 0";
inline constexpr const char* cond4d = "4(d): (p-perp od)^2 = 0";
inline constexpr const char* cond4e = "4(e): S p od = p-perp S od";
} // namespace recovery_names

inline ConditionReport recover_conditions(const ConeContext& ctx, const CMatrix& p)
{
    namespace rn = recovery_names;
    const auto& tol = ctx.tol();
    validate_projection(p, ctx.dim(), tol);
    const auto& m = ctx.algebra();
    const Eigen::Index d = ctx.dim();
    const CMatrix pp = identity(d) - p;
    const CVector& xi0 = ctx.xi0();
    ConditionReport rep;
    auto add = [&](const char* name, bool passed, double residual, double tolerance, bool skipped = false) {
        rep.records.push_back({name, passed, skipped, residual, tolerance});
    };
    auto skip_from = [&](std::size_t first_index) {
        static const char* order[] = {rn::cond1, rn::cond2, rn::cond3, rn::projective, rn::cond4_rep,
                                      rn::cond4a, rn::cond4b, rn::cond4c, rn::cond4d, rn::cond4e};
        for (std::size_t i = first_index; i < std::size(order); ++i)
            add(order[i], false, 0.0, tol.eq_rel, true);
    };

    const CVector pxi = p * xi0;
    rep.rep = ctx.vector_to_operator(pxi);
    const double herm = rep.rep.hermitian_residual();
    const double herm_tol = tol.eq_rel * std::max(1.0, rep.rep.frobenius());
    add(rn::pre_k, herm <= herm_tol, herm, herm_tol);
    if (herm > herm_tol) {
        add(rn::pre_cone, false, 0.0, 0.0, true);
        skip_from(0);
        return rep;
    }
    const ConeVerdict in_cone = ctx.status_of(rep.rep);
    add(rn::pre_cone, in_cone.member(), std::max(0.0, -in_cone.lambda_min), -in_cone.floor);

    // 1
    const ConeVerdict below = ctx.status(CVector(xi0 - pxi));
    add(rn::cond1, below.member(), std::max(0.0, -below.lambda_min), -below.floor);
    if (!in_cone.member()) {
        skip_from(1);
        return rep;
    }

    // 2 and 3: the face {0 <= z <= a} spans s M s with s = support(a)
    auto face_check = [&](const AlgebraElement& a, const CMatrix& proj) {
        const double thr = tol.psd_rel * std::max(1.0, a.norm());
        const AlgebraElement s = detail::block_spectral(a, tol, [thr](double l) {
            return Complex(l > thr ? 1.0 : 0.0, 0.0);
        });
        const CMatrix s_op = m.embed(s);
        double r = 0;
        for (const auto& b : m.embedded_basis()) {
            const CVector v = s_op * b * s_op * xi0;
            r = std::max(r, (proj * v - v).norm() / std::max(1.0, v.norm()));
        }
        return r;
    };
    const double r2 = face_check(rep.rep, p);
    add(rn::cond2, r2 <= tol.eq_rel, r2, tol.eq_rel);
    const AlgebraElement rep_perp = AlgebraElement::identity(m.spec()) - rep.rep;
    const double r3 = ctx.status_of(rep_perp).member() ? face_check(rep_perp, pp) : 1.0;
    add(rn::cond3, r3 <= tol.eq_rel, r3, tol.eq_rel);

    // 4
    const bool proj = is_projective(ctx, pxi);
    const double idem = (rep.rep * rep.rep - rep.rep).frobenius();
    add(rn::projective, proj, idem, tol.eq_rel * std::max(1.0, rep.rep.frobenius()));
    if (!proj) {
        skip_from(4);
        rep.all_passed = false;
        return rep;
    }
    const CVector pxi_perp = xi0 - pxi;
    double r_rep = 0, ra = 0, rb = 0, rc = 0, rd = 0, re = 0;
    std::vector<CVector> pod, ppod;
    std::vector<double> scales;
    for (const auto& b : m.embedded_basis()) {
        const CVector xi = b * xi0;
        const double scale = std::max(1.0, xi.norm());
        const CVector od = offdiag(ctx, pxi, xi);
        const CVector v = p * od;
        const CVector w = pp * od;
        r_rep = std::max(r_rep, (ctx.operator_to_vector(ctx.vector_to_operator(v)) - v).norm() / scale);
        ra = std::max(ra, corner(ctx, pxi, v).norm() / scale);
        rb = std::max(rb, corner(ctx, pxi_perp, v).norm() / scale);
        re = std::max(re, (s_apply(ctx.modular(), v) - pp * s_apply(ctx.modular(), od)).norm() / scale);
        pod.push_back(v);
        ppod.push_back(w);
        scales.push_back(scale);
    }
    // quadratic conditions on the basis and on pairwise sums
    for (std::size_t i = 0; i < pod.size(); ++i)
        for (std::size_t j = i; j < pod.size(); ++j) {
            const double s2 = (scales[i] + (i == j ? 0.0 : scales[j]));
            const CVector v = i == j ? pod[i] : CVector(pod[i] + pod[j]);
            const CVector w = i == j ? ppod[i] : CVector(ppod[i] + ppod[j]);
            rc = std::max(rc, square(ctx, v).norm() / (s2 * s2));
            rd = std::max(rd, square(ctx, w).norm() / (s2 * s2));
        }
    add(rn::cond4_rep, r_rep <= tol.eq_rel, r_rep, tol.eq_rel);
    add(rn::cond4a, ra <= tol.eq_rel, ra, tol.eq_rel);
    add(rn::cond4b, rb <= tol.eq_rel, rb, tol.eq_rel);
    add(rn::cond4c, rc <= tol.eq_rel, rc, tol.eq_rel);
    add(rn::cond4d, rd <= tol.eq_rel, rd, tol.eq_rel);
    add(rn::cond4e, re <= tol.eq_rel, re, tol.eq_rel);

    rep.all_passed = true;
    for (const auto& r : rep.records)
        rep.all_passed = rep.all_passed && r.passed;
    return rep;
}

struct Recovered {
    AlgebraElement e;
    AlgebraElement q; // central
    std::vector<int> q_blocks;
    std::vector<int> tie_blocks;
    double identity_residual = 0.0; // ||p - (embed(q e) + J embed(q^perp e) J)||
    double sigma_residual = 0.0;    // ||[Delta, embed(q^perp e)]|| / max(1, ||Delta||)
};

/// Tolerance for the assembled identity: errors of the order eq_rel from
/// each condition add up over the basis.
inline double recovery_tolerance(const TolerancePolicy& tol) { return 10.0 * tol.eq_rel; }

/// Reconstructs (e, q) after all conditions pass. Throws ReconstructionFailed.
inline Recovered recover_projection(const ConeContext& ctx, const CMatrix& p, const ConditionReport& report)
{
    if (!report.all_passed)
        throw Error(ErrorKind::PreconditionFailed, "recovery conditions do not all hold");
    const auto& tol = ctx.tol();
    const auto& m = ctx.algebra();
    const auto& spec = m.spec();
    const auto& md = ctx.modular();
    const CVector& xi0 = ctx.xi0();
    Recovered out;
    out.e = report.rep;
    out.e = 0.5 * (out.e + out.e.adjoint());
    if ((out.e * out.e - out.e).frobenius() > tol.eq_rel * std::max(1.0, out.e.frobenius()))
        throw Error(ErrorKind::ReconstructionFailed, "rep(p xi0) is not a projection");
    const CMatrix e_op = m.embed(out.e);
    const CVector jej_xi0 = md.j_conjugate(e_op) * xi0;

    std::vector<int> perp_blocks;
    for (int k = 0; k < spec.num_blocks(); ++k) {
        const auto [lo, hi] = m.block_coordinate_range(k);
        double left = 0, right = 0;
        for (int i = lo; i < hi; ++i) {
            const CMatrix& x = m.embedded_basis()[static_cast<std::size_t>(i)];
            const CVector xv = x * xi0;
            const double scale = std::max(1.0, xv.norm());
            const CVector pxv = p * xv;
            left = std::max(left, (pxv - e_op * xv).norm() / scale);
            right = std::max(right, (pxv - x * jej_xi0).norm() / scale);
        }
        const bool on_q = left <= recovery_tolerance(tol);
        const bool on_perp = right <= recovery_tolerance(tol);
        if (on_q && on_perp)
            out.tie_blocks.push_back(k);
        if (on_q)
            out.q_blocks.push_back(k);
        else if (on_perp)
            perp_blocks.push_back(k);
        else
            throw Error(ErrorKind::ReconstructionFailed,
                        "block " + std::to_string(k) + " matches neither side (left " + std::to_string(left)
                            + ", right " + std::to_string(right) + ")");
    }
    out.q = AlgebraElement::block_indicator(spec, out.q_blocks);
    const AlgebraElement qperp_e = AlgebraElement::block_indicator(spec, perp_blocks) * out.e;
    const CMatrix qpe_op = m.embed(qperp_e);
    const CMatrix assembled = m.embed(out.q * out.e) + md.j_conjugate(qpe_op);
    out.identity_residual = (p - assembled).norm();
    out.sigma_residual = (md.Delta * qpe_op - qpe_op * md.Delta).norm() / std::max(1.0, md.Delta.norm());
    if (out.identity_residual > recovery_tolerance(tol) || out.sigma_residual > recovery_tolerance(tol))
        throw Error(ErrorKind::ReconstructionFailed,
                    "assembled projection differs from p (identity " + std::to_string(out.identity_residual)
                        + ", modular " + std::to_string(out.sigma_residual) + ")");
    return out;
}

struct CorollaryReport {
    int fixed_point_dim = 0;
    bool hypothesis_holds = false; // the fixed-point algebra is trivial
    bool p_in_m = false;
    double membership_residual = 0.0;
    std::string note;
};

/// With a trivial fixed-point algebra q^perp e is 0 or 1, so p lies in M.
/// Membership is reported in every case; the hypothesis only when dim H = 1.
inline CorollaryReport corollary_deduce(const ConeContext& ctx, const CMatrix& p, const Recovered& r)
{
    const auto& tol = ctx.tol();
    CorollaryReport out;
    out.fixed_point_dim = fixed_point_algebra(ctx.modular()).dim();
    out.hypothesis_holds = out.fixed_point_dim == 1;
    const auto mem = ctx.algebra().subspace().member(p, tol.eq_rel);
    out.membership_residual = mem.residual;
    out.p_in_m = mem.member || p.norm() == 0.0;
    const bool q_is_one = (r.q - AlgebraElement::identity(ctx.algebra().spec())).frobenius() == 0.0;
    if (out.hypothesis_holds) {
        out.note = "trivial fixed-point algebra: p is asserted to lie in M";
        if (!out.p_in_m)
            throw Error(ErrorKind::LemmaViolated, "trivial fixed-point algebra but p is not in M");
    } else if (q_is_one) {
        out.note = "hypothesis not satisfied; q = 1 gives p = e in M directly";
    } else {
        out.note = "hypothesis not satisfied";
    }
    return out;
}

} // namespace sharpcone

#endif
