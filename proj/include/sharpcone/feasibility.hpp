#ifndef SHARPCONE_FEASIBILITY_HPP
#define SHARPCONE_FEASIBILITY_HPP

//
// Membership of zeta in closure(A_+ xi) for a self-adjoint algebra A when xi
// need not be separating, so the representing element is not unique.
//
// The Hermitian solutions of a xi = zeta form an affine set a0 + span(B_l)
// over the reals. If it is empty the answer is no. Otherwise lambda_min is
// concave on it and is maximized through the smoothed objective
//   f_mu(s) = -mu log sum_i exp(-lambda_i(a(s)) / mu)
// with BFGS and a decreasing mu. A negative optimum is certified by the
// dual matrix W = sum_i w_i v_i v_i^* (softmin weights): W >= 0, tr W = 1,
// <W, B_l> ~ 0 and <W, a0> < 0 rule out every positive point of the slice.
//

#include <cmath>
#include <string>
#include <vector>

#include "algebra.hpp"

namespace sharpcone {

struct FeasibilityResult {
    bool member = false;
    std::string certificate_kind; // "exact", "maximizer", "residual", "dual"
    double lambda_min = 0.0;      // best lambda_min found (or of the unique solution)
    double residual = 0.0;        // least-squares residual of a xi = zeta
    double stationarity = 0.0;    // |<W, B_l>| for dual certificates
    int slice_dim = 0;            // real dimension of the affine solution set
    CMatrix certificate;          // maximizing a, or W
};

struct FeasibilityOptions {
    int starts = 3;
    int max_iterations = 400;
    std::uint64_t seed = 0;
};

namespace detail {

/// Real orthonormal basis (trace inner product Re tr(x^* y)) of the
/// Hermitian part of a self-adjoint operator space.
inline std::vector<CMatrix> hermitian_basis(const OperatorSubspace& a, double drop_rel)
{
    std::vector<CMatrix> out;
    auto add = [&](CMatrix h) {
        // the basis is orthonormal, so a part this small is rounding noise
        const double n0 = h.norm();
        if (n0 <= drop_rel)
            return;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : out)
                h -= vec(q).dot(vec(h)).real() * q;
        const double n1 = h.norm();
        if (n1 > drop_rel * n0)
            out.push_back(h / n1);
    };
    for (const auto& b : a.basis()) {
        add(0.5 * (b + b.adjoint()));
        add((b - b.adjoint()) / Complex(0, 2));
    }
    return out;
}

struct Smoothed {
    double value = 0.0;      // f_mu
    double lambda_min = 0.0; // exact smallest eigenvalue
    RVector grad;
    CMatrix dual; // softmin-weighted eigenprojector sum
};

inline Smoothed smoothed_min(const CMatrix& a0, const std::vector<CMatrix>& dirs, const RVector& s, double mu)
{
    CMatrix a = a0;
    for (std::size_t l = 0; l < dirs.size(); ++l)
        a += s(static_cast<Eigen::Index>(l)) * dirs[l];
    a = 0.5 * (a + a.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    const RVector& lam = es.eigenvalues();
    const CMatrix& v = es.eigenvectors();
    const double lmin = lam(0);
    RVector w(lam.size());
    double z = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        w(i) = std::exp(-(lam(i) - lmin) / mu);
        z += w(i);
    }
    w /= z;
    Smoothed out;
    out.lambda_min = lmin;
    out.value = lmin - mu * std::log(z);
    out.dual = v * w.cast<Complex>().asDiagonal() * v.adjoint();
    out.grad = RVector(static_cast<Eigen::Index>(dirs.size()));
    for (std::size_t l = 0; l < dirs.size(); ++l)
        out.grad(static_cast<Eigen::Index>(l)) = vec(out.dual).dot(vec(dirs[l])).real();
    return out;
}

} // namespace detail

/// Decide zeta in closure(A_+ xi). Throws Inconclusive when neither a
/// feasible point nor a dual certificate is reached.
inline FeasibilityResult cone_member_general(const OperatorSubspace& a, const CVector& xi, const CVector& zeta,
                                             const TolerancePolicy& tol = {}, const FeasibilityOptions& opt = {})
{
    const Eigen::Index d = a.ambient_dim();
    if (xi.size() != d || zeta.size() != d)
        throw Error(ErrorKind::ShapeMismatch, "cone_member_general: sizes do not match");
    FeasibilityResult res;
    const auto herm = detail::hermitian_basis(a, tol.eq_rel);
    const Eigen::Index r = static_cast<Eigen::Index>(herm.size());

    // real least squares for sum_j t_j h_j xi = zeta
    RMatrix sys(2 * d, r);
    for (Eigen::Index j = 0; j < r; ++j) {
        const CVector c = herm[j] * xi;
        sys.col(j).head(d) = c.real();
        sys.col(j).tail(d) = c.imag();
    }
    RVector rhs(2 * d);
    rhs.head(d) = zeta.real();
    rhs.tail(d) = zeta.imag();

    RVector t0 = RVector::Zero(r);
    RMatrix null_dirs(r, 0);
    if (r > 0) {
        Eigen::JacobiSVD<RMatrix> svd(sys, Eigen::ComputeThinU | Eigen::ComputeFullV);
        const RVector& sv = svd.singularValues();
        const double smax = sv.size() > 0 ? sv(0) : 0.0;
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > smax * 1e-10)
                ++rank;
        svd.setThreshold(1e-10);
        t0 = svd.solve(rhs);
        null_dirs = svd.matrixV().rightCols(r - rank);
    }
    res.residual = (sys * t0 - rhs).norm();
    if (res.residual > tol.eq_rel * std::max(1.0, zeta.norm())) {
        res.member = false;
        res.certificate_kind = "residual";
        return res;
    }

    CMatrix a0 = CMatrix::Zero(d, d);
    for (Eigen::Index j = 0; j < r; ++j)
        a0 += t0(j) * herm[j];
    std::vector<CMatrix> dirs;
    for (Eigen::Index l = 0; l < null_dirs.cols(); ++l) {
        CMatrix b = CMatrix::Zero(d, d);
        for (Eigen::Index j = 0; j < r; ++j)
            b += null_dirs(j, l) * herm[j];
        dirs.push_back(b);
    }
    res.slice_dim = static_cast<int>(dirs.size());
    const double scale = std::max(1.0, op_norm(a0));
    const double floor = -tol.psd_rel * scale;

    if (dirs.empty()) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(0.5 * (a0 + a0.adjoint())));
        res.lambda_min = es.eigenvalues()(0);
        res.member = res.lambda_min >= floor;
        res.certificate_kind = "exact";
        if (res.member) {
            res.certificate = a0;
        } else {
            const CVector v = es.eigenvectors().col(0);
            res.certificate = v * v.adjoint();
        }
        return res;
    }

    const Eigen::Index k = static_cast<Eigen::Index>(dirs.size());
    Rng rng(opt.seed ^ 0x5851F42D4C957F2DULL);
    double best = -std::numeric_limits<double>::infinity();
    double best_stationarity = std::numeric_limits<double>::infinity();
    RVector best_s = RVector::Zero(k);
    auto point = [&](const RVector& s) {
        CMatrix m = a0;
        for (Eigen::Index l = 0; l < k; ++l)
            m += s(l) * dirs[static_cast<std::size_t>(l)];
        return m;
    };
    // A stationary point of f_mu yields W with <W, B_l> ~ 0; then <W, a> is
    // the same for every a in the slice and a negative value excludes PSD a.
    auto dual_certifies = [&](const detail::Smoothed& ev, const RVector& s) {
        const double w_a = vec(ev.dual).dot(vec(point(s))).real();
        return ev.grad.norm() <= 1e-9 * scale && w_a < 10.0 * floor;
    };

    for (int start = 0; start < std::max(1, opt.starts); ++start) {
        RVector s = RVector::Zero(k);
        if (start > 0)
            for (Eigen::Index l = 0; l < k; ++l)
                s(l) = scale * rng.gaussian();
        RMatrix h_inv = RMatrix::Identity(k, k);
        double mu = 0.1 * scale;
        auto ev = detail::smoothed_min(a0, dirs, s, mu);
        for (int iter = 0; iter < opt.max_iterations; ++iter) {
            if (ev.lambda_min >= floor)
                break;
            const bool stage_done = ev.grad.norm() <= 1e-9 * scale;
            if (stage_done) {
                if (dual_certifies(ev, s)) {
                    res.member = false;
                    res.certificate_kind = "dual";
                    res.lambda_min = ev.lambda_min;
                    res.stationarity = ev.grad.norm();
                    res.certificate = ev.dual;
                    return res;
                }
                if (mu <= 1e-10 * scale)
                    break;
                mu *= 0.1;
                h_inv.setIdentity();
                ev = detail::smoothed_min(a0, dirs, s, mu);
                continue;
            }
            RVector p = h_inv * ev.grad;
            if (p.dot(ev.grad) <= 0) {
                h_inv.setIdentity();
                p = ev.grad;
            }
            double step = 1.0;
            detail::Smoothed next;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                next = detail::smoothed_min(a0, dirs, RVector(s + step * p), mu);
                if (next.value >= ev.value + 1e-4 * step * ev.grad.dot(p)) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                // line search exhausted: treat the stage as converged
                if (dual_certifies(ev, s) || mu <= 1e-10 * scale)
                    break;
                mu *= 0.1;
                h_inv.setIdentity();
                ev = detail::smoothed_min(a0, dirs, s, mu);
                continue;
            }
            const RVector sk = step * p;
            const RVector yk = ev.grad - next.grad; // curvature of -f_mu
            s += sk;
            const double sy = sk.dot(yk);
            if (sy > 1e-300) {
                const double rho = 1.0 / sy;
                const RMatrix id = RMatrix::Identity(k, k);
                h_inv = (id - rho * sk * yk.transpose()) * h_inv * (id - rho * yk * sk.transpose())
                        + rho * sk * sk.transpose();
            }
            ev = next;
        }
        if (dual_certifies(ev, s) && ev.lambda_min < floor) {
            res.member = false;
            res.certificate_kind = "dual";
            res.lambda_min = ev.lambda_min;
            res.stationarity = ev.grad.norm();
            res.certificate = ev.dual;
            return res;
        }
        if (ev.lambda_min > best) {
            best = ev.lambda_min;
            best_s = s;
            best_stationarity = ev.grad.norm();
        }
        if (best >= floor)
            break;
    }

    res.lambda_min = best;
    res.stationarity = best_stationarity;
    if (best >= floor) {
        res.member = true;
        res.certificate_kind = "maximizer";
        res.certificate = point(best_s);
        return res;
    }
    throw Error(ErrorKind::Inconclusive, "feasibility search stalled at lambda_min " + std::to_string(best)
                                             + ", stationarity " + std::to_string(best_stationarity));
}

} // namespace sharpcone

#endif
