#include <gtest/gtest.h>

#include <algorithm>

#include "sharpcone/modular.hpp"
#include "fixtures.hpp"

using namespace sharpcone;
using namespace fixtures;

namespace {

// Oracle for a standard-form block with xi = rho^{1/2}: Delta zeta = rho zeta rho^{-1}.
CMatrix rho_oracle_delta(const CMatrix& rho)
{
    const Eigen::Index n = rho.rows();
    const CMatrix inv = rho.inverse();
    CMatrix out(n * n, n * n);
    for (Eigen::Index c = 0; c < n * n; ++c) {
        CVector e = CVector::Zero(n * n);
        e(c) = 1.0;
        out.col(c) = flat(rho * unflat(e, n, n) * inv);
    }
    return out;
}

struct Standard {
    ConcreteAlgebra M;
    CVector xi0;
    std::vector<CMatrix> rhos;
};

// Standard form blocks with positive xi blocks rho_k^{1/2}, rho_k random
// densities scaled by random weights.
Standard random_positive_standard(Rng& rng)
{
    std::vector<Block> blocks;
    const int nb = rng.uniform_int(1, 3);
    for (int k = 0; k < nb; ++k) {
        const int n = rng.uniform_int(1, 3);
        blocks.push_back({n, n});
    }
    Standard s{ConcreteAlgebra(AlgebraSpec(blocks)), CVector(), {}};
    std::vector<CMatrix> xi_blocks;
    double total = 0;
    for (const auto& b : blocks) {
        const double w = 0.3 + rng.uniform();
        CMatrix rho = w * rand_density(b.n, rng);
        total += rho.trace().real();
        s.rhos.push_back(rho);
    }
    for (auto& r : s.rhos) {
        r /= total;
        xi_blocks.push_back(sqrt_psd(r));
    }
    s.xi0 = StateVector(xi_blocks).flat();
    return s;
}

// Same block structure but general invertible xi blocks and a random intertwiner.
std::pair<ConcreteAlgebra, CVector> random_general(Rng& rng)
{
    std::vector<Block> blocks;
    const int nb = rng.uniform_int(1, 3);
    for (int k = 0; k < nb; ++k) {
        const int n = rng.uniform_int(1, 3);
        blocks.push_back({n, n});
    }
    AlgebraSpec spec(blocks);
    std::vector<CMatrix> xi_blocks;
    for (const auto& b : blocks)
        xi_blocks.push_back(rand_gaussian(b.n, b.n, rng) + 1.5 * identity(b.n));
    CVector xi = StateVector(xi_blocks).flat();
    xi /= xi.norm();
    const CMatrix u = rand_unitary(spec.hilbert_dim(), rng);
    return {ConcreteAlgebra(spec, u), u * xi};
}

} // namespace

TEST(StandardForm, FixBTracial)
{
    FixB b;
    const auto md = standard_form(b.M, b.xi0);
    EXPECT_LT((md.Delta - identity(2)).norm(), 1e-12);
    EXPECT_LT((md.J.mat - identity(2)).norm(), 1e-12);
}

TEST(StandardForm, FixAOracle)
{
    FixA a;
    const auto md = standard_form(a.M, a.xi0);
    EXPECT_LT((md.Delta - rho_oracle_delta(a.rho)).norm(), 1e-10);
    std::vector<double> spec(md.delta_eig.values.data(), md.delta_eig.values.data() + 4);
    EXPECT_NEAR(spec[0], 0.5, 1e-10);
    EXPECT_NEAR(spec[1], 1.0, 1e-10);
    EXPECT_NEAR(spec[2], 1.0, 1e-10);
    EXPECT_NEAR(spec[3], 2.0, 1e-10);
    // J zeta = zeta^*
    Rng rng(2);
    const CMatrix z = rand_gaussian(2, 2, rng);
    EXPECT_LT((md.J.apply(flat(z)) - flat(z.adjoint())).norm(), 1e-10);
}

TEST(StandardForm, FixATracialCase)
{
    FixA a(diag2(0.5, 0.5));
    const auto md = standard_form(a.M, a.xi0);
    EXPECT_LT((md.Delta - identity(4)).norm(), 1e-10);
    Rng rng(3);
    const CMatrix z = rand_gaussian(2, 2, rng);
    EXPECT_LT((md.J.apply(flat(z)) - flat(z.adjoint())).norm(), 1e-10);
}

TEST(StandardForm, RejectsNonCyclic)
{
    FixA a;
    CVector bad = flat(diag2(1, 0));
    try {
        standard_form(a.M, bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotCyclicSeparating);
    }
    ConcreteAlgebra tall(AlgebraSpec({{2, 1}}));
    CVector v(2);
    v << 1, 1;
    EXPECT_THROW(standard_form(tall, v), Error);
}

TEST(StandardForm, SubspaceFormAgrees)
{
    FixA a;
    const auto md1 = standard_form(a.M, a.xi0);
    const auto md2 = standard_form(a.M.subspace(), a.xi0);
    EXPECT_LT((md1.S.mat - md2.S.mat).norm(), 1e-10);
    EXPECT_LT((md1.Delta - md2.Delta).norm(), 1e-10);
}

TEST(ModularFlow, Cases)
{
    FixA a;
    const auto md = standard_form(a.M, a.xi0);
    const AlgebraElement x = a.el(unit2(0, 1));
    EXPECT_LT((modular_flow(md, 0.0, x) - x).frobenius(), 1e-12);
    const AlgebraElement one = AlgebraElement::identity(a.M.spec());
    EXPECT_LT((modular_flow(md, 2.7, one) - one).frobenius(), 1e-12);
    // rho^{it} e12 rho^{-it} = (2/3 / 1/3)^{it} e12 = 2^{it} e12
    const AlgebraElement f = modular_flow(md, 1.0, x);
    const Complex want = std::exp(Complex(0, std::log(2.0)));
    EXPECT_LT(std::abs(f.block(0)(0, 1) - want), 1e-10);
    EXPECT_NEAR(std::abs(f.block(0)(0, 1)), 1.0, 1e-12);
    EXPECT_LT(std::abs(f.block(0)(1, 0)), 1e-12);
}

TEST(FixedPointAlgebra, Cases)
{
    FixA a;
    const auto md = standard_form(a.M, a.xi0);
    const auto fp = fixed_point_algebra(md);
    EXPECT_EQ(fp.dim(), 2);
    EXPECT_TRUE(fp.member(a.M.embed(a.el(diag2(1, 0))), 1e-8).member);
    EXPECT_FALSE(fp.member(a.M.embed(a.el(unit2(0, 1))), 1e-8).member);

    FixA t(diag2(0.5, 0.5));
    EXPECT_EQ(fixed_point_algebra(standard_form(t.M, t.xi0)).dim(), 4);

    FixB b;
    EXPECT_EQ(fixed_point_algebra(standard_form(b.M, b.xi0)).dim(), 2);
}

TEST(IsTracial, Cases)
{
    FixB b;
    Rng rng(5);
    const CVector any = rand_gaussian(2, 1, rng);
    EXPECT_TRUE(is_tracial(b.M.subspace(), any));

    FixA t(diag2(0.5, 0.5));
    EXPECT_TRUE(is_tracial(t.M.subspace(), t.xi0));

    FixA a;
    EXPECT_FALSE(is_tracial(a.M.subspace(), a.xi0));
    // explicit pair (e12, e21)
    const CVector v1 = a.M.embed(a.el(unit2(0, 1) * unit2(1, 0))) * a.xi0;
    const CVector v2 = a.M.embed(a.el(unit2(1, 0) * unit2(0, 1))) * a.xi0;
    EXPECT_GT(std::abs(inner(v1, a.xi0) - inner(v2, a.xi0)), 0.1);
}

TEST(SApply, Cases)
{
    FixA a;
    const auto md = standard_form(a.M, a.xi0);
    EXPECT_LT((s_apply(md, a.xi0) - a.xi0).norm(), 1e-12);
    for (const auto& x : a.M.basis()) {
        const CVector got = s_apply(md, a.M.embed(x) * a.xi0);
        EXPECT_LT((got - a.M.embed(x.adjoint()) * a.xi0).norm(), 1e-12);
    }
    // S = J Delta^{1/2} against the rho oracle: Delta^{1/2} zeta = rho^{1/2} zeta rho^{-1/2}
    Rng rng(9);
    const CMatrix z = rand_gaussian(2, 2, rng);
    const CMatrix r = sqrt_psd(a.rho);
    const CMatrix want = (r * z * r.inverse()).adjoint();
    EXPECT_LT((s_apply(md, flat(z)) - flat(want)).norm(), 1e-10);
}

TEST(ModularProperties, RandomScenarios)
{
    for (int s = 0; s < 200; ++s) {
        Rng rng(40000 + s);
        auto [m, xi] = random_general(rng);
        const auto md = standard_form(m, xi);
        const auto r = modular_residuals(md);
        ASSERT_LE(r.s_defining, 1e-8) << s;
        ASSERT_LE(r.polar, 1e-8) << s;
        ASSERT_LE(r.j_involution, 1e-8) << s;
        ASSERT_LE(r.jdj, 1e-8) << s;
        ASSERT_LE(r.xi0_fixed, 1e-8) << s;
        ASSERT_LE(r.jmj_commutant, 1e-8) << s;
        ASSERT_LE(r.flow, 1e-8) << s;
        ASSERT_EQ(is_tracial(md.algebra, xi), (md.Delta - identity(md.dim())).norm() <= 1e-8) << s;
    }
}

TEST(ModularProperties, PositiveBlockOracle)
{
    for (int s = 0; s < 100; ++s) {
        Rng rng(50000 + s);
        const auto st = random_positive_standard(rng);
        const auto md = standard_form(st.M, st.xi0);
        const int d = st.M.hilbert_dim();
        CMatrix oracle = CMatrix::Zero(d, d);
        for (int k = 0; k < st.M.spec().num_blocks(); ++k) {
            const int off = st.M.spec().hilbert_offset(k);
            const int n = st.M.spec().block(k).n;
            oracle.block(off, off, n * n, n * n) = rho_oracle_delta(st.rhos[k]);
        }
        ASSERT_LE((md.Delta - oracle).norm(), 1e-8 * oracle.norm()) << s;
    }
}

TEST(ModularProperties, TracialIffDeltaIdentity)
{
    for (int s = 0; s < 40; ++s) {
        Rng rng(60000 + s);
        const int n = 1 + s % 3;
        ConcreteAlgebra m(AlgebraSpec({{n, n}}));
        // tracial: xi = unitary / sqrt(n); otherwise random
        CMatrix blk = (s % 2 == 0) ? CMatrix(rand_unitary(n, rng) / std::sqrt(double(n)))
                                   : CMatrix(rand_gaussian(n, n, rng) + identity(n));
        const CVector xi = flat(blk);
        const auto md = standard_form(m, xi);
        const bool delta_id = (md.Delta - identity(n * n)).norm() <= 1e-8;
        ASSERT_EQ(is_tracial(m.subspace(), xi), delta_id) << s;
        if (s % 2 == 0)
            ASSERT_TRUE(delta_id);
    }
}
