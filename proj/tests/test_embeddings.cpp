#include <gtest/gtest.h>

#include "sharpcone/embeddings.hpp"
#include "fixtures.hpp"

using namespace sharpcone;
using namespace fixtures;

namespace {

/// vec(X) -> vec(X^T) on row-major n x n matrices.
CMatrix swap_matrix(int n)
{
    CMatrix p = CMatrix::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            p(j * n + i, i * n + j) = 1.0;
    return p;
}

/// N = M' realized as M_n acting through X -> X x^T.
ConcreteAlgebra right_action(int n) { return ConcreteAlgebra(AlgebraSpec({{n, n}}), swap_matrix(n)); }

/// Intertwiner placing an n x 2n block as x (+) (right multiplication by x^T).
CMatrix mix_intertwiner(int n)
{
    const int d = 2 * n * n;
    CMatrix w = CMatrix::Zero(d, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2 * n; ++j) {
            const int src = i * 2 * n + j;
            const int dst = j < n ? i * n + j : n * n + (j - n) * n + i;
            w(dst, src) = 1.0;
        }
    return w;
}

struct Mixed {
    ConcreteAlgebra M;
    ConcreteAlgebra N;
    CVector xi0;
    CMatrix q_block; // expected g = e on H
};

/// M = M_n (+) M_n in standard form, first block generic, second tracial.
/// N has the same blocks; the first acts by left and the second by right
/// multiplication (transposed), so e = g = first block and f = second.
Mixed mixed_scenario(int n, std::uint64_t seed)
{
    Rng rng(seed);
    AlgebraSpec spec({{n, n}, {n, n}});
    const CMatrix x1 = rand_gaussian(n, n, rng) + 2.0 * identity(n);
    const CMatrix x2 = 0.7 * rand_unitary(n, rng);
    CVector xi0 = StateVector(std::vector<CMatrix>{x1, x2}).flat();
    xi0 /= xi0.norm();
    CMatrix w = CMatrix::Identity(2 * n * n, 2 * n * n);
    w.bottomRightCorner(n * n, n * n) = swap_matrix(n);
    CMatrix q = CMatrix::Zero(2 * n * n, 2 * n * n);
    q.topLeftCorner(n * n, n * n).setIdentity();
    return {ConcreteAlgebra(spec), ConcreteAlgebra(spec, w), xi0, q};
}

} // namespace

TEST(VerifyConeInclusion, SubalgebraHolds)
{
    FixA f;
    const ConeContext ctx(f.M, f.xi0);
    const ConcreteAlgebra diag(AlgebraSpec({{1, 2}, {1, 2}}));
    const auto r = verify_cone_inclusion(diag, ctx, 8, 1);
    EXPECT_TRUE(r.holds);
    EXPECT_FALSE(r.witness.has_value());
}

TEST(VerifyConeInclusion, TracialCommutantHolds)
{
    FixA f(diag2(0.5, 0.5));
    const ConeContext ctx(f.M, f.xi0);
    EXPECT_TRUE(verify_cone_inclusion(right_action(2), ctx, 16, 2).holds);
}

TEST(VerifyConeInclusion, NonTracialCommutantViolated)
{
    FixA f;
    const ConeContext ctx(f.M, f.xi0);
    const auto r = verify_cone_inclusion(right_action(2), ctx, 16, 3);
    ASSERT_FALSE(r.holds);
    ASSERT_TRUE(r.witness.has_value());
    // oracle: a acts as X -> X a^T, so rep(a xi0) = X0 a^T X0^{-1}
    const CVector v = r.witness->v;
    const CMatrix a = v * v.adjoint();
    const CMatrix x = unflat(f.xi0, 2, 2);
    const CMatrix rep = x * a.transpose() * x.inverse();
    const CMatrix h = 0.5 * (rep + rep.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    EXPECT_TRUE((rep - rep.adjoint()).norm() > 1e-6 || es.eigenvalues()(0) < -1e-6);
}

TEST(ComputeAlpha, IdentityAndScalars)
{
    FixA f;
    const ConeContext ctx(f.M, f.xi0);
    const auto an = compute_alpha(f.M, ctx);
    EXPECT_LT(an.defining_residual, 1e-12);
    for (std::size_t i = 0; i < an.images.size(); ++i)
        EXPECT_LT((an.images[i] - f.M.basis()[i]).frobenius(), 1e-12);

    const ConcreteAlgebra scalars(AlgebraSpec({{1, 4}}));
    const auto sc = compute_alpha(scalars, ctx);
    EXPECT_LT((sc.images[0] - AlgebraElement::identity(f.M.spec())).frobenius(), 1e-12);
}

TEST(ComputeAlpha, TracialCommutantIsTranspose)
{
    FixA f(diag2(0.5, 0.5));
    const ConeContext ctx(f.M, f.xi0);
    const auto an = compute_alpha(right_action(2), ctx);
    Rng rng(5);
    for (int s = 0; s < 10; ++s) {
        const CMatrix x = rand_gaussian(2, 2, rng);
        const AlgebraElement ax = an.alpha(AlgebraElement({x}));
        EXPECT_LT((ax.block(0) - x.transpose()).norm(), 1e-12);
    }
}

TEST(ComputeAlpha, PositiveMapProperties)
{
    const auto mx = mixed_scenario(2, 11);
    const ConeContext ctx(mx.M, mx.xi0);
    const auto an = compute_alpha(mx.N, ctx);
    EXPECT_LT(an.defining_residual, 1e-10);
    EXPECT_LT((an.alpha(AlgebraElement::identity(mx.N.spec())) - AlgebraElement::identity(mx.M.spec())).frobenius(),
              1e-10);
    Rng rng(12);
    for (int s = 0; s < 20; ++s) {
        std::vector<CMatrix> b;
        for (const auto& blk : mx.N.spec().blocks()) {
            const CMatrix g = rand_gaussian(blk.n, blk.n, rng);
            b.push_back(g * g.adjoint());
        }
        const AlgebraElement a(b);
        const AlgebraElement img = an.alpha(a);
        EXPECT_LT((an.alpha(a.adjoint()) - img.adjoint()).frobenius(), 1e-10);
        EXPECT_LE(img.norm(), a.norm() * (1 + 1e-10));
    }
}

TEST(CheckJordan, IdentityTransposeAndCounterexample)
{
    FixA f;
    const auto& spec = f.M.spec();
    std::vector<AlgebraElement> id, tr, phi;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            id.push_back(AlgebraElement::matrix_unit(spec, 0, a, b));
            tr.push_back(AlgebraElement::matrix_unit(spec, 0, b, a));
            CMatrix m = 0.5 * unit2(a, b);
            if (a == b)
                m += 0.25 * identity(2);
            phi.push_back(AlgebraElement({m}));
        }
    const auto r_id = check_jordan(make_analysis(f.M, f.M, f.xi0, id), 8, 1);
    EXPECT_TRUE(r_id.passed);
    EXPECT_LT(r_id.anticommutator, 1e-15);
    const auto r_tr = check_jordan(make_analysis(f.M, f.M, f.xi0, tr), 8, 1);
    EXPECT_TRUE(r_tr.passed);
    EXPECT_LT(r_tr.anticommutator, 1e-15);
    const auto r_phi = check_jordan(make_analysis(f.M, f.M, f.xi0, phi), 8, 1);
    EXPECT_FALSE(r_phi.passed);
    EXPECT_GT(r_phi.anticommutator, 0.1);
}

TEST(Split, IdentityIsHomomorphic)
{
    FixA f;
    const ConeContext ctx(f.M, f.xi0);
    auto an = compute_alpha(f.M, ctx);
    split_homo_antihomo(an);
    EXPECT_LT((an.g - identity(4)).norm(), 1e-10);
    EXPECT_LT((an.e - AlgebraElement::identity(f.M.spec())).frobenius(), 1e-14);
    EXPECT_LT(an.f.frobenius(), 1e-14);
}

TEST(Split, TracialCommutantIsAntihomomorphic)
{
    FixA f(diag2(0.5, 0.5));
    const ConeContext ctx(f.M, f.xi0);
    const auto n = right_action(2);
    auto an = compute_alpha(n, ctx);
    split_homo_antihomo(an);
    EXPECT_LT(an.g.norm(), 1e-10);
    EXPECT_LT(an.e.frobenius(), 1e-14);
    EXPECT_LT((an.f - AlgebraElement::identity(n.spec())).frobenius(), 1e-14);
    EXPECT_LT(an.gamma_antimultiplicative, 1e-10);
}

TEST(Split, AbelianGoesToBeta)
{
    FixA f;
    const ConeContext ctx(f.M, f.xi0);
    const ConcreteAlgebra diag(AlgebraSpec({{1, 2}, {1, 2}}));
    auto an = compute_alpha(diag, ctx);
    split_homo_antihomo(an);
    EXPECT_LT((an.g - identity(4)).norm(), 1e-10);
    EXPECT_LT(an.f.frobenius(), 1e-14);
    for (const auto& s : an.summands) {
        EXPECT_TRUE(s.homomorphic);
        EXPECT_TRUE(s.antihomomorphic);
    }
}

TEST(Split, NonJordanMapIsUnclassifiable)
{
    FixA f;
    std::vector<AlgebraElement> phi;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            CMatrix m = 0.5 * unit2(a, b);
            if (a == b)
                m += 0.25 * identity(2);
            phi.push_back(AlgebraElement({m}));
        }
    auto an = make_analysis(f.M, f.M, f.xi0, phi);
    try {
        split_homo_antihomo(an);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnclassifiableBlock);
    }
}

TEST(Split, MixedScenarioGroundTruth)
{
    for (int s = 0; s < 10; ++s) {
        const auto mx = mixed_scenario(1 + s % 3, 40 + s);
        const ConeContext ctx(mx.M, mx.xi0);
        ASSERT_TRUE(verify_cone_inclusion(mx.N, ctx, 8, s).holds);
        auto an = compute_alpha(mx.N, ctx);
        ASSERT_TRUE(check_jordan(an, 8, s).passed) << s;
        split_homo_antihomo(an, s);
        if (mx.N.spec().block(0).n == 1) {
            // scalar blocks are commutative: everything goes to beta
            ASSERT_LT((an.g - identity(2)).norm(), 1e-6) << s;
            ASSERT_LT((an.e - AlgebraElement::identity(mx.N.spec())).frobenius(), 1e-12) << s;
            continue;
        }
        ASSERT_LT((an.g - mx.q_block).norm(), 1e-6) << s;
        const auto e_exp = AlgebraElement::block_indicator(mx.N.spec(), {0});
        const auto f_exp = AlgebraElement::block_indicator(mx.N.spec(), {1});
        ASSERT_LT((an.e - e_exp).frobenius(), 1e-12) << s;
        ASSERT_LT((an.f - f_exp).frobenius(), 1e-12) << s;
        ASSERT_LT(an.beta_multiplicative, 1e-8);
        ASSERT_LT(an.gamma_antimultiplicative, 1e-8);
        ASSERT_LT(an.beta_gamma_orthogonal, 1e-8);
    }
}

TEST(TheoremGen, SubalgebraIsCaseOne)
{
    FixA f;
    const ConeContext ctx(f.M, f.xi0);
    const ConcreteAlgebra diag(AlgebraSpec({{1, 2}, {1, 2}}));
    auto an = compute_alpha(diag, ctx);
    split_homo_antihomo(an);
    const auto r = theorem_gen_evaluate(an, 6, 1);
    EXPECT_EQ(r.case_number, 1);
    EXPECT_TRUE(r.m1_is_algebra);
    EXPECT_EQ(r.cone_failures, 0);
    EXPECT_TRUE(r.passed);
}

TEST(TheoremGen, TracialCommutantIsCaseOne)
{
    FixA f(diag2(0.5, 0.5));
    const ConeContext ctx(f.M, f.xi0);
    auto an = compute_alpha(right_action(2), ctx);
    split_homo_antihomo(an);
    const auto r = theorem_gen_evaluate(an, 6, 2);
    EXPECT_EQ(r.case_number, 1);
    EXPECT_TRUE(r.passed);
}

TEST(TheoremGen, MixedSummandIsCaseTwo)
{
    for (int n = 2; n <= 3; ++n) {
        Rng rng(70 + n);
        AlgebraSpec spec({{n, n}, {n, n}});
        const CMatrix x1 = rand_gaussian(n, n, rng) + 2.0 * identity(n);
        const CMatrix x2 = (1.0 / std::sqrt(double(n))) * identity(n);
        CVector xi0 = StateVector(std::vector<CMatrix>{x1, x2}).flat();
        xi0 /= xi0.norm();
        const ConcreteAlgebra m(spec);
        const ConcreteAlgebra nalg(AlgebraSpec({{n, 2 * n}}), mix_intertwiner(n));
        const ConeContext ctx(m, xi0);
        ASSERT_TRUE(verify_cone_inclusion(nalg, ctx, 8, 1).holds);
        auto an = compute_alpha(nalg, ctx);
        // alpha(x) = x (+) x^T
        Rng r2(3);
        const CMatrix x = rand_gaussian(n, n, r2);
        const AlgebraElement ax = an.alpha(AlgebraElement({x}));
        ASSERT_LT((ax.block(0) - x).norm(), 1e-10);
        ASSERT_LT((ax.block(1) - x.transpose()).norm(), 1e-10);
        split_homo_antihomo(an);
        EXPECT_LT((an.e - AlgebraElement::identity(nalg.spec())).frobenius(), 1e-12);
        EXPECT_LT((an.f - AlgebraElement::identity(nalg.spec())).frobenius(), 1e-12);
        const auto r = theorem_gen_evaluate(an, 4, 5);
        EXPECT_EQ(r.case_number, 2);
        EXPECT_EQ(r.dim_beta, n * n);
        EXPECT_EQ(r.dim_gamma, n * n);
        EXPECT_EQ(r.dim_generated, 2 * n * n);
        EXPECT_TRUE(r.direct_sum);
        ASSERT_TRUE(r.witness_found);
        // the witness g a xi0 is not even reachable by a xi0 with a in N
        EXPECT_FALSE(r.witness_result.member);
        EXPECT_TRUE(r.passed);
    }
}

TEST(CyclicCase, IdentityAndTracialCommutant)
{
    FixA f;
    const ConeContext ctx(f.M, f.xi0);
    auto an = compute_alpha(f.M, ctx);
    split_homo_antihomo(an);
    const auto r = cyclic_case_verify(an);
    EXPECT_TRUE(r.passed);

    FixA t(diag2(0.5, 0.5));
    const ConeContext tctx(t.M, t.xi0);
    auto tn = compute_alpha(right_action(2), tctx);
    split_homo_antihomo(tn);
    const auto rt = cyclic_case_verify(tn);
    EXPECT_TRUE(rt.passed) << rt.first_failure;
    EXPECT_TRUE(rt.tracial.passed);
    EXPECT_TRUE(rt.jnj_in_m.passed);
}

TEST(CyclicCase, MixedScenario)
{
    for (int s = 0; s < 10; ++s) {
        const auto mx = mixed_scenario(2 + s % 2, 90 + s);
        const ConeContext ctx(mx.M, mx.xi0);
        auto an = compute_alpha(mx.N, ctx);
        split_homo_antihomo(an, s);
        const auto r = cyclic_case_report(an);
        ASSERT_TRUE(r.cyclic_for_n);
        ASSERT_TRUE(r.passed) << s << " " << r.first_failure;
        ASSERT_LT(r.alpha_formula.residual, 1e-8);
    }
}

TEST(CyclicCase, NotCyclicPrecondition)
{
    const int n = 2;
    AlgebraSpec spec({{n, n}, {n, n}});
    CVector xi0 = StateVector(std::vector<CMatrix>{identity(2), identity(2)}).flat();
    xi0 /= xi0.norm();
    const ConcreteAlgebra m(spec);
    const ConcreteAlgebra nalg(AlgebraSpec({{n, 2 * n}}), mix_intertwiner(n));
    const ConeContext ctx(m, xi0);
    auto an = compute_alpha(nalg, ctx);
    split_homo_antihomo(an);
    try {
        cyclic_case_verify(an);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::PreconditionFailed);
    }
}

TEST(FinCoinc, Cases)
{
    FixA f;
    const auto b = f.M.subspace();
    const auto same = fin_coinc_check(b, b, f.xi0);
    EXPECT_TRUE(same.preconditions);
    EXPECT_EQ(same.dim_a, same.dim_b);

    const auto a = ConcreteAlgebra(AlgebraSpec({{1, 2}, {1, 2}})).subspace();
    const auto r = fin_coinc_check(a, b, f.xi0);
    EXPECT_TRUE(r.contained);
    EXPECT_FALSE(r.cyclic_a);
    EXPECT_TRUE(r.separating_a);
    EXPECT_FALSE(r.preconditions);
}
