#include <gtest/gtest.h>

#include "sharpcone/cone.hpp"
#include "fixtures.hpp"

using namespace sharpcone;
using namespace fixtures;

namespace {

ConeContext fix_a_context()
{
    FixA a;
    return ConeContext(a.M, a.xi0);
}

CVector vec_of(const ConeContext& ctx, const CMatrix& x) { return ctx.operator_to_vector(AlgebraElement({x})); }

// Random scenario: standard-form blocks, invertible xi blocks, Haar intertwiner.
ConeContext random_context(Rng& rng)
{
    std::vector<Block> blocks;
    const int nb = rng.uniform_int(1, 3);
    for (int k = 0; k < nb; ++k) {
        const int n = rng.uniform_int(1, 3);
        blocks.push_back({n, n});
    }
    AlgebraSpec spec(blocks);
    std::vector<CMatrix> xs;
    for (const auto& b : blocks)
        xs.push_back(rand_gaussian(b.n, b.n, rng) + 1.5 * identity(b.n));
    CVector xi = StateVector(xs).flat();
    xi /= xi.norm();
    const CMatrix u = rand_unitary(spec.hilbert_dim(), rng);
    return ConeContext(ConcreteAlgebra(spec, u), u * xi);
}

AlgebraElement random_element(const AlgebraSpec& spec, Rng& rng, bool hermitian)
{
    std::vector<CMatrix> b;
    for (const auto& blk : spec.blocks())
        b.push_back(hermitian ? rand_hermitian(blk.n, rng) : rand_gaussian(blk.n, blk.n, rng));
    return AlgebraElement(b);
}

AlgebraElement random_positive(const AlgebraSpec& spec, Rng& rng)
{
    const AlgebraElement g = random_element(spec, rng, false);
    return g.adjoint() * g;
}

AlgebraElement random_projection(const AlgebraSpec& spec, Rng& rng)
{
    std::vector<CMatrix> b;
    for (const auto& blk : spec.blocks())
        b.push_back(rand_projection(blk.n, rng.uniform_int(0, blk.n), rng));
    return AlgebraElement(b);
}

} // namespace

TEST(VectorToOperator, Cases)
{
    const auto ctx = fix_a_context();
    EXPECT_LT((ctx.vector_to_operator(ctx.xi0()) - AlgebraElement::identity(ctx.algebra().spec())).frobenius(),
              1e-12);
    Rng rng(1);
    const CMatrix x = rand_gaussian(2, 2, rng);
    EXPECT_LT((ctx.vector_to_operator(vec_of(ctx, x)).block(0) - x).norm(), 1e-12);
    const CMatrix sigma = diag2(1, -1);
    EXPECT_LT((ctx.vector_to_operator(vec_of(ctx, sigma)).block(0) - sigma).norm(), 1e-12);
}

TEST(ConeMember, Cases)
{
    const auto ctx = fix_a_context();
    EXPECT_TRUE(cone_member(ctx, ctx.xi0()));
    EXPECT_FALSE(cone_member(ctx, CVector(-ctx.xi0())));
    EXPECT_FALSE(cone_member(ctx, vec_of(ctx, diag2(1, -0.01))));
    EXPECT_EQ(ctx.status(ctx.xi0()).status, ConeStatus::Member);
    EXPECT_EQ(ctx.status(vec_of(ctx, diag2(1, 0))).status, ConeStatus::Boundary);
    // non-Hermitian rep
    EXPECT_FALSE(cone_member(ctx, vec_of(ctx, unit2(0, 1) + identity(2))));
}

TEST(Leq, Cases)
{
    const auto ctx = fix_a_context();
    const CVector z = vec_of(ctx, diag2(0.3, 0.9));
    EXPECT_TRUE(leq(ctx, z, z));
    EXPECT_TRUE(leq(ctx, CVector::Zero(4), ctx.xi0()));
    EXPECT_FALSE(leq(ctx, ctx.xi0(), CVector::Zero(4)));
}

TEST(Classify, Cases)
{
    const auto ctx = fix_a_context();
    auto c = classify(ctx, ctx.xi0());
    EXPECT_TRUE(c.contractive);
    EXPECT_TRUE(c.projective);
    c = classify(ctx, CVector(0.5 * ctx.xi0()));
    EXPECT_TRUE(c.contractive);
    EXPECT_FALSE(c.projective);
    c = classify(ctx, vec_of(ctx, diag2(1, 0)));
    EXPECT_TRUE(c.projective);
    EXPECT_TRUE(c.consistent());
    try {
        classify(ctx, CVector(-ctx.xi0()));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotInCone);
    }
}

TEST(OpOrthogonal, Cases)
{
    const auto ctx = fix_a_context();
    const CVector zero = CVector::Zero(4);
    EXPECT_TRUE(op_orthogonal(ctx, ctx.xi0(), zero).orthogonal);
    EXPECT_FALSE(op_orthogonal(ctx, ctx.xi0(), ctx.xi0()).orthogonal);
    const auto v = op_orthogonal(ctx, vec_of(ctx, diag2(1, 0)), vec_of(ctx, diag2(0, 1)));
    EXPECT_TRUE(v.orthogonal);
    EXPECT_TRUE(v.order_test);
    EXPECT_TRUE(v.operator_test);
    try {
        op_orthogonal(ctx, CVector(0.5 * ctx.xi0()), zero);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotProjective);
    }
}

TEST(SupportVector, Cases)
{
    const auto ctx = fix_a_context();
    EXPECT_LT((support_vector(ctx, ctx.xi0()).vec - ctx.xi0()).norm(), 1e-12);
    EXPECT_LT(support_vector(ctx, CVector::Zero(4)).vec.norm(), 1e-15);
    const auto s = support_vector(ctx, vec_of(ctx, diag2(0.5, 0)));
    EXPECT_LT((s.rep.block(0) - diag2(1, 0)).norm(), 1e-12);
}

TEST(SupportVector, LeastDominatingProjective)
{
    Rng rng(31);
    for (int s = 0; s < 30; ++s) {
        const auto ctx = random_context(rng);
        const auto& spec = ctx.algebra().spec();
        // rank-deficient positive element
        std::vector<CMatrix> b;
        for (const auto& blk : spec.blocks()) {
            const CMatrix g = rand_gaussian(blk.n, std::max(1, blk.n - 1), rng);
            b.push_back(g * g.adjoint());
        }
        const CVector zeta = ctx.operator_to_vector(AlgebraElement(b));
        const auto sup = support_vector(ctx, zeta);
        ASSERT_TRUE(is_projective(ctx, sup.vec));
        // eta >= c zeta for small c
        const double c = 1.0 / (1.0 + 2.0 * ctx.vector_to_operator(zeta).norm()) * 1e-2;
        ASSERT_TRUE(leq(ctx, CVector(c * zeta), sup.vec));
        // any projective vector dominating a multiple of zeta dominates sup
        for (int t = 0; t < 5; ++t) {
            // join of sup with a random projection: projection onto range(sup) + range(p)
            const AlgebraElement p = random_projection(spec, rng);
            std::vector<CMatrix> joins;
            for (int k = 0; k < spec.num_blocks(); ++k) {
                CMatrix both(spec.block(k).n, 2 * spec.block(k).n);
                both << sup.rep.block(k), p.block(k);
                Eigen::JacobiSVD<CMatrix> svd(both, Eigen::ComputeFullU);
                int r = 0;
                for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
                    if (svd.singularValues()(i) > 1e-9)
                        ++r;
                const CMatrix u = svd.matrixU().leftCols(r);
                joins.push_back(u * u.adjoint());
            }
            const CVector dom = ctx.operator_to_vector(AlgebraElement(joins));
            ASSERT_TRUE(leq(ctx, CVector(c * zeta), dom));
            ASSERT_TRUE(leq(ctx, sup.vec, dom));
        }
    }
}

TEST(JordanDecompose, Cases)
{
    const auto ctx = fix_a_context();
    const CVector z = vec_of(ctx, diag2(0.4, 2.0));
    auto d = jordan_decompose(ctx, z);
    EXPECT_LT((d.positive.vec - z).norm(), 1e-12);
    EXPECT_LT(d.negative.vec.norm(), 1e-12);
    d = jordan_decompose(ctx, CVector(-z));
    EXPECT_LT((d.negative.vec - z).norm(), 1e-12);
    d = jordan_decompose(ctx, vec_of(ctx, diag2(1, -2)));
    EXPECT_LT((d.positive.rep.block(0) - diag2(1, 0)).norm(), 1e-12);
    EXPECT_LT((d.negative.rep.block(0) - diag2(0, 2)).norm(), 1e-12);
    try {
        jordan_decompose(ctx, vec_of(ctx, unit2(0, 1)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotHermitianRep);
    }
}

TEST(SharpNorm, Cases)
{
    const auto ctx = fix_a_context();
    EXPECT_NEAR(sharp_norm(ctx, ctx.xi0()), 1.0, 1e-12);
    EXPECT_NEAR(sharp_norm(ctx, CVector(2.0 * ctx.xi0())), 2.0, 1e-12);
    EXPECT_NEAR(sharp_norm(ctx, vec_of(ctx, diag2(1, -3))), 3.0, 1e-12);
    EXPECT_NEAR(sharp_norm_by_order_k(ctx, vec_of(ctx, diag2(1, -3))), 3.0, 3e-6);
    EXPECT_NEAR(sharp_norm_by_order(ctx, ctx.xi0()), 1.0, 1e-6);
}

TEST(Square, Cases)
{
    const auto ctx = fix_a_context();
    EXPECT_LT((square(ctx, ctx.xi0()) - ctx.xi0()).norm(), 1e-12);
    const CVector p = vec_of(ctx, diag2(1, 0));
    EXPECT_LT((square(ctx, CVector(3.0 * p)) - 9.0 * p).norm(), 1e-11);
    const CVector sx = square(ctx, vec_of(ctx, unit2(0, 1) + unit2(1, 0)));
    EXPECT_LT((sx - ctx.xi0()).norm(), 1e-12);
}

TEST(JordanProduct, Cases)
{
    const auto ctx = fix_a_context();
    Rng rng(4);
    const CVector z = vec_of(ctx, rand_gaussian(2, 2, rng));
    EXPECT_LT((jordan_product(ctx, ctx.xi0(), z) - 2.0 * z).norm(), 1e-10);
    EXPECT_LT((triple_product(ctx, ctx.xi0(), z) - z).norm(), 1e-10);
    const CMatrix y = unit2(0, 0);
    const CMatrix x = unit2(0, 1) + unit2(1, 0);
    const CVector jp = jordan_product(ctx, vec_of(ctx, y), vec_of(ctx, x));
    EXPECT_LT((jp - vec_of(ctx, y * x + x * y)).norm(), 1e-12);
    EXPECT_LT((jp - vec_of(ctx, x)).norm(), 1e-12);
}

TEST(CornerOffdiag, Cases)
{
    const auto ctx = fix_a_context();
    Rng rng(6);
    const CVector eta = vec_of(ctx, rand_gaussian(2, 2, rng));
    EXPECT_LT((corner(ctx, ctx.xi0(), eta) - eta).norm(), 1e-10);
    EXPECT_LT(offdiag(ctx, ctx.xi0(), eta).norm(), 1e-10);
    const CVector zero = CVector::Zero(4);
    EXPECT_LT(corner(ctx, zero, eta).norm(), 1e-10);
    EXPECT_LT(offdiag(ctx, zero, eta).norm(), 1e-10);
    const CVector e = vec_of(ctx, diag2(1, 0));
    const CVector y = vec_of(ctx, unit2(0, 1));
    EXPECT_LT(corner(ctx, e, y).norm(), 1e-12);
    EXPECT_LT((offdiag(ctx, e, y) - y).norm(), 1e-12);
    EXPECT_THROW(corner(ctx, CVector(0.5 * ctx.xi0()), y), Error);
}

TEST(ConeProperties, PointedAndConvex)
{
    Rng rng(100);
    for (int s = 0; s < 100; ++s) {
        const auto ctx = random_context(rng);
        const auto& spec = ctx.algebra().spec();
        const CVector z = ctx.operator_to_vector(random_positive(spec, rng));
        const CVector w = ctx.operator_to_vector(random_positive(spec, rng));
        ASSERT_TRUE(cone_member(ctx, z));
        ASSERT_FALSE(cone_member(ctx, CVector(-z))) << s;
        ASSERT_TRUE(cone_member(ctx, CVector(z + w)));
        ASSERT_TRUE(cone_member(ctx, CVector(3.7 * z)));
    }
}

TEST(ConeProperties, ContractiveAndProjective)
{
    Rng rng(200);
    for (int s = 0; s < 200; ++s) {
        const auto ctx = random_context(rng);
        const auto& spec = ctx.algebra().spec();
        AlgebraElement x;
        switch (s % 3) {
        case 0: x = random_projection(spec, rng); break;
        case 1: {
            const AlgebraElement p = random_positive(spec, rng);
            x = (1.0 / (p.norm() + 0.1)) * p; // strict contraction
            break;
        }
        default: x = (1.0 + rng.uniform()) * random_projection(spec, rng) + random_positive(spec, rng); break;
        }
        const CVector z = ctx.operator_to_vector(x);
        if (!cone_member(ctx, z))
            continue;
        const auto c = classify(ctx, z);
        ASSERT_TRUE(c.consistent()) << s;
        if (c.contractive)
            ASSERT_LE(ConeContext::lambda_max(ctx.vector_to_operator(z)), 1.0 + 1e-8);
        if (s % 3 == 0)
            ASSERT_TRUE(c.projective) << s;
        if (s % 3 == 1 && x.norm() > 1e-6)
            ASSERT_FALSE(c.projective && (x * x - x).frobenius() > 1e-6) << s;
    }
}

TEST(ConeProperties, JordanDecompositionOrthogonalSupports)
{
    Rng rng(300);
    for (int s = 0; s < 100; ++s) {
        const auto ctx = random_context(rng);
        const CVector z = ctx.operator_to_vector(random_element(ctx.algebra().spec(), rng, true));
        const auto d = jordan_decompose(ctx, z);
        ASSERT_LT((d.positive.vec - d.negative.vec - z).norm(), 1e-10 * std::max(1.0, z.norm()));
        ASSERT_TRUE(cone_member(ctx, d.positive.vec));
        ASSERT_TRUE(cone_member(ctx, d.negative.vec));
        const auto sp = support_vector(ctx, d.positive.vec);
        const auto sn = support_vector(ctx, d.negative.vec);
        ASSERT_TRUE(op_orthogonal(ctx, sp.vec, sn.vec).orthogonal) << s;
    }
}

TEST(ConeProperties, SharpNormBisection)
{
    Rng rng(400);
    for (int s = 0; s < 100; ++s) {
        const auto ctx = random_context(rng);
        const auto& spec = ctx.algebra().spec();
        const double scale = std::exp(4.0 * (rng.uniform() - 0.5));
        const CVector z = ctx.operator_to_vector(scale * random_positive(spec, rng));
        const double exact = sharp_norm(ctx, z);
        ASSERT_NEAR(sharp_norm_by_order(ctx, z), exact, 1e-6 * exact) << s;
        const CVector k = ctx.operator_to_vector(random_element(spec, rng, true));
        const double ek = sharp_norm(ctx, k);
        ASSERT_NEAR(sharp_norm_by_order_k(ctx, k), ek, 1e-6 * ek) << s;
    }
}

TEST(ConeProperties, SquareMatchesOracle)
{
    Rng rng(500);
    for (int s = 0; s < 200; ++s) {
        const auto ctx = random_context(rng);
        const CVector z = ctx.operator_to_vector(random_element(ctx.algebra().spec(), rng, false));
        const CVector a = square(ctx, z);
        const CVector b = square_oracle(ctx, z);
        ASSERT_LE((a - b).norm(), 1e-8 * std::max(1.0, b.norm())) << s;
    }
}

TEST(ConeProperties, CornerMatchesOracle)
{
    Rng rng(600);
    for (int s = 0; s < 100; ++s) {
        const auto ctx = random_context(rng);
        const auto& spec = ctx.algebra().spec();
        const CVector e = ctx.operator_to_vector(random_projection(spec, rng));
        const CVector y = ctx.operator_to_vector(random_element(spec, rng, false));
        const CVector c1 = corner(ctx, e, y);
        const CVector c2 = corner_oracle(ctx, e, y);
        ASSERT_LE((c1 - c2).norm(), 1e-8 * std::max(1.0, y.norm())) << s;
        const CVector o1 = offdiag(ctx, e, y);
        const CVector o2 = offdiag_oracle(ctx, e, y);
        ASSERT_LE((o1 - o2).norm(), 1e-8 * std::max(1.0, y.norm())) << s;
    }
}
