#include <gtest/gtest.h>

#include "sharpcone/feasibility.hpp"
#include "fixtures.hpp"

using namespace sharpcone;
using namespace fixtures;

namespace {

OperatorSubspace full_matrices(int d)
{
    std::vector<CMatrix> ops;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            CMatrix e = CMatrix::Zero(d, d);
            e(i, j) = 1.0;
            ops.push_back(e);
        }
    return OperatorSubspace::span(d, ops);
}

// M_2 (+) C acting block-diagonally on C^3.
OperatorSubspace m2_plus_c()
{
    std::vector<CMatrix> ops;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CMatrix e = CMatrix::Zero(3, 3);
            e(i, j) = 1.0;
            ops.push_back(e);
        }
    CMatrix e = CMatrix::Zero(3, 3);
    e(2, 2) = 1.0;
    ops.push_back(e);
    return OperatorSubspace::span(3, ops);
}

double lambda_min_2x2(double p, Complex c, double t)
{
    const double h = 0.5 * (p - t);
    return 0.5 * (p + t) - std::sqrt(h * h + std::norm(c));
}

// sup over t of min(lambda_min([[z1, conj z2], [z2, t]]), z3) by scalar grid search
double slice_oracle(double z1, Complex z2, double z3)
{
    double best = -1e300;
    for (int i = 0; i <= 200000; ++i) {
        const double t = -50.0 + 1e-3 * i * (1.0 + i * 1e-4);
        best = std::max(best, std::min(lambda_min_2x2(z1, z2, t), z3));
    }
    return best;
}

} // namespace

TEST(ConeMemberGeneral, UnitalTrivialCase)
{
    const auto a = full_matrices(2);
    CVector xi(2);
    xi << 1.0, 0.0;
    const auto r = cone_member_general(a, xi, xi);
    EXPECT_TRUE(r.member);
}

TEST(ConeMemberGeneral, InfeasibleLinearSystem)
{
    // diagonal algebra on C^2 with xi = e1: a xi is always a multiple of e1
    std::vector<CMatrix> ops = {diag2(1, 0), diag2(0, 1)};
    const auto a = OperatorSubspace::span(2, ops);
    CVector xi(2), zeta(2);
    xi << 1.0, 0.0;
    zeta << 0.0, 1.0;
    const auto r = cone_member_general(a, xi, zeta);
    EXPECT_FALSE(r.member);
    EXPECT_EQ(r.certificate_kind, "residual");
    EXPECT_NEAR(r.residual, 1.0, 1e-12);
}

TEST(ConeMemberGeneral, SeparatingCaseIsExact)
{
    FixA f;
    const auto a = f.M.subspace();
    const auto r1 = cone_member_general(a, f.xi0, f.vec_of(diag2(1, 0.2)));
    EXPECT_TRUE(r1.member);
    EXPECT_EQ(r1.certificate_kind, "exact");
    const auto r2 = cone_member_general(a, f.xi0, f.vec_of(diag2(1, -0.2)));
    EXPECT_FALSE(r2.member);
}

TEST(ConeMemberGeneral, UnboundedSliceSupremum)
{
    // A = M_2 on C^2, xi = e1: Hermitian a with a e1 = (z1, z2) has a free
    // (2,2) entry t and sup_t lambda_min = z1.
    const auto a = full_matrices(2);
    CVector xi(2);
    xi << 1.0, 0.0;
    CVector zeta(2);
    zeta << 0.3, Complex(0.4, -0.2);
    auto r = cone_member_general(a, xi, zeta);
    EXPECT_TRUE(r.member);
    EXPECT_EQ(r.slice_dim, 1);
    zeta(0) = -0.3;
    r = cone_member_general(a, xi, zeta);
    EXPECT_FALSE(r.member);
    EXPECT_EQ(r.certificate_kind, "dual");
    EXPECT_NEAR(r.lambda_min, -0.3, 1e-3);
}

TEST(ConeMemberGeneral, OneDimensionalSliceMatchesScalarSearch)
{
    const auto a = m2_plus_c();
    CVector xi(3);
    xi << 1.0, 0.0, 1.0;
    Rng rng(77);
    int members = 0;
    int rejects = 0;
    for (int s = 0; s < 40; ++s) {
        const double z1 = 2.0 * rng.uniform() - 0.7;
        const Complex z2 = rng.complex_gaussian();
        const double z3 = 2.0 * rng.uniform() - 0.7;
        const double oracle = slice_oracle(z1, z2, z3);
        if (std::abs(oracle) < 1e-3 || (z1 > 0 && z1 < 0.05))
            continue; // too close to the boundary for the grid
        CVector zeta(3);
        zeta << z1, z2, z3;
        const auto r = cone_member_general(a, xi, zeta, {}, {3, 400, static_cast<std::uint64_t>(s)});
        ASSERT_EQ(r.member, oracle > 0) << s << " oracle " << oracle << " got " << r.lambda_min;
        (r.member ? members : rejects)++;
    }
    EXPECT_GT(members, 3);
    EXPECT_GT(rejects, 3);
}

TEST(ConeMemberGeneral, NonSeparatingRandomInstances)
{
    // blocks with n > m: xi is cyclic but not separating
    for (int s = 0; s < 30; ++s) {
        Rng rng(900 + s);
        AlgebraSpec spec({{2, 1}, {1 + s % 2, 1}});
        ConcreteAlgebra m(spec, rand_unitary(spec.hilbert_dim(), rng));
        const auto a = m.subspace();
        const CVector xi = rand_gaussian(spec.hilbert_dim(), 1, rng);
        std::vector<CMatrix> b;
        for (const auto& blk : spec.blocks()) {
            const CMatrix g = rand_gaussian(blk.n, blk.n, rng);
            b.push_back(g * g.adjoint());
        }
        const CVector zeta = m.embed(AlgebraElement(b)) * xi;
        const auto yes = cone_member_general(a, xi, zeta, {}, {3, 400, static_cast<std::uint64_t>(s)});
        ASSERT_TRUE(yes.member) << s;
        const auto no = cone_member_general(a, xi, CVector(-zeta), {}, {3, 400, static_cast<std::uint64_t>(s)});
        ASSERT_FALSE(no.member) << s;
    }
}
