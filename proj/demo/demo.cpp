// M_2 acting on 2x2 matrices with xi0 = diag(sqrt(2/3), sqrt(1/3)): modular
// spectrum, a few cone queries, and recovery of a projection from the order.

#include <cmath>
#include <cstdio>

#include "sharpcone/sharpcone.hpp"

using namespace sharpcone;

int main()
{
    const AlgebraSpec spec({{2, 2}});
    const ConcreteAlgebra m(spec);
    CVector xi0(4);
    xi0 << std::sqrt(2.0 / 3.0), 0, 0, std::sqrt(1.0 / 3.0);
    const ConeContext ctx(m, xi0);

    std::printf("Delta spectrum:");
    for (Eigen::Index i = 0; i < ctx.modular().delta_eig.values.size(); ++i)
        std::printf(" %.6f", ctx.modular().delta_eig.values(i));
    std::printf("\n");

    // zeta = x xi0 for a positive contraction x
    CMatrix x(2, 2);
    x << 0.5, 0.2, 0.2, 0.3;
    const CVector zeta = m.embed(AlgebraElement({x})) * xi0;
    const Classification c = classify(ctx, zeta);
    std::printf("zeta in cone: %s, contractive: %s, projective: %s\n", cone_member(ctx, zeta) ? "yes" : "no",
                c.contractive ? "yes" : "no", c.projective ? "yes" : "no");
    std::printf("sharp norm: spectral %.6f, by order %.6f\n", sharp_norm(ctx, zeta), sharp_norm_by_order(ctx, zeta));

    const CVector sq = square(ctx, zeta);
    std::printf("square vs x^2 xi0: %.2e\n", (sq - square_oracle(ctx, zeta)).norm());

    // left multiplication by e11 is recoverable from the order
    const AlgebraElement e = AlgebraElement::matrix_unit(spec, 0, 0, 0);
    const CMatrix p = m.embed(e);
    const ConditionReport cr = recover_conditions(ctx, p);
    std::printf("recovery conditions: %s\n", cr.all_passed ? "all hold" : cr.first_failure()->name.c_str());
    if (cr.all_passed) {
        const Recovered r = recover_projection(ctx, p, cr);
        std::printf("recovered e =\n");
        for (int i = 0; i < 2; ++i)
            std::printf("  %.3f %.3f\n", r.e.block(0)(i, 0).real(), r.e.block(0)(i, 1).real());
        std::printf("identity residual %.2e\n", r.identity_residual);
    }

    // the rank-one projection onto xi0 is not of that form
    const CMatrix r1 = xi0 * xi0.adjoint() / xi0.squaredNorm();
    const ConditionReport bad = recover_conditions(ctx, r1);
    std::printf("rank-one projection onto xi0: first failing condition \"%s\"\n",
                bad.first_failure() ? bad.first_failure()->name.c_str() : "none");
    return 0;
}
