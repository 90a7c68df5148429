#ifndef SHARPCONE_TESTS_FIXTURES_HPP
#define SHARPCONE_TESTS_FIXTURES_HPP

#include <cmath>

#include "sharpcone/kernel.hpp"
#include "sharpcone/algebra.hpp"

namespace fixtures {

using namespace sharpcone;

inline CMatrix diag2(Complex a, Complex b)
{
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

inline CMatrix unit2(int a, int b)
{
    CMatrix m = CMatrix::Zero(2, 2);
    m(a, b) = 1.0;
    return m;
}

/// Row-major flattening of a block.
inline CVector flat(const CMatrix& m)
{
    CVector v(m.size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            v(k++) = m(i, j);
    return v;
}

inline CMatrix unflat(const CVector& v, Eigen::Index rows, Eigen::Index cols)
{
    CMatrix m(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = v(k++);
    return m;
}

inline CMatrix sqrt_psd(const CMatrix& rho)
{
    const auto e = herm_eig(rho);
    return spectral_apply(e, [](double l) { return Complex(std::sqrt(std::max(l, 0.0)), 0); });
}

/// M_2 in standard form with xi0 = rho^{1/2}, rho = diag(2/3, 1/3) by default.
struct FixA {
    ConcreteAlgebra M{AlgebraSpec({{2, 2}})};
    CMatrix rho = diag2(2.0 / 3.0, 1.0 / 3.0);
    CVector xi0;

    FixA() { xi0 = flat(sqrt_psd(rho)); }
    explicit FixA(const CMatrix& r) : rho(r) { xi0 = flat(sqrt_psd(rho)); }

    AlgebraElement el(const CMatrix& x) const { return AlgebraElement({x}); }
    CVector vec_of(const CMatrix& x) const { return M.embed(el(x)) * xi0; }
};

/// Diagonal algebra C^2 on C^2 with xi0 = (1, 1)/sqrt(2).
struct FixB {
    ConcreteAlgebra M{AlgebraSpec({{1, 1}, {1, 1}})};
    CVector xi0 = CVector::Constant(2, Complex(1.0 / std::sqrt(2.0), 0));
};

/// M_2 (+) M_1 in standard form.
struct FixC {
    ConcreteAlgebra M{AlgebraSpec({{2, 2}, {1, 1}})};
    CVector xi0;

    FixC()
    {
        xi0 = CVector::Zero(5);
        xi0.head(4) = flat(sqrt_psd(diag2(0.5, 0.3)));
        xi0(4) = std::sqrt(0.2);
    }
};

} // namespace fixtures

#endif
