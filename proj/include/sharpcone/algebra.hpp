#ifndef SHARPCONE_ALGEBRA_HPP
#define SHARPCONE_ALGEBRA_HPP

//
// Finite-dimensional von Neumann algebras.
//
// An AlgebraSpec lists blocks (n_k, m_k). The standard Hilbert space is the
// direct sum of n_k x m_k complex matrices, flattened row-major block after
// block. The algebra acts by left multiplication V_k -> x_k V_k, which is
// kron(x_k, I_{m_k}) in the flattened coordinates; its commutant acts by
// right multiplication. A ConcreteAlgebra adds a unitary intertwiner U, so
// the algebra on H is U (sum_k x_k (x) I_{m_k}) U^*.
//

#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "kernel.hpp"

namespace sharpcone {

struct Block {
    int n = 1; // matrix size
    int m = 1; // multiplicity

    friend bool operator==(const Block&, const Block&) = default;
};

class AlgebraSpec {
public:
    static constexpr int default_dim_cap = 32;

    AlgebraSpec() = default;
    explicit AlgebraSpec(std::vector<Block> blocks, int dim_cap = default_dim_cap)
        : blocks_(std::move(blocks))
    {
        if (blocks_.empty())
            throw Error(ErrorKind::InvalidInput, "algebra needs at least one block");
        for (const auto& b : blocks_)
            if (b.n < 1 || b.m < 1)
                throw Error(ErrorKind::InvalidInput, "block sizes and multiplicities must be >= 1");
        if (hilbert_dim() > dim_cap)
            throw Error(ErrorKind::InvalidInput,
                        "Hilbert space dimension " + std::to_string(hilbert_dim()) + " exceeds cap "
                            + std::to_string(dim_cap));
    }

    const std::vector<Block>& blocks() const { return blocks_; }
    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    const Block& block(int k) const { return blocks_.at(k); }

    int hilbert_dim() const
    {
        int d = 0;
        for (const auto& b : blocks_)
            d += b.n * b.m;
        return d;
    }

    int algebra_dim() const
    {
        int d = 0;
        for (const auto& b : blocks_)
            d += b.n * b.n;
        return d;
    }

    /// Offset of block k inside the flattened Hilbert space.
    int hilbert_offset(int k) const
    {
        int off = 0;
        for (int i = 0; i < k; ++i)
            off += blocks_[i].n * blocks_[i].m;
        return off;
    }

    /// Offset of block k inside the matrix-unit coordinates of the algebra.
    int algebra_offset(int k) const
    {
        int off = 0;
        for (int i = 0; i < k; ++i)
            off += blocks_[i].n * blocks_[i].n;
        return off;
    }

    friend bool operator==(const AlgebraSpec&, const AlgebraSpec&) = default;

private:
    std::vector<Block> blocks_;
};

// ---------------------------------------------------------------------------
// AlgebraElement
// ---------------------------------------------------------------------------

class AlgebraElement {
public:
    AlgebraElement() = default;
    explicit AlgebraElement(std::vector<CMatrix> blocks) : blocks_(std::move(blocks)) {}

    static AlgebraElement zero(const AlgebraSpec& spec)
    {
        std::vector<CMatrix> b;
        for (const auto& blk : spec.blocks())
            b.push_back(CMatrix::Zero(blk.n, blk.n));
        return AlgebraElement(std::move(b));
    }

    static AlgebraElement identity(const AlgebraSpec& spec)
    {
        std::vector<CMatrix> b;
        for (const auto& blk : spec.blocks())
            b.push_back(sharpcone::identity(blk.n));
        return AlgebraElement(std::move(b));
    }

    static AlgebraElement matrix_unit(const AlgebraSpec& spec, int k, int a, int b)
    {
        auto e = zero(spec);
        e.blocks_.at(k)(a, b) = 1.0;
        return e;
    }

    /// Identity on the listed blocks, zero elsewhere.
    static AlgebraElement block_indicator(const AlgebraSpec& spec, const std::vector<int>& which)
    {
        auto e = zero(spec);
        for (int k : which)
            e.blocks_.at(k) = sharpcone::identity(spec.block(k).n);
        return e;
    }

    /// Matrix-unit coordinates, block by block, row-major inside a block.
    static AlgebraElement from_coordinates(const AlgebraSpec& spec, const CVector& c)
    {
        auto e = zero(spec);
        int idx = 0;
        for (int k = 0; k < spec.num_blocks(); ++k) {
            const int n = spec.block(k).n;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    e.blocks_[k](a, b) = c(idx++);
        }
        return e;
    }

    CVector coordinates() const
    {
        int total = 0;
        for (const auto& b : blocks_)
            total += static_cast<int>(b.size());
        CVector c(total);
        int idx = 0;
        for (const auto& b : blocks_)
            for (Eigen::Index a = 0; a < b.rows(); ++a)
                for (Eigen::Index j = 0; j < b.cols(); ++j)
                    c(idx++) = b(a, j);
        return c;
    }

    const std::vector<CMatrix>& blocks() const { return blocks_; }
    std::vector<CMatrix>& blocks() { return blocks_; }
    const CMatrix& block(int k) const { return blocks_.at(k); }
    int num_blocks() const { return static_cast<int>(blocks_.size()); }

    bool matches(const AlgebraSpec& spec) const
    {
        if (num_blocks() != spec.num_blocks())
            return false;
        for (int k = 0; k < num_blocks(); ++k)
            if (blocks_[k].rows() != spec.block(k).n || blocks_[k].cols() != spec.block(k).n)
                return false;
        return true;
    }

    AlgebraElement adjoint() const
    {
        std::vector<CMatrix> b;
        for (const auto& x : blocks_)
            b.push_back(x.adjoint());
        return AlgebraElement(std::move(b));
    }

    /// Largest block operator norm.
    double norm() const
    {
        double n = 0;
        for (const auto& x : blocks_)
            n = std::max(n, op_norm(x));
        return n;
    }

    double frobenius() const
    {
        double s = 0;
        for (const auto& x : blocks_)
            s += x.squaredNorm();
        return std::sqrt(s);
    }

    double hermitian_residual() const
    {
        double s = 0;
        for (const auto& x : blocks_)
            s += (x - x.adjoint()).squaredNorm();
        return std::sqrt(s);
    }

    AlgebraElement& operator+=(const AlgebraElement& o)
    {
        check_same(o);
        for (std::size_t k = 0; k < blocks_.size(); ++k)
            blocks_[k] += o.blocks_[k];
        return *this;
    }
    AlgebraElement& operator-=(const AlgebraElement& o)
    {
        check_same(o);
        for (std::size_t k = 0; k < blocks_.size(); ++k)
            blocks_[k] -= o.blocks_[k];
        return *this;
    }
    AlgebraElement& operator*=(Complex s)
    {
        for (auto& b : blocks_)
            b *= s;
        return *this;
    }

    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
    friend AlgebraElement operator*(Complex s, AlgebraElement a) { return a *= s; }
    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b)
    {
        a.check_same(b);
        std::vector<CMatrix> out;
        for (std::size_t k = 0; k < a.blocks_.size(); ++k)
            out.push_back(a.blocks_[k] * b.blocks_[k]);
        return AlgebraElement(std::move(out));
    }

private:
    void check_same(const AlgebraElement& o) const
    {
        if (o.blocks_.size() != blocks_.size())
            throw Error(ErrorKind::ShapeMismatch, "algebra elements from different algebras");
        for (std::size_t k = 0; k < blocks_.size(); ++k)
            if (o.blocks_[k].rows() != blocks_[k].rows())
                throw Error(ErrorKind::ShapeMismatch, "algebra element block sizes differ");
    }

    std::vector<CMatrix> blocks_;
};

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

/// A vector of the standard Hilbert space, one n_k x m_k matrix per block.
class StateVector {
public:
    StateVector() = default;
    explicit StateVector(std::vector<CMatrix> blocks) : blocks_(std::move(blocks)) {}

    static StateVector from_flat(const AlgebraSpec& spec, const CVector& v)
    {
        if (v.size() != spec.hilbert_dim())
            throw Error(ErrorKind::ShapeMismatch, "vector length does not match the algebra");
        std::vector<CMatrix> blocks;
        int idx = 0;
        for (const auto& b : spec.blocks()) {
            CMatrix m(b.n, b.m);
            for (int i = 0; i < b.n; ++i)
                for (int j = 0; j < b.m; ++j)
                    m(i, j) = v(idx++);
            blocks.push_back(std::move(m));
        }
        return StateVector(std::move(blocks));
    }

    CVector flat() const
    {
        Eigen::Index total = 0;
        for (const auto& b : blocks_)
            total += b.size();
        CVector v(total);
        Eigen::Index idx = 0;
        for (const auto& b : blocks_)
            for (Eigen::Index i = 0; i < b.rows(); ++i)
                for (Eigen::Index j = 0; j < b.cols(); ++j)
                    v(idx++) = b(i, j);
        return v;
    }

    bool matches(const AlgebraSpec& spec) const
    {
        if (static_cast<int>(blocks_.size()) != spec.num_blocks())
            return false;
        for (int k = 0; k < spec.num_blocks(); ++k)
            if (blocks_[k].rows() != spec.block(k).n || blocks_[k].cols() != spec.block(k).m)
                return false;
        for (const auto& b : blocks_)
            if (!b.allFinite())
                return false;
        return true;
    }

    const std::vector<CMatrix>& blocks() const { return blocks_; }
    const CMatrix& block(int k) const { return blocks_.at(k); }

private:
    std::vector<CMatrix> blocks_;
};

// ---------------------------------------------------------------------------
// OperatorSubspace
// ---------------------------------------------------------------------------

inline Eigen::Map<const CVector> vec(const CMatrix& m) { return {m.data(), m.size()}; }

inline CMatrix unvec(const CVector& v, Eigen::Index dim)
{
    return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

struct Membership {
    bool member = false;
    double residual = 0.0;
};

/// A linear subspace of B(C^d), stored as a Frobenius-orthonormal basis.
class OperatorSubspace {
public:
    OperatorSubspace() = default;

    /// Orthonormal basis of span(ops) by column-pivoted Householder QR on the
    /// normalized ops; directions whose pivot falls below drop_rel are
    /// dropped. Pivoting keeps near-dependent ops from being normalized
    /// before the well-separated ones, which would amplify rounding.
    static OperatorSubspace span(Eigen::Index ambient_dim, const std::vector<CMatrix>& ops,
                                 double drop_rel = 1e-8)
    {
        OperatorSubspace s;
        s.ambient_ = ambient_dim;
        const Eigen::Index n2 = ambient_dim * ambient_dim;
        // operators negligible against the largest one are rounding noise
        double scale = 0.0;
        for (const auto& op : ops) {
            if (op.rows() != ambient_dim || op.cols() != ambient_dim)
                throw Error(ErrorKind::ShapeMismatch, "operator does not act on the ambient space");
            scale = std::max(scale, op.norm());
        }
        std::vector<const CMatrix*> keep;
        for (const auto& op : ops)
            if (op.norm() > drop_rel * scale)
                keep.push_back(&op);
        if (keep.empty()) {
            s.q_ = CMatrix(n2, 0);
            s.rebuild_matrices();
            return s;
        }
        CMatrix a(n2, static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j)
            a.col(static_cast<Eigen::Index>(j)) = vec(*keep[j]) / keep[j]->norm();
        Eigen::ColPivHouseholderQR<CMatrix> qr(a);
        qr.setThreshold(drop_rel);
        const Eigen::Index r = qr.rank();
        s.q_ = qr.householderQ() * CMatrix::Identity(n2, r);
        s.rebuild_matrices();
        return s;
    }

    /// Columns of q must already be orthonormal vectorized matrices.
    static OperatorSubspace from_orthonormal(Eigen::Index ambient_dim, CMatrix q)
    {
        OperatorSubspace s;
        s.ambient_ = ambient_dim;
        s.q_ = std::move(q);
        s.rebuild_matrices();
        return s;
    }

    Eigen::Index ambient_dim() const { return ambient_; }
    int dim() const { return static_cast<int>(q_.cols()); }
    const std::vector<CMatrix>& basis() const { return basis_; }
    const CMatrix& coordinates_matrix() const { return q_; }

    bool is_algebra() const { return is_algebra_; }
    bool is_selfadjoint() const { return is_selfadjoint_; }
    OperatorSubspace& mark_algebra(bool selfadjoint)
    {
        is_algebra_ = true;
        is_selfadjoint_ = selfadjoint;
        return *this;
    }

    CMatrix project(const CMatrix& t) const
    {
        if (dim() == 0)
            return CMatrix::Zero(ambient_, ambient_);
        const CVector c = q_.adjoint() * vec(t);
        return unvec(q_ * c, ambient_);
    }

    Membership member(const CMatrix& t, double eq_rel) const
    {
        if (t.rows() != ambient_ || t.cols() != ambient_)
            throw Error(ErrorKind::ShapeMismatch, "operator does not act on the ambient space");
        const double res = (t - project(t)).norm();
        return {res <= eq_rel * t.norm(), res};
    }

    /// Closure under products and adjoints of the basis, checked numerically.
    bool verify_algebra(double eq_rel, bool* selfadjoint = nullptr) const
    {
        bool sa = true;
        for (const auto& b : basis_)
            if (!member(b.adjoint(), eq_rel).member) {
                sa = false;
                break;
            }
        if (selfadjoint)
            *selfadjoint = sa;
        for (const auto& x : basis_)
            for (const auto& y : basis_) {
                const CMatrix p = x * y;
                if ((p - project(p)).norm() > eq_rel * std::max(1.0, p.norm()))
                    return false;
            }
        return true;
    }

    /// Equal dimension plus mutual membership of bases.
    bool same_as(const OperatorSubspace& other, double eq_rel) const
    {
        if (dim() != other.dim() || ambient_ != other.ambient_)
            return false;
        for (const auto& b : basis_)
            if (!other.member(b, eq_rel).member)
                return false;
        for (const auto& b : other.basis_)
            if (!member(b, eq_rel).member)
                return false;
        return true;
    }

    /// Largest distance of a basis element of this space from other.
    double containment_residual(const OperatorSubspace& other) const
    {
        double r = 0;
        for (const auto& b : basis_)
            r = std::max(r, other.member(b, 1.0).residual);
        return r;
    }

private:
    void rebuild_matrices()
    {
        basis_.clear();
        for (Eigen::Index j = 0; j < q_.cols(); ++j)
            basis_.push_back(unvec(q_.col(j), ambient_));
    }

    Eigen::Index ambient_ = 0;
    CMatrix q_;
    std::vector<CMatrix> basis_;
    bool is_algebra_ = false;
    bool is_selfadjoint_ = false;
};

inline Membership is_member(const CMatrix& t, const OperatorSubspace& s, const TolerancePolicy& tol = {})
{
    return s.member(t, tol.eq_rel);
}

// ---------------------------------------------------------------------------
// ConcreteAlgebra
// ---------------------------------------------------------------------------

/// An AlgebraSpec realized on a Hilbert space through a unitary intertwiner.
class ConcreteAlgebra {
public:
    ConcreteAlgebra() = default;
    explicit ConcreteAlgebra(AlgebraSpec spec)
        : ConcreteAlgebra(spec, sharpcone::identity(spec.hilbert_dim()))
    {
    }

    ConcreteAlgebra(AlgebraSpec spec, CMatrix intertwiner, const TolerancePolicy& tol = {})
        : spec_(std::move(spec))
        , u_(std::move(intertwiner))
    {
        const int d = spec_.hilbert_dim();
        if (u_.rows() != d || u_.cols() != d)
            throw Error(ErrorKind::ShapeMismatch, "intertwiner has the wrong size");
        if ((u_.adjoint() * u_ - sharpcone::identity(d)).norm() > tol.eq_rel * std::sqrt(double(d)))
            throw Error(ErrorKind::InvalidInput, "intertwiner is not unitary");
        trivial_u_ = (u_ - sharpcone::identity(d)).norm() == 0.0;
        build_basis();
    }

    const AlgebraSpec& spec() const { return spec_; }
    const CMatrix& intertwiner() const { return u_; }
    int hilbert_dim() const { return spec_.hilbert_dim(); }
    int dim() const { return spec_.algebra_dim(); }

    /// Block element x acting as x_k (x) 1_{m_k}.
    CMatrix embed(const AlgebraElement& x) const
    {
        if (!x.matches(spec_))
            throw Error(ErrorKind::ShapeMismatch, "element does not belong to this algebra");
        const int d = hilbert_dim();
        CMatrix out = CMatrix::Zero(d, d);
        for (int k = 0; k < spec_.num_blocks(); ++k) {
            const auto& b = spec_.block(k);
            const int off = spec_.hilbert_offset(k);
            out.block(off, off, b.n * b.m, b.n * b.m) = kron(x.block(k), sharpcone::identity(b.m));
        }
        if (trivial_u_)
            return out;
        return u_ * out * u_.adjoint();
    }

    /// Left inverse of embed: averages over the multiplicity index. Exact for
    /// operators in the image of embed.
    AlgebraElement extract(const CMatrix& t) const
    {
        const CMatrix d = trivial_u_ ? t : CMatrix(u_.adjoint() * t * u_);
        std::vector<CMatrix> blocks;
        for (int k = 0; k < spec_.num_blocks(); ++k) {
            const auto& b = spec_.block(k);
            const int off = spec_.hilbert_offset(k);
            CMatrix x = CMatrix::Zero(b.n, b.n);
            for (int a = 0; a < b.n; ++a)
                for (int c = 0; c < b.n; ++c) {
                    Complex s = 0;
                    for (int j = 0; j < b.m; ++j)
                        s += d(off + a * b.m + j, off + c * b.m + j);
                    x(a, c) = s / double(b.m);
                }
            blocks.push_back(std::move(x));
        }
        return AlgebraElement(std::move(blocks));
    }

    /// Matrix units in coordinate order.
    const std::vector<AlgebraElement>& basis() const { return basis_; }
    const std::vector<CMatrix>& embedded_basis() const { return embedded_basis_; }

    OperatorSubspace subspace() const
    {
        return OperatorSubspace::span(hilbert_dim(), embedded_basis_).mark_algebra(true);
    }

    /// Per-block view of a vector of H in the algebra's standard coordinates.
    StateVector to_blocks(const CVector& v) const
    {
        return StateVector::from_flat(spec_, trivial_u_ ? v : CVector(u_.adjoint() * v));
    }

    CVector from_blocks(const StateVector& s) const
    {
        if (!s.matches(spec_))
            throw Error(ErrorKind::ShapeMismatch, "state vector does not match the algebra");
        const CVector v = s.flat();
        return trivial_u_ ? v : CVector(u_ * v);
    }

    /// Right multiplications V_k -> V_k y_k, which span the commutant.
    OperatorSubspace commutant_subspace() const
    {
        const int d = hilbert_dim();
        std::vector<CMatrix> ops;
        for (int k = 0; k < spec_.num_blocks(); ++k) {
            const auto& b = spec_.block(k);
            const int off = spec_.hilbert_offset(k);
            for (int c = 0; c < b.m; ++c)
                for (int e = 0; e < b.m; ++e) {
                    CMatrix y = CMatrix::Zero(b.m, b.m);
                    y(c, e) = 1.0;
                    CMatrix op = CMatrix::Zero(d, d);
                    op.block(off, off, b.n * b.m, b.n * b.m) = kron(sharpcone::identity(b.n), y.transpose());
                    ops.push_back(trivial_u_ ? op : CMatrix(u_ * op * u_.adjoint()));
                }
        }
        return OperatorSubspace::span(d, ops).mark_algebra(true);
    }

    std::vector<AlgebraElement> minimal_central_projections() const
    {
        std::vector<AlgebraElement> out;
        for (int k = 0; k < spec_.num_blocks(); ++k)
            out.push_back(AlgebraElement::block_indicator(spec_, {k}));
        return out;
    }

    /// Range of coordinate indices belonging to block k.
    std::pair<int, int> block_coordinate_range(int k) const
    {
        const int off = spec_.algebra_offset(k);
        return {off, off + spec_.block(k).n * spec_.block(k).n};
    }

private:
    void build_basis()
    {
        basis_.clear();
        embedded_basis_.clear();
        for (int k = 0; k < spec_.num_blocks(); ++k) {
            const int n = spec_.block(k).n;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    basis_.push_back(AlgebraElement::matrix_unit(spec_, k, a, b));
                    embedded_basis_.push_back(embed(basis_.back()));
                }
        }
    }

    AlgebraSpec spec_;
    CMatrix u_;
    bool trivial_u_ = true;
    std::vector<AlgebraElement> basis_;
    std::vector<CMatrix> embedded_basis_;
};

inline CMatrix embed(const ConcreteAlgebra& a, const AlgebraElement& x) { return a.embed(x); }

// ---------------------------------------------------------------------------
// commutants, centers, central projections
// ---------------------------------------------------------------------------

namespace detail {

/// Orthonormal basis of span(ops + adjoints of ops).
inline std::vector<CMatrix> selfadjoint_generators(const std::vector<CMatrix>& ops, Eigen::Index dim)
{
    std::vector<CMatrix> all;
    all.reserve(2 * ops.size());
    for (const auto& op : ops) {
        all.push_back(op);
        all.push_back(op.adjoint());
    }
    return OperatorSubspace::span(dim, all).basis();
}

/// Orthonormal basis of {v : ||w v|| <= thr} spanned by right singular
/// vectors. Wide problems first narrow the candidates with the Gram matrix
/// (accurate to about sqrt(eps) of the largest singular value), then refine
/// with a Jacobi SVD on the candidate subspace. Eigen's BDCSVD is avoided:
/// it asserts on some exactly structured complex inputs.
inline CMatrix null_space(const CMatrix& w, double thr)
{
    const Eigen::Index k = w.cols();
    CMatrix cand;
    if (k <= 64) {
        cand = CMatrix::Identity(k, k);
    } else {
        const CMatrix g = w.adjoint() * w;
        Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (g + g.adjoint()));
        const RVector& lam = es.eigenvalues();
        const double smax = std::sqrt(std::max(lam(k - 1), 0.0));
        const double coarse = std::max(1e-4 * smax, 100.0 * thr);
        Eigen::Index c = 0;
        while (c < k && std::sqrt(std::max(lam(c), 0.0)) <= coarse)
            ++c;
        cand = es.eigenvectors().leftCols(c);
    }
    if (cand.cols() == 0)
        return CMatrix(k, 0);
    Eigen::JacobiSVD<CMatrix> svd(w * cand, Eigen::ComputeFullV);
    const RVector& sv = svd.singularValues();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < cand.cols(); ++j)
        if (j >= sv.size() || sv(j) <= thr)
            keep.push_back(j);
    CMatrix out(k, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        out.col(static_cast<Eigen::Index>(j)) = cand * svd.matrixV().col(keep[j]);
    return out;
}

/// Anything commuting with ops commutes with a Hermitian h in their span,
/// hence is block diagonal over the eigenspaces of h. Returns the
/// orthonormal vectorized basis of that block-diagonal space; eigenvalue
/// clusters only ever merge, so the result always contains the commutant.
inline CMatrix eigenspace_start(const std::vector<CMatrix>& ops, Eigen::Index dim, const TolerancePolicy& tol)
{
    Rng rng(0x94D049BB133111EBULL);
    CMatrix h = CMatrix::Zero(dim, dim);
    for (const auto& b : ops)
        h += rng.gaussian() * (b + b.adjoint()) + rng.gaussian() * Complex(0, 1) * (b - b.adjoint());
    h = 0.5 * (h + h.adjoint()).eval();
    if (h.norm() == 0.0)
        return CMatrix::Identity(dim * dim, dim * dim);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const auto clusters = cluster_eigenvalues(es.eigenvalues(), tol.cluster_abs);
    Eigen::Index total = 0;
    for (const auto& [b, e] : clusters)
        total += (e - b) * (e - b);
    CMatrix out(dim * dim, total);
    Eigen::Index col = 0;
    for (const auto& [b, e] : clusters)
        for (Eigen::Index i = b; i < e; ++i)
            for (Eigen::Index j = b; j < e; ++j) {
                const CMatrix u = es.eigenvectors().col(i) * es.eigenvectors().col(j).adjoint();
                out.col(col++) = vec(u);
            }
    return out;
}

} // namespace detail

/// {T in span(start) : T x = x T for every x in ops}. start must have
/// orthonormal columns (vectorized matrices).
inline OperatorSubspace commutant_within(const std::vector<CMatrix>& ops, CMatrix start, Eigen::Index dim,
                                         const TolerancePolicy& tol = {})
{
    CMatrix z = std::move(start);
    for (const auto& b : detail::selfadjoint_generators(ops, dim)) {
        if (z.cols() == 0)
            break;
        CMatrix w(dim * dim, z.cols());
        for (Eigen::Index l = 0; l < z.cols(); ++l) {
            const CMatrix zl = unvec(z.col(l), dim);
            const CMatrix c = b * zl - zl * b;
            w.col(l) = vec(c);
        }
        const double thr = tol.eq_rel * std::max(1.0, 2.0 * b.norm());
        const CMatrix vn = detail::null_space(w, thr);
        z = (z * vn).eval();
    }
    // re-orthonormalize to clean accumulated rounding
    std::vector<CMatrix> mats;
    for (Eigen::Index j = 0; j < z.cols(); ++j)
        mats.push_back(unvec(z.col(j), dim));
    return OperatorSubspace::span(dim, mats);
}

/// Commutant of a set of operators on C^d; adjoints are adjoined automatically.
inline OperatorSubspace commutant(const std::vector<CMatrix>& ops, const TolerancePolicy& tol = {})
{
    if (ops.empty())
        throw Error(ErrorKind::InvalidInput, "commutant of an empty set");
    const Eigen::Index d = ops.front().rows();
    for (const auto& op : ops)
        if (op.rows() != d || op.cols() != d)
            throw Error(ErrorKind::ShapeMismatch, "commutant: operators of different sizes");
    auto out = commutant_within(ops, detail::eigenspace_start(ops, d, tol), d, tol);
    out.mark_algebra(true);
    return out;
}

inline OperatorSubspace double_commutant(const std::vector<CMatrix>& ops, const TolerancePolicy& tol = {})
{
    auto first = commutant(ops, tol);
    auto out = commutant(first.basis(), tol);
    out.mark_algebra(true);
    return out;
}

inline OperatorSubspace commutant(const OperatorSubspace& s, const TolerancePolicy& tol = {})
{
    if (s.dim() == 0) {
        const Eigen::Index d = s.ambient_dim();
        return OperatorSubspace::from_orthonormal(d, CMatrix::Identity(d * d, d * d)).mark_algebra(true);
    }
    return commutant(s.basis(), tol);
}

/// S intersected with its commutant.
inline OperatorSubspace center(const OperatorSubspace& s, const TolerancePolicy& tol = {})
{
    auto out = commutant_within(s.basis(), s.coordinates_matrix(), s.ambient_dim(), tol);
    out.mark_algebra(true);
    return out;
}

/// Minimal projections of the center of S. A seeded random Hermitian element
/// of the center is diagonalized and its eigenvalue clusters give the
/// candidates; candidates outside S (the complement of S's unit) are dropped.
inline std::vector<CMatrix> minimal_central_projections(const OperatorSubspace& s, std::uint64_t seed = 0,
                                                        const TolerancePolicy& tol = {})
{
    const Eigen::Index d = s.ambient_dim();
    const OperatorSubspace z = center(s, tol);
    if (z.dim() == 0)
        return {};
    Rng rng(seed ^ 0xC3A5C85C97CB3127ULL);
    for (int attempt = 0; attempt < 8; ++attempt) {
        Rng local = rng.split(static_cast<std::uint64_t>(attempt));
        CMatrix h = CMatrix::Zero(d, d);
        for (const auto& b : z.basis())
            h += local.gaussian() * 0.5 * (b + b.adjoint()) + local.gaussian() * Complex(0, 0.5) * (b - b.adjoint());
        h = 0.5 * (h + h.adjoint()).eval();
        const HermEig eig = herm_eig(h, tol);
        const auto clusters = cluster_eigenvalues(eig.values, tol.cluster_abs);
        // reject draws with gaps too close to the clustering threshold
        bool ambiguous = false;
        const double radius = std::max(eig.values.cwiseAbs().maxCoeff(), 1e-300);
        for (std::size_t c = 1; c < clusters.size(); ++c) {
            const double gap = (eig.values(clusters[c].first) - eig.values(clusters[c].first - 1)) / radius;
            if (gap < 1e3 * tol.cluster_abs)
                ambiguous = true;
        }
        if (ambiguous)
            continue;
        std::vector<CMatrix> out;
        for (const auto& [b, e] : clusters) {
            const CMatrix v = eig.vectors.middleCols(b, e - b);
            CMatrix p = v * v.adjoint();
            if (s.member(p, tol.eq_rel).member)
                out.push_back(std::move(p));
        }
        if (static_cast<int>(out.size()) != z.dim())
            continue;
        bool central = true;
        for (const auto& p : out)
            if (!z.member(p, tol.eq_rel).member)
                central = false;
        if (central)
            return out;
    }
    throw Error(ErrorKind::DegenerateCenter, "could not separate the minimal central projections");
}

/// *-algebra generated by ops, as P ops'' P with P the support projection
/// of ops (the unit of the generated algebra). Closing the span under
/// products instead amplifies rounding on ill-separated spectra.
inline OperatorSubspace generated_algebra(const std::vector<CMatrix>& ops, Eigen::Index dim,
                                          const TolerancePolicy& tol = {})
{
    CMatrix g = CMatrix::Zero(dim, dim);
    for (const auto& op : ops)
        g += op * op.adjoint() + op.adjoint() * op;
    const HermEig eig = herm_eig(g, tol);
    const double top = eig.values.size() ? eig.values.cwiseAbs().maxCoeff() : 0.0;
    if (top == 0.0)
        return OperatorSubspace::span(dim, {});
    const CMatrix p = spectral_apply(eig, [&](double l) { return Complex(l > tol.eq_rel * top ? 1.0 : 0.0, 0); });
    const OperatorSubspace full = double_commutant(ops, tol);
    std::vector<CMatrix> compressed;
    for (const auto& b : full.basis())
        compressed.push_back(p * b * p);
    OperatorSubspace out = OperatorSubspace::span(dim, compressed, tol.eq_rel);
    out.mark_algebra(true);
    return out;
}

// ---------------------------------------------------------------------------
// cyclic and separating vectors
// ---------------------------------------------------------------------------

inline int numerical_rank(const CMatrix& m, const TolerancePolicy& tol = {})
{
    if (m.size() == 0)
        return 0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    const RVector& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0)
        return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > sv(0) / tol.cond_max)
            ++r;
    return r;
}

/// Columns x_i xi for the basis of s.
inline CMatrix orbit_matrix(const OperatorSubspace& s, const CVector& xi)
{
    CMatrix x(s.ambient_dim(), s.dim());
    for (int i = 0; i < s.dim(); ++i)
        x.col(i) = s.basis()[i] * xi;
    return x;
}

inline bool check_cyclic(const OperatorSubspace& s, const CVector& xi, const TolerancePolicy& tol = {})
{
    if (xi.norm() == 0.0)
        return s.ambient_dim() == 0;
    return numerical_rank(orbit_matrix(s, xi), tol) == s.ambient_dim();
}

inline bool check_separating(const OperatorSubspace& s, const CVector& xi, const TolerancePolicy& tol = {})
{
    if (xi.norm() == 0.0)
        return s.dim() == 0;
    return numerical_rank(orbit_matrix(s, xi), tol) == s.dim();
}

/// Block form: cyclic iff every block of xi has rank m_k.
inline bool check_cyclic(const ConcreteAlgebra& a, const CVector& xi, const TolerancePolicy& tol = {})
{
    const StateVector s = a.to_blocks(xi);
    for (int k = 0; k < a.spec().num_blocks(); ++k)
        if (numerical_rank(s.block(k), tol) != a.spec().block(k).m)
            return false;
    return true;
}

/// Block form: separating iff every block of xi has rank n_k.
inline bool check_separating(const ConcreteAlgebra& a, const CVector& xi, const TolerancePolicy& tol = {})
{
    const StateVector s = a.to_blocks(xi);
    for (int k = 0; k < a.spec().num_blocks(); ++k)
        if (numerical_rank(s.block(k), tol) != a.spec().block(k).n)
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// reduction by a commuting projection
// ---------------------------------------------------------------------------

struct Reduction {
    OperatorSubspace algebra; // acting on range(p)
    CVector vector;           // compressed vector
    CMatrix isometry;         // columns: orthonormal basis of range(p)
};

inline Reduction reduce(const OperatorSubspace& a, const CMatrix& p, const CVector& xi,
                        const TolerancePolicy& tol = {})
{
    const Eigen::Index d = a.ambient_dim();
    if (p.rows() != d || p.cols() != d || xi.size() != d)
        throw Error(ErrorKind::ShapeMismatch, "reduce: sizes do not match");
    for (const auto& b : a.basis())
        if ((p * b - b * p).norm() > tol.eq_rel * std::max(1.0, p.norm() * b.norm()))
            throw Error(ErrorKind::NotCommuting, "projection does not commute with the algebra");
    // a projection has norm 0 or 1; measure its asymmetry on that scale
    if (hermitian_residual(p) > tol.eq_rel * std::max(1.0, p.norm()))
        throw Error(ErrorKind::NotHermitian, "reduce: p is not self-adjoint");
    const HermEig eig = herm_eig(CMatrix(0.5 * (p + p.adjoint())), tol);
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
        if (eig.values(i) > 0.5)
            cols.push_back(i);
    CMatrix w(d, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        w.col(static_cast<Eigen::Index>(j)) = eig.vectors.col(cols[j]);
    std::vector<CMatrix> compressed;
    for (const auto& b : a.basis())
        compressed.push_back(w.adjoint() * b * w);
    Reduction r;
    r.algebra = OperatorSubspace::span(w.cols(), compressed, tol.eq_rel);
    r.algebra.mark_algebra(a.is_selfadjoint());
    r.vector = w.adjoint() * xi;
    r.isometry = std::move(w);
    return r;
}

} // namespace sharpcone

#endif
