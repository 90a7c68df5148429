#ifndef SHARPCONE_SCENARIO_HPP
#define SHARPCONE_SCENARIO_HPP

//
// Scenario files: an algebra M with a cyclic separating vector, an optional
// second algebra N on the same space, named vectors and projections, and the
// ground truth recorded by the generator that produced them.
//
// Complex numbers are [re, im], vectors are arrays of complex numbers,
// matrices are arrays of rows and algebra elements are arrays of blocks.
//

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cone.hpp"

namespace sharpcone {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON encoding of the numeric types
// ---------------------------------------------------------------------------

namespace io {

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const CVector& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(to_json(v(i)));
    return out;
}

inline Json to_json(const CMatrix& m)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(to_json(m(i, j)));
        out.push_back(std::move(row));
    }
    return out;
}

inline Json to_json(const AlgebraElement& x)
{
    Json out = Json::array();
    for (const auto& b : x.blocks())
        out.push_back(to_json(b));
    return out;
}

inline Json to_json(const AlgebraSpec& spec)
{
    Json out = Json::array();
    for (const auto& b : spec.blocks())
        out.push_back(Json::array({b.n, b.m}));
    return out;
}

[[noreturn]] inline void bad(const std::string& what) { throw Error(ErrorKind::InvalidInput, what); }

inline Complex complex_from(const Json& j)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        bad("complex numbers are written [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline CVector vector_from(const Json& j)
{
    if (!j.is_array())
        bad("a vector must be an array");
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = complex_from(j[i]);
    return v;
}

inline CMatrix matrix_from(const Json& j)
{
    if (!j.is_array() || j.empty())
        bad("a matrix must be a non-empty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    CMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            bad("matrix rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = complex_from(j[i][c]);
    }
    return m;
}

inline AlgebraSpec spec_from(const Json& j)
{
    if (!j.is_array() || j.empty())
        bad("blocks must be a non-empty array of [n, m] pairs");
    std::vector<Block> blocks;
    for (const auto& b : j) {
        if (!b.is_array() || b.size() != 2 || !b[0].is_number_integer() || !b[1].is_number_integer())
            bad("each block is an [n, m] pair of integers");
        const int n = b[0].get<int>();
        const int m = b[1].get<int>();
        if (n < 1 || m < 1 || n > 32 || m > 32)
            bad("block sizes must lie in [1, 32]");
        blocks.push_back({n, m});
    }
    AlgebraSpec spec(blocks);
    if (spec.hilbert_dim() > 64)
        bad("Hilbert space dimension above 64 is not supported");
    return spec;
}

inline AlgebraElement element_from(const Json& j, const AlgebraSpec& spec)
{
    if (!j.is_array() || static_cast<int>(j.size()) != spec.num_blocks())
        bad("an algebra element needs one matrix per block");
    std::vector<CMatrix> blocks;
    for (int k = 0; k < spec.num_blocks(); ++k) {
        CMatrix b = matrix_from(j[static_cast<std::size_t>(k)]);
        if (b.rows() != spec.block(k).n || b.cols() != spec.block(k).n)
            bad("block " + std::to_string(k) + " of an algebra element has the wrong size");
        blocks.push_back(std::move(b));
    }
    return AlgebraElement(std::move(blocks));
}

inline std::vector<int> int_list(const Json& j)
{
    std::vector<int> out;
    if (!j.is_array())
        bad("expected an array of integers");
    for (const auto& v : j) {
        if (!v.is_number_integer())
            bad("expected an array of integers");
        out.push_back(v.get<int>());
    }
    return out;
}

} // namespace io

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

struct AlgebraDecl {
    AlgebraSpec spec;
    CMatrix intertwiner;

    ConcreteAlgebra build(const TolerancePolicy& tol = {}) const { return ConcreteAlgebra(spec, intertwiner, tol); }
};

struct Scenario {
    std::string profile = "custom";
    std::uint64_t seed = 0;
    AlgebraDecl m;
    CVector xi0;
    std::optional<AlgebraDecl> n;
    std::map<std::string, CVector> vectors;
    std::map<std::string, Json> projections; // constructor specs, resolved against a context
    TolerancePolicy tol;
    Json tolerance_overrides = Json::object();
    Json ground_truth = Json::object();

    ConcreteAlgebra algebra() const { return m.build(tol); }
    ConeContext context() const { return ConeContext(algebra(), xi0, tol); }
};

namespace detail {

inline AlgebraDecl decl_from(const Json& j)
{
    if (!j.is_object() || !j.contains("blocks"))
        io::bad("an algebra needs a \"blocks\" field");
    AlgebraDecl d{io::spec_from(j["blocks"]), CMatrix()};
    const int h = d.spec.hilbert_dim();
    d.intertwiner = j.contains("intertwiner") ? io::matrix_from(j["intertwiner"]) : identity(h);
    if (d.intertwiner.rows() != h || d.intertwiner.cols() != h)
        throw Error(ErrorKind::ShapeMismatch, "intertwiner size does not match the blocks");
    return d;
}

inline Json decl_to(const AlgebraDecl& d)
{
    Json j = Json::object();
    j["blocks"] = io::to_json(d.spec);
    if ((d.intertwiner - identity(d.spec.hilbert_dim())).norm() != 0.0)
        j["intertwiner"] = io::to_json(d.intertwiner);
    return j;
}

} // namespace detail

inline Json to_json(const Scenario& s)
{
    Json j = Json::object();
    j["profile"] = s.profile;
    j["seed"] = s.seed;
    j["algebra"] = detail::decl_to(s.m);
    j["xi0"] = io::to_json(s.xi0);
    if (s.n)
        j["second_algebra"] = detail::decl_to(*s.n);
    if (!s.vectors.empty()) {
        Json v = Json::object();
        for (const auto& [name, vec] : s.vectors)
            v[name] = io::to_json(vec);
        j["vectors"] = std::move(v);
    }
    if (!s.projections.empty()) {
        Json p = Json::object();
        for (const auto& [name, spec] : s.projections)
            p[name] = spec;
        j["projections"] = std::move(p);
    }
    if (!s.tolerance_overrides.empty())
        j["tolerances"] = s.tolerance_overrides;
    if (!s.ground_truth.empty())
        j["ground_truth"] = s.ground_truth;
    return j;
}

inline std::string serialize(const Scenario& s) { return to_json(s).dump(1) + "\n"; }

inline TolerancePolicy apply_overrides(TolerancePolicy tol, const Json& o)
{
    if (!o.is_object())
        io::bad("tolerances must be an object");
    for (const auto& [key, value] : o.items()) {
        if (!value.is_number())
            io::bad("tolerance " + key + " must be a number");
        const double v = value.get<double>();
        if (key == "eq_rel")
            tol.eq_rel = v;
        else if (key == "psd_rel")
            tol.psd_rel = v;
        else if (key == "cluster_abs")
            tol.cluster_abs = v;
        else if (key == "cond_max")
            tol.cond_max = v;
        else
            io::bad("unknown tolerance " + key);
    }
    tol.validate();
    return tol;
}

/// Parses and validates a scenario; xi0 must be cyclic and separating for M.
inline Scenario from_json(const Json& j)
{
    if (!j.is_object())
        io::bad("a scenario must be a JSON object");
    for (const char* key : {"algebra", "xi0"})
        if (!j.contains(key))
            io::bad(std::string("missing field \"") + key + "\"");
    Scenario s;
    if (j.contains("profile"))
        s.profile = j["profile"].get<std::string>();
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned())
            io::bad("seed must be a non-negative integer");
        s.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("tolerances")) {
        s.tolerance_overrides = j["tolerances"];
        s.tol = apply_overrides(s.tol, s.tolerance_overrides);
    }
    s.m = detail::decl_from(j["algebra"]);
    s.xi0 = io::vector_from(j["xi0"]);
    if (s.xi0.size() != s.m.spec.hilbert_dim())
        throw Error(ErrorKind::ShapeMismatch, "xi0 length does not match the algebra");
    if (!s.xi0.allFinite())
        io::bad("xi0 has non-finite entries");
    if (j.contains("second_algebra")) {
        s.n = detail::decl_from(j["second_algebra"]);
        if (s.n->spec.hilbert_dim() != s.m.spec.hilbert_dim())
            throw Error(ErrorKind::ShapeMismatch, "the second algebra lives on a different space");
        (void)s.n->build(s.tol);
    }
    if (j.contains("vectors")) {
        for (const auto& [name, v] : j["vectors"].items()) {
            CVector vec = io::vector_from(v);
            if (vec.size() != s.xi0.size())
                throw Error(ErrorKind::ShapeMismatch, "vector " + name + " has the wrong length");
            s.vectors.emplace(name, std::move(vec));
        }
    }
    if (j.contains("projections")) {
        if (!j["projections"].is_object())
            io::bad("projections must be an object");
        for (const auto& [name, p] : j["projections"].items())
            s.projections.emplace(name, p);
    }
    if (j.contains("ground_truth"))
        s.ground_truth = j["ground_truth"];
    const ConcreteAlgebra a = s.algebra();
    if (!check_cyclic(a, s.xi0, s.tol) || !check_separating(a, s.xi0, s.tol))
        throw Error(ErrorKind::NotCyclicSeparating, "xi0 is not cyclic and separating for the algebra");
    return s;
}

inline Scenario parse(const std::string& text)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        io::bad(std::string("malformed JSON: ") + e.what());
    }
    try {
        return from_json(j);
    } catch (const Json::exception& e) {
        io::bad(std::string("malformed scenario: ") + e.what());
    }
}

/// Resolves a projection constructor against a context. Accepted forms:
/// {"matrix": M}, {"left_mult": e}, {"right_mult": e}, {"rank_one_xi0": true};
/// left_mult and right_mult may be combined and are then summed.
inline CMatrix resolve_projection(const Json& spec, const ConeContext& ctx)
{
    const Eigen::Index d = ctx.dim();
    if (!spec.is_object())
        io::bad("a projection is given by a constructor object");
    if (spec.contains("matrix")) {
        CMatrix p = io::matrix_from(spec["matrix"]);
        if (p.rows() != d || p.cols() != d)
            throw Error(ErrorKind::ShapeMismatch, "projection matrix has the wrong size");
        return p;
    }
    if (spec.contains("rank_one_xi0")) {
        const CVector u = ctx.xi0() / ctx.xi0().norm();
        return u * u.adjoint();
    }
    if (!spec.contains("left_mult") && !spec.contains("right_mult"))
        io::bad("unknown projection constructor");
    CMatrix p = CMatrix::Zero(d, d);
    const auto& a = ctx.algebra();
    if (spec.contains("left_mult"))
        p += a.embed(io::element_from(spec["left_mult"], a.spec()));
    if (spec.contains("right_mult"))
        p += ctx.modular().j_conjugate(a.embed(io::element_from(spec["right_mult"], a.spec())));
    return p;
}

// ---------------------------------------------------------------------------
// generators
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& profiles()
{
    static const std::vector<std::string> names = {"abelian",   "single-factor",  "multi-block",
                                                   "tracial-mix", "recovery-suite", "embedding-suite"};
    return names;
}

namespace gen {

/// vec(X) -> vec(X^T) on row-major n x n matrices.
inline CMatrix swap_matrix(int n)
{
    CMatrix p = CMatrix::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            p(j * n + i, i * n + j) = 1.0;
    return p;
}

/// Places an n x 2n block as x (+) (right multiplication by x^T) on two
/// n x n standard blocks.
inline CMatrix mix_intertwiner(int n)
{
    const int d = 2 * n * n;
    CMatrix w = CMatrix::Zero(d, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2 * n; ++j) {
            const int dst = j < n ? i * n + j : n * n + (j - n) * n + i;
            w(dst, i * 2 * n + j) = 1.0;
        }
    return w;
}

/// Positive square root of a random density-like matrix: V diag(sqrt(l)) V*.
inline CMatrix sqrt_state_block(int n, Rng& rng, CMatrix* basis = nullptr)
{
    const CMatrix v = rand_unitary(n, rng);
    RVector lam(n);
    for (int i = 0; i < n; ++i)
        lam(i) = 0.3 + rng.uniform();
    if (basis)
        *basis = v;
    return v * lam.cwiseSqrt().cast<Complex>().asDiagonal() * v.adjoint();
}

inline CVector normalized(CVector v) { return v / v.norm(); }

/// Elements of M turned into labelled vectors x xi0.
inline void add_vectors(Scenario& s, Rng& rng)
{
    const ConcreteAlgebra a = s.algebra();
    const auto& spec = a.spec();
    std::vector<CMatrix> pos, herm, proj, any;
    for (const auto& b : spec.blocks()) {
        const CMatrix g = rand_gaussian(b.n, b.n, rng);
        pos.push_back(g * g.adjoint() / double(b.n));
        herm.push_back(rand_hermitian(b.n, rng));
        proj.push_back(rand_projection(b.n, rng.uniform_int(0, b.n), rng));
        any.push_back(rand_gaussian(b.n, b.n, rng));
    }
    auto vec = [&](const std::vector<CMatrix>& x) -> CVector { return a.embed(AlgebraElement(x)) * s.xi0; };
    s.vectors["positive"] = vec(pos);
    s.vectors["hermitian"] = vec(herm);
    s.vectors["projective"] = vec(proj);
    s.vectors["general"] = vec(any);
}

inline AlgebraDecl standard_decl(const std::vector<int>& sizes, Rng& rng, bool rotate)
{
    std::vector<Block> blocks;
    for (int n : sizes)
        blocks.push_back({n, n});
    AlgebraSpec spec(blocks);
    const int h = spec.hilbert_dim();
    return {spec, rotate ? rand_unitary(h, rng) : identity(h)};
}

inline Scenario abelian(std::uint64_t seed)
{
    Rng rng(seed);
    Scenario s;
    s.profile = "abelian";
    s.seed = seed;
    const int k = rng.uniform_int(1, 4);
    s.m = standard_decl(std::vector<int>(static_cast<std::size_t>(k), 1), rng, false);
    CVector xi(k);
    for (int i = 0; i < k; ++i)
        xi(i) = 0.3 + rng.uniform();
    s.xi0 = normalized(xi);
    add_vectors(s, rng);
    std::vector<int> sub;
    for (int i = 0; i < k; ++i)
        if (rng.uniform() < 0.5)
            sub.push_back(i);
    const auto e = AlgebraElement::block_indicator(s.m.spec, sub);
    s.projections["central"] = {{"left_mult", io::to_json(e)}};
    s.ground_truth["projections"]["central"] = {{"central", true}, {"recoverable", true}};
    return s;
}

inline Scenario single_factor(std::uint64_t seed)
{
    Rng rng(seed);
    Scenario s;
    s.profile = "single-factor";
    s.seed = seed;
    s.m = standard_decl({2}, rng, false);
    // rho = diag(t, 1 - t) in a random basis, t away from 1/2
    const double t = 0.55 + 0.3 * rng.uniform();
    const CMatrix v = rand_unitary(2, rng);
    RVector lam(2);
    lam << std::sqrt(t), std::sqrt(1.0 - t);
    const CMatrix x = v * lam.cast<Complex>().asDiagonal() * v.adjoint();
    s.xi0 = StateVector(std::vector<CMatrix>{x}).flat();
    add_vectors(s, rng);
    s.projections["rank_one_xi0"] = {{"rank_one_xi0", true}};
    s.projections["identity"] = {{"left_mult", io::to_json(AlgebraElement::identity(s.m.spec))}};
    s.ground_truth["projections"]["rank_one_xi0"] = {{"central", false}, {"recoverable", false}};
    s.ground_truth["projections"]["identity"] = {{"central", true}, {"recoverable", true}};
    s.ground_truth["rho_eigenvalues"] = {1.0 - t, t};
    return s;
}

inline Scenario multi_block(std::uint64_t seed)
{
    Rng rng(seed);
    Scenario s;
    s.profile = "multi-block";
    s.seed = seed;
    const int nb = rng.uniform_int(2, 3);
    std::vector<int> sizes;
    for (int k = 0; k < nb; ++k)
        sizes.push_back(rng.uniform_int(1, nb == 2 ? 3 : 2));
    s.m = standard_decl(sizes, rng, true);
    std::vector<CMatrix> xs;
    for (int n : sizes)
        xs.push_back(rand_gaussian(n, n, rng) + 2.0 * identity(n));
    s.xi0 = s.m.intertwiner * normalized(StateVector(xs).flat());
    add_vectors(s, rng);
    std::vector<int> sub;
    for (int k = 0; k < nb; ++k)
        if (rng.uniform() < 0.5)
            sub.push_back(k);
    s.projections["central"] = {{"left_mult", io::to_json(AlgebraElement::block_indicator(s.m.spec, sub))}};
    s.ground_truth["projections"]["central"] = {{"central", true}, {"recoverable", true}};
    // a projection of the first block only: not central when that block is not scalar
    const int n0 = sizes[0];
    if (n0 > 1) {
        std::vector<CMatrix> e;
        for (int n : sizes)
            e.push_back(CMatrix::Zero(n, n));
        e[0] = rand_projection(n0, 1, rng);
        s.projections["non_central"] = {{"left_mult", io::to_json(AlgebraElement(e))}};
        s.ground_truth["projections"]["non_central"] = {{"central", false}, {"recoverable", true}};
    }
    return s;
}

/// M = M_n (+) M_n, the second block tracial; N is one M_n acting on both
/// blocks, by left multiplication on the first and through the transpose
/// on the second, so e = f = 1 and the split is half homo, half anti.
inline Scenario tracial_mix(std::uint64_t seed)
{
    Rng rng(seed);
    Scenario s;
    s.profile = "tracial-mix";
    s.seed = seed;
    const int n = rng.uniform_int(2, 3);
    s.m = standard_decl({n, n}, rng, false);
    const CMatrix x1 = rand_gaussian(n, n, rng) + 2.0 * identity(n);
    const CMatrix x2 = 0.7 * rand_unitary(n, rng);
    s.xi0 = normalized(StateVector(std::vector<CMatrix>{x1, x2}).flat());
    s.n = AlgebraDecl{AlgebraSpec({{n, 2 * n}}), mix_intertwiner(n)};
    add_vectors(s, rng);
    s.ground_truth["g_blocks"] = Json::array({0});
    s.ground_truth["e_blocks"] = Json::array({0});
    s.ground_truth["f_blocks"] = Json::array({0});
    s.ground_truth["case"] = 2;
    s.ground_truth["cyclic_for_n"] = false;
    return s;
}

/// Standard-form M with xi_k = rho_k^{1/2}; projections p = qe + J q^perp e J
/// with q^perp e fixed by the modular group, plus invalid perturbations.
inline Scenario recovery_suite(std::uint64_t seed)
{
    Rng rng(seed);
    Scenario s;
    s.profile = "recovery-suite";
    s.seed = seed;
    const int nb = rng.uniform_int(1, 2);
    std::vector<int> sizes;
    for (int k = 0; k < nb; ++k)
        sizes.push_back(rng.uniform_int(nb == 1 ? 2 : 1, 3));
    s.m = standard_decl(sizes, rng, true);
    std::vector<CMatrix> xs, es;
    std::vector<int> qb;
    for (int k = 0; k < nb; ++k) {
        const int n = sizes[static_cast<std::size_t>(k)];
        CMatrix v;
        xs.push_back(sqrt_state_block(n, rng, &v));
        if (rng.uniform() < 0.5) {
            qb.push_back(k);
            es.push_back(rand_projection(n, rng.uniform_int(0, n), rng));
        } else {
            RVector d(n);
            for (int i = 0; i < n; ++i)
                d(i) = rng.uniform() < 0.5 ? 1.0 : 0.0;
            es.push_back(v * d.cast<Complex>().asDiagonal() * v.adjoint());
        }
    }
    s.xi0 = s.m.intertwiner * normalized(StateVector(xs).flat());
    add_vectors(s, rng);
    const AlgebraElement e(es);
    const AlgebraElement q = AlgebraElement::block_indicator(s.m.spec, qb);
    const AlgebraElement qp = AlgebraElement::identity(s.m.spec) - q;
    s.projections["valid"] = {{"left_mult", io::to_json(q * e)}, {"right_mult", io::to_json(qp * e)}};
    s.ground_truth["projections"]["valid"] = {
        {"recoverable", true}, {"e", io::to_json(e)}, {"q_blocks", qb}};

    // invalid: the valid projection conjugated by a small rotation of H
    const ConeContext ctx = s.context();
    const CMatrix p = resolve_projection(s.projections["valid"], ctx);
    const int h = s.m.spec.hilbert_dim();
    const CMatrix k = rand_hermitian(h, rng);
    const CMatrix u = spectral_apply(herm_eig(k), [](double l) { return std::exp(Complex(0, 0.05 * l)); });
    CMatrix bad = u * p * u.adjoint();
    if ((bad - p).norm() < 1e-3) // p commutes with the rotation, e.g. p = 0 or 1
        bad = rand_projection(h, rng.uniform_int(1, h - 1), rng);
    s.projections["perturbed"] = {{"matrix", io::to_json(bad)}};
    s.ground_truth["projections"]["perturbed"] = {{"recoverable", false}};
    return s;
}

/// M standard form on random blocks, rotated by a Haar unitary U. On a
/// random set Q of blocks xi0 is generic and N acts like M; off Q xi0 is
/// tracial and N acts by right multiplication. The inclusion holds by
/// design, e = g = Q plus the scalar blocks, f = the rest, Case 1.
inline Scenario embedding_suite(std::uint64_t seed)
{
    Rng rng(seed);
    Scenario s;
    s.profile = "embedding-suite";
    s.seed = seed;
    const int nb = rng.uniform_int(1, 2);
    std::vector<int> sizes;
    for (int k = 0; k < nb; ++k)
        sizes.push_back(rng.uniform_int(1, 3));
    s.m = standard_decl(sizes, rng, true);
    const int h = s.m.spec.hilbert_dim();
    std::vector<CMatrix> xs;
    CMatrix w = CMatrix::Identity(h, h);
    std::vector<int> e_blocks, f_blocks;
    for (int k = 0; k < nb; ++k) {
        const int n = sizes[static_cast<std::size_t>(k)];
        const int off = s.m.spec.hilbert_offset(k);
        const bool on_q = rng.uniform() < 0.5;
        if (on_q) {
            xs.push_back(rand_gaussian(n, n, rng) + 2.0 * identity(n));
        } else {
            xs.push_back((0.5 + rng.uniform()) * rand_unitary(n, rng));
            w.block(off, off, n * n, n * n) = swap_matrix(n);
        }
        // a scalar block is both homomorphic and antihomomorphic; ties go to g
        (on_q || n == 1 ? e_blocks : f_blocks).push_back(k);
    }
    s.xi0 = s.m.intertwiner * normalized(StateVector(xs).flat());
    s.n = AlgebraDecl{s.m.spec, s.m.intertwiner * w};
    add_vectors(s, rng);
    s.ground_truth["g_blocks"] = e_blocks;
    s.ground_truth["e_blocks"] = e_blocks;
    s.ground_truth["f_blocks"] = f_blocks;
    s.ground_truth["case"] = 1;
    s.ground_truth["cyclic_for_n"] = true;
    return s;
}

} // namespace gen

inline Scenario generate(const std::string& profile, std::uint64_t seed)
{
    if (profile == "abelian")
        return gen::abelian(seed);
    if (profile == "single-factor")
        return gen::single_factor(seed);
    if (profile == "multi-block")
        return gen::multi_block(seed);
    if (profile == "tracial-mix")
        return gen::tracial_mix(seed);
    if (profile == "recovery-suite")
        return gen::recovery_suite(seed);
    if (profile == "embedding-suite")
        return gen::embedding_suite(seed);
    throw Error(ErrorKind::InvalidProfile, "unknown profile: " + profile);
}

} // namespace sharpcone

#endif
