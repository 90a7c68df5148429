#ifndef SHARPCONE_COMMANDS_HPP
#define SHARPCONE_COMMANDS_HPP

//
// Command dispatch: each command evaluates one family of checks on a
// scenario and returns a Report. Errors raised by the numerical modules
// become failed records; malformed requests (unknown command, unknown
// vector label, missing second algebra) throw InvalidInput.
//

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "embeddings.hpp"
#include "recovery.hpp"
#include "report.hpp"
#include "scenario.hpp"

namespace sharpcone {

struct RunOptions {
    std::uint64_t seed = 0;
    int samples = 8;
    std::string subcommand;            // cone: member, order, classify, norm, square, corner
    std::vector<std::string> operands; // cone: vector labels
    std::string projection;            // central, recover: a name or an inline constructor
    bool timings = false;
};

inline const std::vector<std::string>& commands()
{
    static const std::vector<std::string> names = {"modular", "cone",    "alpha",  "gen-theorem",
                                                   "cyclic-theorem", "central", "recover", "verify-all"};
    return names;
}

inline const std::vector<std::string>& cone_subcommands()
{
    static const std::vector<std::string> names = {"member", "order", "classify", "norm", "square", "corner"};
    return names;
}

namespace anchor {
inline constexpr const char* s_defining = "modular data: S x xi0 = x* xi0 on a basis of M";
inline constexpr const char* polar = "modular data: S = J Delta^(1/2)";
inline constexpr const char* j_involution = "modular data: J^2 = 1";
inline constexpr const char* j_antiunitary = "modular data: J antiunitary";
inline constexpr const char* jdj = "modular data: J Delta J = Delta^(-1)";
inline constexpr const char* xi0_fixed = "modular data: S, J, Delta fix xi0";
inline constexpr const char* jmj = "modular data: J M J = M'";
inline constexpr const char* flow = "modular flow: Delta^(it) M Delta^(-it) = M";
inline constexpr const char* delta_oracle = "modular data: Delta = L(xi xi*) R((xi* xi)^(-1)) per block";
inline constexpr const char* representation = "cone: zeta = rep(zeta) xi0";
inline constexpr const char* member = "cone: membership through the spectrum of rep";
inline constexpr const char* pointed = "cone: pointed convex cone";
inline constexpr const char* order = "cone order: antisymmetry";
inline constexpr const char* classify = "cone order: contractive and projective vectors";
inline constexpr const char* jordan_dec = "cone order: Jordan decomposition with orthogonal supports";
inline constexpr const char* sharp_norm = "sharp norm: order bisection versus spectral radius";
inline constexpr const char* square = "Jordan structure: order square versus operator square";
inline constexpr const char* corner = "Jordan structure: corner map versus e y e";
inline constexpr const char* offdiag = "Jordan structure: off-diagonal map versus e y e' + e' y e";
inline constexpr const char* inclusion = "cone inclusion N+ xi0 in P (sampled extreme rays)";
inline constexpr const char* defining = "alpha: alpha(x) xi0 = x xi0";
inline constexpr const char* jordan_anti = "alpha: Jordan homomorphism on anticommutators";
inline constexpr const char* jordan_proj = "alpha: projections to projections";
inline constexpr const char* split = "alpha: split into homomorphism plus antihomomorphism";
inline constexpr const char* beta_mult = "alpha split: beta multiplicative";
inline constexpr const char* gamma_anti = "alpha split: gamma antimultiplicative";
inline constexpr const char* beta_gamma = "alpha split: beta(x) gamma(y) = 0";
inline constexpr const char* g_in_m = "alpha split: g central projection in M";
inline constexpr const char* truth = "generator ground truth";
inline constexpr const char* gen_case1 = "inclusion theorem case ef = 0: cone equals the cone of a subalgebra";
inline constexpr const char* gen_case2 = "inclusion theorem case ef != 0: direct sum and strict inclusion witness";
inline constexpr const char* cyclic_pre = "cyclic case: xi0 cyclic for N";
inline constexpr const char* cyclic1 = "cyclic case: xi0 separating for N";
inline constexpr const char* cyclic2 = "cyclic case: N e inside M";
inline constexpr const char* cyclic3 = "cyclic case: e-perp xi0 tracial for N e-perp";
inline constexpr const char* cyclic4 = "cyclic case: J N e-perp J inside M";
inline constexpr const char* cyclic5 = "cyclic case: alpha(x) = g x + J g-perp x* J";
inline constexpr const char* central = "central projection: exact basis check p x xi0 = e x xi0";
inline constexpr const char* recover = "projection recovery: ";
inline constexpr const char* recover_identity = "projection recovery: p = q e + J q-perp e J";
inline constexpr const char* recover_sigma = "projection recovery: q-perp e fixed by the modular group";
inline constexpr const char* rejected = "projection recovery: invalid projection rejected by a condition";
} // namespace anchor

namespace detail {

[[noreturn]] inline void usage(const std::string& what) { throw Error(ErrorKind::InvalidInput, what); }

/// Runs fn; a module error becomes a failed record under name.
inline bool guarded(Report& r, const std::string& name, const std::string& anc, const std::function<void()>& fn)
{
    try {
        fn();
        return true;
    } catch (const Error& e) {
        r.error(name, anc, e.what());
        return false;
    }
}

class Timer {
public:
    Timer(Report& r, std::string phase, bool on) : r_(r), phase_(std::move(phase)), on_(on) {}
    ~Timer()
    {
        if (on_)
            r_.set_timing(phase_, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count());
    }

private:
    Report& r_;
    std::string phase_;
    bool on_;
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline const CVector& vector_named(const Scenario& s, const ConeContext& ctx, const std::string& name)
{
    if (name == "xi0")
        return ctx.xi0();
    const auto it = s.vectors.find(name);
    if (it == s.vectors.end())
        usage("unknown vector label: " + name);
    return it->second;
}

inline std::vector<std::pair<std::string, Json>> projections_requested(const Scenario& s, const RunOptions& o)
{
    std::vector<std::pair<std::string, Json>> out;
    if (!o.projection.empty()) {
        if (o.projection.front() == '{') {
            try {
                out.emplace_back("inline", Json::parse(o.projection));
            } catch (const Json::parse_error& e) {
                usage(std::string("malformed inline projection: ") + e.what());
            }
            return out;
        }
        const auto it = s.projections.find(o.projection);
        if (it == s.projections.end())
            usage("unknown projection: " + o.projection);
        out.emplace_back(it->first, it->second);
        return out;
    }
    for (const auto& [name, spec] : s.projections)
        out.emplace_back(name, spec);
    if (out.empty())
        usage("the scenario names no projection; pass --projection");
    return out;
}

inline double rel(const CVector& a, const CVector& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

/// Delta from the blocks of xi0: zeta_k -> (X X*) zeta_k (X* X)^{-1}.
inline CMatrix delta_oracle(const ConeContext& ctx)
{
    const auto& m = ctx.algebra();
    const StateVector xi = m.to_blocks(ctx.xi0());
    const Eigen::Index d = ctx.dim();
    std::vector<CMatrix> left, right_inv;
    for (int k = 0; k < m.spec().num_blocks(); ++k) {
        const CMatrix& x = xi.block(k);
        left.push_back(x * x.adjoint());
        right_inv.push_back((x.adjoint() * x).inverse());
    }
    CMatrix out(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
        CVector e = CVector::Zero(d);
        e(c) = 1.0;
        const StateVector z = m.to_blocks(e);
        std::vector<CMatrix> w;
        for (int k = 0; k < m.spec().num_blocks(); ++k)
            w.push_back(left[static_cast<std::size_t>(k)] * z.block(k) * right_inv[static_cast<std::size_t>(k)]);
        out.col(c) = m.from_blocks(StateVector(std::move(w)));
    }
    return out;
}

inline std::vector<int> nonzero_blocks(const AlgebraElement& x)
{
    std::vector<int> out;
    for (int k = 0; k < x.num_blocks(); ++k)
        if (x.block(k).norm() > 0.5)
            out.push_back(k);
    return out;
}

inline AlgebraElement random_block_element(const AlgebraSpec& spec, Rng& rng, int kind)
{
    std::vector<CMatrix> out;
    for (const auto& b : spec.blocks()) {
        switch (kind) {
        case 0: out.push_back(rand_hermitian(b.n, rng)); break;
        case 1: {
            const CMatrix g = rand_gaussian(b.n, b.n, rng);
            out.push_back(g * g.adjoint());
            break;
        }
        case 2: out.push_back(rand_projection(b.n, rng.uniform_int(0, b.n), rng)); break;
        default: out.push_back(rand_gaussian(b.n, b.n, rng)); break;
        }
    }
    return AlgebraElement(std::move(out));
}

} // namespace detail

// ---------------------------------------------------------------------------
// modular
// ---------------------------------------------------------------------------

inline void modular_checks(Report& r, const ConeContext& ctx)
{
    const auto& md = ctx.modular();
    const double tol = ctx.tol().eq_rel;
    const auto res = modular_residuals(md);
    r.check("modular.s-defining", anchor::s_defining, res.s_defining, tol);
    r.check("modular.polar", anchor::polar, res.polar, tol);
    r.check("modular.j-involution", anchor::j_involution, res.j_involution, tol);
    r.check("modular.j-antiunitary", anchor::j_antiunitary, res.j_antiunitary, tol);
    r.check("modular.j-delta-j", anchor::jdj, res.jdj, tol);
    r.check("modular.xi0-fixed", anchor::xi0_fixed, res.xi0_fixed, tol);
    r.check("modular.jmj-commutant", anchor::jmj, res.jmj_commutant, tol);
    r.check("modular.flow-invariance", anchor::flow, res.flow, tol);
    const CMatrix oracle = detail::delta_oracle(ctx);
    r.check("modular.delta-oracle", anchor::delta_oracle, (md.Delta - oracle).norm() / std::max(1.0, oracle.norm()),
            tol);
    std::vector<double> spectrum(md.delta_eig.values.data(), md.delta_eig.values.data() + md.delta_eig.values.size());
    std::sort(spectrum.begin(), spectrum.end());
    auto& d = r.data()["modular"];
    d["delta_spectrum"] = spectrum;
    d["fixed_point_dim"] = fixed_point_algebra(md).dim();
    d["algebra_dim"] = ctx.algebra().dim();
    d["hilbert_dim"] = ctx.dim();
    d["tracial"] = is_tracial(md.algebra, md.xi0, ctx.tol());
}

// ---------------------------------------------------------------------------
// cone
// ---------------------------------------------------------------------------

inline void cone_command(Report& r, const Scenario& s, const ConeContext& ctx, const RunOptions& o)
{
    const auto& sub = o.subcommand;
    if (std::find(cone_subcommands().begin(), cone_subcommands().end(), sub) == cone_subcommands().end())
        detail::usage("unknown cone subcommand: " + sub);
    const bool binary = sub == "order" || sub == "corner";
    const std::size_t need = binary ? 2 : 1;
    if (o.operands.size() != need)
        detail::usage("cone " + sub + " takes " + std::to_string(need) + " vector label(s)");
    std::vector<CVector> v;
    for (const auto& name : o.operands)
        v.push_back(detail::vector_named(s, ctx, name));
    const double tol = ctx.tol().eq_rel;
    auto& d = r.data()["cone"];
    d["subcommand"] = sub;
    d["operands"] = o.operands;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto rep = ctx.vector_to_operator(v[i]);
        r.check("cone.representation." + o.operands[i], anchor::representation,
                detail::rel(ctx.operator_to_vector(rep), v[i]), tol);
    }
    const std::string op = "cone." + sub;
    detail::guarded(r, op, anchor::member, [&] {
        if (sub == "member") {
            const auto verdict = ctx.status(v[0]);
            d["status"] = to_string(verdict.status);
            d["member"] = verdict.member();
            d["lambda_min"] = verdict.lambda_min;
            d["hermitian_residual"] = verdict.hermitian_residual;
        } else if (sub == "order") {
            const bool ab = leq(ctx, v[0], v[1]);
            const bool ba = leq(ctx, v[1], v[0]);
            d["leq"] = ab;
            d["geq"] = ba;
            const double diff = detail::rel(v[0], v[1]);
            r.check_bool(op + ".antisymmetry", anchor::order, !(ab && ba) || diff <= tol, ab && ba ? diff : 0.0, tol);
        } else if (sub == "classify") {
            const auto verdict = ctx.status(v[0]);
            d["status"] = to_string(verdict.status);
            if (!verdict.member()) {
                d["contractive"] = false;
                d["projective"] = false;
                return;
            }
            const auto c = classify(ctx, v[0]);
            d["contractive"] = c.contractive;
            d["projective"] = c.projective;
            d["idempotence_residual"] = c.idempotence_residual;
            d["orthogonality_residual"] = c.orthogonality_residual;
            r.check_bool(op + ".consistent", anchor::classify, c.consistent());
        } else if (sub == "norm") {
            const double exact = sharp_norm(ctx, v[0]);
            const double by_order = sharp_norm_by_order_k(ctx, v[0]);
            d["sharp_norm"] = exact;
            d["sharp_norm_by_order"] = by_order;
            r.check(op + ".bisection", anchor::sharp_norm, std::abs(by_order - exact) / std::max(exact, 1e-300), 1e-6);
        } else if (sub == "square") {
            const CVector a = square(ctx, v[0]);
            const CVector b = square_oracle(ctx, v[0]);
            d["square"] = io::to_json(a);
            r.check(op + ".oracle", anchor::square, detail::rel(a, b), tol);
        } else {
            const double scale = std::max(1.0, v[1].norm());
            const CVector c = corner(ctx, v[0], v[1]);
            const CVector od = offdiag(ctx, v[0], v[1]);
            d["corner"] = io::to_json(c);
            d["offdiag"] = io::to_json(od);
            r.check(op + ".corner-oracle", anchor::corner, (c - corner_oracle(ctx, v[0], v[1])).norm() / scale, tol);
            r.check(op + ".offdiag-oracle", anchor::offdiag, (od - offdiag_oracle(ctx, v[0], v[1])).norm() / scale,
                    tol);
        }
    });
}

/// Seeded property checks of the order and Jordan structure.
inline void cone_suite(Report& r, const ConeContext& ctx, const RunOptions& o)
{
    const auto& spec = ctx.algebra().spec();
    const double tol = ctx.tol().eq_rel;
    Rng rng(o.seed ^ 0xA0761D6478BD642FULL);
    double jd = 0, sn = 0, sq = 0, co = 0, od = 0;
    bool pointed = true, classes = true, supports = true;
    for (int i = 0; i < o.samples; ++i) {
        const auto pos = detail::random_block_element(spec, rng, 1);
        const auto herm = detail::random_block_element(spec, rng, 0);
        const auto proj = detail::random_block_element(spec, rng, 2);
        const auto gen = detail::random_block_element(spec, rng, 3);
        const CVector zp = ctx.operator_to_vector(pos);
        const CVector zh = ctx.operator_to_vector(herm);
        const CVector ze = ctx.operator_to_vector(proj);
        const CVector zg = ctx.operator_to_vector(gen);

        pointed = pointed && cone_member(ctx, zp) && (zp.norm() == 0.0 || !cone_member(ctx, CVector(-zp)));
        const CVector contraction = zp / (pos.norm() + 0.1);
        for (const CVector* z : {&contraction, &ze}) {
            const auto c = classify(ctx, *z);
            classes = classes && c.consistent();
        }
        classes = classes && classify(ctx, ze).projective;

        const auto dec = jordan_decompose(ctx, zh);
        jd = std::max(jd, detail::rel(CVector(dec.positive.vec - dec.negative.vec), zh));
        const auto sp = support_vector(ctx, dec.positive.vec);
        const auto sm = support_vector(ctx, dec.negative.vec);
        supports = supports && op_orthogonal(ctx, sp.vec, sm.vec).orthogonal;

        const double exact = sharp_norm(ctx, zh);
        if (exact > 0)
            sn = std::max(sn, std::abs(sharp_norm_by_order_k(ctx, zh) - exact) / exact);

        sq = std::max(sq, detail::rel(square(ctx, zg), square_oracle(ctx, zg)));
        const double scale = std::max(1.0, zg.norm());
        co = std::max(co, (corner(ctx, ze, zg) - corner_oracle(ctx, ze, zg)).norm() / scale);
        od = std::max(od, (offdiag(ctx, ze, zg) - offdiag_oracle(ctx, ze, zg)).norm() / scale);
    }
    r.check_bool("cone.suite.pointed", anchor::pointed, pointed);
    r.check_bool("cone.suite.classify", anchor::classify, classes);
    r.check("cone.suite.jordan-decomposition", anchor::jordan_dec, jd, tol);
    r.check_bool("cone.suite.jordan-supports", anchor::jordan_dec, supports);
    r.check("cone.suite.sharp-norm", anchor::sharp_norm, sn, 1e-6);
    r.check("cone.suite.square", anchor::square, sq, tol);
    r.check("cone.suite.corner", anchor::corner, co, tol);
    r.check("cone.suite.offdiag", anchor::offdiag, od, tol);
    r.data()["cone_suite"] = {{"samples", o.samples}};
}

// ---------------------------------------------------------------------------
// alpha and the inclusion theorems
// ---------------------------------------------------------------------------

inline std::optional<EmbeddingAnalysis> alpha_checks(Report& r, const Scenario& s, const ConeContext& ctx,
                                                     const RunOptions& o)
{
    if (!s.n)
        detail::usage("this command needs a second algebra");
    const ConcreteAlgebra n = s.n->build(s.tol);
    const double tol = ctx.tol().eq_rel;
    std::optional<EmbeddingAnalysis> out;
    auto& data = r.data()["alpha"];
    detail::guarded(r, "alpha.inclusion", anchor::inclusion, [&] {
        const auto inc = verify_cone_inclusion(n, ctx, o.samples, o.seed);
        r.check_bool("alpha.inclusion", anchor::inclusion, inc.holds, std::max(0.0, -inc.worst_lambda),
                     ctx.tol().psd_rel);
        data["rays_checked"] = inc.rays_checked;
    });
    if (!detail::guarded(r, "alpha.defining", anchor::defining, [&] { out = compute_alpha(n, ctx); }))
        return std::nullopt;
    auto& an = *out;
    r.check("alpha.defining", anchor::defining, an.defining_residual, tol);
    const auto jr = check_jordan(an, o.samples, o.seed);
    r.check("alpha.jordan.anticommutator", anchor::jordan_anti, jr.anticommutator, tol);
    r.check("alpha.jordan.projections", anchor::jordan_proj, jr.projections, tol);
    if (!detail::guarded(r, "alpha.split", anchor::split, [&] { split_homo_antihomo(an, o.seed); })) {
        out.reset();
        return out;
    }
    r.check("alpha.split.beta-multiplicative", anchor::beta_mult, an.beta_multiplicative, tol);
    r.check("alpha.split.gamma-antimultiplicative", anchor::gamma_anti, an.gamma_antimultiplicative, tol);
    r.check("alpha.split.beta-gamma-orthogonal", anchor::beta_gamma, an.beta_gamma_orthogonal, tol);
    r.check("alpha.split.g-in-m", anchor::g_in_m, an.g_membership_residual,
            tol * std::max(1.0, an.g.norm()));
    const auto g_blocks = detail::nonzero_blocks(an.g_in_m);
    data["g"] = io::to_json(an.g);
    data["e"] = io::to_json(CMatrix(n.embed(an.e)));
    data["f"] = io::to_json(CMatrix(n.embed(an.f)));
    data["g_blocks"] = g_blocks;
    data["e_blocks"] = detail::nonzero_blocks(an.e);
    data["f_blocks"] = detail::nonzero_blocks(an.f);
    data["summands"] = static_cast<int>(an.summands.size());
    data["case"] = an.ef_zero() ? 1 : 2;

    const auto& gt = s.ground_truth;
    if (gt.contains("g_blocks")) {
        const auto want = AlgebraElement::block_indicator(ctx.algebra().spec(), io::int_list(gt["g_blocks"]));
        r.check("alpha.truth.g", anchor::truth, (an.g - ctx.algebra().embed(want)).norm(), 1e-6);
    }
    if (gt.contains("e_blocks")) {
        const auto want = AlgebraElement::block_indicator(n.spec(), io::int_list(gt["e_blocks"]));
        r.check("alpha.truth.e", anchor::truth, (an.e - want).frobenius(), 1e-6);
    }
    if (gt.contains("f_blocks")) {
        const auto want = AlgebraElement::block_indicator(n.spec(), io::int_list(gt["f_blocks"]));
        r.check("alpha.truth.f", anchor::truth, (an.f - want).frobenius(), 1e-6);
    }
    return out;
}

inline void gen_checks(Report& r, const Scenario& s, const EmbeddingAnalysis& an, const RunOptions& o)
{
    const double tol = an.tol.eq_rel;
    const double d = static_cast<double>(an.M.hilbert_dim());
    detail::guarded(r, "gen.evaluate", anchor::gen_case1, [&] {
        const auto c = theorem_gen_evaluate(an, o.samples, o.seed);
        auto& data = r.data()["gen"];
        data["case"] = c.case_number;
        if (c.case_number == 1) {
            r.check_bool("gen.case-1.subalgebra", anchor::gen_case1, c.m1_is_algebra, c.subalgebra_residual,
                         tol * std::sqrt(d));
            r.check_bool("gen.case-1.cone-equality", anchor::gen_case1, c.cone_failures == 0,
                         static_cast<double>(c.cone_failures), 0.0);
            data["cone_samples"] = c.cone_samples;
        } else {
            r.check_bool("gen.case-2.direct-sum", anchor::gen_case2, c.direct_sum);
            r.check_bool("gen.case-2.witness", anchor::gen_case2, c.witness_found);
            data["dim_generated"] = c.dim_generated;
            data["dim_beta"] = c.dim_beta;
            data["dim_gamma"] = c.dim_gamma;
            if (c.witness_found) {
                data["witness"] = io::to_json(c.witness);
                data["witness_certificate"] = c.witness_result.certificate_kind;
                data["witness_lambda_min"] = c.witness_result.lambda_min;
            }
        }
        if (s.ground_truth.contains("case"))
            r.check_bool("gen.truth.case", anchor::truth, s.ground_truth["case"].get<int>() == c.case_number);
    });
}

inline void cyclic_checks(Report& r, const Scenario& s, const EmbeddingAnalysis& an)
{
    const double tol = an.tol.eq_rel;
    detail::guarded(r, "cyclic.evaluate", anchor::cyclic_pre, [&] {
        const auto c = cyclic_case_report(an);
        const auto& gt = s.ground_truth;
        if (!c.cyclic_for_n) {
            const bool expected = gt.contains("cyclic_for_n") && !gt["cyclic_for_n"].get<bool>();
            auto& rec = r.check_bool("cyclic.precondition", anchor::cyclic_pre, expected);
            rec.note = "xi0 is not cyclic for N; the statements do not apply";
            return;
        }
        r.check_bool("cyclic.precondition", anchor::cyclic_pre, true);
        r.check_bool("cyclic.1-separating", anchor::cyclic1, c.separating.passed, c.separating.residual, tol);
        r.check_bool("cyclic.2-ne-in-m", anchor::cyclic2, c.ne_in_m.passed, c.ne_in_m.residual, tol);
        r.check_bool("cyclic.3-tracial", anchor::cyclic3, c.tracial.passed, c.tracial.residual, tol);
        r.check_bool("cyclic.4-jnj-in-m", anchor::cyclic4, c.jnj_in_m.passed, c.jnj_in_m.residual, tol);
        r.check_bool("cyclic.5-alpha-formula", anchor::cyclic5, c.alpha_formula.passed, c.alpha_formula.residual,
                     tol);
        if (!c.first_failure.empty())
            r.data()["cyclic"]["first_failure"] = c.first_failure;
    });
}

// ---------------------------------------------------------------------------
// central projections and recovery
// ---------------------------------------------------------------------------

inline std::string condition_slug(const std::string& name)
{
    namespace rn = recovery_names;
    static const std::vector<std::pair<const char*, const char*>> slugs = {
        {rn::pre_k, "pre-k"},           {rn::pre_cone, "pre-cone"},     {rn::cond1, "cond-1"},
        {rn::cond2, "cond-2"},          {rn::cond3, "cond-3"},          {rn::projective, "cond-4-projective"},
        {rn::cond4_rep, "cond-4-rep"},  {rn::cond4a, "cond-4a"},        {rn::cond4b, "cond-4b"},
        {rn::cond4c, "cond-4c"},        {rn::cond4d, "cond-4d"},        {rn::cond4e, "cond-4e"}};
    for (const auto& [full, slug] : slugs)
        if (name == full)
            return slug;
    return name;
}

inline void central_command(Report& r, const Scenario& s, const ConeContext& ctx, const RunOptions& o)
{
    for (const auto& [name, spec] : detail::projections_requested(s, o)) {
        const CMatrix p = resolve_projection(spec, ctx);
        const std::string base = "central." + name;
        detail::guarded(r, base, anchor::central, [&] {
            const auto c = central_detect_report(ctx, p, o.samples, o.seed);
            auto& rec = r.check_bool(base, anchor::central, c.central, c.basis_residual, ctx.tol().eq_rel);
            auto& d = r.data()["central"][name];
            d["central"] = c.central;
            d["e_blocks"] = detail::nonzero_blocks(c.e);
            d["basis_residual"] = c.basis_residual;
            d["commutation_residual"] = c.commutation_residual;
            if (!c.central) {
                rec.note = "not central";
                d["p_preserves_cone"] = c.p_check.holds;
                d["p_perp_preserves_cone"] = c.perp_check.holds;
            }
        });
    }
}

/// Condition records plus, when all pass, the reconstruction.
struct RecoveryOutcome {
    ConditionReport conditions;
    std::optional<Recovered> recovered;
    std::string error;
};

inline RecoveryOutcome run_recovery(const ConeContext& ctx, const CMatrix& p)
{
    RecoveryOutcome out;
    try {
        out.conditions = recover_conditions(ctx, p);
        if (out.conditions.all_passed)
            out.recovered = recover_projection(ctx, p, out.conditions);
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

inline void recovery_data(Report& r, const std::string& name, const ConeContext& ctx, const CMatrix& p,
                          const RecoveryOutcome& rec)
{
    auto& d = r.data()["recover"][name];
    if (const auto* f = rec.conditions.first_failure())
        d["first_failure"] = f->name;
    if (!rec.error.empty())
        d["error"] = rec.error;
    if (rec.recovered) {
        d["e"] = io::to_json(rec.recovered->e);
        d["q_blocks"] = rec.recovered->q_blocks;
        d["tie_blocks"] = rec.recovered->tie_blocks;
        try {
            const auto cor = corollary_deduce(ctx, p, *rec.recovered);
            d["fixed_point_dim"] = cor.fixed_point_dim;
            d["p_in_m"] = cor.p_in_m;
            d["note"] = cor.note;
        } catch (const Error& e) {
            d["corollary_error"] = e.what();
        }
    }
}

inline void recover_command(Report& r, const Scenario& s, const ConeContext& ctx, const RunOptions& o)
{
    for (const auto& [name, spec] : detail::projections_requested(s, o)) {
        const CMatrix p = resolve_projection(spec, ctx);
        const std::string base = "recover." + name;
        const auto rec = run_recovery(ctx, p);
        for (const auto& c : rec.conditions.records) {
            CheckRecord cr{base + "." + condition_slug(c.name), anchor::recover + c.name, c.residual, c.tolerance,
                           c.skipped ? "skipped" : (c.passed ? "pass" : "fail"), {}};
            r.add(std::move(cr));
        }
        if (rec.recovered) {
            const double t = recovery_tolerance(ctx.tol());
            r.check(base + ".identity", anchor::recover_identity, rec.recovered->identity_residual, t);
            r.check(base + ".modular-fixed", anchor::recover_sigma, rec.recovered->sigma_residual, t);
        } else if (!rec.error.empty()) {
            r.error(base + ".reconstruction", anchor::recover_identity, rec.error);
        }
        recovery_data(r, name, ctx, p, rec);
    }
}

/// Checks each named projection against the generator's expectations.
inline void projection_truth_checks(Report& r, const Scenario& s, const ConeContext& ctx, const RunOptions& o)
{
    if (!s.ground_truth.contains("projections"))
        return;
    const auto& truth = s.ground_truth["projections"];
    for (const auto& [name, spec] : s.projections) {
        if (!truth.contains(name))
            continue;
        const auto& t = truth[name];
        const CMatrix p = resolve_projection(spec, ctx);
        if (t.contains("central")) {
            const std::string cname = "central." + name + ".expected";
            detail::guarded(r, cname, anchor::central, [&] {
                const auto c = central_detect_report(ctx, p, o.samples, o.seed);
                r.check_bool(cname, anchor::central, c.central == t["central"].get<bool>(), c.basis_residual,
                             ctx.tol().eq_rel);
            });
        }
        if (!t.contains("recoverable"))
            continue;
        const auto rec = run_recovery(ctx, p);
        const std::string base = "recover." + name;
        if (!t["recoverable"].get<bool>()) {
            const auto* f = rec.conditions.first_failure();
            auto& cr = r.check_bool(base + ".rejected", anchor::rejected, f != nullptr || !rec.error.empty());
            cr.note = f ? f->name : rec.error;
            recovery_data(r, name, ctx, p, rec);
            continue;
        }
        const auto* f = rec.conditions.first_failure();
        auto& cr = r.check_bool(base + ".conditions", anchor::recover_identity, rec.recovered.has_value());
        if (f)
            cr.note = f->name;
        else if (!rec.error.empty())
            cr.note = rec.error;
        if (!rec.recovered)
            continue;
        const auto& rv = *rec.recovered;
        r.check(base + ".identity", anchor::recover_identity, rv.identity_residual, 1e-7);
        r.check(base + ".modular-fixed", anchor::recover_sigma, rv.sigma_residual, recovery_tolerance(ctx.tol()));
        const auto& spec_m = ctx.algebra().spec();
        if (t.contains("e"))
            r.check(base + ".truth-e", anchor::truth, (rv.e - io::element_from(t["e"], spec_m)).frobenius(), 1e-6);
        if (t.contains("q_blocks")) {
            const auto want = io::int_list(t["q_blocks"]);
            bool ok = true;
            for (int k = 0; k < spec_m.num_blocks(); ++k) {
                if (std::find(rv.tie_blocks.begin(), rv.tie_blocks.end(), k) != rv.tie_blocks.end())
                    continue;
                const bool got = std::find(rv.q_blocks.begin(), rv.q_blocks.end(), k) != rv.q_blocks.end();
                ok = ok && got == (std::find(want.begin(), want.end(), k) != want.end());
            }
            r.check_bool(base + ".truth-q", anchor::truth, ok);
        }
        recovery_data(r, name, ctx, p, rec);
    }
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

inline Report run(const std::string& command, const Scenario& s, const RunOptions& o)
{
    if (std::find(commands().begin(), commands().end(), command) == commands().end())
        detail::usage("unknown command: " + command);
    if (o.samples < 1)
        detail::usage("--samples must be positive");
    Report r(command);
    r.data()["seed"] = o.seed;
    r.data()["profile"] = s.profile;
    std::optional<ConeContext> ctx;
    if (!detail::guarded(r, "context", "modular data from a cyclic separating vector", [&] { ctx.emplace(s.context()); }))
        return r;

    if (command == "modular") {
        detail::Timer t(r, "modular", o.timings);
        detail::guarded(r, "modular", anchor::s_defining, [&] { modular_checks(r, *ctx); });
    } else if (command == "cone") {
        detail::Timer t(r, "cone", o.timings);
        cone_command(r, s, *ctx, o);
    } else if (command == "alpha" || command == "gen-theorem" || command == "cyclic-theorem") {
        std::optional<EmbeddingAnalysis> an;
        {
            detail::Timer t(r, "alpha", o.timings);
            an = alpha_checks(r, s, *ctx, o);
        }
        if (an && command == "gen-theorem") {
            detail::Timer t(r, "gen-theorem", o.timings);
            gen_checks(r, s, *an, o);
        }
        if (an && command == "cyclic-theorem") {
            detail::Timer t(r, "cyclic-theorem", o.timings);
            cyclic_checks(r, s, *an);
        }
    } else if (command == "central") {
        detail::Timer t(r, "central", o.timings);
        central_command(r, s, *ctx, o);
    } else if (command == "recover") {
        detail::Timer t(r, "recover", o.timings);
        recover_command(r, s, *ctx, o);
    } else {
        {
            detail::Timer t(r, "modular", o.timings);
            detail::guarded(r, "modular", anchor::s_defining, [&] { modular_checks(r, *ctx); });
        }
        {
            detail::Timer t(r, "cone", o.timings);
            detail::guarded(r, "cone.suite", anchor::pointed, [&] { cone_suite(r, *ctx, o); });
            for (const auto& [name, v] : s.vectors) {
                const auto rep = ctx->vector_to_operator(v);
                r.check("cone.representation." + name, anchor::representation,
                        detail::rel(ctx->operator_to_vector(rep), v), ctx->tol().eq_rel);
            }
        }
        if (s.n) {
            detail::Timer t(r, "embedding", o.timings);
            auto an = alpha_checks(r, s, *ctx, o);
            if (an) {
                gen_checks(r, s, *an, o);
                cyclic_checks(r, s, *an);
            }
        }
        detail::Timer t(r, "projections", o.timings);
        projection_truth_checks(r, s, *ctx, o);
    }
    return r;
}

} // namespace sharpcone

#endif
