#pragma once

#include "cleft/factor_system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cleft {

/// An element of A = (+)_pi B (x) End(V_pi), one component per catalog
/// irrep (zero components are stored explicitly; shapes are fixed by the
/// factor system).
struct GradedElement {
    std::vector<TensorElement> comp;

    GradedElement& operator+=(const GradedElement& o)
    {
        for (std::size_t i = 0; i < comp.size(); ++i)
            comp[i] += o.comp[i];
        return *this;
    }
    GradedElement& operator-=(const GradedElement& o)
    {
        for (std::size_t i = 0; i < comp.size(); ++i)
            comp[i] -= o.comp[i];
        return *this;
    }
    GradedElement& operator*=(complexd c)
    {
        for (auto& t : comp)
            t *= c;
        return *this;
    }
    double norm() const
    {
        double s = 0.0;
        for (const auto& t : comp)
            s += t.norm() * t.norm();
        return std::sqrt(s);
    }
};

inline GradedElement operator+(GradedElement a, const GradedElement& b)
{
    a += b;
    return a;
}
inline GradedElement operator-(GradedElement a, const GradedElement& b)
{
    a -= b;
    return a;
}
inline GradedElement operator*(complexd c, GradedElement a)
{
    a *= c;
    return a;
}

inline double distance(const GradedElement& a, const GradedElement& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.comp.size(); ++i) {
        double d = cleft::distance(a.comp[i], b.comp[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

/// Componentwise B-valued inner product on A.
inline BElement b_inner(const GradedElement& a, const GradedElement& b)
{
    BElement s = TensorElement::zero(a.comp.front().algebra);
    for (std::size_t i = 0; i < a.comp.size(); ++i)
        s += cleft::b_inner(a.comp[i], b.comp[i]);
    return s;
}

/// The multiplication map m(x (x) y) = omega(pi,rho) (id_pi (x) gamma_rho)(x) (1_pi (x) y)
/// landing in B (x) End(V_pi) (x) End(V_rho).
inline TensorElement mult_map(const FactorSystem& fs, const RepHandle& pi, const RepHandle& rho,
                              const TensorElement& x, const TensorElement& y)
{
    Rep r1 = pi.evaluate(fs.group);
    Rep r2 = rho.evaluate(fs.group);
    if (x.algebra != fs.algebra || x.leg_dim() != r1.dim)
        throw spec_error("mult_map: left factor does not live over (B, pi)");
    if (y.algebra != fs.algebra || y.leg_dim() != r2.dim)
        throw spec_error("mult_map: right factor does not live over (B, rho)");
    TensorElement w = extend_omega(fs, pi, rho);
    TensorElement gx = apply_to_b_factor(extend_gamma(fs, rho), reshape_legs(x, {r1.dim}));
    TensorElement ya = amplify(reshape_legs(y, {r2.dim}), 0, r1.dim);
    return w * gx * ya;
}

/// The reconstructed C*-dynamical system: cached decompositions, dense
/// structure constants, the involution, the G-action and the Gram matrix
/// of the faithful scalar form.
class ConstructedSystem {
public:
    FactorSystem fs;
    std::vector<int> comp_vec_dim;
    std::vector<int> comp_offset;
    int total_dim = 0;

    std::vector<Decomposition> pair_dec;  // (p,r) -> decomposition of pi (x) rho
    std::vector<cmat> constants;          // (p*k+r)*k+s -> comp_s x (comp_p * comp_r)
    std::vector<cmat> involution_mat;     // p -> comp_{dual(p)} x comp_p, applied to conjugated coords
    std::vector<std::vector<cmat>> action_mat; // g, p -> comp_p x comp_p
    std::vector<cmat> gram;               // p -> Hermitian positive definite

    int irrep_count() const { return fs.irrep_count(); }

    GradedElement zero() const
    {
        GradedElement a;
        for (int p = 0; p < irrep_count(); ++p)
            a.comp.push_back(TensorElement::zero(fs.algebra, {fs.group.irreps[p].dim}));
        return a;
    }

    GradedElement unit() const
    {
        GradedElement a = zero();
        a.comp[fs.group.trivial_index] = TensorElement::identity(fs.algebra, {1});
        return a;
    }

    /// Element with a single component.
    GradedElement embed(int p, TensorElement x) const
    {
        GradedElement a = zero();
        a.comp[p] = reshape_legs(std::move(x), {fs.group.irreps[p].dim});
        return a;
    }

    GradedElement basis_element(int global_index) const
    {
        GradedElement a = zero();
        for (int p = 0; p < irrep_count(); ++p)
            if (global_index < comp_offset[p] + comp_vec_dim[p]) {
                a.comp[p] = unvec(fs.algebra, {fs.group.irreps[p].dim},
                                  cvec::Unit(comp_vec_dim[p], global_index - comp_offset[p]));
                return a;
            }
        throw spec_error("basis_element: index out of range");
    }

    cvec to_vec(const GradedElement& a) const
    {
        cvec v(total_dim);
        for (int p = 0; p < irrep_count(); ++p)
            v.segment(comp_offset[p], comp_vec_dim[p]) = vec(a.comp[p]);
        return v;
    }

    GradedElement from_vec(const cvec& v) const
    {
        GradedElement a = zero();
        for (int p = 0; p < irrep_count(); ++p)
            a.comp[p] = unvec(fs.algebra, {fs.group.irreps[p].dim}, v.segment(comp_offset[p], comp_vec_dim[p]));
        return a;
    }

    /// The graded product via the cached structure constants.
    GradedElement bullet(const GradedElement& x, const GradedElement& y) const
    {
        const int k = irrep_count();
        GradedElement out = zero();
        std::vector<cvec> xs(k), ys(k);
        for (int p = 0; p < k; ++p) {
            xs[p] = vec(x.comp[p]);
            ys[p] = vec(y.comp[p]);
        }
        for (int p = 0; p < k; ++p) {
            if (xs[p].norm() == 0.0)
                continue;
            for (int r = 0; r < k; ++r) {
                if (ys[r].norm() == 0.0)
                    continue;
                cvec pair(comp_vec_dim[p] * comp_vec_dim[r]);
                for (int a = 0; a < comp_vec_dim[p]; ++a)
                    pair.segment(a * comp_vec_dim[r], comp_vec_dim[r]) = xs[p](a) * ys[r];
                for (int s = 0; s < k; ++s) {
                    const cmat& m = constants[(p * k + r) * k + s];
                    if (m.size() == 0)
                        continue;
                    out.comp[s] += unvec(fs.algebra, {fs.group.irreps[s].dim}, m * pair);
                }
            }
        }
        return out;
    }

    /// The antilinear involution J.
    GradedElement involve(const GradedElement& x) const
    {
        GradedElement out = zero();
        for (int p = 0; p < irrep_count(); ++p) {
            int t = fs.group.dual_index[p];
            out.comp[t] += unvec(fs.algebra, {fs.group.irreps[t].dim},
                                 involution_mat[p] * vec(x.comp[p]).conjugate());
        }
        return out;
    }

    /// U_g: componentwise right multiplication by 1 (x) pi_g^*.
    GradedElement act(int g, const GradedElement& x) const
    {
        GradedElement out = zero();
        for (int p = 0; p < irrep_count(); ++p)
            out.comp[p] = unvec(fs.algebra, {fs.group.irreps[p].dim}, action_mat[g][p] * vec(x.comp[p]));
        return out;
    }

    /// Projection onto the fixed-point copy of B.
    BElement p0(const GradedElement& x) const
    {
        return reshape_legs(x.comp[fs.group.trivial_index], {});
    }

    complexd scalar_form(const GradedElement& x, const GradedElement& y) const
    {
        return faithful_state(b_inner(x, y));
    }
};

/// x bullet y without a prebuilt system (decompositions are computed on
/// the fly). The components of x and y must be shaped for fs.
inline GradedElement bullet(const FactorSystem& fs, const GradedElement& x, const GradedElement& y)
{
    const int k = fs.irrep_count();
    GradedElement out;
    for (int s = 0; s < k; ++s)
        out.comp.push_back(TensorElement::zero(fs.algebra, {fs.group.irreps[s].dim}));
    for (int p = 0; p < k; ++p) {
        if (x.comp[p].norm() == 0.0)
            continue;
        for (int r = 0; r < k; ++r) {
            if (y.comp[r].norm() == 0.0)
                continue;
            Rep prod = tensor_rep(rep_of(fs.group.irreps[p]), rep_of(fs.group.irreps[r]));
            TensorElement m = mult_map(fs, RepHandle::atom(fs.group.irreps[p].label),
                                       RepHandle::atom(fs.group.irreps[r].label), x.comp[p], y.comp[r]);
            Decomposition dec = decompose(fs.group, prod);
            for (const IntertwinerBasis& part : dec.parts) {
                if (part.count() == 0)
                    continue;
                out.comp[part.sigma] += isotypic_project(part, reshape_legs(m, {prod.dim}));
            }
        }
    }
    return out;
}

/// Builds the full system. Refuses (verification_error) if the factor
/// system does not verify or the Gram matrix is not positive definite.
inline ConstructedSystem build_system(const FactorSystem& fs, const Tolerances& tol = {},
                                      bool skip_verification = false)
{
    if (!skip_verification) {
        VerificationReport rep = verify_factor_system(fs, tol);
        if (!rep.pass)
            throw verification_error("factor system failed verification at '" + rep.first_failure +
                                     "' (residual " + std::to_string(rep.max_failing_residual) + ")");
    } else {
        fs.require_well_formed();
    }

    ConstructedSystem sys;
    sys.fs = fs;
    const int k = fs.irrep_count();
    const GroupData& gd = fs.group;

    for (int p = 0; p < k; ++p) {
        sys.comp_offset.push_back(sys.total_dim);
        sys.comp_vec_dim.push_back(te_vec_dim(fs.algebra, {gd.irreps[p].dim}));
        sys.total_dim += sys.comp_vec_dim.back();
    }

    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r)
            sys.pair_dec.push_back(
                decompose(gd, tensor_rep(rep_of(gd.irreps[p]), rep_of(gd.irreps[r])), false, tol));

    // structure constants
    sys.constants.assign(static_cast<std::size_t>(k) * k * k, cmat());
    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r) {
            const Decomposition& dec = sys.pair_dec[p * k + r];
            const int dp = gd.irreps[p].dim, dr = gd.irreps[r].dim;
            std::vector<cmat> mats(k);
            for (int s = 0; s < k; ++s)
                if (dec.parts[s].count() > 0)
                    mats[s] = cmat::Zero(sys.comp_vec_dim[s], sys.comp_vec_dim[p] * sys.comp_vec_dim[r]);
            for (int a = 0; a < sys.comp_vec_dim[p]; ++a) {
                TensorElement ea = unvec(fs.algebra, {dp}, cvec::Unit(sys.comp_vec_dim[p], a));
                TensorElement gx = apply_to_b_factor(fs.gamma[r], ea);
                for (int b = 0; b < sys.comp_vec_dim[r]; ++b) {
                    TensorElement eb = unvec(fs.algebra, {dr}, cvec::Unit(sys.comp_vec_dim[r], b));
                    TensorElement m = fs.omega_at(p, r) * gx * amplify(eb, 0, dp);
                    TensorElement merged = reshape_legs(m, {dp * dr});
                    for (int s = 0; s < k; ++s) {
                        if (dec.parts[s].count() == 0)
                            continue;
                        mats[s].col(a * sys.comp_vec_dim[r] + b) = vec(isotypic_project(dec.parts[s], merged));
                    }
                }
            }
            for (int s = 0; s < k; ++s)
                sys.constants[(p * k + r) * k + s] = std::move(mats[s]);
        }

    // action matrices
    sys.action_mat.resize(gd.group.order);
    for (int g = 0; g < gd.group.order; ++g)
        for (int p = 0; p < k; ++p) {
            const int d = gd.irreps[p].dim;
            cmat ug(sys.comp_vec_dim[p], sys.comp_vec_dim[p]);
            cmat piginv = gd.irreps[p].matrices[g].adjoint();
            for (int a = 0; a < sys.comp_vec_dim[p]; ++a) {
                TensorElement ea = unvec(fs.algebra, {d}, cvec::Unit(sys.comp_vec_dim[p], a));
                ug.col(a) = vec(leg_mul_right(ea, piginv));
            }
            sys.action_mat[g].push_back(std::move(ug));
        }

    // Gram matrices of the scalar form, per component
    double min_eig = 1e300, max_eig = 0.0;
    for (int p = 0; p < k; ++p) {
        const int n = sys.comp_vec_dim[p];
        cmat g(n, n);
        for (int a = 0; a < n; ++a) {
            TensorElement ea = unvec(fs.algebra, {gd.irreps[p].dim}, cvec::Unit(n, a));
            for (int b = 0; b < n; ++b) {
                TensorElement eb = unvec(fs.algebra, {gd.irreps[p].dim}, cvec::Unit(n, b));
                g(a, b) = scalar_inner(ea, eb);
            }
        }
        Eigen::SelfAdjointEigenSolver<cmat> es(g);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        max_eig = std::max(max_eig, es.eigenvalues().maxCoeff());
        sys.gram.push_back(std::move(g));
    }
    if (min_eig <= 1e-12 * std::max(max_eig, 1.0))
        throw verification_error("construction: scalar Gram matrix is not positive definite");

    // involution by linear solve against <J(x), y> = P_0(x bullet y)
    for (int p = 0; p < k; ++p) {
        const int t = gd.dual_index[p];
        cmat jm(sys.comp_vec_dim[t], sys.comp_vec_dim[p]);
        Eigen::LDLT<cmat> solver(sys.gram[t]);
        for (int a = 0; a < sys.comp_vec_dim[p]; ++a) {
            GradedElement ea = sys.basis_element(sys.comp_offset[p] + a);
            cvec rhs(sys.comp_vec_dim[t]);
            for (int l = 0; l < sys.comp_vec_dim[t]; ++l) {
                GradedElement fl = sys.basis_element(sys.comp_offset[t] + l);
                rhs(l) = faithful_state(sys.p0(sys.bullet(ea, fl)));
            }
            jm.col(a) = solver.solve(rhs.conjugate());
        }
        sys.involution_mat.push_back(std::move(jm));
    }
    return sys;
}

/// U_g applied to a graded element (builds nothing, uses the cached
/// matrices of sys).
inline GradedElement action_orbit(const ConstructedSystem& sys, int g, const GradedElement& a)
{
    return sys.act(g, a);
}

/// The antilinear involution J of the constructed algebra.
inline GradedElement involution(const ConstructedSystem& sys, const GradedElement& a)
{
    return sys.involve(a);
}

/// Closed-form involution: J(x) = (L_x^adj o m_{pi, dual}^adj)(p_pi),
/// evaluated against the catalog dual. Reference path used to cross-check
/// the solver-based involution on small systems.
inline GradedElement involution_closed_form(const ConstructedSystem& sys, const GradedElement& x)
{
    const FactorSystem& fs = sys.fs;
    const GroupData& gd = fs.group;
    GradedElement out = sys.zero();
    for (int p = 0; p < sys.irrep_count(); ++p) {
        if (x.comp[p].norm() == 0.0)
            continue;
        const int t = gd.dual_index[p];
        const int d = gd.irreps[p].dim;
        Rep prod = tensor_rep(rep_of(gd.irreps[p]), rep_of(gd.irreps[t]));
        IntertwinerBasis triv = intertwiner_basis(gd, gd.trivial_index, prod);
        if (triv.count() != 1)
            throw consistency_error("involution: trivial component of pi (x) dual(pi) is not simple");
        TensorElement p_pi = reshape_legs(isotypic_coproject(triv, TensorElement::identity(fs.algebra, {1})),
                                          {d, gd.irreps[t].dim});
        TensorElement gx = apply_to_b_factor(fs.gamma[t], x.comp[p]);
        TensorElement prod_elt = gx.adjoint() * fs.omega_at(p, t).adjoint() * p_pi;
        TensorElement jt = trace_legs(prod_elt, {0});
        jt *= 1.0 / d;
        out.comp[t] += jt;
    }
    return out;
}

/// Surjectivity of the multiplication map m_{pi, dual(pi)}: under the
/// canonical identification of the balanced tensor product with
/// B (x) End(V_pi (x) V_dual), m acts as left multiplication by
/// omega(pi, dual(pi)); full numerical rank of that operator is returned.
inline bool freeness_rank_test(const ConstructedSystem& sys, int p)
{
    const FactorSystem& fs = sys.fs;
    const int t = fs.group.dual_index[p];
    const TensorElement& w = fs.omega_at(p, t);
    TensorElement merged = reshape_legs(w, {w.leg_dim()});
    const int n = te_vec_dim(fs.algebra, merged.legs);
    cmat op(n, n);
    for (int a = 0; a < n; ++a) {
        TensorElement ea = unvec(fs.algebra, merged.legs, cvec::Unit(n, a));
        op.col(a) = vec(merged * ea);
    }
    return numerical_rank(op, 1e-7) == n;
}

namespace detail {

/// Full-vector matrix of left multiplication by b (over the graded basis).
inline cmat left_mult_operator(const ConstructedSystem& sys, const GradedElement& b)
{
    cmat m(sys.total_dim, sys.total_dim);
    for (int a = 0; a < sys.total_dim; ++a)
        m.col(a) = sys.to_vec(sys.bullet(b, sys.basis_element(a)));
    return m;
}

inline cmat right_mult_operator(const ConstructedSystem& sys, const GradedElement& b)
{
    cmat m(sys.total_dim, sys.total_dim);
    for (int a = 0; a < sys.total_dim; ++a)
        m.col(a) = sys.to_vec(sys.bullet(sys.basis_element(a), b));
    return m;
}

inline cmat full_action_operator(const ConstructedSystem& sys, int g)
{
    cmat m = cmat::Zero(sys.total_dim, sys.total_dim);
    for (int p = 0; p < sys.irrep_count(); ++p)
        m.block(sys.comp_offset[p], sys.comp_offset[p], sys.comp_vec_dim[p], sys.comp_vec_dim[p]) =
            sys.action_mat[g][p];
    return m;
}

} // namespace detail

/// Dimension of the center of (A, bullet), by the nullspace of the stacked
/// commutator operators.
inline int center_dimension(const ConstructedSystem& sys)
{
    cmat stacked(sys.total_dim * sys.total_dim, sys.total_dim);
    for (int b = 0; b < sys.total_dim; ++b) {
        GradedElement eb = sys.basis_element(b);
        stacked.middleRows(b * sys.total_dim, sys.total_dim) =
            detail::left_mult_operator(sys, eb) - detail::right_mult_operator(sys, eb);
    }
    return sys.total_dim - numerical_rank(stacked, 1e-9);
}

/// Largest commutator norm over basis pairs; zero for commutative A.
inline double max_commutator(const ConstructedSystem& sys)
{
    double worst = 0.0;
    for (int a = 0; a < sys.total_dim; ++a) {
        GradedElement ea = sys.basis_element(a);
        for (int b = a + 1; b < sys.total_dim; ++b) {
            GradedElement eb = sys.basis_element(b);
            worst = std::max(worst, distance(sys.bullet(ea, eb), sys.bullet(eb, ea)));
        }
    }
    return worst;
}

/// Dimensions dim(e_i A) for the minimal central projections e_i, sorted
/// descending; for A = (+)_i M_{n_i} these are the squares n_i^2.
inline std::vector<int> central_block_dims(const ConstructedSystem& sys)
{
    const int c = center_dimension(sys);
    if (c == 1)
        return {sys.total_dim};

    // center basis from the commutator nullspace
    cmat stacked(sys.total_dim * sys.total_dim, sys.total_dim);
    for (int b = 0; b < sys.total_dim; ++b) {
        GradedElement eb = sys.basis_element(b);
        stacked.middleRows(b * sys.total_dim, sys.total_dim) =
            detail::left_mult_operator(sys, eb) - detail::right_mult_operator(sys, eb);
    }
    Eigen::JacobiSVD<cmat> svd(stacked, Eigen::ComputeFullV);
    cmat zbasis = svd.matrixV().rightCols(c);

    // full Gram for the orthonormalizing change of basis
    cmat gram = cmat::Zero(sys.total_dim, sys.total_dim);
    for (int p = 0; p < sys.irrep_count(); ++p)
        gram.block(sys.comp_offset[p], sys.comp_offset[p], sys.comp_vec_dim[p], sys.comp_vec_dim[p]) =
            sys.gram[p];
    Eigen::SelfAdjointEigenSolver<cmat> ges(gram);
    cmat sqrt_g = ges.operatorSqrt();
    cmat inv_sqrt_g = ges.operatorInverseSqrt();

    for (std::uint64_t seed : {404u, 808u}) {
        Rng rng(seed);
        GradedElement h = sys.zero();
        for (int j = 0; j < c; ++j) {
            GradedElement z = sys.from_vec(zbasis.col(j));
            h += complexd(rng.gaussian(), rng.gaussian()) * z;
        }
        GradedElement h_sa = h + sys.involve(h); // self-adjoint central element
        cmat op = sqrt_g * detail::left_mult_operator(sys, h_sa) * inv_sqrt_g;
        Eigen::SelfAdjointEigenSolver<cmat> es((cmat((op + op.adjoint()) / 2.0)));
        const auto& ev = es.eigenvalues();
        double scale = std::max(std::abs(ev(0)), std::abs(ev(sys.total_dim - 1)));
        if (scale == 0.0)
            continue;
        std::vector<int> dims;
        int run = 1;
        for (int i = 1; i < sys.total_dim; ++i) {
            if (ev(i) - ev(i - 1) > 1e-6 * scale) {
                dims.push_back(run);
                run = 1;
            } else {
                ++run;
            }
        }
        dims.push_back(run);
        if (static_cast<int>(dims.size()) == c) {
            std::sort(dims.rbegin(), dims.rend());
            return dims;
        }
        // eigenvalue collision for this combination; retry with new weights
    }
    throw consistency_error("central_block_dims: could not separate central spectral projections");
}

/// Runs the identity suite of the constructed system.
///   (a) associativity on all structure-constant basis triples
///   (b) the adjoint-form associativity identity on basis inputs
///   (c) <J(x) bullet y, z> = <y, x bullet z>
///   (d) <x,y> = P_0(J(x) bullet y)
///   (e) J o J = id and J(x bullet y) = J(y) bullet J(x)
///   (f) positive definiteness of the scalar Gram form
///   (g) the group average of the action is the projection onto B, and
///       isotypic projections match the graded components
inline VerificationReport verify_construction(const ConstructedSystem& sys, const Tolerances& tol = {},
                                              int random_samples = 20, std::uint64_t seed = 12345)
{
    VerificationReport rep;
    const double t = tol.algebraic;
    const FactorSystem& fs = sys.fs;
    const int k = sys.irrep_count();
    const int n = sys.total_dim;

    // (a) associativity over basis triples
    {
        double worst = 0.0;
        std::vector<GradedElement> basis;
        for (int a = 0; a < n; ++a)
            basis.push_back(sys.basis_element(a));
        std::vector<std::vector<GradedElement>> products(n, std::vector<GradedElement>());
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                products[a].push_back(sys.bullet(basis[a], basis[b]));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    worst = std::max(worst,
                                     distance(sys.bullet(products[a][b], basis[c]),
                                              sys.bullet(basis[a], products[b][c])));
        rep.add("associativity (basis triples)", worst, t);
    }

    // (b) adjoint-form associativity on basis inputs, per catalog triple
    {
        double worst = 0.0;
        for (int p = 0; p < k; ++p)
            for (int r = 0; r < k; ++r)
                for (int s = 0; s < k; ++s) {
                    const int dp = fs.group.irreps[p].dim;
                    const int dr = fs.group.irreps[r].dim;
                    const int ds = fs.group.irreps[s].dim;
                    TensorElement lhs_op = amplify(fs.omega_at(r, s), 0, dp) *
                                           apply_to_b_factor(fs.gamma[s], fs.omega_at(p, r)).adjoint();
                    Rep r12 = tensor_rep(rep_of(fs.group.irreps[p]), rep_of(fs.group.irreps[r]));
                    Rep r23 = tensor_rep(rep_of(fs.group.irreps[r]), rep_of(fs.group.irreps[s]));
                    TensorElement rhs_op =
                        reshape_legs(extend_omega(fs, rep_of(fs.group.irreps[p]), r23), {dp, dr, ds}).adjoint() *
                        reshape_legs(extend_omega(fs, r12, rep_of(fs.group.irreps[s])), {dp, dr, ds});
                    const int m = te_vec_dim(fs.algebra, {dp, dr, ds});
                    for (int a = 0; a < m; ++a) {
                        TensorElement x = unvec(fs.algebra, {dp, dr, ds}, cvec::Unit(m, a));
                        worst = std::max(worst, distance(lhs_op * x, rhs_op * x));
                    }
                }
        rep.add("adjoint associativity identity", worst, t);
    }

    // random samples for (a), (c), (e)
    Rng rng(seed);
    auto random_graded = [&]() {
        GradedElement x = sys.zero();
        for (int p = 0; p < k; ++p) {
            const int d = fs.group.irreps[p].dim;
            for (std::size_t i = 0; i < x.comp[p].blocks.size(); ++i)
                x.comp[p].blocks[i] = rng.cgaussian_matrix(fs.algebra.blocks[i] * d, fs.algebra.blocks[i] * d);
        }
        return x;
    };

    {
        double assoc = 0.0, adjrel = 0.0, antimult = 0.0;
        for (int trial = 0; trial < random_samples; ++trial) {
            GradedElement x = random_graded(), y = random_graded(), z = random_graded();
            assoc = std::max(assoc, distance(sys.bullet(sys.bullet(x, y), z), sys.bullet(x, sys.bullet(y, z))) /
                                        (1.0 + x.norm() * y.norm() * z.norm()));
            adjrel = std::max(adjrel, cleft::distance(b_inner(sys.bullet(sys.involve(x), y), z),
                                                      b_inner(y, sys.bullet(x, z))) /
                                          (1.0 + x.norm() * y.norm() * z.norm()));
            antimult = std::max(antimult, distance(sys.involve(sys.bullet(x, y)),
                                                   sys.bullet(sys.involve(y), sys.involve(x))) /
                                              (1.0 + x.norm() * y.norm()));
        }
        rep.add("associativity (random samples)", assoc, t);
        rep.add("adjoint relation (random samples)", adjrel, t);
        rep.add("involution anti-multiplicative (random samples)", antimult, t);
    }

    // (c) adjoint relation and (d) inner product recovery over basis pairs
    {
        double adjrel = 0.0;
        double recover = 0.0;
        double jj = 0.0;
        double antimult = 0.0;
        std::vector<GradedElement> basis;
        std::vector<GradedElement> jbasis;
        for (int a = 0; a < n; ++a) {
            basis.push_back(sys.basis_element(a));
            jbasis.push_back(sys.involve(basis.back()));
        }
        for (int a = 0; a < n; ++a) {
            jj = std::max(jj, distance(sys.involve(jbasis[a]), basis[a]));
            for (int b = 0; b < n; ++b) {
                recover = std::max(recover, cleft::distance(b_inner(basis[a], basis[b]),
                                                            sys.p0(sys.bullet(jbasis[a], basis[b]))));
                antimult = std::max(antimult, distance(sys.involve(sys.bullet(basis[a], basis[b])),
                                                       sys.bullet(jbasis[b], jbasis[a])));
            }
        }
        for (int a = 0; a < n && a < 12; ++a)
            for (int b = 0; b < n && b < 12; ++b)
                for (int c = 0; c < n && c < 12; ++c)
                    adjrel = std::max(adjrel, cleft::distance(b_inner(sys.bullet(jbasis[a], basis[b]), basis[c]),
                                                              b_inner(basis[b], sys.bullet(basis[a], basis[c]))));
        rep.add("adjoint relation (basis)", adjrel, t);
        rep.add("inner product = P0(J(x) bullet y)", recover, t);
        rep.add("involution is an involution", jj, t);
        rep.add("involution anti-multiplicative (basis)", antimult, t);
    }

    // (f) Gram positivity
    {
        double min_eig = 1e300, max_eig = 0.0;
        for (const cmat& g : sys.gram) {
            Eigen::SelfAdjointEigenSolver<cmat> es(g);
            min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
            max_eig = std::max(max_eig, es.eigenvalues().maxCoeff());
        }
        rep.add("gram positive definite", std::max(0.0, 1e-6 * max_eig - min_eig), t);
    }

    // (g) fixed points and isotypic identification
    {
        cmat avg = cmat::Zero(n, n);
        for (int g = 0; g < fs.group.group.order; ++g)
            avg += detail::full_action_operator(sys, g);
        avg /= static_cast<double>(fs.group.group.order);
        cmat p0 = cmat::Zero(n, n);
        const int one = fs.group.trivial_index;
        for (int i = 0; i < sys.comp_vec_dim[one]; ++i)
            p0(sys.comp_offset[one] + i, sys.comp_offset[one] + i) = 1.0;
        rep.add("group average equals fixed-point projection", frob_diff(avg, p0), t);

        double worst = 0.0;
        for (int p = 0; p < k; ++p) {
            cmat proj = cmat::Zero(n, n);
            for (int g = 0; g < fs.group.group.order; ++g)
                proj += std::conj(fs.group.irreps[p].character(g)) * detail::full_action_operator(sys, g);
            proj *= static_cast<double>(fs.group.irreps[p].dim) / fs.group.group.order;
            const int tgt = fs.group.dual_index[p];
            cmat expected = cmat::Zero(n, n);
            for (int i = 0; i < sys.comp_vec_dim[tgt]; ++i)
                expected(sys.comp_offset[tgt] + i, sys.comp_offset[tgt] + i) = 1.0;
            worst = std::max(worst, frob_diff(proj, expected));
        }
        rep.add("isotypic projections match graded components", worst, t);
    }

    // the action consists of *-automorphisms
    {
        double worst = 0.0;
        for (int g = 0; g < fs.group.group.order; ++g) {
            GradedElement x = random_graded(), y = random_graded();
            worst = std::max(worst, distance(sys.act(g, sys.bullet(x, y)),
                                             sys.bullet(sys.act(g, x), sys.act(g, y))) /
                                        (1.0 + x.norm() * y.norm()));
            worst = std::max(worst,
                             distance(sys.act(g, sys.involve(x)), sys.involve(sys.act(g, x))) / (1.0 + x.norm()));
        }
        rep.add("action consists of *-automorphisms", worst, t);
    }

    return rep;
}

/// Recovers the factor system from the constructed algebra via the
/// canonical flip isometries s_pi = 1_B (x) F in A (x) End(V_pi).
class GradedMat {
public:
    int legdim = 0;
    std::vector<GradedElement> e; // row-major legdim x legdim

    static GradedMat zero(const ConstructedSystem& sys, int legdim)
    {
        GradedMat m;
        m.legdim = legdim;
        m.e.assign(static_cast<std::size_t>(legdim) * legdim, sys.zero());
        return m;
    }

    const GradedElement& at(int i, int j) const { return e[i * legdim + j]; }
    GradedElement& at(int i, int j) { return e[i * legdim + j]; }

    double norm() const
    {
        double s = 0.0;
        for (const auto& g : e)
            s += g.norm() * g.norm();
        return std::sqrt(s);
    }
};

inline GradedMat gm_mul(const ConstructedSystem& sys, const GradedMat& a, const GradedMat& b)
{
    GradedMat out = GradedMat::zero(sys, a.legdim);
    for (int i = 0; i < a.legdim; ++i)
        for (int j = 0; j < a.legdim; ++j)
            for (int l = 0; l < a.legdim; ++l)
                out.at(i, j) += sys.bullet(a.at(i, l), b.at(l, j));
    return out;
}

inline GradedMat gm_adjoint(const ConstructedSystem& sys, const GradedMat& a)
{
    GradedMat out = GradedMat::zero(sys, a.legdim);
    for (int i = 0; i < a.legdim; ++i)
        for (int j = 0; j < a.legdim; ++j)
            out.at(i, j) = sys.involve(a.at(j, i));
    return out;
}

inline GradedMat gm_sub(const GradedMat& a, const GradedMat& b)
{
    GradedMat out = a;
    for (std::size_t i = 0; i < out.e.size(); ++i)
        out.e[i] -= b.e[i];
    return out;
}

/// Identity on the extra leg tensored with a graded element.
inline GradedMat gm_scalar(const ConstructedSystem& sys, const GradedElement& a, int legdim)
{
    GradedMat m = GradedMat::zero(sys, legdim);
    for (int i = 0; i < legdim; ++i)
        m.at(i, i) = a;
    return m;
}

/// Insert an identity extra-leg factor before (pos = 0) or after (pos = 1)
/// the existing leg.
inline GradedMat gm_amplify(const ConstructedSystem& sys, const GradedMat& a, int pos, int dim)
{
    GradedMat out = GradedMat::zero(sys, a.legdim * dim);
    for (int i = 0; i < a.legdim; ++i)
        for (int j = 0; j < a.legdim; ++j)
            for (int w = 0; w < dim; ++w) {
                int row = pos == 0 ? w * a.legdim + i : i * dim + w;
                int col = pos == 0 ? w * a.legdim + j : j * dim + w;
                out.at(row, col) = a.at(i, j);
            }
    return out;
}

/// sum over the conjugation (1 (x) u) a (1 (x) u)* for a rectangular
/// isometry u on the extra leg.
inline GradedMat gm_expand(const ConstructedSystem& sys, const GradedMat& a, const cmat& u, int new_legdim)
{
    GradedMat out = GradedMat::zero(sys, new_legdim);
    for (int i = 0; i < new_legdim; ++i)
        for (int j = 0; j < new_legdim; ++j)
            for (int c = 0; c < a.legdim; ++c)
                for (int d = 0; d < a.legdim; ++d) {
                    complexd coeff = u(i, c) * std::conj(u(j, d));
                    if (coeff == complexd(0.0))
                        continue;
                    out.at(i, j) += coeff * a.at(c, d);
                }
    return out;
}

/// The canonical non-degenerate isometry s_pi = 1_B (x) F concentrated on
/// the pi summand.
inline GradedMat canonical_isometry(const ConstructedSystem& sys, int p)
{
    const int d = sys.fs.group.irreps[p].dim;
    GradedMat s = GradedMat::zero(sys, d);
    for (int u = 0; u < d; ++u)
        for (int v = 0; v < d; ++v) {
            cmat unit = cmat::Zero(d, d);
            unit(v, u) = 1.0;
            s.at(u, v) = sys.embed(p, tensor_with(TensorElement::identity(sys.fs.algebra), unit, {d}));
        }
    return s;
}

/// Extension of the canonical isometries to a tensor product rep along an
/// orthonormal intertwiner decomposition.
inline GradedMat canonical_isometry(const ConstructedSystem& sys, const Rep& rep)
{
    Decomposition dec = decompose(sys.fs.group, rep);
    GradedMat out = GradedMat::zero(sys, rep.dim);
    for (const IntertwinerBasis& part : dec.parts) {
        if (part.count() == 0)
            continue;
        GradedMat s = canonical_isometry(sys, part.sigma);
        for (const cmat& v : part.isometries) {
            GradedMat expanded = gm_expand(sys, s, v, rep.dim);
            for (std::size_t i = 0; i < out.e.size(); ++i)
                out.e[i] += expanded.e[i];
        }
    }
    return out;
}

struct RecoveryCertificate {
    double isometry_residual = 0.0;       // s* s = 1
    double membership_residual = 0.0;     // s_pi lies in A_2(pi)
    double nondegeneracy_residual = 0.0;  // s s* x = x on A_2(pi)
    double concentration_residual = 0.0;  // recovered data sits on the expected components
};

/// Recomputes (gamma, omega) inside the constructed system from the
/// canonical isometries; certifies non-degeneracy along the way.
inline FactorSystem recover_factor_system(const ConstructedSystem& sys, RecoveryCertificate* cert_out = nullptr,
                                          const Tolerances& tol = {})
{
    const FactorSystem& fs = sys.fs;
    const GroupData& gd = fs.group;
    const int k = sys.irrep_count();
    RecoveryCertificate cert;

    FactorSystem out;
    out.group = gd;
    out.algebra = fs.algebra;

    std::vector<GradedMat> s(k);
    for (int p = 0; p < k; ++p) {
        s[p] = canonical_isometry(sys, p);
        const int d = gd.irreps[p].dim;

        // s* s = 1
        GradedMat prod = gm_mul(sys, gm_adjoint(sys, s[p]), s[p]);
        GradedMat one = gm_scalar(sys, sys.unit(), d);
        cert.isometry_residual = std::max(cert.isometry_residual, gm_sub(prod, one).norm());

        // membership and non-degeneracy on A_2(pi) via the averaged
        // projection Q = avg_g (pi_g (x) U_g)
        const int vdim = d * d * sys.total_dim;
        auto gm_vec = [&](const GradedMat& m) {
            cvec v(vdim);
            for (int i = 0; i < d * d; ++i)
                v.segment(i * sys.total_dim, sys.total_dim) = sys.to_vec(m.e[i]);
            return v;
        };
        cmat q = cmat::Zero(vdim, vdim);
        for (int g = 0; g < gd.group.order; ++g) {
            cmat legpart = kron(gd.irreps[p].matrices[g], cmat::Identity(d, d));
            q += kron(legpart, detail::full_action_operator(sys, g));
        }
        q /= static_cast<double>(gd.group.order);
        cvec sv = gm_vec(s[p]);
        cert.membership_residual = std::max(cert.membership_residual, (q * sv - sv).norm());

        GradedMat ss = gm_mul(sys, s[p], gm_adjoint(sys, s[p]));
        cmat lss(vdim, vdim);
        for (int col = 0; col < vdim; ++col) {
            GradedMat z = GradedMat::zero(sys, d);
            cvec unit = cvec::Unit(vdim, col);
            for (int i = 0; i < d * d; ++i)
                z.e[i] = sys.from_vec(unit.segment(i * sys.total_dim, sys.total_dim));
            lss.col(col) = gm_vec(gm_mul(sys, ss, z));
        }
        cert.nondegeneracy_residual = std::max(cert.nondegeneracy_residual, frob((lss * q) - q));
    }

    // gamma_pi(b) = s_pi* (b (x) 1) s_pi
    const int one = gd.trivial_index;
    for (int p = 0; p < k; ++p) {
        const int d = gd.irreps[p].dim;
        const GradedMat sadj = gm_adjoint(sys, s[p]);
        out.gamma.push_back(BLinearMap::from_function(fs.algebra, fs.algebra, {d}, [&](const BElement& b) {
            GradedElement bg = sys.zero();
            bg.comp[one] = reshape_legs(b, {1});
            GradedMat mid = gm_mul(sys, gm_mul(sys, sadj, gm_scalar(sys, bg, d)), s[p]);
            TensorElement res = TensorElement::zero(fs.algebra, {d});
            for (int u = 0; u < d; ++u)
                for (int v = 0; v < d; ++v) {
                    GradedElement entry = mid.at(u, v);
                    cmat unit = cmat::Zero(d, d);
                    unit(u, v) = 1.0;
                    res += tensor_with(reshape_legs(entry.comp[one], {}), unit, {d});
                    // everything outside the trivial summand must vanish
                    double off = 0.0;
                    for (int q2 = 0; q2 < k; ++q2)
                        if (q2 != one)
                            off += entry.comp[q2].norm() * entry.comp[q2].norm();
                    cert.concentration_residual = std::max(cert.concentration_residual, std::sqrt(off));
                }
            return res;
        }));
    }

    // omega(pi,rho) = s_{pi (x) rho}* (s_pi)_12 (s_rho)_13
    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r) {
            const int dp = gd.irreps[p].dim;
            const int dr = gd.irreps[r].dim;
            Rep prod = tensor_rep(rep_of(gd.irreps[p]), rep_of(gd.irreps[r]));
            GradedMat s12 = gm_amplify(sys, s[p], 1, dr);
            GradedMat s13 = gm_amplify(sys, s[r], 0, dp);
            GradedMat sprod = canonical_isometry(sys, prod);
            GradedMat w = gm_mul(sys, gm_adjoint(sys, sprod), gm_mul(sys, s12, s13));
            TensorElement res = TensorElement::zero(fs.algebra, {dp, dr});
            for (int u = 0; u < dp * dr; ++u)
                for (int v = 0; v < dp * dr; ++v) {
                    GradedElement entry = w.at(u, v);
                    cmat unit = cmat::Zero(dp * dr, dp * dr);
                    unit(u, v) = 1.0;
                    res += reshape_legs(tensor_with(reshape_legs(entry.comp[one], {}), unit, {dp * dr}),
                                        {dp, dr});
                    double off = 0.0;
                    for (int q2 = 0; q2 < k; ++q2)
                        if (q2 != one)
                            off += entry.comp[q2].norm() * entry.comp[q2].norm();
                    cert.concentration_residual = std::max(cert.concentration_residual, std::sqrt(off));
                }
            out.omega.push_back(std::move(res));
        }

    if (cert_out)
        *cert_out = cert;
    const double worst = std::max(std::max(cert.isometry_residual, cert.membership_residual),
                                  std::max(cert.nondegeneracy_residual, cert.concentration_residual));
    if (worst >= std::max(tol.algebraic, 1e-7))
        throw consistency_error("recover_factor_system: certificate failed (residual " +
                                std::to_string(worst) + ")");
    return out;
}

/// Componentwise distance between two factor systems over the same (G, B):
/// max over gamma matrix differences and omega differences.
inline double factor_system_distance(const FactorSystem& a, const FactorSystem& b)
{
    double worst = 0.0;
    for (int p = 0; p < a.irrep_count(); ++p)
        worst = std::max(worst, (a.gamma[p].mat - b.gamma[p].mat).norm());
    for (std::size_t i = 0; i < a.omega.size(); ++i)
        worst = std::max(worst, distance(a.omega[i], b.omega[i]));
    return worst;
}

} // namespace cleft
