#pragma once

#include "cleft/intertwiner.hpp"

#include <string>
#include <utility>
#include <vector>

namespace cleft {

/// A factor system (gamma, omega) for a finite group and a
/// finite-dimensional C*-algebra B: per catalog irrep a unital
/// *-homomorphism gamma_pi : B -> B (x) End(V_pi), per ordered pair of
/// catalog irreps an isometry omega(pi,rho) in B (x) End(V_pi (x) V_rho).
struct FactorSystem {
    GroupData group;
    BAlgebra algebra;
    std::vector<BLinearMap> gamma;
    std::vector<TensorElement> omega; // row-major over (pi, rho)

    int irrep_count() const { return static_cast<int>(group.irreps.size()); }

    const TensorElement& omega_at(int p, int r) const { return omega[p * irrep_count() + r]; }
    TensorElement& omega_at(int p, int r) { return omega[p * irrep_count() + r]; }

    void require_well_formed() const
    {
        const int k = irrep_count();
        if (static_cast<int>(gamma.size()) != k)
            throw spec_error("factor system: gamma family size does not match the irrep catalog");
        if (static_cast<int>(omega.size()) != k * k)
            throw spec_error("factor system: omega family size does not match the irrep catalog");
        for (int p = 0; p < k; ++p) {
            if (gamma[p].domain != algebra || gamma[p].codomain_algebra != algebra ||
                gamma[p].codomain_legs != std::vector<int>{group.irreps[p].dim})
                throw spec_error("factor system: gamma(" + group.irreps[p].label + ") has the wrong shape");
            for (int r = 0; r < k; ++r) {
                const TensorElement& w = omega_at(p, r);
                if (w.algebra != algebra || w.legs != std::vector<int>{group.irreps[p].dim, group.irreps[r].dim})
                    throw spec_error("factor system: omega(" + group.irreps[p].label + "," +
                                     group.irreps[r].label + ") has the wrong shape");
            }
        }
    }
};

/// gamma_pi(b) = b (x) 1 and omega = 1 for every pair.
inline FactorSystem trivial_factor_system(GroupData gd, BAlgebra algebra)
{
    FactorSystem fs;
    fs.group = std::move(gd);
    fs.algebra = std::move(algebra);
    const int k = fs.irrep_count();
    for (int p = 0; p < k; ++p)
        fs.gamma.push_back(BLinearMap::unit_embedding(fs.algebra, {fs.group.irreps[p].dim}));
    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r)
            fs.omega.push_back(TensorElement::identity(fs.algebra, {fs.group.irreps[p].dim, fs.group.irreps[r].dim}));
    return fs;
}

// --- extension to reducible representations -----------------------------

/// gamma for an arbitrary representation, glued from the stored catalog
/// maps along an orthonormal intertwiner decomposition. Independent of the
/// chosen decomposition.
inline BLinearMap extend_gamma(const FactorSystem& fs, const Rep& rep, bool reverse_pivots = false)
{
    Decomposition dec = decompose(fs.group, rep, reverse_pivots);
    return BLinearMap::from_function(fs.algebra, fs.algebra, {rep.dim}, [&](const BElement& b) {
        TensorElement out = TensorElement::zero(fs.algebra, {rep.dim});
        for (const IntertwinerBasis& part : dec.parts) {
            if (part.count() == 0)
                continue;
            TensorElement g = fs.gamma[part.sigma].apply(b);
            for (const cmat& v : part.isometries)
                out += leg_expand(g, v, {rep.dim});
        }
        return out;
    });
}

inline BLinearMap extend_gamma(const FactorSystem& fs, const RepHandle& h, bool reverse_pivots = false)
{
    if (h.is_atom())
        return fs.gamma[fs.group.index_of(h.label)];
    return extend_gamma(fs, h.evaluate(fs.group), reverse_pivots);
}

/// omega for an arbitrary pair of representations, glued from the stored
/// values along intertwiner decompositions of both factors.
inline TensorElement extend_omega(const FactorSystem& fs, const Rep& rep1, const Rep& rep2,
                                  bool reverse_pivots = false)
{
    Decomposition d1 = decompose(fs.group, rep1, reverse_pivots);
    Decomposition d2 = decompose(fs.group, rep2, reverse_pivots);
    TensorElement out = TensorElement::zero(fs.algebra, {rep1.dim, rep2.dim});
    for (const IntertwinerBasis& p1 : d1.parts)
        for (const IntertwinerBasis& p2 : d2.parts) {
            if (p1.count() == 0 || p2.count() == 0)
                continue;
            TensorElement w = reshape_legs(fs.omega_at(p1.sigma, p2.sigma),
                                           {fs.group.irreps[p1.sigma].dim * fs.group.irreps[p2.sigma].dim});
            for (const cmat& v : p1.isometries)
                for (const cmat& u : p2.isometries)
                    out += leg_expand(w, kron(v, u), {rep1.dim, rep2.dim});
        }
    return out;
}

inline TensorElement extend_omega(const FactorSystem& fs, const RepHandle& h1, const RepHandle& h2,
                                  bool reverse_pivots = false)
{
    if (h1.is_atom() && h2.is_atom())
        return fs.omega_at(fs.group.index_of(h1.label), fs.group.index_of(h2.label));
    return extend_omega(fs, h1.evaluate(fs.group), h2.evaluate(fs.group), reverse_pivots);
}

/// Extends a per-irrep family of elements x_pi in B (x) End(V_pi) to a
/// representation via x_rep = sum_k (1 (x) v_k) x_{sigma_k} (1 (x) v_k)*.
/// Used for conjugation families.
inline TensorElement extend_element_family(const FactorSystem& fs, const std::vector<TensorElement>& family,
                                           const Rep& rep)
{
    Decomposition dec = decompose(fs.group, rep);
    TensorElement out = TensorElement::zero(fs.algebra, {rep.dim});
    for (const IntertwinerBasis& part : dec.parts)
        for (const cmat& v : part.isometries)
            out += leg_expand(family[part.sigma], v, {rep.dim});
    return out;
}

// --- axioms --------------------------------------------------------------

/// Coaction defect: max over the canonical basis of B of
/// || omega(pi,rho) (id_pi (x) gamma_rho)(gamma_pi(b)) - gamma_{pi(x)rho}(b) omega(pi,rho) ||.
inline double check_coaction(const FactorSystem& fs, const RepHandle& h1, const RepHandle& h2)
{
    Rep r1 = h1.evaluate(fs.group);
    Rep r2 = h2.evaluate(fs.group);
    BLinearMap g1 = extend_gamma(fs, h1);
    BLinearMap g2 = extend_gamma(fs, h2);
    TensorElement w = extend_omega(fs, h1, h2);
    BLinearMap g12 = extend_gamma(fs, tensor_rep(r1, r2));
    double res = 0.0;
    for (int i = 0; i < fs.algebra.vec_dim(); ++i) {
        BElement b = b_basis_element(fs.algebra, i);
        TensorElement lhs = w * apply_to_b_factor(g2, g1.apply(b));
        TensorElement rhs = reshape_legs(g12.apply(b), {r1.dim, r2.dim}) * w;
        res = std::max(res, distance(lhs, rhs));
    }
    return res;
}

/// Cocycle defect:
/// || (1_pi (x) omega(rho,sigma)) (id (x) gamma_sigma)(omega(pi,rho))*
///    - omega(pi, rho(x)sigma)* omega(pi(x)rho, sigma) ||.
inline double check_cocycle(const FactorSystem& fs, const RepHandle& h1, const RepHandle& h2,
                            const RepHandle& h3)
{
    Rep r1 = h1.evaluate(fs.group);
    Rep r2 = h2.evaluate(fs.group);
    Rep r3 = h3.evaluate(fs.group);
    BLinearMap g3 = extend_gamma(fs, h3);

    TensorElement left1 = amplify(reshape_legs(extend_omega(fs, h2, h3), {r2.dim, r3.dim}), 0, r1.dim);
    TensorElement left2 = apply_to_b_factor(g3, extend_omega(fs, h1, h2)).adjoint();
    TensorElement lhs = left1 * left2;

    TensorElement right1 =
        reshape_legs(extend_omega(fs, r1, tensor_rep(r2, r3)), {r1.dim, r2.dim, r3.dim}).adjoint();
    TensorElement right2 = reshape_legs(extend_omega(fs, tensor_rep(r1, r2), r3), {r1.dim, r2.dim, r3.dim});
    TensorElement rhs = right1 * right2;
    return distance(lhs, rhs);
}

struct NamedResidual {
    std::string name;
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct VerificationReport {
    std::vector<NamedResidual> checks;
    bool pass = true;
    double max_failing_residual = 0.0;
    std::string first_failure;

    void add(std::string name, double residual, double threshold)
    {
        bool ok = residual < threshold;
        if (!ok) {
            if (pass)
                first_failure = name;
            pass = false;
            max_failing_residual = std::max(max_failing_residual, residual);
        }
        checks.push_back({std::move(name), residual, threshold, ok});
    }
};

/// Runs the full axiom suite: structural isometry and normalization
/// checks, the star-homomorphism property of every gamma, derived unit
/// identities, and coaction/cocycle residuals over all catalog pairs and
/// triples.
inline VerificationReport verify_factor_system(const FactorSystem& fs, const Tolerances& tol = {})
{
    fs.require_well_formed();
    VerificationReport rep;
    const int k = fs.irrep_count();
    const double t = tol.algebraic;
    auto label = [&](int i) { return fs.group.irreps[i].label; };
    auto atom = [&](int i) { return RepHandle::atom(label(i)); };

    for (int p = 0; p < k; ++p) {
        StarHomReport hom = verify_unital_star_hom(fs.gamma[p], tol);
        rep.add("gamma(" + label(p) + ") unital", hom.unital_residual, t);
        rep.add("gamma(" + label(p) + ") star", hom.star_residual, t);
        rep.add("gamma(" + label(p) + ") multiplicative", hom.mult_residual, t);
    }

    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r) {
            const TensorElement& w = fs.omega_at(p, r);
            rep.add("omega(" + label(p) + "," + label(r) + ") isometry",
                    distance(w.adjoint() * w, TensorElement::identity(fs.algebra, w.legs)), t);
        }

    const int one = fs.group.trivial_index;
    rep.add("omega(1,1) normalization",
            distance(fs.omega_at(one, one), TensorElement::identity(fs.algebra, fs.omega_at(one, one).legs)), t);

    // consequences of the axioms, asserted rather than assumed
    {
        double res = 0.0;
        for (int i = 0; i < fs.algebra.vec_dim(); ++i) {
            BElement b = b_basis_element(fs.algebra, i);
            res = std::max(res, distance(fs.gamma[one].apply(b), amplify(b, 0, 1)));
        }
        rep.add("gamma(1) identity", res, t);
        for (int p = 0; p < k; ++p) {
            rep.add("omega(" + label(p) + ",1) unit",
                    distance(fs.omega_at(p, one), TensorElement::identity(fs.algebra, fs.omega_at(p, one).legs)), t);
            rep.add("omega(1," + label(p) + ") unit",
                    distance(fs.omega_at(one, p), TensorElement::identity(fs.algebra, fs.omega_at(one, p).legs)), t);
        }
    }

    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r)
            rep.add("coaction(" + label(p) + "," + label(r) + ")", check_coaction(fs, atom(p), atom(r)), t);

    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r)
            for (int s = 0; s < k; ++s)
                rep.add("cocycle(" + label(p) + "," + label(r) + "," + label(s) + ")",
                        check_cocycle(fs, atom(p), atom(r), atom(s)), t);
    return rep;
}

// --- conjugation ----------------------------------------------------------

/// A family of unitaries v_pi in B (x) End(V_pi), one per catalog irrep.
struct ConjugationFamily {
    std::vector<TensorElement> v;
};

inline ConjugationFamily identity_conjugation(const FactorSystem& fs)
{
    ConjugationFamily f;
    for (int p = 0; p < fs.irrep_count(); ++p)
        f.v.push_back(TensorElement::identity(fs.algebra, {fs.group.irreps[p].dim}));
    return f;
}

/// Blockwise Haar-random unitaries with a fixed seed. The entry at the
/// trivial irrep is 1, so conjugation preserves the omega(1,1) = 1
/// normalization.
inline ConjugationFamily random_conjugation(const FactorSystem& fs, std::uint64_t seed)
{
    Rng rng(seed);
    ConjugationFamily f;
    for (int p = 0; p < fs.irrep_count(); ++p) {
        TensorElement u = TensorElement::zero(fs.algebra, {fs.group.irreps[p].dim});
        for (std::size_t i = 0; i < u.blocks.size(); ++i)
            u.blocks[i] = rng.unitary(static_cast<int>(u.blocks[i].rows()));
        if (p == fs.group.trivial_index)
            u = TensorElement::identity(fs.algebra, {1});
        f.v.push_back(std::move(u));
    }
    return f;
}

/// The factor system conjugated by a unitary family:
/// gamma'_pi = Ad[v_pi*] o gamma_pi and
/// omega'(pi,rho) = v_{pi(x)rho}* omega(pi,rho) (id (x) gamma_rho)(v_pi) v_rho.
inline FactorSystem conjugate_factor_system(const FactorSystem& fs, const ConjugationFamily& family)
{
    FactorSystem out;
    out.group = fs.group;
    out.algebra = fs.algebra;
    const int k = fs.irrep_count();
    for (int p = 0; p < k; ++p) {
        const TensorElement& v = family.v[p];
        out.gamma.push_back(BLinearMap::from_function(fs.algebra, fs.algebra, {fs.group.irreps[p].dim},
                                                      [&](const BElement& b) {
                                                          return v.adjoint() * fs.gamma[p].apply(b) * v;
                                                      }));
    }
    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r) {
            const int d1 = fs.group.irreps[p].dim;
            const int d2 = fs.group.irreps[r].dim;
            Rep prod = tensor_rep(rep_of(fs.group.irreps[p]), rep_of(fs.group.irreps[r]));
            TensorElement v12 = reshape_legs(extend_element_family(fs, family.v, prod), {d1, d2});
            TensorElement gv = apply_to_b_factor(fs.gamma[r], family.v[p]);
            TensorElement vr = amplify(family.v[r], 0, d1);
            out.omega.push_back(v12.adjoint() * fs.omega_at(p, r) * gv * vr);
        }
    return out;
}

struct ConjugacyReport {
    double family_unitarity = 0.0;
    double gamma_residual = 0.0;
    double omega_residual = 0.0;
    bool pass = false;
};

/// Residuals of the conjugation equations between two systems under a
/// given family.
inline ConjugacyReport check_conjugacy(const FactorSystem& fs, const FactorSystem& fs2,
                                       const ConjugationFamily& family, const Tolerances& tol = {})
{
    if (fs.group.group.order != fs2.group.group.order || fs.algebra != fs2.algebra)
        throw spec_error("check_conjugacy: systems live over different (G, B)");
    ConjugacyReport rep;
    const int k = fs.irrep_count();
    for (int p = 0; p < k; ++p) {
        const TensorElement& v = family.v[p];
        rep.family_unitarity = std::max(
            rep.family_unitarity, distance(v.adjoint() * v, TensorElement::identity(fs.algebra, v.legs)));
        rep.family_unitarity = std::max(
            rep.family_unitarity, distance(v * v.adjoint(), TensorElement::identity(fs.algebra, v.legs)));
        for (int i = 0; i < fs.algebra.vec_dim(); ++i) {
            BElement b = b_basis_element(fs.algebra, i);
            rep.gamma_residual =
                std::max(rep.gamma_residual,
                         distance(fs2.gamma[p].apply(b), v.adjoint() * fs.gamma[p].apply(b) * v));
        }
    }
    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r) {
            const int d1 = fs.group.irreps[p].dim;
            const int d2 = fs.group.irreps[r].dim;
            Rep prod = tensor_rep(rep_of(fs.group.irreps[p]), rep_of(fs.group.irreps[r]));
            TensorElement v12 = reshape_legs(extend_element_family(fs, family.v, prod), {d1, d2});
            TensorElement lhs = v12 * fs2.omega_at(p, r);
            TensorElement rhs =
                fs.omega_at(p, r) * apply_to_b_factor(fs.gamma[r], family.v[p]) * amplify(family.v[r], 0, d1);
            rep.omega_residual = std::max(rep.omega_residual, distance(lhs, rhs));
        }
    rep.pass = rep.family_unitarity < tol.algebraic && rep.gamma_residual < tol.algebraic &&
               rep.omega_residual < tol.algebraic;
    return rep;
}

// --- structural predicates -------------------------------------------------

struct FreenessWitness {
    bool free = true;
    int failing_pi = -1;
    int failing_rho = -1;
    double worst_residual = 0.0;
};

/// Free iff every omega(pi,rho) is unitary (omega omega* = 1; the isometry
/// direction is part of verification).
inline FreenessWitness is_free(const FactorSystem& fs, const Tolerances& tol = {})
{
    FreenessWitness w;
    const int k = fs.irrep_count();
    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r) {
            const TensorElement& om = fs.omega_at(p, r);
            double res = distance(om * om.adjoint(), TensorElement::identity(fs.algebra, om.legs));
            if (res >= tol.algebraic && w.free) {
                w.free = false;
                w.failing_pi = p;
                w.failing_rho = r;
            }
            w.worst_residual = std::max(w.worst_residual, res);
        }
    return w;
}

/// For commutative B: the rebuilt algebra is commutative iff gamma is the
/// unit embedding and omega is flip-symmetric.
inline bool commutativity_criterion(const FactorSystem& fs, const Tolerances& tol = {})
{
    if (!fs.algebra.commutative())
        throw spec_error("commutativity criterion only applies to commutative B");
    const int k = fs.irrep_count();
    for (int p = 0; p < k; ++p) {
        const int d = fs.group.irreps[p].dim;
        for (int i = 0; i < fs.algebra.vec_dim(); ++i) {
            BElement b = b_basis_element(fs.algebra, i);
            if (distance(fs.gamma[p].apply(b), amplify(b, 0, d)) >= tol.algebraic)
                return false;
        }
    }
    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r)
            if (distance(fs.omega_at(r, p), flip_legs(fs.omega_at(p, r), 0, 1)) >= tol.algebraic)
                return false;
    return true;
}

/// True iff gamma is the unit embedding and every omega lies in
/// 1_B (x) End(V_pi (x) V_rho) (membership tested against the B-average).
inline bool ergodic_tensor_form(const FactorSystem& fs, const Tolerances& tol = {})
{
    const int k = fs.irrep_count();
    for (int p = 0; p < k; ++p) {
        const int d = fs.group.irreps[p].dim;
        for (int i = 0; i < fs.algebra.vec_dim(); ++i) {
            BElement b = b_basis_element(fs.algebra, i);
            if (distance(fs.gamma[p].apply(b), amplify(b, 0, d)) >= tol.algebraic)
                return false;
        }
    }
    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r) {
            const TensorElement& w = fs.omega_at(p, r);
            TensorElement avg = tensor_with(TensorElement::identity(fs.algebra), b_average(w), w.legs);
            if (distance(w, avg) >= tol.algebraic)
                return false;
        }
    return true;
}

namespace detail {

/// Orthonormal basis (as columns) of the span of the given vectors.
inline cmat span_basis(const std::vector<cvec>& vectors)
{
    if (vectors.empty())
        throw spec_error("span of an empty set");
    cmat m(vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i)
        m.col(static_cast<Eigen::Index>(i)) = vectors[i];
    Eigen::JacobiSVD<cmat> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-10 * sv(0))
            ++rank;
    return svd.matrixU().leftCols(rank);
}

inline double span_residual(const cmat& basis, const cvec& v)
{
    return (v - basis * (basis.adjoint() * v)).norm();
}

} // namespace detail

/// Checks whether all omega live in span(B0) (x) End and gamma maps
/// span(B0) into span(B0) (x) End. B0 is validated to be a unital
/// *-subalgebra of B first.
inline bool restricts_to_subalgebra(const FactorSystem& fs, const std::vector<BElement>& b0,
                                    const Tolerances& tol = {})
{
    if (b0.empty())
        throw spec_error("subalgebra spec is empty");
    std::vector<cvec> vecs;
    for (const BElement& s : b0) {
        if (s.algebra != fs.algebra || !s.legs.empty())
            throw spec_error("subalgebra elements must be plain elements of B");
        vecs.push_back(vec(s));
    }
    cmat basis = detail::span_basis(vecs);
    auto member = [&](const BElement& x) { return detail::span_residual(basis, vec(x)) < tol.algebraic; };

    if (!member(TensorElement::identity(fs.algebra)))
        throw spec_error("subalgebra spec does not contain the unit");
    for (const BElement& s : b0)
        if (!member(s.adjoint()))
            throw spec_error("subalgebra spec is not closed under adjoints");
    for (const BElement& s : b0)
        for (const BElement& u : b0)
            if (!member(s * u))
                throw spec_error("subalgebra spec is not closed under products");

    const int k = fs.irrep_count();
    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r) {
            const TensorElement& w = fs.omega_at(p, r);
            const int d = w.leg_dim();
            for (int u = 0; u < d; ++u)
                for (int v = 0; v < d; ++v)
                    if (!member(b_slice(w, u, v)))
                        return false;
        }
    for (int p = 0; p < k; ++p)
        for (const BElement& s : b0) {
            TensorElement g = fs.gamma[p].apply(s);
            const int d = g.leg_dim();
            for (int u = 0; u < d; ++u)
                for (int v = 0; v < d; ++v)
                    if (!member(b_slice(g, u, v)))
                        return false;
        }
    return true;
}

} // namespace cleft
