#pragma once

#include "cleft/balgebra.hpp"
#include "cleft/rep.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace cleft {

/// Multiplicity of the catalog irrep sigma in a concrete representation,
/// by the character formula. Throws consistency_error if the averaged
/// value is not close to an integer.
inline int multiplicity(const GroupData& gd, int sigma, const Rep& target, const Tolerances& tol = {})
{
    complexd s = 0.0;
    for (int g = 0; g < gd.group.order; ++g)
        s += std::conj(gd.irreps[sigma].character(g)) * target.character(g);
    s /= static_cast<double>(gd.group.order);
    double rounded = std::round(s.real());
    if (std::abs(s - complexd(rounded)) > std::max(tol.algebraic, 1e-7) || rounded < -0.5)
        throw consistency_error("multiplicity of '" + gd.irreps[sigma].label +
                                "' is not a nonnegative integer (got " + std::to_string(s.real()) + "+" +
                                std::to_string(s.imag()) + "i)");
    return static_cast<int>(rounded);
}

/// Multiplicity of sigma in pi (x) rho.
inline int tensor_multiplicity(const GroupData& gd, int sigma, const RepHandle& pi, const RepHandle& rho,
                               const Tolerances& tol = {})
{
    return multiplicity(gd, sigma, tensor_rep(pi.evaluate(gd), rho.evaluate(gd)), tol);
}

/// An orthonormal family of isometric intertwiners v_k : V_sigma -> V_target
/// with target(g) v_k = v_k sigma(g) and v_j* v_k = delta_jk.
struct IntertwinerBasis {
    int sigma = -1; // catalog index
    int sigma_dim = 0;
    Rep target;
    std::vector<cmat> isometries;

    int count() const { return static_cast<int>(isometries.size()); }
};

/// Computes the intertwiner basis by group averaging; the count is checked
/// against the character multiplicity. reverse_pivots selects the other
/// deterministic pivot order (results span the same space).
inline IntertwinerBasis intertwiner_basis(const GroupData& gd, int sigma, const Rep& target,
                                          bool reverse_pivots = false, const Tolerances& tol = {})
{
    IntertwinerBasis b;
    b.sigma = sigma;
    b.sigma_dim = gd.irreps[sigma].dim;
    b.target = target;
    b.isometries = detail::averaged_intertwiners(gd.group, target.matrices, gd.irreps[sigma].matrices, reverse_pivots);
    const int m = multiplicity(gd, sigma, target, tol);
    if (m != b.count())
        throw consistency_error("intertwiner count for '" + gd.irreps[sigma].label + "' is " +
                                std::to_string(b.count()) + ", character multiplicity is " + std::to_string(m));
    return b;
}

/// Full decomposition of a representation into catalog irreps.
struct Decomposition {
    std::vector<IntertwinerBasis> parts; // one entry per catalog irrep, possibly empty

    const IntertwinerBasis& of(int sigma) const { return parts[sigma]; }
};

inline Decomposition decompose(const GroupData& gd, const Rep& target, bool reverse_pivots = false,
                               const Tolerances& tol = {})
{
    Decomposition d;
    cmat completeness = cmat::Zero(target.dim, target.dim);
    for (std::size_t s = 0; s < gd.irreps.size(); ++s) {
        d.parts.push_back(intertwiner_basis(gd, static_cast<int>(s), target, reverse_pivots, tol));
        for (const cmat& v : d.parts.back().isometries)
            completeness += v * v.adjoint();
    }
    if (frob_diff(completeness, cmat::Identity(target.dim, target.dim)) > std::max(tol.algebraic, 1e-7))
        throw consistency_error("irrep decomposition is incomplete (sum v v* != 1)");
    return d;
}

/// P_{sigma,pi}(x) = sum_k v_k* x v_k on the End legs, identity on B.
/// x must live on the merged leg space of the basis' target.
inline TensorElement isotypic_project(const IntertwinerBasis& basis, const TensorElement& x)
{
    if (x.leg_dim() != basis.target.dim)
        throw spec_error("isotypic_project: element legs do not match the target representation");
    TensorElement out = TensorElement::zero(x.algebra, {basis.sigma_dim});
    for (const cmat& v : basis.isometries)
        out += leg_compress(x, v, {basis.sigma_dim});
    return out;
}

/// Adjoint map P*_{sigma,pi}(z) = (d_pi/d_sigma) sum_k v_k z v_k*.
inline TensorElement isotypic_coproject(const IntertwinerBasis& basis, const TensorElement& z)
{
    if (z.leg_dim() != basis.sigma_dim)
        throw spec_error("isotypic_coproject: element legs do not match the source irrep");
    TensorElement out = TensorElement::zero(z.algebra, {basis.target.dim});
    for (const cmat& v : basis.isometries)
        out += leg_expand(z, v, {basis.target.dim});
    out *= static_cast<double>(basis.target.dim) / static_cast<double>(basis.sigma_dim);
    return out;
}

} // namespace cleft
