#pragma once

#include "cleft/common.hpp"
#include "cleft/group.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace cleft {

/// A unitary irreducible representation, one matrix per group element.
struct Irrep {
    std::string label;
    int dim = 0;
    std::vector<cmat> matrices;

    complexd character(int g) const { return matrices[g].trace(); }
};

struct IrrepReport {
    double unitarity_residual = 0.0;
    double homomorphism_residual = 0.0;
    double character_norm = 0.0; // (1/|G|) sum |chi|^2, must be 1
    bool pass = false;
};

/// Checks unitarity, the homomorphism property over all pairs, and
/// irreducibility via the character norm.
inline IrrepReport verify_irrep(const FiniteGroup& g, const Irrep& r, const Tolerances& tol = {})
{
    if (static_cast<int>(r.matrices.size()) != g.order)
        throw spec_error("irrep '" + r.label + "': expected " + std::to_string(g.order) + " matrices, got " +
                         std::to_string(r.matrices.size()));
    for (const cmat& m : r.matrices)
        if (m.rows() != r.dim || m.cols() != r.dim)
            throw spec_error("irrep '" + r.label + "': matrix dimension mismatch");

    IrrepReport rep;
    const cmat id = cmat::Identity(r.dim, r.dim);
    for (int x = 0; x < g.order; ++x)
        rep.unitarity_residual = std::max(rep.unitarity_residual, frob_diff(r.matrices[x] * r.matrices[x].adjoint(), id));
    for (int x = 0; x < g.order; ++x)
        for (int y = 0; y < g.order; ++y)
            rep.homomorphism_residual =
                std::max(rep.homomorphism_residual, frob_diff(r.matrices[g.mul(x, y)], r.matrices[x] * r.matrices[y]));
    double norm = 0.0;
    for (int x = 0; x < g.order; ++x)
        norm += std::norm(r.character(x));
    rep.character_norm = norm / g.order;
    rep.pass = rep.unitarity_residual < tol.algebraic && rep.homomorphism_residual < tol.algebraic &&
               std::abs(rep.character_norm - 1.0) < tol.algebraic;
    return rep;
}

namespace detail {

/// Projects the matrix units onto the intertwiner space Hom_G(sigma, pi)
/// by group averaging, then orthonormalizes with modified Gram-Schmidt in
/// the Hilbert-Schmidt inner product. Candidates are visited in row-major
/// matrix-unit order, optionally reversed (used to test basis independence
/// downstream). Isometries are normalized to v* v = 1 and the phase is
/// fixed so the first entry above the cutoff is positive real.
inline std::vector<cmat> averaged_intertwiners(const FiniteGroup& g, const std::vector<cmat>& pi,
                                               const std::vector<cmat>& sigma, bool reverse_pivots = false)
{
    const int dp = static_cast<int>(pi.front().rows());
    const int ds = static_cast<int>(sigma.front().rows());

    std::vector<cmat> candidates;
    candidates.reserve(static_cast<std::size_t>(dp) * ds);
    for (int i = 0; i < dp; ++i)
        for (int j = 0; j < ds; ++j) {
            cmat t = cmat::Zero(dp, ds);
            t(i, j) = 1.0;
            cmat avg = cmat::Zero(dp, ds);
            for (int x = 0; x < g.order; ++x)
                avg += pi[x] * t * sigma[x].adjoint();
            candidates.push_back(avg / static_cast<double>(g.order));
        }
    if (reverse_pivots)
        std::reverse(candidates.begin(), candidates.end());

    // candidates are projections of unit-norm matrix units, so genuine
    // intertwiner directions sit at scale O(1) and noise at O(1e-16)
    const double cut = 1e-7;

    std::vector<cmat> basis;
    for (cmat c : candidates) {
        for (const cmat& b : basis)
            c -= b * ((b.adjoint() * c).trace() / static_cast<double>(ds));
        if (frob(c) <= cut)
            continue;
        c *= std::sqrt(static_cast<double>(ds)) / frob(c); // v* v = 1 by Schur
        // deterministic phase: first non-negligible entry positive real
        for (int i = 0; i < dp * ds; ++i) {
            complexd e = c(i / ds, i % ds);
            if (std::abs(e) > 1e-8) {
                c *= std::conj(e) / std::abs(e);
                break;
            }
        }
        basis.push_back(std::move(c));
    }
    return basis;
}

} // namespace detail

/// A validated group together with its complete list of irreps and the
/// dual pairing between them.
struct GroupData {
    FiniteGroup group;
    std::vector<Irrep> irreps;
    int trivial_index = -1;
    std::vector<int> dual_index;      // catalog index of the dual irrep
    std::vector<cmat> dual_unitary;   // u with conj(pi_g) u = u tau_g, tau the dual's catalog rep

    int index_of(const std::string& label) const
    {
        for (std::size_t i = 0; i < irreps.size(); ++i)
            if (irreps[i].label == label)
                return static_cast<int>(i);
        throw spec_error("unknown irrep label '" + label + "'");
    }
};

/// Entrywise conjugate representation; unitarily equivalent to a catalog
/// irrep, see GroupData::dual_index for the pairing.
inline Irrep dual_irrep(const Irrep& r)
{
    Irrep d;
    d.label = r.label + "~";
    d.dim = r.dim;
    d.matrices.reserve(r.matrices.size());
    for (const cmat& m : r.matrices)
        d.matrices.push_back(m.conjugate());
    return d;
}

/// Validates irreps (unitary homomorphisms, irreducible, pairwise
/// orthogonal characters, Burnside count) and resolves duals.
inline GroupData make_group_data(FiniteGroup group, std::vector<Irrep> irreps, const Tolerances& tol = {})
{
    GroupData gd;
    gd.group = std::move(group);
    gd.irreps = std::move(irreps);

    long burnside = 0;
    for (const Irrep& r : gd.irreps) {
        IrrepReport rep = verify_irrep(gd.group, r, tol);
        if (!rep.pass) {
            std::ostringstream os;
            os << "irrep '" << r.label << "' failed validation: unitarity=" << rep.unitarity_residual
               << " homomorphism=" << rep.homomorphism_residual << " character_norm=" << rep.character_norm;
            throw spec_error(os.str());
        }
        burnside += static_cast<long>(r.dim) * r.dim;
    }
    if (burnside != gd.group.order)
        throw spec_error("irrep list incomplete: sum of squared dimensions is " + std::to_string(burnside) +
                         ", group order is " + std::to_string(gd.group.order));

    const int k = static_cast<int>(gd.irreps.size());
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            complexd s = 0.0;
            for (int x = 0; x < gd.group.order; ++x)
                s += gd.irreps[a].character(x) * std::conj(gd.irreps[b].character(x));
            if (std::abs(s) / gd.group.order >= std::max(tol.character, 1e-9))
                throw spec_error("irreps '" + gd.irreps[a].label + "' and '" + gd.irreps[b].label +
                                 "' are not inequivalent (characters not orthogonal)");
        }

    for (int a = 0; a < k; ++a) {
        bool trivial = gd.irreps[a].dim == 1;
        for (int x = 0; x < gd.group.order && trivial; ++x)
            trivial = std::abs(gd.irreps[a].character(x) - 1.0) < 1e-9;
        if (trivial) {
            gd.trivial_index = a;
            break;
        }
    }
    if (gd.trivial_index < 0)
        throw spec_error("irrep list has no trivial representation");

    gd.dual_index.assign(k, -1);
    gd.dual_unitary.resize(k);
    for (int a = 0; a < k; ++a) {
        Irrep dual = dual_irrep(gd.irreps[a]);
        for (int b = 0; b < k; ++b) {
            if (gd.irreps[b].dim != dual.dim)
                continue;
            complexd s = 0.0;
            for (int x = 0; x < gd.group.order; ++x)
                s += dual.character(x) * std::conj(gd.irreps[b].character(x));
            if (std::abs(s / static_cast<double>(gd.group.order) - 1.0) < 1e-6) {
                gd.dual_index[a] = b;
                break;
            }
        }
        if (gd.dual_index[a] < 0)
            throw spec_error("catalog is not closed under duals (irrep '" + gd.irreps[a].label + "')");
        auto basis = detail::averaged_intertwiners(gd.group, dual.matrices, gd.irreps[gd.dual_index[a]].matrices);
        if (basis.size() != 1)
            throw consistency_error("dual equivalence of '" + gd.irreps[a].label + "' is not one-dimensional");
        gd.dual_unitary[a] = basis.front();
    }
    return gd;
}

namespace detail {

inline GroupData cyclic_data(int n)
{
    FiniteGroup g = cyclic_table(n, "cyclic(" + std::to_string(n) + ")");
    std::vector<Irrep> irreps;
    for (int j = 0; j < n; ++j) {
        Irrep r;
        r.label = "chi" + std::to_string(j);
        r.dim = 1;
        for (int x = 0; x < n; ++x) {
            cmat m(1, 1);
            m(0, 0) = root_of_unity(static_cast<long>(j) * x, n);
            r.matrices.push_back(m);
        }
        irreps.push_back(std::move(r));
    }
    return make_group_data(std::move(g), std::move(irreps));
}

inline GroupData cyclic_product_data(const std::vector<int>& orders, const std::string& name)
{
    FiniteGroup g = product_table(orders, name);
    const int n = g.order;
    auto decode = [&](int idx) {
        std::vector<int> digits(orders.size());
        for (int i = static_cast<int>(orders.size()) - 1; i >= 0; --i) {
            digits[i] = idx % orders[i];
            idx /= orders[i];
        }
        return digits;
    };
    std::vector<Irrep> irreps;
    for (int j = 0; j < n; ++j) {
        auto jd = decode(j);
        Irrep r;
        r.label = "chi";
        for (int d : jd)
            r.label += "_" + std::to_string(d);
        r.dim = 1;
        for (int x = 0; x < n; ++x) {
            auto xd = decode(x);
            complexd v = 1.0;
            for (std::size_t i = 0; i < orders.size(); ++i)
                v *= root_of_unity(static_cast<long>(jd[i]) * xd[i], orders[i]);
            cmat m(1, 1);
            m(0, 0) = v;
            r.matrices.push_back(m);
        }
        irreps.push_back(std::move(r));
    }
    return make_group_data(std::move(g), std::move(irreps));
}

inline cmat rotation2(double angle)
{
    cmat m(2, 2);
    m(0, 0) = std::cos(angle);
    m(0, 1) = -std::sin(angle);
    m(1, 0) = std::sin(angle);
    m(1, 1) = std::cos(angle);
    return m;
}

/// Irreps of the dihedral group of order 2n over the r^a s^b indexing of
/// dihedral_table: one-dim characters plus real rotation/reflection pairs.
inline std::vector<Irrep> dihedral_irreps(int n, bool s3_labels)
{
    std::vector<Irrep> irreps;
    auto one_dim = [&](const std::string& label, auto value) {
        Irrep r;
        r.label = label;
        r.dim = 1;
        r.matrices.resize(2 * n);
        for (int b = 0; b < 2; ++b)
            for (int a = 0; a < n; ++a) {
                cmat m(1, 1);
                m(0, 0) = value(a, b);
                r.matrices[b * n + a] = m;
            }
        return r;
    };
    irreps.push_back(one_dim(s3_labels ? "triv" : "a1", [](int, int) { return 1.0; }));
    irreps.push_back(one_dim(s3_labels ? "sign" : "a2", [](int, int b) { return b ? -1.0 : 1.0; }));
    if (n % 2 == 0) {
        irreps.push_back(one_dim("b1", [](int a, int) { return a % 2 ? -1.0 : 1.0; }));
        irreps.push_back(one_dim("b2", [](int a, int b) { return (a + b) % 2 ? -1.0 : 1.0; }));
    }
    cmat refl(2, 2);
    refl << 1.0, 0.0, 0.0, -1.0;
    for (int h = 1; 2 * h < n; ++h) {
        Irrep r;
        r.label = s3_labels ? "std" : "e" + std::to_string(h);
        r.dim = 2;
        r.matrices.resize(2 * n);
        for (int b = 0; b < 2; ++b)
            for (int a = 0; a < n; ++a) {
                cmat rot = rotation2(2.0 * pi * h * a / n);
                r.matrices[b * n + a] = b ? cmat(rot * refl) : rot;
            }
        irreps.push_back(std::move(r));
    }
    return irreps;
}

inline GroupData dihedral_data(int n)
{
    FiniteGroup g = dihedral_table(n, "dihedral(" + std::to_string(n) + ")");
    return make_group_data(std::move(g), dihedral_irreps(n, false));
}

inline GroupData s3_data()
{
    FiniteGroup g = dihedral_table(3, "S3");
    return make_group_data(std::move(g), dihedral_irreps(3, true));
}

inline GroupData q8_data()
{
    // elements: 1, -1, i, -i, j, -j, k, -k in this order
    const complexd I(0.0, 1.0);
    std::vector<cmat> units(8, cmat(2, 2));
    units[0] << 1, 0, 0, 1;
    units[2] << I, 0.0, 0.0, -I;
    units[4] << 0, 1, -1, 0;
    units[6] << 0.0, I, I, 0.0;
    for (int e = 0; e < 8; e += 2)
        units[e + 1] = -units[e];

    auto find = [&](const cmat& m) {
        for (int e = 0; e < 8; ++e)
            if (frob_diff(units[e], m) < 1e-9)
                return e;
        throw consistency_error("quaternion unit lookup failed");
    };
    std::vector<std::vector<int>> t(8, std::vector<int>(8));
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
            t[a][b] = find(units[a] * units[b]);
    FiniteGroup g = validate_group_table(std::move(t), "Q8");

    std::vector<Irrep> irreps;
    auto character = [&](const std::string& label, double eps_i, double eps_j) {
        Irrep r;
        r.label = label;
        r.dim = 1;
        const double eps_k = eps_i * eps_j;
        const double values[8] = {1, 1, eps_i, eps_i, eps_j, eps_j, eps_k, eps_k};
        for (int e = 0; e < 8; ++e) {
            cmat m(1, 1);
            m(0, 0) = values[e];
            r.matrices.push_back(m);
        }
        return r;
    };
    irreps.push_back(character("triv", 1, 1));
    irreps.push_back(character("chi_i", 1, -1));
    irreps.push_back(character("chi_j", -1, 1));
    irreps.push_back(character("chi_k", -1, -1));
    Irrep spin;
    spin.label = "spin";
    spin.dim = 2;
    spin.matrices = units;
    irreps.push_back(std::move(spin));
    return make_group_data(std::move(g), std::move(irreps));
}

} // namespace detail

/// Builds a catalog group from its name: cyclic(n), products of cyclics
/// joined with 'x', S3, Q8, dihedral(n).
inline GroupData build_group(const std::string& spec)
{
    if (spec == "S3")
        return detail::s3_data();
    if (spec == "Q8")
        return detail::q8_data();
    auto parse_int = [&](const std::string& s, const char* what) {
        try {
            std::size_t pos = 0;
            int v = std::stoi(s, &pos);
            if (pos != s.size())
                throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw spec_error(std::string("cannot parse ") + what + " in group spec '" + spec + "'");
        }
    };
    if (spec.rfind("dihedral(", 0) == 0 && spec.back() == ')')
        return detail::dihedral_data(parse_int(spec.substr(9, spec.size() - 10), "order"));

    // cyclic(n) or cyclic(a)xcyclic(b)x...
    std::vector<int> orders;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        std::size_t next = spec.find('x', pos);
        std::string part = spec.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (part.rfind("cyclic(", 0) != 0 || part.empty() || part.back() != ')')
            throw spec_error("unknown group catalog name '" + spec + "'");
        orders.push_back(parse_int(part.substr(7, part.size() - 8), "order"));
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    if (orders.empty())
        throw spec_error("unknown group catalog name '" + spec + "'");
    if (orders.size() == 1)
        return detail::cyclic_data(orders[0]);
    return detail::cyclic_product_data(orders, spec);
}

/// Validates an explicit Cayley table.
inline FiniteGroup build_group(std::vector<std::vector<int>> cayley)
{
    return validate_group_table(std::move(cayley));
}

} // namespace cleft
