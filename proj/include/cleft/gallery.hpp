#pragma once

#include "cleft/construction.hpp"
#include "cleft/su2.hpp"

#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cleft {

/// One named, tagged expectation of a gallery entry, evaluated eagerly.
struct Claim {
    std::string name;
    std::string kind; // axiom | structure | model
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// A worked example: a generated factor system (absent for the SU(2)
/// entry, whose group is infinite) plus its evaluated expectations.
struct GalleryEntry {
    std::string name;
    std::string params;
    std::optional<FactorSystem> system;
    std::vector<Claim> claims;
    std::vector<std::string> skipped; // checks out of reach at the chosen cutoff

    bool pass() const
    {
        for (const Claim& c : claims)
            if (!c.pass)
                return false;
        return true;
    }
};

namespace detail {

inline void add_claim(GalleryEntry& e, std::string name, std::string kind, double residual, double threshold)
{
    e.claims.push_back({std::move(name), std::move(kind), residual, threshold, residual < threshold});
}

inline void add_verification_claims(GalleryEntry& e, const FactorSystem& fs, const Tolerances& tol)
{
    VerificationReport rep = verify_factor_system(fs, tol);
    double worst = 0.0;
    for (const auto& c : rep.checks)
        worst = std::max(worst, c.residual);
    add_claim(e, "factor system axioms", "axiom", worst, tol.algebraic);
    FreenessWitness w = is_free(fs, tol);
    add_claim(e, "freeness (omega unitary)", "structure", w.worst_residual, tol.algebraic);
}

inline void add_construction_claims(GalleryEntry& e, const ConstructedSystem& sys, const Tolerances& tol)
{
    VerificationReport rep = verify_construction(sys, tol);
    double worst = 0.0;
    for (const auto& c : rep.checks)
        worst = std::max(worst, c.residual);
    add_claim(e, "construction identities", "axiom", worst, tol.algebraic);

    const int expected = sys.fs.algebra.vec_dim() * sys.fs.group.group.order;
    add_claim(e, "dim A = dim B * |G|", "structure", std::abs(sys.total_dim - expected), 0.5);

    RecoveryCertificate cert;
    FactorSystem rec = recover_factor_system(sys, &cert, tol);
    add_claim(e, "factor system round trip", "structure", factor_system_distance(sys.fs, rec), tol.algebraic);
}

} // namespace detail

/// The trivial factor system over a catalog group: the rebuilt algebra is
/// B (x) C(G) with the right translation action.
inline GalleryEntry trivial_system(const std::string& group_name, const BAlgebra& algebra,
                                   const Tolerances& tol = {})
{
    GalleryEntry e;
    e.name = "trivial";
    {
        std::ostringstream os;
        os << "group=" << group_name << " blocks=[";
        for (std::size_t i = 0; i < algebra.blocks.size(); ++i)
            os << (i ? "," : "") << algebra.blocks[i];
        os << "]";
        e.params = os.str();
    }
    FactorSystem fs = trivial_factor_system(build_group(group_name), algebra);
    detail::add_verification_claims(e, fs, tol);
    ConstructedSystem sys = build_system(fs, tol, true);
    detail::add_construction_claims(e, sys, tol);

    if (algebra.commutative()) {
        detail::add_claim(e, "commutativity criterion", "structure", commutativity_criterion(fs, tol) ? 0.0 : 1.0,
                          0.5);
        detail::add_claim(e, "rebuilt algebra commutative", "model", max_commutator(sys), tol.algebraic);
    }
    detail::add_claim(e, "ergodic tensor form", "structure", ergodic_tensor_form(fs, tol) ? 0.0 : 1.0, 0.5);
    e.system = std::move(fs);
    return e;
}

/// Finite analogue of the n-fold circle cover: G = cyclic(n) acting on
/// functions on cyclic(n*m) by rotation, fixed algebra C(Z_m). The induced
/// factor system has trivial gamma and the carry cocycle
/// omega(k,l) = x -> exp(-2 pi i c(k,l) x / m).
inline GalleryEntry discrete_circle_cover(int n, int m, const Tolerances& tol = {})
{
    if (n < 1 || m < 1)
        throw spec_error("discrete_circle_cover needs n, m >= 1");
    GalleryEntry e;
    e.name = "circle-cover";
    e.params = "n=" + std::to_string(n) + " m=" + std::to_string(m);

    BAlgebra base;
    base.blocks.assign(m, 1);
    FactorSystem fs = trivial_factor_system(build_group("cyclic(" + std::to_string(n) + ")"), base);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            if (k + l < n)
                continue; // no carry, omega stays 1
            TensorElement& w = fs.omega_at(k, l);
            for (int x = 0; x < m; ++x)
                w.blocks[x](0, 0) = root_of_unity(-x, m);
        }

    detail::add_verification_claims(e, fs, tol);
    ConstructedSystem sys = build_system(fs, tol, true);
    detail::add_construction_claims(e, sys, tol);
    detail::add_claim(e, "commutativity criterion", "structure", commutativity_criterion(fs, tol) ? 0.0 : 1.0,
                      0.5);
    detail::add_claim(e, "rebuilt algebra commutative", "model", max_commutator(sys), tol.algebraic);

    // explicit isomorphism onto the functions on Z_{n*m}: the component
    // (k, point x0) maps to x -> zeta^{-k x} [x = x0 mod m]
    const int nm = n * m;
    auto to_function = [&](const GradedElement& g) {
        cvec f = cvec::Zero(nm);
        for (int x = 0; x < nm; ++x)
            for (int k = 0; k < n; ++k)
                f(x) += root_of_unity(-static_cast<long>(k) * x, nm) * g.comp[k].blocks[x % m](0, 0);
        return f;
    };
    double prod_res = 0.0, inv_res = 0.0, act_res = 0.0;
    for (int a = 0; a < sys.total_dim; ++a) {
        GradedElement ea = sys.basis_element(a);
        inv_res = std::max(inv_res, (to_function(sys.involve(ea)) - to_function(ea).conjugate()).norm());
        for (int g = 0; g < n; ++g) {
            cvec translated(nm);
            cvec f = to_function(ea);
            for (int x = 0; x < nm; ++x)
                translated(x) = f((x + g * m) % nm);
            act_res = std::max(act_res, (to_function(sys.act(g, ea)) - translated).norm());
        }
        for (int b = 0; b < sys.total_dim; ++b) {
            GradedElement eb = sys.basis_element(b);
            prod_res = std::max(prod_res, (to_function(sys.bullet(ea, eb)) -
                                           cvec(to_function(ea).cwiseProduct(to_function(eb))))
                                              .norm());
        }
    }
    detail::add_claim(e, "model isomorphism: products", "model", prod_res, tol.algebraic);
    detail::add_claim(e, "model isomorphism: involution", "model", inv_res, tol.algebraic);
    detail::add_claim(e, "model isomorphism: action is rotation", "model", act_res, tol.algebraic);

    // joint spectrum: the generator corresponding to x -> zeta^x has the
    // n*m distinct roots of unity as eigenvalues
    {
        GradedElement gen = sys.zero();
        const int kstar = (n - 1) % n;
        for (int x = 0; x < m; ++x)
            gen.comp[kstar].blocks[x](0, 0) = root_of_unity((1 + kstar) * x, nm);
        cmat l = detail::left_mult_operator(sys, gen);
        Eigen::ComplexEigenSolver<cmat> es(l);
        double worst = 0.0;
        std::vector<bool> used(nm, false);
        for (int i = 0; i < nm; ++i) {
            complexd lambda = es.eigenvalues()(i);
            double best = 1e300;
            int best_j = -1;
            for (int j = 0; j < nm; ++j) {
                if (used[j])
                    continue;
                double d = std::abs(lambda - root_of_unity(j, nm));
                if (d < best) {
                    best = d;
                    best_j = j;
                }
            }
            used[best_j] = true;
            worst = std::max(worst, best);
        }
        detail::add_claim(e, "generator spectrum = roots of unity", "model", worst, tol.algebraic);
    }

    e.system = std::move(fs);
    return e;
}

/// Ergodic twisted system: G = cyclic(n) x cyclic(n), B = C, gamma
/// trivial and omega((a,b),(c,d)) = zeta^{twist * b * c}. For twist
/// coprime to n the rebuilt algebra is the full n x n matrix algebra.
inline GalleryEntry bicharacter_system(int n, int twist = 1, const Tolerances& tol = {})
{
    if (n < 2)
        throw spec_error("bicharacter_system needs n >= 2");
    GalleryEntry e;
    e.name = "bicharacter";
    e.params = "n=" + std::to_string(n) + " twist=" + std::to_string(twist);

    std::string gname = "cyclic(" + std::to_string(n) + ")xcyclic(" + std::to_string(n) + ")";
    FactorSystem fs = trivial_factor_system(build_group(gname), scalars());
    const int k = fs.irrep_count();
    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r)
            fs.omega_at(p, r) *= root_of_unity(static_cast<long>(twist) * (p % n) * (r / n), n);

    detail::add_verification_claims(e, fs, tol);
    ConstructedSystem sys = build_system(fs, tol, true);
    detail::add_construction_claims(e, sys, tol);
    detail::add_claim(e, "ergodic tensor form", "structure", ergodic_tensor_form(fs, tol) ? 0.0 : 1.0, 0.5);

    int t = ((twist % n) + n) % n;
    if (t == 0) {
        detail::add_claim(e, "degenerate twist: commutative", "model", max_commutator(sys), tol.algebraic);
        detail::add_claim(e, "degenerate twist: center = C(G)", "model",
                          std::abs(center_dimension(sys) - n * n), 0.5);
    } else if (std::gcd(t, n) == 1) {
        detail::add_claim(e, "trivial center (full matrix algebra)", "model",
                          std::abs(center_dimension(sys) - 1), 0.5);
    }
    e.system = std::move(fs);
    return e;
}

/// Parity coaction of SU(2) on functions over a finite set X with an
/// involution h: gamma_j(b) = (b o h^{2j mod 2}) (x) 1, omega = 1. Checked
/// at a finite spin cutoff through Clebsch-Gordan data; no algebra is
/// constructed (the group is infinite).
inline GalleryEntry su2_parity_entry(int x_size, const std::vector<int>& h, int twice_jmax,
                                     const Tolerances& tol = {})
{
    if (x_size < 1)
        throw spec_error("su2_parity_entry needs a nonempty point set");
    if (static_cast<int>(h.size()) != x_size)
        throw spec_error("su2_parity_entry: involution size does not match the point set");
    for (int x = 0; x < x_size; ++x) {
        if (h[x] < 0 || h[x] >= x_size)
            throw spec_error("su2_parity_entry: involution is not a map on the point set");
        if (h[h[x]] != x)
            throw spec_error("su2_parity_entry: h is not an involution");
    }
    if (twice_jmax < 0)
        throw spec_error("su2_parity_entry: negative spin cutoff");

    GalleryEntry e;
    e.name = "su2-parity";
    {
        std::ostringstream os;
        os << "x_size=" << x_size << " jmax=" << su2::spin_name(twice_jmax) << " h=[";
        for (int x = 0; x < x_size; ++x)
            os << (x ? "," : "") << h[x];
        os << "]";
        e.params = os.str();
    }

    BAlgebra algebra;
    algebra.blocks.assign(x_size, 1);
    auto gamma_of = [&](int twoj) {
        const int d = su2::dim_of(twoj);
        const bool odd = twoj % 2 == 1;
        return BLinearMap::from_function(algebra, algebra, {d}, [&, odd, d](const BElement& b) {
            BElement moved = b;
            if (odd)
                for (int x = 0; x < x_size; ++x)
                    moved.blocks[x] = b.blocks[h[x]];
            return amplify(moved, 0, d);
        });
    };

    // Clebsch-Gordan data quality over all triples below the cutoff
    su2::Su2FusionData fusion = su2::fusion_data(twice_jmax);
    double cg_ladder = 0.0, cg_gram = 0.0;
    for (const auto& [key, v] : fusion.intertwiners) {
        cg_ladder = std::max(cg_ladder, su2::ladder_equivariance_residual(key[0], key[1], key[2], v));
        cg_gram = std::max(cg_gram,
                           frob_diff(v.adjoint() * v, cmat::Identity(su2::dim_of(key[2]), su2::dim_of(key[2]))));
    }
    detail::add_claim(e, "clebsch-gordan ladder equivariance", "axiom", cg_ladder, 1e-10);
    detail::add_claim(e, "clebsch-gordan columns orthonormal", "axiom", cg_gram, 1e-10);

    // coaction condition gamma_{j2} o gamma_{j1} = gamma_{j1 (x) j2}
    // (omega = 1), with the right side decomposed through CG isometries
    for (int twoa = 0; twoa <= twice_jmax; ++twoa)
        for (int twob = 0; twob <= twice_jmax; ++twob) {
            if (twoa + twob > twice_jmax) {
                e.skipped.push_back("coaction(" + su2::spin_name(twoa) + "," + su2::spin_name(twob) +
                                    "): needs spins above the cutoff");
                continue;
            }
            BLinearMap g1 = gamma_of(twoa);
            BLinearMap g2 = gamma_of(twob);
            const int d1 = su2::dim_of(twoa);
            const int d2 = su2::dim_of(twob);
            double res = 0.0;
            for (int i = 0; i < algebra.vec_dim(); ++i) {
                BElement b = b_basis_element(algebra, i);
                TensorElement lhs = apply_to_b_factor(g2, g1.apply(b));
                TensorElement rhs = TensorElement::zero(algebra, {d1, d2});
                for (int twoj = std::abs(twob - twoa); twoj <= twoa + twob; twoj += 2)
                    rhs += leg_expand(gamma_of(twoj).apply(b), fusion.cg(twoa, twob, twoj), {d1, d2});
                res = std::max(res, distance(lhs, rhs));
            }
            detail::add_claim(e, "coaction(" + su2::spin_name(twoa) + "," + su2::spin_name(twob) + ")",
                              "axiom", res, tol.algebraic);
        }

    // odd-spin module relation b.x = x.(b o h)
    {
        Rng rng(271828);
        double res = 0.0;
        for (int twoj = 1; twoj <= twice_jmax; twoj += 2) {
            const int d = su2::dim_of(twoj);
            BLinearMap g = gamma_of(twoj);
            for (int trial = 0; trial < 5; ++trial) {
                TensorElement x = TensorElement::zero(algebra, {d});
                for (int blk = 0; blk < x_size; ++blk)
                    x.blocks[blk] = rng.cgaussian_matrix(d, d);
                BElement b = TensorElement::zero(algebra);
                for (int blk = 0; blk < x_size; ++blk)
                    b.blocks[blk](0, 0) = rng.cgaussian();
                BElement bh = b;
                for (int blk = 0; blk < x_size; ++blk)
                    bh.blocks[blk] = b.blocks[h[blk]];
                res = std::max(res, distance(g.apply(b) * x, x * amplify(bh, 0, d)));
            }
        }
        detail::add_claim(e, "odd-spin module relation b.x = x.(b o h)", "model", res, tol.algebraic);
    }

    // h = id degenerates to the trivial coaction
    if ([&] {
            for (int x = 0; x < x_size; ++x)
                if (h[x] != x)
                    return false;
            return true;
        }()) {
        double res = 0.0;
        for (int twoj = 0; twoj <= twice_jmax; ++twoj) {
            BLinearMap g = gamma_of(twoj);
            for (int i = 0; i < algebra.vec_dim(); ++i) {
                BElement b = b_basis_element(algebra, i);
                res = std::max(res, distance(g.apply(b), amplify(b, 0, su2::dim_of(twoj))));
            }
        }
        detail::add_claim(e, "identity involution gives the trivial coaction", "model", res, tol.algebraic);
    }
    return e;
}

/// Names understood by the gallery command.
inline std::vector<std::string> gallery_names() { return {"trivial", "circle-cover", "bicharacter", "su2-parity"}; }

} // namespace cleft
