#include "cleft/balgebra.hpp"

#include <doctest.h>

using namespace cleft;

namespace {

TensorElement random_element(Rng& rng, const BAlgebra& alg, std::vector<int> legs)
{
    TensorElement x = TensorElement::zero(alg, std::move(legs));
    const int d = x.leg_dim();
    for (std::size_t i = 0; i < x.blocks.size(); ++i)
        x.blocks[i] = rng.cgaussian_matrix(alg.blocks[i] * d, alg.blocks[i] * d);
    return x;
}

/// y * (b (x) 1): the right action of B on a tensor element.
TensorElement right_b_action(const TensorElement& y, const BElement& b)
{
    TensorElement amp = b;
    int pos = 0;
    for (int l : y.legs)
        amp = amplify(amp, pos++, l);
    return y * amp;
}

} // namespace

TEST_CASE("b_inner basic values")
{
    BAlgebra m2{{2}};
    TensorElement one = TensorElement::identity(m2, {3});
    CHECK(distance(b_inner(one, one), TensorElement::identity(m2)) < 1e-14);

    // x = 1 (x) u for unitary u has <x,x> = 1
    cmat u(2, 2);
    u << complexd(0, 1), 0, 0, complexd(std::sqrt(0.5), std::sqrt(0.5));
    TensorElement x = tensor_with(TensorElement::identity(m2), u, {2});
    CHECK(distance(b_inner(x, x), TensorElement::identity(m2)) < 1e-14);

    // B = C, leg dim 2, x = 1 (x) diag(1,0): <x,x> = 1/2
    BAlgebra c = scalars();
    cmat d10 = cmat::Zero(2, 2);
    d10(0, 0) = 1.0;
    TensorElement y = tensor_with(TensorElement::identity(c), d10, {2});
    BElement ip = b_inner(y, y);
    CHECK(std::abs(ip.blocks[0](0, 0) - 0.5) < 1e-14);
}

TEST_CASE("b_inner is positive definite and B-linear")
{
    Rng rng(11);
    BAlgebra alg{{2, 1}};
    for (int trial = 0; trial < 10; ++trial) {
        TensorElement x = random_element(rng, alg, {2});
        BElement g = b_inner(x, x);
        for (const cmat& blk : g.blocks) {
            Eigen::SelfAdjointEigenSolver<cmat> es(blk);
            CHECK(es.eigenvalues().minCoeff() > -1e-12);
        }
        CHECK(b_inner(x, x).norm() > 1e-6); // definite: nonzero x has nonzero norm

        TensorElement y = random_element(rng, alg, {2});
        // Cauchy-Schwarz in the induced norms
        double lhs = b_inner(x, y).op_norm();
        double rhs = std::sqrt(b_inner(x, x).op_norm()) * std::sqrt(b_inner(y, y).op_norm());
        CHECK(lhs <= rhs + 1e-10);

        for (int k = 0; k < alg.vec_dim(); ++k) {
            BElement b = b_basis_element(alg, k);
            CHECK(distance(b_inner(x, right_b_action(y, b)), b_inner(x, y) * b) < 1e-10);
            CHECK(distance(b_inner(right_b_action(x, b), y), b.adjoint() * b_inner(x, y)) < 1e-10);
        }
    }
    TensorElement z = TensorElement::zero(alg, {2});
    CHECK(b_inner(z, z).norm() == 0.0);
}

TEST_CASE("faithful_state values and faithfulness")
{
    BAlgebra alg{{2, 1}};
    CHECK(std::abs(faithful_state(TensorElement::identity(alg)) - 1.0) < 1e-14);

    BElement x = TensorElement::zero(alg);
    x.blocks[0] = cmat::Identity(2, 2);
    CHECK(std::abs(faithful_state(x) - 0.5) < 1e-14);

    Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        BElement b = random_element(rng, alg, {});
        complexd v = faithful_state(b.adjoint() * b);
        CHECK(v.real() > 0.0);
        CHECK(std::abs(v.imag()) < 1e-12);
    }
}

TEST_CASE("unital star homomorphism checks")
{
    BAlgebra m2{{2}};

    BLinearMap embed = BLinearMap::unit_embedding(m2, {3});
    CHECK(verify_unital_star_hom(embed).pass);

    // gamma(b) = u* (b (x) 1) u for a fixed unitary u
    Rng rng(77);
    cmat u = rng.unitary(4);
    BLinearMap conj = BLinearMap::from_function(m2, m2, {2}, [&](const BElement& b) {
        TensorElement amp = amplify(b, 0, 2); // b (x) 1 on one leg of dim 2
        TensorElement out = amp;
        out.blocks[0] = u.adjoint() * amp.blocks[0] * u;
        return out;
    });
    StarHomReport rep = verify_unital_star_hom(conj);
    CHECK(rep.pass);

    // transpose is an anti-homomorphism, multiplicativity must fail
    BLinearMap transp = BLinearMap::from_function(m2, m2, {1}, [&](const BElement& b) {
        TensorElement out = amplify(b, 0, 1);
        out.blocks[0] = out.blocks[0].transpose().eval();
        return out;
    });
    StarHomReport bad = verify_unital_star_hom(transp);
    CHECK_FALSE(bad.pass);
    CHECK(bad.mult_residual > 0.5);
    CHECK(bad.failing_i >= 0);
    CHECK(bad.unital_residual < 1e-14);

    // the named pair really witnesses the failure
    BElement ei = b_basis_element(m2, bad.failing_i);
    BElement ej = b_basis_element(m2, bad.failing_j);
    CHECK(distance(transp.apply(ei * ej), transp.apply(ei) * transp.apply(ej)) > 0.5);
}

TEST_CASE("amplify inserts an identity leg and normalized trace removes it")
{
    Rng rng(3);
    BAlgebra alg{{2, 1}};
    TensorElement x = random_element(rng, alg, {2});
    for (int pos = 0; pos <= 1; ++pos) {
        TensorElement big = amplify(x, pos, 3);
        CHECK(big.legs.size() == 2);
        TensorElement back = trace_legs(big, {pos});
        back *= 1.0 / 3.0;
        CHECK(distance(back, x) < 1e-12);
    }
}

TEST_CASE("flip is an involutive *-operation")
{
    Rng rng(4);
    BAlgebra alg{{2}};
    TensorElement x = random_element(rng, alg, {2, 3});
    TensorElement y = random_element(rng, alg, {2, 3});
    TensorElement fx = flip_legs(x, 0, 1);
    CHECK(fx.legs == std::vector<int>{3, 2});
    CHECK(distance(flip_legs(fx, 0, 1), x) < 1e-13);
    // *-homomorphism on products
    CHECK(distance(flip_legs(x * y, 0, 1), flip_legs(x, 0, 1) * flip_legs(y, 0, 1)) < 1e-12);
    CHECK(distance(flip_legs(x.adjoint(), 0, 1), flip_legs(x, 0, 1).adjoint()) < 1e-13);
}

TEST_CASE("leg products match the explicit Kronecker formula")
{
    // B = C, legs (2,2): x_12 * y_13 = (X (x) 1)(1 (x) Y) = X (x) Y
    Rng rng(9);
    BAlgebra c = scalars();
    cmat xm = rng.cgaussian_matrix(2, 2);
    cmat ym = rng.cgaussian_matrix(2, 2);
    TensorElement x = tensor_with(TensorElement::identity(c), xm, {2});
    TensorElement y = tensor_with(TensorElement::identity(c), ym, {2});
    TensorElement x12 = amplify(x, 1, 2);
    TensorElement y13 = amplify(y, 0, 2);
    TensorElement prod = x12 * y13;
    CHECK(frob_diff(prod.blocks[0], kron(xm, ym)) < 1e-13);
}

TEST_CASE("apply_to_b_factor places the map's output leg last")
{
    BAlgebra two_pts{{1, 1}};
    // gamma = swap of the two points, tensored with 1 on a dim-2 leg
    BLinearMap swap_map = BLinearMap::from_function(two_pts, two_pts, {2}, [&](const BElement& b) {
        BElement s = b;
        std::swap(s.blocks[0], s.blocks[1]);
        return amplify(s, 0, 2);
    });
    CHECK(verify_unital_star_hom(swap_map).pass);

    Rng rng(6);
    TensorElement x = random_element(rng, two_pts, {3});
    TensorElement out = apply_to_b_factor(swap_map, x);
    CHECK(out.legs == std::vector<int>{3, 2});
    // block 0 of out is block 1 of x tensored with identity on the new leg
    CHECK(frob_diff(out.blocks[0], kron(x.blocks[1], cmat::Identity(2, 2))) < 1e-13);
    CHECK(frob_diff(out.blocks[1], kron(x.blocks[0], cmat::Identity(2, 2))) < 1e-13);
}

TEST_CASE("vectorization round-trips and matches the canonical basis")
{
    Rng rng(8);
    BAlgebra alg{{2, 1}};
    TensorElement x = random_element(rng, alg, {2});
    CHECK(distance(unvec(alg, {2}, vec(x)), x) < 1e-15);

    for (int k = 0; k < alg.vec_dim(); ++k) {
        cvec v = vec(b_basis_element(alg, k));
        CHECK(v(k) == complexd(1.0));
        CHECK(std::abs(v.norm() - 1.0) < 1e-15);
    }
}
