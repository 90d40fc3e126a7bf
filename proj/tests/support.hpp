#pragma once

#include "cleft/factor_system.hpp"

#include <functional>
#include <string>

namespace cleft::testing {

/// B = C, trivial gamma, omega(p,r) = w(p,r) * 1.
inline FactorSystem scalar_system(const std::string& group_name,
                                  const std::function<complexd(int, int)>& w)
{
    GroupData gd = build_group(group_name);
    FactorSystem fs = trivial_factor_system(std::move(gd), scalars());
    const int k = fs.irrep_count();
    for (int p = 0; p < k; ++p)
        for (int r = 0; r < k; ++r)
            fs.omega_at(p, r) *= w(p, r);
    return fs;
}

/// G = cyclic(n) x cyclic(n), B = C, gamma trivial, omega given by the
/// bicharacter zeta^{twist * b * c} where the irrep (a,b) has index a*n+b.
inline FactorSystem bicharacter_fixture(int n, int twist = 1)
{
    std::string name = "cyclic(" + std::to_string(n) + ")xcyclic(" + std::to_string(n) + ")";
    return scalar_system(name, [n, twist](int p, int r) {
        int b = p % n;
        int c = r / n;
        return root_of_unity(static_cast<long>(twist) * b * c, n);
    });
}

/// G = cyclic(2), B = functions on two points, gamma on the sign character
/// swaps the points, omega = 1. The smallest parity-coaction system.
inline FactorSystem swap_parity_fixture()
{
    GroupData c2 = build_group("cyclic(2)");
    BAlgebra two{{1, 1}};
    FactorSystem fs = trivial_factor_system(std::move(c2), two);
    fs.gamma[1] = BLinearMap::from_function(two, two, {1}, [](const BElement& b) {
        BElement s = b;
        std::swap(s.blocks[0], s.blocks[1]);
        return amplify(s, 0, 1);
    });
    return fs;
}

inline TensorElement random_tensor(Rng& rng, const BAlgebra& alg, std::vector<int> legs)
{
    TensorElement x = TensorElement::zero(alg, std::move(legs));
    const int d = x.leg_dim();
    for (std::size_t i = 0; i < x.blocks.size(); ++i)
        x.blocks[i] = rng.cgaussian_matrix(alg.blocks[i] * d, alg.blocks[i] * d);
    return x;
}

} // namespace cleft::testing
