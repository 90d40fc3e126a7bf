#pragma once

#include "cleft/common.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace cleft {

/// A finite group given by its Cayley table. Element "names" are their
/// indices 0..order-1; cayley[g][h] is the index of g*h.
struct FiniteGroup {
    int order = 0;
    std::vector<std::vector<int>> cayley;
    int identity = 0;
    std::vector<int> inverse;
    std::string name; // catalog name, or "custom"

    int mul(int g, int h) const { return cayley[g][h]; }
    int inv(int g) const { return inverse[g]; }
};

/// Checks that a square table is a group law. Throws spec_error naming the
/// violated axiom; on success fills identity and inverses.
inline FiniteGroup validate_group_table(std::vector<std::vector<int>> cayley, std::string name = "custom")
{
    const int n = static_cast<int>(cayley.size());
    if (n == 0)
        throw spec_error("group table is empty");
    for (int g = 0; g < n; ++g) {
        if (static_cast<int>(cayley[g].size()) != n)
            throw spec_error("group table is not square at row " + std::to_string(g));
        for (int h = 0; h < n; ++h)
            if (cayley[g][h] < 0 || cayley[g][h] >= n)
                throw spec_error("group table entry out of range at (" + std::to_string(g) + "," +
                                 std::to_string(h) + ")");
    }

    int identity = -1;
    for (int e = 0; e < n; ++e) {
        bool ok = true;
        for (int g = 0; g < n && ok; ++g)
            ok = cayley[e][g] == g && cayley[g][e] == g;
        if (ok) {
            identity = e;
            break;
        }
    }
    if (identity < 0)
        throw spec_error("group table has no identity element");

    std::vector<int> inverse(n, -1);
    for (int g = 0; g < n; ++g) {
        for (int h = 0; h < n; ++h) {
            if (cayley[g][h] == identity && cayley[h][g] == identity) {
                inverse[g] = h;
                break;
            }
        }
        if (inverse[g] < 0)
            throw spec_error("group element " + std::to_string(g) + " has no inverse");
    }

    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h)
            for (int k = 0; k < n; ++k)
                if (cayley[cayley[g][h]][k] != cayley[g][cayley[h][k]])
                    throw spec_error("group table is not associative at (" + std::to_string(g) + "," +
                                     std::to_string(h) + "," + std::to_string(k) + ")");

    FiniteGroup grp;
    grp.order = n;
    grp.cayley = std::move(cayley);
    grp.identity = identity;
    grp.inverse = std::move(inverse);
    grp.name = std::move(name);
    return grp;
}

namespace detail {

inline FiniteGroup cyclic_table(int n, std::string name)
{
    if (n < 1)
        throw spec_error("cyclic group order must be positive");
    std::vector<std::vector<int>> t(n, std::vector<int>(n));
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h)
            t[g][h] = (g + h) % n;
    return validate_group_table(std::move(t), std::move(name));
}

/// Direct product; element index is lexicographic, first factor major.
inline FiniteGroup product_table(const std::vector<int>& orders, std::string name)
{
    int n = 1;
    for (int m : orders) {
        if (m < 1)
            throw spec_error("cyclic factor order must be positive");
        n *= m;
    }
    auto decode = [&](int idx) {
        std::vector<int> digits(orders.size());
        for (int i = static_cast<int>(orders.size()) - 1; i >= 0; --i) {
            digits[i] = idx % orders[i];
            idx /= orders[i];
        }
        return digits;
    };
    auto encode = [&](const std::vector<int>& digits) {
        int idx = 0;
        for (std::size_t i = 0; i < orders.size(); ++i)
            idx = idx * orders[i] + digits[i];
        return idx;
    };
    std::vector<std::vector<int>> t(n, std::vector<int>(n));
    for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h) {
            auto a = decode(g), b = decode(h);
            std::vector<int> c(orders.size());
            for (std::size_t i = 0; i < orders.size(); ++i)
                c[i] = (a[i] + b[i]) % orders[i];
            t[g][h] = encode(c);
        }
    return validate_group_table(std::move(t), std::move(name));
}

/// Dihedral group of order 2n; element r^a s^b has index b*n + a,
/// with s r s = r^{-1}.
inline FiniteGroup dihedral_table(int n, std::string name)
{
    if (n < 2)
        throw spec_error("dihedral(n) needs n >= 2");
    const int size = 2 * n;
    auto idx = [n](int a, int b) { return b * n + a; };
    std::vector<std::vector<int>> t(size, std::vector<int>(size));
    for (int a1 = 0; a1 < n; ++a1)
        for (int b1 = 0; b1 < 2; ++b1)
            for (int a2 = 0; a2 < n; ++a2)
                for (int b2 = 0; b2 < 2; ++b2) {
                    int a = b1 == 0 ? (a1 + a2) % n : (a1 - a2 % n + n) % n;
                    int b = (b1 + b2) % 2;
                    t[idx(a1, b1)][idx(a2, b2)] = idx(a, b);
                }
    return validate_group_table(std::move(t), std::move(name));
}

} // namespace detail

} // namespace cleft
