#pragma once

#include "cleft/common.hpp"

#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace cleft {

/// A finite-dimensional unital C*-algebra, direct sum of full matrix
/// blocks M_{n_1} + ... + M_{n_r}.
struct BAlgebra {
    std::vector<int> blocks;

    int num_blocks() const { return static_cast<int>(blocks.size()); }
    bool commutative() const
    {
        for (int n : blocks)
            if (n != 1)
                return false;
        return true;
    }
    /// Dimension of B as a complex vector space.
    int vec_dim() const
    {
        int d = 0;
        for (int n : blocks)
            d += n * n;
        return d;
    }
    bool operator==(const BAlgebra& o) const { return blocks == o.blocks; }
    bool operator!=(const BAlgebra& o) const { return !(*this == o); }
};

inline BAlgebra scalars() { return BAlgebra{{1}}; }

/// An element of B (x) End(V_1) (x) ... (x) End(V_k), stored per B-block
/// as a full matrix on C^{n_i} (x) C^{d_1} (x) ... (x) C^{d_k}. The block
/// factor is leftmost, End legs follow in order. An empty leg list gives a
/// plain element of B.
struct TensorElement {
    BAlgebra algebra;
    std::vector<int> legs;
    std::vector<cmat> blocks;

    int leg_dim() const
    {
        int d = 1;
        for (int l : legs)
            d *= l;
        return d;
    }

    static TensorElement zero(BAlgebra alg, std::vector<int> legs = {})
    {
        TensorElement x;
        x.algebra = std::move(alg);
        x.legs = std::move(legs);
        const int d = x.leg_dim();
        for (int n : x.algebra.blocks)
            x.blocks.push_back(cmat::Zero(n * d, n * d));
        return x;
    }

    static TensorElement identity(BAlgebra alg, std::vector<int> legs = {})
    {
        TensorElement x = zero(std::move(alg), std::move(legs));
        const int d = x.leg_dim();
        for (std::size_t i = 0; i < x.blocks.size(); ++i) {
            int m = x.algebra.blocks[i] * d;
            x.blocks[i] = cmat::Identity(m, m);
        }
        return x;
    }

    TensorElement adjoint() const
    {
        TensorElement y = *this;
        for (cmat& b : y.blocks)
            b = b.adjoint().eval();
        return y;
    }

    double norm() const
    {
        double s = 0.0;
        for (const cmat& b : blocks)
            s += b.squaredNorm();
        return std::sqrt(s);
    }

    /// Largest block operator norm; the C*-norm of the element.
    double op_norm() const
    {
        double s = 0.0;
        for (const cmat& b : blocks)
            s = std::max(s, operator_norm(b));
        return s;
    }

    TensorElement& operator+=(const TensorElement& o)
    {
        for (std::size_t i = 0; i < blocks.size(); ++i)
            blocks[i] += o.blocks[i];
        return *this;
    }
    TensorElement& operator-=(const TensorElement& o)
    {
        for (std::size_t i = 0; i < blocks.size(); ++i)
            blocks[i] -= o.blocks[i];
        return *this;
    }
    TensorElement& operator*=(complexd c)
    {
        for (cmat& b : blocks)
            b *= c;
        return *this;
    }
};

using BElement = TensorElement; // leg list empty

inline void require_same_shape(const TensorElement& x, const TensorElement& y, const char* what)
{
    if (x.algebra != y.algebra || x.legs != y.legs)
        throw spec_error(std::string(what) + ": tensor shapes do not match");
}

inline TensorElement operator+(TensorElement x, const TensorElement& y)
{
    require_same_shape(x, y, "add");
    x += y;
    return x;
}
inline TensorElement operator-(TensorElement x, const TensorElement& y)
{
    require_same_shape(x, y, "subtract");
    x -= y;
    return x;
}
inline TensorElement operator*(complexd c, TensorElement x)
{
    x *= c;
    return x;
}
inline TensorElement operator*(const TensorElement& x, const TensorElement& y)
{
    require_same_shape(x, y, "multiply");
    TensorElement z = x;
    for (std::size_t i = 0; i < z.blocks.size(); ++i)
        z.blocks[i] = x.blocks[i] * y.blocks[i];
    return z;
}

inline double distance(const TensorElement& x, const TensorElement& y)
{
    require_same_shape(x, y, "distance");
    double s = 0.0;
    for (std::size_t i = 0; i < x.blocks.size(); ++i)
        s += (x.blocks[i] - y.blocks[i]).squaredNorm();
    return std::sqrt(s);
}

namespace detail {

inline std::vector<int> leg_strides(const std::vector<int>& legs)
{
    std::vector<int> s(legs.size(), 1);
    for (int i = static_cast<int>(legs.size()) - 2; i >= 0; --i)
        s[i] = s[i + 1] * legs[i + 1];
    return s;
}

inline void decode_leg_index(int u, const std::vector<int>& legs, std::vector<int>& digits)
{
    digits.resize(legs.size());
    for (int i = static_cast<int>(legs.size()) - 1; i >= 0; --i) {
        digits[i] = u % legs[i];
        u /= legs[i];
    }
}

} // namespace detail

/// Reinterprets the leg structure without touching data; products of leg
/// dimensions must agree.
inline TensorElement reshape_legs(TensorElement x, std::vector<int> new_legs)
{
    int d = 1;
    for (int l : new_legs)
        d *= l;
    if (d != x.leg_dim())
        throw spec_error("reshape_legs: leg dimension product mismatch");
    x.legs = std::move(new_legs);
    return x;
}

/// Reorders legs: new leg i is old leg perm[i].
inline TensorElement permute_legs(const TensorElement& x, const std::vector<int>& perm)
{
    if (perm.size() != x.legs.size())
        throw spec_error("permute_legs: permutation size mismatch");
    std::vector<int> new_legs(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i)
        new_legs[i] = x.legs[perm[i]];
    TensorElement y = TensorElement::zero(x.algebra, new_legs);
    const int d = x.leg_dim();
    const auto old_str = detail::leg_strides(x.legs);
    std::vector<int> digits;
    std::vector<int> map(d);
    for (int u = 0; u < d; ++u) { // new leg index -> old leg index
        detail::decode_leg_index(u, new_legs, digits);
        int old_u = 0;
        for (std::size_t i = 0; i < perm.size(); ++i)
            old_u += digits[i] * old_str[perm[i]];
        map[u] = old_u;
    }
    for (std::size_t b = 0; b < x.blocks.size(); ++b) {
        const int n = x.algebra.blocks[b];
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                for (int u = 0; u < d; ++u)
                    for (int v = 0; v < d; ++v)
                        y.blocks[b](p * d + u, q * d + v) = x.blocks[b](p * d + map[u], q * d + map[v]);
    }
    return y;
}

/// Conjugation by the unitary exchanging legs i and j.
inline TensorElement flip_legs(const TensorElement& x, int i, int j)
{
    std::vector<int> perm(x.legs.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm.at(i), perm.at(j));
    return permute_legs(x, perm);
}

/// Inserts an identity leg of the given dimension at position pos.
inline TensorElement amplify(const TensorElement& x, int pos, int dim)
{
    if (pos < 0 || pos > static_cast<int>(x.legs.size()))
        throw spec_error("amplify: bad leg position");
    std::vector<int> new_legs = x.legs;
    new_legs.insert(new_legs.begin() + pos, dim);
    TensorElement y = TensorElement::zero(x.algebra, new_legs);
    const int d_old = x.leg_dim();
    const int d_new = y.leg_dim();
    const auto old_str = detail::leg_strides(x.legs);
    std::vector<int> digits;
    // new leg index -> (old leg index, inserted digit)
    std::vector<int> old_of(d_new), ins_of(d_new);
    for (int u = 0; u < d_new; ++u) {
        detail::decode_leg_index(u, new_legs, digits);
        int old_u = 0;
        for (std::size_t k = 0; k < new_legs.size(); ++k) {
            if (static_cast<int>(k) == pos)
                continue;
            std::size_t old_k = k < static_cast<std::size_t>(pos) ? k : k - 1;
            old_u += digits[k] * old_str[old_k];
        }
        old_of[u] = old_u;
        ins_of[u] = digits[pos];
    }
    for (std::size_t b = 0; b < x.blocks.size(); ++b) {
        const int n = x.algebra.blocks[b];
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                for (int u = 0; u < d_new; ++u)
                    for (int v = 0; v < d_new; ++v) {
                        if (ins_of[u] != ins_of[v])
                            continue;
                        y.blocks[b](p * d_new + u, q * d_new + v) =
                            x.blocks[b](p * d_old + old_of[u], q * d_old + old_of[v]);
                    }
    }
    return y;
}

/// (1_B (x) m) * x, with m acting on the merged leg space.
inline TensorElement leg_mul_left(const cmat& m, const TensorElement& x)
{
    const int d = x.leg_dim();
    if (m.cols() != d)
        throw spec_error("leg_mul_left: matrix size does not match legs");
    TensorElement y = x;
    for (std::size_t b = 0; b < x.blocks.size(); ++b) {
        cmat k = kron(cmat::Identity(x.algebra.blocks[b], x.algebra.blocks[b]), m);
        y.blocks[b] = k * x.blocks[b];
    }
    return y;
}

/// x * (1_B (x) m)
inline TensorElement leg_mul_right(const TensorElement& x, const cmat& m)
{
    const int d = x.leg_dim();
    if (m.rows() != d)
        throw spec_error("leg_mul_right: matrix size does not match legs");
    TensorElement y = x;
    for (std::size_t b = 0; b < x.blocks.size(); ++b) {
        cmat k = kron(cmat::Identity(x.algebra.blocks[b], x.algebra.blocks[b]), m);
        y.blocks[b] = x.blocks[b] * k;
    }
    return y;
}

/// (1 (x) v)* x (1 (x) v) for an isometry v into the merged leg space of x;
/// the result lives on new_legs.
inline TensorElement leg_compress(const TensorElement& x, const cmat& v, std::vector<int> new_legs)
{
    TensorElement y = TensorElement::zero(x.algebra, std::move(new_legs));
    if (v.rows() != x.leg_dim() || v.cols() != y.leg_dim())
        throw spec_error("leg_compress: isometry shape mismatch");
    for (std::size_t b = 0; b < x.blocks.size(); ++b) {
        cmat k = kron(cmat::Identity(x.algebra.blocks[b], x.algebra.blocks[b]), v);
        y.blocks[b] = k.adjoint() * x.blocks[b] * k;
    }
    return y;
}

/// (1 (x) v) x (1 (x) v)* embedding along an isometry from the merged leg
/// space of x; the result lives on new_legs.
inline TensorElement leg_expand(const TensorElement& x, const cmat& v, std::vector<int> new_legs)
{
    TensorElement y = TensorElement::zero(x.algebra, std::move(new_legs));
    if (v.cols() != x.leg_dim() || v.rows() != y.leg_dim())
        throw spec_error("leg_expand: isometry shape mismatch");
    for (std::size_t b = 0; b < x.blocks.size(); ++b) {
        cmat k = kron(cmat::Identity(x.algebra.blocks[b], x.algebra.blocks[b]), v);
        y.blocks[b] = k * x.blocks[b] * k.adjoint();
    }
    return y;
}

/// Partial trace over a subset of legs (normalized by nothing); keeps the
/// remaining legs in order.
inline TensorElement trace_legs(const TensorElement& x, const std::vector<int>& traced)
{
    std::vector<bool> is_traced(x.legs.size(), false);
    for (int t : traced)
        is_traced.at(t) = true;
    std::vector<int> kept_legs;
    for (std::size_t i = 0; i < x.legs.size(); ++i)
        if (!is_traced[i])
            kept_legs.push_back(x.legs[i]);
    TensorElement y = TensorElement::zero(x.algebra, kept_legs);
    const int d = x.leg_dim();
    const auto kept_str = detail::leg_strides(kept_legs);
    std::vector<int> digits;
    std::vector<int> kept_of(d), traced_of(d);
    for (int u = 0; u < d; ++u) {
        detail::decode_leg_index(u, x.legs, digits);
        int ku = 0, tu = 0;
        int ki = 0;
        for (std::size_t i = 0; i < x.legs.size(); ++i) {
            if (is_traced[i])
                tu = tu * x.legs[i] + digits[i];
            else
                ku += digits[i] * kept_str[ki++];
        }
        kept_of[u] = ku;
        traced_of[u] = tu;
    }
    const int dk = y.leg_dim();
    for (std::size_t b = 0; b < x.blocks.size(); ++b) {
        const int n = x.algebra.blocks[b];
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                for (int u = 0; u < d; ++u)
                    for (int v = 0; v < d; ++v) {
                        if (traced_of[u] != traced_of[v])
                            continue;
                        y.blocks[b](p * dk + kept_of[u], q * dk + kept_of[v]) +=
                            x.blocks[b](p * d + u, q * d + v);
                    }
    }
    return y;
}

/// B-valued inner product <x,y> = (1/d) (id (x) Tr)(x* y).
inline BElement b_inner(const TensorElement& x, const TensorElement& y)
{
    require_same_shape(x, y, "b_inner");
    const int d = x.leg_dim();
    BElement out = TensorElement::zero(x.algebra);
    for (std::size_t b = 0; b < x.blocks.size(); ++b) {
        const int n = x.algebra.blocks[b];
        cmat z = x.blocks[b].adjoint() * y.blocks[b];
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                complexd s = 0.0;
                for (int u = 0; u < d; ++u)
                    s += z(p * d + u, q * d + u);
                out.blocks[b](p, q) = s / static_cast<double>(d);
            }
    }
    return out;
}

/// Equally weighted normalized block trace; a faithful state on B.
inline complexd faithful_state(const BAlgebra& alg, const BElement& x)
{
    if (!x.legs.empty())
        throw spec_error("faithful_state expects a plain element of B");
    if (x.algebra != alg)
        throw spec_error("faithful_state: algebra mismatch");
    complexd s = 0.0;
    const int r = alg.num_blocks();
    for (int i = 0; i < r; ++i)
        s += x.blocks[i].trace() / static_cast<double>(r * alg.blocks[i]);
    return s;
}

inline complexd faithful_state(const BElement& x) { return faithful_state(x.algebra, x); }

/// Scalar inner product induced by the faithful state.
inline complexd scalar_inner(const TensorElement& x, const TensorElement& y)
{
    return faithful_state(b_inner(x, y));
}

/// (state (x) id) applied to the B factor: the average of the B-slices,
/// weighted like faithful_state. Result is a matrix on the merged legs.
inline cmat b_average(const TensorElement& x)
{
    const int d = x.leg_dim();
    cmat out = cmat::Zero(d, d);
    const int r = x.algebra.num_blocks();
    for (int b = 0; b < r; ++b) {
        const int n = x.algebra.blocks[b];
        for (int p = 0; p < n; ++p)
            for (int u = 0; u < d; ++u)
                for (int v = 0; v < d; ++v)
                    out(u, v) += x.blocks[b](p * d + u, p * d + v) / static_cast<double>(r * n);
    }
    return out;
}

/// The (u,v) B-slice: x = sum_{u,v} slice(u,v) (x) E_uv over the merged legs.
inline BElement b_slice(const TensorElement& x, int u, int v)
{
    const int d = x.leg_dim();
    BElement out = TensorElement::zero(x.algebra);
    for (std::size_t b = 0; b < x.blocks.size(); ++b) {
        const int n = x.algebra.blocks[b];
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                out.blocks[b](p, q) = x.blocks[b](p * d + u, q * d + v);
    }
    return out;
}

/// b (x) m
inline TensorElement tensor_with(const BElement& b, const cmat& m, std::vector<int> legs)
{
    TensorElement y = TensorElement::zero(b.algebra, std::move(legs));
    if (m.rows() != y.leg_dim() || m.cols() != y.leg_dim())
        throw spec_error("tensor_with: matrix does not match legs");
    for (std::size_t i = 0; i < y.blocks.size(); ++i)
        y.blocks[i] = kron(b.blocks[i], m);
    return y;
}

// --- canonical vectorization -------------------------------------------
//
// Basis of B (x) End legs: matrix units, block-major, then row-major on
// the full (n_i * D) square matrix of each block. All linear maps between
// these spaces use this enumeration.

inline int te_vec_dim(const BAlgebra& alg, const std::vector<int>& legs)
{
    int d = 1;
    for (int l : legs)
        d *= l;
    int s = 0;
    for (int n : alg.blocks)
        s += (n * d) * (n * d);
    return s;
}

inline cvec vec(const TensorElement& x)
{
    cvec v(te_vec_dim(x.algebra, x.legs));
    int off = 0;
    for (const cmat& b : x.blocks) {
        for (int r = 0; r < b.rows(); ++r)
            for (int c = 0; c < b.cols(); ++c)
                v(off++) = b(r, c);
    }
    return v;
}

inline TensorElement unvec(const BAlgebra& alg, const std::vector<int>& legs, const cvec& v)
{
    TensorElement x = TensorElement::zero(alg, legs);
    int off = 0;
    for (cmat& b : x.blocks)
        for (int r = 0; r < b.rows(); ++r)
            for (int c = 0; c < b.cols(); ++c)
                b(r, c) = v(off++);
    return x;
}

/// The idx-th canonical basis element of B (block-major matrix units).
inline BElement b_basis_element(const BAlgebra& alg, int idx)
{
    BElement x = TensorElement::zero(alg);
    int off = 0;
    for (std::size_t i = 0; i < x.blocks.size(); ++i) {
        const int n = alg.blocks[i];
        if (idx < off + n * n) {
            int local = idx - off;
            x.blocks[i](local / n, local % n) = 1.0;
            return x;
        }
        off += n * n;
    }
    throw spec_error("b_basis_element: index out of range");
}

/// Index of the basis element E_qp given the index of E_pq (adjoint on the
/// canonical basis).
inline int b_basis_adjoint_index(const BAlgebra& alg, int idx)
{
    int off = 0;
    for (int n : alg.blocks) {
        if (idx < off + n * n) {
            int local = idx - off;
            return off + (local % n) * n + local / n;
        }
        off += n * n;
    }
    throw spec_error("b_basis_adjoint_index: index out of range");
}

/// A linear map B -> B (x) End(V_1) (x) ... given by its matrix on the
/// canonical bases. gamma maps of factor systems are stored this way.
struct BLinearMap {
    BAlgebra domain;
    BAlgebra codomain_algebra;
    std::vector<int> codomain_legs;
    cmat mat;

    TensorElement apply(const BElement& b) const
    {
        if (b.algebra != domain || !b.legs.empty())
            throw spec_error("BLinearMap::apply: element not in domain");
        return unvec(codomain_algebra, codomain_legs, mat * vec(b));
    }

    static BLinearMap from_function(BAlgebra domain, BAlgebra cod_alg, std::vector<int> cod_legs,
                                    const std::function<TensorElement(const BElement&)>& fn)
    {
        BLinearMap m;
        m.domain = std::move(domain);
        m.codomain_algebra = std::move(cod_alg);
        m.codomain_legs = std::move(cod_legs);
        const int din = m.domain.vec_dim();
        const int dout = te_vec_dim(m.codomain_algebra, m.codomain_legs);
        m.mat = cmat::Zero(dout, din);
        for (int j = 0; j < din; ++j) {
            TensorElement out = fn(b_basis_element(m.domain, j));
            if (out.algebra != m.codomain_algebra || out.legs != m.codomain_legs)
                throw spec_error("BLinearMap::from_function: codomain shape mismatch");
            m.mat.col(j) = vec(out);
        }
        return m;
    }

    /// b -> b (x) 1 on the given legs.
    static BLinearMap unit_embedding(const BAlgebra& alg, std::vector<int> legs)
    {
        std::vector<int> legs_copy = legs;
        return from_function(alg, alg, std::move(legs), [&legs_copy](const BElement& b) {
            TensorElement x = b;
            int pos = 0;
            for (int l : legs_copy)
                x = amplify(x, pos++, l);
            return x;
        });
    }
};

/// Applies a map B -> B (x) End(W) to the B factor of x; the new End(W)
/// leg is appended after the existing legs of x.
inline TensorElement apply_to_b_factor(const BLinearMap& gamma, const TensorElement& x)
{
    if (x.algebra != gamma.domain)
        throw spec_error("apply_to_b_factor: element not over the map's domain");
    const int d = x.leg_dim();
    std::vector<int> out_legs = x.legs;
    for (int l : gamma.codomain_legs)
        out_legs.push_back(l);
    TensorElement out = TensorElement::zero(gamma.codomain_algebra, out_legs);
    int g_leg = 1;
    for (int l : gamma.codomain_legs)
        g_leg *= l;

    int dom_off = 0;
    for (int i = 0; i < x.algebra.num_blocks(); ++i) {
        const int n = x.algebra.blocks[i];
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                // S = legs part of x against the E_pq slice of block i
                cmat s(d, d);
                for (int u = 0; u < d; ++u)
                    for (int v = 0; v < d; ++v)
                        s(u, v) = x.blocks[i](p * d + u, q * d + v);
                if (s.norm() == 0.0)
                    continue;
                TensorElement g = unvec(gamma.codomain_algebra, gamma.codomain_legs,
                                        gamma.mat.col(dom_off + p * n + q));
                for (int j = 0; j < out.algebra.num_blocks(); ++j) {
                    const int nj = out.algebra.blocks[j];
                    for (int pp = 0; pp < nj; ++pp)
                        for (int qq = 0; qq < nj; ++qq)
                            for (int w = 0; w < g_leg; ++w)
                                for (int ww = 0; ww < g_leg; ++ww) {
                                    complexd gval = g.blocks[j](pp * g_leg + w, qq * g_leg + ww);
                                    if (gval == complexd(0.0))
                                        continue;
                                    for (int u = 0; u < d; ++u)
                                        for (int v = 0; v < d; ++v)
                                            out.blocks[j](pp * (d * g_leg) + u * g_leg + w,
                                                          qq * (d * g_leg) + v * g_leg + ww) += gval * s(u, v);
                                }
                }
            }
        dom_off += n * n;
    }
    return out;
}

struct StarHomReport {
    double unital_residual = 0.0;
    double star_residual = 0.0;
    double mult_residual = 0.0;
    int failing_i = -1; // basis pair with the largest multiplicativity defect
    int failing_j = -1;
    bool pass = false;
};

/// Checks gamma(1)=1, gamma(b*)=gamma(b)* and multiplicativity on all
/// canonical basis pairs.
inline StarHomReport verify_unital_star_hom(const BLinearMap& gamma, const Tolerances& tol = {})
{
    StarHomReport rep;
    const int dim = gamma.domain.vec_dim();
    std::vector<TensorElement> images;
    images.reserve(dim);
    for (int i = 0; i < dim; ++i)
        images.push_back(gamma.apply(b_basis_element(gamma.domain, i)));

    rep.unital_residual = distance(gamma.apply(TensorElement::identity(gamma.domain)),
                                   TensorElement::identity(gamma.codomain_algebra, gamma.codomain_legs));
    for (int i = 0; i < dim; ++i) {
        int iadj = b_basis_adjoint_index(gamma.domain, i);
        rep.star_residual = std::max(rep.star_residual, distance(images[iadj], images[i].adjoint()));
    }
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            BElement prod = b_basis_element(gamma.domain, i) * b_basis_element(gamma.domain, j);
            double r = distance(gamma.apply(prod), images[i] * images[j]);
            if (r > rep.mult_residual) {
                rep.mult_residual = r;
                rep.failing_i = i;
                rep.failing_j = j;
            }
        }
    rep.pass = rep.unital_residual < tol.algebraic && rep.star_residual < tol.algebraic &&
               rep.mult_residual < tol.algebraic;
    return rep;
}

} // namespace cleft
