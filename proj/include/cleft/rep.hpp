#pragma once

#include "cleft/irrep.hpp"

#include <string>
#include <vector>

namespace cleft {

/// A concrete (not necessarily irreducible) unitary representation.
struct Rep {
    int dim = 0;
    std::vector<cmat> matrices;

    complexd character(int g) const { return matrices[g].trace(); }
};

inline Rep rep_of(const Irrep& r) { return Rep{r.dim, r.matrices}; }

inline Rep tensor_rep(const Rep& a, const Rep& b)
{
    Rep out;
    out.dim = a.dim * b.dim;
    out.matrices.reserve(a.matrices.size());
    for (std::size_t g = 0; g < a.matrices.size(); ++g)
        out.matrices.push_back(kron(a.matrices[g], b.matrices[g]));
    return out;
}

inline Rep direct_sum_rep(const Rep& a, const Rep& b)
{
    Rep out;
    out.dim = a.dim + b.dim;
    out.matrices.reserve(a.matrices.size());
    for (std::size_t g = 0; g < a.matrices.size(); ++g) {
        cmat m = cmat::Zero(out.dim, out.dim);
        m.topLeftCorner(a.dim, a.dim) = a.matrices[g];
        m.bottomRightCorner(b.dim, b.dim) = b.matrices[g];
        out.matrices.push_back(std::move(m));
    }
    return out;
}

/// A formal representation expression over catalog irrep labels.
struct RepHandle {
    enum class Kind { Atom, Tensor, DirectSum };

    Kind kind = Kind::Atom;
    std::string label;
    std::vector<RepHandle> parts;

    static RepHandle atom(std::string l)
    {
        RepHandle h;
        h.kind = Kind::Atom;
        h.label = std::move(l);
        return h;
    }
    static RepHandle tensor(RepHandle a, RepHandle b)
    {
        RepHandle h;
        h.kind = Kind::Tensor;
        h.parts = {std::move(a), std::move(b)};
        return h;
    }
    static RepHandle direct_sum(RepHandle a, RepHandle b)
    {
        RepHandle h;
        h.kind = Kind::DirectSum;
        h.parts = {std::move(a), std::move(b)};
        return h;
    }

    bool is_atom() const { return kind == Kind::Atom; }

    Rep evaluate(const GroupData& gd) const
    {
        switch (kind) {
        case Kind::Atom:
            return rep_of(gd.irreps[gd.index_of(label)]);
        case Kind::Tensor: {
            Rep acc = parts.front().evaluate(gd);
            for (std::size_t i = 1; i < parts.size(); ++i)
                acc = tensor_rep(acc, parts[i].evaluate(gd));
            return acc;
        }
        case Kind::DirectSum: {
            Rep acc = parts.front().evaluate(gd);
            for (std::size_t i = 1; i < parts.size(); ++i)
                acc = direct_sum_rep(acc, parts[i].evaluate(gd));
            return acc;
        }
        }
        throw spec_error("invalid RepHandle");
    }

    std::string to_string() const
    {
        switch (kind) {
        case Kind::Atom:
            return label;
        case Kind::Tensor: {
            std::string s = "(" + parts[0].to_string();
            for (std::size_t i = 1; i < parts.size(); ++i)
                s += "*" + parts[i].to_string();
            return s + ")";
        }
        case Kind::DirectSum: {
            std::string s = "(" + parts[0].to_string();
            for (std::size_t i = 1; i < parts.size(); ++i)
                s += "+" + parts[i].to_string();
            return s + ")";
        }
        }
        return "?";
    }
};

} // namespace cleft
