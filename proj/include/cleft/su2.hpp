#pragma once

#include "cleft/common.hpp"

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace cleft::su2 {

/// Spins are stored as twice their value (2j), so half-integers stay exact.
inline int dim_of(int twoj) { return twoj + 1; }

inline std::string spin_name(int twoj)
{
    if (twoj % 2 == 0)
        return std::to_string(twoj / 2);
    return std::to_string(twoj) + "/2";
}

/// Basis ordering |j, m> with m = j, j-1, ..., -j; row index i = j - m.
inline cmat jz(int twoj)
{
    const int d = dim_of(twoj);
    cmat m = cmat::Zero(d, d);
    for (int i = 0; i < d; ++i)
        m(i, i) = (twoj - 2 * i) / 2.0;
    return m;
}

inline cmat jminus(int twoj)
{
    const int d = dim_of(twoj);
    cmat m = cmat::Zero(d, d);
    for (int i = 0; i + 1 < d; ++i) {
        double twom = twoj - 2 * i;
        // sqrt(j(j+1) - m(m-1))
        m(i + 1, i) = std::sqrt((twoj * (twoj + 2) - twom * (twom - 2)) / 4.0);
    }
    return m;
}

inline cmat jplus(int twoj) { return jminus(twoj).adjoint(); }

inline cmat op_on_first(const cmat& a, int d2) { return kron(a, cmat::Identity(d2, d2)); }
inline cmat op_on_second(int d1, const cmat& a) { return kron(cmat::Identity(d1, d1), a); }

/// Clebsch-Gordan isometry V : V_j -> V_{j1} (x) V_{j2} in the
/// Condon-Shortley convention, generated by lowering from the highest
/// weight state. Columns are |j, m> for m = j down to -j.
inline cmat clebsch_gordan(int twoj1, int twoj2, int twoj)
{
    if (twoj < std::abs(twoj1 - twoj2) || twoj > twoj1 + twoj2 || (twoj1 + twoj2 - twoj) % 2 != 0)
        throw spec_error("clebsch_gordan: (" + spin_name(twoj1) + "," + spin_name(twoj2) + "," +
                         spin_name(twoj) + ") violates the triangle rule");
    const int d1 = dim_of(twoj1);
    const int d2 = dim_of(twoj2);
    const int d = dim_of(twoj);

    cmat jp_tot = op_on_first(jplus(twoj1), d2) + op_on_second(d1, jplus(twoj2));
    cmat jm_tot = op_on_first(jminus(twoj1), d2) + op_on_second(d1, jminus(twoj2));

    // weight space m = j inside V_{j1} (x) V_{j2}
    std::vector<int> weight_idx;
    for (int i1 = 0; i1 < d1; ++i1)
        for (int i2 = 0; i2 < d2; ++i2)
            if ((twoj1 - 2 * i1) + (twoj2 - 2 * i2) == twoj)
                weight_idx.push_back(i1 * d2 + i2);

    // highest weight vector: the kernel of J_+ restricted to the weight
    // space (one-dimensional, tensor products of su2 are multiplicity-free)
    cmat restricted(d1 * d2, static_cast<int>(weight_idx.size()));
    restricted.setZero();
    for (std::size_t c = 0; c < weight_idx.size(); ++c)
        restricted.col(static_cast<Eigen::Index>(c)) = jp_tot.col(weight_idx[c]);
    Eigen::JacobiSVD<cmat> svd(restricted, Eigen::ComputeFullV);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-10 * std::max(svd.singularValues()(0), 1.0))
            ++rank;
    if (static_cast<int>(weight_idx.size()) - rank != 1)
        throw consistency_error("clebsch_gordan: highest weight space is not one-dimensional");
    cvec coeff = svd.matrixV().col(svd.matrixV().cols() - 1);

    cvec top = cvec::Zero(d1 * d2);
    for (std::size_t c = 0; c < weight_idx.size(); ++c)
        top(weight_idx[c]) = coeff(static_cast<Eigen::Index>(c));
    top /= top.norm();
    // Condon-Shortley: the coefficient at maximal m1 is positive real
    for (std::size_t c = 0; c < weight_idx.size(); ++c) {
        complexd e = top(weight_idx[c]); // weight_idx is ordered by increasing i1
        if (std::abs(e) > 1e-12) {
            top *= std::conj(e) / std::abs(e);
            break;
        }
    }

    cmat v(d1 * d2, d);
    v.col(0) = top;
    for (int col = 1; col < d; ++col) {
        double twom = twoj - 2 * (col - 1);
        double norm = std::sqrt((twoj * (twoj + 2) - twom * (twom - 2)) / 4.0);
        v.col(col) = jm_tot * v.col(col - 1) / norm;
    }
    return v;
}

/// Clebsch-Gordan data for all spins up to a cutoff, with the parity
/// grading spin -> 2j mod 2.
struct Su2FusionData {
    int twice_jmax = 0;
    std::map<std::array<int, 3>, cmat> intertwiners; // key (2j1, 2j2, 2j)

    static int parity(int twoj) { return twoj % 2; }

    const cmat& cg(int twoj1, int twoj2, int twoj) const
    {
        auto it = intertwiners.find({twoj1, twoj2, twoj});
        if (it == intertwiners.end())
            throw spec_error("fusion data: triple (" + spin_name(twoj1) + "," + spin_name(twoj2) + "," +
                             spin_name(twoj) + ") is beyond the cutoff");
        return it->second;
    }
};

inline Su2FusionData fusion_data(int twice_jmax, double tol = 1e-10)
{
    Su2FusionData f;
    f.twice_jmax = twice_jmax;
    for (int twoa = 0; twoa <= twice_jmax; ++twoa)
        for (int twob = 0; twoa + twob <= twice_jmax; ++twob)
            for (int twoj = std::abs(twoa - twob); twoj <= twoa + twob; twoj += 2) {
                cmat v = clebsch_gordan(twoa, twob, twoj);
                if (frob_diff(v.adjoint() * v, cmat::Identity(twoj + 1, twoj + 1)) > tol)
                    throw consistency_error("fusion data: CG matrix is not an isometry");
                f.intertwiners[{twoa, twob, twoj}] = std::move(v);
            }
    return f;
}

/// Largest ladder/weight equivariance defect of a CG isometry.
inline double ladder_equivariance_residual(int twoj1, int twoj2, int twoj, const cmat& v)
{
    const int d1 = dim_of(twoj1);
    const int d2 = dim_of(twoj2);
    double res = 0.0;
    res = std::max(res, frob(cmat(op_on_first(jminus(twoj1), d2) * v + op_on_second(d1, jminus(twoj2)) * v -
                                  v * jminus(twoj))));
    res = std::max(res, frob(cmat(op_on_first(jplus(twoj1), d2) * v + op_on_second(d1, jplus(twoj2)) * v -
                                  v * jplus(twoj))));
    res = std::max(res,
                   frob(cmat(op_on_first(jz(twoj1), d2) * v + op_on_second(d1, jz(twoj2)) * v - v * jz(twoj))));
    return res;
}

} // namespace cleft::su2
