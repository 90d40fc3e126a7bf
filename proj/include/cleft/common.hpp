#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace cleft {

using complexd = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;

inline constexpr double pi = 3.14159265358979323846;

/// Input is malformed: wrong shapes, bad labels, non-group tables, ...
struct spec_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerically inconsistent data: ranks disagreeing with character counts,
/// non-integer multiplicities, incomplete decompositions.
struct consistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A mathematical verification failed where a passing result was required.
struct verification_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Residual thresholds. `algebraic` guards operator identities, `character`
/// guards sums that are exact in exact arithmetic.
struct Tolerances {
    double algebraic = 1e-9;
    double character = 1e-12;
};

inline complexd unit_phase(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// exp(2*pi*i * num/den)
inline complexd root_of_unity(long num, long den)
{
    return unit_phase(2.0 * pi * static_cast<double>(num) / static_cast<double>(den));
}

inline cmat kron(const cmat& a, const cmat& b)
{
    cmat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline double frob(const cmat& m) { return m.norm(); }

inline double frob_diff(const cmat& a, const cmat& b) { return (a - b).norm(); }

inline double operator_norm(const cmat& m)
{
    if (m.rows() == 0 || m.cols() == 0)
        return 0.0;
    Eigen::JacobiSVD<cmat> svd(m);
    return svd.singularValues()(0);
}

/// Number of singular values above rel_cut * sigma_max.
inline int numerical_rank(const cmat& m, double rel_cut = 1e-7)
{
    if (m.rows() == 0 || m.cols() == 0)
        return 0;
    Eigen::JacobiSVD<cmat> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0)
        return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_cut * sv(0))
            ++r;
    return r;
}

/// Deterministic stream of standard complex Gaussians (Box-Muller over
/// mt19937_64, so results do not depend on the standard library's
/// distribution implementations).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform()
    {
        // in (0, 1]
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1p-53;
    }

    double gaussian()
    {
        double u = uniform();
        double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * pi * v);
    }

    complexd cgaussian() { return {gaussian(), gaussian()}; }

    cmat cgaussian_matrix(int rows, int cols)
    {
        cmat m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                m(i, j) = cgaussian();
        return m;
    }

    /// Haar-ish random unitary via QR of a complex Gaussian matrix.
    cmat unitary(int n)
    {
        cmat g = cgaussian_matrix(n, n);
        Eigen::HouseholderQR<cmat> qr(g);
        cmat q = qr.householderQ();
        cmat r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < n; ++j) {
            complexd d = r(j, j);
            double a = std::abs(d);
            if (a > 0)
                q.col(j) *= d / a;
        }
        return q;
    }

private:
    std::mt19937_64 gen_;
};

} // namespace cleft
