#include "sbd/blockops.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace sbd {

BlockPartition split(const DenseMatrix& m)
{
    if (m.rows() != m.cols())
        throw Error(ErrorKind::DomainError, "split needs a square matrix");
    if (m.rows() % 2 != 0)
        throw Error(ErrorKind::OddDimension, "dimension " + std::to_string(m.rows()) + " is odd; pad first");
    const Index h = m.rows() / 2;
    return {m.topLeftCorner(h, h), m.topRightCorner(h, h), m.bottomLeftCorner(h, h), m.bottomRightCorner(h, h)};
}

DenseMatrix reassemble(const BlockPartition& p)
{
    const Index h = p.half();
    DenseMatrix m(2 * h, 2 * h);
    m << p.a, p.b, p.c, p.d;
    return m;
}

LuFactorization::LuFactorization(const DenseMatrix& a, double pivot_ratio) : lu_(a), perm_(a.rows())
{
    if (a.rows() != a.cols())
        throw Error(ErrorKind::DomainError, "LU needs a square matrix");
    const Index n = a.rows();
    std::iota(perm_.begin(), perm_.end(), Index{0});
    const double scale = a.cwiseAbs().maxCoeff();
    if (n == 0)
        return;
    if (scale == 0.0)
        throw Error(ErrorKind::Singular, "zero matrix");

    for (Index k = 0; k < n; ++k) {
        Index pivot_row = k;
        double best = std::abs(lu_(k, k));
        for (Index i = k + 1; i < n; ++i) {
            const double v = std::abs(lu_(i, k));
            if (v > best) {
                best = v;
                pivot_row = i;
            }
        }
        min_pivot_ratio_ = std::min(min_pivot_ratio_, best / scale);
        if (best < pivot_ratio * scale)
            throw Error(ErrorKind::Singular, "pivot " + std::to_string(best) + " at column " + std::to_string(k) +
                                                 " below threshold " + std::to_string(pivot_ratio * scale));
        if (pivot_row != k) {
            lu_.row(k).swap(lu_.row(pivot_row));
            std::swap(perm_[k], perm_[pivot_row]);
        }
        const cplx inv = 1.0 / lu_(k, k);
        const Index rest = n - k - 1;
        if (rest == 0)
            continue;
        lu_.col(k).tail(rest) *= inv;
        lu_.bottomRightCorner(rest, rest).noalias() -= lu_.col(k).tail(rest) * lu_.row(k).tail(rest);
    }
}

void LuFactorization::solve_in_place(Eigen::Ref<DenseMatrix> x) const
{
    lu_.triangularView<Eigen::UnitLower>().solveInPlace(x);
    lu_.triangularView<Eigen::Upper>().solveInPlace(x);
}

DenseMatrix LuFactorization::solve(const DenseMatrix& rhs) const
{
    if (rhs.rows() != dim())
        throw Error(ErrorKind::DomainError, "right-hand side has wrong row count");
    DenseMatrix x(rhs.rows(), rhs.cols());
    for (Index i = 0; i < dim(); ++i)
        x.row(i) = rhs.row(perm_[i]);
    solve_in_place(x);
    return x;
}

Vector LuFactorization::solve(const Vector& rhs) const
{
    DenseMatrix x = solve(DenseMatrix(rhs));
    return x.col(0);
}

DenseMatrix solve_block(const DenseMatrix& a, const DenseMatrix& rhs)
{
    return LuFactorization(a).solve(rhs);
}

DenseMatrix solve_block_right(const DenseMatrix& a, const DenseMatrix& rhs)
{
    return LuFactorization(a.transpose()).solve(DenseMatrix(rhs.transpose())).transpose();
}

DenseMatrix product(const DenseMatrix& a, const DenseMatrix& b, double drop_rel)
{
    DenseMatrix r = a * b;
    if (drop_rel > 0.0 && r.size() > 0) {
        const double cut = drop_rel * r.cwiseAbs().maxCoeff();
        for (Index j = 0; j < r.cols(); ++j)
            for (Index i = 0; i < r.rows(); ++i)
                if (std::abs(r(i, j)) < cut)
                    r(i, j) = 0.0;
    }
    return r;
}

DenseMatrix det_block(const BlockPartition& p, DetVariant variant, double drop_rel)
{
    const DenseMatrix a_inv_b = solve_block(p.a, p.b);
    const DenseMatrix correction = variant == DetVariant::Sridhara
                                       ? product(product(p.a, p.c, drop_rel), a_inv_b, drop_rel)
                                       : product(p.c, a_inv_b, drop_rel);
    return product(p.a, p.d, drop_rel) - correction;
}

DenseMatrix det_prime(const BlockPartition& p, double drop_rel)
{
    return product(p.a, p.d, drop_rel) - product(p.c, p.b, drop_rel);
}

}  // namespace sbd
