#pragma once

#include <vector>

#include "sbd/types.hpp"

namespace sbd {

/// Quadrants [[a, b], [c, d]] of an even-dimensional square matrix.
struct BlockPartition {
    DenseMatrix a;
    DenseMatrix b;
    DenseMatrix c;
    DenseMatrix d;

    Index half() const noexcept { return a.rows(); }
};

/// Throws OddDimension when m has odd size; callers pad first.
BlockPartition split(const DenseMatrix& m);
DenseMatrix reassemble(const BlockPartition& p);

/// Relative pivot threshold below which a block counts as singular.
inline constexpr double kSingularPivotRatio = 1e-12;

/// LU factorization with partial pivoting, P A = L U. Construction throws
/// Singular when a pivot satisfies |pivot| < ratio * max|a_ij|.
class LuFactorization {
public:
    explicit LuFactorization(const DenseMatrix& a, double pivot_ratio = kSingularPivotRatio);

    /// X with A X = rhs.
    DenseMatrix solve(const DenseMatrix& rhs) const;
    Vector solve(const Vector& rhs) const;

    Index dim() const noexcept { return lu_.rows(); }
    /// Smallest |pivot| / max|a_ij| seen during elimination.
    double min_pivot_ratio() const noexcept { return min_pivot_ratio_; }

private:
    void solve_in_place(Eigen::Ref<DenseMatrix> x) const;

    DenseMatrix lu_;
    std::vector<Index> perm_;
    double min_pivot_ratio_ = 1.0;
};

/// X with a X = rhs, computed column by column from one factorization of a.
DenseMatrix solve_block(const DenseMatrix& a, const DenseMatrix& rhs);

/// X with X a = rhs (a^T X^T = rhs^T).
DenseMatrix solve_block_right(const DenseMatrix& a, const DenseMatrix& rhs);

/// Product a*b with entries below drop_rel * max|result| set to zero to
/// contain fill-in. drop_rel = 0 keeps everything.
DenseMatrix product(const DenseMatrix& a, const DenseMatrix& b, double drop_rel = 1e-14);

/// Which correction term the flexibilized block determinant uses.
enum class DetVariant {
    /// A D - A C A^{-1} B (the non-commutative secular form at Gamma = 0).
    Sridhara,
    /// A D - C A^{-1} B, the plain Schur-complement-style correction.
    Schur,
};

/// A D - A C (A^{-1} B). A^{-1} is never formed; throws Singular when A is.
DenseMatrix det_block(const BlockPartition& p, DetVariant variant = DetVariant::Sridhara, double drop_rel = 1e-14);

/// A D - C B, used when A is singular.
DenseMatrix det_prime(const BlockPartition& p, double drop_rel = 1e-14);

}  // namespace sbd
