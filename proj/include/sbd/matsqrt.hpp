#pragma once

#include "sbd/types.hpp"

namespace sbd {

struct SqrtConfig {
    /// Number of Newton updates after the seed (6 means A_0 .. A_6).
    int iterations = 6;
    /// Recompute densely when ||A^2 - M||_F > residual_tol * ||M||_F.
    bool residual_check = true;
    double residual_tol = 1e-6;
    Index fallback_dim_cap = 512;
};

struct SqrtResult {
    DenseMatrix value;
    /// ||value^2 - M||_F / ||M||_F of the returned matrix.
    double relative_residual = 0.0;
    /// The Newton result was replaced by the dense principal root.
    bool fallback = false;
    /// M has eigenvalues on the closed negative real axis, where the
    /// principal root is discontinuous. Only detected on the fallback path.
    bool branch_cut_warning = false;
};

/// Principal square root by the Newton recurrence
///   A_{r+1} = (A_r + M A_r^{-1}) / 2,   A_0 = (Tr M)^{1/4} I,
/// run for exactly cfg.iterations updates. Each M A_r^{-1} is a right
/// linear solve. Throws SeedDegenerate when |Tr M| < 1e-14 and
/// IterationSingular when an iterate is singular and no fallback is allowed.
SqrtResult newton_sqrt(const DenseMatrix& m, const SqrtConfig& cfg = {});

/// Principal root via a complex Schur decomposition. Used as the fallback
/// and as the reference in diagnostics.
DenseMatrix dense_principal_sqrt(const DenseMatrix& m);

/// ||s^2 - m||_F / ||m||_F (0 for a zero m with zero s).
double sqrt_residual(const DenseMatrix& s, const DenseMatrix& m);

}  // namespace sbd
