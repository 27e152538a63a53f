#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sbd/hammat.hpp"
#include "sbd/types.hpp"

namespace sbd {

/// Matrix-free view of a square operator: apply(x, y) sets y = M x.
struct LinearOperator {
    Index dim = 0;
    std::function<void(const Vector&, Vector&)> apply;
    /// Upper bound on the spectrum; used by the smallest-eigenvalue shift.
    double gershgorin_upper = 0.0;
};

LinearOperator make_operator(const CsrMatrix& m);
LinearOperator make_operator(const DenseMatrix& m);

enum class Which { Smallest, Largest };
enum class EigMethod { Krylov, Arnoldi, Dense };

const char* to_string(EigMethod m) noexcept;

struct EigResult {
    double value = 0.0;
    /// ||H v - lambda v|| / ||v|| for the returned Ritz vector.
    double residual = 0.0;
    /// Restart sweeps for Krylov methods, 0 for dense.
    int iterations = 0;
    EigMethod method = EigMethod::Krylov;
    Vector vector;
};

struct KrylovOptions {
    double tol = 1e-8;
    /// Restart sweeps; 0 means 10 * dim.
    int max_iter = 0;
    std::uint64_t seed = 0;
    /// Basis size before a thick restart.
    int subspace = 40;
};

/// Extreme eigenvalue of a Hermitian operator by thick-restart Lanczos with
/// full reorthogonalization. Smallest-eigenvalue queries run on
/// sigma I - M with sigma the Gershgorin bound and map back.
/// Throws NoConvergence after max_iter restarts.
EigResult krylov_extreme(const LinearOperator& op, Which which, const KrylovOptions& opts = {});
EigResult krylov_extreme(const CsrMatrix& m, Which which, const KrylovOptions& opts = {});
EigResult krylov_extreme(const DenseMatrix& m, Which which, const KrylovOptions& opts = {});

/// Restarted Arnoldi on a general operator; selects by real part and reports
/// the real part. For diagnosing intermediates that drifted from Hermitian.
EigResult arnoldi_extreme(const LinearOperator& op, Which which, const KrylovOptions& opts = {});

inline constexpr Index kDenseOracleCap = 4096;

/// Full spectrum of a Hermitian matrix, ascending. Throws CapExceeded above 4096.
std::vector<double> dense_oracle(const DenseMatrix& m);
/// Full spectrum of a general matrix, sorted ascending by real part.
std::vector<cplx> dense_oracle_general(const DenseMatrix& m);

/// Extreme eigenvalue via the dense oracle, with its eigenvector.
EigResult dense_extreme(const DenseMatrix& m, Which which);

}  // namespace sbd
