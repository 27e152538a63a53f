#include "sbd/matsqrt.hpp"

#include <cmath>
#include <iostream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "sbd/blockops.hpp"

namespace sbd {

double sqrt_residual(const DenseMatrix& s, const DenseMatrix& m)
{
    const double denom = m.norm();
    const double num = (s * s - m).norm();
    return denom > 0.0 ? num / denom : num;
}

DenseMatrix dense_principal_sqrt(const DenseMatrix& m)
{
    return m.sqrt();
}

namespace {

bool touches_negative_axis(const DenseMatrix& m)
{
    const Eigen::ComplexSchur<DenseMatrix> schur(m, false);
    const auto& t = schur.matrixT();
    const double scale = std::max(t.cwiseAbs().maxCoeff(), 1e-300);
    for (Index i = 0; i < t.rows(); ++i) {
        const cplx ev = t(i, i);
        if (ev.real() < -1e-12 * scale && std::abs(ev.imag()) <= 1e-10 * scale)
            return true;
    }
    return false;
}

SqrtResult fallback_result(const DenseMatrix& m)
{
    SqrtResult r;
    r.value = dense_principal_sqrt(m);
    r.relative_residual = sqrt_residual(r.value, m);
    r.fallback = true;
    r.branch_cut_warning = touches_negative_axis(m);
    if (r.branch_cut_warning)
        std::cerr << "warning: matrix square root argument has eigenvalues on the negative real axis; "
                     "principal branch is ill-conditioned\n";
    return r;
}

}  // namespace

SqrtResult newton_sqrt(const DenseMatrix& m, const SqrtConfig& cfg)
{
    if (m.rows() != m.cols() || m.rows() < 1)
        throw Error(ErrorKind::DomainError, "square root needs a non-empty square matrix");
    if (cfg.iterations < 1)
        throw Error(ErrorKind::DomainError, "iterations must be >= 1");
    const cplx trace = m.trace();
    if (std::abs(trace) < 1e-14)
        throw Error(ErrorKind::SeedDegenerate, "trace is zero; the fourth-root seed is degenerate");

    const bool fallback_allowed = cfg.residual_check && m.rows() <= cfg.fallback_dim_cap;
    const Index n = m.rows();
    DenseMatrix a = std::pow(trace, 0.25) * DenseMatrix::Identity(n, n);
    try {
        for (int r = 0; r < cfg.iterations; ++r)
            a = 0.5 * (a + solve_block_right(a, m));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Singular)
            throw;
        if (!fallback_allowed)
            throw Error(ErrorKind::IterationSingular, e.what());
        return fallback_result(m);
    }

    SqrtResult result;
    result.relative_residual = sqrt_residual(a, m);
    result.value = std::move(a);
    if (fallback_allowed && !(result.relative_residual <= cfg.residual_tol))
        return fallback_result(m);
    return result;
}

}  // namespace sbd
