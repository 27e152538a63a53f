#include "sbd/eig.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "sbd/random.hpp"

namespace sbd {

const char* to_string(EigMethod m) noexcept
{
    switch (m) {
    case EigMethod::Krylov: return "krylov";
    case EigMethod::Arnoldi: return "arnoldi";
    case EigMethod::Dense: return "dense";
    }
    return "unknown";
}

LinearOperator make_operator(const CsrMatrix& m)
{
    return {m.dim(), [&m](const Vector& x, Vector& y) { m.multiply(x, y); }, gershgorin_upper(m)};
}

LinearOperator make_operator(const DenseMatrix& m)
{
    return {m.rows(), [&m](const Vector& x, Vector& y) { y.noalias() = m * x; }, gershgorin_upper(m)};
}

namespace {

Vector random_unit(Index n, std::uint64_t seed)
{
    Rng rng(seed);
    Vector v(n);
    for (Index i = 0; i < n; ++i)
        v[i] = cplx(rng.normal(), rng.normal());
    return v / v.norm();
}

/// Orthogonalizes v against the first k columns of basis (two passes of
/// classical Gram-Schmidt) and returns the remaining norm.
double orthogonalize(const DenseMatrix& basis, Index k, Vector& v)
{
    for (int pass = 0; pass < 2; ++pass) {
        if (k == 0)
            break;
        const Vector coeffs = basis.leftCols(k).adjoint() * v;
        v.noalias() -= basis.leftCols(k) * coeffs;
    }
    return v.norm();
}

int resolve_max_iter(const KrylovOptions& opts, Index dim)
{
    return opts.max_iter > 0 ? opts.max_iter : static_cast<int>(std::min<Index>(10 * dim, 1 << 30));
}

void check_dim(Index dim)
{
    if (dim < 2)
        throw Error(ErrorKind::DomainError, "Krylov eigensolver needs dim >= 2");
}

/// Thick-restart Lanczos for the largest eigenvalue of a Hermitian operator.
EigResult lanczos_largest(const LinearOperator& op, const KrylovOptions& opts)
{
    const Index n = op.dim;
    const Index m = std::clamp<Index>(opts.subspace, 2, n);
    const Index keep = std::max<Index>(1, m / 2);
    const int max_iter = resolve_max_iter(opts, n);

    DenseMatrix basis(n, m);
    DenseMatrix images(n, m);
    DenseMatrix proj = DenseMatrix::Zero(m, m);
    Vector next = random_unit(n, opts.seed);
    Vector image(n);
    Index k = 0;
    std::uint64_t reseed = opts.seed;

    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        while (k < m) {
            const double before = next.norm();
            const double after = orthogonalize(basis, k, next);
            if (after <= 1e-10 * std::max(before, 1e-300)) {
                // Invariant subspace found; continue from a fresh direction.
                next = random_unit(n, ++reseed);
                if (orthogonalize(basis, k, next) <= 1e-10)
                    break;
            }
            basis.col(k) = next / next.norm();
            op.apply(basis.col(k), image);
            images.col(k) = image;
            proj.block(0, k, k + 1, 1) = basis.leftCols(k + 1).adjoint() * image;
            proj.block(k, 0, 1, k) = proj.block(0, k, k, 1).adjoint();
            proj(k, k) = proj(k, k).real();
            next = image;
            ++k;
        }

        const Eigen::SelfAdjointEigenSolver<DenseMatrix> ritz(proj.topLeftCorner(k, k));
        const Eigen::VectorXd& theta = ritz.eigenvalues();
        const DenseMatrix& y = ritz.eigenvectors();
        const Vector x = basis.leftCols(k) * y.col(k - 1);
        const Vector r = images.leftCols(k) * y.col(k - 1) - theta[k - 1] * x;
        const double res = r.norm() / x.norm();

        if (res <= opts.tol || k == n) {
            EigResult out;
            out.value = theta[k - 1];
            out.iterations = sweep;
            out.vector = x / x.norm();
            out.method = EigMethod::Krylov;
            Vector check(n);
            op.apply(out.vector, check);
            out.residual = (check - out.value * out.vector).norm();
            if (out.residual <= opts.tol || k == n)
                return out;
        }

        // Thick restart: keep the top Ritz vectors; the shared residual
        // direction continues the Krylov decomposition.
        const Index p = std::min(keep, k - 1);
        const DenseMatrix y_keep = y.rightCols(p);
        basis.leftCols(p) = basis.leftCols(k) * y_keep;
        images.leftCols(p) = images.leftCols(k) * y_keep;
        proj.setZero();
        for (Index i = 0; i < p; ++i)
            proj(i, i) = theta[k - p + i];
        next = r;
        k = p;
    }
    throw Error(ErrorKind::NoConvergence, "Lanczos did not reach tolerance " + std::to_string(opts.tol) +
                                              " within " + std::to_string(max_iter) + " restarts");
}

}  // namespace

EigResult krylov_extreme(const LinearOperator& op, Which which, const KrylovOptions& opts)
{
    check_dim(op.dim);
    if (which == Which::Largest)
        return lanczos_largest(op, opts);

    const double sigma = op.gershgorin_upper;
    LinearOperator shifted{op.dim,
                           [&op, sigma](const Vector& x, Vector& y) {
                               op.apply(x, y);
                               y = sigma * x - y;
                           },
                           0.0};
    EigResult r = lanczos_largest(shifted, opts);
    r.value = sigma - r.value;
    Vector check(op.dim);
    op.apply(r.vector, check);
    r.residual = (check - r.value * r.vector).norm();
    return r;
}

EigResult krylov_extreme(const CsrMatrix& m, Which which, const KrylovOptions& opts)
{
    return krylov_extreme(make_operator(m), which, opts);
}

EigResult krylov_extreme(const DenseMatrix& m, Which which, const KrylovOptions& opts)
{
    return krylov_extreme(make_operator(m), which, opts);
}

EigResult arnoldi_extreme(const LinearOperator& op, Which which, const KrylovOptions& opts)
{
    check_dim(op.dim);
    const Index n = op.dim;
    const Index m = std::clamp<Index>(opts.subspace, 2, n);
    const int max_iter = resolve_max_iter(opts, n);
    Vector start = random_unit(n, opts.seed);

    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        DenseMatrix basis(n, m);
        DenseMatrix hess = DenseMatrix::Zero(m, m);
        basis.col(0) = start;
        Index k = 1;
        Vector w(n);
        for (; k <= m; ++k) {
            op.apply(basis.col(k - 1), w);
            for (int pass = 0; pass < 2; ++pass) {
                const Vector h = basis.leftCols(k).adjoint() * w;
                w.noalias() -= basis.leftCols(k) * h;
                hess.block(0, k - 1, k, 1) += h;
            }
            const double beta = w.norm();
            if (k == m || beta <= 1e-12 * hess.cwiseAbs().maxCoeff())
                break;
            hess(k, k - 1) = beta;
            basis.col(k) = w / beta;
        }
        k = std::min(k, m);

        const Eigen::ComplexEigenSolver<DenseMatrix> ces(hess.topLeftCorner(k, k));
        Index best = 0;
        for (Index i = 1; i < k; ++i) {
            const double cur = ces.eigenvalues()[i].real();
            const double ref = ces.eigenvalues()[best].real();
            if (which == Which::Largest ? cur > ref : cur < ref)
                best = i;
        }
        Vector x = basis.leftCols(k) * ces.eigenvectors().col(best);
        x /= x.norm();
        const cplx lambda = ces.eigenvalues()[best];
        Vector ax(n);
        op.apply(x, ax);
        const double res = (ax - lambda * x).norm();
        if (res <= opts.tol || k == n) {
            EigResult out;
            out.value = lambda.real();
            out.residual = res;
            out.iterations = sweep;
            out.method = EigMethod::Arnoldi;
            out.vector = x;
            return out;
        }
        start = x;
    }
    throw Error(ErrorKind::NoConvergence, "Arnoldi did not converge within " + std::to_string(max_iter) + " restarts");
}

std::vector<double> dense_oracle(const DenseMatrix& m)
{
    if (m.rows() > kDenseOracleCap)
        throw Error(ErrorKind::CapExceeded, "dense oracle limited to dim " + std::to_string(kDenseOracleCap));
    const Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

std::vector<cplx> dense_oracle_general(const DenseMatrix& m)
{
    if (m.rows() > kDenseOracleCap)
        throw Error(ErrorKind::CapExceeded, "dense oracle limited to dim " + std::to_string(kDenseOracleCap));
    const Eigen::ComplexEigenSolver<DenseMatrix> es(m, false);
    std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.begin(), out.end(), [](cplx l, cplx r) { return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag(); });
    return out;
}

EigResult dense_extreme(const DenseMatrix& m, Which which)
{
    if (m.rows() > kDenseOracleCap)
        throw Error(ErrorKind::CapExceeded, "dense oracle limited to dim " + std::to_string(kDenseOracleCap));
    const Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m);
    const Index idx = which == Which::Smallest ? 0 : m.rows() - 1;
    EigResult out;
    out.value = es.eigenvalues()[idx];
    out.vector = es.eigenvectors().col(idx);
    out.residual = (m * out.vector - out.value * out.vector).norm();
    out.method = EigMethod::Dense;
    return out;
}

}  // namespace sbd
