#include <doctest.h>

#include <cmath>

#include "sbd/eig.hpp"
#include "sbd/hammat.hpp"
#include "sbd/random.hpp"
#include "test_support.hpp"

using namespace sbd;

TEST_CASE("krylov on small exact cases")
{
    Eigen::VectorXcd d(8);
    for (Index i = 0; i < 8; ++i)
        d[i] = static_cast<double>(i + 1);
    const DenseMatrix diag8 = d.asDiagonal();
    CHECK(krylov_extreme(diag8, Which::Smallest).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(krylov_extreme(diag8, Which::Largest).value == doctest::Approx(8.0).epsilon(1e-12));

    DenseMatrix m(2, 2);
    m << 2, 1, 1, 3;
    const EigResult r = krylov_extreme(m, Which::Smallest);
    CHECK(r.value == doctest::Approx((5.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
    CHECK(r.value == doctest::Approx(1.381966).epsilon(1e-6));
    CHECK(r.residual <= 1e-8);
    CHECK(r.method == EigMethod::Krylov);
}

TEST_CASE("dense oracle")
{
    const auto id = dense_oracle(DenseMatrix::Identity(4, 4));
    CHECK(id == std::vector<double>{1, 1, 1, 1});
    QubitHamiltonian zz;
    zz.n_qubits = 2;
    zz.terms = {{1.0, "ZZ"}};
    const auto ev = dense_oracle(realize(zz).to_dense());
    CHECK(testing::max_deviation(ev, {-1, -1, 1, 1}) < 1e-14);

    DenseMatrix rot(2, 2);
    rot << 0, 1, -1, 0;
    const auto g = dense_oracle_general(rot);
    CHECK(std::abs(g[0].imag()) == doctest::Approx(1.0));
    CHECK_THROWS_AS(dense_oracle(DenseMatrix::Identity(kDenseOracleCap + 1, 1)), Error);
}

TEST_CASE("krylov agrees with the dense oracle on random Hermitian matrices")
{
    for (Index dim : {2, 3, 7, 16, 33, 64, 100, 128, 256}) {
        const DenseMatrix m = random_hermitian(dim, 500 + static_cast<std::uint64_t>(dim));
        const auto oracle = dense_oracle(m);
        const EigResult lo = krylov_extreme(m, Which::Smallest);
        const EigResult hi = krylov_extreme(CsrMatrix::from_dense(m), Which::Largest);
        CHECK(std::abs(lo.value - oracle.front()) <= 1e-8);
        CHECK(std::abs(hi.value - oracle.back()) <= 1e-8);
        CHECK(lo.residual <= 1e-8);
        CHECK(hi.residual <= 1e-8);
    }
}

TEST_CASE("tfim ground state: Krylov, dense and frozen value agree")
{
    const CsrMatrix h4 = realize(gen_tfim(4, 1.0, 1.0));
    CHECK(std::abs(krylov_extreme(h4, Which::Smallest).value - dense_oracle(h4.to_dense()).front()) <= 1e-8);
    // Frozen from an independent numpy eigensolve.
    const CsrMatrix h8 = realize(gen_tfim(8, 1.0, 1.0));
    CHECK(krylov_extreme(h8, Which::Smallest).value == doctest::Approx(-9.837951447459417).epsilon(1e-10));
}

TEST_CASE("variational bound against random probes")
{
    const DenseMatrix m = random_hermitian(48, 8);
    const double lo = krylov_extreme(m, Which::Smallest).value;
    Rng rng(99);
    for (int t = 0; t < 50; ++t) {
        Vector v(48);
        for (Index i = 0; i < 48; ++i)
            v[i] = cplx(rng.normal(), rng.normal());
        const double rq = (v.dot(m * v)).real() / v.squaredNorm();
        CHECK(lo <= rq + 1e-8);
    }
}

TEST_CASE("seed determinism")
{
    const DenseMatrix m = random_hermitian(90, 4);
    KrylovOptions opts;
    opts.seed = 17;
    const EigResult a = krylov_extreme(m, Which::Smallest, opts);
    const EigResult b = krylov_extreme(m, Which::Smallest, opts);
    CHECK(a.value == b.value);
    CHECK(a.iterations == b.iterations);
    CHECK(a.residual == b.residual);
}

TEST_CASE("degenerate and clustered spectra")
{
    Eigen::VectorXcd d = Eigen::VectorXcd::Constant(64, 1.0);
    d[10] = d[20] = d[30] = -2.0;
    const EigResult r = krylov_extreme(DenseMatrix(d.asDiagonal()), Which::Smallest);
    CHECK(r.value == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(krylov_extreme(DenseMatrix(DenseMatrix::Identity(32, 32)), Which::Largest).value ==
          doctest::Approx(1.0));
}

TEST_CASE("no convergence is reported")
{
    KrylovOptions opts;
    opts.max_iter = 1;
    opts.subspace = 3;
    opts.tol = 1e-15;
    CHECK_THROWS_AS(krylov_extreme(random_hermitian(200, 3), Which::Smallest, opts), Error);
}

TEST_CASE("arnoldi diagnostic path")
{
    const DenseMatrix m = random_hermitian(40, 12);
    const auto oracle = dense_oracle(m);
    CHECK(std::abs(arnoldi_extreme(make_operator(m), Which::Smallest).value - oracle.front()) <= 1e-8);
    CHECK(std::abs(arnoldi_extreme(make_operator(m), Which::Largest).value - oracle.back()) <= 1e-8);

    // Slightly non-Hermitian drift still yields the real part of the extreme eigenvalue.
    DenseMatrix drift = m;
    drift(0, 1) += 1e-6;
    const auto general = dense_oracle_general(drift);
    CHECK(std::abs(arnoldi_extreme(make_operator(drift), Which::Largest).value - general.back().real()) <= 1e-6);
}

TEST_CASE("dense_extreme returns an eigenvector")
{
    const DenseMatrix m = random_hermitian(20, 6);
    const EigResult r = dense_extreme(m, Which::Largest);
    CHECK((m * r.vector - r.value * r.vector).norm() < 1e-10);
    CHECK(r.method == EigMethod::Dense);
}
