#include <doctest.h>

#include <filesystem>

#include "sbd/eig.hpp"
#include "sbd/hammat.hpp"
#include "sbd/random.hpp"
#include "test_support.hpp"

using namespace sbd;
using sbd::testing::max_deviation;
using sbd::testing::pauli_kron;

namespace {

DenseMatrix realize_dense(const QubitHamiltonian& h) { return realize(h).to_dense(); }

QubitHamiltonian single(int n, std::initializer_list<PauliTerm> terms)
{
    QubitHamiltonian h;
    h.n_qubits = n;
    h.terms = terms;
    return h;
}

}  // namespace

TEST_CASE("realize: Pauli definitions")
{
    DenseMatrix z = realize_dense(single(1, {{1.0, "Z"}}));
    CHECK(z.isApprox(Eigen::Vector2cd(1, -1).asDiagonal().toDenseMatrix()));

    DenseMatrix zz = realize_dense(single(2, {{1.0, "ZZ"}}));
    Eigen::Vector4cd d(1, -1, -1, 1);
    CHECK(zz.isApprox(d.asDiagonal().toDenseMatrix()));

    DenseMatrix y = realize_dense(single(1, {{1.0, "Y"}}));
    CHECK(y(0, 1) == cplx(0, -1));
    CHECK(y(1, 0) == cplx(0, 1));
}

TEST_CASE("realize: a I + b X + c Z reproduces [[2,1],[1,3]]")
{
    // a + c = 2, a - c = 3, b = 1  =>  (a, b, c) = (2.5, 1, -0.5)
    DenseMatrix m = realize_dense(single(1, {{2.5, "I"}, {1.0, "X"}, {-0.5, "Z"}}));
    DenseMatrix expected(2, 2);
    expected << 2, 1, 1, 3;
    CHECK((m - expected).norm() == doctest::Approx(0.0));
}

TEST_CASE("realize: constant adds a multiple of the identity")
{
    QubitHamiltonian h = single(2, {{1.0, "ZI"}});
    h.constant = -3.0;
    DenseMatrix m = realize_dense(h);
    CHECK(m(0, 0).real() == doctest::Approx(-2.0));
    CHECK(m(3, 3).real() == doctest::Approx(-4.0));
}

TEST_CASE("realize matches the Kronecker oracle and is Hermitian on random conjugate-closed terms")
{
    const char symbols[] = {'I', 'X', 'Y', 'Z'};
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Rng rng(seed);
        const int n = 1 + static_cast<int>(rng.uniform() * 5);
        QubitHamiltonian h;
        h.n_qubits = n;
        h.constant = rng.normal();
        DenseMatrix oracle = h.constant * DenseMatrix::Identity(Index{1} << n, Index{1} << n);
        const int count = 1 + static_cast<int>(rng.uniform() * 8);
        for (int t = 0; t < count; ++t) {
            std::string w;
            for (int q = 0; q < n; ++q)
                w += symbols[static_cast<int>(rng.uniform() * 4)];
            const cplx c(rng.normal(), rng.normal());
            // A complex coefficient is only Hermitian together with its conjugate partner.
            h.terms.push_back({c, w});
            h.terms.push_back({std::conj(c), w});
            oracle += (c + std::conj(c)) * pauli_kron(w);
        }
        const CsrMatrix m = realize(h);
        CHECK(m.is_hermitian(1e-12));
        CHECK((m.to_dense() - oracle).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("realize: error paths")
{
    QubitHamiltonian big = single(15, {{1.0, std::string(15, 'Z')}});
    CHECK_THROWS_AS(realize(big), Error);
    try {
        realize(big);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::CapExceeded);
    }
    CHECK_NOTHROW(realize(single(3, {{1.0, "ZZZ"}}), 3));

    auto kind_of = [](const QubitHamiltonian& h) {
        try {
            realize(h);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::IoError;
    };
    CHECK(kind_of(single(2, {{1.0, "XA"}})) == ErrorKind::BadWord);
    CHECK(kind_of(single(2, {{1.0, "X"}})) == ErrorKind::BadWord);
    CHECK(kind_of(single(1, {{cplx(0, 1), "X"}})) == ErrorKind::NotHermitian);
    CHECK(kind_of(single(1, {{cplx(NAN, 0), "X"}})) == ErrorKind::DomainError);
}

TEST_CASE("pad_to_pow2")
{
    SUBCASE("power of two is a no-op")
    {
        const CsrMatrix m = CsrMatrix::from_dense(random_hermitian(16, 3));
        CHECK(pad_to_pow2(m, 7.0) == m);
    }
    SUBCASE("dim 3 gains one diagonal entry")
    {
        const CsrMatrix m = CsrMatrix::from_dense(random_hermitian(3, 4));
        const CsrMatrix p = pad_to_pow2(m, 100.0);
        REQUIRE(p.dim() == 4);
        CHECK(p.at(3, 3) == cplx(100.0));
        for (Index i = 0; i < 3; ++i) {
            CHECK(p.at(i, 3) == cplx(0.0));
            CHECK(p.at(3, i) == cplx(0.0));
            for (Index j = 0; j < 3; ++j)
                CHECK(p.at(i, j) == m.at(i, j));
        }
    }
    SUBCASE("dim 5 -> 8 with three pad entries")
    {
        const CsrMatrix p = pad_to_pow2(CsrMatrix::from_dense(random_hermitian(5, 5)), -2.5);
        REQUIRE(p.dim() == 8);
        for (Index i = 5; i < 8; ++i)
            CHECK(p.at(i, i) == cplx(-2.5));
        CHECK(p.is_hermitian());
    }
    SUBCASE("default pad sits above the Gershgorin bound")
    {
        const CsrMatrix m = CsrMatrix::from_dense(random_hermitian(6, 6));
        const CsrMatrix p = pad_to_pow2(m);
        CHECK(p.at(7, 7).real() == doctest::Approx(gershgorin_upper(m) + 1.0));
        CHECK(dense_oracle(p.to_dense()).front() == doctest::Approx(dense_oracle(m.to_dense()).front()));
    }
}

TEST_CASE("pad_to_pow2 keeps the original spectrum as a sub-multiset")
{
    for (Index dim = 1; dim <= 32; ++dim) {
        const DenseMatrix m = random_hermitian(dim, 100 + dim);
        const double pad = 0.5 * static_cast<double>(dim);
        const CsrMatrix p = pad_to_pow2(CsrMatrix::from_dense(m), pad);
        std::vector<double> expected = dense_oracle(m);
        expected.resize(static_cast<std::size_t>(p.dim()), pad);
        CHECK(max_deviation(dense_oracle(p.to_dense()), expected) < 1e-10);
    }
}

TEST_CASE("gen_tfim")
{
    SUBCASE("pure coupling: -Z Z has ground -1, doubly degenerate")
    {
        const auto ev = dense_oracle(realize(gen_tfim(2, 1.0, 0.0)).to_dense());
        CHECK(ev[0] == doctest::Approx(-1.0));
        CHECK(ev[1] == doctest::Approx(-1.0));
        CHECK(ev[2] == doctest::Approx(1.0));
    }
    SUBCASE("pure field: ground -2")
    {
        CHECK(dense_oracle(realize(gen_tfim(2, 0.0, 1.0)).to_dense())[0] == doctest::Approx(-2.0));
    }
    SUBCASE("n = 4 critical chain")
    {
        // Frozen from an independent numpy eigensolve of the 16 x 16 Kronecker build.
        const double ground = -4.758770483143628;
        const QubitHamiltonian h = gen_tfim(4, 1.0, 1.0);
        DenseMatrix oracle = DenseMatrix::Zero(16, 16);
        for (const auto& t : h.terms)
            oracle += t.coeff * pauli_kron(t.word);
        CHECK(testing::real_spectrum(oracle).front() == doctest::Approx(ground).epsilon(1e-12));
        CHECK(dense_oracle(realize(h).to_dense()).front() == doctest::Approx(ground).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gen_tfim(1, 1.0, 1.0), Error);
}

TEST_CASE("gen_commuting_block")
{
    SUBCASE("diagonal K gives diagonal blocks")
    {
        DenseMatrix k = DenseMatrix::Zero(2, 2);
        k(0, 0) = 1.0;
        k(1, 1) = 2.0;
        const CommutingCoefficients c{{0.5, 1.0, 0.0}, {0.3, 0.0, 0.1}, {-1.0, 0.0, 2.0}};
        const DenseMatrix m = commuting_block_from(k, c);
        for (Index bi = 0; bi < 2; ++bi)
            for (Index bj = 0; bj < 2; ++bj) {
                const DenseMatrix blk = m.block(2 * bi, 2 * bj, 2, 2);
                CHECK(blk(0, 1) == cplx(0.0));
                CHECK(blk(1, 0) == cplx(0.0));
            }
        CHECK(m(0, 0).real() == doctest::Approx(1.5));
        CHECK(m(1, 3).real() == doctest::Approx(0.3 + 0.4));
    }
    SUBCASE("deterministic in the seed")
    {
        CHECK(gen_commuting_block(16, 42) == gen_commuting_block(16, 42));
        CHECK(!(gen_commuting_block(16, 42) == gen_commuting_block(16, 43)));
    }
    SUBCASE("blocks commute and the matrix is Hermitian")
    {
        for (Index dim : {4, 8, 16, 32, 64}) {
            const DenseMatrix m = gen_commuting_block(dim, 7 + dim).to_dense();
            const Index h = dim / 2;
            const DenseMatrix a = m.topLeftCorner(h, h), b = m.topRightCorner(h, h), d = m.bottomRightCorner(h, h);
            CHECK(testing::commutator(a, d).norm() < 1e-10);
            CHECK(testing::commutator(a, b).norm() < 1e-10);
            CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        }
    }
    CHECK_THROWS_AS(gen_commuting_block(6, 1), Error);
    CHECK_THROWS_AS(gen_commuting_block(2, 1), Error);
}

TEST_CASE("Pauli JSON round-trips byte-stably")
{
    QubitHamiltonian h = gen_tfim(3, 0.7, 1.3);
    h.constant = -12.25;
    h.terms.push_back({cplx(0.1, 0.0), "XYZ"});
    h.label = "tfim, with \"quotes\"";
    const std::string text = to_pauli_json(h);
    const QubitHamiltonian back = parse_pauli_json(text);
    CHECK(back == h);
    CHECK(to_pauli_json(back) == text);

    CHECK_THROWS_AS(parse_pauli_json("{"), Error);
    CHECK_THROWS_AS(parse_pauli_json(R"({"n_qubits": 2, "terms": [{"coeff": [1, 0], "word": "XQ"}]})"), Error);
    const QubitHamiltonian scalar = parse_pauli_json(R"({"n_qubits": 1, "terms": [{"coeff": 2.0, "word": "Z"}]})");
    CHECK(scalar.terms[0].coeff == cplx(2.0));
}

TEST_CASE("Matrix Market round-trips and expands symmetric storage")
{
    const CsrMatrix herm = CsrMatrix::from_dense(random_hermitian(7, 11));
    const std::string text = to_matrix_market(herm, "generated");
    CHECK(text.rfind("%%MatrixMarket matrix coordinate complex hermitian", 0) == 0);
    const CsrMatrix back = parse_matrix_market(text);
    CHECK(back == herm);
    CHECK(to_matrix_market(back, "generated") == text);

    DenseMatrix general = random_hermitian(4, 12);
    general(0, 1) += 1.0;
    const std::string gtext = to_matrix_market(CsrMatrix::from_dense(general));
    CHECK(gtext.find("general") != std::string::npos);
    CHECK(parse_matrix_market(gtext).to_dense() == general);

    const CsrMatrix sym = parse_matrix_market("%%MatrixMarket matrix coordinate real symmetric\n% c\n2 2 2\n1 1 2\n2 1 1\n");
    CHECK(sym.at(0, 1) == cplx(1.0));
    CHECK(sym.at(1, 0) == cplx(1.0));
    CHECK(sym.at(1, 1) == cplx(0.0));

    CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n"), Error);
    CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 3 0\n"), Error);
    CHECK_THROWS_AS(parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"), Error);
}

TEST_CASE("CSR construction rejects malformed arrays")
{
    CHECK_THROWS_AS(CsrMatrix(2, {0, 1}, {0}, {1.0}), Error);
    CHECK_THROWS_AS(CsrMatrix(2, {0, 2, 1}, {0, 1}, {1.0, 1.0}), Error);
    CHECK_THROWS_AS(CsrMatrix(2, {0, 1, 2}, {0, 2}, {1.0, 1.0}), Error);
    const CsrMatrix id = CsrMatrix::identity(3, 2.0);
    CHECK(id.nnz() == 3);
    Vector x = Vector::Ones(3);
    CHECK((id * x - 2.0 * x).norm() == 0.0);
}
