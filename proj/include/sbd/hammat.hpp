#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sbd/types.hpp"

namespace sbd {

/// Square complex matrix in compressed-sparse-row form. Column indices are
/// sorted within each row and there are no duplicate entries.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(Index dim, std::vector<Index> row_ptr, std::vector<Index> col_idx, std::vector<cplx> values);

    struct Triplet {
        Index row;
        Index col;
        cplx value;
    };

    /// Duplicates are summed; entries with |v| <= drop_abs are discarded.
    static CsrMatrix from_triplets(Index dim, std::vector<Triplet> triplets, double drop_abs = 0.0);
    static CsrMatrix from_dense(const DenseMatrix& m, double drop_abs = 0.0);
    static CsrMatrix identity(Index dim, cplx scale = 1.0);

    Index dim() const noexcept { return dim_; }
    Index nnz() const noexcept { return static_cast<Index>(values_.size()); }

    const std::vector<Index>& row_ptr() const noexcept { return row_ptr_; }
    const std::vector<Index>& col_idx() const noexcept { return col_idx_; }
    const std::vector<cplx>& values() const noexcept { return values_; }

    /// Entry (i, j), zero when not stored.
    cplx at(Index i, Index j) const;

    /// y = M x
    void multiply(const Vector& x, Vector& y) const;
    Vector operator*(const Vector& x) const;

    DenseMatrix to_dense() const;

    /// max_{i,j} |m_ij - conj(m_ji)|
    double hermiticity_defect() const;
    bool is_hermitian(double tol = 1e-10) const { return hermiticity_defect() <= tol; }

    friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

private:
    void validate() const;

    Index dim_ = 0;
    std::vector<Index> row_ptr_{0};
    std::vector<Index> col_idx_;
    std::vector<cplx> values_;
};

/// Upper bound on the spectrum of a Hermitian matrix:
/// max_i (Re m_ii + sum_{j != i} |m_ij|).
double gershgorin_upper(const CsrMatrix& m);
double gershgorin_upper(const DenseMatrix& m);

/// max_i sum_j |m_ij|, the infinity norm.
double max_abs_row_sum(const DenseMatrix& m);

struct PauliTerm {
    cplx coeff;
    std::string word;

    friend bool operator==(const PauliTerm&, const PauliTerm&) = default;
};

struct QubitHamiltonian {
    int n_qubits = 0;
    std::vector<PauliTerm> terms;
    double constant = 0.0;
    std::string label;

    Index dim() const { return Index{1} << n_qubits; }

    /// Throws BadWord on length or alphabet violations and DomainError on
    /// non-finite coefficients.
    void validate() const;

    friend bool operator==(const QubitHamiltonian&, const QubitHamiltonian&) = default;
};

inline constexpr int kDefaultQubitCap = 14;

/// Sum of coeff * (sigma_w1 (x) ... (x) sigma_wn) + constant * I. Qubit 0 is
/// the most significant bit of the basis index.
CsrMatrix realize(const QubitHamiltonian& h, int qubit_cap = kDefaultQubitCap);

/// Extends m with diagonal entries pad_value up to the next power of two.
CsrMatrix pad_to_pow2(const CsrMatrix& m, double pad_value);
/// Pads with gershgorin_upper(m) + 1 so padded states never become the ground state.
CsrMatrix pad_to_pow2(const CsrMatrix& m);

/// Open transverse-field Ising chain: -J sum Z_i Z_{i+1} - h sum X_i.
QubitHamiltonian gen_tfim(int n, double coupling, double field);

/// Real coefficients of the block polynomials a0 + a1 K + a2 K^2.
struct CommutingCoefficients {
    double a[3];
    double b[3];
    double d[3];
};

/// [[p_a(K), p_b(K)], [p_b(K), p_d(K)]] for Hermitian K. Every block is a real
/// polynomial of K, so the blocks commute pairwise and B = C^dagger.
DenseMatrix commuting_block_from(const DenseMatrix& k, const CommutingCoefficients& coeffs);

/// Seeded instance of the commuting family with a random complex Hermitian K.
CsrMatrix gen_commuting_block(Index dim, std::uint64_t seed);

/// Dense random complex Hermitian matrix with entries of unit scale.
DenseMatrix random_hermitian(Index dim, std::uint64_t seed);

// ---- file formats ---------------------------------------------------------

QubitHamiltonian parse_pauli_json(const std::string& text);
std::string to_pauli_json(const QubitHamiltonian& h);
QubitHamiltonian read_pauli_json(const std::filesystem::path& path);
void write_pauli_json(const std::filesystem::path& path, const QubitHamiltonian& h);

/// Accepts coordinate real/complex with general/symmetric/hermitian symmetry.
CsrMatrix parse_matrix_market(const std::string& text);
/// Hermitian input is written as "complex hermitian" (lower triangle),
/// everything else as "complex general".
std::string to_matrix_market(const CsrMatrix& m, const std::string& comment = {});
CsrMatrix read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& m, const std::string& comment = {});

/// Loads either format (".mtx" suffix selects Matrix Market) and realizes
/// Pauli input. The label is the Hamiltonian label or the file stem.
struct LoadedMatrix {
    CsrMatrix matrix;
    std::string label;
    std::optional<int> n_qubits;
};
LoadedMatrix load_matrix(const std::filesystem::path& path, int qubit_cap = kDefaultQubitCap);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sbd
