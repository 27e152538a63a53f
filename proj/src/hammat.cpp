#include "sbd/hammat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sbd/random.hpp"

namespace sbd {

const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::BadWord: return "BadWord";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::OddDimension: return "OddDimension";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::SeedDegenerate: return "SeedDegenerate";
    case ErrorKind::IterationSingular: return "IterationSingular";
    case ErrorKind::ZeroMatrix: return "ZeroMatrix";
    case ErrorKind::DepthTooLarge: return "DepthTooLarge";
    case ErrorKind::NegativeRadicand: return "NegativeRadicand";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPowerOfTwo: return "NotPowerOfTwo";
    case ErrorKind::IncompleteGrid: return "IncompleteGrid";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

// ---- CsrMatrix --------------------------------------------------------------

CsrMatrix::CsrMatrix(Index dim, std::vector<Index> row_ptr, std::vector<Index> col_idx, std::vector<cplx> values)
    : dim_(dim), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values))
{
    validate();
}

void CsrMatrix::validate() const
{
    if (dim_ < 1)
        throw Error(ErrorKind::DomainError, "matrix dimension must be >= 1");
    if (static_cast<Index>(row_ptr_.size()) != dim_ + 1 || row_ptr_.front() != 0)
        throw Error(ErrorKind::DomainError, "row pointer array has wrong shape");
    if (col_idx_.size() != values_.size() || row_ptr_.back() != static_cast<Index>(values_.size()))
        throw Error(ErrorKind::DomainError, "CSR arrays disagree on nnz");
    for (Index i = 0; i < dim_; ++i) {
        if (row_ptr_[i + 1] < row_ptr_[i])
            throw Error(ErrorKind::DomainError, "row pointers not monotone");
        for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            if (col_idx_[p] < 0 || col_idx_[p] >= dim_)
                throw Error(ErrorKind::DomainError, "column index out of range");
            if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])
                throw Error(ErrorKind::DomainError, "column indices not strictly increasing");
        }
    }
}

CsrMatrix CsrMatrix::from_triplets(Index dim, std::vector<Triplet> triplets, double drop_abs)
{
    std::sort(triplets.begin(), triplets.end(),
              [](const Triplet& l, const Triplet& r) { return l.row != r.row ? l.row < r.row : l.col < r.col; });
    std::vector<Index> row_ptr(dim + 1, 0);
    std::vector<Index> cols;
    std::vector<cplx> vals;
    cols.reserve(triplets.size());
    vals.reserve(triplets.size());
    std::size_t t = 0;
    for (Index i = 0; i < dim; ++i) {
        while (t < triplets.size() && triplets[t].row == i) {
            const Index j = triplets[t].col;
            if (j < 0 || j >= dim)
                throw Error(ErrorKind::DomainError, "triplet column out of range");
            cplx v = 0.0;
            while (t < triplets.size() && triplets[t].row == i && triplets[t].col == j)
                v += triplets[t++].value;
            if (std::abs(v) > drop_abs || (drop_abs == 0.0 && v != cplx{0.0})) {
                cols.push_back(j);
                vals.push_back(v);
            }
        }
        row_ptr[i + 1] = static_cast<Index>(cols.size());
    }
    if (t != triplets.size())
        throw Error(ErrorKind::DomainError, "triplet row out of range");
    return CsrMatrix(dim, std::move(row_ptr), std::move(cols), std::move(vals));
}

CsrMatrix CsrMatrix::from_dense(const DenseMatrix& m, double drop_abs)
{
    if (m.rows() != m.cols())
        throw Error(ErrorKind::DomainError, "matrix must be square");
    const Index n = m.rows();
    std::vector<Index> row_ptr(n + 1, 0);
    std::vector<Index> cols;
    std::vector<cplx> vals;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const cplx v = m(i, j);
            if (std::abs(v) > drop_abs || (drop_abs == 0.0 && v != cplx{0.0})) {
                cols.push_back(j);
                vals.push_back(v);
            }
        }
        row_ptr[i + 1] = static_cast<Index>(cols.size());
    }
    return CsrMatrix(n, std::move(row_ptr), std::move(cols), std::move(vals));
}

CsrMatrix CsrMatrix::identity(Index dim, cplx scale)
{
    std::vector<Index> row_ptr(dim + 1);
    std::vector<Index> cols(dim);
    for (Index i = 0; i <= dim; ++i)
        row_ptr[i] = i;
    for (Index i = 0; i < dim; ++i)
        cols[i] = i;
    return CsrMatrix(dim, std::move(row_ptr), std::move(cols), std::vector<cplx>(dim, scale));
}

cplx CsrMatrix::at(Index i, Index j) const
{
    const auto first = col_idx_.begin() + row_ptr_[i];
    const auto last = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j)
        return 0.0;
    return values_[it - col_idx_.begin()];
}

void CsrMatrix::multiply(const Vector& x, Vector& y) const
{
    y.resize(dim_);
    for (Index i = 0; i < dim_; ++i) {
        cplx acc = 0.0;
        for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
            acc += values_[p] * x[col_idx_[p]];
        y[i] = acc;
    }
}

Vector CsrMatrix::operator*(const Vector& x) const
{
    Vector y;
    multiply(x, y);
    return y;
}

DenseMatrix CsrMatrix::to_dense() const
{
    DenseMatrix d = DenseMatrix::Zero(dim_, dim_);
    for (Index i = 0; i < dim_; ++i)
        for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
            d(i, col_idx_[p]) = values_[p];
    return d;
}

double CsrMatrix::hermiticity_defect() const
{
    double worst = 0.0;
    for (Index i = 0; i < dim_; ++i)
        for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
            worst = std::max(worst, std::abs(values_[p] - std::conj(at(col_idx_[p], i))));
    return worst;
}

double gershgorin_upper(const CsrMatrix& m)
{
    double bound = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m.dim(); ++i) {
        double row = 0.0;
        for (Index p = m.row_ptr()[i]; p < m.row_ptr()[i + 1]; ++p) {
            const Index j = m.col_idx()[p];
            row += (j == i) ? m.values()[p].real() : std::abs(m.values()[p]);
        }
        bound = std::max(bound, row);
    }
    return bound;
}

double gershgorin_upper(const DenseMatrix& m)
{
    double bound = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m.rows(); ++i) {
        double row = m(i, i).real();
        for (Index j = 0; j < m.cols(); ++j)
            if (j != i)
                row += std::abs(m(i, j));
        bound = std::max(bound, row);
    }
    return bound;
}

double max_abs_row_sum(const DenseMatrix& m)
{
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

// ---- Pauli Hamiltonians -----------------------------------------------------

void QubitHamiltonian::validate() const
{
    if (n_qubits < 1)
        throw Error(ErrorKind::DomainError, "n_qubits must be positive");
    for (const auto& t : terms) {
        if (static_cast<int>(t.word.size()) != n_qubits)
            throw Error(ErrorKind::BadWord, "word '" + t.word + "' length differs from n_qubits");
        if (t.word.find_first_not_of("IXYZ") != std::string::npos)
            throw Error(ErrorKind::BadWord, "word '" + t.word + "' has symbols outside {I,X,Y,Z}");
        if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag()))
            throw Error(ErrorKind::DomainError, "non-finite coefficient for word '" + t.word + "'");
    }
    if (!std::isfinite(constant))
        throw Error(ErrorKind::DomainError, "non-finite constant");
}

namespace {

struct PauliMasks {
    std::uint64_t x = 0;  // X or Y: flips the bit
    std::uint64_t z = 0;  // Y or Z: sign from the bit
    int n_y = 0;
};

PauliMasks masks_of(const std::string& word)
{
    PauliMasks m;
    const int n = static_cast<int>(word.size());
    for (int q = 0; q < n; ++q) {
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
        switch (word[q]) {
        case 'X': m.x |= bit; break;
        case 'Y': m.x |= bit; m.z |= bit; ++m.n_y; break;
        case 'Z': m.z |= bit; break;
        default: break;
        }
    }
    return m;
}

}  // namespace

CsrMatrix realize(const QubitHamiltonian& h, int qubit_cap)
{
    if (h.n_qubits > qubit_cap)
        throw Error(ErrorKind::CapExceeded,
                    std::to_string(h.n_qubits) + " qubits exceeds cap " + std::to_string(qubit_cap));
    h.validate();
    const Index dim = h.dim();

    // Terms sharing a flip mask land on the same column of every row;
    // sigma_w |j> = i^{n_y} (-1)^{popcount(j & z)} |j ^ x>.
    std::map<std::uint64_t, std::vector<std::pair<cplx, std::uint64_t>>> by_flip;
    double scale = std::abs(h.constant);
    for (const auto& t : h.terms) {
        const PauliMasks m = masks_of(t.word);
        static constexpr cplx kPowI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        by_flip[m.x].emplace_back(t.coeff * kPowI[m.n_y % 4], m.z);
        scale += std::abs(t.coeff);
    }
    if (h.constant != 0.0)
        by_flip[0].emplace_back(h.constant, 0);

    const double drop = 1e-15 * scale;
    std::vector<CsrMatrix::Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(dim) * by_flip.size());
    for (const auto& [flip, group] : by_flip) {
        for (Index col = 0; col < dim; ++col) {
            cplx v = 0.0;
            for (const auto& [c, z] : group)
                v += (std::popcount(static_cast<std::uint64_t>(col) & z) & 1) ? -c : c;
            if (std::abs(v) > drop)
                triplets.push_back({static_cast<Index>(static_cast<std::uint64_t>(col) ^ flip), col, v});
        }
    }
    CsrMatrix out = CsrMatrix::from_triplets(dim, std::move(triplets));
    if (const double defect = out.hermiticity_defect(); defect > 1e-12)
        throw Error(ErrorKind::NotHermitian,
                    "realized matrix deviates from Hermitian by " + std::to_string(defect) +
                        " (coefficients must be real or conjugate-closed)");
    return out;
}

CsrMatrix pad_to_pow2(const CsrMatrix& m, double pad_value)
{
    const Index target = static_cast<Index>(next_power_of_two(static_cast<std::uint64_t>(m.dim())));
    if (target == m.dim())
        return m;
    std::vector<Index> row_ptr = m.row_ptr();
    std::vector<Index> cols = m.col_idx();
    std::vector<cplx> vals = m.values();
    for (Index i = m.dim(); i < target; ++i) {
        cols.push_back(i);
        vals.push_back(pad_value);
        row_ptr.push_back(static_cast<Index>(cols.size()));
    }
    return CsrMatrix(target, std::move(row_ptr), std::move(cols), std::move(vals));
}

CsrMatrix pad_to_pow2(const CsrMatrix& m)
{
    return pad_to_pow2(m, gershgorin_upper(m) + 1.0);
}

QubitHamiltonian gen_tfim(int n, double coupling, double field)
{
    if (n < 2)
        throw Error(ErrorKind::DomainError, "transverse-field Ising chain needs n >= 2");
    QubitHamiltonian h;
    h.n_qubits = n;
    h.label = "tfim n=" + std::to_string(n);
    for (int i = 0; coupling != 0.0 && i + 1 < n; ++i) {
        std::string w(n, 'I');
        w[i] = w[i + 1] = 'Z';
        h.terms.push_back({-coupling, w});
    }
    for (int i = 0; field != 0.0 && i < n; ++i) {
        std::string w(n, 'I');
        w[i] = 'X';
        h.terms.push_back({-field, w});
    }
    return h;
}

DenseMatrix commuting_block_from(const DenseMatrix& k, const CommutingCoefficients& c)
{
    const Index h = k.rows();
    const DenseMatrix id = DenseMatrix::Identity(h, h);
    const DenseMatrix k2 = k * k;
    auto poly = [&](const double* p) -> DenseMatrix { return p[0] * id + p[1] * k + p[2] * k2; };
    DenseMatrix m(2 * h, 2 * h);
    m.topLeftCorner(h, h) = poly(c.a);
    m.topRightCorner(h, h) = poly(c.b);
    m.bottomLeftCorner(h, h) = m.topRightCorner(h, h).adjoint();
    m.bottomRightCorner(h, h) = poly(c.d);
    return m;
}

DenseMatrix random_hermitian(Index dim, std::uint64_t seed)
{
    Rng rng(seed);
    DenseMatrix m(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        m(i, i) = rng.normal();
        for (Index j = i + 1; j < dim; ++j) {
            m(i, j) = cplx(rng.normal(), rng.normal()) / std::sqrt(2.0);
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

CsrMatrix gen_commuting_block(Index dim, std::uint64_t seed)
{
    if (dim < 4 || !is_power_of_two(static_cast<std::uint64_t>(dim)))
        throw Error(ErrorKind::DomainError, "commuting family needs a power-of-two dim >= 4");
    Rng rng(seed);
    CommutingCoefficients c{};
    for (int i = 0; i < 3; ++i) {
        c.a[i] = rng.uniform(-1.0, 1.0);
        c.b[i] = rng.uniform(-1.0, 1.0);
        c.d[i] = rng.uniform(-1.0, 1.0);
    }
    DenseMatrix k = random_hermitian(dim / 2, seed ^ 0x9e3779b97f4a7c15ULL);
    k /= std::sqrt(static_cast<double>(dim / 2));
    DenseMatrix m = commuting_block_from(k, c);
    // Exact Hermitian symmetry on the stored values.
    m = (0.5 * (m + m.adjoint())).eval();
    return CsrMatrix::from_dense(m);
}

// ---- Pauli JSON --------------------------------------------------------------

using ojson = nlohmann::ordered_json;

QubitHamiltonian parse_pauli_json(const std::string& text)
{
    ojson doc;
    try {
        doc = ojson::parse(text);
    } catch (const std::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
    }
    try {
        QubitHamiltonian h;
        h.n_qubits = doc.at("n_qubits").get<int>();
        h.label = doc.value("label", std::string{});
        h.constant = doc.value("constant", 0.0);
        for (const auto& t : doc.at("terms")) {
            PauliTerm term;
            const auto& c = t.at("coeff");
            if (c.is_array()) {
                if (c.size() != 2)
                    throw Error(ErrorKind::ParseError, "coeff must be [re, im]");
                term.coeff = cplx(c[0].get<double>(), c[1].get<double>());
            } else {
                term.coeff = c.get<double>();
            }
            term.word = t.at("word").get<std::string>();
            h.terms.push_back(std::move(term));
        }
        h.validate();
        return h;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::BadWord || e.kind() == ErrorKind::ParseError)
            throw;
        throw Error(ErrorKind::ParseError, e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("malformed Pauli-term file: ") + e.what());
    }
}

std::string to_pauli_json(const QubitHamiltonian& h)
{
    ojson doc;
    doc["label"] = h.label;
    doc["n_qubits"] = h.n_qubits;
    doc["constant"] = h.constant;
    ojson terms = ojson::array();
    for (const auto& t : h.terms)
        terms.push_back(ojson{{"coeff", {t.coeff.real(), t.coeff.imag()}}, {"word", t.word}});
    doc["terms"] = std::move(terms);
    return doc.dump(1) + "\n";
}

QubitHamiltonian read_pauli_json(const std::filesystem::path& path)
{
    return parse_pauli_json(read_text_file(path));
}

void write_pauli_json(const std::filesystem::path& path, const QubitHamiltonian& h)
{
    write_text_file(path, to_pauli_json(h));
}

// ---- Matrix Market -----------------------------------------------------------

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return s;
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

CsrMatrix parse_matrix_market(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorKind::ParseError, "empty Matrix Market file");
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate")
        throw Error(ErrorKind::ParseError, "expected '%%MatrixMarket matrix coordinate ...' banner");
    field = lower(field);
    symmetry = lower(symmetry);
    const bool is_complex = field == "complex";
    if (!is_complex && field != "real" && field != "integer")
        throw Error(ErrorKind::ParseError, "unsupported field '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian")
        throw Error(ErrorKind::ParseError, "unsupported symmetry '" + symmetry + "'");

    do {
        if (!std::getline(in, line))
            throw Error(ErrorKind::ParseError, "missing size line");
    } while (line.empty() || line[0] == '%');
    long long rows = 0, cols = 0, entries = 0;
    {
        std::istringstream sz(line);
        if (!(sz >> rows >> cols >> entries) || rows < 1 || rows != cols || entries < 0)
            throw Error(ErrorKind::ParseError, "size line must describe a non-empty square matrix");
    }

    std::vector<CsrMatrix::Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(entries) * (symmetry == "general" ? 1 : 2));
    for (long long e = 0; e < entries; ++e) {
        do {
            if (!std::getline(in, line))
                throw Error(ErrorKind::ParseError, "unexpected end of file after " + std::to_string(e) + " entries");
        } while (line.empty() || line[0] == '%');
        std::istringstream ent(line);
        long long i = 0, j = 0;
        double re = 0.0, im = 0.0;
        if (!(ent >> i >> j >> re) || (is_complex && !(ent >> im)))
            throw Error(ErrorKind::ParseError, "malformed entry line '" + line + "'");
        if (i < 1 || j < 1 || i > rows || j > cols)
            throw Error(ErrorKind::ParseError, "entry index out of range in '" + line + "'");
        const cplx v(re, im);
        triplets.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), v});
        if (i != j && symmetry == "symmetric")
            triplets.push_back({static_cast<Index>(j - 1), static_cast<Index>(i - 1), v});
        else if (i != j && symmetry == "hermitian")
            triplets.push_back({static_cast<Index>(j - 1), static_cast<Index>(i - 1), std::conj(v)});
    }
    return CsrMatrix::from_triplets(static_cast<Index>(rows), std::move(triplets));
}

std::string to_matrix_market(const CsrMatrix& m, const std::string& comment)
{
    const bool hermitian = m.hermiticity_defect() == 0.0;
    std::string out = "%%MatrixMarket matrix coordinate complex ";
    out += hermitian ? "hermitian\n" : "general\n";
    if (!comment.empty()) {
        std::istringstream lines(comment);
        std::string l;
        while (std::getline(lines, l))
            out += "% " + l + "\n";
    }
    std::string body;
    Index count = 0;
    for (Index i = 0; i < m.dim(); ++i) {
        for (Index p = m.row_ptr()[i]; p < m.row_ptr()[i + 1]; ++p) {
            const Index j = m.col_idx()[p];
            if (hermitian && j > i)
                continue;
            const cplx v = m.values()[p];
            body += std::to_string(i + 1) + " " + std::to_string(j + 1) + " " + format_double(v.real()) + " " +
                    format_double(v.imag()) + "\n";
            ++count;
        }
    }
    out += std::to_string(m.dim()) + " " + std::to_string(m.dim()) + " " + std::to_string(count) + "\n";
    return out + body;
}

CsrMatrix read_matrix_market(const std::filesystem::path& path)
{
    return parse_matrix_market(read_text_file(path));
}

void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& m, const std::string& comment)
{
    write_text_file(path, to_matrix_market(m, comment));
}

LoadedMatrix load_matrix(const std::filesystem::path& path, int qubit_cap)
{
    if (path.extension() == ".mtx")
        return {read_matrix_market(path), path.stem().string(), std::nullopt};
    const QubitHamiltonian h = read_pauli_json(path);
    return {realize(h, qubit_cap), h.label.empty() ? path.stem().string() : h.label, h.n_qubits};
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
    out << text;
    if (!out)
        throw Error(ErrorKind::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace sbd
