#include "sbd/sbd.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "sbd/eig.hpp"
#include "sbd/hammat.hpp"

namespace sbd {

std::pair<double, double> gershgorin_adjustment(const DenseMatrix& g_prime)
{
    return {max_abs_row_sum(g_prime), 0.0};
}

SbdConfig SbdConfig::strict()
{
    SbdConfig cfg;
    cfg.sqrt.residual_check = false;
    cfg.policy = BranchPolicy::Fixed;
    return cfg;
}

StepResult sbd_step(const DenseMatrix& m, const SbdConfig& cfg)
{
    if (m.rows() < 2)
        throw Error(ErrorKind::DomainError, "sbd_step needs dim >= 2");
    const BlockPartition p = split(m);

    StepResult out;
    DenseMatrix det;
    try {
        det = det_block(p, cfg.det, cfg.drop_rel);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Singular)
            throw;
        det = det_prime(p, cfg.drop_rel);
        out.used_det_prime = true;
    }

    const DenseMatrix sum = p.a + p.d;
    const DenseMatrix sum_sq = product(sum, sum, cfg.drop_rel);
    const DenseMatrix discriminant = sum_sq - 4.0 * det;
    const double scale = sum_sq.size() ? sum_sq.cwiseAbs().maxCoeff() : 0.0;
    if (discriminant.cwiseAbs().maxCoeff() <= 1e-14 * scale) {
        // Coincident roots; the trace seed would be degenerate but the root is plainly zero.
        out.sqrt.value = DenseMatrix::Zero(discriminant.rows(), discriminant.cols());
    } else {
        try {
            out.sqrt = newton_sqrt(discriminant, cfg.sqrt);
        } catch (const Error& e) {
            const bool fallback_allowed =
                cfg.sqrt.residual_check && discriminant.rows() <= cfg.sqrt.fallback_dim_cap;
            if (e.kind() != ErrorKind::SeedDegenerate || !fallback_allowed)
                throw;
            out.sqrt.value = dense_principal_sqrt(discriminant);
            out.sqrt.relative_residual = sqrt_residual(out.sqrt.value, discriminant);
            out.sqrt.fallback = true;
        }
    }
    out.gamma0 = 0.5 * (sum - out.sqrt.value);
    out.gamma1 = 0.5 * (sum + out.sqrt.value);
    return out;
}

DenseMatrix hermitize(const DenseMatrix& g)
{
    const DenseMatrix gg = g * g.adjoint();
    return 0.5 * (gg + gg.adjoint());
}

Normalized normalize(const DenseMatrix& g_prime, const SpectralAdjustment& adjust)
{
    const auto [n_scale, t_shift] = adjust(g_prime);
    if (!(n_scale >= 1e-300))
        throw Error(ErrorKind::ZeroMatrix, "spectral scale vanishes; the block is numerically zero");
    Normalized out;
    out.n_scale = n_scale;
    out.t_shift = t_shift;
    out.matrix = g_prime / n_scale;
    out.matrix.diagonal().array() += t_shift;
    return out;
}

namespace {

struct Candidate {
    Normalized normalized;
    CompressionStep step;
};

Candidate finish_branch(const DenseMatrix& gamma, int branch, const StepResult& sr, const SbdConfig& cfg)
{
    Candidate c{normalize(hermitize(gamma), cfg.adjustment), {}};
    c.step.branch = branch;
    c.step.n_scale = c.normalized.n_scale;
    c.step.t_shift = c.normalized.t_shift;
    c.step.used_det_prime = sr.used_det_prime;
    c.step.sqrt_fallback = sr.sqrt.fallback;
    return c;
}

double top_eigenvalue(const DenseMatrix& m)
{
    if (m.rows() <= 512)
        return dense_extreme(m, Which::Largest).value;
    return krylov_extreme(m, Which::Largest).value;
}

}  // namespace

CompressedHamiltonian compress(const DenseMatrix& m, int depth, const CompressOptions& opts, const SbdConfig& cfg)
{
    const Index dim = m.rows();
    if (m.cols() != dim || !is_power_of_two(static_cast<std::uint64_t>(dim)))
        throw Error(ErrorKind::NotPowerOfTwo, "compress needs a square matrix of power-of-two size; pad first");
    const int n = log2_exact(static_cast<std::uint64_t>(dim));
    if (depth < 1 || depth > n - 1)
        throw Error(ErrorKind::DepthTooLarge, "depth " + std::to_string(depth) + " outside [1, " +
                                                  std::to_string(n - 1) + "] for dim " + std::to_string(dim));
    if (opts.sign != 1 && opts.sign != -1)
        throw Error(ErrorKind::DomainError, "sign must be +1 or -1");
    if (!opts.path.empty() && static_cast<int>(opts.path.size()) < depth)
        throw Error(ErrorKind::DomainError, "path shorter than depth");

    CompressedHamiltonian out;
    out.original_dim = dim;
    out.sign = opts.sign;
    out.label = opts.label;
    DenseMatrix current = m;
    for (int level = 0; level < depth; ++level) {
        const StepResult sr = sbd_step(current, cfg);
        Candidate chosen;
        if (cfg.policy == BranchPolicy::BestOfBoth) {
            Candidate c0 = finish_branch(sr.gamma0, 0, sr, cfg);
            Candidate c1 = finish_branch(sr.gamma1, 1, sr, cfg);
            auto estimate = [&](const Candidate& c) {
                std::vector<CompressionStep> steps = out.steps;
                steps.push_back(c.step);
                const double eps = std::max(top_eigenvalue(c.normalized.matrix), c.step.t_shift);
                return recover(eps, steps, opts.sign);
            };
            chosen = estimate(c1) < estimate(c0) ? std::move(c1) : std::move(c0);
        } else {
            const int branch = opts.path.empty() ? 0 : opts.path[level];
            if (branch != 0 && branch != 1)
                throw Error(ErrorKind::DomainError, "path entries must be 0 or 1");
            chosen = finish_branch(branch == 0 ? sr.gamma0 : sr.gamma1, branch, sr, cfg);
        }
        out.steps.push_back(chosen.step);
        current = std::move(chosen.normalized.matrix);
    }
    out.block = std::move(current);
    return out;
}

double recover_eigenvalue(double eps, const CompressionStep& step, int sign)
{
    double radicand = eps - step.t_shift;
    if (radicand < 0.0) {
        if (radicand < -1e-12)
            throw Error(ErrorKind::NegativeRadicand,
                        "eps " + std::to_string(eps) + " below shift " + std::to_string(step.t_shift));
        radicand = 0.0;
    }
    return sign * std::abs(std::sqrt(radicand * step.n_scale));
}

double recover(double eps, const std::vector<CompressionStep>& steps, int sign)
{
    double value = eps;
    for (std::size_t i = steps.size(); i-- > 0;)
        value = recover_eigenvalue(value, steps[i], i == 0 ? sign : 1);
    return value;
}

double recover(double eps, const CompressedHamiltonian& c)
{
    return recover(eps, c.steps, c.sign);
}

double compression_ratio(int k)
{
    if (k < 1)
        throw Error(ErrorKind::DomainError, "compression depth must be >= 1");
    return (1.0 - std::ldexp(1.0, -k)) * 100.0;
}

int applications_needed(double c)
{
    if (!(c > 0.0 && c < 100.0))
        throw Error(ErrorKind::DomainError, "target percentage must lie in (0, 100)");
    const double k = std::ceil(-std::log2(1.0 - c / 100.0));
    // C(k) is exact for every k, so snap values that land within rounding of
    // an integer back onto it.
    const double below = k - 1.0;
    if (below >= 1.0 && compression_ratio(static_cast<int>(below)) >= c)
        return static_cast<int>(below);
    return std::max(1, static_cast<int>(k));
}

std::vector<int> parse_path(const std::string& bits)
{
    std::vector<int> path;
    for (char ch : bits) {
        if (ch != '0' && ch != '1')
            throw Error(ErrorKind::ParseError, "path must be a string of 0/1, got '" + bits + "'");
        path.push_back(ch - '0');
    }
    return path;
}

// ---- artifact ----------------------------------------------------------------

using ojson = nlohmann::ordered_json;

std::string to_artifact_json(const CompressedHamiltonian& c)
{
    ojson doc;
    doc["format"] = "sbd-v1";
    doc["label"] = c.label;
    doc["original_dim"] = c.original_dim;
    doc["sign"] = c.sign;
    ojson steps = ojson::array();
    for (const auto& s : c.steps)
        steps.push_back(ojson{{"branch", s.branch},
                              {"n_scale", s.n_scale},
                              {"t_shift", s.t_shift},
                              {"used_det_prime", s.used_det_prime},
                              {"sqrt_fallback", s.sqrt_fallback}});
    doc["steps"] = std::move(steps);

    const CsrMatrix csr = CsrMatrix::from_dense(c.block);
    ojson values = ojson::array();
    for (const cplx& v : csr.values())
        values.push_back(ojson::array({v.real(), v.imag()}));
    doc["block"] = ojson{{"dim", csr.dim()},
                         {"nnz", csr.nnz()},
                         {"row_ptr", csr.row_ptr()},
                         {"col_idx", csr.col_idx()},
                         {"values", std::move(values)}};
    return doc.dump(1) + "\n";
}

CompressedHamiltonian parse_artifact_json(const std::string& text)
{
    try {
        const ojson doc = ojson::parse(text);
        if (doc.at("format").get<std::string>() != "sbd-v1")
            throw Error(ErrorKind::ParseError, "unsupported artifact format");
        CompressedHamiltonian c;
        c.label = doc.value("label", std::string{});
        c.original_dim = doc.at("original_dim").get<Index>();
        c.sign = doc.at("sign").get<int>();
        for (const auto& s : doc.at("steps")) {
            CompressionStep step;
            step.branch = s.at("branch").get<int>();
            step.n_scale = s.at("n_scale").get<double>();
            step.t_shift = s.at("t_shift").get<double>();
            step.used_det_prime = s.at("used_det_prime").get<bool>();
            step.sqrt_fallback = s.at("sqrt_fallback").get<bool>();
            if (!(step.n_scale > 0.0))
                throw Error(ErrorKind::ParseError, "n_scale must be positive");
            c.steps.push_back(step);
        }
        const auto& b = doc.at("block");
        std::vector<cplx> values;
        for (const auto& v : b.at("values"))
            values.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
        const CsrMatrix csr(b.at("dim").get<Index>(), b.at("row_ptr").get<std::vector<Index>>(),
                            b.at("col_idx").get<std::vector<Index>>(), std::move(values));
        c.block = csr.to_dense();
        if ((c.block.rows() << c.steps.size()) != c.original_dim)
            throw Error(ErrorKind::ParseError, "block dim and step count disagree with original_dim");
        return c;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError)
            throw;
        throw Error(ErrorKind::ParseError, e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("malformed artifact: ") + e.what());
    }
}

void write_artifact(const std::filesystem::path& path, const CompressedHamiltonian& c)
{
    write_text_file(path, to_artifact_json(c));
}

CompressedHamiltonian read_artifact(const std::filesystem::path& path)
{
    return parse_artifact_json(read_text_file(path));
}

}  // namespace sbd
