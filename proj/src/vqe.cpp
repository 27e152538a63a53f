#include "sbd/vqe.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sbd/random.hpp"

namespace sbd {

Ansatz::Ansatz(int qubits, int layers) : qubits_(qubits), layers_(layers)
{
    if (qubits < 1)
        throw Error(ErrorKind::DomainError, "ansatz needs at least one qubit");
    if (layers < 1)
        throw Error(ErrorKind::DomainError, "ansatz needs at least one layer");
}

Vector Ansatz::state(const std::vector<double>& params) const
{
    if (params.size() != num_params())
        throw Error(ErrorKind::DomainError, "parameter count does not match the ansatz");
    const Index dim = Index{1} << qubits_;
    // Amplitudes stay real under RY and CZ.
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(dim);
    psi[0] = 1.0;
    std::size_t p = 0;
    for (int layer = 0; layer < layers_; ++layer) {
        for (int q = 0; q < qubits_; ++q) {
            const double half = 0.5 * params[p++];
            const double c = std::cos(half);
            const double s = std::sin(half);
            const Index bit = Index{1} << (qubits_ - 1 - q);
            for (Index i = 0; i < dim; ++i) {
                if (i & bit)
                    continue;
                const double a0 = psi[i];
                const double a1 = psi[i | bit];
                psi[i] = c * a0 - s * a1;
                psi[i | bit] = s * a0 + c * a1;
            }
        }
        for (int q = 0; q + 1 < qubits_; ++q) {
            const Index both = (Index{1} << (qubits_ - 1 - q)) | (Index{1} << (qubits_ - 2 - q));
            for (Index i = 0; i < dim; ++i)
                if ((i & both) == both)
                    psi[i] = -psi[i];
        }
    }
    return psi.cast<cplx>();
}

double expectation(const LinearOperator& op, const Ansatz& ansatz, const std::vector<double>& params)
{
    const Vector psi = ansatz.state(params);
    Vector h_psi(op.dim);
    op.apply(psi, h_psi);
    return psi.dot(h_psi).real();
}

std::vector<double> parameter_shift_gradient(const LinearOperator& op, const Ansatz& ansatz,
                                             const std::vector<double>& params)
{
    std::vector<double> grad(params.size());
    std::vector<double> shifted = params;
    constexpr double kShift = std::numbers::pi / 2.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        shifted[k] = params[k] + kShift;
        const double plus = expectation(op, ansatz, shifted);
        shifted[k] = params[k] - kShift;
        const double minus = expectation(op, ansatz, shifted);
        shifted[k] = params[k];
        grad[k] = 0.5 * (plus - minus);
    }
    return grad;
}

std::vector<double> finite_difference_gradient(const LinearOperator& op, const Ansatz& ansatz,
                                               const std::vector<double>& params, double h)
{
    std::vector<double> grad(params.size());
    std::vector<double> shifted = params;
    for (std::size_t k = 0; k < params.size(); ++k) {
        shifted[k] = params[k] + h;
        const double plus = expectation(op, ansatz, shifted);
        shifted[k] = params[k] - h;
        const double minus = expectation(op, ansatz, shifted);
        shifted[k] = params[k];
        grad[k] = (plus - minus) / (2.0 * h);
    }
    return grad;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

VqeResult single_run(const LinearOperator& objective, const Ansatz& ansatz, const VqeConfig& cfg,
                     std::uint64_t seed)
{
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;

    Rng rng(seed);
    std::vector<double> theta(ansatz.num_params());
    for (double& t : theta)
        t = rng.uniform(-std::numbers::pi, std::numbers::pi);
    std::vector<double> second_moment(theta.size(), 0.0);

    VqeResult run;
    double previous = expectation(objective, ansatz, theta);
    run.energy = previous;
    run.params = theta;
    double beta2_power = 1.0;
    for (int t = 1; t <= cfg.max_iters; ++t) {
        const std::vector<double> grad = cfg.gradient == Gradient::ParameterShift
                                             ? parameter_shift_gradient(objective, ansatz, theta)
                                             : finite_difference_gradient(objective, ansatz, theta);
        beta2_power *= kBeta2;
        for (std::size_t k = 0; k < theta.size(); ++k) {
            second_moment[k] = kBeta2 * second_moment[k] + (1.0 - kBeta2) * grad[k] * grad[k];
            const double v_hat = second_moment[k] / (1.0 - beta2_power);
            theta[k] -= cfg.learning_rate * grad[k] / (std::sqrt(v_hat) + kEps);
        }
        const double energy = expectation(objective, ansatz, theta);
        run.energy_trace.push_back(energy);
        run.iterations = t;
        if (energy < run.energy) {
            run.energy = energy;
            run.params = theta;
        }
        if (std::abs(energy - previous) < cfg.tol) {
            run.converged = true;
            break;
        }
        previous = energy;
    }
    return run;
}

}  // namespace

VqeResult vqe_minimize(const LinearOperator& op, const VqeConfig& cfg)
{
    if (!is_power_of_two(static_cast<std::uint64_t>(op.dim)) || op.dim < 2)
        throw Error(ErrorKind::NotPowerOfTwo, "VQE needs a 2^q-dimensional operator with q >= 1");
    const int qubits = log2_exact(static_cast<std::uint64_t>(op.dim));
    if (qubits > 14)
        throw Error(ErrorKind::CapExceeded, "VQE statevector limited to 14 qubits");
    if (!(cfg.learning_rate > 0.0) || cfg.max_iters < 1 || cfg.restarts < 1)
        throw Error(ErrorKind::DomainError, "learning_rate, max_iters and restarts must be positive");

    const Ansatz ansatz(qubits, cfg.layers);
    LinearOperator objective = op;
    if (cfg.target == Which::Largest)
        objective.apply = [&op](const Vector& x, Vector& y) {
            op.apply(x, y);
            y = -y;
        };

    VqeResult best;
    best.energy = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.restarts; ++r) {
        VqeResult run = single_run(objective, ansatz, cfg, mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
        if (run.energy < best.energy) {
            run.best_restart = r;
            best = std::move(run);
        }
    }
    if (cfg.target == Which::Largest)
        best.energy = -best.energy;
    return best;
}

VqeResult vqe_minimize(const CsrMatrix& m, const VqeConfig& cfg)
{
    return vqe_minimize(make_operator(m), cfg);
}

VqeResult vqe_minimize(const DenseMatrix& m, const VqeConfig& cfg)
{
    return vqe_minimize(make_operator(m), cfg);
}

QubitHamiltonian pauli_decompose(const DenseMatrix& m, const std::string& label)
{
    const Index dim = m.rows();
    if (dim != m.cols() || !is_power_of_two(static_cast<std::uint64_t>(dim)) || dim < 2)
        throw Error(ErrorKind::NotPowerOfTwo, "Pauli decomposition needs a 2^q-dimensional square matrix");
    const int q = log2_exact(static_cast<std::uint64_t>(dim));
    if (q > 6)
        throw Error(ErrorKind::CapExceeded, "Pauli decomposition limited to 6 qubits");

    QubitHamiltonian h;
    h.n_qubits = q;
    h.label = label;
    const std::uint64_t words = std::uint64_t{1} << (2 * q);
    static constexpr char kSymbols[4] = {'I', 'X', 'Y', 'Z'};
    static constexpr cplx kPowI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (std::uint64_t code = 0; code < words; ++code) {
        std::string word(q, 'I');
        std::uint64_t x = 0, z = 0;
        int n_y = 0;
        for (int k = 0; k < q; ++k) {
            const int sym = static_cast<int>((code >> (2 * (q - 1 - k))) & 3);
            word[k] = kSymbols[sym];
            const std::uint64_t bit = std::uint64_t{1} << (q - 1 - k);
            if (sym == 1 || sym == 2)
                x |= bit;
            if (sym == 2 || sym == 3)
                z |= bit;
            n_y += sym == 2;
        }
        // Tr(M sigma) = sum_j (sigma)_{j ^ x, j} M_{j, j ^ x}
        cplx tr = 0.0;
        for (Index j = 0; j < dim; ++j) {
            const auto uj = static_cast<std::uint64_t>(j);
            const cplx phase = (std::popcount(uj & z) & 1) ? -kPowI[n_y % 4] : kPowI[n_y % 4];
            tr += phase * m(j, static_cast<Index>(uj ^ x));
        }
        // The trace of a Hermitian M against a Hermitian word is real.
        const cplx c = tr / static_cast<double>(dim);
        if (std::abs(c) >= 1e-12)
            h.terms.push_back({c, word});
    }
    return h;
}

}  // namespace sbd
