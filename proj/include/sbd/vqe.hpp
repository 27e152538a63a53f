#pragma once

#include <cstdint>
#include <vector>

#include "sbd/eig.hpp"
#include "sbd/hammat.hpp"
#include "sbd/types.hpp"

namespace sbd {

enum class Gradient { ParameterShift, FiniteDifference };

struct VqeConfig {
    int layers = 3;
    int max_iters = 500;
    double learning_rate = 0.05;
    /// Converged once |E_t - E_{t-1}| < tol.
    double tol = 1e-6;
    std::uint64_t seed = 0;
    Gradient gradient = Gradient::ParameterShift;
    /// Independent runs from fresh seeded parameters; best one is reported.
    int restarts = 3;
    /// Largest targets the top eigenvalue by minimizing <-M>.
    Which target = Which::Smallest;
};

struct VqeResult {
    double energy = 0.0;
    std::vector<double> params;
    int iterations = 0;
    /// Energy after every update of the reported run (target sign applied).
    std::vector<double> energy_trace;
    /// False when max_iters ran out before the energy change fell below tol.
    bool converged = false;
    int best_restart = 0;
};

/// Layered hardware-efficient ansatz on q qubits: each layer applies RY(theta)
/// to every qubit, then CZ on (0,1), (1,2), ..., (q-2,q-1). Starts from |0...0>.
class Ansatz {
public:
    Ansatz(int qubits, int layers);

    int qubits() const noexcept { return qubits_; }
    int layers() const noexcept { return layers_; }
    std::size_t num_params() const noexcept { return static_cast<std::size_t>(qubits_) * layers_; }

    Vector state(const std::vector<double>& params) const;

private:
    int qubits_;
    int layers_;
};

/// <psi(theta)| M |psi(theta)> for the given operator.
double expectation(const LinearOperator& op, const Ansatz& ansatz, const std::vector<double>& params);

/// dE/dtheta_k = (E(theta + pi/2 e_k) - E(theta - pi/2 e_k)) / 2.
std::vector<double> parameter_shift_gradient(const LinearOperator& op, const Ansatz& ansatz,
                                             const std::vector<double>& params);
/// Central differences with step h.
std::vector<double> finite_difference_gradient(const LinearOperator& op, const Ansatz& ansatz,
                                               const std::vector<double>& params, double h = 1e-5);

/// Minimizes the ansatz energy. Throws NotPowerOfTwo for dims that are not
/// 2^q and CapExceeded for q > 14.
VqeResult vqe_minimize(const LinearOperator& op, const VqeConfig& cfg);
VqeResult vqe_minimize(const CsrMatrix& m, const VqeConfig& cfg);
VqeResult vqe_minimize(const DenseMatrix& m, const VqeConfig& cfg);

/// Coefficients Tr(M sigma_w) / 2^q over all 4^q words, |c| < 1e-12 dropped.
/// Requires q <= 6.
QubitHamiltonian pauli_decompose(const DenseMatrix& m, const std::string& label = {});

}  // namespace sbd
