#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sbd/blockops.hpp"
#include "sbd/matsqrt.hpp"
#include "sbd/types.hpp"

namespace sbd {

/// One level of the compression: which root was kept and the scale/shift
/// that mapped its Hermitized form into [0, 1].
struct CompressionStep {
    /// 0 = lower-magnitude root (minus sign), 1 = upper-magnitude root.
    int branch = 0;
    double n_scale = 1.0;
    double t_shift = 0.0;
    bool used_det_prime = false;
    bool sqrt_fallback = false;

    friend bool operator==(const CompressionStep&, const CompressionStep&) = default;
};

struct CompressedHamiltonian {
    DenseMatrix block;
    std::vector<CompressionStep> steps;
    Index original_dim = 0;
    /// Sign applied at the outermost recovery level.
    int sign = -1;
    std::string label;
};

/// Returns (N, T) for a Hermitian PSD matrix; the default is N = max row
/// sum of |entries| and T = 0.
using SpectralAdjustment = std::function<std::pair<double, double>(const DenseMatrix&)>;
std::pair<double, double> gershgorin_adjustment(const DenseMatrix& g_prime);

enum class BranchPolicy {
    /// Follow the given path, or the lower root at every level.
    Fixed,
    /// Expand both roots per level and keep the one whose recovered
    /// candidate is smaller; ties go to branch 0.
    BestOfBoth,
};

struct SbdConfig {
    SqrtConfig sqrt;
    DetVariant det = DetVariant::Sridhara;
    double drop_rel = 1e-14;
    SpectralAdjustment adjustment = gershgorin_adjustment;
    BranchPolicy policy = BranchPolicy::Fixed;

    /// No dense sqrt fallback and no branch search.
    static SbdConfig strict();
};

struct StepResult {
    DenseMatrix gamma0;
    DenseMatrix gamma1;
    bool used_det_prime = false;
    SqrtResult sqrt;
};

/// Both block roots (A + D -+ sqrt((A + D)^2 - 4 det_block)) / 2. Falls back
/// to det' = AD - CB when A is singular.
StepResult sbd_step(const DenseMatrix& m, const SbdConfig& cfg = {});

/// g g^dagger, symmetrized so the result is exactly Hermitian.
DenseMatrix hermitize(const DenseMatrix& g);

struct Normalized {
    DenseMatrix matrix;
    double n_scale = 1.0;
    double t_shift = 0.0;
};

/// (1/N) g' + T I. Throws ZeroMatrix when N < 1e-300.
Normalized normalize(const DenseMatrix& g_prime, const SpectralAdjustment& adjust = gershgorin_adjustment);

struct CompressOptions {
    /// Branch per level for BranchPolicy::Fixed; empty means all zeros.
    std::vector<int> path;
    int sign = -1;
    std::string label;
};

/// k rounds of sbd_step -> branch selection -> hermitize -> normalize.
/// Requires dim = 2^n and 1 <= depth <= n - 1.
CompressedHamiltonian compress(const DenseMatrix& m, int depth, const CompressOptions& opts = {},
                               const SbdConfig& cfg = {});

/// sign * |sqrt((eps - T) N)|. Throws NegativeRadicand when eps < T - 1e-12.
double recover_eigenvalue(double eps, const CompressionStep& step, int sign);

/// Applies recover_eigenvalue innermost level first. Inner levels recover a
/// non-negative magnitude; only the outermost applies the global sign.
double recover(double eps, const std::vector<CompressionStep>& steps, int sign);
double recover(double eps, const CompressedHamiltonian& c);

/// (1 - 2^-k) * 100. Throws DomainError for k < 1.
double compression_ratio(int k);
/// ceil(-log2(1 - c / 100)) for 0 < c < 100.
int applications_needed(double c);

/// Parses "0101" style branch strings.
std::vector<int> parse_path(const std::string& bits);

// ---- artifact format ("sbd-v1") -------------------------------------------

std::string to_artifact_json(const CompressedHamiltonian& c);
CompressedHamiltonian parse_artifact_json(const std::string& text);
void write_artifact(const std::filesystem::path& path, const CompressedHamiltonian& c);
CompressedHamiltonian read_artifact(const std::filesystem::path& path);

}  // namespace sbd
