#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbd/eig.hpp"
#include "sbd/hammat.hpp"
#include "sbd/sbd.hpp"
#include "sbd/vqe.hpp"

namespace sbd {

enum class Eigensolver { Dense, Krylov, Vqe };

const char* to_string(Eigensolver e) noexcept;
Eigensolver parse_eigensolver(const std::string& name);

/// Settings shared by every model in a run. Per-model overrides replace
/// individual fields.
struct RunSettings {
    std::uint64_t seed = 0;
    double tol = 1e-8;
    bool strict = false;
    BranchPolicy policy = BranchPolicy::BestOfBoth;
    std::vector<int> path;
    int sign = -1;
    VqeConfig vqe;

    /// Library config derived from the settings (strict mode disables the
    /// sqrt fallback and the branch search).
    SbdConfig sbd_config() const;
};

struct ModelOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> layers;
    std::optional<int> restarts;
    std::optional<int> max_iters;
    std::optional<BranchPolicy> policy;
    std::optional<int> sign;
    std::optional<std::vector<int>> path;

    RunSettings apply(RunSettings base) const;
};

struct ModelSpec {
    /// Grouping key for ranking; defaults to "<eigensolver>-d<depth>".
    std::string model;
    std::string hamiltonian_label;
    std::filesystem::path source;
    Eigensolver eigensolver = Eigensolver::Dense;
    int depth = 0;
    ModelOverrides overrides;

    std::string model_name() const;
};

struct Manifest {
    std::vector<ModelSpec> models;
    /// Reference model for ranking; empty means "dense-d0".
    std::string reference;
};

/// Accepts a bare list of model objects or {"reference": ..., "models": [...]}.
/// Relative sources resolve against base_dir.
Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir = {});
Manifest read_manifest(const std::filesystem::path& path);

struct ModelRun {
    ModelSpec spec;
    bool ok = false;
    std::string message;
    double energy = 0.0;
    /// Seconds spent in compression + eigensolve (file input excluded).
    double wall_time = 0.0;
    /// Dimension of the matrix handed to the eigensolver.
    Index matrix_dim = 0;
    std::vector<CompressionStep> steps;
};

/// Prepared input: realized and padded to a power of two.
struct PreparedInput {
    CsrMatrix matrix;
    std::string label;
    int n_qubits = 0;
};
PreparedInput prepare_input(const std::filesystem::path& source);

/// Compression (depth > 0) plus eigensolve plus recovery on prepared input.
/// Errors propagate.
double solve_model(const PreparedInput& input, Eigensolver solver, int depth, const RunSettings& settings,
                   Index* solved_dim = nullptr, std::vector<CompressionStep>* steps = nullptr);

/// Loads, prepares and solves one model, timing the solve once. Failures are
/// recorded in the result instead of thrown.
ModelRun run_model(const ModelSpec& spec, const RunSettings& settings);

inline constexpr int kTimedRuns = 7;

/// Median of `runs` timed calls after one untimed warm-up.
double median_wall_time(const std::function<void()>& fn, int runs = kTimedRuns);

/// run_model with the wall time replaced by the median over kTimedRuns.
ModelRun time_model(const ModelSpec& spec, const RunSettings& settings, int runs = kTimedRuns);

std::vector<ModelRun> run_manifest(const Manifest& manifest, const RunSettings& settings, bool timed);

struct RankingReport {
    std::vector<std::string> models;
    std::vector<std::string> molecules;
    std::string reference;
    /// energies[model][molecule]
    std::map<std::string, std::map<std::string, double>> energies;
    /// Molecule labels in ascending energy per model.
    std::map<std::string, std::vector<std::string>> orderings;
    /// Fraction of all models (reference included) whose ordering equals the reference.
    double match_rate = 0.0;
    /// Fraction of models whose lowest molecule is the reference's lowest.
    double ground_hit_rate = 0.0;

    bool matches_reference(const std::string& model) const;
    bool hits_ground(const std::string& model) const;
    /// match_rate restricted to models satisfying pred.
    double match_rate_among(const std::function<bool(const std::string&)>& pred) const;
    double ground_hit_rate_among(const std::function<bool(const std::string&)>& pred) const;
};

/// Throws IncompleteGrid when a model lacks a successful run for any molecule
/// or the reference model is absent.
RankingReport rank(const std::vector<ModelRun>& runs, const std::vector<std::string>& molecules,
                   const std::string& reference = "dense-d0");

struct ExpFit {
    double a = 0.0;
    double b = 0.0;
    /// RMS residual of the log-linear fit.
    double residual = 0.0;
};

/// Least-squares fit of log(speed) = log(a) + b * depth. Needs at least three
/// points with positive speeds; throws DegenerateFit when all depths agree.
ExpFit speed_fit(const std::vector<double>& depths, const std::vector<double>& speeds);

struct SpeedEntry {
    std::string model;
    std::string label;
    int depth = 0;
    double wall_time = 0.0;
    double relative_speed = 0.0;
};

struct SpeedReport {
    std::vector<SpeedEntry> entries;
    /// Per-eigensolver fit across depths (only where >= 3 depths exist).
    std::map<std::string, ExpFit> fits;
};

/// Relative speed = reference time / model time, normalized per molecule on
/// the reference model's time for that molecule.
SpeedReport speed_report(const std::vector<ModelRun>& runs, const std::string& reference = "vqe-d0");

// ---- output ------------------------------------------------------------------

std::string results_csv(const std::vector<ModelRun>& runs);
std::string ranking_csv(const RankingReport& report);
std::string speed_csv(const SpeedReport& report);
/// Whitespace table "depth relative_speed" blocks per eigensolver, separated
/// by two blank lines for gnuplot's `index`.
std::string speed_plot_data(const SpeedReport& report);
/// "rank model molecule energy" rows, one block per model.
std::string ranking_plot_data(const RankingReport& report);

}  // namespace sbd
