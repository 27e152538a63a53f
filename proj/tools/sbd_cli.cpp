// Command-line front end: compress, eig, rank, bench, gen, sqrt-check.
//
// Results go to stdout as one "key=value ..." line per record so scripts can
// parse every command the same way. The resolved configuration is logged to
// stderr.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "sbd/bench.hpp"
#include "sbd/eig.hpp"
#include "sbd/hammat.hpp"
#include "sbd/matsqrt.hpp"
#include "sbd/sbd.hpp"
#include "sbd/vqe.hpp"

namespace fs = std::filesystem;
using namespace sbd;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitPipeline = 3;
constexpr int kExitIncomplete = 4;

struct Global {
    std::uint64_t seed = 0;
    double tol = 1e-8;
    int threads = 1;
    bool strict = false;
};

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

void log_config(const Global& g, const std::string& command)
{
    std::cerr << "sbd " << command << ": seed=" << g.seed << " tol=" << fmt(g.tol) << " threads=" << g.threads
              << " strict=" << (g.strict ? 1 : 0) << "\n";
}

struct VqeFlags {
    int layers = 3;
    int max_iters = 500;
    int restarts = 3;
    double learning_rate = 0.05;

    void add(CLI::App* cmd)
    {
        cmd->add_option("--layers", layers, "VQE ansatz layers")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_option("--max-iters", max_iters, "VQE optimizer iterations per restart")
            ->capture_default_str()
            ->check(CLI::PositiveNumber);
        cmd->add_option("--restarts", restarts, "VQE restarts")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_option("--lr", learning_rate, "VQE learning rate")->capture_default_str()->check(CLI::PositiveNumber);
    }

    VqeConfig config(std::uint64_t seed) const
    {
        VqeConfig c;
        c.layers = layers;
        c.max_iters = max_iters;
        c.restarts = restarts;
        c.learning_rate = learning_rate;
        c.seed = seed;
        return c;
    }
};

struct SbdFlags {
    std::string policy;
    std::string path;
    int sign = -1;

    void add(CLI::App* cmd)
    {
        cmd->add_option("--policy", policy, "Branch policy: fixed or best (default best, fixed under --strict)")
            ->check(CLI::IsMember({"fixed", "best"}));
        cmd->add_option("--path", path, "Branch bitstring for the fixed policy, e.g. 0010");
        cmd->add_option("--sign", sign, "Root sign applied at the outermost recovery level")
            ->capture_default_str()
            ->check(CLI::IsMember({-1, 1}));
    }

    RunSettings settings(const Global& g) const
    {
        RunSettings s;
        s.seed = g.seed;
        s.tol = g.tol;
        s.strict = g.strict;
        if (!policy.empty())
            s.policy = policy == "fixed" ? BranchPolicy::Fixed : BranchPolicy::BestOfBoth;
        if (!path.empty()) {
            s.path = parse_path(path);
            if (policy.empty())
                s.policy = BranchPolicy::Fixed;
        }
        s.sign = sign;
        return s;
    }
};

bool is_artifact(const fs::path& path)
{
    if (path.extension() == ".mtx")
        return false;
    try {
        const auto doc = nlohmann::json::parse(read_text_file(path));
        return doc.is_object() && doc.contains("format");
    } catch (const nlohmann::json::exception&) {
        return false;
    }
}

int exit_code_for(const Error& e)
{
    switch (e.kind()) {
    case ErrorKind::ParseError:
    case ErrorKind::BadWord:
    case ErrorKind::IoError: return kExitParse;
    case ErrorKind::IncompleteGrid: return kExitIncomplete;
    default: return kExitPipeline;
    }
}

// ---- compress ----------------------------------------------------------------

struct CompressCmd {
    std::string input;
    std::string out;
    std::optional<int> depth;
    std::optional<double> target_percent;
    SbdFlags sbd;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("compress", "Compress a Hamiltonian and write an sbd-v1 artifact");
        cmd->add_option("input", input, "Pauli JSON or Matrix Market (.mtx) input")->required();
        cmd->add_option("-o,--out", out, "Artifact path")->required();
        auto* d = cmd->add_option("--depth", depth, "Number of SBD applications")->check(CLI::PositiveNumber);
        auto* t = cmd->add_option("--target-percent", target_percent, "Target size reduction in percent")
                      ->check(CLI::Range(0.0, 100.0));
        d->excludes(t);
        t->excludes(d);
        sbd.add(cmd);
    }

    int run(const Global& g) const
    {
        if (!depth && !target_percent)
            throw Error(ErrorKind::ParseError, "compress needs --depth or --target-percent");
        const int k = depth ? *depth : applications_needed(*target_percent);
        const PreparedInput in = prepare_input(input);
        const RunSettings s = sbd.settings(g);
        CompressOptions opts;
        opts.path = s.path;
        opts.sign = s.sign;
        opts.label = in.label;
        const CompressedHamiltonian c = compress(in.matrix.to_dense(), k, opts, s.sbd_config());
        write_artifact(out, c);
        std::string branches;
        for (const auto& st : c.steps)
            branches += static_cast<char>('0' + st.branch);
        std::cout << "depth=" << k << " compression_percent=" << fmt(compression_ratio(k))
                  << " original_dim=" << c.original_dim << " block_dim=" << c.block.rows() << " path=" << branches
                  << " out=" << out << "\n";
        return 0;
    }
};

// ---- eig ---------------------------------------------------------------------

struct EigCmd {
    std::string input;
    std::string method = "dense";
    int depth = 0;
    SbdFlags sbd;
    VqeFlags vqe;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("eig", "Ground-state energy of a raw input or a compressed artifact");
        cmd->add_option("input", input, "Pauli JSON, Matrix Market or sbd-v1 artifact")->required();
        cmd->add_option("-m,--method", method, "Eigensolver")
            ->capture_default_str()
            ->check(CLI::IsMember({"dense", "krylov", "vqe", "arnoldi"}));
        cmd->add_option("--depth", depth, "Compress raw input this many times before solving")
            ->capture_default_str()
            ->check(CLI::NonNegativeNumber);
        sbd.add(cmd);
        vqe.add(cmd);
    }

    EigResult solve(const DenseMatrix& m, Which which, const Global& g) const
    {
        KrylovOptions k;
        k.tol = g.tol;
        k.seed = g.seed;
        if (method == "dense")
            return dense_extreme(m, which);
        if (method == "krylov")
            return krylov_extreme(m, which, k);
        if (method == "arnoldi")
            return arnoldi_extreme(make_operator(m), which, k);
        VqeConfig c = vqe.config(g.seed);
        c.target = which;
        const VqeResult r = vqe_minimize(m, c);
        EigResult out;
        out.value = r.energy;
        out.iterations = r.iterations;
        // Energy standard deviation of the optimized state, reported in the residual slot.
        const Vector psi = Ansatz(log2_exact(static_cast<std::uint64_t>(m.rows())), c.layers).state(r.params);
        const Vector hpsi = m * psi;
        const double mean = psi.dot(hpsi).real();
        out.residual = (hpsi - mean * psi).norm();
        return out;
    }

    int run(const Global& g) const
    {
        if (is_artifact(input)) {
            if (depth != 0)
                throw Error(ErrorKind::DomainError, "--depth applies to raw inputs only");
            const CompressedHamiltonian c = read_artifact(input);
            const EigResult r = solve(c.block, Which::Largest, g);
            const double energy = recover(std::max(r.value, c.steps.back().t_shift), c);
            print(energy, r, c.block.rows(), static_cast<int>(c.steps.size()), fmt(r.value));
            return 0;
        }
        const PreparedInput in = prepare_input(input);
        if (depth == 0) {
            const EigResult r = solve(in.matrix.to_dense(), Which::Smallest, g);
            print(r.value, r, in.matrix.dim(), 0, {});
            return 0;
        }
        const RunSettings s = sbd.settings(g);
        CompressOptions opts;
        opts.path = s.path;
        opts.sign = s.sign;
        opts.label = in.label;
        const CompressedHamiltonian c = compress(in.matrix.to_dense(), depth, opts, s.sbd_config());
        const EigResult r = solve(c.block, Which::Largest, g);
        const double energy = recover(std::max(r.value, c.steps.back().t_shift), c);
        print(energy, r, c.block.rows(), depth, fmt(r.value));
        return 0;
    }

    void print(double energy, const EigResult& r, Index dim, int steps, const std::string& eps) const
    {
        std::cout << "energy=" << fmt(energy) << " residual=" << fmt(r.residual) << " method=" << method
                  << " dim=" << dim << " steps=" << steps;
        if (!eps.empty())
            std::cout << " eps=" << eps;
        std::cout << " iterations=" << r.iterations << "\n";
    }
};

// ---- rank / bench -----------------------------------------------------------

std::vector<std::string> molecule_order(const std::vector<ModelRun>& runs)
{
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& r : runs)
        if (seen.insert(r.spec.hamiltonian_label).second)
            out.push_back(r.spec.hamiltonian_label);
    return out;
}

RunSettings manifest_settings(const Global& g, const SbdFlags& sbd, const VqeFlags& vqe)
{
    RunSettings s = sbd.settings(g);
    s.vqe = vqe.config(g.seed);
    return s;
}

void report_failures(const std::vector<ModelRun>& runs)
{
    for (const auto& r : runs)
        if (!r.ok)
            std::cerr << "failed: " << r.spec.model_name() << " " << r.spec.source.string() << ": " << r.message << "\n";
}

struct RankCmd {
    std::string manifest;
    std::string out;
    std::string reference;
    SbdFlags sbd;
    VqeFlags vqe;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("rank", "Run a model grid and rank molecules by ground-state energy");
        cmd->add_option("manifest", manifest, "Manifest JSON")->required();
        cmd->add_option("-o,--out", out, "Output directory")->required();
        cmd->add_option("--reference", reference, "Reference model (default: manifest value, else dense-d0)");
        sbd.add(cmd);
        vqe.add(cmd);
    }

    int run(const Global& g) const
    {
        const Manifest m = read_manifest(manifest);
        const std::vector<ModelRun> runs = run_manifest(m, manifest_settings(g, sbd, vqe), false);
        fs::create_directories(out);
        write_text_file(fs::path(out) / "results.csv", results_csv(runs));
        report_failures(runs);
        const std::string ref = !reference.empty() ? reference : !m.reference.empty() ? m.reference : "dense-d0";
        const RankingReport rep = rank(runs, molecule_order(runs), ref);
        write_text_file(fs::path(out) / "ranking.csv", ranking_csv(rep));
        write_text_file(fs::path(out) / "ranking_plot.dat", ranking_plot_data(rep));
        auto compressed = [&rep](const std::string& model) {
            for (const auto& r : rep.models)
                if (r == model)
                    return model.size() < 3 || model.substr(model.size() - 3) != "-d0";
            return false;
        };
        std::cout << "models=" << rep.models.size() << " molecules=" << rep.molecules.size() << " reference=" << ref
                  << " match_rate=" << fmt(rep.match_rate)
                  << " sbd_match_rate=" << fmt(rep.match_rate_among(compressed))
                  << " ground_hit_rate=" << fmt(rep.ground_hit_rate) << "\n";
        return 0;
    }
};

struct BenchCmd {
    std::string manifest;
    std::string out;
    std::string reference = "vqe-d0";
    SbdFlags sbd;
    VqeFlags vqe;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("bench", "Time a model grid (median of 7 runs) and fit speed against depth");
        cmd->add_option("manifest", manifest, "Manifest JSON")->required();
        cmd->add_option("-o,--out", out, "Output directory")->required();
        cmd->add_option("--reference", reference, "Model whose time normalizes the speeds")->capture_default_str();
        sbd.add(cmd);
        vqe.add(cmd);
    }

    int run(const Global& g) const
    {
        const Manifest m = read_manifest(manifest);
        const std::vector<ModelRun> runs = run_manifest(m, manifest_settings(g, sbd, vqe), true);
        fs::create_directories(out);
        write_text_file(fs::path(out) / "results.csv", results_csv(runs));
        const SpeedReport rep = speed_report(runs, reference);
        write_text_file(fs::path(out) / "speed.csv", speed_csv(rep));
        write_text_file(fs::path(out) / "speed_plot.dat", speed_plot_data(rep));
        for (const auto& [solver, fit] : rep.fits)
            std::cout << "fit=" << solver << " a=" << fmt(fit.a) << " b=" << fmt(fit.b)
                      << " residual=" << fmt(fit.residual) << "\n";
        report_failures(runs);
        for (const auto& r : runs)
            if (!r.ok)
                return kExitPipeline;
        return 0;
    }
};

// ---- gen ---------------------------------------------------------------------

struct GenCmd {
    std::string model;
    std::string out;
    int qubits = 4;
    double coupling = 1.0;
    double field = 1.0;
    Index dim = 16;
    double shift = 0.0;
    std::optional<std::uint64_t> seed;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("gen", "Write a generated Hamiltonian");
        cmd->add_option("--model", model, "tfim, randherm or commuting")
            ->required()
            ->check(CLI::IsMember({"tfim", "randherm", "commuting"}));
        cmd->add_option("-o,--out", out, "Output path (Pauli JSON for tfim, Matrix Market otherwise)")->required();
        cmd->add_option("-n,--qubits", qubits, "tfim chain length")->capture_default_str();
        cmd->add_option("-J,--coupling", coupling, "tfim ZZ coupling")->capture_default_str();
        cmd->add_option("--field", field, "tfim transverse field")->capture_default_str();
        cmd->add_option("--dim", dim, "Matrix dimension for randherm and commuting")->capture_default_str();
        cmd->add_option("--shift", shift, "Add shift * I to matrix families")->capture_default_str();
        cmd->add_option("--gen-seed", seed, "Generator seed (defaults to the global seed)");
    }

    int run(const Global& g) const
    {
        const std::uint64_t s = seed.value_or(g.seed);
        if (model == "tfim") {
            QubitHamiltonian h = gen_tfim(qubits, coupling, field);
            write_pauli_json(out, h);
            std::cout << "model=tfim n_qubits=" << qubits << " terms=" << h.terms.size() << " out=" << out << "\n";
            return 0;
        }
        if (dim < 1)
            throw Error(ErrorKind::ParseError, "--dim must be positive");
        DenseMatrix m = model == "randherm" ? random_hermitian(dim, s) : gen_commuting_block(dim, s).to_dense();
        m.diagonal().array() += shift;
        const std::string comment = model + " dim=" + std::to_string(dim) + " seed=" + std::to_string(s) +
                                    " shift=" + fmt(shift);
        write_matrix_market(out, CsrMatrix::from_dense(m), comment);
        std::cout << "model=" << model << " dim=" << dim << " seed=" << s << " out=" << out << "\n";
        return 0;
    }
};

// ---- sqrt-check --------------------------------------------------------------

struct SqrtCheckCmd {
    std::string input;
    int depth = 1;
    bool direct = false;
    SbdFlags sbd;

    void add(CLI::App& app)
    {
        auto* cmd = app.add_subcommand("sqrt-check", "Square-root residual diagnostics per compression level");
        cmd->add_option("input", input, "Pauli JSON or Matrix Market input")->required();
        cmd->add_option("--depth", depth, "Levels to inspect")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_flag("--direct", direct, "Take the square root of the input itself");
        sbd.add(cmd);
    }

    int run(const Global& g) const
    {
        const RunSettings s = sbd.settings(g);
        const SbdConfig cfg = s.sbd_config();
        if (direct) {
            const DenseMatrix m = load_matrix(input).matrix.to_dense();
            const SqrtResult r = newton_sqrt(m, cfg.sqrt);
            const double dense_gap = m.rows() <= 512
                                         ? (r.value - dense_principal_sqrt(m)).norm() / std::max(r.value.norm(), 1e-300)
                                         : -1.0;
            std::cout << "dim=" << m.rows() << " residual=" << fmt(r.relative_residual)
                      << " fallback=" << r.fallback << " branch_cut=" << r.branch_cut_warning
                      << " dense_gap=" << fmt(dense_gap) << "\n";
            return 0;
        }
        const PreparedInput in = prepare_input(input);
        DenseMatrix current = in.matrix.to_dense();
        CompressOptions opts;
        opts.sign = s.sign;
        for (int level = 0; level < depth; ++level) {
            if (current.rows() < 4)
                throw Error(ErrorKind::DepthTooLarge, "input too small for depth " + std::to_string(depth));
            const StepResult sr = sbd_step(current, cfg);
            if (!s.path.empty())
                opts.path = {level < static_cast<int>(s.path.size()) ? s.path[level] : 0};
            const CompressedHamiltonian next = compress(current, 1, opts, cfg);
            std::cout << "level=" << level << " dim=" << current.rows() << " residual=" << fmt(sr.sqrt.relative_residual)
                      << " fallback=" << sr.sqrt.fallback << " branch_cut=" << sr.sqrt.branch_cut_warning
                      << " det_prime=" << sr.used_det_prime << " branch=" << next.steps[0].branch
                      << " n_scale=" << fmt(next.steps[0].n_scale) << "\n";
            current = next.block;
        }
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sridhara block diagonalization toolkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    Global g;
    if (const char* env = std::getenv("SBD_SEED")) {
        try {
            g.seed = std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "error: SBD_SEED must be a non-negative integer\n";
            return kExitParse;
        }
    }
    app.add_option("--seed", g.seed, "Seed for Krylov start vectors, VQE and generators (env SBD_SEED)")
        ->capture_default_str();
    app.add_option("--tol", g.tol, "Krylov residual tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--threads", g.threads, "Threads for dense kernels")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_flag("--strict", g.strict, "Disable the dense square-root fallback and the best-of-both branch search");

    CompressCmd compress_cmd;
    EigCmd eig_cmd;
    RankCmd rank_cmd;
    BenchCmd bench_cmd;
    GenCmd gen_cmd;
    SqrtCheckCmd sqrt_cmd;
    compress_cmd.add(app);
    eig_cmd.add(app);
    rank_cmd.add(app);
    bench_cmd.add(app);
    gen_cmd.add(app);
    sqrt_cmd.add(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    Eigen::setNbThreads(g.threads);
    const std::string name = app.get_subcommands().front()->get_name();
    log_config(g, name);
    try {
        if (name == "compress")
            return compress_cmd.run(g);
        if (name == "eig")
            return eig_cmd.run(g);
        if (name == "rank")
            return rank_cmd.run(g);
        if (name == "bench")
            return bench_cmd.run(g);
        if (name == "gen")
            return gen_cmd.run(g);
        return sqrt_cmd.run(g);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPipeline;
    }
}
