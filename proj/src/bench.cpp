#include "sbd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sbd {

const char* to_string(Eigensolver e) noexcept
{
    switch (e) {
    case Eigensolver::Dense: return "dense";
    case Eigensolver::Krylov: return "krylov";
    case Eigensolver::Vqe: return "vqe";
    }
    return "unknown";
}

Eigensolver parse_eigensolver(const std::string& name)
{
    if (name == "dense")
        return Eigensolver::Dense;
    if (name == "krylov" || name == "arnoldi" || name == "lanczos")
        return Eigensolver::Krylov;
    if (name == "vqe")
        return Eigensolver::Vqe;
    throw Error(ErrorKind::ParseError, "unknown eigensolver '" + name + "'");
}

SbdConfig RunSettings::sbd_config() const
{
    SbdConfig cfg = strict ? SbdConfig::strict() : SbdConfig{};
    cfg.policy = strict ? BranchPolicy::Fixed : policy;
    return cfg;
}

RunSettings ModelOverrides::apply(RunSettings base) const
{
    if (seed) {
        base.seed = *seed;
        base.vqe.seed = *seed;
    }
    if (layers)
        base.vqe.layers = *layers;
    if (restarts)
        base.vqe.restarts = *restarts;
    if (max_iters)
        base.vqe.max_iters = *max_iters;
    if (policy)
        base.policy = *policy;
    if (sign)
        base.sign = *sign;
    if (path)
        base.path = *path;
    return base;
}

std::string ModelSpec::model_name() const
{
    return model.empty() ? std::string(to_string(eigensolver)) + "-d" + std::to_string(depth) : model;
}

// ---- manifest ----------------------------------------------------------------

namespace {

using json = nlohmann::json;

BranchPolicy parse_policy(const std::string& s)
{
    if (s == "fixed")
        return BranchPolicy::Fixed;
    if (s == "best" || s == "best-of-both")
        return BranchPolicy::BestOfBoth;
    throw Error(ErrorKind::ParseError, "unknown branch policy '" + s + "'");
}

ModelSpec parse_model(const json& j, const std::filesystem::path& base_dir)
{
    ModelSpec spec;
    spec.model = j.value("model", std::string{});
    spec.hamiltonian_label = j.value("label", std::string{});
    std::filesystem::path src = j.at("source").get<std::string>();
    spec.source = src.is_relative() && !base_dir.empty() ? base_dir / src : src;
    spec.eigensolver = parse_eigensolver(j.at("eigensolver").get<std::string>());
    spec.depth = j.value("depth", 0);
    if (spec.depth < 0)
        throw Error(ErrorKind::ParseError, "depth must be >= 0");
    if (j.contains("overrides")) {
        const json& o = j.at("overrides");
        auto& ov = spec.overrides;
        if (o.contains("seed"))
            ov.seed = o.at("seed").get<std::uint64_t>();
        if (o.contains("layers"))
            ov.layers = o.at("layers").get<int>();
        if (o.contains("restarts"))
            ov.restarts = o.at("restarts").get<int>();
        if (o.contains("max_iters"))
            ov.max_iters = o.at("max_iters").get<int>();
        if (o.contains("policy"))
            ov.policy = parse_policy(o.at("policy").get<std::string>());
        if (o.contains("sign"))
            ov.sign = o.at("sign").get<int>();
        if (o.contains("path"))
            ov.path = parse_path(o.at("path").get<std::string>());
    }
    return spec;
}

}  // namespace

Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir)
{
    try {
        const json doc = json::parse(text);
        Manifest m;
        const json* list = &doc;
        if (doc.is_object()) {
            m.reference = doc.value("reference", std::string{});
            list = &doc.at("models");
        }
        for (const auto& entry : *list)
            m.models.push_back(parse_model(entry, base_dir));
        return m;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError)
            throw;
        throw Error(ErrorKind::ParseError, e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("malformed manifest: ") + e.what());
    }
}

Manifest read_manifest(const std::filesystem::path& path)
{
    return parse_manifest(read_text_file(path), path.parent_path());
}

// ---- running models ----------------------------------------------------------

PreparedInput prepare_input(const std::filesystem::path& source)
{
    LoadedMatrix loaded = load_matrix(source);
    PreparedInput in{pad_to_pow2(loaded.matrix), loaded.label, 0};
    in.n_qubits = log2_exact(static_cast<std::uint64_t>(in.matrix.dim()));
    return in;
}

double solve_model(const PreparedInput& input, Eigensolver solver, int depth, const RunSettings& settings,
                   Index* solved_dim, std::vector<CompressionStep>* steps)
{
    KrylovOptions kopts;
    kopts.tol = settings.tol;
    kopts.seed = settings.seed;
    VqeConfig vcfg = settings.vqe;

    if (depth == 0) {
        if (solved_dim)
            *solved_dim = input.matrix.dim();
        switch (solver) {
        case Eigensolver::Dense: return dense_extreme(input.matrix.to_dense(), Which::Smallest).value;
        case Eigensolver::Krylov: return krylov_extreme(input.matrix, Which::Smallest, kopts).value;
        case Eigensolver::Vqe:
            vcfg.target = Which::Smallest;
            return vqe_minimize(input.matrix, vcfg).energy;
        }
    }

    CompressOptions copts;
    copts.path = settings.path;
    copts.sign = settings.sign;
    copts.label = input.label;
    const CompressedHamiltonian c = compress(input.matrix.to_dense(), depth, copts, settings.sbd_config());
    if (solved_dim)
        *solved_dim = c.block.rows();
    if (steps)
        *steps = c.steps;

    double eps = 0.0;
    switch (solver) {
    case Eigensolver::Dense: eps = dense_extreme(c.block, Which::Largest).value; break;
    case Eigensolver::Krylov: eps = krylov_extreme(c.block, Which::Largest, kopts).value; break;
    case Eigensolver::Vqe:
        vcfg.target = Which::Largest;
        eps = vqe_minimize(c.block, vcfg).energy;
        break;
    }
    return recover(std::max(eps, c.steps.back().t_shift), c);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void check_depth(const ModelSpec& spec, const PreparedInput& in)
{
    if (spec.depth >= in.n_qubits)
        throw Error(ErrorKind::DepthTooLarge, "depth " + std::to_string(spec.depth) + " must be below " +
                                                  std::to_string(in.n_qubits) + " qubits");
}

}  // namespace

ModelRun run_model(const ModelSpec& spec, const RunSettings& settings)
{
    ModelRun run;
    run.spec = spec;
    try {
        const PreparedInput in = prepare_input(spec.source);
        if (run.spec.hamiltonian_label.empty())
            run.spec.hamiltonian_label = in.label;
        check_depth(spec, in);
        const RunSettings s = spec.overrides.apply(settings);
        const auto start = std::chrono::steady_clock::now();
        run.energy = solve_model(in, spec.eigensolver, spec.depth, s, &run.matrix_dim, &run.steps);
        run.wall_time = seconds_since(start);
        run.ok = true;
    } catch (const std::exception& e) {
        run.ok = false;
        run.message = e.what();
    }
    return run;
}

double median_wall_time(const std::function<void()>& fn, int runs)
{
    if (runs < 1)
        throw Error(ErrorKind::DomainError, "need at least one timed run");
    fn();
    std::vector<double> times;
    times.reserve(runs);
    for (int i = 0; i < runs; ++i) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        times.push_back(seconds_since(start));
    }
    std::sort(times.begin(), times.end());
    const std::size_t mid = times.size() / 2;
    return times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
}

ModelRun time_model(const ModelSpec& spec, const RunSettings& settings, int runs)
{
    ModelRun run;
    run.spec = spec;
    try {
        const PreparedInput in = prepare_input(spec.source);
        if (run.spec.hamiltonian_label.empty())
            run.spec.hamiltonian_label = in.label;
        check_depth(spec, in);
        const RunSettings s = spec.overrides.apply(settings);
        run.energy = solve_model(in, spec.eigensolver, spec.depth, s, &run.matrix_dim, &run.steps);
        run.wall_time = median_wall_time([&] { solve_model(in, spec.eigensolver, spec.depth, s); }, runs);
        run.ok = true;
    } catch (const std::exception& e) {
        run.ok = false;
        run.message = e.what();
    }
    return run;
}

std::vector<ModelRun> run_manifest(const Manifest& manifest, const RunSettings& settings, bool timed)
{
    std::vector<ModelRun> runs;
    runs.reserve(manifest.models.size());
    for (const auto& spec : manifest.models)
        runs.push_back(timed ? time_model(spec, settings) : run_model(spec, settings));
    return runs;
}

// ---- ranking -----------------------------------------------------------------

bool RankingReport::matches_reference(const std::string& model) const
{
    return orderings.at(model) == orderings.at(reference);
}

bool RankingReport::hits_ground(const std::string& model) const
{
    return orderings.at(model).front() == orderings.at(reference).front();
}

double RankingReport::match_rate_among(const std::function<bool(const std::string&)>& pred) const
{
    int total = 0, hits = 0;
    for (const auto& m : models) {
        if (!pred(m))
            continue;
        ++total;
        hits += matches_reference(m);
    }
    return total ? static_cast<double>(hits) / total : 0.0;
}

double RankingReport::ground_hit_rate_among(const std::function<bool(const std::string&)>& pred) const
{
    int total = 0, hits = 0;
    for (const auto& m : models) {
        if (!pred(m))
            continue;
        ++total;
        hits += hits_ground(m);
    }
    return total ? static_cast<double>(hits) / total : 0.0;
}

RankingReport rank(const std::vector<ModelRun>& runs, const std::vector<std::string>& molecules,
                   const std::string& reference)
{
    RankingReport report;
    report.molecules = molecules;
    report.reference = reference;
    for (const auto& run : runs) {
        const std::string name = run.spec.model_name();
        if (std::find(report.models.begin(), report.models.end(), name) == report.models.end())
            report.models.push_back(name);
        if (run.ok)
            report.energies[name][run.spec.hamiltonian_label] = run.energy;
    }
    if (std::find(report.models.begin(), report.models.end(), reference) == report.models.end())
        throw Error(ErrorKind::IncompleteGrid, "reference model '" + reference + "' not in the grid");
    for (const auto& model : report.models) {
        const auto& row = report.energies[model];
        for (const auto& mol : molecules)
            if (!row.count(mol))
                throw Error(ErrorKind::IncompleteGrid, "model '" + model + "' has no result for '" + mol + "'");
        std::vector<std::string> order = molecules;
        std::stable_sort(order.begin(), order.end(),
                         [&row](const std::string& l, const std::string& r) { return row.at(l) < row.at(r); });
        report.orderings[model] = std::move(order);
    }
    auto all = [](const std::string&) { return true; };
    report.match_rate = report.match_rate_among(all);
    report.ground_hit_rate = report.ground_hit_rate_among(all);
    return report;
}

// ---- speed -------------------------------------------------------------------

ExpFit speed_fit(const std::vector<double>& depths, const std::vector<double>& speeds)
{
    if (depths.size() != speeds.size() || depths.size() < 3)
        throw Error(ErrorKind::DomainError, "speed fit needs at least three (depth, speed) points");
    const double n = static_cast<double>(depths.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < depths.size(); ++i) {
        if (!(speeds[i] > 0.0))
            throw Error(ErrorKind::DomainError, "speeds must be positive");
        const double y = std::log(speeds[i]);
        sx += depths[i];
        sy += y;
        sxx += depths[i] * depths[i];
        sxy += depths[i] * y;
    }
    const double denom = n * sxx - sx * sx;
    const bool all_equal = std::all_of(depths.begin(), depths.end(), [&](double d) { return d == depths.front(); });
    if (all_equal || std::abs(denom) <= 1e-12 * std::max(1.0, n * sxx))
        throw Error(ErrorKind::DegenerateFit, "all depths are equal");
    ExpFit fit;
    fit.b = (n * sxy - sx * sy) / denom;
    const double log_a = (sy - fit.b * sx) / n;
    fit.a = std::exp(log_a);
    double ss = 0.0;
    for (std::size_t i = 0; i < depths.size(); ++i) {
        const double r = std::log(speeds[i]) - (log_a + fit.b * depths[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

SpeedReport speed_report(const std::vector<ModelRun>& runs, const std::string& reference)
{
    std::map<std::string, double> ref_time;
    for (const auto& r : runs)
        if (r.ok && r.spec.model_name() == reference)
            ref_time[r.spec.hamiltonian_label] = r.wall_time;

    SpeedReport report;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> series;
    for (const auto& r : runs) {
        if (!r.ok || !ref_time.count(r.spec.hamiltonian_label))
            continue;
        SpeedEntry e;
        e.model = r.spec.model_name();
        e.label = r.spec.hamiltonian_label;
        e.depth = r.spec.depth;
        e.wall_time = r.wall_time;
        e.relative_speed = ref_time.at(e.label) / r.wall_time;
        report.entries.push_back(e);
        auto& s = series[to_string(r.spec.eigensolver)];
        s.first.push_back(e.depth);
        s.second.push_back(e.relative_speed);
    }
    for (const auto& [solver, pts] : series) {
        const std::set<double> distinct(pts.first.begin(), pts.first.end());
        if (distinct.size() >= 3)
            report.fits[solver] = speed_fit(pts.first, pts.second);
    }
    return report;
}

// ---- output ------------------------------------------------------------------

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string results_csv(const std::vector<ModelRun>& runs)
{
    std::string out = "label,eigensolver,depth,matrix_dim,energy_hartree,wall_time_s,status\n";
    for (const auto& r : runs) {
        out += csv_field(r.spec.hamiltonian_label) + "," + to_string(r.spec.eigensolver) + "," +
               std::to_string(r.spec.depth) + "," + std::to_string(r.matrix_dim) + "," +
               (r.ok ? num(r.energy) : std::string{}) + "," + (r.ok ? num(r.wall_time) : std::string{}) + "," +
               (r.ok ? std::string("ok") : csv_field("failed: " + r.message)) + "\n";
    }
    return out;
}

std::string ranking_csv(const RankingReport& report)
{
    std::string out = "model";
    for (std::size_t i = 0; i < report.molecules.size(); ++i)
        out += ",rank" + std::to_string(i + 1);
    out += ",matches_reference\n";
    for (const auto& model : report.models) {
        out += csv_field(model);
        for (const auto& mol : report.orderings.at(model))
            out += "," + csv_field(mol);
        out += report.matches_reference(model) ? ",1\n" : ",0\n";
    }
    return out;
}

std::string speed_csv(const SpeedReport& report)
{
    std::string out = "# relative speed = reference wall time / model wall time, normalized per molecule\n";
    out += "model,label,depth,wall_time_s,relative_speed\n";
    for (const auto& e : report.entries)
        out += csv_field(e.model) + "," + csv_field(e.label) + "," + std::to_string(e.depth) + "," + num(e.wall_time) +
               "," + num(e.relative_speed) + "\n";
    for (const auto& [solver, fit] : report.fits)
        out += "# fit " + solver + ": speed = " + num(fit.a) + " * exp(" + num(fit.b) + " * depth), rms log residual " +
               num(fit.residual) + "\n";
    return out;
}

std::string speed_plot_data(const SpeedReport& report)
{
    std::map<std::string, std::vector<const SpeedEntry*>> by_model;
    for (const auto& e : report.entries)
        by_model[e.model].push_back(&e);
    std::string out;
    bool first = true;
    for (const auto& [model, entries] : by_model) {
        if (!first)
            out += "\n\n";
        first = false;
        out += "# " + model + "\n# depth relative_speed label\n";
        for (const auto* e : entries)
            out += std::to_string(e->depth) + " " + num(e->relative_speed) + " \"" + e->label + "\"\n";
    }
    return out;
}

std::string ranking_plot_data(const RankingReport& report)
{
    std::string out;
    for (std::size_t m = 0; m < report.models.size(); ++m) {
        if (m)
            out += "\n\n";
        const auto& model = report.models[m];
        out += "# " + model + "\n# rank molecule energy\n";
        const auto& order = report.orderings.at(model);
        for (std::size_t i = 0; i < order.size(); ++i)
            out += std::to_string(i + 1) + " \"" + order[i] + "\" " + num(report.energies.at(model).at(order[i])) + "\n";
    }
    return out;
}

}  // namespace sbd
