#pragma once

// Command-line front end. Data goes to the output stream (or --out), diagnostics to the
// error stream. Exit codes: 0 success, 1 numerical failure, 2 usage or input error.

#include "wcm/wcm.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wcm::cli {

inline constexpr std::uint64_t kDefaultSeed = 12345;

enum ExitCode : int { kOk = 0, kNumericalFailure = 1, kUsageError = 2 };

/// Thrown for bad flag combinations; maps to exit code 2.
class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string subcommand;
    std::string spec_path;
    std::string preset;
    std::string preset_dir;
    std::optional<double> param;
    std::string out_path;
    std::uint64_t seed = kDefaultSeed;
    std::size_t n = 10'000;
    std::size_t replicates = 100;
    std::string grid;
    std::string policy = "keep";
    std::string cutoff = "auto";
    unsigned threads = 0;
    std::string table_path;
    std::string edges_path;
    std::string bins_path;
    std::string family = "per-contact";
};

inline std::string default_preset_dir() {
    if (const char* env = std::getenv("WCM_PRESET_DIR"))
        return env;
#ifdef WCM_PRESET_DIR
    return WCM_PRESET_DIR;
#else
    return "presets";
#endif
}

inline std::vector<std::string> list_presets(const std::string& dir) {
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
        if (entry.path().extension() == ".spec")
            names.push_back(entry.path().stem().string());
    std::sort(names.begin(), names.end());
    return names;
}

/// Raw spec text from --spec or --preset.
inline std::string spec_text(const RunConfig& cfg) {
    if (!cfg.spec_path.empty() && !cfg.preset.empty())
        throw usage_error("give either --spec or --preset, not both");
    if (!cfg.spec_path.empty())
        return read_text_file(cfg.spec_path);
    if (!cfg.preset.empty()) {
        const auto dir = cfg.preset_dir.empty() ? default_preset_dir() : cfg.preset_dir;
        const auto path = std::filesystem::path(dir) / (cfg.preset + ".spec");
        if (!std::filesystem::exists(path)) {
            std::string msg = "unknown preset '" + cfg.preset + "'; available:";
            for (const auto& p : list_presets(dir))
                msg += " " + p;
            throw usage_error(msg);
        }
        return read_text_file(path.string());
    }
    throw usage_error("a model is required: pass --spec FILE or --preset NAME");
}

inline ModelSpec resolve_spec(const RunConfig& cfg) { return parse_spec(spec_text(cfg), cfg.param); }

inline SimplifyPolicy parse_policy(const std::string& s) {
    if (s == "keep")
        return SimplifyPolicy::keep;
    if (s == "erase")
        return SimplifyPolicy::erase;
    throw usage_error("--policy must be keep or erase");
}

inline TransmissionFunction::Family parse_family(const std::string& s) {
    if (s == "per-contact")
        return TransmissionFunction::Family::per_contact;
    if (s == "shifted-per-contact")
        return TransmissionFunction::Family::shifted_per_contact;
    if (s == "constant")
        return TransmissionFunction::Family::constant;
    throw usage_error("--family must be per-contact, shifted-per-contact or constant");
}

/// Output sink: the --out file when given, else the provided stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_)
                throw usage_error("cannot write " + path);
            stream_ = file_.get();
        }
    }
    std::ostream& operator*() { return *stream_; }
    bool is_file() const { return file_ != nullptr; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

inline std::string num(double v) { return detail::format_double(v); }

inline int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto spec = resolve_spec(cfg);
    if (cfg.n == 0)
        throw usage_error("--n must be >= 1");
    auto gen = generate(spec, cfg.n, cfg.seed);
    const auto policy = parse_policy(cfg.policy);
    if (policy == SimplifyPolicy::erase)
        gen.graph = simplify(gen.graph, policy, cfg.seed);

    Sink sink(cfg.out_path, out);
    write_edge_list(*sink, gen.graph, cfg.seed);

    std::ostream& rep = sink.is_file() ? out : err;
    const auto& r = gen.report;
    rep << "n = " << gen.graph.n << '\n'
        << "seed = " << r.seed << '\n'
        << "policy = " << cfg.policy << '\n'
        << "edges = " << gen.graph.edges.size() << '\n'
        << "self_loops = " << r.self_loop_count << '\n'
        << "multi_edges = " << r.multi_edge_count << '\n'
        << "dropped_stubs = " << gen.graph.dropped_stubs.size() << '\n';
    for (const auto& [w, c] : r.stub_totals)
        rep << "stub_total[" << w << "] = " << c << '\n';
    return kOk;
}

inline int cmd_threshold(const RunConfig& cfg, std::ostream& out) {
    const auto spec = resolve_spec(cfg);
    const auto est = r0_estimate(spec);
    Sink sink(cfg.out_path, out);
    auto& os = *sink;
    os << "r0 = " << num(est.value) << '\n'
       << "reducible = " << (est.reducible ? "true" : "false") << '\n'
       << "r0_reshuffled = " << num(r0(reshuffled_spec(spec))) << '\n'
       << "giant_component_threshold = " << num(giant_component_threshold(spec.degree(), spec.weights())) << '\n';
    for (int d : spec.degree().support())
        os << "pressure[" << d << "] = " << num(infection_pressure(spec, d)) << '\n';
    return kOk;
}

inline int cmd_outbreak(const RunConfig& cfg, std::ostream& out) {
    const auto spec = resolve_spec(cfg);
    const auto sol = analyze_outbreak(spec);
    Sink sink(cfg.out_path, out);
    auto& os = *sink;
    os << "r0 = " << num(sol.r0) << '\n'
       << "rho = " << num(sol.rho) << '\n'
       << "tau = " << num(sol.tau()) << '\n'
       << "iterations = " << sol.iterations << '\n'
       << "residual = " << num(sol.residual) << '\n';
    for (std::size_t i = 0; i < sol.q.size(); ++i)
        os << "q[" << sol.q.degrees[i] << "] = " << num(sol.q.values[i]) << '\n';
    return kOk;
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    if (cfg.replicates == 0)
        throw usage_error("--replicates must be >= 1");
    if (cfg.n == 0)
        throw usage_error("--n must be >= 1");
    const auto spec = resolve_spec(cfg);
    EnsembleOptions opt;
    opt.n = cfg.n;
    opt.replicates = cfg.replicates;
    opt.seed = cfg.seed;
    opt.policy = parse_policy(cfg.policy);
    opt.threads = cfg.threads;
    if (cfg.cutoff != "auto")
        opt.major_cutoff = detail::to_double(cfg.cutoff, 0);
    const auto s = run_ensemble(spec, opt);

    Sink sink(cfg.out_path, out);
    auto& os = *sink;
    os << "replicate,final_size,generations\n";
    for (std::size_t r = 0; r < s.outcomes.size(); ++r)
        os << r << ',' << s.outcomes[r].final_size << ',' << s.outcomes[r].generations << '\n';
    os << "# n = " << cfg.n << '\n'
       << "# seed = " << cfg.seed << '\n'
       << "# replicates = " << s.replicates << '\n'
       << "# cutoff = " << num(s.cutoff) << '\n'
       << "# major_count = " << s.major_count << '\n'
       << "# major_fraction = " << num(s.major_fraction) << '\n'
       << "# mean_major_size_fraction = " << num(s.mean_major_size_fraction) << '\n'
       << "# major_size_stderr = " << num(s.major_size_stderr) << '\n';
    return kOk;
}

inline std::map<int, int> read_bins(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ingest_error(ingest_error::kind::io, 0, "cannot open " + path);
    std::map<int, int> bins;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto s = detail::trim(line);
        if (s.empty() || s.front() == '#' || s == "w,bin")
            continue;
        const auto comma = s.find(',');
        long long w, b;
        if (comma == std::string_view::npos || !detail::parse_ll(s.substr(0, comma), w) ||
            !detail::parse_ll(s.substr(comma + 1), b) || w < 0 || b < 0)
            throw ingest_error(ingest_error::kind::malformed_row, lineno, "expected 'w,bin'");
        bins[static_cast<int>(w)] = static_cast<int>(b);
    }
    return bins;
}

inline EdgeWeightTable load_table(const RunConfig& cfg, std::optional<WeightedGraph>& graph) {
    if (!cfg.table_path.empty() && !cfg.edges_path.empty())
        throw usage_error("give either --table or --edges, not both");
    EdgeWeightTable table;
    if (!cfg.table_path.empty()) {
        table = read_table_csv(cfg.table_path);
    } else if (!cfg.edges_path.empty()) {
        std::ifstream in(cfg.edges_path);
        if (!in)
            throw ingest_error(ingest_error::kind::io, 0, "cannot open " + cfg.edges_path);
        graph = read_edge_list(in).graph;
        table = empirical_table(*graph);
        table.validate();
    } else {
        throw usage_error("data is required: pass --table FILE or --edges FILE");
    }
    if (!cfg.bins_path.empty())
        table = rebin(table, read_bins(cfg.bins_path));
    return table;
}

inline void write_curve(std::ostream& os, const std::vector<CurveRow>& rows) {
    os << "parameter,r0,r0_reshuffled\n";
    for (const auto& r : rows)
        os << num(r.s) << ',' << num(r.r0) << ',' << num(r.r0_reshuffled) << '\n';
}

inline int cmd_fit(const RunConfig& cfg, std::ostream& out) {
    std::optional<WeightedGraph> graph;
    const auto table = load_table(cfg, graph);
    const auto fit = estimate(table);
    // binning changes weights but not degrees, so assortativity still uses the edge list
    const auto summary = summarize(table, graph ? &*graph : nullptr);

    Sink sink(cfg.out_path, out);
    auto& os = *sink;
    os << "# summary\n"
       << "# n = " << summary.n << '\n'
       << "# links = " << num(summary.links) << '\n'
       << "# mean_degree = " << num(summary.mean_degree) << '\n'
       << "# stdev_degree = " << num(summary.stdev_degree) << '\n'
       << "# assortativity = " << (summary.assortativity ? num(*summary.assortativity) : "unavailable") << '\n'
       << "# mean_weight = " << num(summary.mean_weight) << '\n'
       << "# stdev_weight = " << num(summary.stdev_weight) << '\n'
       << "# degree_weight_correlation = " << num(summary.degree_weight_correlation) << '\n'
       << "# degree_weight_sign = " << summary.degree_weight_sign << '\n';
    const auto family = parse_family(cfg.family);
    write_spec(os, fit.with(TransmissionFunction::constant(1.0)));
    if (!cfg.grid.empty()) {
        os << "\n[curve]\n";
        const auto grid = parse_grid(cfg.grid);
        write_curve(os, r0_curve(table, family, grid));
    }
    return kOk;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    Sink sink(cfg.out_path, out);
    if (!cfg.table_path.empty() || !cfg.edges_path.empty()) {
        if (cfg.grid.empty())
            throw usage_error("a table-driven sweep needs --grid");
        std::optional<WeightedGraph> graph;
        const auto table = load_table(cfg, graph);
        write_curve(*sink, r0_curve(table, parse_family(cfg.family), parse_grid(cfg.grid)));
        return kOk;
    }
    const auto text = spec_text(cfg);
    const auto decl = parse_sweep(text);
    if (!has_placeholder(text))
        throw usage_error("the model has no {x} sweep parameter");
    std::string grid = cfg.grid;
    if (grid.empty()) {
        if (!decl || !decl->grid)
            throw usage_error("no --grid given and the model declares no default grid");
        grid = *decl->grid;
    }
    std::vector<CurveRow> rows;
    for (double x : parse_grid(grid)) {
        const auto spec = parse_spec(text, x);
        rows.push_back({x, r0(spec), r0(reshuffled_spec(spec))});
    }
    write_curve(*sink, rows);
    return kOk;
}

/// Parses arguments and dispatches. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weighted configuration model: thresholds, outbreak probabilities, simulation and fitting"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto model_flags = [&](CLI::App* sub) {
        sub->add_option("--spec", cfg.spec_path, "Model spec file");
        sub->add_option("--preset", cfg.preset, "Named preset from the preset directory");
        sub->add_option("--preset-dir", cfg.preset_dir, "Preset directory (default: $WCM_PRESET_DIR or built-in)");
        sub->add_option("--param", cfg.param, "Value substituted for {x} in the model");
    };
    auto out_flag = [&](CLI::App* sub) { sub->add_option("--out", cfg.out_path, "Output file (default: stdout)"); };
    auto seed_flag = [&](CLI::App* sub) {
        sub->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    };

    auto* gen = app.add_subcommand("generate", "Draw a graph and write its edge list");
    model_flags(gen);
    out_flag(gen);
    seed_flag(gen);
    gen->add_option("--n", cfg.n, "Number of vertices")->capture_default_str();
    gen->add_option("--policy", cfg.policy, "keep | erase self-loops and multi-edges")->capture_default_str();

    auto* thr = app.add_subcommand("threshold", "R0, reshuffled R0 and giant-component threshold");
    model_flags(thr);
    out_flag(thr);

    auto* outb = app.add_subcommand("outbreak", "Extinction probabilities and major-outbreak probability");
    model_flags(outb);
    out_flag(outb);

    auto* sim = app.add_subcommand("simulate", "Monte Carlo Reed-Frost ensemble");
    model_flags(sim);
    out_flag(sim);
    seed_flag(sim);
    sim->add_option("--n", cfg.n, "Number of vertices")->capture_default_str();
    sim->add_option("--replicates", cfg.replicates, "Number of replicates")->capture_default_str();
    sim->add_option("--cutoff", cfg.cutoff, "Major-outbreak cutoff as a fraction of n, or auto")->capture_default_str();
    sim->add_option("--policy", cfg.policy, "keep | erase self-loops and multi-edges")->capture_default_str();
    sim->add_option("--threads", cfg.threads, "Worker threads (0: all cores)")->capture_default_str();

    auto* fit = app.add_subcommand("fit", "Estimate the model from an empirical table or edge list");
    out_flag(fit);
    fit->add_option("--table", cfg.table_path, "CSV with header w,d,count");
    fit->add_option("--edges", cfg.edges_path, "Edge list with lines 'u v w'");
    fit->add_option("--bins", cfg.bins_path, "CSV 'w,bin' mapping weights to coarser bins");
    fit->add_option("--grid", cfg.grid, "Optional R0 curve over s, as start:stop:step");
    fit->add_option("--family", cfg.family, "per-contact | shifted-per-contact | constant")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "R0 and reshuffled R0 over a parameter grid (CSV)");
    model_flags(sweep);
    out_flag(sweep);
    sweep->add_option("--grid", cfg.grid, "start:stop:step (default: the model's [sweep] grid)");
    sweep->add_option("--table", cfg.table_path, "Sweep s for a fitted table instead of a model");
    sweep->add_option("--edges", cfg.edges_path, "Sweep s for a fitted edge list instead of a model");
    sweep->add_option("--bins", cfg.bins_path, "CSV 'w,bin' mapping weights to coarser bins");
    sweep->add_option("--family", cfg.family, "per-contact | shifted-per-contact | constant")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();
    try {
        if (gen->parsed())
            return cmd_generate(cfg, out, err);
        if (thr->parsed())
            return cmd_threshold(cfg, out);
        if (outb->parsed())
            return cmd_outbreak(cfg, out);
        if (sim->parsed())
            return cmd_simulate(cfg, out);
        if (fit->parsed())
            return cmd_fit(cfg, out);
        if (sweep->parsed())
            return cmd_sweep(cfg, out);
    } catch (const numerical_failure& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return kUsageError;
}

} // namespace wcm::cli
