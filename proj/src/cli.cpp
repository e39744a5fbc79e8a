#include "mavpoint/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>

#include "mavpoint/cluster.hpp"
#include "mavpoint/config.hpp"
#include "mavpoint/error.hpp"
#include "mavpoint/features.hpp"
#include "mavpoint/matrix_io.hpp"
#include "mavpoint/report.hpp"
#include "mavpoint/synth.hpp"
#include "mavpoint/trace.hpp"

namespace mavpoint {

namespace {

namespace fs = std::filesystem;
using StageDumps = std::vector<std::pair<std::string, std::string>>;

void require_file(const std::string& what, const fs::path& path) {
    if (!fs::is_regular_file(path)) throw ValidationError(what + " not found: " + path.string());
}

RunConfig load_config(const fs::path& path) {
    require_file("config file", path);
    return load_run_config(path);
}

const PipelineConfig& need_pipeline(const RunConfig& cfg) {
    if (!cfg.pipeline) throw ValidationError("config: missing \"pipeline\" section (projection_seed is required)");
    return *cfg.pipeline;
}

const ClusterConfig& need_cluster(const RunConfig& cfg) {
    if (!cfg.cluster) throw ValidationError("config: missing \"cluster\" section (seed is required)");
    return *cfg.cluster;
}

void write_stage_dumps(const PipelineResult& result, const StageDumps& dumps) {
    for (const auto& [name, path] : dumps) {
        const Stage stage = stage_from_string(name);
        const FeatureMatrix* m = result.find(stage);
        if (m == nullptr) throw ValidationError(std::string("stage ") + name + " is not produced in this mode");
        write_matrix_csv(*m, path);
    }
}

PipelineResult pipeline_step(const WindowSeries& series, const PipelineConfig& cfg, PipelineMode mode,
                             const StageDumps& dumps, std::ostream& err) {
    PipelineResult result = run_pipeline(series, cfg, mode);
    if (mode != PipelineMode::bbv && result.mem_fraction == 0.0) {
        err << "warning: trace has no memory operations; MAV features are all zero\n";
    }
    write_stage_dumps(result, dumps);
    return result;
}

struct ClusterOutputs {
    Clustering clustering;
    SimPointSet simpoints;
};

ClusterOutputs cluster_step(const FeatureMatrix& m, std::size_t k, const ClusterConfig& cfg, const fs::path& dir,
                            const std::string& name) {
    ClusterOutputs out;
    out.clustering = kmeans(m, k, cfg.seed, cfg.restarts);
    out.simpoints = select_simpoints(out.clustering, m);
    write_text_file(dir / (name + ".simpoints"), format_simpoints(out.simpoints));
    write_text_file(dir / (name + ".weights"), format_weights(out.simpoints));
    write_text_file(dir / (name + ".cluster.json"), format_cluster_json(out.clustering, out.simpoints));
    return out;
}

void recplot_step(const FeatureMatrix& m, Metric metric, std::size_t max_dim, const fs::path& dir,
                  const std::string& name) {
    const RecurrenceGrid grid = recurrence(m, metric, max_dim);
    write_text_file(dir / (name + ".csv"), format_grid_csv(grid));
    emit_pgm(grid, dir / (name + ".pgm"));
}

struct EvalOutputs {
    ProjectionReport report;
    std::optional<double> ari;
};

EvalOutputs eval_step(const WindowSeries& series, const ClusterOutputs& c, const fs::path& dir) {
    EvalOutputs out;
    out.report = evaluate_projection(series, c.simpoints);
    write_text_file(dir / "report.json", format_report_json(out.report));
    write_text_file(dir / "timeline.csv", format_timeline_csv(series, c.clustering, c.simpoints));
    const bool labelled = std::all_of(series.windows.begin(), series.windows.end(),
                                      [](const WindowRecord& w) { return w.phase.has_value(); });
    if (labelled) out.ari = phase_alignment(series, c.clustering);
    return out;
}

std::size_t resolve_k(const std::string& k_arg, const FeatureMatrix& m, const ClusterConfig& cfg, std::ostream& out) {
    if (k_arg == "auto") {
        const std::size_t k_max = std::min<std::size_t>(cfg.k_max, m.n_windows());
        const std::size_t k = choose_k(m, k_max, cfg.seed, cfg.bic_threshold, cfg.restarts);
        out << "chosen k: " << k << "\n";
        return k;
    }
    if (k_arg.empty()) return cfg.k;
    std::size_t used = 0;
    unsigned long long k = 0;
    try {
        k = std::stoull(k_arg, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != k_arg.size()) throw ValidationError("--k expects a positive integer or \"auto\"");
    return static_cast<std::size_t>(k);
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mavpoint: BBV+MAV phase clustering and simulation-point selection"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Upper bound on worker threads (default: machine parallelism)");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic trace from a workload config");
    std::string synth_spec;
    std::string synth_out;
    synth->add_option("--spec,--config", synth_spec, "Workload config (JSON)")->required();
    synth->add_option("--out", synth_out, "Output trace path (.jsonl or .jsonl.gz)")->required();

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "Build feature matrices from a trace");
    std::string pipe_trace;
    std::string pipe_config;
    std::string pipe_mode = "combined";
    std::string pipe_out;
    StageDumps pipe_dumps;
    pipe->add_option("--trace", pipe_trace)->required();
    pipe->add_option("--config", pipe_config)->required();
    pipe->add_option("--mode", pipe_mode, "bbv | mav | combined")->capture_default_str();
    pipe->add_option("--out", pipe_out, "Output directory")->required();
    pipe->add_option("--dump-stage", pipe_dumps, "Write an intermediate matrix: --dump-stage <stage> <path>");

    // cluster
    auto* clus = app.add_subcommand("cluster", "k-means + simulation point selection");
    std::string clus_matrix;
    std::string clus_config;
    std::string clus_out;
    std::string clus_k;
    std::string clus_name = "mavpoint";
    clus->add_option("--matrix", clus_matrix, "Feature matrix CSV")->required();
    clus->add_option("--config", clus_config)->required();
    clus->add_option("--out", clus_out, "Output directory")->required();
    clus->add_option("--k", clus_k, "Cluster count or \"auto\" (BIC); default from config");
    clus->add_option("--name", clus_name, "Output file stem")->capture_default_str();

    // recplot
    auto* rec = app.add_subcommand("recplot", "Recurrence (self-similarity) grid");
    std::string rec_matrix;
    std::string rec_out;
    std::string rec_config;
    std::size_t rec_max_dim = 0;
    std::string rec_metric;
    std::string rec_name = "grid";
    rec->add_option("--matrix", rec_matrix)->required();
    rec->add_option("--out", rec_out, "Output directory")->required();
    rec->add_option("--config", rec_config);
    rec->add_option("--max-dim", rec_max_dim, "Grid side cap (default from config, else 500)");
    rec->add_option("--metric", rec_metric, "euclidean | manhattan");
    rec->add_option("--name", rec_name)->capture_default_str();

    // eval
    auto* ev = app.add_subcommand("eval", "Projection accuracy against the trace oracle");
    std::string ev_trace;
    std::string ev_cluster;
    std::string ev_out;
    ev->add_option("--trace", ev_trace)->required();
    ev->add_option("--cluster", ev_cluster, "Cluster bundle (.cluster.json)")->required();
    ev->add_option("--out", ev_out, "Output directory")->required();

    // run-all
    auto* all = app.add_subcommand("run-all", "synth -> pipeline (bbv, combined) -> cluster -> recplot -> eval");
    std::string all_config;
    std::string all_out;
    std::string all_k;
    StageDumps all_dumps;
    all->add_option("--config", all_config)->required();
    all->add_option("--out", all_out, "Output directory (default: config output_dir)");
    all->add_option("--k", all_k, "Override the configured cluster count");
    all->add_option("--dump-stage", all_dumps, "Dump a combined-mode stage: --dump-stage <stage> <path>");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("mavpoint");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (threads < 0) throw ValidationError("--threads must be non-negative");
        set_thread_count(threads);

        if (synth->parsed()) {
            const RunConfig cfg = load_config(synth_spec);
            if (!cfg.workload) throw ValidationError("config: missing \"workload\" section");
            const WindowSeries series = generate(*cfg.workload, cfg.oracle);
            write_series(series, synth_out);
            out << "wrote " << series.size() << " windows to " << synth_out << "\n";
        } else if (pipe->parsed()) {
            require_file("trace", pipe_trace);
            const RunConfig cfg = load_config(pipe_config);
            const PipelineMode mode = mode_from_string(pipe_mode);
            const WindowSeries series = read_series(pipe_trace);
            fs::create_directories(pipe_out);
            const PipelineResult result = pipeline_step(series, need_pipeline(cfg), mode, pipe_dumps, err);
            const fs::path path = fs::path(pipe_out) / (std::string("matrix_") + to_string(mode) + ".csv");
            write_matrix_csv(result.output, path);
            out << "wrote " << result.output.n_windows() << "x" << result.output.dim() << " " << to_string(mode)
                << " matrix to " << path.string() << "\n";
        } else if (clus->parsed()) {
            require_file("matrix", clus_matrix);
            const RunConfig cfg = load_config(clus_config);
            const ClusterConfig& cc = need_cluster(cfg);
            const FeatureMatrix m = read_matrix_csv(clus_matrix);
            const std::size_t k = resolve_k(clus_k, m, cc, out);
            fs::create_directories(clus_out);
            const ClusterOutputs c = cluster_step(m, k, cc, clus_out, clus_name);
            out << "k=" << k << " inertia=" << format_real(c.clustering.inertia) << " simpoints="
                << c.simpoints.points.size() << "\n";
        } else if (rec->parsed()) {
            require_file("matrix", rec_matrix);
            RecurrenceConfig rc;
            if (!rec_config.empty()) rc = load_config(rec_config).recurrence;
            if (rec_max_dim != 0) rc.max_dim = rec_max_dim;
            if (!rec_metric.empty()) rc.metric = metric_from_string(rec_metric);
            const FeatureMatrix m = read_matrix_csv(rec_matrix);
            fs::create_directories(rec_out);
            recplot_step(m, rc.metric, rc.max_dim, rec_out, rec_name);
            const std::size_t side = std::min<std::size_t>(m.n_windows(), rc.max_dim);
            out << "wrote " << side << "x" << side << " grid to " << (fs::path(rec_out) / rec_name).string()
                << ".{csv,pgm}\n";
        } else if (ev->parsed()) {
            require_file("trace", ev_trace);
            require_file("cluster bundle", ev_cluster);
            const WindowSeries series = read_series(ev_trace);
            ClusterOutputs c;
            parse_cluster_json(read_text_file(ev_cluster), c.clustering, c.simpoints);
            if (c.clustering.assignments.size() != series.size()) {
                throw ValidationError("cluster bundle covers " + std::to_string(c.clustering.assignments.size()) +
                                      " windows, trace has " + std::to_string(series.size()));
            }
            fs::create_directories(ev_out);
            const EvalOutputs e = eval_step(series, c, ev_out);
            out << "accuracy=" << format_real(e.report.accuracy);
            if (e.ari) out << " phase_alignment_ari=" << format_real(*e.ari);
            out << "\n";
        } else if (all->parsed()) {
            const RunConfig cfg = load_config(all_config);
            if (!cfg.workload) throw ValidationError("config: missing \"workload\" section");
            const PipelineConfig& pc = need_pipeline(cfg);
            const ClusterConfig& cc = need_cluster(cfg);
            if (all_out.empty()) {
                if (!cfg.output_dir) throw ValidationError("no output directory: pass --out or set output_dir");
                all_out = *cfg.output_dir;
            }
            const fs::path root = all_out;
            fs::create_directories(root);

            const WindowSeries series = generate(*cfg.workload, cfg.oracle);
            write_series(series, root / "trace.jsonl");

            nlohmann::ordered_json summary;
            summary["windows"] = series.size();
            summary["mem_fraction"] = mem_fraction(series);
            std::vector<std::pair<std::string, EvalOutputs>> rows;
            for (const PipelineMode mode : {PipelineMode::bbv, PipelineMode::combined}) {
                const fs::path dir = root / to_string(mode);
                fs::create_directories(dir);
                const StageDumps none;
                const PipelineResult result =
                    pipeline_step(series, pc, mode, mode == PipelineMode::combined ? all_dumps : none, err);
                write_matrix_csv(result.output, dir / "matrix.csv");
                const std::size_t k = all_k.empty() ? cc.k : resolve_k(all_k, result.output, cc, out);
                const ClusterOutputs c = cluster_step(result.output, k, cc, dir, "mavpoint");
                recplot_step(result.output, cfg.recurrence.metric, cfg.recurrence.max_dim, dir, "grid");
                EvalOutputs e = eval_step(series, c, dir);
                nlohmann::ordered_json row;
                row["k"] = k;
                row["accuracy"] = e.report.accuracy;
                row["true_metric"] = e.report.true_metric;
                row["estimated_metric"] = e.report.estimated_metric;
                if (e.ari) row["phase_alignment_ari"] = *e.ari;
                summary[to_string(mode)] = row;
                rows.emplace_back(mode == PipelineMode::bbv ? "BBV only" : "BBV+MAV", std::move(e));
            }
            write_text_file(root / "summary.json", summary.dump(2) + "\n");

            out << "sampling technique   accuracy   |acc-1|   ARI\n";
            for (const auto& [label, e] : rows) {
                char line[128];
                std::snprintf(line, sizeof line, "%-19s  %8s  %8s  %6s\n", label.c_str(),
                              fixed(e.report.accuracy, 4).c_str(), fixed(std::abs(e.report.accuracy - 1.0), 4).c_str(),
                              e.ari ? fixed(*e.ari, 3).c_str() : "-");
                out << line;
            }
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}

}  // namespace mavpoint
