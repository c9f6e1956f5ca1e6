#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "herdsim/herdsim.hpp"
#include "herdsim/version.hpp"

namespace fs = std::filesystem;

namespace {

unsigned resolve_threads(unsigned cli_threads) {
    const char* env = std::getenv("HERDSIM_THREADS");
    if (env == nullptr || *env == '\0') return cli_threads;
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
        throw herdsim::ValidationError("HERDSIM_THREADS must be a positive integer");
    return static_cast<unsigned>(v);
}

// Inclusive start:stop:step grid.
std::vector<double> parse_p0_grid(const std::string& spec) {
    const auto parts = herdsim::detail::split(spec, ':');
    if (parts.size() != 3)
        throw herdsim::ValidationError("--p0 wants start:stop:step, got '" + spec + "'");
    const double start = herdsim::detail::parse_double(parts[0], 0);
    const double stop = herdsim::detail::parse_double(parts[1], 0);
    const double step = herdsim::detail::parse_double(parts[2], 0);
    if (!(step > 0.0)) throw herdsim::ValidationError("--p0 step must be positive");
    if (stop < start) throw herdsim::ValidationError("--p0 stop is before start");
    const auto count =
        static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid;
    grid.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        grid.push_back(start + static_cast<double>(i) * step);
    return grid;
}

void write_output(const fs::path& path, const std::string& content) {
    herdsim::write_text_file(path.string(), content);
}

herdsim::ConfigDocument load_config(const std::string& config_path,
                                    const std::optional<std::uint64_t>& seed) {
    auto doc = herdsim::parse_config_document(config_path);
    if (seed) doc.experiment.master_seed = *seed;
    return doc;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::optional<std::uint64_t>& seed, unsigned threads) {
    const auto doc = load_config(config_path, seed);
    const herdsim::ExperimentConfig& cfg = doc.experiment;
    const std::string started = herdsim::iso8601_utc(std::chrono::system_clock::now());
    fs::create_directories(out_dir);

    const auto result = herdsim::run_experiment(cfg, resolve_threads(threads));

    const fs::path out(out_dir);
    std::vector<std::string> outputs{"trials.csv", "summary.json"};
    write_output(out / "trials.csv", herdsim::trials_csv_string(result.trials));
    const std::string digest =
        herdsim::config_digest(herdsim::serialize_config(doc));
    write_output(out / "summary.json",
                 herdsim::summary_to_json(result.summary, cfg.trials, digest).dump(2) +
                     "\n");

    if (doc.record_trajectory) {
        const auto traj =
            herdsim::run_trajectory(cfg, 0, cfg.max_steps, cfg.sample_every);
        std::ostringstream buf;
        herdsim::write_trajectory_csv(buf, traj, 0);
        write_output(out / "trajectory.csv", buf.str());
        outputs.push_back("trajectory.csv");
    }

    outputs.push_back("manifest.json");
    const std::string finished = herdsim::iso8601_utc(std::chrono::system_clock::now());
    write_output(out / "manifest.json",
                 herdsim::manifest_json(doc, herdsim::kVersion, started, finished,
                                        outputs)
                         .dump(2) +
                     "\n");

    std::cout << "trials=" << cfg.trials << " herd1_freq=" << result.summary.herd1_freq
              << " ci=" << result.summary.ci_halfwidth
              << " unresolved=" << result.summary.unresolved_count
              << " failed=" << result.summary.failed_count << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const std::string& grid_spec, const std::optional<std::uint64_t>& seed,
              unsigned threads) {
    const auto doc = load_config(config_path, seed);
    const auto grid = parse_p0_grid(grid_spec);
    const std::string started = herdsim::iso8601_utc(std::chrono::system_clock::now());
    fs::create_directories(out_dir);

    const auto rows = herdsim::sweep_p0(doc.experiment, grid, resolve_threads(threads));

    const fs::path out(out_dir);
    std::ostringstream buf;
    herdsim::write_sweep_csv(buf, rows);
    write_output(out / "sweep.csv", buf.str());

    const std::string finished = herdsim::iso8601_utc(std::chrono::system_clock::now());
    write_output(out / "manifest.json",
                 herdsim::manifest_json(doc, herdsim::kVersion, started, finished,
                                        {"sweep.csv", "manifest.json"})
                         .dump(2) +
                     "\n");

    std::cout << "sweep points=" << rows.size() << "\n";
    return 0;
}

int cmd_diagnose(const std::string& config_path, const std::string& out_dir,
                 bool oracle) {
    const auto doc = load_config(config_path, std::nullopt);
    const herdsim::ExperimentConfig& cfg = doc.experiment;
    const std::string started = herdsim::iso8601_utc(std::chrono::system_clock::now());
    const auto ctx = herdsim::prepare(cfg);
    const std::size_t n = static_cast<std::size_t>(ctx.graph.size());
    fs::create_directories(out_dir);

    // State 0 is all zeros (drift and variance must vanish there); the rest
    // are dispersed iid-uniform states.
    std::vector<std::vector<double>> states{std::vector<double>(n, 0.0)};
    herdsim::Stream state_rng = herdsim::derive_stream(cfg.master_seed, 0xd1a6u);
    for (int s = 0; s < 15; ++s) {
        std::vector<double> x(n);
        for (auto& v : x) v = state_rng.uniform();
        states.push_back(std::move(x));
    }

    const std::size_t kDriftSamples = 4000;
    herdsim::Stream drift_rng = herdsim::derive_stream(cfg.master_seed, 0xd21f7u);
    std::ostringstream drift;
    drift << "state,q,mean_dq,se_dq,z\n";
    for (std::size_t s = 0; s < states.size(); ++s) {
        const auto& x = states[s];
        const double q = herdsim::weighted_average(ctx.pi, x);
        std::vector<double> dq(kDriftSamples);
        for (auto& d : dq) {
            const auto y =
                herdsim::advance_state(x, ctx.graph, cfg.dynamics, drift_rng, ctx.support);
            d = herdsim::weighted_average(ctx.pi, y) - q;
        }
        const double mean = herdsim::stats::mean(dq);
        const double se = herdsim::stats::standard_error(dq);
        const double z = se > 0.0 ? mean / se : 0.0;
        drift << s << ',' << herdsim::detail::format_g17(q) << ','
              << herdsim::detail::format_g17(mean) << ','
              << herdsim::detail::format_g17(se) << ','
              << herdsim::detail::format_g17(z) << '\n';
    }
    const fs::path out(out_dir);
    write_output(out / "drift.csv", drift.str());
    std::vector<std::string> outputs{"drift.csv"};

    const bool enumerable = n <= 12 && cfg.dynamics.rule == herdsim::Rule::Consensus;
    if (enumerable) {
        std::ostringstream var;
        var << "state,q,analytic_var,enumerated_var,abs_diff\n";
        for (std::size_t s = 0; s < states.size(); ++s) {
            const auto& x = states[s];
            const double analytic =
                herdsim::delta_q_conditional_variance(ctx.pi, x, cfg.dynamics);
            const auto dist = herdsim::enumerate_next_state(x, cfg.dynamics, ctx.graph);
            const double enumerated = dist.variance_q(ctx.pi);
            var << s << ',' << herdsim::detail::format_g17(herdsim::weighted_average(ctx.pi, x))
                << ',' << herdsim::detail::format_g17(analytic) << ','
                << herdsim::detail::format_g17(enumerated) << ','
                << herdsim::detail::format_g17(std::fabs(analytic - enumerated)) << '\n';
        }
        write_output(out / "variance.csv", var.str());
        outputs.push_back("variance.csv");
    }

    if (oracle) {
        herdsim::Stream oracle_rng = herdsim::derive_stream(cfg.master_seed, 0x02ac1eu);
        std::vector<double> x(n);
        for (auto& v : x) v = oracle_rng.uniform();
        const auto check =
            herdsim::one_step_oracle_check(x, ctx.graph, cfg.dynamics, 200000, oracle_rng);
        std::ostringstream orc;
        orc << "rule,scheme,statistic,dof,p_value,support,unknown\n";
        orc << herdsim::to_string(cfg.dynamics.rule) << ','
            << herdsim::to_string(cfg.dynamics.scheme) << ','
            << herdsim::detail::format_g17(check.chi.statistic) << ',' << check.chi.dof
            << ',' << herdsim::detail::format_g17(check.chi.p_value) << ','
            << check.support_size << ',' << check.unknown << '\n';
        write_output(out / "oracle.csv", orc.str());
        outputs.push_back("oracle.csv");
        std::cout << "oracle p_value=" << check.chi.p_value
                  << " support=" << check.support_size << " unknown=" << check.unknown
                  << "\n";
    }

    outputs.push_back("manifest.json");
    const std::string finished = herdsim::iso8601_utc(std::chrono::system_clock::now());
    write_output(out / "manifest.json",
                 herdsim::manifest_json(doc, herdsim::kVersion, started, finished,
                                        outputs)
                         .dump(2) +
                     "\n");
    std::cout << "diagnose states=" << states.size() << " outputs=" << outputs.size()
              << "\n";
    return 0;
}

int cmd_gen_graph(const std::string& model_spec, std::uint64_t seed,
                  const std::string& out_path) {
    const auto [n, model] = herdsim::parse_graph_model(model_spec);
    const auto g = herdsim::random_graph(n, model, seed);
    if (const fs::path parent = fs::path(out_path).parent_path(); !parent.empty())
        fs::create_directories(parent);
    herdsim::write_graph(g, out_path);
    std::cout << "wrote " << out_path << " (n=" << g.size()
              << ", edges=" << g.edge_count() << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"action-driven opinion dynamics simulator"};
    app.set_version_flag("--version", herdsim::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string grid_spec;
    std::string model_spec;
    std::string graph_out;
    std::uint64_t seed_value = 0;
    std::uint64_t gen_seed = 1;
    unsigned threads = 1;
    bool oracle = false;

    auto* run = app.add_subcommand("run", "run an experiment and write csv/json");
    run->add_option("-c,--config", config_path, "config file")->required();
    run->add_option("-o,--out", out_dir, "output directory")->required();
    auto* run_seed = run->add_option("--seed", seed_value, "override master seed");
    run->add_option("--threads", threads, "worker threads (HERDSIM_THREADS overrides)");

    auto* sweep = app.add_subcommand("sweep", "run one experiment per p0 grid point");
    sweep->add_option("-c,--config", config_path, "config file")->required();
    sweep->add_option("-o,--out", out_dir, "output directory")->required();
    sweep->add_option("--p0", grid_spec, "grid start:stop:step")->required();
    auto* sweep_seed = sweep->add_option("--seed", seed_value, "override master seed");
    sweep->add_option("--threads", threads, "worker threads (HERDSIM_THREADS overrides)");

    auto* diagnose =
        app.add_subcommand("diagnose", "martingale drift and variance tables");
    diagnose->add_option("-c,--config", config_path, "config file")->required();
    diagnose->add_option("-o,--out", out_dir, "output directory")->required();
    diagnose->add_flag("--oracle", oracle, "also run the one-step oracle check");

    auto* gen = app.add_subcommand("gen-graph", "generate a graph file");
    gen->add_option("--model", model_spec, "er:<n>:<p>, ring:<n>:<k>, complete:<n>")
        ->required();
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("-o,--out", graph_out, "output graph file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const std::optional<std::uint64_t> run_seed_opt =
            run_seed->count() > 0 ? std::optional<std::uint64_t>(seed_value)
                                  : std::nullopt;
        const std::optional<std::uint64_t> sweep_seed_opt =
            sweep_seed->count() > 0 ? std::optional<std::uint64_t>(seed_value)
                                    : std::nullopt;
        if (app.got_subcommand(run))
            return cmd_run(config_path, out_dir, run_seed_opt, threads);
        if (app.got_subcommand(sweep))
            return cmd_sweep(config_path, out_dir, grid_spec, sweep_seed_opt, threads);
        if (app.got_subcommand(diagnose)) return cmd_diagnose(config_path, out_dir, oracle);
        if (app.got_subcommand(gen)) return cmd_gen_graph(model_spec, gen_seed, graph_out);
        std::cerr << "no command\n";
        return 2;
    } catch (const herdsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const herdsim::RuntimeFailure& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
