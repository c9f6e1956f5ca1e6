#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "herdsim/analysis.hpp"
#include "herdsim/dynamics.hpp"
#include "herdsim/errors.hpp"
#include "herdsim/graph.hpp"
#include "herdsim/rng.hpp"
#include "herdsim/stats.hpp"

namespace herdsim {

enum class InitMode { Constant, IidUniformMean, Explicit };

// Initial belief vector x(0). Constant sets every agent to p0; IidUniformMean
// draws each x_n(0) uniformly on [max(0, 2p0-1), min(1, 2p0)], the widest
// symmetric interval inside [0,1] with mean p0.
struct InitSpec {
    InitMode mode = InitMode::Constant;
    double p0 = 0.5;
    std::vector<double> values;

    static InitSpec constant(double p0) { return {InitMode::Constant, p0, {}}; }
    static InitSpec iid_uniform_mean(double p0) {
        return {InitMode::IidUniformMean, p0, {}};
    }
    static InitSpec explicit_state(std::vector<double> x) {
        return {InitMode::Explicit, 0.0, std::move(x)};
    }

    void validate(std::size_t n) const {
        if (mode == InitMode::Explicit) {
            if (values.size() != n)
                throw DimensionMismatchError("explicit init has " +
                                             std::to_string(values.size()) +
                                             " entries for " + std::to_string(n) +
                                             " agents");
            for (const double v : values)
                if (!(v >= 0.0 && v <= 1.0))
                    throw ValidationError("explicit init value outside [0,1]");
        } else if (!(p0 >= 0.0 && p0 <= 1.0)) {
            throw ValidationError("p0 must lie in [0,1]");
        }
    }

    bool operator==(const InitSpec&) const = default;
};

inline std::vector<double> initial_state(const InitSpec& init, std::size_t n,
                                         Stream& rng) {
    switch (init.mode) {
        case InitMode::Constant:
            return std::vector<double>(n, init.p0);
        case InitMode::IidUniformMean: {
            const double lo = std::max(0.0, 2.0 * init.p0 - 1.0);
            const double hi = std::min(1.0, 2.0 * init.p0);
            std::vector<double> x(n);
            for (auto& v : x) v = lo + rng.uniform() * (hi - lo);
            return x;
        }
        case InitMode::Explicit:
            return init.values;
    }
    throw ValidationError("unknown init mode");
}

enum class GraphSourceKind { File, Generated };

struct GraphSource {
    GraphSourceKind source_kind = GraphSourceKind::Generated;
    std::string path;
    std::size_t n = 2;
    GraphModel model = GraphModel::complete();
    std::uint64_t seed = 1;

    static GraphSource from_file(std::string p) {
        GraphSource s;
        s.source_kind = GraphSourceKind::File;
        s.path = std::move(p);
        return s;
    }
    static GraphSource generated(std::size_t n, GraphModel model, std::uint64_t seed) {
        GraphSource s;
        s.source_kind = GraphSourceKind::Generated;
        s.n = n;
        s.model = model;
        s.seed = seed;
        return s;
    }

    WeightedGraph load() const {
        if (source_kind == GraphSourceKind::File) return read_graph(path);
        return random_graph(n, model, seed);
    }

    bool operator==(const GraphSource&) const = default;
};

struct ExperimentConfig {
    GraphSource graph;
    DynamicsSpec dynamics;
    InitSpec init;
    std::uint64_t trials = 1;
    std::uint64_t max_steps = 1000000;
    double epsilon = 1e-6;
    std::uint64_t master_seed = 0;
    std::uint64_t sample_every = 100;

    void validate() const {
        if (trials < 1) throw ValidationError("trials must be >= 1");
        if (max_steps < 1) throw ValidationError("max_steps must be >= 1");
        if (sample_every < 1) throw ValidationError("sample_every must be >= 1");
        if (!(epsilon > 0.0 && epsilon < 0.5))
            throw ValidationError("epsilon must lie in (0, 0.5)");
    }

    bool operator==(const ExperimentConfig&) const = default;
};

// Immutable per-experiment state shared by every trial worker.
struct ExperimentContext {
    WeightedGraph graph;
    StationaryDistribution pi;
    std::vector<std::pair<int, int>> support;
};

inline ExperimentContext prepare(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentContext ctx{cfg.graph.load(), {}, {}};
    const std::size_t n = ctx.graph.size();
    cfg.dynamics.validate(n);
    cfg.init.validate(n);
    ctx.pi = stationary_distribution(ctx.graph);
    if (cfg.dynamics.rule == Rule::RandomInteractions &&
        cfg.dynamics.scheme == InteractionScheme::PairwiseGossip)
        ctx.support = undirected_support(ctx.graph);
    return ctx;
}

struct TrialOutcome {
    std::uint64_t trial_id = 0;
    std::uint64_t seed = 0;
    AbsorptionClass cls = AbsorptionClass::Unresolved;
    std::uint64_t steps_to_resolution = 0;
    double q0 = 0.0;
    double q_final = 0.0;
    std::vector<double> final_beliefs;
    std::vector<double> q_samples;
    bool failed = false;
    std::string error;
};

// One trial, a pure function of (cfg.master_seed, trial_id) given the shared
// context. The state is classified before the first step so boundary inits
// resolve at step 0; q is sampled at step 0 and then every sample_every steps.
inline TrialOutcome run_trial(const ExperimentConfig& cfg, const ExperimentContext& ctx,
                              std::uint64_t trial_id) {
    TrialOutcome out;
    out.trial_id = trial_id;
    Stream rng = derive_stream(cfg.master_seed, trial_id);
    out.seed = rng.key();

    std::vector<double> x = initial_state(cfg.init, ctx.graph.size(), rng);
    out.q0 = weighted_average(ctx.pi, x);
    out.q_samples.push_back(out.q0);

    // A herd state is a fixed point of every rule, so it may resolve at step
    // 0. A mixed boundary state is not stationary under the averaging rules
    // (from (1,0,0,1) one consensus step moves every agent), so polarization
    // is only declared once the dynamics have actually run.
    out.cls = classify(x, cfg.epsilon);
    if (out.cls == AbsorptionClass::Polarized) out.cls = AbsorptionClass::Unresolved;

    std::uint64_t t = 0;
    while (out.cls == AbsorptionClass::Unresolved && t < cfg.max_steps) {
        x = advance_state(x, ctx.graph, cfg.dynamics, rng, ctx.support);
        ++t;
        if (t % cfg.sample_every == 0)
            out.q_samples.push_back(weighted_average(ctx.pi, x));
        out.cls = classify(x, cfg.epsilon);
    }
    out.steps_to_resolution = t;
    out.q_final = weighted_average(ctx.pi, x);
    out.final_beliefs = std::move(x);
    return out;
}

inline TrialOutcome run_trial(const ExperimentConfig& cfg, std::uint64_t trial_id) {
    return run_trial(cfg, prepare(cfg), trial_id);
}

inline TrialOutcome run_trial_guarded(const ExperimentConfig& cfg,
                                      const ExperimentContext& ctx,
                                      std::uint64_t trial_id) {
    try {
        return run_trial(cfg, ctx, trial_id);
    } catch (const std::exception& e) {
        TrialOutcome out;
        out.trial_id = trial_id;
        out.seed = derive_stream(cfg.master_seed, trial_id).key();
        out.failed = true;
        out.error = e.what();
        return out;
    }
}

struct ExperimentSummary {
    double herd1_freq = 0.0;
    double ci_halfwidth = 0.0;
    double mean_final_belief = 0.0;
    double var_final_belief = 0.0;
    double mean_q0 = 0.0;
    std::uint64_t unresolved_count = 0;
    std::uint64_t failed_count = 0;
};

// Order-independent aggregation: trials are accumulated in trial_id order no
// matter how the input list is permuted, so shuffled lists summarize
// identically bit for bit. Failed trials are excluded from the moment
// statistics and counted as unresolved. var_final_belief is the population
// variance of q_final, which keeps it within [0, 0.25] for data in [0,1].
// A batch where every trial ran to the step cap still aggregates (the cutoff
// beliefs are real data); herd1_freq is then 0 with a zero-width interval and
// unresolved_count carries the caveat. Only an all-failed batch throws.
inline ExperimentSummary summarize(const std::vector<TrialOutcome>& trials) {
    std::vector<std::size_t> order(trials.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return trials[a].trial_id < trials[b].trial_id;
    });

    ExperimentSummary s;
    std::vector<AbsorptionClass> classes;
    classes.reserve(trials.size());
    double sum_q = 0.0;
    double sum_q2 = 0.0;
    double sum_q0 = 0.0;
    std::size_t used = 0;
    for (const std::size_t i : order) {
        const TrialOutcome& t = trials[i];
        if (t.failed) {
            ++s.failed_count;
            ++s.unresolved_count;
            continue;
        }
        classes.push_back(t.cls);
        if (t.cls == AbsorptionClass::Unresolved) ++s.unresolved_count;
        sum_q += t.q_final;
        sum_q2 += t.q_final * t.q_final;
        sum_q0 += t.q0;
        ++used;
    }
    if (used == 0) throw NoResolvedTrialsError("every trial failed");
    const double mean = sum_q / static_cast<double>(used);
    s.mean_final_belief = mean;
    s.var_final_belief =
        std::max(0.0, sum_q2 / static_cast<double>(used) - mean * mean);
    s.mean_q0 = sum_q0 / static_cast<double>(used);
    if (s.unresolved_count < trials.size()) {
        const HerdEstimate est = herd_probability_estimate(classes);
        s.herd1_freq = est.p_hat;
        s.ci_halfwidth = est.ci_halfwidth;
    }
    return s;
}

struct ExperimentResult {
    ExperimentSummary summary;
    std::vector<TrialOutcome> trials;
};

// Trials are dispatched to a worker pool via an atomic counter and collected
// into slots keyed by trial_id, so the result is byte-identical for any worker
// count. A trial that throws is marked failed without aborting the batch.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       unsigned threads = 1) {
    const ExperimentContext ctx = prepare(cfg);
    std::vector<TrialOutcome> trials(cfg.trials);

    unsigned workers = threads == 0 ? 1u : threads;
    if (cfg.trials < workers) workers = static_cast<unsigned>(cfg.trials);

    std::atomic<std::uint64_t> next{0};
    const auto work = [&] {
        for (;;) {
            const std::uint64_t id = next.fetch_add(1);
            if (id >= cfg.trials) return;
            trials[id] = run_trial_guarded(cfg, ctx, id);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    ExperimentSummary summary = summarize(trials);
    return {std::move(summary), std::move(trials)};
}

struct SweepRow {
    double p0 = 0.0;
    double mean_final = 0.0;
    double var_final = 0.0;
    double herd1_freq = 0.0;
    double ci_halfwidth = 0.0;
    std::uint64_t unresolved = 0;
};

// One run_experiment per grid point, each on its own derived seed stream so
// grid points are statistically independent while the whole sweep stays a pure
// function of (config, master_seed).
inline std::vector<SweepRow> sweep_p0(const ExperimentConfig& base,
                                      std::span<const double> grid,
                                      unsigned threads = 1) {
    if (base.init.mode == InitMode::Explicit)
        throw ValidationError("sweep_p0 needs a p0-parameterized init mode");
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double p0 = grid[i];
        if (!(p0 >= 0.0 && p0 <= 1.0))
            throw ValidationError("sweep p0 value outside [0,1]");
        ExperimentConfig cfg = base;
        cfg.init.p0 = p0;
        cfg.master_seed = derive_stream(base.master_seed, 0x7377656570ULL + i).key();
        const ExperimentResult res = run_experiment(cfg, threads);
        rows.push_back({p0, res.summary.mean_final_belief, res.summary.var_final_belief,
                        res.summary.herd1_freq, res.summary.ci_halfwidth,
                        res.summary.unresolved_count});
    }
    return rows;
}

struct Trajectory {
    std::vector<double> q;
    std::vector<std::uint64_t> times;
    std::vector<std::vector<double>> states;
};

// Runs exactly `steps` steps with no absorption stop, recording q every step
// and the full state every record_every steps (always including step 0). Used
// for non-convergence diagnostics and trajectory export.
inline Trajectory run_trajectory(const ExperimentConfig& cfg, std::uint64_t trial_id,
                                 std::uint64_t steps,
                                 std::uint64_t record_every = 1) {
    if (record_every < 1) throw ValidationError("record_every must be >= 1");
    const ExperimentContext ctx = prepare(cfg);
    Stream rng = derive_stream(cfg.master_seed, trial_id);
    std::vector<double> x = initial_state(cfg.init, ctx.graph.size(), rng);

    Trajectory traj;
    traj.q.reserve(static_cast<std::size_t>(steps) + 1);
    traj.q.push_back(weighted_average(ctx.pi, x));
    traj.times.push_back(0);
    traj.states.push_back(x);
    for (std::uint64_t t = 1; t <= steps; ++t) {
        x = advance_state(x, ctx.graph, cfg.dynamics, rng, ctx.support);
        traj.q.push_back(weighted_average(ctx.pi, x));
        if (t % record_every == 0) {
            traj.times.push_back(t);
            traj.states.push_back(x);
        }
    }
    return traj;
}

} // namespace herdsim
