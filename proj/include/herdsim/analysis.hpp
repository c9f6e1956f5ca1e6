#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "herdsim/dynamics.hpp"
#include "herdsim/errors.hpp"
#include "herdsim/graph.hpp"
#include "herdsim/rng.hpp"
#include "herdsim/stats.hpp"

namespace herdsim {

enum class AbsorptionClass { Herd0, Herd1, Polarized, Unresolved };

inline const char* to_string(AbsorptionClass c) {
    switch (c) {
        case AbsorptionClass::Herd0: return "herd0";
        case AbsorptionClass::Herd1: return "herd1";
        case AbsorptionClass::Polarized: return "polarized";
        case AbsorptionClass::Unresolved: return "unresolved";
    }
    return "unresolved";
}

// Herd0: all below eps. Herd1: all above 1-eps. Polarized: every component
// within eps of a boundary with both boundaries populated.
inline AbsorptionClass classify(std::span<const double> x, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw ValidationError("epsilon must lie in (0, 0.5)");
    bool any_low = false, any_high = false, all_boundary = true;
    for (double v : x) {
        const bool low = v < epsilon;
        const bool high = v > 1.0 - epsilon;
        any_low = any_low || low;
        any_high = any_high || high;
        all_boundary = all_boundary && (low || high);
    }
    if (!all_boundary || x.empty()) return AbsorptionClass::Unresolved;
    if (!any_high) return AbsorptionClass::Herd0;
    if (!any_low) return AbsorptionClass::Herd1;
    return AbsorptionClass::Polarized;
}

// q = pi^T x, the stationary-weighted network belief.
inline double weighted_average(const StationaryDistribution& pi, std::span<const double> x) {
    if (pi.pi.size() != x.size())
        throw DimensionMismatchError("weighted_average: dimensions disagree");
    double q = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) q += pi.pi[i] * x[i];
    return q;
}

// Var(q(t+1) - q(t) | x(t)) under the consensus rule:
// sum_n alpha_n^2 pi_n^2 x_n (1 - x_n).
inline double delta_q_conditional_variance(const StationaryDistribution& pi,
                                           std::span<const double> x,
                                           const DynamicsSpec& spec) {
    if (pi.pi.size() != x.size())
        throw DimensionMismatchError("conditional variance: dimensions disagree");
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = spec.alpha_at(static_cast<int>(i));
        v += a * a * pi.pi[i] * pi.pi[i] * x[i] * (1.0 - x[i]);
    }
    return v;
}

inline double delta_q_conditional_variance(const StationaryDistribution& pi,
                                           std::span<const double> x, double alpha) {
    DynamicsSpec spec;
    spec.alpha = {alpha};
    return delta_q_conditional_variance(pi, x, spec);
}

// Exact finite distribution of x(t+1) given x(t): every action vector, and
// for the randomized rules every pair / interaction matrix in the scheme's
// support. States that collide numerically are merged.
struct NextStateDistribution {
    std::vector<std::pair<std::vector<double>, double>> outcomes;
    double total = 0.0;

    std::vector<double> mean() const {
        std::vector<double> m(outcomes.empty() ? 0 : outcomes.front().first.size(), 0.0);
        for (const auto& [state, p] : outcomes)
            for (std::size_t i = 0; i < state.size(); ++i) m[i] += p * state[i];
        return m;
    }

    double mean_q(const StationaryDistribution& pi) const {
        double q = 0.0;
        for (const auto& [state, p] : outcomes) q += p * weighted_average(pi, state);
        return q;
    }

    double variance_q(const StationaryDistribution& pi) const {
        const double m = mean_q(pi);
        double v = 0.0;
        for (const auto& [state, p] : outcomes) {
            const double d = weighted_average(pi, state) - m;
            v += p * d * d;
        }
        return v;
    }
};

namespace detail {

inline double action_vector_probability(std::span<const double> x, std::uint64_t mask) {
    double p = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        p *= (mask & (1ULL << i)) ? x[i] : 1.0 - x[i];
    return p;
}

inline std::vector<std::uint8_t> mask_to_actions(std::size_t n, std::uint64_t mask) {
    std::vector<std::uint8_t> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = (mask & (1ULL << i)) ? 1 : 0;
    return a;
}

} // namespace detail

inline NextStateDistribution enumerate_next_state(std::span<const double> x,
                                                  const DynamicsSpec& spec,
                                                  const WeightedGraph& g) {
    detail::check_state(x, g);
    const auto n = x.size();
    if (n > 12) throw TooLargeError("enumeration capped at 12 agents");
    std::map<std::vector<double>, double> acc;
    auto add = [&acc](std::vector<double> state, double p) {
        if (p > 0.0) acc[std::move(state)] += p;
    };

    switch (spec.rule) {
        case Rule::Consensus:
            for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
                const double p = detail::action_vector_probability(x, mask);
                if (p == 0.0) continue;
                add(step_consensus(x, detail::mask_to_actions(n, mask), g, spec), p);
            }
            break;
        case Rule::BoundedConfidence:
            for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
                const double p = detail::action_vector_probability(x, mask);
                if (p == 0.0) continue;
                add(step_bounded_confidence(x, detail::mask_to_actions(n, mask), g, spec), p);
            }
            break;
        case Rule::RandomInteractions: {
            std::vector<InteractionSample> samples;
            std::vector<double> sample_probs;
            if (spec.scheme == InteractionScheme::PairwiseGossip) {
                const auto support = undirected_support(g);
                if (support.empty())
                    throw NoEdgesError("gossip needs at least one undirected edge");
                const double pe = 1.0 / static_cast<double>(support.size());
                for (const auto& pick : support) {
                    samples.push_back(make_gossip_matrix(g.size(), pick));
                    sample_probs.push_back(pe);
                }
            } else {
                const auto nnz = g.edge_count();
                if (nnz > 16)
                    throw TooLargeError("edge-sampling enumeration capped at 16 edges");
                const double p = spec.edge_keep_p;
                std::vector<std::uint8_t> keep(nnz);
                for (std::uint64_t mask = 0; mask < (1ULL << nnz); ++mask) {
                    double pm = 1.0;
                    for (std::size_t b = 0; b < nnz; ++b) {
                        keep[b] = (mask & (1ULL << b)) ? 1 : 0;
                        pm *= keep[b] ? p : 1.0 - p;
                    }
                    if (pm == 0.0) continue;
                    samples.push_back(make_edge_subset_matrix(g, keep));
                    sample_probs.push_back(pm);
                }
            }
            for (std::size_t s = 0; s < samples.size(); ++s)
                for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
                    const double pa = detail::action_vector_probability(x, mask);
                    if (pa == 0.0) continue;
                    add(apply_interaction_step(x, detail::mask_to_actions(n, mask),
                                               samples[s], spec),
                        sample_probs[s] * pa);
                }
            break;
        }
        case Rule::Reinforcement: {
            const double pn = 1.0 / static_cast<double>(n);
            for (int agent = 0; agent < g.size(); ++agent) {
                const auto row = g.row(agent);
                for (const auto& e : row) {
                    const double pk =
                        spec.pair_selection == PairSelection::WeightProportional
                            ? e.weight
                            : 1.0 / static_cast<double>(row.size());
                    const AgentPair pair{agent, e.col};
                    const double xn = x[static_cast<std::size_t>(agent)];
                    if (e.col == agent) {
                        add(step_reinforcement(x, pair, 1, 1, spec), pn * pk * xn);
                        add(step_reinforcement(x, pair, 0, 0, spec), pn * pk * (1.0 - xn));
                        continue;
                    }
                    const double xk = x[static_cast<std::size_t>(e.col)];
                    for (int an = 0; an <= 1; ++an)
                        for (int ak = 0; ak <= 1; ++ak) {
                            const double p = pn * pk * (an ? xn : 1.0 - xn) *
                                             (ak ? xk : 1.0 - xk);
                            add(step_reinforcement(x, pair,
                                                   static_cast<std::uint8_t>(an),
                                                   static_cast<std::uint8_t>(ak), spec),
                                p);
                        }
                }
            }
            break;
        }
    }

    NextStateDistribution dist;
    for (auto& [state, p] : acc) {
        dist.total += p;
        dist.outcomes.emplace_back(state, p);
    }
    return dist;
}

// Herding estimate over trial outcomes: share of Herd1 among resolved trials
// with a Wilson 99% half-width; unresolved trials are reported, not counted.
struct HerdEstimate {
    double p_hat = 0.0;
    double ci_halfwidth = 0.0;
    std::size_t resolved = 0;
    std::size_t unresolved = 0;
};

inline HerdEstimate herd_probability_estimate(std::span<const AbsorptionClass> outcomes) {
    HerdEstimate est;
    std::size_t herd1 = 0;
    for (const auto c : outcomes) {
        if (c == AbsorptionClass::Unresolved) {
            ++est.unresolved;
            continue;
        }
        ++est.resolved;
        if (c == AbsorptionClass::Herd1) ++herd1;
    }
    if (est.resolved == 0) throw NoResolvedTrialsError("no resolved trials to estimate from");
    est.p_hat = static_cast<double>(herd1) / static_cast<double>(est.resolved);
    est.ci_halfwidth = stats::wilson_halfwidth(est.p_hat, est.resolved);
    return est;
}

// Per-agent envelope and the smallest trailing-window standard deviation.
// A min_rolling_std bounded away from zero certifies non-convergence; the
// envelope certifies confinement.
struct FluctuationStats {
    std::vector<double> min_x;
    std::vector<double> max_x;
    std::vector<double> min_rolling_std;
    std::size_t window = 0;
    std::size_t windows = 0;
};

inline FluctuationStats fluctuation_monitor(
    const std::vector<std::vector<double>>& trajectory, std::size_t window) {
    if (window < 2) throw ValidationError("window must cover at least two samples");
    if (trajectory.size() < window)
        throw TooShortError("trajectory has " + std::to_string(trajectory.size()) +
                            " samples, window needs " + std::to_string(window));
    const std::size_t n = trajectory.front().size();
    const std::size_t len = trajectory.size();
    FluctuationStats out;
    out.window = window;
    out.windows = len - window + 1;
    out.min_x.assign(n, 1.0);
    out.max_x.assign(n, 0.0);
    out.min_rolling_std.assign(n, std::numeric_limits<double>::infinity());

    std::vector<double> sum(len + 1), sumsq(len + 1);
    const double w = static_cast<double>(window);
    for (std::size_t agent = 0; agent < n; ++agent) {
        sum[0] = 0.0;
        sumsq[0] = 0.0;
        for (std::size_t t = 0; t < len; ++t) {
            const double v = trajectory[t][agent];
            if (trajectory[t].size() != n)
                throw DimensionMismatchError("ragged trajectory");
            out.min_x[agent] = std::min(out.min_x[agent], v);
            out.max_x[agent] = std::max(out.max_x[agent], v);
            sum[t + 1] = sum[t] + v;
            sumsq[t + 1] = sumsq[t] + v * v;
        }
        for (std::size_t end = window; end <= len; ++end) {
            const double s = sum[end] - sum[end - window];
            const double s2 = sumsq[end] - sumsq[end - window];
            const double var = std::max(0.0, (s2 - s * s / w) / (w - 1.0));
            out.min_rolling_std[agent] = std::min(out.min_rolling_std[agent], std::sqrt(var));
        }
    }
    return out;
}

// Drift, variance, and trajectory bundle emitted by the diagnostics command.
struct MartingaleDiagnostics {
    std::vector<double> q_trajectory;
    std::vector<double> drift_estimates;
    std::vector<double> conditional_variances;
};

// Sampled one-step distribution versus the enumeration oracle. unknown counts
// sampled states that the oracle says are impossible (must be zero).
struct OracleCheck {
    stats::ChiSquareResult chi;
    std::size_t unknown = 0;
    std::size_t support_size = 0;
};

inline OracleCheck one_step_oracle_check(std::span<const double> x, const WeightedGraph& g,
                                         const DynamicsSpec& spec, std::size_t samples,
                                         Stream& rng) {
    const auto dist = enumerate_next_state(x, spec, g);
    std::map<std::vector<double>, std::size_t> index;
    for (std::size_t i = 0; i < dist.outcomes.size(); ++i)
        index.emplace(dist.outcomes[i].first, i);

    const auto support = spec.rule == Rule::RandomInteractions &&
                                 spec.scheme == InteractionScheme::PairwiseGossip
                             ? undirected_support(g)
                             : std::vector<std::pair<int, int>>{};
    std::vector<double> observed(dist.outcomes.size(), 0.0);
    OracleCheck check;
    check.support_size = dist.outcomes.size();
    for (std::size_t s = 0; s < samples; ++s) {
        const auto next = advance_state(x, g, spec, rng, support);
        const auto it = index.find(next);
        if (it == index.end())
            ++check.unknown;
        else
            observed[it->second] += 1.0;
    }
    std::vector<double> expected(dist.outcomes.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
        expected[i] = dist.outcomes[i].second * static_cast<double>(samples);
    check.chi = stats::chi_square_gof(observed, expected);
    return check;
}

} // namespace herdsim
