#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "herdsim/errors.hpp"
#include "herdsim/graph.hpp"
#include "herdsim/rng.hpp"

namespace herdsim {

enum class Rule { Consensus, RandomInteractions, BoundedConfidence, Reinforcement };
enum class InteractionScheme { PairwiseGossip, EdgeSampling };
enum class PairSelection { WeightProportional, UniformNeighbors };

// Which rule runs and with what knobs. alpha holds one shared value or one
// value per agent.
struct DynamicsSpec {
    Rule rule = Rule::Consensus;
    std::vector<double> alpha{0.5};
    double tau = 0.25;                // BoundedConfidence
    InteractionScheme scheme = InteractionScheme::PairwiseGossip;
    double edge_keep_p = 0.5;         // EdgeSampling
    bool frozen_bystanders = true;    // PairwiseGossip: non-participants hold still
    PairSelection pair_selection = PairSelection::WeightProportional;

    void validate(int n) const {
        if (alpha.size() != 1 && alpha.size() != static_cast<std::size_t>(n))
            throw DimensionMismatchError("alpha must be scalar or one value per agent");
        for (double a : alpha)
            if (!(a > 0.0 && a <= 1.0))
                throw AlphaOutOfRangeError("alpha component " + std::to_string(a) +
                                           " outside (0, 1]");
        if (rule == Rule::BoundedConfidence && !(tau > 0.0 && tau < 1.0))
            throw ValidationError("tau " + std::to_string(tau) + " outside (0, 1)");
        if (rule == Rule::RandomInteractions && scheme == InteractionScheme::EdgeSampling &&
            !(edge_keep_p >= 0.0 && edge_keep_p <= 1.0))
            throw ValidationError("edge keep probability outside [0, 1]");
    }

    double alpha_at(int i) const {
        return alpha.size() == 1 ? alpha[0] : alpha[static_cast<std::size_t>(i)];
    }

    bool operator==(const DynamicsSpec&) const = default;
};

namespace detail {

inline double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

inline void check_state(std::span<const double> x, const WeightedGraph& g) {
    if (x.size() != static_cast<std::size_t>(g.size()))
        throw DimensionMismatchError("belief vector length != n");
}

// sum_k w_{nk} a_k in storage order; exact 1.0 when a is all ones.
inline double action_sum(const WeightedGraph& g, int i, std::span<const std::uint8_t> a) {
    double s = 0.0;
    for (const auto& e : g.row(i))
        s += e.weight * static_cast<double>(a[static_cast<std::size_t>(e.col)]);
    return s;
}

} // namespace detail

// One Bernoulli draw per agent, in agent order: P(a_n = 1) = x_n.
inline std::vector<std::uint8_t> sample_actions(std::span<const double> x, Stream& rng) {
    std::vector<std::uint8_t> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) a[i] = rng.bernoulli(x[i]) ? 1 : 0;
    return a;
}

// x'_n = (1 - alpha_n) x_n + alpha_n sum_k w_{nk} a_k, written in delta form
// x + alpha (s - x) so the boundary states stay bit-exact fixed points.
inline std::vector<double> step_consensus(std::span<const double> x,
                                          std::span<const std::uint8_t> a,
                                          const WeightedGraph& g,
                                          const DynamicsSpec& spec) {
    detail::check_state(x, g);
    if (a.size() != x.size()) throw DimensionMismatchError("action vector length != n");
    std::vector<double> out(x.size());
    for (int i = 0; i < g.size(); ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const double s = detail::action_sum(g, i, a);
        out[ii] = detail::clamp01(x[ii] + spec.alpha_at(i) * (s - x[ii]));
    }
    return out;
}

inline std::vector<double> step_consensus(std::span<const double> x,
                                          std::span<const std::uint8_t> a,
                                          const WeightedGraph& g, double alpha) {
    DynamicsSpec spec;
    spec.alpha = {alpha};
    return step_consensus(x, a, g, spec);
}

// Unordered support pairs {n, k}, n < k, excluding self-loops. Gossip picks
// uniformly from this list.
inline std::vector<std::pair<int, int>> undirected_support(const WeightedGraph& g) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < g.size(); ++i)
        for (const auto& e : g.row(i)) {
            if (e.col > i)
                pairs.emplace_back(i, e.col);
            else if (e.col < i && g.weight(e.col, i) == 0.0)
                pairs.emplace_back(e.col, i);
        }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

// The realized one-step interaction matrix. pair_n/pair_k name the gossip
// participants (-1 under edge sampling).
struct InteractionSample {
    WeightedGraph w;
    int pair_n = -1;
    int pair_k = -1;
};

// W(t) for a realized gossip pair: the pair averages, everyone else keeps an
// identity row.
inline InteractionSample make_gossip_matrix(int n, std::pair<int, int> pick) {
    std::vector<Edge> edges;
    for (int m = 0; m < n; ++m) {
        if (m == pick.first || m == pick.second) {
            edges.push_back({m, pick.first, 0.5});
            edges.push_back({m, pick.second, 0.5});
        } else {
            edges.push_back({m, m, 1.0});
        }
    }
    return {WeightedGraph::from_edges(n, edges), pick.first, pick.second};
}

// W(t) for a realized keep/drop flag per stored entry (row-major order):
// surviving rows renormalize, emptied rows become identity.
inline InteractionSample make_edge_subset_matrix(const WeightedGraph& g,
                                                 std::span<const std::uint8_t> keep) {
    std::vector<Edge> edges;
    std::size_t flat = 0;
    for (int i = 0; i < g.size(); ++i) {
        bool kept = false;
        for (const auto& e : g.row(i)) {
            if (keep[flat++]) {
                edges.push_back({i, e.col, e.weight});
                kept = true;
            }
        }
        if (!kept) edges.push_back({i, i, 1.0});
    }
    return {WeightedGraph::from_edges(g.size(), edges), -1, -1};
}

// Draw order: pairwise_gossip consumes one bounded-integer draw; edge
// sampling consumes one Bernoulli per stored entry in row-major order.
inline InteractionSample sample_interaction_matrix(
    const WeightedGraph& g, const DynamicsSpec& spec, Stream& rng,
    std::span<const std::pair<int, int>> support) {
    if (spec.scheme == InteractionScheme::PairwiseGossip) {
        if (support.empty()) throw NoEdgesError("gossip needs at least one undirected edge");
        const auto pick = support[static_cast<std::size_t>(
            rng.below(static_cast<std::uint64_t>(support.size())))];
        return make_gossip_matrix(g.size(), pick);
    }
    std::vector<std::uint8_t> keep(g.edge_count());
    for (std::size_t i = 0; i < keep.size(); ++i)
        keep[i] = rng.bernoulli(spec.edge_keep_p) ? 1 : 0;
    return make_edge_subset_matrix(g, keep);
}

inline InteractionSample sample_interaction_matrix(const WeightedGraph& g,
                                                   const DynamicsSpec& spec, Stream& rng) {
    const auto support = spec.scheme == InteractionScheme::PairwiseGossip
                             ? undirected_support(g)
                             : std::vector<std::pair<int, int>>{};
    return sample_interaction_matrix(g, spec, rng, support);
}

// E[W(t)] under the scheme. Gossip is a closed form over the support list;
// edge sampling enumerates each row's 2^deg keep subsets (rows are
// independent).
inline WeightedGraph mean_interaction_matrix(const WeightedGraph& g,
                                             const DynamicsSpec& spec) {
    const int n = g.size();
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    auto at = [&m, n](int i, int j) -> double& {
        return m[static_cast<std::size_t>(i) * n + j];
    };
    if (spec.scheme == InteractionScheme::PairwiseGossip) {
        const auto support = undirected_support(g);
        if (support.empty()) throw NoEdgesError("gossip needs at least one undirected edge");
        const double pe = 1.0 / static_cast<double>(support.size());
        for (int i = 0; i < n; ++i) at(i, i) = 1.0;
        for (auto [a, b] : support) {
            at(a, a) -= 0.5 * pe;
            at(a, b) += 0.5 * pe;
            at(b, b) -= 0.5 * pe;
            at(b, a) += 0.5 * pe;
        }
        return WeightedGraph::from_dense(n, m);
    }
    const double p = spec.edge_keep_p;
    for (int i = 0; i < n; ++i) {
        const auto row = g.row(i);
        const auto deg = row.size();
        if (deg > 20)
            throw TooLargeError("edge-sampling mean capped at 20 entries per row");
        for (std::uint64_t mask = 0; mask < (1ULL << deg); ++mask) {
            double pmask = 1.0;
            double sum = 0.0;
            for (std::size_t b = 0; b < deg; ++b) {
                if (mask & (1ULL << b)) {
                    pmask *= p;
                    sum += row[b].weight;
                } else {
                    pmask *= 1.0 - p;
                }
            }
            if (pmask == 0.0) continue;
            if (mask == 0) {
                at(i, i) += pmask;
            } else {
                for (std::size_t b = 0; b < deg; ++b)
                    if (mask & (1ULL << b)) at(i, row[b].col) += pmask * row[b].weight / sum;
            }
        }
    }
    return WeightedGraph::from_dense(n, m);
}

// x'_n = x_n + alpha_n (sum_k w_{nk}(t) a_k - x_n) with the realized W(t).
// Identity rows move an agent toward its own action.
inline std::vector<double> step_random_interactions(std::span<const double> x,
                                                    std::span<const std::uint8_t> a,
                                                    const WeightedGraph& w_t,
                                                    const DynamicsSpec& spec) {
    return step_consensus(x, a, w_t, spec);
}

// Full random-interactions step: lazy update with the realized W(t), then
// (gossip with frozen_bystanders) restore every non-participant, which is the
// participant-only update the scheme describes. Sampler and enumeration
// oracle both go through here.
inline std::vector<double> apply_interaction_step(std::span<const double> x,
                                                  std::span<const std::uint8_t> a,
                                                  const InteractionSample& sample,
                                                  const DynamicsSpec& spec) {
    auto out = step_random_interactions(x, a, sample.w, spec);
    if (spec.frozen_bystanders && sample.pair_n >= 0) {
        for (std::size_t m = 0; m < out.size(); ++m)
            if (static_cast<int>(m) != sample.pair_n && static_cast<int>(m) != sample.pair_k)
                out[m] = x[m];
    }
    return out;
}

// alpha z when |z| <= tau (inclusive), else 0.
inline double rho(double z, double alpha, double tau) {
    return std::fabs(z) <= tau ? alpha * z : 0.0;
}

// x'_n = x_n + rho(sum_k w_{nk} a_k - x_n)
inline std::vector<double> step_bounded_confidence(std::span<const double> x,
                                                   std::span<const std::uint8_t> a,
                                                   const WeightedGraph& g,
                                                   const DynamicsSpec& spec) {
    detail::check_state(x, g);
    if (a.size() != x.size()) throw DimensionMismatchError("action vector length != n");
    std::vector<double> out(x.size());
    for (int i = 0; i < g.size(); ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const double s = detail::action_sum(g, i, a);
        out[ii] = detail::clamp01(x[ii] + rho(s - x[ii], spec.alpha_at(i), spec.tau));
    }
    return out;
}

// Exact P(|sum_k w_{nk} a_k - x_n| > tau) by enumerating the 2^deg neighbor
// action combinations. Diagnostic; capped at 20 entries.
inline double bc_gate_probability(std::span<const double> x, const WeightedGraph& g,
                                  double tau, int n) {
    detail::check_state(x, g);
    if (n < 0 || n >= g.size()) throw IndexOutOfRangeError("agent index out of range");
    const auto row = g.row(n);
    const auto deg = row.size();
    if (deg > 20)
        throw NeighborhoodTooLargeError("gate probability capped at 20 neighbors, agent " +
                                        std::to_string(n) + " has " + std::to_string(deg));
    const double xn = x[static_cast<std::size_t>(n)];
    double p_open_exceeded = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << deg); ++mask) {
        double pmask = 1.0;
        double s = 0.0;
        for (std::size_t b = 0; b < deg; ++b) {
            const double xb = x[static_cast<std::size_t>(row[b].col)];
            if (mask & (1ULL << b)) {
                pmask *= xb;
                s += row[b].weight;
            } else {
                pmask *= 1.0 - xb;
            }
        }
        if (std::fabs(s - xn) > tau) p_open_exceeded += pmask;
    }
    return p_open_exceeded;
}

struct AgentPair {
    int n = 0;
    int k = 0;
};

// n uniform over agents, then k over row n: weight-proportional by default,
// optionally uniform over the row's entries. Draw order: one bounded-integer
// draw for n, one draw for k.
inline AgentPair sample_pair(const WeightedGraph& g, PairSelection sel, Stream& rng) {
    const int n = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.size())));
    const auto row = g.row(n);
    std::size_t idx = 0;
    if (sel == PairSelection::WeightProportional) {
        std::vector<double> w;
        w.reserve(row.size());
        for (const auto& e : row) w.push_back(e.weight);
        idx = rng.weighted_index(w, 1.0);
    } else {
        idx = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(row.size())));
    }
    return {n, row[idx].col};
}

inline AgentPair sample_pair(const WeightedGraph& g, Stream& rng) {
    return sample_pair(g, PairSelection::WeightProportional, rng);
}

// x'_n = x_n + alpha_n [a_n = a_k] (a_n - x_n); only component n moves.
inline std::vector<double> step_reinforcement(std::span<const double> x, AgentPair pair,
                                              std::uint8_t a_n, std::uint8_t a_k,
                                              const DynamicsSpec& spec) {
    std::vector<double> out(x.begin(), x.end());
    if (pair.n < 0 || static_cast<std::size_t>(pair.n) >= x.size() || pair.k < 0 ||
        static_cast<std::size_t>(pair.k) >= x.size())
        throw IndexOutOfRangeError("pair indices out of range");
    if (a_n == a_k) {
        const auto nn = static_cast<std::size_t>(pair.n);
        out[nn] = detail::clamp01(
            out[nn] + spec.alpha_at(pair.n) * (static_cast<double>(a_n) - out[nn]));
    }
    return out;
}

// One sampled transition of the configured rule. Draw order, which the
// enumeration oracle mirrors exactly:
//   Consensus / BoundedConfidence: N action draws in agent order.
//   RandomInteractions: interaction randomness first, then N action draws.
//   Reinforcement: n, then k, then a_n, a_k (one shared draw when k = n).
inline std::vector<double> advance_state(std::span<const double> x, const WeightedGraph& g,
                                         const DynamicsSpec& spec, Stream& rng,
                                         std::span<const std::pair<int, int>> support) {
    switch (spec.rule) {
        case Rule::Consensus: {
            const auto a = sample_actions(x, rng);
            return step_consensus(x, a, g, spec);
        }
        case Rule::RandomInteractions: {
            const auto sample = sample_interaction_matrix(g, spec, rng, support);
            const auto a = sample_actions(x, rng);
            return apply_interaction_step(x, a, sample, spec);
        }
        case Rule::BoundedConfidence: {
            const auto a = sample_actions(x, rng);
            return step_bounded_confidence(x, a, g, spec);
        }
        case Rule::Reinforcement: {
            const auto pair = sample_pair(g, spec.pair_selection, rng);
            const std::uint8_t a_n =
                rng.bernoulli(x[static_cast<std::size_t>(pair.n)]) ? 1 : 0;
            const std::uint8_t a_k =
                pair.k == pair.n
                    ? a_n
                    : (rng.bernoulli(x[static_cast<std::size_t>(pair.k)]) ? 1 : 0);
            return step_reinforcement(x, pair, a_n, a_k, spec);
        }
    }
    throw ValidationError("unknown rule");
}

inline std::vector<double> advance_state(std::span<const double> x, const WeightedGraph& g,
                                         const DynamicsSpec& spec, Stream& rng) {
    const auto support =
        spec.rule == Rule::RandomInteractions &&
                spec.scheme == InteractionScheme::PairwiseGossip
            ? undirected_support(g)
            : std::vector<std::pair<int, int>>{};
    return advance_state(x, g, spec, rng, support);
}

} // namespace herdsim
