#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "herdsim/errors.hpp"
#include "herdsim/rng.hpp"

namespace herdsim {

// One directed influence edge: agent `to`'s action enters agent `from`'s
// update with the given raw weight (rows are renormalized on construction).
struct Edge {
    int from = 0;
    int to = 0;
    double weight = 1.0;
};

enum class GraphKind { Directed, UndirectedUniform };

namespace detail {

// Left-fold sum in storage order. All row-stochastic checks and the action
// matvec must use this exact accumulation order so that "row sums to 1" is a
// bit-level statement, not an approximate one.
inline double fold_sum(std::span<const double> w) {
    double s = 0.0;
    for (double v : w) s += v;
    return s;
}

// Nudge the final entry so the storage-order fold of the row is exactly 1.0.
// Rounded decimal inputs land within a few ulps after renormalization; the
// boundary states x=0 and x=1 stay bit-exact fixed points only if an all-ones
// action sum reproduces 1.0 exactly. Rows whose fold is already 1.0 are left
// untouched, which keeps file round trips bitwise stable. Rows with extreme
// weight ratios may end within ~1e-13 of 1 instead of exactly on it.
inline void fix_row_sum_exact(std::span<double> w) {
    if (w.empty() || fold_sum(w) == 1.0) return;
    const std::size_t last = w.size() - 1;
    if (last == 0) {
        w[0] = 1.0;
        return;
    }
    for (int pass = 0; pass < 64; ++pass) {
        double prefix = 0.0;
        for (std::size_t i = 0; i < last; ++i) prefix += w[i];
        if (prefix >= 1.0) {
            // shave the largest leading entry one ulp to make room
            std::size_t j = 0;
            for (std::size_t i = 1; i < last; ++i)
                if (w[i] > w[j]) j = i;
            const double next = std::nextafter(w[j], 0.0);
            if (!(next > 0.0)) return;
            w[j] = next;
            continue;
        }
        // Exact for prefix in [0.5, 1) by Sterbenz; the nudge loop settles
        // the remaining rounding boundary cases.
        const double cand = 1.0 - prefix;
        if (!(cand > 0.0)) return;
        w[last] = cand;
        for (int step = 0; step < 4; ++step) {
            const double s = prefix + w[last];
            if (s == 1.0) return;
            const double next = std::nextafter(w[last], s < 1.0 ? 2.0 : 0.0);
            if (!(next > 0.0)) break;
            w[last] = next;
        }
        return;
    }
}

} // namespace detail

// Row-stochastic influence matrix over n agents, stored as sorted sparse
// rows. Immutable after construction; safe to share across threads.
class WeightedGraph {
public:
    struct Entry {
        int col;
        double weight;
    };

    // Directed weighted edges; duplicate (from, to) pairs accumulate.
    static WeightedGraph from_edges(int n, std::span<const Edge> edges) {
        check_size(n);
        std::vector<std::vector<Entry>> rows(static_cast<std::size_t>(n));
        for (const Edge& e : edges) {
            if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
                throw IndexOutOfRangeError("edge (" + std::to_string(e.from) + ", " +
                                           std::to_string(e.to) + ") outside [0, " +
                                           std::to_string(n) + ")");
            if (e.weight < 0.0 || !std::isfinite(e.weight))
                throw NegativeWeightError("edge (" + std::to_string(e.from) + ", " +
                                          std::to_string(e.to) + ") has weight " +
                                          std::to_string(e.weight));
            rows[static_cast<std::size_t>(e.from)].push_back({e.to, e.weight});
        }
        return WeightedGraph(n, GraphKind::Directed, std::move(rows));
    }

    // Undirected edge list with uniform weights w_{ij} = 1/deg(i).
    static WeightedGraph undirected_uniform(int n,
                                            std::span<const std::pair<int, int>> pairs) {
        check_size(n);
        std::vector<std::vector<int>> nbr(static_cast<std::size_t>(n));
        for (auto [a, b] : pairs) {
            if (a < 0 || a >= n || b < 0 || b >= n)
                throw IndexOutOfRangeError("pair (" + std::to_string(a) + ", " +
                                           std::to_string(b) + ") outside [0, " +
                                           std::to_string(n) + ")");
            nbr[static_cast<std::size_t>(a)].push_back(b);
            if (b != a) nbr[static_cast<std::size_t>(b)].push_back(a);
        }
        std::vector<std::vector<Entry>> rows(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            auto& ns = nbr[static_cast<std::size_t>(i)];
            std::sort(ns.begin(), ns.end());
            ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
            if (ns.empty()) continue; // reported as EmptyRow below
            const double w = 1.0 / static_cast<double>(ns.size());
            for (int j : ns) rows[static_cast<std::size_t>(i)].push_back({j, w});
        }
        return WeightedGraph(n, GraphKind::UndirectedUniform, std::move(rows));
    }

    // Row-major dense matrix; zero entries are dropped.
    static WeightedGraph from_dense(int n, std::span<const double> w) {
        check_size(n);
        if (w.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
            throw DimensionMismatchError("dense matrix size does not match n");
        std::vector<Edge> edges;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = w[static_cast<std::size_t>(i) * n + j];
                if (v != 0.0) edges.push_back({i, j, v});
            }
        return from_edges(n, edges);
    }

    int size() const { return n_; }
    GraphKind kind() const { return kind_; }

    std::span<const Entry> row(int i) const {
        const auto b = row_ptr_[static_cast<std::size_t>(i)];
        const auto e = row_ptr_[static_cast<std::size_t>(i) + 1];
        return {entries_.data() + b, entries_.data() + e};
    }

    std::size_t edge_count() const { return entries_.size(); }

    double weight(int i, int j) const {
        const auto r = row(i);
        auto it = std::lower_bound(r.begin(), r.end(), j,
                                   [](const Entry& a, int col) { return a.col < col; });
        return (it != r.end() && it->col == j) ? it->weight : 0.0;
    }

    // Largest |raw row sum - 1| seen before renormalization. The CLI warns
    // when this exceeds 1e-6.
    double max_normalization_deviation() const { return max_dev_; }

    // out_i = sum_k w_{ik} v_k, accumulated in storage order.
    void multiply(std::span<const double> v, std::span<double> out) const {
        if (v.size() != static_cast<std::size_t>(n_) || out.size() != v.size())
            throw DimensionMismatchError("multiply: vector length != n");
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (const Entry& e : row(i)) s += e.weight * v[static_cast<std::size_t>(e.col)];
            out[static_cast<std::size_t>(i)] = s;
        }
    }

    std::vector<double> multiply(std::span<const double> v) const {
        std::vector<double> out(v.size());
        multiply(v, out);
        return out;
    }

    // out_j = sum_i v_i w_{ij}  (left multiplication v^T W).
    void multiply_left(std::span<const double> v, std::span<double> out) const {
        if (v.size() != static_cast<std::size_t>(n_) || out.size() != v.size())
            throw DimensionMismatchError("multiply_left: vector length != n");
        std::fill(out.begin(), out.end(), 0.0);
        for (int i = 0; i < n_; ++i)
            for (const Entry& e : row(i))
                out[static_cast<std::size_t>(e.col)] += v[static_cast<std::size_t>(i)] * e.weight;
    }

    static constexpr int kDenseLimit = 4096;

    std::vector<double> to_dense() const {
        if (n_ > kDenseLimit)
            throw TooLargeError("dense materialization capped at n = " +
                                std::to_string(kDenseLimit));
        std::vector<double> w(static_cast<std::size_t>(n_) * n_, 0.0);
        for (int i = 0; i < n_; ++i)
            for (const Entry& e : row(i))
                w[static_cast<std::size_t>(i) * n_ + e.col] = e.weight;
        return w;
    }

    bool operator==(const WeightedGraph& other) const {
        return n_ == other.n_ && kind_ == other.kind_ && row_ptr_ == other.row_ptr_ &&
               entries_same(other);
    }

private:
    WeightedGraph(int n, GraphKind kind, std::vector<std::vector<Entry>> rows)
        : n_(n), kind_(kind) {
        row_ptr_.reserve(static_cast<std::size_t>(n) + 1);
        row_ptr_.push_back(0);
        std::vector<double> weights;
        for (int i = 0; i < n; ++i) {
            auto& r = rows[static_cast<std::size_t>(i)];
            std::sort(r.begin(), r.end(),
                      [](const Entry& a, const Entry& b) { return a.col < b.col; });
            // merge duplicates, drop zeros
            std::vector<Entry> merged;
            for (const Entry& e : r) {
                if (!merged.empty() && merged.back().col == e.col)
                    merged.back().weight += e.weight;
                else
                    merged.push_back(e);
            }
            merged.erase(std::remove_if(merged.begin(), merged.end(),
                                        [](const Entry& e) { return e.weight == 0.0; }),
                         merged.end());
            if (merged.empty())
                throw EmptyRowError("agent " + std::to_string(i) + " has no influences");
            weights.clear();
            for (const Entry& e : merged) weights.push_back(e.weight);
            const double s = detail::fold_sum(weights);
            max_dev_ = std::max(max_dev_, std::fabs(s - 1.0));
            for (double& w : weights) w /= s;
            detail::fix_row_sum_exact(weights);
            for (std::size_t k = 0; k < merged.size(); ++k) merged[k].weight = weights[k];
            entries_.insert(entries_.end(), merged.begin(), merged.end());
            row_ptr_.push_back(static_cast<int>(entries_.size()));
        }
    }

    static void check_size(int n) {
        if (n < 1) throw ValidationError("graph needs at least one agent");
    }

    bool entries_same(const WeightedGraph& other) const {
        if (entries_.size() != other.entries_.size()) return false;
        for (std::size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].col != other.entries_[i].col ||
                entries_[i].weight != other.entries_[i].weight)
                return false;
        return true;
    }

    int n_ = 0;
    GraphKind kind_ = GraphKind::Directed;
    std::vector<int> row_ptr_;
    std::vector<Entry> entries_;
    double max_dev_ = 0.0;
};

// Strong connectivity of the nonzero pattern: forward and backward
// reachability from node 0. Pure graph search, no numerics.
inline bool is_irreducible(const WeightedGraph& g) {
    const int n = g.size();
    std::vector<std::vector<int>> rev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (const auto& e : g.row(i)) rev[static_cast<std::size_t>(e.col)].push_back(i);

    auto reaches_all = [n](auto&& neighbors) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : neighbors(u)) {
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    ++count;
                    stack.push_back(v);
                }
            }
        }
        return count == n;
    };

    const bool fwd = reaches_all([&g](int u) {
        std::vector<int> out;
        for (const auto& e : g.row(u)) out.push_back(e.col);
        return out;
    });
    if (!fwd) return false;
    return reaches_all([&rev](int u) { return rev[static_cast<std::size_t>(u)]; });
}

// Left eigenvector of W at eigenvalue 1, strictly positive, summing to 1.
struct StationaryDistribution {
    std::vector<double> pi;

    int size() const { return static_cast<int>(pi.size()); }
};

namespace detail {

// Solve A x = b in place by LU with partial pivoting. A is n x n row-major.
inline bool lu_solve(std::vector<double>& a, std::vector<double>& b, int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    auto at = [&a, n](int i, int j) -> double& {
        return a[static_cast<std::size_t>(i) * n + j];
    };
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(at(r, col)) > std::fabs(at(piv, col))) piv = r;
        if (std::fabs(at(piv, col)) < 1e-300) return false;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(at(piv, j), at(col, j));
            std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(col)]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = at(r, col) / at(col, col);
            at(r, col) = 0.0;
            for (int j = col + 1; j < n; ++j) at(r, j) -= f * at(col, j);
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int j = r + 1; j < n; ++j) s -= at(r, j) * b[static_cast<std::size_t>(j)];
        b[static_cast<std::size_t>(r)] = s / at(r, r);
    }
    return true;
}

inline double left_residual_inf(const WeightedGraph& g, std::span<const double> v) {
    std::vector<double> vw(v.size());
    g.multiply_left(v, vw);
    double r = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) r = std::max(r, std::fabs(vw[i] - v[i]));
    return r;
}

} // namespace detail

// Power iteration on the transpose with damping 0.99 (handles periodic
// chains); direct linear solve as fallback for n <= 64.
inline StationaryDistribution stationary_distribution(const WeightedGraph& g,
                                                      double tol = 1e-12,
                                                      int max_iter = 50000) {
    if (!is_irreducible(g))
        throw NotIrreducibleError("stationary distribution requires an irreducible graph");
    const int n = g.size();
    const auto nn = static_cast<std::size_t>(n);

    std::vector<double> v(nn, 1.0 / static_cast<double>(n));
    std::vector<double> vw(nn);
    constexpr double kDamping = 0.99;
    for (int it = 0; it < max_iter; ++it) {
        g.multiply_left(v, vw);
        double sum = 0.0;
        for (std::size_t i = 0; i < nn; ++i) {
            v[i] = (1.0 - kDamping) * v[i] + kDamping * vw[i];
            sum += v[i];
        }
        for (std::size_t i = 0; i < nn; ++i) v[i] /= sum;
        if (it % 8 == 7 && detail::left_residual_inf(g, v) < tol) {
            return StationaryDistribution{std::move(v)};
        }
    }
    if (detail::left_residual_inf(g, v) < tol) return StationaryDistribution{std::move(v)};

    if (n <= 64) {
        // rows 0..n-2: (W^T - I) pi = 0; last row: sum pi = 1
        std::vector<double> a(nn * nn, 0.0);
        std::vector<double> b(nn, 0.0);
        const auto dense = g.to_dense();
        for (int i = 0; i < n - 1; ++i) {
            for (int j = 0; j < n; ++j)
                a[static_cast<std::size_t>(i) * n + j] = dense[static_cast<std::size_t>(j) * n + i];
            a[static_cast<std::size_t>(i) * n + i] -= 1.0;
        }
        for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(n - 1) * n + j] = 1.0;
        b[nn - 1] = 1.0;
        if (detail::lu_solve(a, b, n)) {
            double sum = 0.0;
            bool positive = true;
            for (double x : b) {
                positive = positive && x > 0.0;
                sum += x;
            }
            if (positive) {
                for (double& x : b) x /= sum;
                if (detail::left_residual_inf(g, b) < 1e-10)
                    return StationaryDistribution{std::move(b)};
            }
        }
    }
    throw NoConvergenceError("stationary distribution did not converge in " +
                             std::to_string(max_iter) + " iterations");
}

// W_alpha = (I - D_alpha) + D_alpha W with D_alpha diagonal; scalar alpha is
// the common case. Shares left and right principal eigenvectors with W.
class LazyMatrix {
public:
    LazyMatrix(WeightedGraph g, std::vector<double> alpha)
        : g_(std::move(g)), alpha_(std::move(alpha)) {
        if (alpha_.size() != 1 && alpha_.size() != static_cast<std::size_t>(g_.size()))
            throw DimensionMismatchError("alpha must be scalar or one value per agent");
        for (double a : alpha_)
            if (!(a >= 0.0 && a <= 1.0))
                throw AlphaOutOfRangeError("alpha component " + std::to_string(a) +
                                           " outside [0, 1]");
    }

    int size() const { return g_.size(); }
    const WeightedGraph& base() const { return g_; }

    double alpha_at(int i) const {
        return alpha_.size() == 1 ? alpha_[0] : alpha_[static_cast<std::size_t>(i)];
    }

    double entry(int i, int j) const {
        const double a = alpha_at(i);
        double v = a * g_.weight(i, j);
        if (i == j) v += 1.0 - a;
        return v;
    }

    // y = x + D_alpha (W x - x)
    std::vector<double> multiply(std::span<const double> x) const {
        auto wx = g_.multiply(x);
        for (int i = 0; i < g_.size(); ++i) {
            const auto ii = static_cast<std::size_t>(i);
            wx[ii] = x[ii] + alpha_at(i) * (wx[ii] - x[ii]);
        }
        return wx;
    }

    std::vector<double> to_dense() const {
        auto w = g_.to_dense();
        const int n = g_.size();
        for (int i = 0; i < n; ++i) {
            const double a = alpha_at(i);
            for (int j = 0; j < n; ++j) w[static_cast<std::size_t>(i) * n + j] *= a;
            w[static_cast<std::size_t>(i) * n + i] += 1.0 - a;
        }
        return w;
    }

private:
    WeightedGraph g_;
    std::vector<double> alpha_;
};

inline LazyMatrix lazy_matrix(const WeightedGraph& g, double alpha) {
    return LazyMatrix(g, std::vector<double>{alpha});
}

inline LazyMatrix lazy_matrix(const WeightedGraph& g, std::vector<double> alpha) {
    return LazyMatrix(g, std::move(alpha));
}

// W_alpha^t x0: the expected belief trajectory from x0 under the consensus
// rule. Approaches (pi^T x0) * ones as t grows on aperiodic graphs.
inline std::vector<double> expected_trajectory(const WeightedGraph& g,
                                               const std::vector<double>& alpha,
                                               std::span<const double> x0, int t) {
    if (t < 0) throw ValidationError("trajectory length must be nonnegative");
    LazyMatrix wa(g, alpha);
    std::vector<double> x(x0.begin(), x0.end());
    if (x.size() != static_cast<std::size_t>(g.size()))
        throw DimensionMismatchError("x0 length != n");
    for (int i = 0; i < t; ++i) x = wa.multiply(x);
    return x;
}

inline std::vector<double> expected_trajectory(const WeightedGraph& g, double alpha,
                                               std::span<const double> x0, int t) {
    return expected_trajectory(g, std::vector<double>{alpha}, x0, t);
}

// ---- random graphs ---------------------------------------------------------

struct GraphModel {
    enum class Type { ErdosRenyi, Ring, Complete };
    Type type = Type::Complete;
    double p = 0.0; // ErdosRenyi edge probability
    int k = 1;      // Ring: neighbors on each side

    static GraphModel erdos_renyi(double p) { return {Type::ErdosRenyi, p, 0}; }
    static GraphModel ring(int k) { return {Type::Ring, 0.0, k}; }
    static GraphModel complete() { return {Type::Complete, 0.0, 0}; }

    bool operator==(const GraphModel&) const = default;
};

namespace detail {

inline bool pairs_connected(int n, std::span<const std::pair<int, int>> pairs) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (auto [a, b] : pairs) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v : adj[static_cast<std::size_t>(u)])
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++count;
                stack.push_back(v);
            }
    }
    return count == n;
}

} // namespace detail

// Connected undirected graph with uniform weights 1/deg. Erdős–Rényi draws
// are retried until connected (bounded budget).
inline WeightedGraph random_graph(int n, const GraphModel& model, std::uint64_t seed) {
    if (n < 2) throw ValidationError("random graphs need n >= 2");
    std::vector<std::pair<int, int>> pairs;
    switch (model.type) {
        case GraphModel::Type::Complete:
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
            return WeightedGraph::undirected_uniform(n, pairs);
        case GraphModel::Type::Ring: {
            const int k = model.k;
            if (k < 1 || 2 * k > n - 1)
                throw ValidationError("ring(k) requires 1 <= k and 2k <= n-1");
            for (int i = 0; i < n; ++i)
                for (int d = 1; d <= k; ++d) pairs.emplace_back(i, (i + d) % n);
            return WeightedGraph::undirected_uniform(n, pairs);
        }
        case GraphModel::Type::ErdosRenyi: {
            if (!(model.p >= 0.0 && model.p <= 1.0))
                throw ValidationError("Erdős–Rényi p must be in [0, 1]");
            Stream rng = derive_stream(seed, 0x6772617068ULL);
            constexpr int kRetryBudget = 1000;
            for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
                pairs.clear();
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j)
                        if (rng.bernoulli(model.p)) pairs.emplace_back(i, j);
                if (!pairs.empty() && detail::pairs_connected(n, pairs))
                    return WeightedGraph::undirected_uniform(n, pairs);
            }
            throw ConnectivityFailureError(
                "no connected Erdős–Rényi sample after " + std::to_string(kRetryBudget) +
                " attempts (n=" + std::to_string(n) + ", p=" + std::to_string(model.p) + ")");
        }
    }
    throw ValidationError("unknown graph model");
}

// ---- graph file format -----------------------------------------------------
//
//   herdsim-graph v1 <n> <directed|undirected>
//   <from> <to> [weight]
//
// Directed files carry one line per stored entry with the weight printed to
// 17 significant digits; undirected files list each unique pair once and the
// loader rebuilds uniform weights 1/deg.

namespace detail {

inline std::string format_weight(double w) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    return buf;
}

} // namespace detail

inline void write_graph(const WeightedGraph& g, std::ostream& out) {
    const bool undirected = g.kind() == GraphKind::UndirectedUniform;
    out << "herdsim-graph v1 " << g.size() << ' ' << (undirected ? "undirected" : "directed")
        << '\n';
    for (int i = 0; i < g.size(); ++i)
        for (const auto& e : g.row(i)) {
            if (undirected) {
                if (i <= e.col) out << i << ' ' << e.col << '\n';
            } else {
                out << i << ' ' << e.col << ' ' << detail::format_weight(e.weight) << '\n';
            }
        }
}

inline void write_graph(const WeightedGraph& g, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot open " + path + " for writing");
    write_graph(g, f);
}

inline WeightedGraph read_graph(std::istream& in) {
    std::string line;
    int lineno = 0;
    auto fail = [&lineno](const std::string& what) -> ParseError {
        return ParseError("line " + std::to_string(lineno) + ": " + what);
    };
    // header
    do {
        if (!std::getline(in, line)) throw ParseError("empty graph file");
        ++lineno;
    } while (line.empty() || line[0] == '#');
    std::istringstream head(line);
    std::string magic, version, mode;
    int n = 0;
    if (!(head >> magic >> version >> n >> mode) || magic != "herdsim-graph" ||
        version != "v1" || (mode != "directed" && mode != "undirected"))
        throw fail("expected header 'herdsim-graph v1 <n> <directed|undirected>'");
    const bool undirected = mode == "undirected";

    std::vector<Edge> edges;
    std::vector<std::pair<int, int>> pairs;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int from = 0, to = 0;
        if (!(ls >> from >> to)) throw fail("expected '<from> <to> [weight]'");
        if (undirected) {
            double trailing;
            if (ls >> trailing) throw fail("undirected edges carry no weight");
            pairs.emplace_back(from, to);
        } else {
            double w = 0.0;
            if (!(ls >> w)) throw fail("directed edge is missing its weight");
            edges.push_back({from, to, w});
        }
    }
    return undirected ? WeightedGraph::undirected_uniform(n, pairs)
                      : WeightedGraph::from_edges(n, edges);
}

inline WeightedGraph read_graph(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open " + path);
    return read_graph(f);
}

} // namespace herdsim
