#ifndef WKCC_KCENTRES_HPP
#define WKCC_KCENTRES_HPP

// Leave-one-out k-centres reclassification, generic over the data space.
//
// A Space provides
//   std::size_t size() const
//   Fit fit(const std::vector<std::size_t>& members, std::size_t M) const
//   double distance(const Fit&, std::size_t i) const
// where distance(fit, i) is the distance from datum i to its projection on
// the fitted M-dimensional model. An optional overload
//   Fit fit(members, M, const Fit& hint) const
// is used for leave-one-out fits, with the full-cluster fit as the hint.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "wkcc/error.hpp"
#include "wkcc/parallel.hpp"

namespace wkcc {

struct KCentresOptions {
    int max_outer_iters = 20;
    bool loo = true;
    /// Smallest allowed cluster; 0 means max(3, M + 2).
    std::size_t min_cluster_size = 0;
};

struct KCentresTrace {
    std::vector<int> labels;
    std::size_t min_cluster_size = 0;
    int iterations = 0;
    /// "converged", "cycle" or "max_iter".
    std::string reason;
    /// Objective of every visited labelling, in visiting order.
    std::vector<double> objective_history;
    double objective = 0.0;
    /// Index into objective_history of the returned labelling.
    std::size_t best_visit = 0;
    std::size_t rollbacks = 0;
};

inline std::size_t default_min_cluster_size(std::size_t M)
{
    return std::max<std::size_t>(3, M + 2);
}

namespace detail {

inline std::uint64_t hash_labels(const std::vector<int>& labels)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (int l : labels) {
        h ^= static_cast<std::uint64_t>(l) + 0x9e3779b97f4a7c15ULL;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::vector<std::vector<std::size_t>> members_of(const std::vector<int>& labels, std::size_t K)
{
    std::vector<std::vector<std::size_t>> out(K);
    for (std::size_t i = 0; i < labels.size(); ++i)
        out[static_cast<std::size_t>(labels[i])].push_back(i);
    return out;
}

/// n x K matrix of distances from each datum to each cluster's model; the
/// own-cluster model leaves the datum out when loo is set.
template <class Space>
std::vector<std::vector<double>> centre_distances(const Space& space, const std::vector<int>& labels,
                                                  std::size_t K, std::size_t M, bool loo)
{
    using Fit = decltype(space.fit(std::vector<std::size_t>{}, M));
    const std::size_t n = space.size();
    const auto members = members_of(labels, K);
    std::vector<std::optional<Fit>> full(K);
    parallel_for(K, [&](std::size_t c) { full[c].emplace(space.fit(members[c], M)); });

    std::vector<std::vector<double>> dist(n, std::vector<double>(K, 0.0));
    parallel_for(n, [&](std::size_t i) {
        const auto own = static_cast<std::size_t>(labels[i]);
        for (std::size_t c = 0; c < K; ++c) {
            if (c == own && loo) {
                std::vector<std::size_t> rest;
                rest.reserve(members[c].size());
                for (std::size_t j : members[c])
                    if (j != i)
                        rest.push_back(j);
                if constexpr (requires { space.fit(rest, M, *full[c]); })
                    dist[i][c] = space.distance(space.fit(rest, M, *full[c]), i);
                else
                    dist[i][c] = space.distance(space.fit(rest, M), i);
            } else {
                dist[i][c] = space.distance(*full[c], i);
            }
        }
    });
    return dist;
}

/// Moves points from clusters above the floor into clusters below it,
/// nearest first according to `cost(i, c)`.
template <class Cost>
void repair_small_clusters(std::vector<int>& labels, std::size_t K, std::size_t floor, const Cost& cost)
{
    std::vector<std::size_t> count(K, 0);
    for (int l : labels)
        ++count[static_cast<std::size_t>(l)];
    for (std::size_t c = 0; c < K; ++c) {
        while (count[c] < floor) {
            std::size_t pick = labels.size();
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < labels.size(); ++i) {
                const auto from = static_cast<std::size_t>(labels[i]);
                if (from == c || count[from] <= floor)
                    continue;
                const double v = cost(i, c);
                if (v < best) {
                    best = v;
                    pick = i;
                }
            }
            if (pick == labels.size())
                fail(ErrorCode::EmptyCluster, "cannot give every cluster the minimum size " + std::to_string(floor));
            --count[static_cast<std::size_t>(labels[pick])];
            labels[pick] = static_cast<int>(c);
            ++count[c];
        }
    }
}

}  // namespace detail

/// One batch reclassification step: every label is recomputed from the
/// current labelling. Moves that would leave a cluster below the floor are
/// undone, smallest improvement first. Returns the new labels; `objective`
/// receives sum_i d^2(i, own cluster) of the current labelling.
template <class Space>
std::vector<int> reclassify_step(const Space& space, const std::vector<int>& labels, std::size_t K, std::size_t M,
                                 bool loo, std::size_t floor, double* objective = nullptr,
                                 std::size_t* rollbacks = nullptr)
{
    const std::size_t n = labels.size();
    const auto dist = detail::centre_distances(space, labels, K, M, loo);
    if (objective) {
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = dist[i][static_cast<std::size_t>(labels[i])];
            obj += d * d;
        }
        *objective = obj;
    }
    std::vector<int> next(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < K; ++c)
            if (dist[i][c] < dist[i][best])
                best = c;
        next[i] = static_cast<int>(best);
    }

    std::vector<std::size_t> count(K, 0);
    for (int l : next)
        ++count[static_cast<std::size_t>(l)];
    for (;;) {
        std::size_t low = K;
        for (std::size_t c = 0; c < K; ++c)
            if (count[c] < floor) {
                low = c;
                break;
            }
        if (low == K)
            break;
        std::size_t pick = n;
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (static_cast<std::size_t>(labels[i]) != low || next[i] == labels[i])
                continue;
            const double m = dist[i][low] - dist[i][static_cast<std::size_t>(next[i])];
            if (m < margin) {
                margin = m;
                pick = i;
            }
        }
        if (pick == n)
            fail(ErrorCode::EmptyCluster, "cluster " + std::to_string(low + 1) + " fell below the minimum size");
        --count[static_cast<std::size_t>(next[pick])];
        next[pick] = labels[pick];
        ++count[low];
        if (rollbacks)
            ++*rollbacks;
    }
    return next;
}

/// Iterates reclassification until the labels are a fixed point, a labelling
/// repeats, or the iteration cap is hit; returns the visited labelling with
/// the smallest objective.
template <class Space>
KCentresTrace kcentres_iterate(const Space& space, std::vector<int> labels, std::size_t K, std::size_t M,
                               const KCentresOptions& opts)
{
    KCentresTrace trace;
    trace.min_cluster_size = opts.min_cluster_size ? opts.min_cluster_size : default_min_cluster_size(M);
    if (labels.size() != space.size())
        fail(ErrorCode::LengthMismatch, "label count does not match the data");
    std::vector<std::vector<int>> visited;
    std::unordered_set<std::uint64_t> seen;
    seen.insert(detail::hash_labels(labels));
    trace.reason = "max_iter";
    for (int it = 0;; ++it) {
        double obj = 0.0;
        std::vector<int> next = K == 1 ? labels
                                       : reclassify_step(space, labels, K, M, opts.loo, trace.min_cluster_size,
                                                         &obj, &trace.rollbacks);
        if (K == 1) {
            const auto dist = detail::centre_distances(space, labels, K, M, opts.loo);
            for (const auto& row : dist)
                obj += row[0] * row[0];
        }
        trace.objective_history.push_back(obj);
        visited.push_back(labels);
        if (next == labels) {
            trace.reason = "converged";
            break;
        }
        if (it >= opts.max_outer_iters)
            break;
        const std::uint64_t h = detail::hash_labels(next);
        if (seen.count(h) && std::find(visited.begin(), visited.end(), next) != visited.end()) {
            trace.reason = "cycle";
            break;
        }
        seen.insert(h);
        labels = std::move(next);
        trace.iterations = it + 1;
    }
    std::size_t best = 0;
    for (std::size_t v = 1; v < trace.objective_history.size(); ++v)
        if (trace.objective_history[v] < trace.objective_history[best])
            best = v;
    trace.best_visit = best;
    trace.labels = visited[best];
    trace.objective = trace.objective_history[best];
    return trace;
}

}  // namespace wkcc

#endif  // WKCC_KCENTRES_HPP
