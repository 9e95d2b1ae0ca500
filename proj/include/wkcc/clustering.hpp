#ifndef WKCC_CLUSTERING_HPP
#define WKCC_CLUSTERING_HPP

// k-centres distributional clustering of one-dimensional distributions and
// the Wasserstein k-means baselines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wkcc/convex_pca.hpp"
#include "wkcc/geometry.hpp"
#include "wkcc/kcentres.hpp"
#include "wkcc/kmeans.hpp"

namespace wkcc {

enum class ReferenceChoice { FrechetMean, Uniform };

struct KcdcConfig {
    std::size_t K = 2;
    double tau = 0.9;
    int max_outer_iters = 20;
    bool loo = true;
    /// 0 selects max(3, M + 2).
    std::size_t min_cluster_size = 0;
    std::uint64_t seed = 0;
    KMeansOptions kmeans{};
    ConvexPcaOptions pca{};
    ReferenceChoice reference = ReferenceChoice::FrechetMean;
    /// Skip the explained-variation rule and use this dimension.
    std::optional<std::size_t> fixed_dimension;
};

/// Labels (0-based) with one principal geodesic per cluster, fitted on the
/// cluster's members.
struct ClusterState {
    std::vector<int> labels;
    std::vector<PrincipalGeodesic> models;
    int iteration = 0;
    double objective = 0.0;
};

struct KcdcResult {
    ClusterState state;
    std::size_t M = 0;
    /// Explained-variation curve of the pooled fit used to pick M.
    std::vector<double> selection_ev;
    /// k-means labels on the pooled scores (the CPCA clustering).
    std::vector<int> kmeans_labels;
    /// Starting labels of the reclassification, after small-cluster repair.
    std::vector<int> initial_labels;
    KCentresTrace trace;
};

struct DimensionSelection {
    std::size_t M = 0;
    std::vector<double> ev;
};

/// Reference measure for the pipelines. Every grid quantity used here is the
/// same at any reference, so this only fixes the coordinates.
inline ReferenceMeasure choose_reference(std::span<const GridDistribution> ds, ReferenceChoice choice)
{
    if (ds.empty())
        fail(ErrorCode::EmptyInput, "no distributions");
    if (choice == ReferenceChoice::Uniform)
        return ReferenceMeasure::uniform(ds.front().grid());
    return ReferenceMeasure(frechet_mean(ds), TieBreak::Jitter);
}

/// Smallest M with EV(M) >= tau, at most n - 2.
inline DimensionSelection select_dimension(const ReferenceMeasure& ref, std::span<const GridDistribution> ds,
                                           double tau, const ConvexPcaOptions& opts = {})
{
    if (ds.size() < 3)
        fail(ErrorCode::TooFewPoints, "dimension selection needs at least 3 distributions");
    if (!(tau > 0.0 && tau < 1.0))
        fail(ErrorCode::InvalidArgument, "tau must lie in (0, 1)");
    const std::vector<TangentVector> logs = log_map_all(ref, ds);
    const auto prep = ConvexPcaBuilder::prepare(ref, logs);
    const std::size_t cap = std::min<std::size_t>(ds.size() - 2, ref.size());
    ConvexPcaOptions o = opts;
    o.diagnostics = false;
    const ConvexPcaModel model = ConvexPcaBuilder::fit(prep, cap, o, tau);
    return {model.dimension(), model.explained_variation_curve()};
}

inline DimensionSelection select_dimension(const ReferenceMeasure& ref, const std::vector<GridDistribution>& ds,
                                           double tau, const ConvexPcaOptions& opts = {})
{
    return select_dimension(ref, std::span<const GridDistribution>(ds), tau, opts);
}

/// k-means on the M convex principal component scores of the pooled data.
inline std::vector<int> initial_clustering(const ReferenceMeasure& ref, std::span<const GridDistribution> ds,
                                           std::size_t K, std::size_t M, const KMeansOptions& km = {},
                                           const ConvexPcaOptions& opts = {}, Matrix* scores_out = nullptr)
{
    if (K < 1)
        fail(ErrorCode::InvalidArgument, "K must be at least 1");
    if (K == 1)
        return std::vector<int>(ds.size(), 0);
    const std::vector<TangentVector> logs = log_map_all(ref, ds);
    ConvexPcaOptions o = opts;
    o.diagnostics = true;
    const ConvexPcaModel model = fit_convex_pca(ref, logs, M, o);
    const Matrix& scores = model.training_scores();
    if (scores_out)
        *scores_out = scores;
    return kmeans(scores, static_cast<int>(K), km).labels;
}

inline std::vector<int> initial_clustering(const ReferenceMeasure& ref, const std::vector<GridDistribution>& ds,
                                           std::size_t K, std::size_t M, const KMeansOptions& km = {},
                                           const ConvexPcaOptions& opts = {})
{
    return initial_clustering(ref, std::span<const GridDistribution>(ds), K, M, km, opts);
}

namespace detail {

/// Cluster model in the quantile space: the member mean plus, when the
/// members carry enough variation, a nested convex principal component.
struct QuantileFit {
    Vector mean;
    std::optional<ConvexPcaModel> model;
};

class QuantileSpace {
public:
    QuantileSpace(const ReferenceMeasure& ref, std::span<const GridDistribution> ds, const ConvexPcaOptions& opts)
        : ref_(ref)
        , ds_(ds)
        , logs_(log_map_all(ref, ds))
        , opts_(opts)
    {
        opts_.diagnostics = false;
    }

    std::size_t size() const { return ds_.size(); }

    QuantileFit fit(const std::vector<std::size_t>& members, std::size_t M) const
    {
        return fit_with(members, M, opts_);
    }

    QuantileFit fit(const std::vector<std::size_t>& members, std::size_t M, const QuantileFit& hint) const
    {
        if (!hint.model)
            return fit(members, M);
        ConvexPcaOptions o = opts_;
        o.warm_start = hint.model->basis();
        return fit_with(members, M, o);
    }

    double distance(const QuantileFit& fit, std::size_t i) const
    {
        const GridDistribution& nu = ds_[i];
        if (!fit.model)
            return wasserstein_distance(nu, exp_map(ref_, TangentVector(ref_, fit.mean)));
        const auto projected = project_scores(*fit.model, logs_[i]).second;
        return wasserstein_distance(nu, exp_map(ref_, projected));
    }

    const ReferenceMeasure& ref() const { return ref_; }
    const std::vector<TangentVector>& logs() const { return logs_; }

private:
    QuantileFit fit_with(const std::vector<std::size_t>& members, std::size_t M, const ConvexPcaOptions& opts) const
    {
        if (members.empty())
            fail(ErrorCode::EmptyCluster, "cluster without members");
        std::vector<TangentVector> data;
        data.reserve(members.size());
        for (std::size_t i : members)
            data.push_back(logs_[i]);
        QuantileFit out;
        out.mean = Vector::Zero(static_cast<Eigen::Index>(ref_.size()));
        for (const TangentVector& t : data)
            out.mean += t.values();
        out.mean /= static_cast<double>(data.size());
        // Fewer members or less variation than M needs: lower the dimension.
        for (std::size_t dims = std::min(M, data.size() - 1); dims >= 1; --dims) {
            try {
                out.model.emplace(fit_convex_pca(ref_, data, dims, opts));
                break;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DegenerateData)
                    throw;
            }
        }
        return out;
    }

    ReferenceMeasure ref_;
    std::span<const GridDistribution> ds_;
    std::vector<TangentVector> logs_;
    ConvexPcaOptions opts_;
};

inline std::vector<PrincipalGeodesic> cluster_models(const ReferenceMeasure& ref,
                                                     std::span<const GridDistribution> ds,
                                                     const std::vector<int>& labels, std::size_t K, std::size_t M,
                                                     const ConvexPcaOptions& opts)
{
    const auto members = members_of(labels, K);
    std::vector<std::optional<PrincipalGeodesic>> fits(K);
    parallel_for(K, [&](std::size_t c) {
        std::vector<GridDistribution> sub;
        for (std::size_t i : members[c])
            sub.push_back(ds[i]);
        for (std::size_t dims = std::min(M, sub.size() - 1); dims >= 1; --dims) {
            try {
                fits[c].emplace(fit_principal_geodesic(ref, sub, dims, opts));
                return;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DegenerateData)
                    throw;
            }
        }
    });
    std::vector<PrincipalGeodesic> out;
    for (std::size_t c = 0; c < K; ++c) {
        if (!fits[c])
            fail(ErrorCode::DegenerateData, "cluster " + std::to_string(c + 1) + " has no variation to model");
        out.push_back(std::move(*fits[c]));
    }
    return out;
}

}  // namespace detail

/// One batch reclassification of `state.labels`.
inline std::vector<int> reclassify(const ReferenceMeasure& ref, std::span<const GridDistribution> ds,
                                   const std::vector<int>& labels, std::size_t K, std::size_t M,
                                   const KcdcConfig& cfg)
{
    if (K == 1)
        return labels;
    detail::QuantileSpace space(ref, ds, cfg.pca);
    const std::size_t floor = cfg.min_cluster_size ? cfg.min_cluster_size : default_min_cluster_size(M);
    return reclassify_step(space, labels, K, M, cfg.loo, floor);
}

/// Full pipeline: dimension selection, k-means on convex PCA scores, then
/// leave-one-out reclassification.
inline KcdcResult kcdc_cluster(std::span<const GridDistribution> ds, const KcdcConfig& cfg)
{
    if (cfg.K < 1)
        fail(ErrorCode::InvalidArgument, "K must be at least 1");
    if (!(cfg.tau > 0.0 && cfg.tau < 1.0))
        fail(ErrorCode::InvalidArgument, "tau must lie in (0, 1)");
    const ReferenceMeasure ref = choose_reference(ds, cfg.reference);

    KcdcResult result;
    if (cfg.fixed_dimension) {
        result.M = *cfg.fixed_dimension;
    } else {
        DimensionSelection sel = select_dimension(ref, ds, cfg.tau, cfg.pca);
        result.M = sel.M;
        result.selection_ev = std::move(sel.ev);
    }
    const std::size_t M = result.M;
    const std::size_t floor = cfg.min_cluster_size ? cfg.min_cluster_size : default_min_cluster_size(M);
    if (ds.size() < cfg.K * floor)
        fail(ErrorCode::TooFewPoints, "need at least K * " + std::to_string(floor) + " distributions");

    KMeansOptions km = cfg.kmeans;
    km.seed = cfg.seed;
    Matrix scores;
    std::vector<int> labels = initial_clustering(ref, ds, cfg.K, M, km, cfg.pca, &scores);
    result.kmeans_labels = labels;
    if (cfg.K > 1) {
        // k-means may leave a cluster too small for an M-dimensional model.
        std::vector<Vector> centre(cfg.K, Vector::Zero(scores.cols()));
        std::vector<double> count(cfg.K, 0.0);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            centre[static_cast<std::size_t>(labels[i])] += scores.row(static_cast<Eigen::Index>(i)).transpose();
            count[static_cast<std::size_t>(labels[i])] += 1.0;
        }
        for (std::size_t c = 0; c < cfg.K; ++c)
            if (count[c] > 0)
                centre[c] /= count[c];
        detail::repair_small_clusters(labels, cfg.K, floor, [&](std::size_t i, std::size_t c) {
            return (scores.row(static_cast<Eigen::Index>(i)).transpose() - centre[c]).squaredNorm();
        });
    }
    result.initial_labels = labels;

    detail::QuantileSpace space(ref, ds, cfg.pca);
    KCentresOptions ko;
    ko.max_outer_iters = cfg.max_outer_iters;
    ko.loo = cfg.loo;
    ko.min_cluster_size = floor;
    result.trace = kcentres_iterate(space, std::move(labels), cfg.K, M, ko);

    result.state.labels = result.trace.labels;
    result.state.iteration = static_cast<int>(result.trace.best_visit);
    result.state.objective = result.trace.objective;
    result.state.models = detail::cluster_models(ref, ds, result.state.labels, cfg.K, M, cfg.pca);
    return result;
}

inline KcdcResult kcdc_cluster(const std::vector<GridDistribution>& ds, const KcdcConfig& cfg)
{
    return kcdc_cluster(std::span<const GridDistribution>(ds), cfg);
}

/// Squared trimmed distance: levels u_k in [delta, 1 - delta] only,
/// rescaled by 1 / (1 - 2 delta).
inline double trimmed_wasserstein_distance_squared(const Vector& q1, const Vector& q2, double delta)
{
    const auto m = q1.size();
    Eigen::Index begin = 0;
    Eigen::Index end = m;
    if (delta > 0.0) {
        const double md = static_cast<double>(m);
        while (begin < m && (static_cast<double>(begin) + 0.5) / md < delta)
            ++begin;
        while (end > begin && (static_cast<double>(end - 1) + 0.5) / md > 1.0 - delta)
            --end;
        return detail::scaled_squared_difference(q1, q2, begin, end, md) / (1.0 - 2.0 * delta);
    }
    return detail::scaled_squared_difference(q1, q2, begin, end, static_cast<double>(m));
}

inline double trimmed_wasserstein_distance(const GridDistribution& d1, const GridDistribution& d2, double delta)
{
    detail::require_same_grid(d1.grid(), d2.grid());
    if (!(delta >= 0.0 && delta < 0.5))
        fail(ErrorCode::InvalidArgument, "trimming constant must lie in [0, 0.5)");
    return std::sqrt(trimmed_wasserstein_distance_squared(d1.quantiles(), d2.quantiles(), delta));
}

namespace detail {

inline Matrix quantile_matrix(std::span<const GridDistribution> ds)
{
    if (ds.empty())
        fail(ErrorCode::EmptyInput, "no distributions");
    const Grid& grid = ds.front().grid();
    Matrix X(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        require_same_grid(grid, ds[i].grid());
        X.row(static_cast<Eigen::Index>(i)) = ds[i].quantiles().transpose();
    }
    return X;
}

struct TrimmedDistance {
    double delta;
    template <class A, class B>
    double operator()(const A& a, const B& b) const
    {
        return trimmed_wasserstein_distance_squared(a.transpose(), b.transpose(), delta);
    }
};

}  // namespace detail

/// Lloyd iterations in the trimmed Wasserstein metric; centres are quantile
/// means. delta = 0 is plain Wasserstein k-means.
inline std::vector<int> trimmed_wasserstein_kmeans(std::span<const GridDistribution> ds, std::size_t K, double delta,
                                                   const KMeansOptions& opts = {})
{
    if (!(delta >= 0.0 && delta < 0.5))
        fail(ErrorCode::InvalidArgument, "trimming constant must lie in [0, 0.5)");
    const Matrix X = detail::quantile_matrix(ds);
    return kmeans(X, static_cast<int>(K), opts, detail::TrimmedDistance{delta}).labels;
}

inline std::vector<int> trimmed_wasserstein_kmeans(const std::vector<GridDistribution>& ds, std::size_t K,
                                                   double delta, const KMeansOptions& opts = {})
{
    return trimmed_wasserstein_kmeans(std::span<const GridDistribution>(ds), K, delta, opts);
}

inline std::vector<int> wasserstein_kmeans(std::span<const GridDistribution> ds, std::size_t K,
                                           const KMeansOptions& opts = {})
{
    return trimmed_wasserstein_kmeans(ds, K, 0.0, opts);
}

inline std::vector<int> wasserstein_kmeans(const std::vector<GridDistribution>& ds, std::size_t K,
                                           const KMeansOptions& opts = {})
{
    return wasserstein_kmeans(std::span<const GridDistribution>(ds), K, opts);
}

}  // namespace wkcc

#endif  // WKCC_CLUSTERING_HPP
