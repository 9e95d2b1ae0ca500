#ifndef WKCC_KMEANS_HPP
#define WKCC_KMEANS_HPP

// Lloyd's algorithm with k-means++ seeding. The squared distance is a
// template parameter; the centre update is always the coordinate mean, which
// is also the Wasserstein barycenter when rows are quantile vectors.

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "wkcc/error.hpp"
#include "wkcc/random.hpp"

namespace wkcc {

struct KMeansOptions {
    int restarts = 10;
    int max_iter = 100;
    std::uint64_t seed = 0;
};

struct KMeansResult {
    std::vector<int> labels;
    Eigen::MatrixXd centers;  ///< K x d
    double wcss = 0.0;
    int iterations = 0;
};

struct SquaredEuclidean {
    template <class A, class B>
    double operator()(const A& a, const B& b) const
    {
        return (a - b).squaredNorm();
    }
};

namespace detail {

template <class Dist>
std::vector<double> nearest_center(const Eigen::MatrixXd& X, const Eigen::MatrixXd& centers, Eigen::Index used,
                                   const Dist& dist2, std::vector<int>* labels)
{
    const Eigen::Index n = X.rows();
    std::vector<double> best(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < used; ++c) {
            const double d = dist2(X.row(i), centers.row(c));
            if (d < best[static_cast<std::size_t>(i)]) {
                best[static_cast<std::size_t>(i)] = d;
                if (labels)
                    (*labels)[static_cast<std::size_t>(i)] = static_cast<int>(c);
            }
        }
    }
    return best;
}

template <class Dist>
Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& X, int K, Rng& rng, const Dist& dist2)
{
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd centers(K, X.cols());
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centers.row(0) = X.row(pick(rng));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int c = 1; c < K; ++c) {
        const std::vector<double> d = nearest_center(X, centers, c, dist2, nullptr);
        double total = 0.0;
        for (double v : d)
            total += v;
        Eigen::Index chosen = 0;
        if (total > 0.0) {
            double r = unif(rng) * total;
            chosen = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                r -= d[static_cast<std::size_t>(i)];
                if (r < 0.0 && d[static_cast<std::size_t>(i)] > 0.0) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = pick(rng);
        }
        centers.row(c) = X.row(chosen);
    }
    return centers;
}

}  // namespace detail

/// Best of opts.restarts seeded Lloyd runs (lowest WCSS, earliest restart on
/// ties). Rows of X are the points.
template <class Dist = SquaredEuclidean>
KMeansResult kmeans(const Eigen::MatrixXd& X, int K, const KMeansOptions& opts = {}, const Dist& dist2 = {})
{
    const Eigen::Index n = X.rows();
    if (K < 1)
        fail(ErrorCode::InvalidArgument, "k-means needs K >= 1");
    if (n < K)
        fail(ErrorCode::TooFewPoints, "k-means needs at least K points (n=" + std::to_string(n) +
                                          ", K=" + std::to_string(K) + ")");
    KMeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    const int restarts = std::max(opts.restarts, 1);
    for (int r = 0; r < restarts; ++r) {
        Rng rng = make_rng({opts.seed, static_cast<std::uint64_t>(r), 0x6b6d65616e73ULL});
        Eigen::MatrixXd centers = detail::kmeanspp_seed(X, K, rng, dist2);
        std::vector<int> labels(static_cast<std::size_t>(n), 0);
        std::vector<double> d;
        int it = 0;
        for (; it < opts.max_iter; ++it) {
            std::vector<int> next(static_cast<std::size_t>(n), 0);
            d = detail::nearest_center(X, centers, K, dist2, &next);
            const bool changed = it == 0 || next != labels;
            labels = std::move(next);
            if (!changed)
                break;
            Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(K, X.cols());
            std::vector<int> counts(static_cast<std::size_t>(K), 0);
            for (Eigen::Index i = 0; i < n; ++i) {
                sums.row(labels[static_cast<std::size_t>(i)]) += X.row(i);
                ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
            }
            for (int c = 0; c < K; ++c) {
                if (counts[static_cast<std::size_t>(c)] > 0) {
                    centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
                } else {
                    // Empty cluster: restart it at the worst-served point.
                    Eigen::Index far = 0;
                    for (Eigen::Index i = 1; i < n; ++i)
                        if (d[static_cast<std::size_t>(i)] > d[static_cast<std::size_t>(far)])
                            far = i;
                    centers.row(c) = X.row(far);
                    d[static_cast<std::size_t>(far)] = 0.0;
                }
            }
        }
        d = detail::nearest_center(X, centers, K, dist2, &labels);
        double wcss = 0.0;
        for (double v : d)
            wcss += v;
        if (wcss < best.wcss) {
            best.wcss = wcss;
            best.labels = labels;
            best.centers = centers;
            best.iterations = it;
        }
    }
    return best;
}

}  // namespace wkcc

#endif  // WKCC_KMEANS_HPP
