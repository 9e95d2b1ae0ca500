#ifndef WKCC_METRICS_HPP
#define WKCC_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "wkcc/error.hpp"
#include "wkcc/geometry.hpp"
#include "wkcc/parallel.hpp"

namespace wkcc {

/// Labels relabelled to 0..K-1 in order of first appearance.
class Partition {
public:
    Partition(std::span<const int> labels)
    {
        if (labels.empty())
            fail(ErrorCode::EmptyInput, "partition of no items");
        std::map<int, int> code;
        labels_.reserve(labels.size());
        for (int l : labels) {
            auto [it, inserted] = code.try_emplace(l, static_cast<int>(code.size()));
            labels_.push_back(it->second);
        }
        k_ = code.size();
    }
    Partition(const std::vector<int>& labels)
        : Partition(std::span<const int>(labels))
    {}

    const std::vector<int>& labels() const { return labels_; }
    std::size_t size() const { return labels_.size(); }
    std::size_t clusters() const { return k_; }
    int operator[](std::size_t i) const { return labels_[i]; }

private:
    std::vector<int> labels_;
    std::size_t k_ = 0;
};

inline Eigen::MatrixXd contingency_table(const Partition& a, const Partition& b)
{
    if (a.size() != b.size())
        fail(ErrorCode::LengthMismatch, "partitions differ in length");
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.clusters()),
                                              static_cast<Eigen::Index>(b.clusters()));
    for (std::size_t i = 0; i < a.size(); ++i)
        t(a[i], b[i]) += 1.0;
    return t;
}

/// Minimum-cost assignment for a square cost matrix (Hungarian method with
/// potentials, O(n^3)). Returns the column assigned to each row.
inline std::vector<int> hungarian(const Eigen::MatrixXd& cost)
{
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != n)
        fail(ErrorCode::InvalidArgument, "assignment cost matrix must be square");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j])
                    continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0)
            row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

/// Largest fraction of items labelled consistently under a one-to-one
/// matching of predicted and true clusters. Different cluster counts are
/// handled by padding the contingency table with zeros.
inline double correct_classification_rate(const Partition& pred, const Partition& truth)
{
    const Eigen::MatrixXd t = contingency_table(pred, truth);
    const Eigen::Index k = std::max(t.rows(), t.cols());
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(k, k);
    cost.topLeftCorner(t.rows(), t.cols()) = -t;
    const std::vector<int> match = hungarian(cost);
    double hits = 0.0;
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
        const int c = match[static_cast<std::size_t>(r)];
        if (c < t.cols())
            hits += t(r, c);
    }
    return hits / static_cast<double>(pred.size());
}

/// Hubert-Arabie adjusted Rand index. When the expected and maximal index
/// coincide (both partitions trivial in the same way) the value is 1.
inline double adjusted_rand_index(const Partition& pred, const Partition& truth)
{
    const Eigen::MatrixXd t = contingency_table(pred, truth);
    const double n = static_cast<double>(pred.size());
    if (pred.size() < 2)
        fail(ErrorCode::Undefined, "adjusted Rand index needs at least 2 items");
    auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
    double index = 0.0;
    for (Eigen::Index i = 0; i < t.rows(); ++i)
        for (Eigen::Index j = 0; j < t.cols(); ++j)
            index += c2(t(i, j));
    double sa = 0.0;
    double sb = 0.0;
    for (Eigen::Index i = 0; i < t.rows(); ++i)
        sa += c2(t.row(i).sum());
    for (Eigen::Index j = 0; j < t.cols(); ++j)
        sb += c2(t.col(j).sum());
    const double expected = sa * sb / c2(n);
    const double max_index = 0.5 * (sa + sb);
    const double denom = max_index - expected;
    if (denom == 0.0)
        return 1.0;
    return (index - expected) / denom;
}

/// Symmetric matrix of pairwise Wasserstein distances.
inline Eigen::MatrixXd distance_matrix(std::span<const GridDistribution> ds)
{
    const std::size_t n = ds.size();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j)
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = wasserstein_distance(ds[i], ds[j]);
    });
    d.triangularView<Eigen::StrictlyLower>() = d.transpose();
    return d;
}

/// Mean silhouette from a precomputed distance matrix. Singletons score 0,
/// and so do items with a_i = b_i = 0.
inline double silhouette(const Eigen::MatrixXd& dist, const Partition& labels)
{
    const std::size_t n = labels.size();
    if (static_cast<std::size_t>(dist.rows()) != n || dist.cols() != dist.rows())
        fail(ErrorCode::LengthMismatch, "distance matrix does not match the labels");
    const std::size_t K = labels.clusters();
    if (K < 2)
        fail(ErrorCode::SingleCluster, "silhouette is undefined for a single cluster");
    std::vector<double> size(K, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        size[static_cast<std::size_t>(labels[i])] += 1.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(labels[i]);
        if (size[own] < 2.0)
            continue;
        std::vector<double> sum(K, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                sum[static_cast<std::size_t>(labels[j])] += dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        const double a = sum[own] / (size[own] - 1.0);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < K; ++c)
            if (c != own)
                b = std::min(b, sum[c] / size[c]);
        const double denom = std::max(a, b);
        if (denom > 0.0)
            total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

inline double silhouette(std::span<const GridDistribution> ds, const Partition& labels)
{
    if (ds.size() != labels.size())
        fail(ErrorCode::LengthMismatch, "labels and distributions differ in length");
    if (labels.clusters() < 2)
        fail(ErrorCode::SingleCluster, "silhouette is undefined for a single cluster");
    return silhouette(distance_matrix(ds), labels);
}

inline double silhouette(const std::vector<GridDistribution>& ds, const Partition& labels)
{
    return silhouette(std::span<const GridDistribution>(ds), labels);
}

}  // namespace wkcc

#endif  // WKCC_METRICS_HPP
