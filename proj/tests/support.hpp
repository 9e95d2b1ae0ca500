#ifndef WKCC_TESTS_SUPPORT_HPP
#define WKCC_TESTS_SUPPORT_HPP

// Shared generators for the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "wkcc/wkcc.hpp"

namespace wkcc::testing {

/// Sorted uniform draws on [lo, hi]: a generic grid distribution.
inline GridDistribution random_distribution(const Grid& g, Rng& rng)
{
    std::uniform_real_distribution<double> u(g.lo(), g.hi());
    Vector q(static_cast<Eigen::Index>(g.size()));
    for (Eigen::Index k = 0; k < q.size(); ++k)
        q[k] = u(rng);
    std::sort(q.data(), q.data() + q.size());
    return make_distribution(g, std::move(q));
}

/// Quantiles of N(mu, sd^2) truncated to the grid domain.
inline GridDistribution normal_distribution_on(const Grid& g, double mu, double sd)
{
    Vector q(static_cast<Eigen::Index>(g.size()));
    for (std::size_t k = 0; k < g.size(); ++k)
        q[static_cast<Eigen::Index>(k)] = truncated_normal_quantile(g.level(k), mu, sd, g.lo(), g.hi());
    return make_distribution(g, std::move(q));
}

/// Data x_i = xbar + sum_j s_ij phi_j at the uniform reference on [0, 1],
/// with small scores so every datum (and every projection onto the span)
/// stays strictly inside the cone.
struct InteriorData {
    ReferenceMeasure ref;
    std::vector<TangentVector> logs;
    Matrix phi;  ///< orthonormal in the 1/m inner product
};

inline InteriorData interior_data(std::size_t m, std::size_t n, std::size_t J, Rng& rng,
                                  std::vector<double> sds = {})
{
    const Grid g(m, 0.0, 1.0);
    ReferenceMeasure ref = ReferenceMeasure::uniform(g);
    const auto M = static_cast<Eigen::Index>(m);
    // Smooth directions sqrt(2) sin(2 pi j u), orthonormal on the midpoint grid.
    Matrix phi(M, static_cast<Eigen::Index>(J));
    for (Eigen::Index k = 0; k < M; ++k)
        for (std::size_t j = 0; j < J; ++j)
            phi(k, static_cast<Eigen::Index>(j)) =
                std::sqrt(2.0) * std::sin(2.0 * std::numbers::pi * static_cast<double>(j + 1) * g.level(static_cast<std::size_t>(k)));
    if (sds.empty())
        for (std::size_t j = 0; j < J; ++j)
            sds.push_back(0.01 / static_cast<double>(j + 1));
    // Maximal slope of sum s_j phi_j stays below 1 (cone) for |s_j| < 4 sd.
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<TangentVector> logs;
    for (std::size_t i = 0; i < n; ++i) {
        Vector v = Vector::Zero(M);
        for (std::size_t j = 0; j < J; ++j) {
            const double s = std::clamp(z(rng), -4.0, 4.0) * sds[j];
            v += s * phi.col(static_cast<Eigen::Index>(j));
        }
        logs.emplace_back(ref, std::move(v));
    }
    return {ref, std::move(logs), std::move(phi)};
}

inline double brute_force_crate(const std::vector<int>& pred, const std::vector<int>& truth, int K)
{
    std::vector<int> perm(static_cast<std::size_t>(K));
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
        double hits = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i)
            hits += perm[static_cast<std::size_t>(pred[i])] == truth[i];
        best = std::max(best, hits / static_cast<double>(pred.size()));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Rand index from pair counts, then Hubert-Arabie adjustment via the
// permutation-model expectation.
inline double pair_counting_ari(const std::vector<int>& a, const std::vector<int>& b)
{
    const std::size_t n = a.size();
    double both = 0.0, in_a = 0.0, in_b = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool sa = a[i] == a[j];
            const bool sb = b[i] == b[j];
            both += sa && sb;
            in_a += sa;
            in_b += sb;
        }
    const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
    const double expected = in_a * in_b / pairs;
    const double mx = 0.5 * (in_a + in_b);
    if (mx == expected)
        return 1.0;
    return (both - expected) / (mx - expected);
}

}  // namespace wkcc::testing

#endif  // WKCC_TESTS_SUPPORT_HPP
