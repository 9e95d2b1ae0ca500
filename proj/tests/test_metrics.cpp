#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "support.hpp"
#include "wkcc/wkcc.hpp"

using namespace wkcc;

using wkcc::testing::brute_force_crate;
using wkcc::testing::pair_counting_ari;

TEST(Metrics, CrateMatchesBruteForce)
{
    Rng rng = make_rng({41});
    for (int t = 0; t < 200; ++t) {
        const int K = 2 + t % 3;
        const std::size_t n = 4 + static_cast<std::size_t>(t % 9);
        std::uniform_int_distribution<int> lab(0, K - 1);
        std::vector<int> pred(n), truth(n);
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] = lab(rng);
            truth[i] = lab(rng);
        }
        pred[0] = K - 1;  // the label range is 0..K-1 in the oracle
        truth[0] = K - 1;
        EXPECT_NEAR(correct_classification_rate(Partition(pred), Partition(truth)),
                    brute_force_crate(Partition(pred).labels(), Partition(truth).labels(),
                                      static_cast<int>(std::max(Partition(pred).clusters(), Partition(truth).clusters()))),
                    1e-15);
    }
}

TEST(Metrics, CrateKnownValues)
{
    EXPECT_DOUBLE_EQ(correct_classification_rate(Partition({0, 0, 1, 1}), Partition({1, 1, 0, 0})), 1.0);
    EXPECT_DOUBLE_EQ(correct_classification_rate(Partition({0, 0, 0, 1}), Partition({0, 0, 1, 1})), 0.75);
    // Different cluster counts.
    EXPECT_DOUBLE_EQ(correct_classification_rate(Partition({0, 1, 2, 2}), Partition({0, 0, 1, 1})), 0.75);
}

TEST(Metrics, AriMatchesPairCounting)
{
    Rng rng = make_rng({42});
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 15);
        std::uniform_int_distribution<int> la(0, 1 + t % 4), lb(0, 1 + t % 3);
        std::vector<int> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = la(rng);
            b[i] = lb(rng);
        }
        EXPECT_NEAR(adjusted_rand_index(Partition(a), Partition(b)), pair_counting_ari(a, b), 1e-12);
    }
}

TEST(Metrics, AriKnownValues)
{
    // Contingency rows (2,1,0) and (0,1,2): index 2, expected 1.2, max 4.5.
    EXPECT_NEAR(adjusted_rand_index(Partition({0, 0, 0, 1, 1, 1}), Partition({0, 0, 1, 1, 2, 2})), 8.0 / 33.0, 1e-15);
    EXPECT_DOUBLE_EQ(adjusted_rand_index(Partition({0, 0, 1, 1}), Partition({1, 1, 0, 0})), 1.0);
    EXPECT_DOUBLE_EQ(adjusted_rand_index(Partition({0, 0, 0}), Partition({0, 0, 0})), 1.0);
    EXPECT_THROW(adjusted_rand_index(Partition({0}), Partition({0})), Error);
}

TEST(Metrics, AriOfShufflesIsNearZero)
{
    std::vector<int> truth(100);
    for (std::size_t i = 0; i < truth.size(); ++i)
        truth[i] = static_cast<int>(i % 2);
    Rng rng = make_rng({43});
    double sum = 0.0;
    const int shuffles = 2000;
    for (int t = 0; t < shuffles; ++t) {
        std::vector<int> s = truth;
        std::shuffle(s.begin(), s.end(), rng);
        sum += adjusted_rand_index(Partition(s), Partition(truth));
    }
    EXPECT_NEAR(sum / shuffles, 0.0, 0.01);
}

TEST(Metrics, SilhouetteMatchesDirectFormula)
{
    const Grid g(40, 0.0, 10.0);
    std::vector<GridDistribution> ds;
    for (double c : {1.0, 1.5, 2.0, 7.0, 8.0})
        ds.push_back(dirac(g, c));
    const std::vector<int> labels{0, 0, 0, 1, 1};
    // Point masses: d_W is |c_i - c_j|.
    const std::vector<double> c{1.0, 1.5, 2.0, 7.0, 8.0};
    double total = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        double a = 0, b = 0, na = 0, nb = 0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (j == i)
                continue;
            if (labels[j] == labels[i]) {
                a += std::abs(c[i] - c[j]);
                na += 1;
            } else {
                b += std::abs(c[i] - c[j]);
                nb += 1;
            }
        }
        a /= na;
        b /= nb;
        total += (b - a) / std::max(a, b);
    }
    EXPECT_NEAR(silhouette(ds, Partition(labels)), total / 5.0, 1e-14);
    try {
        silhouette(ds, Partition({0, 0, 0, 0, 0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingleCluster);
    }
}

TEST(Partition, RelabelsByFirstAppearance)
{
    const Partition p({5, 5, -1, 7, -1});
    EXPECT_EQ(p.labels(), (std::vector<int>{0, 0, 1, 2, 1}));
    EXPECT_EQ(p.clusters(), 3u);
    EXPECT_THROW(Partition(std::vector<int>{}), Error);
}
