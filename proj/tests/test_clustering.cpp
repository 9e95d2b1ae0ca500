#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "wkcc/wkcc.hpp"

using namespace wkcc;

namespace {

// Points on a line; a cluster model is the member mean.
struct LineSpace {
    std::vector<double> x;
    std::size_t size() const { return x.size(); }
    double fit(const std::vector<std::size_t>& members, std::size_t) const
    {
        double s = 0.0;
        for (std::size_t i : members)
            s += x[i];
        return s / static_cast<double>(members.size());
    }
    double distance(double centre, std::size_t i) const { return std::abs(x[i] - centre); }
};

// Every point is far from any model fitted with it and close to any model
// fitted without it, so the labels flip forever.
struct FlipSpace {
    std::size_t n;
    std::size_t size() const { return n; }
    std::vector<std::size_t> fit(const std::vector<std::size_t>& members, std::size_t) const { return members; }
    double distance(const std::vector<std::size_t>& fit, std::size_t i) const
    {
        return std::find(fit.begin(), fit.end(), i) != fit.end() ? 1.0 : 0.0;
    }
};

std::vector<GridDistribution> location_scale_families(const Grid& g, std::size_t per, Rng& rng)
{
    std::uniform_real_distribution<double> shift(-1.5, 1.5), scale(0.3, 2.0);
    std::vector<GridDistribution> ds;
    for (std::size_t i = 0; i < per; ++i)
        ds.push_back(wkcc::testing::normal_distribution_on(g, shift(rng), 1.0));
    for (std::size_t i = 0; i < per; ++i)
        ds.push_back(wkcc::testing::normal_distribution_on(g, 4.0, scale(rng)));
    return ds;
}

}  // namespace

TEST(KCentres, LeaveOneOutDistances)
{
    const LineSpace s{{0.0, 1.0, 2.0, 10.0, 12.0}};
    const std::vector<int> labels{0, 0, 0, 1, 1};
    const auto loo = detail::centre_distances(s, labels, 2, 1, true);
    EXPECT_DOUBLE_EQ(loo[0][0], 1.5);  // mean of {1, 2}
    EXPECT_DOUBLE_EQ(loo[0][1], 11.0);
    EXPECT_DOUBLE_EQ(loo[3][1], 2.0);  // mean of {12}
    const auto full = detail::centre_distances(s, labels, 2, 1, false);
    EXPECT_DOUBLE_EQ(full[0][0], 1.0);
    EXPECT_DOUBLE_EQ(full[3][1], 1.0);
}

TEST(KCentres, ConvergesToFixedPoint)
{
    const LineSpace s{{0.0, 0.5, 1.0, 9.0, 1.2, 10.0, 11.0, 8.5}};
    const KCentresTrace t = kcentres_iterate(s, {0, 0, 0, 0, 1, 1, 1, 1}, 2, 1, {20, true, 1});
    EXPECT_EQ(t.reason, "converged");
    EXPECT_EQ(t.labels, (std::vector<int>{0, 0, 0, 1, 0, 1, 1, 1}));
    EXPECT_EQ(t.best_visit, t.objective_history.size() - 1);
    EXPECT_LT(t.objective, t.objective_history.front());
}

TEST(KCentres, DetectsCyclesAndReturnsBestVisit)
{
    const FlipSpace s{6};
    const KCentresTrace t = kcentres_iterate(s, {0, 0, 0, 1, 1, 1}, 2, 1, {20, false, 1});
    EXPECT_EQ(t.reason, "cycle");
    EXPECT_EQ(t.objective_history.size(), 2u);
    EXPECT_EQ(t.labels, (std::vector<int>{0, 0, 0, 1, 1, 1}));
}

TEST(KCentres, IterationCap)
{
    // A cap of zero stops after the first reclassification.
    const LineSpace s{{0.0, 1.0, 2.0, 3.0, 4.0, 5.0}};
    const KCentresTrace t = kcentres_iterate(s, {0, 1, 0, 1, 0, 1}, 2, 1, {0, false, 1});
    EXPECT_EQ(t.reason, "max_iter");
    EXPECT_EQ(t.objective_history.size(), 1u);
}

TEST(KCentres, FloorRollsBackSmallestMargins)
{
    const LineSpace s{{0.0, 1.0, 2.0, 3.0, 2.4, 2.6}};
    std::size_t rollbacks = 0;
    const auto next = reclassify_step(s, {0, 0, 0, 0, 1, 1}, 2, 1, false, 1, nullptr, &rollbacks);
    // Full-fit centres 1.5 and 2.5; only the point at 3 moves.
    EXPECT_EQ(next, (std::vector<int>{0, 0, 0, 1, 1, 1}));
    EXPECT_EQ(rollbacks, 0u);
    // Centres 1.68 and 2.7: the points at 3 and 2.4 leave cluster 0. A floor
    // of 4 undoes the smaller-margin move (2.4) only.
    const LineSpace t{{0.0, 1.0, 2.0, 3.0, 2.4, 2.6, 2.7, 2.8}};
    const std::vector<int> start{0, 0, 0, 0, 0, 1, 1, 1};
    const auto four = reclassify_step(t, start, 2, 1, false, 4, nullptr, &rollbacks);
    EXPECT_EQ(four, (std::vector<int>{0, 0, 0, 1, 0, 1, 1, 1}));
    EXPECT_EQ(rollbacks, 1u);
    // Undoing both moves still leaves cluster 1 at 3 < 5.
    try {
        reclassify_step(t, start, 2, 1, false, 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyCluster);
    }
}

TEST(KCentres, DefaultFloor)
{
    EXPECT_EQ(default_min_cluster_size(1), 3u);
    EXPECT_EQ(default_min_cluster_size(4), 6u);
}

TEST(Kcdc, RecoversPlantedLocationAndScaleFamilies)
{
    const Grid g(300, -6.0, 12.0);
    Rng rng = make_rng({61});
    const auto ds = location_scale_families(g, 12, rng);
    std::vector<int> truth(24, 0);
    std::fill(truth.begin() + 12, truth.end(), 1);
    KcdcConfig cfg;
    cfg.K = 2;
    const KcdcResult r = kcdc_cluster(ds, cfg);
    EXPECT_DOUBLE_EQ(correct_classification_rate(Partition(r.state.labels), Partition(truth)), 1.0);
    EXPECT_GE(r.M, 1u);
    EXPECT_EQ(r.state.models.size(), 2u);
    EXPECT_EQ(r.trace.reason, "converged");
    for (const auto& pg : r.state.models)
        EXPECT_GE(pg.dimension(), 1u);
}

TEST(Kcdc, DeterministicAcrossThreadCounts)
{
    const Grid g(200, -6.0, 12.0);
    Rng rng = make_rng({62});
    const auto ds = location_scale_families(g, 10, rng);
    KcdcConfig cfg;
    cfg.K = 2;
    cfg.fixed_dimension = 2;
    set_thread_count(1);
    const KcdcResult a = kcdc_cluster(ds, cfg);
    set_thread_count(3);
    const KcdcResult b = kcdc_cluster(ds, cfg);
    set_thread_count(0);
    EXPECT_EQ(a.state.labels, b.state.labels);
    EXPECT_EQ(a.trace.objective_history, b.trace.objective_history);
}

TEST(Kcdc, ArgumentChecks)
{
    const Grid g(20, 0.0, 1.0);
    Rng rng = make_rng({63});
    std::vector<GridDistribution> ds;
    for (int i = 0; i < 6; ++i)
        ds.push_back(wkcc::testing::random_distribution(g, rng));
    KcdcConfig cfg;
    cfg.K = 0;
    EXPECT_THROW(kcdc_cluster(ds, cfg), Error);
    cfg.K = 2;
    cfg.tau = 1.0;
    EXPECT_THROW(kcdc_cluster(ds, cfg), Error);
}

TEST(Baselines, WassersteinKMeansSeparatesLocations)
{
    const Grid g(100, -10.0, 10.0);
    std::vector<GridDistribution> ds;
    std::vector<int> truth;
    for (int i = 0; i < 10; ++i) {
        ds.push_back(uniform_distribution(g, -5.0 + 0.1 * i, -3.0 + 0.1 * i));
        truth.push_back(0);
        ds.push_back(uniform_distribution(g, 3.0 + 0.1 * i, 5.0 + 0.1 * i));
        truth.push_back(1);
    }
    EXPECT_DOUBLE_EQ(correct_classification_rate(Partition(wasserstein_kmeans(ds, 2, {})), Partition(truth)), 1.0);
    EXPECT_DOUBLE_EQ(
        correct_classification_rate(Partition(trimmed_wasserstein_kmeans(ds, 2, 0.1, {})), Partition(truth)), 1.0);
}

// Oracle: (1 / (1 - 2 delta)) (1/m) sum over retained levels of the squared
// quantile difference.
TEST(Baselines, TrimmedDistance)
{
    const Grid g(10, 0.0, 10.0);
    const auto a = uniform_distribution(g, 0.0, 5.0);
    const auto b = uniform_distribution(g, 2.0, 9.0);
    EXPECT_EQ(trimmed_wasserstein_distance(a, b, 0.0), wasserstein_distance(a, b));
    for (double delta : {0.1, 0.2, 0.35}) {
        double s = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double u = g.level(k);
            if (u < delta || u > 1.0 - delta)
                continue;
            s += std::pow(a[k] - b[k], 2);
        }
        EXPECT_NEAR(trimmed_wasserstein_distance(a, b, delta), std::sqrt(s / 10.0 / (1.0 - 2.0 * delta)), 1e-13)
            << delta;
    }
    EXPECT_THROW(trimmed_wasserstein_distance(a, b, 0.5), Error);
}

TEST(Baselines, TrimmedDistanceClosedForms)
{
    const Grid g(1000, 0.0, 2.0);
    for (double delta : {0.01, 0.05, 0.1})
        EXPECT_NEAR(trimmed_wasserstein_distance(dirac(g, 0.2), dirac(g, 0.7), delta), 0.5, 1e-14);
    // sqrt((1 / 0.8) int_{0.1}^{0.9} u^2 du)
    const double expect = std::sqrt((0.9 * 0.9 * 0.9 - 0.1 * 0.1 * 0.1) / 3.0 / 0.8);
    EXPECT_NEAR(trimmed_wasserstein_distance(uniform_distribution(g, 0.0, 1.0), uniform_distribution(g, 0.0, 2.0), 0.1),
                expect, 1e-6);
    EXPECT_NEAR(expect, 0.55076, 1e-5);
}
