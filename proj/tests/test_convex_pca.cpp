#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "support.hpp"
#include "wkcc/wkcc.hpp"

using namespace wkcc;
using wkcc::testing::interior_data;
using wkcc::testing::random_distribution;

namespace {

// Unconstrained PCA oracle in the 1/m inner product: top eigenvectors of the
// centered Gram matrix, scaled to unit norm.
Matrix pca_directions(const std::vector<TangentVector>& logs, Eigen::Index J)
{
    const auto n = static_cast<Eigen::Index>(logs.size());
    const Eigen::Index m = logs.front().values().size();
    Matrix X(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        X.row(i) = logs[static_cast<std::size_t>(i)].values().transpose();
    X.rowwise() -= X.colwise().mean();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(X.transpose() * X);
    Matrix out(m, J);
    for (Eigen::Index j = 0; j < J; ++j)
        out.col(j) = eig.eigenvectors().col(m - 1 - j) * std::sqrt(static_cast<double>(m));
    return out;
}

double abs_cosine(const Vector& a, const Vector& b)
{
    return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

// Feasible range of t for anchor y + t phi on [lo, hi] with non-decreasing
// entries, by direct constraint enumeration.
std::pair<double, double> feasible_range(const Vector& y, const Vector& phi, double lo, double hi)
{
    double tlo = -INFINITY, thi = INFINITY;
    auto add = [&](double coef, double slack) {  // coef t <= slack
        if (coef > 0)
            thi = std::min(thi, slack / coef);
        else if (coef < 0)
            tlo = std::max(tlo, slack / coef);
    };
    for (Eigen::Index k = 0; k < y.size(); ++k) {
        add(phi[k], hi - y[k]);
        add(-phi[k], y[k] - lo);
        if (k + 1 < y.size())
            add(phi[k] - phi[k + 1], y[k + 1] - y[k]);
    }
    return {tlo, thi};
}

}  // namespace

TEST(ConvexPca, InactiveConstraintsReduceToPca)
{
    Rng rng = make_rng({31});
    auto data = interior_data(400, 40, 3, rng);
    const ConvexPcaModel model = fit_convex_pca(data.ref, data.logs, 2);
    const Matrix oracle = pca_directions(data.logs, 2);
    EXPECT_GE(abs_cosine(model.basis().col(0), oracle.col(0)), 0.999);
    EXPECT_GE(abs_cosine(model.basis().col(1), oracle.col(1)), 0.999);
    EXPECT_TRUE(model.search_reports().front().unconstrained_optimal);

    const double m = static_cast<double>(data.ref.size());
    for (std::size_t i = 0; i < data.logs.size(); ++i) {
        const Vector c = data.logs[i].values() - model.mean().values();
        const auto [xi, proj] = project_scores(model, data.logs[i]);
        for (Eigen::Index j = 0; j < 2; ++j)
            EXPECT_NEAR(xi.xi[j], model.basis().col(j).dot(c) / m, 1e-10);
    }
}

TEST(ConvexPca, DirectionsAreOrthonormal)
{
    const Grid g(200, 0.0, 1.0);
    Rng rng = make_rng({32});
    std::vector<GridDistribution> ds;
    for (int i = 0; i < 25; ++i)
        ds.push_back(random_distribution(g, rng));
    const ReferenceMeasure ref = choose_reference(ds, ReferenceChoice::FrechetMean);
    const ConvexPcaModel model = fit_convex_pca(ref, log_map_all(ref, ds), 3);
    const Matrix gram = model.basis().transpose() * model.basis() / 200.0;
    EXPECT_LE((gram - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ConvexPca, ProjectionStaysInConeAndMatchesLineOracle)
{
    const Grid g(150, 0.0, 1.0);
    Rng rng = make_rng({33});
    std::vector<GridDistribution> ds;
    for (int i = 0; i < 20; ++i)
        ds.push_back(random_distribution(g, rng));
    const ReferenceMeasure ref = choose_reference(ds, ReferenceChoice::FrechetMean);
    const ConvexPcaModel model = fit_convex_pca(ref, log_map_all(ref, ds), 1);
    const Vector phi = model.basis().col(0);
    const Vector y = model.mean().values() + ref.x();
    const auto [tlo, thi] = feasible_range(y, phi, g.lo(), g.hi());
    for (double c : {0.0, 0.02, 0.5, 0.98, 1.0}) {
        const TangentVector x = log_map(ref, dirac(g, c));
        const auto [xi, proj] = project_scores(model, x);
        EXPECT_TRUE(in_tangent_cone(ref, proj));
        const double free = phi.dot(x.values() - model.mean().values()) / 150.0;
        EXPECT_NEAR(xi.xi[0], std::clamp(free, tlo, thi), 1e-8 * (1.0 + std::abs(free)));
    }
}

TEST(ConvexPca, NestedDirections)
{
    const Grid g(120, 0.0, 1.0);
    Rng rng = make_rng({34});
    std::vector<GridDistribution> ds;
    for (int i = 0; i < 30; ++i)
        ds.push_back(random_distribution(g, rng));
    const ReferenceMeasure ref = choose_reference(ds, ReferenceChoice::FrechetMean);
    const auto logs = log_map_all(ref, ds);
    const ConvexPcaModel two = fit_convex_pca(ref, logs, 2);
    const ConvexPcaModel three = fit_convex_pca(ref, logs, 3);
    EXPECT_LE((two.basis() - three.basis().leftCols(2)).cwiseAbs().maxCoeff(), 1e-12);
    const auto& ev = three.explained_variation_curve();
    ASSERT_EQ(ev.size(), 3u);
    EXPECT_LE(ev[0], ev[1]);
    EXPECT_LE(ev[1], ev[2]);
    for (std::size_t j = 1; j <= 3; ++j)
        EXPECT_NEAR(explained_variation(three, logs, j), ev[j - 1], 1e-12);
}

TEST(ConvexPca, ExplainedVariationEqualsGeodesicExplainedVariation)
{
    const Grid g(200, -1.0, 3.0);
    Rng rng = make_rng({35});
    for (int t = 0; t < 3; ++t) {
        std::vector<GridDistribution> ds;
        for (int i = 0; i < 15; ++i)
            ds.push_back(random_distribution(g, rng));
        const ReferenceMeasure ref = choose_reference(ds, ReferenceChoice::FrechetMean);
        const PrincipalGeodesic pg = fit_principal_geodesic(ref, ds, 3);
        for (std::size_t M = 1; M <= 3; ++M)
            EXPECT_NEAR(geodesic_explained_variation(pg, ds, M), pg.model.explained_variation_curve()[M - 1], 1e-8);
    }
}

TEST(ConvexPca, DimensionBoundsAndDegenerateData)
{
    const Grid g(50, 0.0, 1.0);
    Rng rng = make_rng({36});
    std::vector<GridDistribution> ds;
    for (int i = 0; i < 4; ++i)
        ds.push_back(random_distribution(g, rng));
    const ReferenceMeasure ref = choose_reference(ds, ReferenceChoice::FrechetMean);
    const auto logs = log_map_all(ref, ds);
    try {
        fit_convex_pca(ref, logs, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionTooLarge);
    }
    const std::vector<TangentVector> same(3, logs.front());
    try {
        fit_convex_pca(ref, same, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateData);
    }
}

TEST(ConvexPca, SelectDimensionHitsThreshold)
{
    Rng rng = make_rng({37});
    auto data = interior_data(300, 60, 3, rng, {0.02, 0.01, 0.002});
    std::vector<GridDistribution> ds;
    for (const auto& l : data.logs)
        ds.push_back(exp_map(data.ref, l));
    const DimensionSelection sel = select_dimension(data.ref, ds, 0.9);
    ASSERT_EQ(sel.ev.size(), sel.M);
    EXPECT_GE(sel.ev.back(), 0.9);
    if (sel.M > 1) {
        EXPECT_LT(sel.ev[sel.M - 2], 0.9);
    }
    EXPECT_EQ(sel.M, 2u);
}

TEST(PrincipalGeodesic, ModeOfVariation)
{
    Rng rng = make_rng({38});
    auto data = interior_data(200, 30, 2, rng);
    std::vector<GridDistribution> ds;
    for (const auto& l : data.logs)
        ds.push_back(exp_map(data.ref, l));
    const PrincipalGeodesic pg = fit_principal_geodesic(data.ref, ds, 1);
    const std::vector<double> alphas{-1.0, 0.0, 1.0};
    const auto modes = mode_of_variation(pg, alphas);
    EXPECT_EQ(modes[1].quantiles(), pg.base.quantiles());
    // Symmetric about the mean inside the cone.
    const double dm = wasserstein_distance(modes[0], pg.base);
    const double dp = wasserstein_distance(modes[2], pg.base);
    EXPECT_NEAR(dm, dp, 1e-12);
    const Vector s = pg.model.training_scores().col(0);
    EXPECT_NEAR(dp, std::sqrt((s.array() - s.mean()).square().mean()), 1e-12);
}
