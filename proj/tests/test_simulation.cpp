#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "wkcc/wkcc.hpp"

using namespace wkcc;

TEST(Designs, IdsAndUnknownDesign)
{
    EXPECT_EQ(design_ids().size(), 8u);
    try {
        make_design("IX");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownDesign);
        EXPECT_EQ(exit_status(e.code()), 2);
    }
}

TEST(Designs, TableLayout)
{
    using MF = MeanFunction;
    using DS = DirectionSet;
    struct Row {
        const char* id;
        MF m1, m2;
        DS d1, d2;
    };
    const Row rows[] = {
        {"I", MF::F1, MF::F1, DS::E1, DS::E2},
        {"II", MF::F1, MF::F1, DS::E1, DS::E2},
        {"III", MF::F1, MF::F2, DS::E1, DS::E1},
        {"IV", MF::F1, MF::F2, DS::E1, DS::E2},
        {"V", MF::F1, MF::F3, DS::E1, DS::E1},
        {"VI", MF::F1, MF::F3, DS::E1, DS::E2},
        {"VII", MF::Phi11Over10, MF::Phi11Over15, DS::E1, DS::E1},
        {"VIII", MF::Phi11Over10, MF::Phi11Over15, DS::E1, DS::E2},
    };
    for (const Row& r : rows) {
        const DesignSpec s = make_design(r.id);
        EXPECT_EQ(s.means[0], r.m1) << r.id;
        EXPECT_EQ(s.means[1], r.m2) << r.id;
        EXPECT_EQ(s.directions[0], r.d1) << r.id;
        EXPECT_EQ(s.directions[1], r.d2) << r.id;
    }
    EXPECT_DOUBLE_EQ(make_design("I").lambda[0][0], 0.02);
    EXPECT_DOUBLE_EQ(make_design("II").lambda[0][0], 0.04);
    EXPECT_DOUBLE_EQ(make_design("II").lambda[1][1], 0.0133);
}

TEST(Designs, MeanFunctionsAreTruncatedNormalDisplacements)
{
    // F1 at x is the N(0.75, 0.3^2) quantile truncated to [0, 1], minus x.
    const double x = 0.4;
    const double a = normal_cdf((0.0 - 0.75) / 0.3);
    const double b = normal_cdf((1.0 - 0.75) / 0.3);
    const double q = 0.75 + 0.3 * normal_quantile(a + x * (b - a));
    EXPECT_NEAR(mean_function(MeanFunction::F1, x), q - x, 1e-12);
    EXPECT_NEAR(mean_function(MeanFunction::Phi11Over10, 0.25), std::sqrt(2.0) / 10.0, 1e-15);
}

TEST(Designs, DirectionsOrthonormalOnTheGrid)
{
    const Grid g(1000, 0.0, 1.0);
    for (DirectionSet s : {DirectionSet::E1, DirectionSet::E2})
        for (int j = 0; j < 2; ++j)
            for (int l = 0; l < 2; ++l) {
                double ip = 0.0;
                for (std::size_t k = 0; k < g.size(); ++k)
                    ip += direction_function(s, j, g.level(k)) * direction_function(s, l, g.level(k));
                EXPECT_NEAR(ip / 1000.0, j == l ? 1.0 : 0.0, 1e-12);
            }
}

TEST(Designs, ConeViolationsAreSmall)
{
    for (const char* id : {"III", "V"})
        EXPECT_EQ(scan_design_cone(make_design(id), 500, 3).violations, 0u) << id;
    for (const std::string& id : design_ids())
        EXPECT_LT(scan_design_cone(make_design(id), 500, 3).worst, 5e-4) << id;
}

TEST(Replication, DeterministicAndThreadFree)
{
    const DesignSpec s = make_design("IV");
    set_thread_count(1);
    const Replication a = generate_replication(s, 20, 50, 99);
    set_thread_count(4);
    const Replication b = generate_replication(s, 20, 50, 99);
    set_thread_count(0);
    EXPECT_EQ(a.labels, b.labels);
    for (std::size_t i = 0; i < 20; ++i)
        EXPECT_EQ(a.samples[i].values, b.samples[i].values);
    const Replication c = generate_replication(s, 20, 50, 100);
    EXPECT_NE(a.samples[0].values, c.samples[0].values);
}

// With every score at zero the empirical quantiles approach the cluster
// mean map u + f(u).
TEST(Replication, SamplesFollowTheMeanMap)
{
    const DesignSpec s = make_design("III");
    GenerateOptions o;
    o.lambda_scale = 0.0;
    const Replication r = generate_replication(s, 4, 20000, 5, o);
    const Grid g(50, 0.0, 1.0);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto d = empirical_quantile_distribution(r.samples[i], g).dist;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double u = g.level(k);
            EXPECT_NEAR(d[k], u + mean_function(s.means[static_cast<std::size_t>(r.labels[i])], u), 0.02);
        }
    }
}

TEST(Benchmark, MethodNames)
{
    EXPECT_EQ(method_trim("WkM"), 0.0);
    EXPECT_EQ(method_trim("WkM_0.05"), 0.05);
    EXPECT_FALSE(method_trim("WkM_0.7"));
    EXPECT_FALSE(method_trim("kmeans"));
    EXPECT_THROW(validate_methods({"kCDC", "nope"}), Error);
    EXPECT_EQ(benchmark_methods().size(), 6u);
}

TEST(Benchmark, SmallRunLayoutAndDeterminism)
{
    BenchmarkOptions o;
    o.designs = {"III", "V"};
    o.reps = 2;
    o.n = 24;
    o.N = 300;
    o.m = 100;
    o.seed = 4;
    set_thread_count(1);
    const BenchmarkResult a = run_benchmark(o);
    set_thread_count(3);
    const BenchmarkResult b = run_benchmark(o);
    set_thread_count(0);
    EXPECT_EQ(a.summary.size(), o.designs.size() * o.methods.size());
    EXPECT_EQ(a.rows.size(), o.designs.size() * o.methods.size() * o.reps);
    EXPECT_EQ(benchmark_rows_csv(a.rows), benchmark_rows_csv(b.rows));
    EXPECT_EQ(benchmark_summary_csv(a.summary), benchmark_summary_csv(b.summary));
    for (const BenchmarkRow& r : a.rows) {
        EXPECT_EQ(r.seconds, 0.0);
        EXPECT_GE(r.crate, 0.5);
        EXPECT_LE(r.crate, 1.0);
    }
    const std::string table = benchmark_table_csv(a.summary, o.methods);
    std::istringstream in(table);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "design,metric,CPCA,kCDC,WkM,WkM_0.01,WkM_0.05,WkM_0.1");
    int lines = 0;
    while (std::getline(in, line))
        ++lines;
    EXPECT_EQ(lines, 4);
}
