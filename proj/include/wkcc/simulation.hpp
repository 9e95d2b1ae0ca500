#ifndef WKCC_SIMULATION_HPP
#define WKCC_SIMULATION_HPP

// Two-cluster simulation designs I..VIII on [0, 1] with the uniform
// reference measure, and the benchmark runner comparing the clustering
// methods on replicated data sets.

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wkcc/clustering.hpp"
#include "wkcc/io.hpp"
#include "wkcc/metrics.hpp"
#include "wkcc/normal.hpp"
#include "wkcc/parallel.hpp"
#include "wkcc/random.hpp"

namespace wkcc {

enum class MeanFunction { F1, F2, F3, Phi11Over10, Phi11Over15 };
enum class DirectionSet { E1, E2 };

struct DesignSpec {
    std::string id;
    std::array<MeanFunction, 2> means{};
    std::array<DirectionSet, 2> directions{};
    /// Half-widths (lambda_1, lambda_2) of the uniform score laws per cluster.
    std::array<std::array<double, 2>, 2> lambda{};
};

inline constexpr std::array<double, 2> kTheta1{0.04, 0.001};
inline constexpr std::array<double, 2> kTheta2{0.02, 0.0133};

inline const std::vector<std::string>& design_ids()
{
    static const std::vector<std::string> ids{"I", "II", "III", "IV", "V", "VI", "VII", "VIII"};
    return ids;
}

inline DesignSpec make_design(const std::string& id)
{
    using MF = MeanFunction;
    using DS = DirectionSet;
    const std::array<double, 2> half{kTheta1[0] / 2, kTheta1[1] / 2};
    DesignSpec s;
    s.id = id;
    auto set = [&](MF m1, MF m2, DS s1, DS s2, std::array<double, 2> l1, std::array<double, 2> l2) {
        s.means = {m1, m2};
        s.directions = {s1, s2};
        s.lambda = {l1, l2};
    };
    if (id == "I")
        set(MF::F1, MF::F1, DS::E1, DS::E2, half, kTheta2);
    else if (id == "II")
        set(MF::F1, MF::F1, DS::E1, DS::E2, kTheta1, kTheta2);
    else if (id == "III")
        set(MF::F1, MF::F2, DS::E1, DS::E1, kTheta1, kTheta1);
    else if (id == "IV")
        set(MF::F1, MF::F2, DS::E1, DS::E2, kTheta1, kTheta2);
    else if (id == "V")
        set(MF::F1, MF::F3, DS::E1, DS::E1, kTheta1, kTheta1);
    else if (id == "VI")
        set(MF::F1, MF::F3, DS::E1, DS::E2, kTheta1, kTheta2);
    else if (id == "VII")
        set(MF::Phi11Over10, MF::Phi11Over15, DS::E1, DS::E1, kTheta1, kTheta1);
    else if (id == "VIII")
        set(MF::Phi11Over10, MF::Phi11Over15, DS::E1, DS::E2, kTheta1, kTheta2);
    else
        fail(ErrorCode::UnknownDesign, "unknown design '" + id + "' (expected I..VIII)");
    return s;
}

inline double mean_function(MeanFunction f, double x)
{
    const double s = std::numbers::sqrt2 * std::sin(2.0 * std::numbers::pi * x);
    switch (f) {
    case MeanFunction::F1: return truncated_normal_quantile(x, 0.75, 0.3, 0.0, 1.0) - x;
    case MeanFunction::F2: return truncated_normal_quantile(x, 0.75, 0.25, 0.0, 1.0) - x;
    case MeanFunction::F3: return truncated_normal_quantile(x, 0.65, 0.25, 0.0, 1.0) - x;
    case MeanFunction::Phi11Over10: return s / 10.0;
    case MeanFunction::Phi11Over15: return s / 15.0;
    }
    return 0.0;
}

/// phi_{s,j}(x): E1 = {sqrt2 sin 2 pi x, sqrt2 sin 8 pi x},
/// E2 = {sqrt2 sin 4 pi x, sqrt2 sin 6 pi x}.
inline double direction_function(DirectionSet set, int j, double x)
{
    static constexpr double freq[2][2] = {{2.0, 8.0}, {4.0, 6.0}};
    const double f = freq[set == DirectionSet::E1 ? 0 : 1][j];
    return std::numbers::sqrt2 * std::sin(f * std::numbers::pi * x);
}

/// One member of the design: cluster (0-based) and its two scores.
struct DesignDraw {
    int cluster = 0;
    double xi1 = 0.0;
    double xi2 = 0.0;
};

inline double design_tangent(const DesignSpec& spec, const DesignDraw& d, double x)
{
    const auto c = static_cast<std::size_t>(d.cluster);
    return mean_function(spec.means[c], x) + d.xi1 * direction_function(spec.directions[c], 0, x) +
           d.xi2 * direction_function(spec.directions[c], 1, x);
}

inline DesignDraw draw_member(const DesignSpec& spec, Rng& rng, double lambda_scale = 1.0)
{
    DesignDraw d;
    d.cluster = std::uniform_int_distribution<int>(0, 1)(rng);
    const auto& lam = spec.lambda[static_cast<std::size_t>(d.cluster)];
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    d.xi1 = lambda_scale * lam[0] * u(rng);
    d.xi2 = lambda_scale * lam[1] * u(rng);
    return d;
}

/// The member's tangent function on the uniform reference grid.
inline TangentVector design_tangent_vector(const DesignSpec& spec, const DesignDraw& d, const ReferenceMeasure& ref)
{
    Vector v(static_cast<Eigen::Index>(ref.size()));
    for (Eigen::Index k = 0; k < v.size(); ++k)
        v[k] = design_tangent(spec, d, ref.x()[k]);
    return TangentVector(ref, std::move(v));
}

struct GenerateOptions {
    /// Multiplies every lambda; 0 draws every member at its cluster mean.
    double lambda_scale = 1.0;
};

struct Replication {
    std::vector<SampleSet> samples;
    std::vector<int> labels;  ///< 0-based true clusters
    std::vector<DesignDraw> draws;
};

/// n members, N push-forward samples Y = g(U) + U each, U ~ Uniform(0, 1).
/// Member i uses its own random streams, so output does not depend on
/// thread count.
inline Replication generate_replication(const DesignSpec& spec, std::size_t n, std::size_t N, std::uint64_t seed,
                                        const GenerateOptions& opts = {})
{
    if (n < 2 || N < 1)
        fail(ErrorCode::InvalidArgument, "need n >= 2 and N >= 1");
    Replication rep;
    rep.samples.resize(n);
    rep.labels.resize(n);
    rep.draws.resize(n);
    parallel_for(n, [&](std::size_t i) {
        Rng member = make_rng({seed, static_cast<std::uint64_t>(i), 0});
        const DesignDraw d = draw_member(spec, member, opts.lambda_scale);
        Rng sampler = make_rng({seed, static_cast<std::uint64_t>(i), 1});
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        SampleSet s{std::to_string(i + 1), std::vector<double>(N)};
        for (double& y : s.values) {
            const double u = unif(sampler);
            y = design_tangent(spec, d, u) + u;
        }
        rep.samples[i] = std::move(s);
        rep.labels[i] = d.cluster;
        rep.draws[i] = d;
    });
    return rep;
}

struct ConeScan {
    std::size_t draws = 0;
    std::size_t violations = 0;
    /// Largest violation of monotonicity or of [0, 1] seen.
    double worst = 0.0;
};

/// Checks cone membership of `draws` random members on an m-level grid.
inline ConeScan scan_design_cone(const DesignSpec& spec, std::size_t draws, std::uint64_t seed,
                                 std::size_t m = kDefaultGridSize)
{
    const ReferenceMeasure ref = ReferenceMeasure::uniform(Grid(m, 0.0, 1.0));
    ConeScan scan;
    scan.draws = draws;
    Rng rng = make_rng({seed, 0xc0e5ULL});
    for (std::size_t t = 0; t < draws; ++t) {
        const DesignDraw d = draw_member(spec, rng);
        const TangentVector g = design_tangent_vector(spec, d, ref);
        if (in_tangent_cone(ref, g))
            continue;
        ++scan.violations;
        const Vector y = g.values() + ref.x();
        double worst = std::max(-y.minCoeff(), y.maxCoeff() - 1.0);
        for (Eigen::Index k = 1; k < y.size(); ++k)
            worst = std::max(worst, y[k - 1] - y[k]);
        scan.worst = std::max(scan.worst, worst);
    }
    return scan;
}

inline const std::vector<std::string>& benchmark_methods()
{
    static const std::vector<std::string> m{"CPCA", "kCDC", "WkM", "WkM_0.01", "WkM_0.05", "WkM_0.1"};
    return m;
}

struct BenchmarkOptions {
    std::vector<std::string> designs{"II"};
    std::vector<std::string> methods = benchmark_methods();
    std::size_t reps = 25;
    std::size_t n = 100;
    std::size_t N = 2000;
    std::uint64_t seed = 0;
    std::size_t m = kDefaultGridSize;
    double tau = 0.9;
    bool loo = true;
    /// Record wall-clock seconds; otherwise the column is 0 so that output
    /// is reproducible byte for byte.
    bool timing = false;
};

struct BenchmarkRow {
    std::string design;
    std::string method;
    std::size_t rep = 0;
    double crate = 0.0;
    double arand = 0.0;
    double seconds = 0.0;
    /// Selected dimension for kCDC / CPCA, 0 otherwise.
    std::size_t M = 0;
};

struct BenchmarkSummaryRow {
    std::string design;
    std::string method;
    std::size_t reps = 0;
    double crate_mean = 0.0;
    double arand_mean = 0.0;
    double crate_se = 0.0;
    double arand_se = 0.0;
};

struct BenchmarkResult {
    std::vector<BenchmarkRow> rows;
    std::vector<BenchmarkSummaryRow> summary;
};

/// Trimming constant encoded in a method name ("WkM" is 0, "WkM_0.05" is 0.05).
inline std::optional<double> method_trim(const std::string& method)
{
    if (method == "WkM")
        return 0.0;
    if (method.rfind("WkM_", 0) == 0) {
        const std::string t = method.substr(4);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec == std::errc() && ptr == t.data() + t.size() && v >= 0.0 && v < 0.5)
            return v;
    }
    return std::nullopt;
}

inline void validate_methods(const std::vector<std::string>& methods)
{
    for (const std::string& m : methods)
        if (m != "CPCA" && m != "kCDC" && !method_trim(m))
            fail(ErrorCode::InvalidArgument, "unknown method '" + m + "'");
}

inline std::vector<BenchmarkRow> run_replication(const DesignSpec& spec, std::size_t design_index, std::size_t r,
                                                 const BenchmarkOptions& opts)
{
    const std::uint64_t rep_seed = stream_seed({opts.seed, design_index, r});
    const Replication rep = generate_replication(spec, opts.n, opts.N, rep_seed);
    const Grid grid(opts.m, 0.0, 1.0);
    std::vector<GridDistribution> ds;
    ds.reserve(rep.samples.size());
    for (const SampleSet& s : rep.samples)
        ds.push_back(empirical_quantile_distribution(s, grid).dist);
    const Partition truth(rep.labels);

    using Clock = std::chrono::steady_clock;
    std::vector<BenchmarkRow> rows;
    std::optional<KcdcResult> kcdc;
    double kcdc_seconds = 0.0;
    double cpca_seconds = 0.0;
    auto run_kcdc = [&] {
        if (kcdc)
            return;
        KcdcConfig cfg;
        cfg.K = 2;
        cfg.tau = opts.tau;
        cfg.loo = opts.loo;
        cfg.seed = rep_seed;
        const auto t0 = Clock::now();
        kcdc = kcdc_cluster(ds, cfg);
        kcdc_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        cpca_seconds = kcdc_seconds;
    };
    for (const std::string& method : opts.methods) {
        BenchmarkRow row;
        row.design = spec.id;
        row.method = method;
        row.rep = r;
        std::vector<int> labels;
        if (method == "kCDC" || method == "CPCA") {
            run_kcdc();
            labels = method == "kCDC" ? kcdc->state.labels : kcdc->kmeans_labels;
            row.seconds = method == "kCDC" ? kcdc_seconds : cpca_seconds;
            row.M = kcdc->M;
        } else {
            KMeansOptions km;
            km.seed = rep_seed;
            const auto t0 = Clock::now();
            labels = trimmed_wasserstein_kmeans(ds, 2, *method_trim(method), km);
            row.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        }
        row.crate = correct_classification_rate(Partition(labels), truth);
        row.arand = adjusted_rand_index(Partition(labels), truth);
        if (!opts.timing)
            row.seconds = 0.0;
        rows.push_back(row);
    }
    return rows;
}

/// Mean cRate and aRand per design and method over independent replications.
/// Replication r of design d is generated from stream_seed(seed, d, r).
inline BenchmarkResult run_benchmark(const BenchmarkOptions& opts)
{
    validate_methods(opts.methods);
    std::vector<DesignSpec> specs;
    for (const std::string& id : opts.designs)
        specs.push_back(make_design(id));
    BenchmarkResult out;
    for (std::size_t d = 0; d < specs.size(); ++d) {
        std::size_t design_index = 0;
        const auto& ids = design_ids();
        design_index = static_cast<std::size_t>(std::find(ids.begin(), ids.end(), specs[d].id) - ids.begin());
        std::vector<std::vector<BenchmarkRow>> per_rep(opts.reps);
        parallel_for(opts.reps, [&](std::size_t r) { per_rep[r] = run_replication(specs[d], design_index, r, opts); });
        for (const std::string& method : opts.methods) {
            BenchmarkSummaryRow s;
            s.design = specs[d].id;
            s.method = method;
            s.reps = opts.reps;
            std::vector<double> cr, ar;
            for (const auto& rows : per_rep)
                for (const BenchmarkRow& row : rows)
                    if (row.method == method) {
                        cr.push_back(row.crate);
                        ar.push_back(row.arand);
                    }
            auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
                mean = 0.0;
                se = 0.0;
                if (v.empty())
                    return;
                for (double x : v)
                    mean += x;
                mean /= static_cast<double>(v.size());
                if (v.size() < 2)
                    return;
                double ss = 0.0;
                for (double x : v)
                    ss += (x - mean) * (x - mean);
                se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
            };
            mean_se(cr, s.crate_mean, s.crate_se);
            mean_se(ar, s.arand_mean, s.arand_se);
            out.summary.push_back(s);
        }
        for (auto& rows : per_rep)
            for (BenchmarkRow& row : rows)
                out.rows.push_back(std::move(row));
    }
    return out;
}

inline std::string benchmark_rows_csv(const std::vector<BenchmarkRow>& rows)
{
    std::string s = "design,method,rep,crate,arand,seconds\n";
    for (const BenchmarkRow& r : rows)
        s += r.design + "," + r.method + "," + std::to_string(r.rep + 1) + "," + detail::format_double(r.crate) + "," +
             detail::format_double(r.arand) + "," + detail::format_double(r.seconds) + "\n";
    return s;
}

inline std::string benchmark_summary_csv(const std::vector<BenchmarkSummaryRow>& rows)
{
    std::string s = "design,method,reps,crate,arand,crate_se,arand_se\n";
    for (const BenchmarkSummaryRow& r : rows)
        s += r.design + "," + r.method + "," + std::to_string(r.reps) + "," + detail::format_double(r.crate_mean) +
             "," + detail::format_double(r.arand_mean) + "," + detail::format_double(r.crate_se) + "," +
             detail::format_double(r.arand_se) + "\n";
    return s;
}

/// Wide layout: one cRate and one aRand row per design, one column per method.
inline std::string benchmark_table_csv(const std::vector<BenchmarkSummaryRow>& rows,
                                       const std::vector<std::string>& methods)
{
    std::string s = "design,metric";
    for (const std::string& m : methods)
        s += "," + m;
    s += "\n";
    std::vector<std::string> designs;
    for (const BenchmarkSummaryRow& r : rows)
        if (std::find(designs.begin(), designs.end(), r.design) == designs.end())
            designs.push_back(r.design);
    char buf[32];
    for (const std::string& d : designs) {
        for (int metric = 0; metric < 2; ++metric) {
            s += d + (metric == 0 ? ",cRate" : ",aRand");
            for (const std::string& m : methods) {
                double v = 0.0;
                for (const BenchmarkSummaryRow& r : rows)
                    if (r.design == d && r.method == m)
                        v = metric == 0 ? r.crate_mean : r.arand_mean;
                std::snprintf(buf, sizeof buf, "%.3f", v);
                s += ",";
                s += buf;
            }
            s += "\n";
        }
    }
    return s;
}

}  // namespace wkcc

#endif  // WKCC_SIMULATION_HPP
