// wkcc: command-line front end.
//
//   wkcc cluster   --input data.csv --K 2 --method kcdc --out result.json
//   wkcc simulate  --design II --reps 25 --out sim/
//   wkcc theory    --case common-mean --variances 3,1
//   wkcc gpca      --input data.csv --M auto --out gpca/
//   wkcc gauss-cluster --input vectors.csv --K 2 --out result.json
//
// Exit status: 0 ok, 2 bad arguments, 3 bad data, 4 solver failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wkcc/report.hpp"
#include "wkcc/wkcc.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wkcc;

namespace {

constexpr const char* kVersion = "1.0.0";

[[noreturn]] void bad_argument(const std::string& what)
{
    fail(ErrorCode::InvalidArgument, what);
}

std::vector<double> parse_list(const std::string& text, const std::string& flag)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        const std::string item = text.substr(start, comma - start);
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size() || !std::isfinite(v))
                throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            bad_argument(flag + ": '" + item + "' is not a number");
        }
        start = comma + 1;
    }
    return out;
}

std::vector<std::string> split_names(const std::string& text)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        if (comma > start)
            out.push_back(text.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

std::string format_number(double v)
{
    return detail::format_double(v);
}

// Datasets --------------------------------------------------------------

struct Dataset {
    std::vector<std::string> ids;
    std::vector<GridDistribution> ds;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t m = 0;
    std::size_t clamped = 0;
    std::string format;
};

std::pair<double, double> parse_omega(const std::string& text)
{
    const auto v = parse_list(text, "--omega");
    if (v.size() != 2 || !(v[0] < v[1]))
        bad_argument("--omega expects a,b with a < b");
    return {v[0], v[1]};
}

/// Samples (`id,value`) become empirical quantiles on an m-level grid over
/// Omega; quantile files (`id,q1..qm`) are read as they are.
Dataset load_dataset(const std::string& path, std::size_t m, bool m_given, const std::string& omega)
{
    Dataset out;
    if (is_samples_csv(path)) {
        out.format = "samples";
        const auto samples = read_samples_csv(path);
        if (samples.empty())
            fail(ErrorCode::EmptyInput, "'" + path + "' has no samples");
        if (!omega.empty()) {
            std::tie(out.lo, out.hi) = parse_omega(omega);
        } else {
            out.lo = std::numeric_limits<double>::infinity();
            out.hi = -out.lo;
            for (const SampleSet& s : samples)
                for (double v : s.values) {
                    out.lo = std::min(out.lo, v);
                    out.hi = std::max(out.hi, v);
                }
            if (!(out.lo < out.hi)) {
                out.lo -= 0.5;
                out.hi += 0.5;
            }
        }
        out.m = m;
        const Grid grid(m, out.lo, out.hi);
        for (const SampleSet& s : samples) {
            auto eq = empirical_quantile_distribution(s, grid);
            out.clamped += eq.clamped;
            out.ids.push_back(s.id);
            out.ds.push_back(std::move(eq.dist));
        }
        if (out.clamped > 0)
            std::cerr << "warning: " << out.clamped << " samples outside Omega were clamped\n";
        return out;
    }
    out.format = "quantiles";
    out.m = quantile_csv_columns(path);
    if (m_given && out.m != m)
        fail(ErrorCode::ColumnCountMismatch,
             "'" + path + "' has " + std::to_string(out.m) + " quantile columns but --m is " + std::to_string(m));
    if (!omega.empty()) {
        std::tie(out.lo, out.hi) = parse_omega(omega);
    } else {
        // Bounds from the data; rows are validated on the second pass.
        const auto lines = detail::read_lines(path);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t ln = 1; ln < lines.size(); ++ln) {
            if (detail::trim(lines[ln]).empty())
                continue;
            const auto cols = detail::split_csv(lines[ln]);
            for (std::size_t k = 1; k < cols.size(); ++k) {
                const double v = detail::parse_double(cols[k], ln + 1, "quantile");
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        if (!(lo <= hi))
            fail(ErrorCode::EmptyInput, "'" + path + "' has no distributions");
        if (!(lo < hi)) {
            lo -= 0.5;
            hi += 0.5;
        }
        out.lo = lo;
        out.hi = hi;
    }
    auto named = read_quantiles_csv(path, Grid(out.m, out.lo, out.hi));
    if (named.dists.empty())
        fail(ErrorCode::EmptyInput, "'" + path + "' has no distributions");
    out.ids = std::move(named.ids);
    out.ds = std::move(named.dists);
    return out;
}

/// Truth labels aligned to `ids` by id.
std::vector<int> load_truth(const std::string& path, const std::vector<std::string>& ids)
{
    const NamedLabels truth = read_labels_csv(path);
    std::vector<int> out(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto it = std::find(truth.ids.begin(), truth.ids.end(), ids[i]);
        if (it == truth.ids.end())
            fail(ErrorCode::LengthMismatch, "no truth label for id '" + ids[i] + "'");
        out[i] = truth.labels[static_cast<std::size_t>(it - truth.ids.begin())];
    }
    return out;
}

std::string sibling_path(const std::string& out, const std::string& suffix)
{
    fs::path p(out);
    const std::string stem = p.stem().string();
    return (p.parent_path() / (stem + suffix)).string();
}

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        fail(ErrorCode::IoError, "cannot create directory '" + dir + "': " + ec.message());
}

// cluster ---------------------------------------------------------------

struct ClusterArgs {
    std::string input;
    std::size_t K = 0;
    std::string method = "kcdc";
    std::optional<double> delta;
    double tau = 0.9;
    std::size_t m = kDefaultGridSize;
    std::string omega;
    std::uint64_t seed = 0;
    bool no_loo = false;
    std::string out;
    std::string truth;
    std::string k_range;
};

struct MethodRun {
    ClusterState state;
    json details = json::object();
};

MethodRun run_method(const ClusterArgs& a, const Dataset& data, std::size_t K)
{
    MethodRun run;
    KMeansOptions km;
    km.seed = a.seed;
    if (a.method == "kcdc" || a.method == "cpca") {
        KcdcConfig cfg;
        cfg.K = K;
        cfg.tau = a.tau;
        cfg.loo = !a.no_loo;
        cfg.seed = a.seed;
        cfg.pca.seed = a.seed;
        const KcdcResult r = kcdc_cluster(data.ds, cfg);
        run.details["M"] = r.M;
        run.details["selection_ev"] = r.selection_ev;
        if (a.method == "kcdc") {
            run.state = r.state;
            run.details["iterations"] = r.trace.iterations;
            run.details["convergence"] = r.trace.reason;
            run.details["objective_history"] = r.trace.objective_history;
            run.details["returned_visit"] = r.trace.best_visit;
            run.details["rollbacks"] = r.trace.rollbacks;
            run.details["min_cluster_size"] = r.trace.min_cluster_size;
        } else {
            run.state.labels = r.kmeans_labels;
        }
        return run;
    }
    if (a.method == "wkm") {
        run.state.labels = wasserstein_kmeans(data.ds, K, km);
        return run;
    }
    run.state.labels = trimmed_wasserstein_kmeans(data.ds, K, *a.delta, km);
    run.details["delta"] = *a.delta;
    return run;
}

int cmd_cluster(const ClusterArgs& a, bool m_given)
{
    if (a.method != "kcdc" && a.method != "cpca" && a.method != "wkm" && a.method != "wkm-trim")
        bad_argument("--method must be kcdc, cpca, wkm or wkm-trim");
    if (a.method == "wkm-trim" && !a.delta)
        bad_argument("--method wkm-trim requires --delta");
    if (a.delta && !(*a.delta >= 0.0 && *a.delta < 0.5))
        bad_argument("--delta must lie in [0, 0.5)");
    if (!(a.tau > 0.0 && a.tau < 1.0))
        bad_argument("--tau must lie in (0, 1)");
    if (a.m < 2)
        bad_argument("--m must be at least 2");
    std::vector<std::size_t> ks;
    if (!a.k_range.empty()) {
        const auto r = parse_list(a.k_range, "--k-range");
        if (r.size() != 2 || r[0] < 2 || r[1] < r[0] || r[0] != std::floor(r[0]) || r[1] != std::floor(r[1]))
            bad_argument("--k-range expects lo,hi with 2 <= lo <= hi");
        for (auto k = static_cast<std::size_t>(r[0]); k <= static_cast<std::size_t>(r[1]); ++k)
            ks.push_back(k);
    } else {
        if (a.K < 1)
            bad_argument("--K is required (or --k-range)");
        ks.push_back(a.K);
    }
    if (!a.omega.empty())
        parse_omega(a.omega);

    const Dataset data = load_dataset(a.input, a.m, m_given, a.omega);
    std::optional<std::vector<int>> truth;
    if (!a.truth.empty())
        truth = load_truth(a.truth, data.ids);

    json scan = json::array();
    std::optional<MethodRun> chosen;
    std::size_t chosen_k = ks.front();
    double best_sil = -std::numeric_limits<double>::infinity();
    for (std::size_t K : ks) {
        MethodRun run = run_method(a, data, K);
        if (ks.size() > 1) {
            const double s = silhouette(data.ds, Partition(run.state.labels));
            scan.push_back({{"K", K}, {"silhouette", s}});
            std::printf("K=%zu silhouette=%.6f\n", K, s);
            if (s > best_sil) {
                best_sil = s;
                chosen_k = K;
                chosen = std::move(run);
            }
        } else {
            chosen = std::move(run);
        }
    }

    json metrics = json::object();
    if (truth) {
        const double crate = correct_classification_rate(Partition(chosen->state.labels), Partition(*truth));
        const double arand = adjusted_rand_index(Partition(chosen->state.labels), Partition(*truth));
        metrics["crate"] = crate;
        metrics["arand"] = arand;
        std::printf("cRate=%.6f aRand=%.6f\n", crate, arand);
    }
    if (chosen_k >= 2) {
        try {
            metrics["silhouette"] = silhouette(data.ds, Partition(chosen->state.labels));
        } catch (const Error&) {
            metrics["silhouette"] = nullptr;
        }
    }

    json extra;
    extra["method"] = a.method;
    extra["K"] = chosen_k;
    extra["details"] = chosen->details;
    if (chosen->details.contains("M"))
        extra["M"] = chosen->details["M"];
    if (!scan.empty())
        extra["silhouette_scan"] = scan;
    extra["metrics"] = metrics;
    extra["config"] = {
        {"input", a.input},
        {"input_format", data.format},
        {"m", data.m},
        {"omega", {data.lo, data.hi}},
        {"clamped_samples", data.clamped},
        {"tau", a.tau},
        {"seed", a.seed},
        {"loo", !a.no_loo},
        {"delta", a.delta ? json(*a.delta) : json(nullptr)},
        {"reference", "frechet_mean"},
        {"qp_tol", ConvexPcaOptions{}.tol},
        {"qp_max_iter", ConvexPcaOptions{}.max_iter},
        {"kmeans_restarts", KMeansOptions{}.restarts},
        {"max_outer_iters", KcdcConfig{}.max_outer_iters},
    };
    extra["metadata"] = {{"tool", "wkcc"}, {"version", kVersion}, {"timestamp", utc_timestamp()}};
    write_result_json(chosen->state, data.ds, data.ids, chosen_k, extra, a.out);
    write_labels_csv(sibling_path(a.out, "_labels.csv"), data.ids, chosen->state.labels);
    if (chosen->details.contains("M"))
        std::printf("M=%s\n", chosen->details["M"].dump().c_str());
    return 0;
}

// simulate --------------------------------------------------------------

struct SimulateArgs {
    std::string design = "all";
    std::string methods;
    std::size_t reps = 25;
    std::size_t n = 100;
    std::size_t N = 2000;
    std::uint64_t seed = 0;
    std::size_t m = kDefaultGridSize;
    double tau = 0.9;
    bool no_loo = false;
    bool timing = false;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a)
{
    BenchmarkOptions o;
    if (a.design == "all") {
        o.designs = design_ids();
    } else {
        o.designs = split_names(a.design);
        for (const std::string& d : o.designs)
            make_design(d);
    }
    if (!a.methods.empty())
        o.methods = split_names(a.methods);
    validate_methods(o.methods);
    if (!(a.tau > 0.0 && a.tau < 1.0))
        bad_argument("--tau must lie in (0, 1)");
    if (a.n < 2 || a.N < 1 || a.m < 2)
        bad_argument("need --n >= 2, --N >= 1 and --m >= 2");
    o.reps = a.reps;
    o.n = a.n;
    o.N = a.N;
    o.seed = a.seed;
    o.m = a.m;
    o.tau = a.tau;
    o.loo = !a.no_loo;
    o.timing = a.timing;

    ensure_dir(a.out);
    const BenchmarkResult r = run_benchmark(o);
    detail::write_file((fs::path(a.out) / "replications.csv").string(), benchmark_rows_csv(r.rows));
    detail::write_file((fs::path(a.out) / "summary.csv").string(), benchmark_summary_csv(r.summary));
    detail::write_file((fs::path(a.out) / "table3.csv").string(), benchmark_table_csv(r.summary, o.methods));
    std::fputs(benchmark_table_csv(r.summary, o.methods).c_str(), stdout);
    return 0;
}

// theory ----------------------------------------------------------------

struct TheoryArgs {
    std::string kind;
    std::size_t draws = 100000;
    std::uint64_t seed = 0;
    std::string variances = "1,1";
    std::size_t ell = 2;
    std::optional<double> delta_norm;
    std::string mean_diff;
    std::string out;
};

int cmd_theory(const TheoryArgs& a)
{
    TheorySpec spec;
    spec.variances = parse_list(a.variances, "--variances");
    spec.draws = a.draws;
    spec.seed = a.seed;
    spec.ell = a.ell;
    json doc;
    TheoryResult r;
    if (a.kind == "common-mean") {
        r = theory_mc_common_mean(spec);
        doc["closed_form"] = r.reference;
        doc["pass"] = std::abs(r.mc_probability - r.reference) <= 3.0 * r.standard_error;
    } else if (a.kind == "common-cov") {
        const std::size_t J = spec.variances.size();
        if (!a.mean_diff.empty()) {
            if (a.delta_norm)
                bad_argument("give either --delta-norm or --mean-diff");
            spec.mean_difference = parse_list(a.mean_diff, "--mean-diff");
        } else {
            // |dm| along the second direction, orthogonal to the first.
            if (J < 2)
                fail(ErrorCode::SpecError, "--delta-norm needs at least two variances");
            spec.mean_difference.assign(J, 0.0);
            spec.mean_difference[1] = a.delta_norm.value_or(0.0);
        }
        r = theory_mc_common_cov(spec);
        doc["lower_bound"] = r.reference;
        doc["non_identifiable"] = r.non_identifiable;
        doc["pass"] = r.mc_probability >= r.reference - 3.0 * r.standard_error;
        doc["mean_difference"] = spec.mean_difference;
    } else {
        bad_argument("--case must be common-mean or common-cov");
    }
    doc["case"] = a.kind;
    doc["variances"] = spec.variances;
    if (a.kind == "common-mean")
        doc["ell"] = spec.ell;
    doc["mc"] = r.mc_probability;
    doc["se"] = r.standard_error;
    doc["draws"] = r.draws;
    doc["seed"] = a.seed;
    if (a.out.empty())
        std::cout << doc.dump(2) << "\n";
    else
        write_json(a.out, doc);
    return 0;
}

// gpca ------------------------------------------------------------------

struct GpcaArgs {
    std::string input;
    std::string M = "auto";
    double tau = 0.8;
    std::string alphas = "-1,0,1";
    std::size_t m = kDefaultGridSize;
    std::string omega;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gpca(const GpcaArgs& a, bool m_given)
{
    std::optional<std::size_t> fixed;
    if (a.M != "auto") {
        try {
            std::size_t used = 0;
            const long v = std::stol(a.M, &used);
            if (used != a.M.size() || v < 1)
                throw std::invalid_argument(a.M);
            fixed = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            bad_argument("--M must be a positive integer or 'auto'");
        }
    }
    if (!(a.tau > 0.0 && a.tau < 1.0))
        bad_argument("--tau must lie in (0, 1)");
    const auto alphas = parse_list(a.alphas, "--alphas");
    if (!a.omega.empty())
        parse_omega(a.omega);

    const Dataset data = load_dataset(a.input, a.m, m_given, a.omega);
    if (data.ds.size() < 3)
        fail(ErrorCode::TooFewPoints, "gpca needs at least 3 distributions");
    const ReferenceMeasure ref = choose_reference(data.ds, ReferenceChoice::FrechetMean);
    ConvexPcaOptions opts;
    opts.seed = a.seed;
    std::size_t M = 0;
    std::vector<double> ev;
    if (fixed) {
        M = *fixed;
    } else {
        const DimensionSelection sel = select_dimension(ref, data.ds, a.tau, opts);
        M = sel.M;
    }
    const PrincipalGeodesic pg = fit_principal_geodesic(ref, data.ds, M, opts);
    ev = pg.model.explained_variation_curve();
    std::printf("M=%zu\n", M);

    ensure_dir(a.out);
    const fs::path dir(a.out);
    std::string curve = "M,ev\n";
    for (std::size_t j = 0; j < ev.size(); ++j)
        curve += std::to_string(j + 1) + "," + format_number(ev[j]) + "\n";
    detail::write_file((dir / "ev_curve.csv").string(), curve);
    write_quantiles_csv((dir / "mean.csv").string(), {"mean"}, std::vector<GridDistribution>{pg.base});
    std::vector<std::string> dir_ids;
    std::vector<Vector> dir_rows;
    for (std::size_t j = 0; j < pg.model.dimension(); ++j) {
        dir_ids.push_back("phi" + std::to_string(j + 1));
        dir_rows.push_back(pg.model.directions()[j].values());
    }
    detail::write_file((dir / "directions.csv").string(), quantiles_csv(dir_ids, dir_rows));
    const auto modes = mode_of_variation(pg, alphas);
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        const std::string tag = format_number(alphas[k]);
        write_quantiles_csv((dir / ("mode_alpha_" + tag + ".csv")).string(), {"alpha=" + tag},
                            std::vector<GridDistribution>{modes[k]});
    }
    json doc;
    doc["M"] = M;
    doc["tau"] = a.tau;
    doc["auto"] = !fixed.has_value();
    doc["ev_curve"] = ev;
    doc["total_variation"] = pg.model.total_variation();
    doc["alphas"] = alphas;
    doc["config"] = {{"input", a.input}, {"m", data.m}, {"omega", {data.lo, data.hi}}, {"seed", a.seed}};
    doc["metadata"] = {{"tool", "wkcc"}, {"version", kVersion}, {"timestamp", utc_timestamp()}};
    write_json((dir / "gpca.json").string(), doc);
    return 0;
}

// gauss-cluster ---------------------------------------------------------

struct GaussArgs {
    std::string input;
    std::size_t K = 2;
    std::size_t M = 0;
    double tau = 0.9;
    std::uint64_t seed = 0;
    bool no_loo = false;
    std::string out;
    std::string truth;
};

int cmd_gauss(const GaussArgs& a)
{
    if (a.K < 1)
        bad_argument("--K must be at least 1");
    if (!(a.tau > 0.0 && a.tau < 1.0))
        bad_argument("--tau must lie in (0, 1)");
    const auto sets = read_vector_samples_csv(a.input);
    if (sets.empty())
        fail(ErrorCode::EmptyInput, "'" + a.input + "' has no samples");
    std::vector<std::string> ids;
    std::vector<Covariance> covs;
    for (const VectorSampleSet& s : sets) {
        ids.push_back(s.id);
        covs.push_back(empirical_covariance(s.values));
    }
    GaussKCentresConfig cfg;
    cfg.K = a.K;
    cfg.M = a.M;
    cfg.tau = a.tau;
    cfg.loo = !a.no_loo;
    cfg.seed = a.seed;
    cfg.pca.seed = a.seed;
    const GaussKCentresResult r = gauss_kcentres(covs, cfg);

    json metrics = json::object();
    if (!a.truth.empty()) {
        const auto truth = load_truth(a.truth, ids);
        const double crate = correct_classification_rate(Partition(r.labels), Partition(truth));
        const double arand = adjusted_rand_index(Partition(r.labels), Partition(truth));
        metrics["crate"] = crate;
        metrics["arand"] = arand;
        std::printf("cRate=%.6f aRand=%.6f\n", crate, arand);
    }
    json doc;
    doc["ids"] = ids;
    json labels = json::array();
    for (int l : r.labels)
        labels.push_back(l + 1);
    doc["labels"] = labels;
    doc["M"] = r.M;
    doc["selection_ev"] = r.selection_ev;
    doc["reference"] = matrix_json(r.reference.matrix());
    doc["reference_fit"] = {{"converged", r.reference_fit.converged},
                            {"iterations", r.reference_fit.iterations},
                            {"residual", r.reference_fit.residual}};
    json means = json::array();
    for (const Covariance& c : r.cluster_means)
        means.push_back(matrix_json(c.matrix()));
    doc["cluster_means"] = means;
    doc["covariances"] = json::array();
    for (const Covariance& c : covs)
        doc["covariances"].push_back(matrix_json(c.matrix()));
    doc["iterations"] = r.trace.iterations;
    doc["convergence"] = r.trace.reason;
    doc["objective_history"] = r.trace.objective_history;
    doc["metrics"] = metrics;
    doc["config"] = {{"input", a.input}, {"K", a.K}, {"tau", a.tau}, {"seed", a.seed}, {"loo", !a.no_loo},
                     {"requested_M", a.M}};
    doc["metadata"] = {{"tool", "wkcc"}, {"version", kVersion}, {"timestamp", utc_timestamp()}};
    write_json(a.out, doc);
    write_labels_csv(sibling_path(a.out, "_labels.csv"), ids, r.labels);
    std::printf("M=%zu\n", r.M);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"k-centres clustering of distributional data in the Wasserstein space"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: WKCC_THREADS, else all cores)")
        ->check(CLI::NonNegativeNumber);

    ClusterArgs ca;
    auto* cluster = app.add_subcommand("cluster", "cluster distributions");
    cluster->add_option("--input", ca.input, "samples CSV (id,value) or quantiles CSV (id,q1..qm)")->required();
    cluster->add_option("--K", ca.K, "number of clusters");
    cluster->add_option("--method", ca.method, "kcdc | cpca | wkm | wkm-trim")->capture_default_str();
    cluster->add_option("--delta", ca.delta, "trimming constant for wkm-trim");
    cluster->add_option("--tau", ca.tau, "explained-variation threshold")->capture_default_str();
    auto* cluster_m = cluster->add_option("--m", ca.m, "grid size")->capture_default_str();
    cluster->add_option("--omega", ca.omega, "domain a,b (default: data range)");
    cluster->add_option("--seed", ca.seed)->capture_default_str();
    cluster->add_flag("--no-loo", ca.no_loo, "one model per cluster instead of leave-one-out fits");
    cluster->add_option("--out", ca.out, "result JSON; labels go to <stem>_labels.csv")->required();
    cluster->add_option("--truth", ca.truth, "labels CSV (id,label) for cRate and aRand");
    cluster->add_option("--k-range", ca.k_range, "lo,hi: pick K by silhouette");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "simulation benchmark");
    simulate->add_option("--design", sa.design, "I..VIII, comma list, or all")->capture_default_str();
    simulate->add_option("--methods", sa.methods, "comma list of CPCA,kCDC,WkM,WkM_0.01,WkM_0.05,WkM_0.1");
    simulate->add_option("--reps", sa.reps)->capture_default_str();
    simulate->add_option("--n", sa.n)->capture_default_str();
    simulate->add_option("--N", sa.N)->capture_default_str();
    simulate->add_option("--seed", sa.seed)->capture_default_str();
    simulate->add_option("--m", sa.m)->capture_default_str();
    simulate->add_option("--tau", sa.tau)->capture_default_str();
    simulate->add_flag("--no-loo", sa.no_loo);
    simulate->add_flag("--timing", sa.timing, "record wall-clock seconds (output no longer reproducible)");
    simulate->add_option("--out", sa.out, "output directory")->required();

    TheoryArgs ta;
    auto* theory = app.add_subcommand("theory", "Monte Carlo check of membership probabilities");
    theory->add_option("--case", ta.kind, "common-mean | common-cov")->required();
    theory->add_option("--draws", ta.draws)->capture_default_str();
    theory->add_option("--seed", ta.seed)->capture_default_str();
    theory->add_option("--variances", ta.variances, "Var_1,...,Var_J")->capture_default_str();
    theory->add_option("--ell", ta.ell, "common-mean: 1-based index of the shared direction")->capture_default_str();
    theory->add_option("--delta-norm", ta.delta_norm, "common-cov: |m_c - m_d| along the second direction");
    theory->add_option("--mean-diff", ta.mean_diff, "common-cov: m_c - m_d in score coordinates");
    theory->add_option("--out", ta.out, "JSON path (default: stdout)");

    GpcaArgs ga;
    auto* gpca = app.add_subcommand("gpca", "geodesic PCA and modes of variation");
    gpca->add_option("--input", ga.input)->required();
    gpca->add_option("--M", ga.M, "dimension or auto")->capture_default_str();
    gpca->add_option("--tau", ga.tau)->capture_default_str();
    gpca->add_option("--alphas", ga.alphas)->capture_default_str();
    auto* gpca_m = gpca->add_option("--m", ga.m)->capture_default_str();
    gpca->add_option("--omega", ga.omega);
    gpca->add_option("--seed", ga.seed)->capture_default_str();
    gpca->add_option("--out", ga.out, "output directory")->required();

    GaussArgs gc;
    auto* gauss = app.add_subcommand("gauss-cluster", "cluster centred Gaussians by their covariances");
    gauss->add_option("--input", gc.input, "samples CSV id,x1..xd")->required();
    gauss->add_option("--K", gc.K)->capture_default_str();
    gauss->add_option("--M", gc.M, "model dimension; 0 selects by --tau")->capture_default_str();
    gauss->add_option("--tau", gc.tau)->capture_default_str();
    gauss->add_option("--seed", gc.seed)->capture_default_str();
    gauss->add_flag("--no-loo", gc.no_loo);
    gauss->add_option("--out", gc.out)->required();
    gauss->add_option("--truth", gc.truth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (threads > 0)
            set_thread_count(threads);
        if (*cluster)
            return cmd_cluster(ca, cluster_m->count() > 0);
        if (*simulate)
            return cmd_simulate(sa);
        if (*theory)
            return cmd_theory(ta);
        if (*gpca)
            return cmd_gpca(ga, gpca_m->count() > 0);
        if (*gauss)
            return cmd_gauss(gc);
    } catch (const Error& e) {
        std::cerr << "wkcc: " << e.what() << "\n";
        return exit_status(e.code());
    } catch (const std::exception& e) {
        std::cerr << "wkcc: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
