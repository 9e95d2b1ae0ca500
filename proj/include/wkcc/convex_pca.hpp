#ifndef WKCC_CONVEX_PCA_HPP
#define WKCC_CONVEX_PCA_HPP

// Nested convex PCA of log-mapped distributions and its lift to nested
// principal geodesics in the Wasserstein space.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "wkcc/convex_pca_engine.hpp"
#include "wkcc/geometry.hpp"
#include "wkcc/qp.hpp"

namespace wkcc {

namespace detail {

/// Feasible set V_{mu*}(Omega) in grid coordinates, seen from an anchor
/// point xbar: xbar + z is feasible iff y + z is non-decreasing and inside
/// [a, b], where y = xbar + x are the anchor's quantiles. Slacks carry the
/// grid tolerance, so t = 0 is always feasible.
class QuantileCone {
public:
    enum class Kind { None, Monotone, Upper, Lower };

    struct Interval {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        Kind lo_kind = Kind::None;
        Kind hi_kind = Kind::None;
        Eigen::Index lo_index = 0;
        Eigen::Index hi_index = 0;
        double lo_coef = 0.0;
        double hi_coef = 0.0;
    };

    class Projector {
    public:
        Projector(Matrix A, Vector b, Interval line)
            : a_(std::move(A))
            , b_(std::move(b))
            , line_(line)
        {}

        QpResult operator()(const Vector& p, const QpOptions& opts) const
        {
            if (a_.cols() == 1) {
                QpResult r;
                r.t = Vector::Constant(1, std::clamp(p[0], line_.lo, line_.hi));
                return r;
            }
            return project_onto_polyhedron(a_, b_, p, opts);
        }

        const Matrix& constraints() const { return a_; }
        const Vector& bounds() const { return b_; }

    private:
        Matrix a_;
        Vector b_;
        Interval line_;
    };

    QuantileCone(Vector anchor_quantiles, double lo, double hi, double tol, double weight)
        : y_(std::move(anchor_quantiles))
        , lo_(lo)
        , hi_(hi)
        , tol_(tol)
        , w_(weight)
    {
        const Eigen::Index m = y_.size();
        mono_.resize(m - 1);
        up_.resize(m);
        low_.resize(m);
        for (Eigen::Index k = 0; k + 1 < m; ++k)
            mono_[k] = std::max(y_[k + 1] - y_[k], 0.0) + tol_;
        for (Eigen::Index k = 0; k < m; ++k) {
            up_[k] = std::max(hi_ - y_[k], 0.0) + tol_;
            low_[k] = std::max(y_[k] - lo_, 0.0) + tol_;
        }
    }

    Interval interval(const Vector& phi) const
    {
        // Each constraint reads c * t <= s with s > 0: c > 0 bounds t above
        // by s / c and c < 0 bounds it below.
        const Eigen::Index m = y_.size();
        Interval iv;
        auto consider = [&iv](const auto& c, const Vector& s, Kind kind) {
            constexpr double inf = std::numeric_limits<double>::infinity();
            Eigen::Index k = 0;
            const double hi = (c > 0.0).select(s.array() / c, inf).minCoeff(&k);
            if (hi < iv.hi) {
                iv.hi = hi;
                iv.hi_kind = kind;
                iv.hi_index = k;
                iv.hi_coef = c[k];
            }
            const double lo = (c < 0.0).select(s.array() / c, -inf).maxCoeff(&k);
            if (lo > iv.lo) {
                iv.lo = lo;
                iv.lo_kind = kind;
                iv.lo_index = k;
                iv.lo_coef = c[k];
            }
        };
        const Eigen::ArrayXd diff = phi.head(m - 1).array() - phi.tail(m - 1).array();
        consider(diff, mono_, Kind::Monotone);
        consider(phi.array(), up_, Kind::Upper);
        consider((-phi).array().eval(), low_, Kind::Lower);
        return iv;
    }

    void add_interval_gradient(const Vector& /*phi*/, const Interval& iv, double c_lo, double c_hi,
                               Vector& grad) const
    {
        add_bound_gradient(iv.lo, iv.lo_kind, iv.lo_index, iv.lo_coef, c_lo, grad);
        add_bound_gradient(iv.hi, iv.hi_kind, iv.hi_index, iv.hi_coef, c_hi, grad);
    }

    /// Constraint system A t <= b of xbar + basis * t, one row per monotone
    /// step, upper bound and lower bound.
    Projector projector(const Matrix& basis) const
    {
        const Eigen::Index m = y_.size();
        const Eigen::Index dims = basis.cols();
        Matrix A(3 * m - 1, dims);
        Vector b(3 * m - 1);
        Eigen::Index row = 0;
        for (Eigen::Index k = 0; k + 1 < m; ++k, ++row) {
            A.row(row) = basis.row(k) - basis.row(k + 1);
            b[row] = mono_[k];
        }
        for (Eigen::Index k = 0; k < m; ++k, ++row) {
            A.row(row) = basis.row(k);
            b[row] = up_[k];
        }
        for (Eigen::Index k = 0; k < m; ++k, ++row) {
            A.row(row) = -basis.row(k);
            b[row] = low_[k];
        }
        Interval line;
        if (dims == 1)
            line = interval(basis.col(0));
        return Projector(std::move(A), std::move(b), line);
    }

private:
    void add_bound_gradient(double bound, Kind kind, Eigen::Index k, double c, double scale,
                            Vector& grad) const
    {
        if (kind == Kind::None || scale == 0.0 || !std::isfinite(bound))
            return;
        // bound = s / c(phi)  =>  d bound = -(bound / c) dc; the metric
        // gradient of a coordinate functional is e_k / w.
        const double f = -scale * bound / c / w_;
        switch (kind) {
        case Kind::Monotone:
            grad[k] += f;
            grad[k + 1] -= f;
            break;
        case Kind::Upper:
            grad[k] += f;
            break;
        case Kind::Lower:
            grad[k] -= f;
            break;
        case Kind::None:
            break;
        }
    }

    Vector y_;
    double lo_;
    double hi_;
    double tol_;
    double w_;
    Vector mono_;
    Vector up_;
    Vector low_;
};

}  // namespace detail

/// Coefficients xi_1..xi_M of a constrained projection.
struct ScoreVector {
    Vector xi;
    std::size_t size() const { return static_cast<std::size_t>(xi.size()); }
    double operator[](std::size_t j) const { return xi[static_cast<Eigen::Index>(j)]; }
};

/// Fitted (M, xbar)-nested principal convex component in L2(mu*).
class ConvexPcaModel {
public:
    const ReferenceMeasure& ref() const { return ref_; }
    const TangentVector& mean() const { return mean_; }
    const std::vector<TangentVector>& directions() const { return directions_; }
    /// Directions as columns of an m x M matrix.
    const Matrix& basis() const { return basis_; }
    std::size_t dimension() const { return directions_.size(); }
    double total_variation() const { return tv_; }
    /// Cumulative explained variation for 1..M (empty without diagnostics).
    const std::vector<double>& explained_variation_curve() const { return ev_; }
    /// Constrained training scores, n x M (empty without diagnostics).
    const Matrix& training_scores() const { return scores_; }
    const std::vector<detail::DirectionReport>& search_reports() const { return reports_; }
    const ConvexPcaOptions& options() const { return opts_; }

    const detail::QuantileCone& cone() const { return *cone_; }
    const detail::QuantileCone::Projector& projector() const { return *projector_; }

private:
    ConvexPcaModel(ReferenceMeasure ref, TangentVector mean)
        : ref_(std::move(ref))
        , mean_(std::move(mean))
    {}

    ReferenceMeasure ref_;
    TangentVector mean_;
    std::vector<TangentVector> directions_;
    Matrix basis_;
    double tv_ = 0.0;
    std::vector<double> ev_;
    Matrix scores_;
    std::vector<detail::DirectionReport> reports_;
    ConvexPcaOptions opts_;
    std::shared_ptr<const detail::QuantileCone> cone_;
    std::shared_ptr<const detail::QuantileCone::Projector> projector_;

    friend struct ConvexPcaBuilder;
};

/// Builds convex PCA models; also used for threshold-driven dimension
/// selection, which grows the model one direction at a time.
struct ConvexPcaBuilder {
    struct Prepared {
        ReferenceMeasure ref;
        Vector mean;
        Matrix centered;
        std::shared_ptr<const detail::QuantileCone> cone;
    };

    static Prepared prepare(const ReferenceMeasure& ref, std::span<const TangentVector> data)
    {
        const std::size_t n = data.size();
        if (n < 2)
            fail(ErrorCode::TooFewPoints, "convex PCA needs at least 2 data");
        const auto m = static_cast<Eigen::Index>(ref.size());
        Matrix X(static_cast<Eigen::Index>(n), m);
        for (std::size_t i = 0; i < n; ++i) {
            detail::require_same_ref(ref, data[i].ref());
            if (!in_tangent_cone(ref, data[i].values()))
                fail(ErrorCode::InvalidArgument, "datum " + std::to_string(i) + " is outside the tangent cone");
            X.row(static_cast<Eigen::Index>(i)) = data[i].values().transpose();
        }
        Vector mean = X.colwise().mean().transpose();
        X.rowwise() -= mean.transpose();
        const Grid& grid = ref.grid();
        auto cone = std::make_shared<const detail::QuantileCone>(mean + ref.x(), grid.lo(), grid.hi(),
                                                                 grid.tolerance(), 1.0 / static_cast<double>(m));
        return Prepared{ref, std::move(mean), std::move(X), std::move(cone)};
    }

    /// Fits exactly `dims` directions, or, when `tau` is set, the smallest
    /// number of directions (at most `dims`) whose explained variation
    /// reaches tau.
    static ConvexPcaModel fit(const Prepared& prep, std::size_t dims, const ConvexPcaOptions& opts,
                              std::optional<double> tau = std::nullopt)
    {
        const Eigen::Index n = prep.centered.rows();
        const Eigen::Index m = prep.centered.cols();
        if (dims < 1 || static_cast<Eigen::Index>(dims) > std::min<Eigen::Index>(n - 1, m))
            fail(ErrorCode::DimensionTooLarge, "dimension " + std::to_string(dims) + " exceeds min(n-1, m) = " +
                                                   std::to_string(std::min<Eigen::Index>(n - 1, m)));
        const double w = 1.0 / static_cast<double>(m);
        detail::DirectionSearch<detail::QuantileCone> search(prep.centered, w, *prep.cone, opts);
        const double tv = search.total_variation();
        if (tv < 1e-14)
            fail(ErrorCode::DegenerateData, "total variation is zero (all data equal their mean)");

        ConvexPcaModel model(prep.ref, TangentVector(prep.ref, prep.mean));
        model.tv_ = tv;
        model.opts_ = opts;
        model.cone_ = prep.cone;

        const bool want_ev = opts.diagnostics || tau.has_value();
        for (std::size_t j = 1; j <= dims; ++j) {
            search.add_direction();
            if (want_ev) {
                const Matrix s = detail::constrained_scores(prep.centered, w, *prep.cone, search.directions(),
                                                            static_cast<Eigen::Index>(j), opts);
                model.ev_.push_back(std::clamp(s.rowwise().squaredNorm().mean() / tv, 0.0, 1.0));
                if (opts.diagnostics)
                    model.scores_ = s;
                if (tau && model.ev_.back() >= *tau)
                    break;
            }
        }
        if (!opts.diagnostics && !tau)
            model.ev_.clear();

        model.basis_ = search.directions();
        for (Eigen::Index j = 0; j < model.basis_.cols(); ++j)
            model.directions_.emplace_back(prep.ref, model.basis_.col(j));
        model.reports_ = search.reports();
        model.projector_ = std::make_shared<const detail::QuantileCone::Projector>(prep.cone->projector(model.basis_));
        return model;
    }
};

/// Nested convex PCA of tangent data in V_{mu*}(Omega) with M directions.
inline ConvexPcaModel fit_convex_pca(const ReferenceMeasure& ref, std::span<const TangentVector> data,
                                     std::size_t M, const ConvexPcaOptions& opts = {})
{
    return ConvexPcaBuilder::fit(ConvexPcaBuilder::prepare(ref, data), M, opts);
}

inline ConvexPcaModel fit_convex_pca(const ReferenceMeasure& ref, const std::vector<TangentVector>& data,
                                     std::size_t M, const ConvexPcaOptions& opts = {})
{
    return fit_convex_pca(ref, std::span<const TangentVector>(data), M, opts);
}

namespace detail {

inline QpResult solve_scores(const ConvexPcaModel& model, const Vector& centered, std::size_t dims)
{
    const double w = 1.0 / static_cast<double>(model.ref().size());
    const QpOptions qp{model.options().tol, model.options().max_iter};
    if (dims == model.dimension()) {
        const Vector p = w * (model.basis().transpose() * centered);
        return model.projector()(p, qp);
    }
    const Matrix basis = model.basis().leftCols(static_cast<Eigen::Index>(dims));
    const Vector p = w * (basis.transpose() * centered);
    return model.cone().projector(basis)(p, qp);
}

}  // namespace detail

/// Constrained projection of x onto the first `dims` directions (all by
/// default): the scores xi and the projected tangent vector xbar + sum xi_j phi_j.
inline std::pair<ScoreVector, TangentVector> project_scores(const ConvexPcaModel& model, const TangentVector& x,
                                                            std::optional<std::size_t> dims = std::nullopt)
{
    detail::require_same_ref(model.ref(), x.ref());
    const std::size_t d = dims.value_or(model.dimension());
    if (d < 1 || d > model.dimension())
        fail(ErrorCode::DimensionTooLarge, "projection dimension out of range");
    const Vector centered = x.values() - model.mean().values();
    QpResult res = detail::solve_scores(model, centered, d);
    if (!res.converged)
        fail(ErrorCode::SolverFailure,
             "score QP did not converge (KKT residual " + std::to_string(res.kkt_residual) + ")");
    Vector z = model.mean().values() + model.basis().leftCols(static_cast<Eigen::Index>(d)) * res.t;
    return {ScoreVector{std::move(res.t)}, TangentVector(model.ref(), std::move(z))};
}

/// EV_c over `data` for the first `dims` directions:
/// mean |Pi x_i - xbar|^2 / mean |x_i - xbar|^2.
inline double explained_variation(const ConvexPcaModel& model, std::span<const TangentVector> data,
                                  std::size_t dims)
{
    if (dims < 1 || dims > model.dimension())
        fail(ErrorCode::DimensionTooLarge, "explained variation dimension out of range");
    if (data.empty())
        fail(ErrorCode::EmptyInput, "explained variation of an empty list");
    const double w = 1.0 / static_cast<double>(model.ref().size());
    double explained = 0.0;
    double total = 0.0;
    for (const TangentVector& x : data) {
        detail::require_same_ref(model.ref(), x.ref());
        const Vector centered = x.values() - model.mean().values();
        total += w * centered.squaredNorm();
        QpResult res = detail::solve_scores(model, centered, dims);
        if (!res.converged)
            fail(ErrorCode::SolverFailure, "score QP did not converge");
        explained += res.t.squaredNorm();
    }
    if (!(total > 0.0))
        fail(ErrorCode::DegenerateData, "total variation is zero");
    return explained / total;
}

inline double explained_variation(const ConvexPcaModel& model, const std::vector<TangentVector>& data,
                                  std::size_t dims)
{
    return explained_variation(model, std::span<const TangentVector>(data), dims);
}

/// (M, nu_oplus)-nested principal geodesic: Exp of a principal convex component.
struct PrincipalGeodesic {
    ConvexPcaModel model;
    /// Frechet mean of the fitted distributions.
    GridDistribution base;

    const ReferenceMeasure& ref() const { return model.ref(); }
    std::size_t dimension() const { return model.dimension(); }
};

inline std::vector<TangentVector> log_map_all(const ReferenceMeasure& ref, std::span<const GridDistribution> ds)
{
    std::vector<TangentVector> out;
    out.reserve(ds.size());
    for (const GridDistribution& d : ds)
        out.push_back(log_map(ref, d));
    return out;
}

inline PrincipalGeodesic fit_principal_geodesic(const ReferenceMeasure& ref, std::span<const GridDistribution> ds,
                                                std::size_t M, const ConvexPcaOptions& opts = {})
{
    if (ds.empty())
        fail(ErrorCode::EmptyInput, "principal geodesic of an empty list");
    GridDistribution base = frechet_mean(ds);
    const std::vector<TangentVector> logs = log_map_all(ref, ds);
    return PrincipalGeodesic{fit_convex_pca(ref, logs, M, opts), std::move(base)};
}

inline PrincipalGeodesic fit_principal_geodesic(const ReferenceMeasure& ref, const std::vector<GridDistribution>& ds,
                                                std::size_t M, const ConvexPcaOptions& opts = {})
{
    return fit_principal_geodesic(ref, std::span<const GridDistribution>(ds), M, opts);
}

/// Closest point to nu on the principal geodesic (first `dims` directions).
inline GridDistribution geodesic_project(const PrincipalGeodesic& pg, const GridDistribution& nu,
                                         std::optional<std::size_t> dims = std::nullopt)
{
    auto projected = project_scores(pg.model, log_map(pg.ref(), nu), dims).second;
    return exp_map(pg.ref(), projected);
}

/// EV of the principal geodesic computed in the Wasserstein space:
/// mean d_W^2(Pi nu_i, nu_oplus) / mean d_W^2(nu_i, nu_oplus).
inline double geodesic_explained_variation(const PrincipalGeodesic& pg, std::span<const GridDistribution> ds,
                                           std::size_t dims)
{
    double explained = 0.0;
    double total = 0.0;
    for (const GridDistribution& nu : ds) {
        const double dt = wasserstein_distance(nu, pg.base);
        const double de = wasserstein_distance(geodesic_project(pg, nu, dims), pg.base);
        total += dt * dt;
        explained += de * de;
    }
    if (!(total > 0.0))
        fail(ErrorCode::DegenerateData, "total variation is zero");
    return explained / total;
}

inline double geodesic_explained_variation(const PrincipalGeodesic& pg, const std::vector<GridDistribution>& ds,
                                           std::size_t dims)
{
    return geodesic_explained_variation(pg, std::span<const GridDistribution>(ds), dims);
}

/// Distributions along the first geodesic mode of variation:
/// Exp(gbar + alpha * sqrt(lambda_1) * phi_1), lambda_1 the variance of the
/// first training scores.
inline std::vector<GridDistribution> mode_of_variation(const PrincipalGeodesic& pg, std::span<const double> alphas)
{
    const ConvexPcaModel& model = pg.model;
    if (model.dimension() < 1 || model.training_scores().size() == 0)
        fail(ErrorCode::InvalidArgument, "mode of variation needs a model fitted with diagnostics");
    const Vector first = model.training_scores().col(0);
    const double lambda = (first.array() - first.mean()).square().mean();
    const double scale = std::sqrt(lambda);
    std::vector<GridDistribution> out;
    out.reserve(alphas.size());
    for (double alpha : alphas) {
        if (alpha == 0.0) {
            out.push_back(pg.base);
            continue;
        }
        Vector v = model.mean().values() + alpha * scale * model.basis().col(0);
        out.push_back(exp_map(pg.ref(), TangentVector(pg.ref(), std::move(v))));
    }
    return out;
}

}  // namespace wkcc

#endif  // WKCC_CONVEX_PCA_HPP
