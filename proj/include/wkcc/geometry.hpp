#ifndef WKCC_GEOMETRY_HPP
#define WKCC_GEOMETRY_HPP

// Quantile-grid Wasserstein geometry on a compact interval [a, b].
//
// A distribution is stored as its quantile function sampled at the midpoint
// levels u_k = (k + 1/2) / m. On this grid the 2-Wasserstein distance is the
// weighted L2 distance between quantile vectors, the logarithmic map at a
// reference measure is the quantile difference, and the exponential map is
// the monotone rearrangement of the displaced reference quantiles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wkcc/error.hpp"

namespace wkcc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr std::size_t kDefaultGridSize = 1000;

class Grid {
public:
    Grid(std::size_t m, double lo, double hi)
        : m_(m)
        , lo_(lo)
        , hi_(hi)
    {
        if (m < 2)
            fail(ErrorCode::InvalidArgument, "grid needs at least 2 levels");
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
            fail(ErrorCode::InvalidArgument, "grid bounds must satisfy lo < hi");
    }

    std::size_t size() const { return m_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double width() const { return hi_ - lo_; }

    /// Monotonicity / domain tolerance, 1e-10 * (b - a).
    double tolerance() const { return 1e-10 * width(); }

    double level(std::size_t k) const
    {
        return (static_cast<double>(k) + 0.5) / static_cast<double>(m_);
    }

    Vector levels() const
    {
        Vector u(static_cast<Eigen::Index>(m_));
        for (std::size_t k = 0; k < m_; ++k)
            u[static_cast<Eigen::Index>(k)] = level(k);
        return u;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t m_;
    double lo_;
    double hi_;
};

namespace detail {

inline void require_same_grid(const Grid& a, const Grid& b)
{
    if (!(a == b))
        fail(ErrorCode::GridMismatch,
             "grids differ (m=" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

/// (1/m) * sum over k in [begin, end) of (a_k - b_k)^2. Shared by the plain
/// and trimmed distances so that zero trimming is the same code path.
inline double scaled_squared_difference(const Vector& a, const Vector& b, Eigen::Index begin,
                                        Eigen::Index end, double m)
{
    double s = 0.0;
    for (Eigen::Index k = begin; k < end; ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s / m;
}

}  // namespace detail

/// A probability measure on [a, b] given by its quantile values on a Grid.
/// Invariant: quantiles are non-decreasing and lie in [a, b].
class GridDistribution {
public:
    /// Validates `q`: violations of monotonicity or of the domain larger than
    /// grid.tolerance() throw; smaller ones are repaired (running max, clamp).
    GridDistribution(const Grid& grid, Vector q)
        : grid_(grid)
        , q_(std::move(q))
    {
        validate_and_repair();
    }

    struct Trusted {};

    /// For results that are monotone and in range by construction.
    GridDistribution(Trusted, const Grid& grid, Vector q)
        : grid_(grid)
        , q_(std::move(q))
    {}

    const Grid& grid() const { return grid_; }
    const Vector& quantiles() const { return q_; }
    std::size_t size() const { return grid_.size(); }
    double operator[](std::size_t k) const { return q_[static_cast<Eigen::Index>(k)]; }

private:
    void validate_and_repair()
    {
        const auto m = static_cast<Eigen::Index>(grid_.size());
        if (q_.size() != m)
            fail(ErrorCode::LengthMismatch, "expected " + std::to_string(m) + " quantile values, got " +
                                                std::to_string(q_.size()));
        const double tol = grid_.tolerance();
        for (Eigen::Index k = 0; k < m; ++k) {
            if (!std::isfinite(q_[k]))
                fail(ErrorCode::InvalidArgument, "non-finite quantile at level " + std::to_string(k));
            if (q_[k] < grid_.lo() - tol || q_[k] > grid_.hi() + tol)
                fail(ErrorCode::OutOfDomain, "quantile " + std::to_string(q_[k]) + " at level " +
                                                 std::to_string(k) + " outside the domain");
            q_[k] = std::clamp(q_[k], grid_.lo(), grid_.hi());
        }
        for (Eigen::Index k = 1; k < m; ++k) {
            if (q_[k] < q_[k - 1] - tol)
                fail(ErrorCode::NonMonotoneQuantiles,
                     "quantiles decrease between levels " + std::to_string(k - 1) + " and " + std::to_string(k));
            q_[k] = std::max(q_[k], q_[k - 1]);
        }
    }

    Grid grid_;
    Vector q_;
};

inline GridDistribution make_distribution(const Grid& grid, std::span<const double> q)
{
    Vector v(static_cast<Eigen::Index>(q.size()));
    std::copy(q.begin(), q.end(), v.data());
    return GridDistribution(grid, std::move(v));
}

inline GridDistribution make_distribution(const Grid& grid, Vector q)
{
    return GridDistribution(grid, std::move(q));
}

/// Point mass at c.
inline GridDistribution dirac(const Grid& grid, double c)
{
    return GridDistribution(grid, Vector::Constant(static_cast<Eigen::Index>(grid.size()), c));
}

/// Uniform distribution on [lo, hi] (a sub-interval of the grid domain).
inline GridDistribution uniform_distribution(const Grid& grid, double lo, double hi)
{
    return GridDistribution(grid, (lo + (hi - lo) * grid.levels().array()).matrix());
}

inline GridDistribution uniform_distribution(const Grid& grid)
{
    return uniform_distribution(grid, grid.lo(), grid.hi());
}

enum class TieBreak {
    Reject,  ///< non-strictly increasing quantiles are an error
    Jitter,  ///< blend with Uniform(Omega) at weight 1e-9 to separate ties
};

/// An absolutely continuous reference measure mu*: strictly increasing
/// quantiles. Copies share the underlying storage.
class ReferenceMeasure {
public:
    explicit ReferenceMeasure(const GridDistribution& dist, TieBreak ties = TieBreak::Reject)
    {
        Vector q = dist.quantiles();
        if (ties == TieBreak::Jitter && !strictly_increasing(q)) {
            constexpr double eta = 1e-9;
            const Vector u = uniform_distribution(dist.grid()).quantiles();
            q = (1.0 - eta) * q + eta * u;
        }
        if (!strictly_increasing(q))
            fail(ErrorCode::InvalidArgument, "reference measure needs strictly increasing quantiles");
        dist_ = std::make_shared<const GridDistribution>(GridDistribution::Trusted{}, dist.grid(), std::move(q));
    }

    static ReferenceMeasure uniform(const Grid& grid)
    {
        return ReferenceMeasure(uniform_distribution(grid));
    }

    const GridDistribution& distribution() const { return *dist_; }
    const Grid& grid() const { return dist_->grid(); }
    /// Reference quantiles x_k = F*^{-1}(u_k).
    const Vector& x() const { return dist_->quantiles(); }
    std::size_t size() const { return dist_->size(); }

    bool same_as(const ReferenceMeasure& other) const
    {
        return dist_ == other.dist_ || (grid() == other.grid() && x() == other.x());
    }

private:
    static bool strictly_increasing(const Vector& q)
    {
        for (Eigen::Index k = 1; k < q.size(); ++k)
            if (!(q[k] > q[k - 1]))
                return false;
        return true;
    }

    std::shared_ptr<const GridDistribution> dist_;
};

/// Element of L2(mu*) sampled at the reference quantiles: v_k = g(x_k).
class TangentVector {
public:
    TangentVector(ReferenceMeasure ref, Vector v)
        : ref_(std::move(ref))
        , v_(std::move(v))
    {
        if (v_.size() != static_cast<Eigen::Index>(ref_.size()))
            fail(ErrorCode::LengthMismatch, "tangent vector length does not match the reference grid");
        if (!v_.allFinite())
            fail(ErrorCode::InvalidArgument, "tangent vector has non-finite entries");
    }

    static TangentVector zero(const ReferenceMeasure& ref)
    {
        return TangentVector(ref, Vector::Zero(static_cast<Eigen::Index>(ref.size())));
    }

    const ReferenceMeasure& ref() const { return ref_; }
    const Vector& values() const { return v_; }
    std::size_t size() const { return ref_.size(); }

private:
    ReferenceMeasure ref_;
    Vector v_;
};

namespace detail {

inline void require_same_ref(const ReferenceMeasure& a, const ReferenceMeasure& b)
{
    if (!a.same_as(b))
        fail(ErrorCode::GridMismatch, "tangent vectors live at different reference measures");
}

}  // namespace detail

inline double wasserstein_distance(const GridDistribution& d1, const GridDistribution& d2)
{
    detail::require_same_grid(d1.grid(), d2.grid());
    const auto m = static_cast<Eigen::Index>(d1.size());
    return std::sqrt(detail::scaled_squared_difference(d1.quantiles(), d2.quantiles(), 0, m,
                                                       static_cast<double>(m)));
}

inline TangentVector log_map(const ReferenceMeasure& ref, const GridDistribution& mu)
{
    detail::require_same_grid(ref.grid(), mu.grid());
    return TangentVector(ref, mu.quantiles() - ref.x());
}

/// Push-forward of mu* by g + id: the ascending rearrangement of v_k + x_k,
/// clamped to [a, b]. Total on finite input.
inline GridDistribution exp_map(const ReferenceMeasure& ref, const TangentVector& g)
{
    detail::require_same_ref(ref, g.ref());
    Vector q = g.values() + ref.x();
    if (!std::is_sorted(q.data(), q.data() + q.size()))
        std::sort(q.data(), q.data() + q.size());
    const Grid& grid = ref.grid();
    for (Eigen::Index k = 0; k < q.size(); ++k)
        q[k] = std::clamp(q[k], grid.lo(), grid.hi());
    return GridDistribution(GridDistribution::Trusted{}, grid, std::move(q));
}

/// <g1, g2>_{mu*} = (1/m) sum_k g1(x_k) g2(x_k).
inline double tangent_inner(const ReferenceMeasure& ref, const TangentVector& g1, const TangentVector& g2)
{
    detail::require_same_ref(ref, g1.ref());
    detail::require_same_ref(ref, g2.ref());
    return g1.values().dot(g2.values()) / static_cast<double>(ref.size());
}

inline double tangent_norm(const ReferenceMeasure& ref, const TangentVector& g)
{
    return std::sqrt(tangent_inner(ref, g, g));
}

/// Cone membership test for raw grid values: v + x non-decreasing and inside
/// [a - tol, b + tol].
inline bool in_tangent_cone(const ReferenceMeasure& ref, const Vector& v)
{
    const Grid& grid = ref.grid();
    const double tol = grid.tolerance();
    const Vector& x = ref.x();
    double prev = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double y = v[k] + x[k];
        if (y < grid.lo() - tol || y > grid.hi() + tol || y < prev - tol)
            return false;
        prev = std::max(prev, y);
    }
    return true;
}

inline bool in_tangent_cone(const ReferenceMeasure& ref, const TangentVector& g)
{
    detail::require_same_ref(ref, g.ref());
    return in_tangent_cone(ref, g.values());
}

/// Weighted Wasserstein barycenter: the pointwise weighted mean of quantiles.
inline GridDistribution frechet_mean(std::span<const GridDistribution> ds,
                                     std::span<const double> weights = {})
{
    if (ds.empty())
        fail(ErrorCode::EmptyInput, "Frechet mean of an empty list");
    if (!weights.empty() && weights.size() != ds.size())
        fail(ErrorCode::LengthMismatch, "weights and distributions differ in length");
    const Grid& grid = ds.front().grid();
    Vector acc = Vector::Zero(static_cast<Eigen::Index>(grid.size()));
    double total = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        detail::require_same_grid(grid, ds[i].grid());
        const double w = weights.empty() ? 1.0 : weights[i];
        if (!(w >= 0.0) || !std::isfinite(w))
            fail(ErrorCode::InvalidArgument, "weights must be finite and nonnegative");
        acc += w * ds[i].quantiles();
        total += w;
    }
    if (!(total > 0.0))
        fail(ErrorCode::InvalidArgument, "weights must have a positive sum");
    acc /= total;
    // Averaging preserves monotonicity up to rounding; repair that rounding.
    for (Eigen::Index k = 0; k < acc.size(); ++k) {
        acc[k] = std::clamp(acc[k], grid.lo(), grid.hi());
        if (k > 0)
            acc[k] = std::max(acc[k], acc[k - 1]);
    }
    return GridDistribution(GridDistribution::Trusted{}, grid, std::move(acc));
}

inline GridDistribution frechet_mean(const std::vector<GridDistribution>& ds,
                                     const std::vector<double>& weights = {})
{
    return frechet_mean(std::span<const GridDistribution>(ds), std::span<const double>(weights));
}

}  // namespace wkcc

#endif  // WKCC_GEOMETRY_HPP
