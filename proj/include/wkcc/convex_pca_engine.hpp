#ifndef WKCC_CONVEX_PCA_ENGINE_HPP
#define WKCC_CONVEX_PCA_ENGINE_HPP

// Nested convex PCA in a finite-dimensional Hilbert space with a closed convex
// feasible set X, generic over the feasible set ("cone" policy).
//
// Space: R^D with inner product <a, b> = w * a.b.
// Data: rows x_i, assumed in X; centered rows r_i = x_i - xbar.
//
// The j-th direction minimizes the single-direction objective
//
//     V(phi) = (1/n) sum_i min_{t : xbar + t phi in X} |r_i - t phi|^2
//
// over unit phi orthogonal to the previous directions. For a convex X the
// feasible t form an interval [lo(phi), hi(phi)], so the inner minimum is a
// clamp of <r_i, phi> and V(phi) costs one pass over the data.
//
// Cone policy requirements:
//   typename Cone::Interval with members `lo`, `hi`
//   Interval interval(const Vector& phi) const
//   void add_interval_gradient(const Vector& phi, const Interval&, double c_lo,
//                              double c_hi, Vector& grad) const
//       adds c_lo * grad(lo) + c_hi * grad(hi), gradients in the space metric
//   Projector projector(const Matrix& basis) const
//       Projector(p, QpOptions) -> QpResult solves
//       min |t - p|^2 s.t. xbar + basis * t in X
//   bool contains(const Vector& x) const

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "wkcc/error.hpp"
#include "wkcc/qp.hpp"
#include "wkcc/random.hpp"

namespace wkcc {

struct ConvexPcaOptions {
    std::uint64_t seed = 0;
    /// KKT tolerance of the score QP.
    double tol = 1e-9;
    /// Iteration cap of the score QP.
    int max_iter = 200;
    int eigen_starts = 5;
    int random_starts = 3;
    /// Projected-gradient iterations per start of the direction search.
    int search_iters = 150;
    /// Compute training scores and the explained-variation curve.
    bool diagnostics = true;
    /// Directions of a fit on nearly the same data (columns). When column j
    /// exists, the j-th search starts from it and the top residual
    /// eigenvector only.
    Eigen::MatrixXd warm_start;
};

namespace detail {

/// Outcome of one direction search, kept for metadata and tests.
struct DirectionReport {
    bool unconstrained_optimal = false;
    int starts_tried = 0;
    int best_start = 0;
    double objective = 0.0;
};

template <class Cone>
class DirectionSearch {
public:
    using Vector = Eigen::VectorXd;
    using Matrix = Eigen::MatrixXd;

    /// `centered`: n x D rows r_i = x_i - xbar.
    DirectionSearch(Matrix centered, double weight, const Cone& cone, const ConvexPcaOptions& opts)
        : r_(std::move(centered))
        , w_(weight)
        , cone_(&cone)
        , opts_(opts)
    {
        const Eigen::Index n = r_.rows();
        gram_ = w_ * (r_ * r_.transpose());
        sq_ = gram_.diagonal();
        tv_ = sq_.sum() / static_cast<double>(n);
        directions_.resize(r_.cols(), 0);
        inner_.resize(n, 0);
    }

    double total_variation() const { return tv_; }
    Eigen::Index count() const { return directions_.cols(); }
    const Matrix& directions() const { return directions_; }
    /// <r_i, phi_j> for every datum and found direction.
    const Matrix& inner_products() const { return inner_; }
    const std::vector<DirectionReport>& reports() const { return reports_; }

    double objective(const Vector& phi) const
    {
        const Vector p = w_ * (r_ * phi);
        const auto iv = cone_->interval(phi);
        double v = 0.0;
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            const double t = std::clamp(p[i], iv.lo, iv.hi);
            v += sq_[i] - 2.0 * t * p[i] + t * t;
        }
        return v / static_cast<double>(p.size());
    }

    void add_direction()
    {
        const Eigen::Index n = r_.rows();
        const Eigen::Index dim = r_.cols();
        const Eigen::Index j = count();

        Matrix residual_gram = gram_ - inner_ * inner_.transpose();
        Eigen::SelfAdjointEigenSolver<Matrix> eig(residual_gram);
        const Vector& evals = eig.eigenvalues();
        const double trace = std::max(residual_gram.trace(), 0.0);

        std::vector<Vector> starts;
        for (Eigen::Index k = n - 1; k >= 0 && static_cast<int>(starts.size()) < opts_.eigen_starts; --k) {
            if (evals[k] <= 1e-12 * trace || evals[k] <= 0.0)
                break;
            Vector phi = r_.transpose() * eig.eigenvectors().col(k);
            if (!normalize_orthogonal(phi))
                continue;
            starts.push_back(std::move(phi));
        }
        const bool have_eigen_start = !starts.empty();

        DirectionReport report;
        Vector best;
        double best_value = std::numeric_limits<double>::infinity();

        if (have_eigen_start && all_interior(starts.front())) {
            // The top residual eigenvector minimizes the unconstrained
            // objective, a lower bound of V; interior projections attain it.
            best = starts.front();
            best_value = objective(best);
            report.unconstrained_optimal = true;
            report.starts_tried = 1;
        } else if (j < opts_.warm_start.cols() && opts_.warm_start.rows() == dim) {
            if (have_eigen_start)
                starts.resize(1);
            Vector warm = opts_.warm_start.col(j);
            if (normalize_orthogonal(warm))
                starts.push_back(std::move(warm));
            for (std::size_t s = 0; s < starts.size(); ++s) {
                double value = 0.0;
                Vector phi = descend(starts[s], value);
                if (best.size() == 0 || value < best_value - 1e-15 * std::abs(best_value)) {
                    best_value = value;
                    best = std::move(phi);
                    report.best_start = static_cast<int>(s);
                }
            }
            report.starts_tried = static_cast<int>(starts.size());
        } else {
            Rng rng = make_rng({opts_.seed, static_cast<std::uint64_t>(j), 0x5eedULL});
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (int s = 0; s < opts_.random_starts; ++s) {
                Vector phi(dim);
                for (Eigen::Index k = 0; k < dim; ++k)
                    phi[k] = gauss(rng);
                if (normalize_orthogonal(phi))
                    starts.push_back(std::move(phi));
            }
            for (std::size_t s = 0; s < starts.size(); ++s) {
                double value = 0.0;
                Vector phi = descend(starts[s], value);
                if (best.size() == 0 || value < best_value - 1e-15 * std::abs(best_value)) {
                    best_value = value;
                    best = std::move(phi);
                    report.best_start = static_cast<int>(s);
                }
            }
            report.starts_tried = static_cast<int>(starts.size());
        }

        if (best.size() == 0)
            fail(ErrorCode::DegenerateData, "no direction orthogonal to the previous ones carries variation");

        // Re-orthogonalize against previous directions, normalize, fix sign.
        normalize_orthogonal(best);
        normalize_orthogonal(best);
        Eigen::Index arg = 0;
        best.cwiseAbs().maxCoeff(&arg);
        if (best[arg] < 0.0)
            best = -best;
        report.objective = objective(best);

        directions_.conservativeResize(dim, j + 1);
        directions_.col(j) = best;
        inner_.conservativeResize(n, j + 1);
        inner_.col(j) = w_ * (r_ * best);
        reports_.push_back(report);
    }

private:
    double inner(const Vector& a, const Vector& b) const { return w_ * a.dot(b); }

    /// Projects onto the orthocomplement of the found directions and scales
    /// to unit norm; false if nothing is left.
    bool normalize_orthogonal(Vector& phi) const
    {
        for (Eigen::Index l = 0; l < directions_.cols(); ++l)
            phi -= inner(directions_.col(l), phi) * directions_.col(l);
        const double norm = std::sqrt(inner(phi, phi));
        if (!(norm > 1e-300) || !std::isfinite(norm))
            return false;
        phi /= norm;
        return true;
    }

    bool all_interior(const Vector& phi) const
    {
        const Vector p = w_ * (r_ * phi);
        const auto iv = cone_->interval(phi);
        return p.minCoeff() >= iv.lo && p.maxCoeff() <= iv.hi;
    }

    Vector gradient(const Vector& phi) const
    {
        const Eigen::Index n = r_.rows();
        const Vector p = w_ * (r_ * phi);
        const auto iv = cone_->interval(phi);
        Vector t(n);
        double c_lo = 0.0;
        double c_hi = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (p[i] > iv.hi) {
                t[i] = iv.hi;
                c_hi += 2.0 * (iv.hi - p[i]);
            } else if (p[i] < iv.lo) {
                t[i] = iv.lo;
                c_lo += 2.0 * (iv.lo - p[i]);
            } else {
                t[i] = p[i];
            }
        }
        Vector g = -2.0 * (r_.transpose() * t);
        cone_->add_interval_gradient(phi, iv, c_lo, c_hi, g);
        return g / static_cast<double>(n);
    }

    /// Projected gradient descent on the unit sphere intersected with the
    /// orthocomplement of previous directions, with Armijo backtracking.
    Vector descend(Vector phi, double& value) const
    {
        value = objective(phi);
        double eta = -1.0;
        for (int it = 0; it < opts_.search_iters; ++it) {
            Vector g = gradient(phi);
            for (Eigen::Index l = 0; l < directions_.cols(); ++l)
                g -= inner(directions_.col(l), g) * directions_.col(l);
            g -= inner(phi, g) * phi;
            const double gnorm2 = inner(g, g);
            if (!(gnorm2 > 0.0) || !std::isfinite(gnorm2))
                break;
            if (eta < 0.0)
                eta = 0.1 / std::sqrt(gnorm2);
            bool moved = false;
            while (eta * std::sqrt(gnorm2) > 1e-12) {
                Vector cand = phi - eta * g;
                if (normalize_orthogonal(cand)) {
                    const double cv = objective(cand);
                    if (cv < value - 1e-4 * eta * gnorm2) {
                        const double gain = value - cv;
                        phi = std::move(cand);
                        value = cv;
                        eta *= 2.0;
                        moved = gain > 1e-10 * std::max(std::abs(value), 1e-300);
                        break;
                    }
                }
                eta *= 0.5;
            }
            if (!moved)
                break;
        }
        return phi;
    }

    Matrix r_;
    double w_;
    const Cone* cone_;
    ConvexPcaOptions opts_;
    Matrix gram_;
    Vector sq_;
    double tv_ = 0.0;
    Matrix directions_;
    Matrix inner_;
    std::vector<DirectionReport> reports_;
};

/// Constrained scores of every row of `centered` against the first `dims`
/// columns of `directions`.
template <class Cone>
Eigen::MatrixXd constrained_scores(const Eigen::MatrixXd& centered, double weight, const Cone& cone,
                                   const Eigen::MatrixXd& directions, Eigen::Index dims,
                                   const ConvexPcaOptions& opts)
{
    const Eigen::MatrixXd basis = directions.leftCols(dims);
    const auto project = cone.projector(basis);
    const Eigen::MatrixXd inner = weight * (centered * basis);
    Eigen::MatrixXd scores(centered.rows(), dims);
    for (Eigen::Index i = 0; i < centered.rows(); ++i) {
        QpResult res = project(inner.row(i).transpose(), QpOptions{opts.tol, opts.max_iter});
        if (!res.converged)
            fail(ErrorCode::SolverFailure, "score QP did not converge (KKT residual " +
                                               std::to_string(res.kkt_residual) + ")");
        scores.row(i) = res.t.transpose();
    }
    return scores;
}

}  // namespace detail

}  // namespace wkcc

#endif  // WKCC_CONVEX_PCA_ENGINE_HPP
