#ifndef WKCC_GAUSSIAN_HPP
#define WKCC_GAUSSIAN_HPP

// Bures-Wasserstein geometry of centred Gaussian measures N(0, S) and
// k-centres clustering of covariance matrices.
//
// Tangent vectors at a reference S* are symmetric matrices V with inner
// product tr(V1 S* V2). For convex PCA they are written in coordinates z
// with z1 . z2 = tr(V1 S* V2): V = sum_k a_k E_k over the basis
// {E_ii, E_ij + E_ji} of Sym(d), Gram G = L L^T, z = L^T a.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "wkcc/convex_pca_engine.hpp"
#include "wkcc/error.hpp"
#include "wkcc/kcentres.hpp"
#include "wkcc/kmeans.hpp"
#include "wkcc/parallel.hpp"
#include "wkcc/qp.hpp"

namespace wkcc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace detail {

inline MatrixXd symmetric_function(const MatrixXd& S, double (*f)(double))
{
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(S);
    VectorXd ev = eig.eigenvalues();
    for (Eigen::Index k = 0; k < ev.size(); ++k)
        ev[k] = f(std::max(ev[k], 0.0));
    MatrixXd out = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

inline double sqrt_fn(double x) { return std::sqrt(x); }

}  // namespace detail

/// Principal square root of a symmetric PSD matrix, eigenvalues clipped at 0.
inline MatrixXd psd_sqrt(const MatrixXd& S)
{
    return detail::symmetric_function(S, &detail::sqrt_fn);
}

/// Covariance matrix of a centred Gaussian: symmetric PSD.
class Covariance {
public:
    explicit Covariance(MatrixXd S)
    {
        if (S.rows() != S.cols() || S.rows() == 0)
            fail(ErrorCode::InvalidArgument, "covariance must be a non-empty square matrix");
        if (!S.allFinite())
            fail(ErrorCode::InvalidArgument, "covariance has non-finite entries");
        const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
        if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            fail(ErrorCode::InvalidArgument, "covariance is not symmetric");
        S = 0.5 * (S + S.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(S);
        if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
            fail(ErrorCode::InvalidArgument, "covariance is not positive semidefinite");
        if (eig.eigenvalues().minCoeff() < 0.0) {
            const VectorXd ev = eig.eigenvalues().cwiseMax(0.0);
            S = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
            S = 0.5 * (S + S.transpose());
        }
        s_ = std::move(S);
    }

    Eigen::Index dim() const { return s_.rows(); }
    const MatrixXd& matrix() const { return s_; }

private:
    MatrixXd s_;
};

/// Sample covariance of the rows of X after removing their mean.
inline Covariance empirical_covariance(const MatrixXd& X)
{
    if (X.rows() < 2)
        fail(ErrorCode::EmptySamples, "covariance needs at least 2 samples");
    const MatrixXd c = X.rowwise() - X.colwise().mean();
    return Covariance((c.transpose() * c) / static_cast<double>(X.rows() - 1));
}

inline void require_same_dim(const Covariance& a, const Covariance& b)
{
    if (a.dim() != b.dim())
        fail(ErrorCode::DimensionMismatch, "covariances of different dimensions");
}

inline double bures_distance(const Covariance& S1, const Covariance& S2)
{
    require_same_dim(S1, S2);
    const MatrixXd r = psd_sqrt(S1.matrix());
    const MatrixXd cross = psd_sqrt(r * S2.matrix() * r);
    const double v = S1.matrix().trace() + S2.matrix().trace() - 2.0 * cross.trace();
    return std::sqrt(std::max(v, 0.0));
}

/// Symmetric tangent matrix at a positive-definite reference.
class SymTangent {
public:
    SymTangent(Covariance ref, MatrixXd V)
        : ref_(std::move(ref))
        , v_(std::move(V))
    {
        if (v_.rows() != ref_.dim() || v_.cols() != ref_.dim())
            fail(ErrorCode::DimensionMismatch, "tangent matrix size does not match the reference");
        v_ = 0.5 * (v_ + v_.transpose());
    }

    const Covariance& ref() const { return ref_; }
    const MatrixXd& matrix() const { return v_; }

    /// V + I is positive semidefinite.
    bool in_cone(double tol = 1e-10) const
    {
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(v_ + MatrixXd::Identity(v_.rows(), v_.cols()),
                                                    Eigen::EigenvaluesOnly);
        return eig.eigenvalues().minCoeff() >= -tol;
    }

private:
    Covariance ref_;
    MatrixXd v_;
};

namespace detail {

struct ReferenceRoots {
    MatrixXd root;
    MatrixXd inv_root;
};

inline ReferenceRoots reference_roots(const Covariance& ref)
{
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(ref.matrix());
    const VectorXd& ev = eig.eigenvalues();
    if (!(ev.minCoeff() > 1e-12 * std::max(ev.maxCoeff(), 1e-300)))
        fail(ErrorCode::SingularReference, "reference covariance is not positive definite");
    const MatrixXd& U = eig.eigenvectors();
    return {U * ev.cwiseSqrt().asDiagonal() * U.transpose(), U * ev.cwiseSqrt().cwiseInverse().asDiagonal() * U.transpose()};
}

inline MatrixXd log_with_roots(const ReferenceRoots& r, const MatrixXd& S)
{
    const MatrixXd mid = psd_sqrt(r.root * S * r.root);
    MatrixXd V = r.inv_root * mid * r.inv_root - MatrixXd::Identity(S.rows(), S.cols());
    return 0.5 * (V + V.transpose());
}

}  // namespace detail

/// Log_{S*} S = S*^{-1/2} (S*^{1/2} S S*^{1/2})^{1/2} S*^{-1/2} - I.
inline SymTangent gauss_log(const Covariance& Sstar, const Covariance& S)
{
    require_same_dim(Sstar, S);
    const auto roots = detail::reference_roots(Sstar);
    return SymTangent(Sstar, detail::log_with_roots(roots, S.matrix()));
}

/// Exp_{S*} V = (V + I) S* (V + I).
inline Covariance gauss_exp(const Covariance& Sstar, const SymTangent& V)
{
    require_same_dim(Sstar, V.ref());
    const MatrixXd T = V.matrix() + MatrixXd::Identity(Sstar.dim(), Sstar.dim());
    MatrixXd S = T * Sstar.matrix() * T;
    return Covariance(0.5 * (S + S.transpose()));
}

inline double sym_inner(const Covariance& Sstar, const MatrixXd& V1, const MatrixXd& V2)
{
    if (V1.rows() != Sstar.dim() || V2.rows() != Sstar.dim())
        fail(ErrorCode::DimensionMismatch, "tangent matrix size does not match the reference");
    return (V1 * Sstar.matrix() * V2).trace();
}

inline double sym_inner(const Covariance& Sstar, const SymTangent& V1, const SymTangent& V2)
{
    return sym_inner(Sstar, V1.matrix(), V2.matrix());
}

struct GaussMeanResult {
    Covariance mean;
    bool converged = false;
    int iterations = 0;
    /// Frobenius norm of the last update.
    double residual = 0.0;
};

/// Bures barycenter by the fixed-point iteration S <- T S T, T the average
/// optimal map from S to the inputs, started at the arithmetic mean.
inline GaussMeanResult gauss_frechet_mean(std::span<const Covariance> Ss, double tol = 1e-12, int max_iter = 1000)
{
    if (Ss.empty())
        fail(ErrorCode::EmptyInput, "Frechet mean of an empty list");
    const Eigen::Index d = Ss.front().dim();
    MatrixXd S = MatrixXd::Zero(d, d);
    for (const Covariance& c : Ss) {
        require_same_dim(Ss.front(), c);
        S += c.matrix();
    }
    S /= static_cast<double>(Ss.size());
    GaussMeanResult out{Covariance(S)};
    const double scale = std::max(1.0, S.norm());
    for (int it = 1; it <= max_iter; ++it) {
        const auto roots = detail::reference_roots(Covariance(S));
        MatrixXd T = MatrixXd::Zero(d, d);
        for (const Covariance& c : Ss)
            T += detail::log_with_roots(roots, c.matrix());
        T /= static_cast<double>(Ss.size());
        T += MatrixXd::Identity(d, d);
        MatrixXd next = T * S * T;
        next = 0.5 * (next + next.transpose());
        out.residual = (next - S).norm();
        out.iterations = it;
        S = std::move(next);
        if (out.residual <= tol * scale) {
            out.converged = true;
            break;
        }
    }
    out.mean = Covariance(S);
    return out;
}

inline GaussMeanResult gauss_frechet_mean(const std::vector<Covariance>& Ss, double tol = 1e-12, int max_iter = 1000)
{
    return gauss_frechet_mean(std::span<const Covariance>(Ss), tol, max_iter);
}

/// Orthonormal coordinates for Sym(d) under tr(V1 S* V2).
class SymCoordinates {
public:
    explicit SymCoordinates(const Covariance& ref)
        : d_(ref.dim())
    {
        const Eigen::Index D = d_ * (d_ + 1) / 2;
        std::vector<MatrixXd> basis;
        for (Eigen::Index i = 0; i < d_; ++i)
            for (Eigen::Index j = i; j < d_; ++j) {
                MatrixXd E = MatrixXd::Zero(d_, d_);
                E(i, j) = 1.0;
                E(j, i) = 1.0;
                basis.push_back(std::move(E));
            }
        MatrixXd G(D, D);
        for (Eigen::Index k = 0; k < D; ++k)
            for (Eigen::Index l = k; l < D; ++l)
                G(k, l) = G(l, k) = (basis[static_cast<std::size_t>(k)] * ref.matrix() *
                                     basis[static_cast<std::size_t>(l)])
                                        .trace();
        Eigen::LLT<MatrixXd> llt(G);
        if (llt.info() != Eigen::Success)
            fail(ErrorCode::SingularReference, "reference covariance is not positive definite");
        L_ = llt.matrixL();
    }

    Eigen::Index matrix_dim() const { return d_; }
    Eigen::Index size() const { return d_ * (d_ + 1) / 2; }

    VectorXd to_coords(const MatrixXd& V) const
    {
        // V = sum a_k E_k, and E_ij (i < j) has ones at (i, j) and (j, i).
        VectorXd a(size());
        Eigen::Index k = 0;
        for (Eigen::Index i = 0; i < d_; ++i)
            for (Eigen::Index j = i; j < d_; ++j)
                a[k++] = i == j ? V(i, i) : 0.5 * (V(i, j) + V(j, i));
        return L_.transpose() * a;
    }

    MatrixXd to_matrix(const VectorXd& z) const
    {
        const VectorXd a = L_.transpose().triangularView<Eigen::Upper>().solve(z);
        MatrixXd V(d_, d_);
        Eigen::Index k = 0;
        for (Eigen::Index i = 0; i < d_; ++i)
            for (Eigen::Index j = i; j < d_; ++j, ++k) {
                V(i, j) = a[k];
                V(j, i) = a[k];
            }
        return V;
    }

    /// Coordinates of the linear functional V -> w^T V w as a gradient in z.
    VectorXd quadratic_gradient(const VectorXd& w) const
    {
        VectorXd h(size());
        Eigen::Index k = 0;
        for (Eigen::Index i = 0; i < d_; ++i)
            for (Eigen::Index j = i; j < d_; ++j, ++k)
                h[k] = i == j ? w[i] * w[i] : 2.0 * w[i] * w[j];
        // lambda = a . h and a = L^{-T} z, so d lambda / dz = L^{-1} h.
        return L_.triangularView<Eigen::Lower>().solve(h);
    }

private:
    Eigen::Index d_;
    MatrixXd L_;
};

namespace detail {

/// Feasible set {V : V + I PSD} seen from an anchor Vbar, in SymCoordinates.
/// The anchor I + Vbar is relaxed by tol * I so the set has interior.
class PsdCone {
public:
    struct Interval {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        VectorXd w_lo;  ///< A^{-1/2} u for the eigenvector setting lo
        VectorXd w_hi;
        double lambda_lo = 0.0;
        double lambda_hi = 0.0;
    };

    class Projector {
    public:
        Projector(const PsdCone& cone, MatrixXd basis)
            : cone_(&cone)
            , basis_(std::move(basis))
        {
            for (Eigen::Index j = 0; j < basis_.cols(); ++j)
                phis_.push_back(cone_->coords_->to_matrix(basis_.col(j)));
            if (basis_.cols() == 1)
                line_ = cone_->interval(basis_.col(0));
        }

        QpResult operator()(const VectorXd& p, const QpOptions& opts) const
        {
            QpResult r;
            if (basis_.cols() == 1) {
                r.t = VectorXd::Constant(1, std::clamp(p[0], line_.lo, line_.hi));
                return r;
            }
            if (feasible(p)) {
                r.t = p;
                return r;
            }
            return barrier(p, opts);
        }

    private:
        MatrixXd slack(const VectorXd& t) const
        {
            MatrixXd S = cone_->anchor_;
            for (Eigen::Index j = 0; j < t.size(); ++j)
                S += t[j] * phis_[static_cast<std::size_t>(j)];
            return S;
        }

        bool feasible(const VectorXd& t) const
        {
            Eigen::LLT<MatrixXd> llt(slack(t));
            return llt.info() == Eigen::Success;
        }

        /// Damped Newton on |t - p|^2 / 2 - mu log det(slack(t)) for a
        /// decreasing sequence of mu, started at the interior point t = 0.
        QpResult barrier(const VectorXd& p, const QpOptions& opts) const
        {
            const Eigen::Index M = p.size();
            VectorXd t = VectorXd::Zero(M);
            const double scale = std::max(1.0, p.norm());
            double mu = 0.1 * scale * scale;
            int iters = 0;
            auto value = [&](const VectorXd& x, double mu_) {
                Eigen::LLT<MatrixXd> llt(slack(x));
                if (llt.info() != Eigen::Success)
                    return std::numeric_limits<double>::infinity();
                const MatrixXd& Lm = llt.matrixL();
                return 0.5 * (x - p).squaredNorm() - 2.0 * mu_ * Lm.diagonal().array().log().sum();
            };
            while (mu > 1e-3 * opts.tol * opts.tol * scale * scale) {
                for (int k = 0; k < 50 && iters < 50 * opts.max_iter; ++k, ++iters) {
                    const MatrixXd Sinv = slack(t).inverse();
                    VectorXd g = t - p;
                    MatrixXd H = MatrixXd::Identity(M, M);
                    std::vector<MatrixXd> SP(static_cast<std::size_t>(M));
                    for (Eigen::Index j = 0; j < M; ++j) {
                        SP[static_cast<std::size_t>(j)] = Sinv * phis_[static_cast<std::size_t>(j)];
                        g[j] -= mu * SP[static_cast<std::size_t>(j)].trace();
                    }
                    for (Eigen::Index j = 0; j < M; ++j)
                        for (Eigen::Index l = j; l < M; ++l)
                            H(j, l) = H(l, j) = H(j, l) + mu * (SP[static_cast<std::size_t>(j)] *
                                                                SP[static_cast<std::size_t>(l)])
                                                                   .trace();
                    const VectorXd step = H.ldlt().solve(-g);
                    const double decrement = -g.dot(step);
                    if (decrement <= 1e-30 * scale * scale)
                        break;
                    const double f0 = value(t, mu);
                    double a = 1.0;
                    bool moved = false;
                    while (a > 1e-12) {
                        const VectorXd cand = t + a * step;
                        const double f1 = value(cand, mu);
                        if (f1 <= f0 - 0.25 * a * decrement) {
                            t = cand;
                            moved = true;
                            break;
                        }
                        a *= 0.5;
                    }
                    if (!moved)
                        break;
                }
                mu *= 0.1;
            }
            QpResult r;
            r.t = t;
            r.iterations = iters;
            // Central-path duality gap: d * mu for the last barrier weight.
            r.kkt_residual = static_cast<double>(cone_->anchor_.rows()) * mu * 10.0 / (scale * scale);
            r.converged = r.kkt_residual <= std::max(opts.tol, 1e-12);
            return r;
        }

        const PsdCone* cone_;
        MatrixXd basis_;
        std::vector<MatrixXd> phis_;
        Interval line_;
    };

    PsdCone(const SymCoordinates& coords, const MatrixXd& anchor_tangent, double tol = 1e-10)
        : coords_(&coords)
    {
        const Eigen::Index d = coords.matrix_dim();
        anchor_ = anchor_tangent + MatrixXd::Identity(d, d);
        anchor_ = 0.5 * (anchor_ + anchor_.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(anchor_);
        const double relax = tol * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
        anchor_ += relax * MatrixXd::Identity(d, d);
        eig.compute(anchor_);
        if (!(eig.eigenvalues().minCoeff() > 0.0))
            fail(ErrorCode::InvalidArgument, "anchor lies outside the cone");
        const MatrixXd& U = eig.eigenvectors();
        inv_root_ = U * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * U.transpose();
    }

    Interval interval(const VectorXd& phi) const
    {
        const MatrixXd B = inv_root_ * coords_->to_matrix(phi) * inv_root_;
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (B + B.transpose()));
        const VectorXd& ev = eig.eigenvalues();
        Interval iv;
        const Eigen::Index d = ev.size();
        if (ev[0] < 0.0) {
            iv.hi = -1.0 / ev[0];
            iv.lambda_hi = ev[0];
            iv.w_hi = inv_root_ * eig.eigenvectors().col(0);
        }
        if (ev[d - 1] > 0.0) {
            iv.lo = -1.0 / ev[d - 1];
            iv.lambda_lo = ev[d - 1];
            iv.w_lo = inv_root_ * eig.eigenvectors().col(d - 1);
        }
        return iv;
    }

    void add_interval_gradient(const VectorXd& /*phi*/, const Interval& iv, double c_lo, double c_hi,
                               VectorXd& grad) const
    {
        // bound = -1 / lambda, so d bound = d lambda / lambda^2.
        if (c_hi != 0.0 && iv.w_hi.size() > 0)
            grad += c_hi / (iv.lambda_hi * iv.lambda_hi) * coords_->quadratic_gradient(iv.w_hi);
        if (c_lo != 0.0 && iv.w_lo.size() > 0)
            grad += c_lo / (iv.lambda_lo * iv.lambda_lo) * coords_->quadratic_gradient(iv.w_lo);
    }

    Projector projector(const MatrixXd& basis) const { return Projector(*this, basis); }

private:
    const SymCoordinates* coords_;
    MatrixXd anchor_;
    MatrixXd inv_root_;
};

}  // namespace detail

/// Convex PCA of covariance logs in whitened coordinates.
struct GaussPcaModel {
    VectorXd mean;       ///< coordinates of the mean tangent matrix
    MatrixXd basis;      ///< D x M orthonormal directions
    double tv = 0.0;
    std::vector<double> ev;
    MatrixXd scores;     ///< n x M constrained training scores
};

namespace detail {

class GaussFitter {
public:
    GaussFitter(const SymCoordinates& coords, const ConvexPcaOptions& opts)
        : coords_(&coords)
        , opts_(opts)
    {}

    struct Fit {
        VectorXd mean;
        std::optional<PsdCone> cone;
        MatrixXd basis;
        std::optional<PsdCone::Projector> projector;
        std::vector<double> ev;
        MatrixXd scores;
        double tv = 0.0;
    };

    /// Rows of Z are coordinates; fits up to M directions (fewer when the
    /// data carry less variation, or when `tau` is reached).
    std::unique_ptr<Fit> fit(const MatrixXd& Z, std::size_t M, bool diagnostics,
                             std::optional<double> tau = std::nullopt, const MatrixXd* warm = nullptr) const
    {
        ConvexPcaOptions opts = opts_;
        if (warm)
            opts.warm_start = *warm;
        auto out = std::make_unique<Fit>();
        out->mean = Z.colwise().mean().transpose();
        const MatrixXd centered = Z.rowwise() - out->mean.transpose();
        out->cone.emplace(*coords_, coords_->to_matrix(out->mean));
        const auto dims = std::min<std::size_t>(
            {M, static_cast<std::size_t>(std::max<Eigen::Index>(Z.rows() - 1, 0)),
             static_cast<std::size_t>(Z.cols())});
        DirectionSearch<PsdCone> search(centered, 1.0, *out->cone, opts);
        out->tv = search.total_variation();
        if (out->tv >= 1e-14) {
            for (std::size_t j = 1; j <= dims; ++j) {
                try {
                    search.add_direction();
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::DegenerateData)
                        throw;
                    break;
                }
                if (diagnostics || tau) {
                    const MatrixXd s = constrained_scores(centered, 1.0, *out->cone, search.directions(),
                                                          static_cast<Eigen::Index>(j), opts);
                    out->ev.push_back(std::clamp(s.rowwise().squaredNorm().mean() / out->tv, 0.0, 1.0));
                    out->scores = s;
                    if (tau && out->ev.back() >= *tau)
                        break;
                }
            }
        }
        out->basis = search.directions();
        if (out->basis.cols() > 0)
            out->projector.emplace(*out->cone, out->basis);
        return out;
    }

    /// Projection of z onto the fitted component, in coordinates.
    VectorXd project(const Fit& f, const VectorXd& z) const
    {
        if (f.basis.cols() == 0)
            return f.mean;
        const VectorXd p = f.basis.transpose() * (z - f.mean);
        const QpResult r = (*f.projector)(p, QpOptions{opts_.tol, opts_.max_iter});
        if (!r.converged)
            fail(ErrorCode::SolverFailure, "PSD score projection did not converge");
        return f.mean + f.basis * r.t;
    }

private:
    const SymCoordinates* coords_;
    ConvexPcaOptions opts_;
};

class GaussSpace {
public:
    GaussSpace(const SymCoordinates& coords, MatrixXd Z, const ConvexPcaOptions& opts)
        : fitter_(coords, opts)
        , z_(std::move(Z))
    {}

    std::size_t size() const { return static_cast<std::size_t>(z_.rows()); }

    std::shared_ptr<GaussFitter::Fit> fit(const std::vector<std::size_t>& members, std::size_t M) const
    {
        MatrixXd sub(static_cast<Eigen::Index>(members.size()), z_.cols());
        for (std::size_t r = 0; r < members.size(); ++r)
            sub.row(static_cast<Eigen::Index>(r)) = z_.row(static_cast<Eigen::Index>(members[r]));
        return fitter_.fit(sub, M, false);
    }

    std::shared_ptr<GaussFitter::Fit> fit(const std::vector<std::size_t>& members, std::size_t M,
                                          const std::shared_ptr<GaussFitter::Fit>& hint) const
    {
        MatrixXd sub(static_cast<Eigen::Index>(members.size()), z_.cols());
        for (std::size_t r = 0; r < members.size(); ++r)
            sub.row(static_cast<Eigen::Index>(r)) = z_.row(static_cast<Eigen::Index>(members[r]));
        return fitter_.fit(sub, M, false, std::nullopt, &hint->basis);
    }

    double distance(const std::shared_ptr<GaussFitter::Fit>& f, std::size_t i) const
    {
        const VectorXd z = z_.row(static_cast<Eigen::Index>(i)).transpose();
        return (z - fitter_.project(*f, z)).norm();
    }

private:
    GaussFitter fitter_;
    MatrixXd z_;
};

}  // namespace detail

struct GaussKCentresConfig {
    std::size_t K = 2;
    /// Dimension of the cluster models; 0 picks the smallest M reaching tau.
    std::size_t M = 1;
    double tau = 0.9;
    int max_outer_iters = 20;
    bool loo = true;
    std::size_t min_cluster_size = 0;
    std::uint64_t seed = 0;
    KMeansOptions kmeans{};
    ConvexPcaOptions pca{};
};

struct GaussKCentresResult {
    std::vector<int> labels;
    std::vector<int> kmeans_labels;
    std::size_t M = 0;
    std::vector<double> selection_ev;
    Covariance reference{MatrixXd::Identity(1, 1)};
    GaussMeanResult reference_fit{Covariance(MatrixXd::Identity(1, 1))};
    std::vector<Covariance> cluster_means;
    KCentresTrace trace;
};

/// k-centres clustering of covariance matrices: logs at the Bures mean,
/// convex PCA under V + I PSD, k-means on scores, LOO reclassification by
/// the tangent distance to each cluster's component.
inline GaussKCentresResult gauss_kcentres(std::span<const Covariance> Ss, const GaussKCentresConfig& cfg)
{
    if (Ss.empty())
        fail(ErrorCode::EmptyInput, "no covariances");
    if (cfg.K < 1)
        fail(ErrorCode::InvalidArgument, "K must be at least 1");
    const Eigen::Index d = Ss.front().dim();
    const auto D = static_cast<std::size_t>(d * (d + 1) / 2);
    if (cfg.M > D)
        fail(ErrorCode::DimensionTooLarge, "M exceeds d(d+1)/2 = " + std::to_string(D));

    GaussKCentresResult out;
    out.reference_fit = gauss_frechet_mean(Ss);
    out.reference = out.reference_fit.mean;
    const auto roots = detail::reference_roots(out.reference);
    const SymCoordinates coords(out.reference);
    MatrixXd Z(static_cast<Eigen::Index>(Ss.size()), static_cast<Eigen::Index>(D));
    for (std::size_t i = 0; i < Ss.size(); ++i) {
        require_same_dim(Ss.front(), Ss[i]);
        Z.row(static_cast<Eigen::Index>(i)) = coords.to_coords(detail::log_with_roots(roots, Ss[i].matrix())).transpose();
    }

    ConvexPcaOptions po = cfg.pca;
    detail::GaussFitter fitter(coords, po);
    const std::size_t cap = cfg.M ? cfg.M : std::min(D, Ss.size() >= 2 ? Ss.size() - 2 : std::size_t{1});
    auto pooled = fitter.fit(Z, std::max<std::size_t>(cap, 1), true,
                             cfg.M ? std::nullopt : std::optional<double>(cfg.tau));
    if (pooled->basis.cols() == 0)
        fail(ErrorCode::DegenerateData, "covariances carry no variation");
    out.M = static_cast<std::size_t>(pooled->basis.cols());
    out.selection_ev = pooled->ev;
    const std::size_t floor = cfg.min_cluster_size ? cfg.min_cluster_size : default_min_cluster_size(out.M);
    if (Ss.size() < cfg.K * floor)
        fail(ErrorCode::TooFewPoints, "need at least K * " + std::to_string(floor) + " covariances");

    std::vector<int> labels(Ss.size(), 0);
    if (cfg.K > 1) {
        KMeansOptions km = cfg.kmeans;
        km.seed = cfg.seed;
        const KMeansResult res = kmeans(pooled->scores, static_cast<int>(cfg.K), km);
        labels = res.labels;
        out.kmeans_labels = labels;
        detail::repair_small_clusters(labels, cfg.K, floor, [&](std::size_t i, std::size_t c) {
            return (pooled->scores.row(static_cast<Eigen::Index>(i)) - res.centers.row(static_cast<Eigen::Index>(c)))
                .squaredNorm();
        });
    } else {
        out.kmeans_labels = labels;
    }

    detail::GaussSpace space(coords, Z, po);
    KCentresOptions ko;
    ko.max_outer_iters = cfg.max_outer_iters;
    ko.loo = cfg.loo;
    ko.min_cluster_size = floor;
    out.trace = kcentres_iterate(space, labels, cfg.K, out.M, ko);
    out.labels = out.trace.labels;

    const auto members = detail::members_of(out.labels, cfg.K);
    for (std::size_t c = 0; c < cfg.K; ++c) {
        std::vector<Covariance> sub;
        for (std::size_t i : members[c])
            sub.push_back(Ss[i]);
        out.cluster_means.push_back(sub.empty() ? out.reference : gauss_frechet_mean(sub).mean);
    }
    return out;
}

inline GaussKCentresResult gauss_kcentres(const std::vector<Covariance>& Ss, const GaussKCentresConfig& cfg)
{
    return gauss_kcentres(std::span<const Covariance>(Ss), cfg);
}

}  // namespace wkcc

#endif  // WKCC_GAUSSIAN_HPP
