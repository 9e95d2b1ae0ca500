#ifndef WKCC_QP_HPP
#define WKCC_QP_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Dense>

namespace wkcc {

struct QpOptions {
    double tol = 1e-9;
    int max_iter = 200;
};

struct QpResult {
    Eigen::VectorXd t;
    int iterations = 0;
    double kkt_residual = 0.0;
    bool converged = true;
};

/// Euclidean projection of p onto {t : A t <= b}:
///
///     minimize 0.5 |t - p|^2  subject to  A t <= b.
///
/// Primal active-set method started from the feasible point t0 (t = 0 when
/// omitted, which requires b >= 0). If p itself is feasible it is returned
/// unchanged. The KKT residual combines stationarity, primal and dual
/// feasibility, scaled by max(1, |p|).
inline QpResult project_onto_polyhedron(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                        const Eigen::VectorXd& p, const QpOptions& opts = {},
                                        const Eigen::VectorXd* t0 = nullptr)
{
    using Eigen::Index;
    using Eigen::MatrixXd;
    using Eigen::VectorXd;

    const Index rows = A.rows();
    const Index dim = A.cols();
    const double scale = std::max(1.0, p.norm());

    QpResult result;
    if (rows == 0 || (A * p - b).maxCoeff() <= 0.0) {
        result.t = p;
        return result;
    }

    VectorXd t = t0 ? *t0 : VectorXd::Zero(dim);
    std::vector<Index> working;
    std::vector<char> in_working(static_cast<std::size_t>(rows), 0);
    VectorXd lambda;

    // Minimizer of |x - p| on {A_W x = b_W}, with multipliers.
    auto solve_eqp = [&](VectorXd& x, VectorXd& lam) {
        if (working.empty()) {
            x = p;
            lam.resize(0);
            return;
        }
        const Index w = static_cast<Index>(working.size());
        MatrixXd aw(w, dim);
        VectorXd bw(w);
        for (Index r = 0; r < w; ++r) {
            aw.row(r) = A.row(working[static_cast<std::size_t>(r)]);
            bw[r] = b[working[static_cast<std::size_t>(r)]];
        }
        const MatrixXd gram = aw * aw.transpose();
        lam = gram.completeOrthogonalDecomposition().solve(aw * p - bw);
        x = p - aw.transpose() * lam;
    };

    int iter = 0;
    bool done = false;
    for (; iter < opts.max_iter; ++iter) {
        VectorXd target;
        solve_eqp(target, lambda);
        VectorXd d = target - t;
        if (d.norm() <= opts.tol * scale) {
            if (lambda.size() == 0 || lambda.minCoeff() >= -opts.tol * scale) {
                t = target;
                done = true;
                break;
            }
            Index drop = 0;
            lambda.minCoeff(&drop);
            in_working[static_cast<std::size_t>(working[static_cast<std::size_t>(drop)])] = 0;
            working.erase(working.begin() + drop);
            continue;
        }

        double step = 1.0;
        Index blocking = -1;
        const VectorXd ad = A * d;
        const VectorXd slack = b - A * t;
        for (Index k = 0; k < rows; ++k) {
            if (in_working[static_cast<std::size_t>(k)] || ad[k] <= 1e-15 * scale)
                continue;
            const double alpha = std::max(0.0, slack[k]) / ad[k];
            if (alpha < step) {
                step = alpha;
                blocking = k;
            }
        }
        t += step * d;
        if (blocking >= 0) {
            working.push_back(blocking);
            in_working[static_cast<std::size_t>(blocking)] = 1;
        }
    }

    // Final KKT check at t with the current working-set multipliers.
    double residual = std::max(0.0, (A * t - b).maxCoeff());
    if (!working.empty()) {
        VectorXd target;
        solve_eqp(target, lambda);
        VectorXd grad = t - p;
        for (std::size_t r = 0; r < working.size(); ++r)
            grad += lambda[static_cast<Index>(r)] * A.row(working[r]).transpose();
        residual = std::max(residual, grad.norm());
        residual = std::max(residual, std::max(0.0, -lambda.minCoeff()));
    } else {
        residual = std::max(residual, (t - p).norm());
    }
    result.t = std::move(t);
    result.iterations = iter;
    result.kkt_residual = residual / scale;
    result.converged = done && result.kkt_residual <= std::max(opts.tol, 1e-12);
    return result;
}

}  // namespace wkcc

#endif  // WKCC_QP_HPP
