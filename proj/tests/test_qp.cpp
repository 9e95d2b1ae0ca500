#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "wkcc/qp.hpp"
#include "wkcc/random.hpp"

using namespace wkcc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Oracle: enumerate active sets of size <= dim, keep the feasible
// candidate with nonnegative multipliers.
VectorXd brute_force_projection(const MatrixXd& A, const VectorXd& b, const VectorXd& p)
{
    const Eigen::Index rows = A.rows();
    const Eigen::Index dim = A.cols();
    VectorXd best;
    double best_dist = INFINITY;
    for (unsigned mask = 0; mask < (1u << rows); ++mask) {
        std::vector<Eigen::Index> S;
        for (Eigen::Index r = 0; r < rows; ++r)
            if (mask & (1u << r))
                S.push_back(r);
        if (static_cast<Eigen::Index>(S.size()) > dim)
            continue;
        VectorXd x = p;
        VectorXd lam = VectorXd::Zero(static_cast<Eigen::Index>(S.size()));
        if (!S.empty()) {
            MatrixXd As(static_cast<Eigen::Index>(S.size()), dim);
            VectorXd bs(static_cast<Eigen::Index>(S.size()));
            for (std::size_t i = 0; i < S.size(); ++i) {
                As.row(static_cast<Eigen::Index>(i)) = A.row(S[i]);
                bs[static_cast<Eigen::Index>(i)] = b[S[i]];
            }
            const MatrixXd G = As * As.transpose();
            if (std::abs(G.determinant()) < 1e-12)
                continue;
            lam = G.ldlt().solve(As * p - bs);
            x = p - As.transpose() * lam;
        }
        if ((A * x - b).maxCoeff() > 1e-10 || (lam.size() > 0 && lam.minCoeff() < -1e-10))
            continue;
        const double dist = (x - p).norm();
        if (dist < best_dist) {
            best_dist = dist;
            best = x;
        }
    }
    return best;
}

}  // namespace

TEST(Qp, FeasiblePointIsReturned)
{
    const MatrixXd A = MatrixXd::Identity(2, 2);
    const VectorXd b = VectorXd::Ones(2);
    const VectorXd p{{0.3, -4.0}};
    const QpResult r = project_onto_polyhedron(A, b, p);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.t, p);
}

TEST(Qp, BoxProjectionIsClamping)
{
    MatrixXd A(4, 2);
    A << 1, 0, 0, 1, -1, 0, 0, -1;
    const VectorXd b{{1.0, 2.0, 1.0, 0.5}};
    const QpResult r = project_onto_polyhedron(A, b, VectorXd{{3.0, -2.0}});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.t[0], 1.0, 1e-12);
    EXPECT_NEAR(r.t[1], -0.5, 1e-12);
}

TEST(Qp, MatchesActiveSetEnumeration)
{
    Rng rng = make_rng({21});
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> slack(0.1, 1.0);
    for (int t = 0; t < 200; ++t) {
        const Eigen::Index dim = 2 + t % 2;
        const Eigen::Index rows = 3 + t % 5;
        MatrixXd A(rows, dim);
        VectorXd b(rows);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < dim; ++c)
                A(r, c) = z(rng);
            b[r] = slack(rng);  // origin strictly feasible
        }
        VectorXd p(dim);
        for (Eigen::Index c = 0; c < dim; ++c)
            p[c] = 3.0 * z(rng);
        const QpResult r = project_onto_polyhedron(A, b, p);
        ASSERT_TRUE(r.converged);
        const VectorXd oracle = brute_force_projection(A, b, p);
        ASSERT_EQ(oracle.size(), dim);
        EXPECT_LE((r.t - oracle).norm(), 1e-9) << "case " << t;
        EXPECT_LE((A * r.t - b).maxCoeff(), 1e-9);
    }
}
