#ifndef WKCC_THEORY_HPP
#define WKCC_THEORY_HPP

// Monte Carlo checks of the correct-membership probabilities for two
// clusters, in J-dimensional score coordinates. The directions of cluster c
// are the standard basis e_1..e_J and its scores are independent
// N(0, Var_j).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "wkcc/error.hpp"
#include "wkcc/normal.hpp"
#include "wkcc/parallel.hpp"
#include "wkcc/random.hpp"

namespace wkcc {

struct TheorySpec {
    /// Var(xi_1) >= ... >= Var(xi_J) >= 0; J is the length.
    std::vector<double> variances{1.0, 1.0};
    /// Common-mean case: 1-based index with rho_ell^(c) = rho_1^(d).
    std::size_t ell = 2;
    /// Common-covariance case: m^(c) - m^(d) in the basis e_1..e_J.
    std::vector<double> mean_difference;
    std::size_t draws = 100000;
    std::uint64_t seed = 0;
};

struct TheoryResult {
    double mc_probability = 0.0;
    /// Closed form (common mean) or lower bound (common covariance).
    double reference = 0.0;
    double standard_error = 0.0;
    std::size_t draws = 0;
    /// Mean difference lies in span{rho_1}: the two cluster models coincide.
    bool non_identifiable = false;
};

namespace detail {

inline void check_variances(const std::vector<double>& v)
{
    if (v.empty())
        fail(ErrorCode::SpecError, "need at least one variance");
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (!(v[j] >= 0.0) || !std::isfinite(v[j]))
            fail(ErrorCode::SpecError, "variances must be finite and nonnegative");
        if (j > 0 && v[j] > v[j - 1])
            fail(ErrorCode::SpecError, "variances must be non-increasing");
    }
    if (!(v[0] > 0.0))
        fail(ErrorCode::SpecError, "the first variance must be positive");
}

/// Fraction of Gaussian score draws satisfying `event`, where event returns
/// 1 for a hit, 0.5 for a tie and 0 otherwise. Draws are split into fixed
/// batches with their own streams, so the estimate is thread-count free.
template <class Event>
double monte_carlo(const std::vector<double>& variances, std::size_t draws, std::uint64_t seed, const Event& event)
{
    constexpr std::size_t batch = 8192;
    const std::size_t batches = (draws + batch - 1) / batch;
    std::vector<double> hits(batches, 0.0);
    const std::size_t J = variances.size();
    parallel_for(batches, [&](std::size_t b) {
        Rng rng = make_rng({seed, static_cast<std::uint64_t>(b), 0x7e0ULL});
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::VectorXd xi(static_cast<Eigen::Index>(J));
        const std::size_t end = std::min(draws, (b + 1) * batch);
        double h = 0.0;
        for (std::size_t t = b * batch; t < end; ++t) {
            for (std::size_t j = 0; j < J; ++j)
                xi[static_cast<Eigen::Index>(j)] = std::sqrt(variances[j]) * gauss(rng);
            h += event(xi);
        }
        hits[b] = h;
    });
    double total = 0.0;
    for (double h : hits)
        total += h;
    return total / static_cast<double>(draws);
}

inline double binomial_se(double p, std::size_t draws)
{
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(draws));
}

}  // namespace detail

/// Same mean, rho_1^(d) = e_ell. The correct-membership event is that
/// <g - m, rho_1^(c) + rho_1^(d)> and <g - m, rho_1^(c) - rho_1^(d)> share a
/// strict sign; its Gaussian probability is
/// 0.5 + arcsin((Var_1 - Var_ell) / (Var_1 + Var_ell)) / pi.
inline TheoryResult theory_mc_common_mean(const TheorySpec& spec)
{
    detail::check_variances(spec.variances);
    if (spec.ell < 2 || spec.ell > spec.variances.size())
        fail(ErrorCode::SpecError, "ell must lie in 2..J");
    if (spec.draws == 0)
        fail(ErrorCode::SpecError, "draws must be positive");
    const auto l = static_cast<Eigen::Index>(spec.ell - 1);
    const double v1 = spec.variances[0];
    const double vl = spec.variances[spec.ell - 1];
    TheoryResult r;
    r.draws = spec.draws;
    r.mc_probability = detail::monte_carlo(spec.variances, spec.draws, spec.seed, [l](const Eigen::VectorXd& xi) {
        const double a = xi[0] + xi[l];
        const double b = xi[0] - xi[l];
        return (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0) ? 1.0 : 0.0;
    });
    r.reference = 0.5 + std::asin((v1 - vl) / (v1 + vl)) / std::numbers::pi;
    r.standard_error = detail::binomial_se(r.mc_probability, spec.draws);
    return r;
}

/// Common directions e_j, different means. The event is
/// <g - m^(c), psi> > <dm, e_1>^2 - |dm|^2 with
/// psi = 2 dm - 2 <dm, e_1> e_1. Ties (which occur surely when dm is in
/// span{e_1}) count one half. Lower bound Phi(|dm| / (2 sqrt(Var_1))).
inline TheoryResult theory_mc_common_cov(const TheorySpec& spec)
{
    detail::check_variances(spec.variances);
    if (spec.draws == 0)
        fail(ErrorCode::SpecError, "draws must be positive");
    const std::size_t J = spec.variances.size();
    if (spec.mean_difference.size() != J)
        fail(ErrorCode::SpecError, "mean difference must have J = " + std::to_string(J) + " coordinates");
    Eigen::VectorXd dm(static_cast<Eigen::Index>(J));
    for (std::size_t j = 0; j < J; ++j) {
        if (!std::isfinite(spec.mean_difference[j]))
            fail(ErrorCode::SpecError, "mean difference must be finite");
        dm[static_cast<Eigen::Index>(j)] = spec.mean_difference[j];
    }
    Eigen::VectorXd psi = 2.0 * dm;
    psi[0] = 0.0;
    const double norm = dm.norm();
    const double threshold = dm[0] * dm[0] - norm * norm;
    TheoryResult r;
    r.draws = spec.draws;
    r.non_identifiable = norm > 0.0 && dm.tail(dm.size() - 1).norm() <= 1e-12 * norm;
    r.mc_probability = detail::monte_carlo(spec.variances, spec.draws, spec.seed,
                                           [&psi, threshold](const Eigen::VectorXd& xi) {
                                               const double s = xi.dot(psi);
                                               return s > threshold ? 1.0 : (s == threshold ? 0.5 : 0.0);
                                           });
    r.reference = normal_cdf(norm / (2.0 * std::sqrt(spec.variances[0])));
    r.standard_error = detail::binomial_se(r.mc_probability, spec.draws);
    return r;
}

}  // namespace wkcc

#endif  // WKCC_THEORY_HPP
