#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>

#include "mml/space.hpp"

namespace mml {

constexpr double kInfRadius = std::numeric_limits<double>::infinity();

// M_{s,delta} f(x) = sup_{0 < r < delta} r^s * average of |f| over B(x,r).
// s = 0, delta = R is the centered maximal function M_R.
Eigen::VectorXd fractional_maximal(const MetricMeasureSpace& s,
                                   const Eigen::VectorXd& f, double exp_s,
                                   double delta);

// Uncentered: sup over all balls containing x with radius <= R.
Eigen::VectorXd uncentered_maximal(const MetricMeasureSpace& s,
                                   const Eigen::VectorXd& f, double R);

// N_{p,R}(V) = sup over centers and radii r < R of (r^{2p} avg_B V^p)^{1/p}.
double morrey_norm(const MetricMeasureSpace& s, const Eigen::VectorXd& V,
                   double p, double R = kInfRadius);

// phi-weighted maximal: sup over balls B containing x with r(B) < delta of
// phi(B) * integral of |f| over B. phi receives (center, radius, members).
using BallFunctional =
    std::function<double(int, double, const std::vector<int>&)>;
Eigen::VectorXd phi_maximal(const MetricMeasureSpace& s,
                            const BallFunctional& phi, const Eigen::VectorXd& f,
                            double delta);

// Empirical lower bound on the mu-weighted Lp operator norm over a seeded
// corpus of test functions (constants, point masses, ball indicators,
// Gaussians).
double empirical_lp_opnorm(
    const MetricMeasureSpace& s,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
    double p, int trials, std::uint64_t seed);

}  // namespace mml
