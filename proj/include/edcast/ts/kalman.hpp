#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace edcast::ts {

/// Univariate linear Gaussian state space model
///   y_t = Z a_t + e_t,         e_t ~ N(0, H)
///   a_{t+1} = T a_t + u_t,     u_t ~ N(0, Q)
struct StateSpace {
    Eigen::MatrixXd T;
    Eigen::RowVectorXd Z;
    Eigen::MatrixXd Q;
    double H = 0.0;
};

struct KalmanOptions {
    bool store_path = false;          // keep every filtered mean a_{t|t}
    bool track_min_eigenvalue = false;
    std::size_t burn_in = 0;          // innovations excluded from the likelihood
};

struct KalmanResult {
    Eigen::VectorXd filtered_mean;  // a_{n|n}
    Eigen::MatrixXd filtered_cov;   // P_{n|n}
    std::vector<Eigen::VectorXd> path;
    std::vector<double> innovations;
    std::vector<double> innovation_vars;
    double loglik = 0.0;            // Gaussian log-likelihood over post-burn-in innovations
    double min_eigenvalue = std::numeric_limits<double>::infinity();
};

/// Filters y starting from the prior a_1 ~ N(a0, P0). Covariance updates use
/// the Joseph form and are symmetrized after every step.
KalmanResult kalman_filter(const StateSpace& model, std::span<const double> y,
                           const Eigen::VectorXd& a0, const Eigen::MatrixXd& P0,
                           const KalmanOptions& options = {});

/// Mean of y_{n+h} given the filtered state at n.
double kalman_forecast(const StateSpace& model, const Eigen::VectorXd& filtered_mean, int h);

} // namespace edcast::ts
