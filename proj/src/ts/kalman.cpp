#include "edcast/ts/kalman.hpp"

#include "edcast/core/errors.hpp"

#include <cmath>
#include <numbers>

namespace edcast::ts {

KalmanResult kalman_filter(const StateSpace& m, std::span<const double> y, const Eigen::VectorXd& a0,
                           const Eigen::MatrixXd& P0, const KalmanOptions& opt) {
    const auto r = m.T.rows();
    if (m.T.cols() != r || m.Z.size() != r || m.Q.rows() != r || m.Q.cols() != r ||
        a0.size() != r || P0.rows() != r || P0.cols() != r) {
        throw ContractViolation("state space dimensions do not agree");
    }
    KalmanResult res;
    Eigen::VectorXd a = a0;
    Eigen::MatrixXd P = P0;
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(r, r);
    res.innovations.reserve(y.size());
    res.innovation_vars.reserve(y.size());
    if (opt.store_path) res.path.reserve(y.size());
    double sum_log_f = 0.0, sum_v2_f = 0.0;
    std::size_t used = 0;

    for (std::size_t t = 0; t < y.size(); ++t) {
        const double v = y[t] - m.Z.dot(a);
        Eigen::VectorXd PZ = P * m.Z.transpose();
        const double F = m.Z.dot(PZ) + m.H;
        res.innovations.push_back(v);
        res.innovation_vars.push_back(F);
        if (F > 0.0) {
            Eigen::VectorXd K = PZ / F;
            a += K * v;
            Eigen::MatrixXd IKZ = I - K * m.Z;
            P = IKZ * P * IKZ.transpose() + (K * K.transpose()) * m.H;
            P = 0.5 * (P + P.transpose());
            if (t >= opt.burn_in) {
                sum_log_f += std::log(F);
                sum_v2_f += v * v / F;
                ++used;
            }
        }
        if (opt.store_path) res.path.push_back(a);
        if (opt.track_min_eigenvalue) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P, Eigen::EigenvaluesOnly);
            res.min_eigenvalue = std::min(res.min_eigenvalue, es.eigenvalues().minCoeff());
        }
        if (t + 1 == y.size()) break;
        a = m.T * a;
        P = m.T * P * m.T.transpose() + m.Q;
        P = 0.5 * (P + P.transpose());
        if (opt.track_min_eigenvalue) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P, Eigen::EigenvaluesOnly);
            res.min_eigenvalue = std::min(res.min_eigenvalue, es.eigenvalues().minCoeff());
        }
    }
    res.filtered_mean = a;
    res.filtered_cov = P;
    res.loglik = -0.5 * (static_cast<double>(used) * std::log(2.0 * std::numbers::pi) + sum_log_f + sum_v2_f);
    return res;
}

double kalman_forecast(const StateSpace& m, const Eigen::VectorXd& filtered_mean, int h) {
    if (h < 1) throw ContractViolation("forecast horizon must be >= 1");
    Eigen::VectorXd a = filtered_mean;
    for (int k = 0; k < h; ++k) a = m.T * a;
    return m.Z.dot(a);
}

} // namespace edcast::ts
