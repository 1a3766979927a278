#pragma once
// Two-layer sigmoidal network with continuous-time tuning laws and the
// torque composition of the tracking controller.

#include <Eigen/Dense>
#include <cstdint>

#include "mann/dynamics.hpp"

namespace mann {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Size of the network input [e, edot, s, sdot, sddot] for a two-link arm.
inline constexpr int kInputSize = 10;

struct NetworkParams {
  MatrixXd W;                       // N x 2 output weights
  Vector2d b_w = Vector2d::Zero();  // output bias
  MatrixXd V;                       // 10 x N input weights
  VectorXd b_v;                     // N hidden bias

  int hidden() const { return static_cast<int>(b_v.size()); }

  static NetworkParams zeros(int hidden);
  // V, b_v uniform on [-spread, spread]; W, b_w zero.
  static NetworkParams initialize(int hidden, std::uint64_t seed,
                                  double spread = 0.1);
};

struct NetworkDerivative {
  MatrixXd W;
  Vector2d b_w = Vector2d::Zero();
  MatrixXd V;
  VectorXd b_v;
};

struct ControllerGains {
  double Kv = 20.0;
  double kv = 10.0;
  double kappa = 0.0;
  double Cw = 10.0;
  double Cv = 10.0;
  Matrix2d Lambda = 5.0 * Matrix2d::Identity();
  double Zm = 10.0;

  void validate() const;
};

struct ErrorState {
  Vector2d e = Vector2d::Zero();
  Vector2d edot = Vector2d::Zero();
  Vector2d r = Vector2d::Zero();
  Eigen::Matrix<double, kInputSize, 1> x_tilde =
      Eigen::Matrix<double, kInputSize, 1>::Zero();
  // h_e = r^T; kept as a row for the tuning-law products.
  Eigen::RowVector2d h_e = Eigen::RowVector2d::Zero();
};

ErrorState error_state(const PlantState& plant, const ReferenceSample& ref,
                       const ControllerGains& gains);

VectorXd pre_activation(const NetworkParams& net, const VectorXd& x_tilde);
VectorXd hidden_layer(const NetworkParams& net, const VectorXd& x_tilde);

// [sigma; 1]
VectorXd sigma_hat(const NetworkParams& net, const VectorXd& x_tilde);
// [diag(sigma .* (1 - sigma)); 0^T]
MatrixXd sigma_hat_prime(const NetworkParams& net, const VectorXd& x_tilde);

// u_ad = -W^T (sigma + h_o) - b_w
Vector2d nn_output(const NetworkParams& net, const VectorXd& sigma,
                   const VectorXd& h_o);
Vector2d nn_output_from_input(const NetworkParams& net, const VectorXd& x_tilde,
                              const VectorXd& h_o);

NetworkDerivative weight_derivatives(const NetworkParams& net,
                                     const ErrorState& err,
                                     const ControllerGains& gains);

// v = -kv (|W|_F + |V|_F + |mu|_F + Zm) r
Vector2d robustifying_term(const NetworkParams& net, double memory_norm,
                           const Vector2d& r, const ControllerGains& gains);

inline Vector2d baseline_term(const Vector2d& r, const ControllerGains& gains) {
  return -gains.Kv * r;
}

// tau = -u = -u_bl - u_ad - v
inline Vector2d total_torque(const Vector2d& u_bl, const Vector2d& u_ad,
                             const Vector2d& v) {
  return -u_bl - u_ad - v;
}

}  // namespace mann
