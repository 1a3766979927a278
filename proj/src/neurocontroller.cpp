#include "mann/neurocontroller.hpp"

#include <cmath>
#include <random>

#include "mann/errors.hpp"

namespace mann {

NetworkParams NetworkParams::zeros(int hidden) {
  NetworkParams net;
  net.W = MatrixXd::Zero(hidden, 2);
  net.V = MatrixXd::Zero(kInputSize, hidden);
  net.b_v = VectorXd::Zero(hidden);
  return net;
}

NetworkParams NetworkParams::initialize(int hidden, std::uint64_t seed,
                                        double spread) {
  NetworkParams net = zeros(hidden);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-spread, spread);
  // Column-major fill order is part of the reproducibility contract.
  for (int j = 0; j < hidden; ++j)
    for (int i = 0; i < kInputSize; ++i) net.V(i, j) = dist(rng);
  for (int j = 0; j < hidden; ++j) net.b_v[j] = dist(rng);
  return net;
}

void ControllerGains::validate() const {
  if (!(Kv > 0.0 && kv > 0.0 && Cw > 0.0 && Cv > 0.0))
    throw Error(ErrorKind::Validation, "Kv, kv, Cw and Cv must be positive");
  if (!(kappa >= 0.0) || !(Zm >= 0.0))
    throw Error(ErrorKind::Validation, "kappa and Zm must be non-negative");
  if (Lambda(0, 1) != Lambda(1, 0))
    throw Error(ErrorKind::Validation, "Lambda must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix2d> eig(Lambda);
  if (!(eig.eigenvalues().minCoeff() > 0.0))
    throw Error(ErrorKind::Validation, "Lambda must be positive definite");
}

ErrorState error_state(const PlantState& plant, const ReferenceSample& ref,
                       const ControllerGains& gains) {
  ErrorState err;
  err.e = ref.s - plant.x;
  err.edot = ref.sdot - plant.xdot;
  err.r = err.edot + gains.Lambda * err.e;
  err.x_tilde << err.e, err.edot, ref.s, ref.sdot, ref.sddot;
  err.h_e = err.r.transpose();
  return err;
}

VectorXd pre_activation(const NetworkParams& net, const VectorXd& x_tilde) {
  return net.V.transpose() * x_tilde + net.b_v;
}

namespace {

VectorXd logistic(const VectorXd& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

}  // namespace

VectorXd hidden_layer(const NetworkParams& net, const VectorXd& x_tilde) {
  return logistic(pre_activation(net, x_tilde));
}

VectorXd sigma_hat(const NetworkParams& net, const VectorXd& x_tilde) {
  const int n = net.hidden();
  VectorXd out(n + 1);
  out.head(n) = hidden_layer(net, x_tilde);
  out[n] = 1.0;
  return out;
}

MatrixXd sigma_hat_prime(const NetworkParams& net, const VectorXd& x_tilde) {
  const int n = net.hidden();
  const VectorXd s = hidden_layer(net, x_tilde);
  MatrixXd out = MatrixXd::Zero(n + 1, n);
  out.topRows(n).diagonal() = s.array() * (1.0 - s.array());
  return out;
}

Vector2d nn_output(const NetworkParams& net, const VectorXd& sigma,
                   const VectorXd& h_o) {
  return -net.W.transpose() * (sigma + h_o) - net.b_w;
}

Vector2d nn_output_from_input(const NetworkParams& net, const VectorXd& x_tilde,
                              const VectorXd& h_o) {
  return nn_output(net, hidden_layer(net, x_tilde), h_o);
}

NetworkDerivative weight_derivatives(const NetworkParams& net,
                                     const ErrorState& err,
                                     const ControllerGains& gains) {
  const int n = net.hidden();
  const VectorXd z = pre_activation(net, err.x_tilde);
  const VectorXd s = logistic(z);
  const VectorXd ds = s.array() * (1.0 - s.array());

  // sigma_hat - sigma_hat' z, using the diagonal structure of sigma_hat'.
  VectorXd drive(n + 1);
  drive.head(n) = s.array() - ds.array() * z.array();
  drive[n] = 1.0;

  const double decay = gains.kappa * err.e.norm();

  NetworkDerivative d;
  MatrixXd wd = gains.Cw * drive * err.h_e;  // (N+1) x 2
  d.W = wd.topRows(n) - gains.Cw * decay * net.W;
  d.b_w = wd.row(n).transpose() - gains.Cw * decay * net.b_w;

  // [x; 1] h_e [W; b_w^T]^T sigma_hat'. The zero last row of sigma_hat'
  // drops b_w, leaving (h_e W^T) .* ds across hidden units.
  const Eigen::RowVectorXd back =
      (err.h_e * net.W.transpose()).array() * ds.transpose().array();
  d.V = gains.Cv * err.x_tilde * back - gains.Cv * decay * net.V;
  d.b_v = gains.Cv * back.transpose() - gains.Cv * decay * net.b_v;
  return d;
}

Vector2d robustifying_term(const NetworkParams& net, double memory_norm,
                           const Vector2d& r, const ControllerGains& gains) {
  const double scale =
      net.W.norm() + net.V.norm() + memory_norm + gains.Zm;
  return -gains.kv * scale * r;
}

}  // namespace mann
