#include "mann/memory.hpp"

#include <cassert>

namespace mann {

WorkingMemory WorkingMemory::empty(int hidden, int n_max, KeyDesign key) {
  WorkingMemory mem;
  mem.h = MatrixXd::Zero(hidden, n_max);
  mem.n_max = n_max;
  mem.n_s = 1;
  mem.key = key;
  if (key == KeyDesign::State) mem.keys = MatrixXd::Zero(2, n_max);
  return mem;
}

VectorXd softmax(const VectorXd& a) {
  const VectorXd e = (a.array() - a.maxCoeff()).exp();
  return e / e.sum();
}

namespace {

// Lowest index wins ties.
int argmin(const VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v[i] < v[best]) best = i;
  return best;
}

int argmax(const VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

AttentionWeights one_hot(int n, int i) {
  AttentionWeights w;
  w.w = VectorXd::Zero(n);
  w.w[i] = 1.0;
  w.i_star = i;
  return w;
}

}  // namespace

VectorXd state_key_distances(const WorkingMemory& mem,
                             const Eigen::Vector2d& q) {
  VectorXd d(mem.n_s);
  for (int i = 0; i < mem.n_s; ++i)
    d[i] = (q - mem.keys.col(i)).lpNorm<Eigen::Infinity>();
  return d;
}

VectorXd content_distances(const WorkingMemory& mem, const VectorXd& q) {
  // Scaled form |c_w q - h_i| / c_w so a column written as c_w * q sits at
  // exactly zero distance.
  VectorXd d(mem.n_s);
  const VectorXd scaled = mem.c_w * q;
  for (int i = 0; i < mem.n_s; ++i)
    d[i] = (scaled - mem.h.col(i)).lpNorm<Eigen::Infinity>() / mem.c_w;
  return d;
}

AttentionWeights attention_hard_state(const WorkingMemory& mem,
                                      const Eigen::Vector2d& q) {
  return one_hot(mem.n_s, argmin(state_key_distances(mem, q)));
}

AttentionWeights attention_hard_rep(const WorkingMemory& mem,
                                    const VectorXd& q) {
  return one_hot(mem.n_s, argmin(content_distances(mem, q)));
}

AttentionWeights attention_soft(const VectorXd& distances, double beta) {
  AttentionWeights w;
  w.w = softmax(-beta * distances);
  w.i_star = argmax(w.w);
  return w;
}

AttentionWeights select_attention(const WorkingMemory& mem,
                                  const AttentionConfig& cfg,
                                  const VectorXd& sigma,
                                  const Eigen::Vector2d& x_under) {
  if (cfg.kind == AttentionKind::Soft) {
    const VectorXd d = cfg.key == KeyDesign::State
                           ? state_key_distances(mem, x_under)
                           : content_distances(mem, sigma);
    return attention_soft(d, cfg.beta);
  }
  return cfg.key == KeyDesign::State ? attention_hard_state(mem, x_under)
                                     : attention_hard_rep(mem, sigma);
}

MatrixXd memory_write_derivative(const WorkingMemory& mem,
                                 const AttentionWeights& w,
                                 const VectorXd& h_w,
                                 const VectorXd& correction) {
  assert(w.w.size() == mem.n_s);
  MatrixXd dh = MatrixXd::Zero(mem.h.rows(), mem.h.cols());
  for (int i = 0; i < mem.n_s; ++i) {
    const double wi = w.w[i];
    if (wi == 0.0) continue;
    dh.col(i) = wi * (-mem.h.col(i) + mem.c_w * h_w + correction);
  }
  return dh;
}

MatrixXd key_derivative_state(const WorkingMemory& mem,
                              const AttentionWeights& w,
                              const Eigen::Vector2d& x_under) {
  MatrixXd dk = MatrixXd::Zero(2, mem.keys.cols());
  for (int i = 0; i < mem.n_s; ++i) {
    const double wi = w.w[i];
    if (wi == 0.0) continue;
    dk.col(i) = -mem.c_k * wi * (mem.keys.col(i) - x_under);
  }
  return dk;
}

VectorXd memory_read(const WorkingMemory& mem, const AttentionWeights& w) {
  return mem.active() * w.w;
}

bool reallocation_check(const WorkingMemory& mem, const VectorXd& sigma_now) {
  const VectorXd d = content_distances(mem, sigma_now);
  return !(d.array() < mem.theta).any();
}

bool reallocation_enabled(const WorkingMemory& mem, Reallocation mode) {
  switch (mode) {
    case Reallocation::Off: return false;
    case Reallocation::InitialPhase: return mem.n_s < mem.n_max;
    case Reallocation::Always: return true;
  }
  return false;
}

int reallocate(WorkingMemory& mem, const VectorXd& sigma_now,
               const Eigen::Vector2d& x_under) {
  int target;
  if (mem.n_s < mem.n_max) {
    target = mem.n_s;
    ++mem.n_s;
  } else {
    target = argmax(content_distances(mem, sigma_now));
  }
  mem.h.col(target) = mem.c_w * sigma_now;
  if (mem.key == KeyDesign::State) mem.keys.col(target) = x_under;
  return target;
}

}  // namespace mann
