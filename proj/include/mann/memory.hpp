#pragma once
// Continuous-time working memory: write/read dynamics, key designs, soft and
// hard attention, and attention reallocation with progressive growth.
//
// Column i of `h` is memory vector h_i (also mu_i). Only the first n_s
// columns are active; the rest stay zero until growth activates them.

#include <Eigen/Dense>

namespace mann {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class KeyDesign {
  State,           // keys are joint-position points, query = x
  Representation,  // keys are the memory vectors, query = hidden layer
};

enum class AttentionKind { Soft, Hard };

enum class Reallocation {
  Off,
  InitialPhase,  // active while n_s < n_max, off for good afterwards
  Always,
};

struct AttentionConfig {
  AttentionKind kind = AttentionKind::Hard;
  KeyDesign key = KeyDesign::Representation;
  Reallocation realloc = Reallocation::InitialPhase;
  double beta = 10.0;  // soft-attention sharpness
};

struct WorkingMemory {
  MatrixXd h;     // hidden x n_max
  MatrixXd keys;  // 2 x n_max, state keys only (empty for representation)
  int n_s = 1;
  int n_max = 5;
  double c_w = 0.75;
  double c_k = 1.0;
  double theta = 0.2;
  KeyDesign key = KeyDesign::Representation;

  int hidden() const { return static_cast<int>(h.rows()); }
  auto active() const { return h.leftCols(n_s); }
  // Frobenius norm over active locations.
  double active_norm() const { return active().norm(); }

  static WorkingMemory empty(int hidden, int n_max, KeyDesign key);
};

struct AttentionWeights {
  VectorXd w;      // length n_s
  int i_star = 0;  // selected (hard) or heaviest (soft) location
};

VectorXd softmax(const VectorXd& a);

// |q - k_i|_inf over active i for state keys.
VectorXd state_key_distances(const WorkingMemory& mem, const Eigen::Vector2d& q);
// |q - h_i / c_w|_inf over active i; shared by representation keys and the
// reallocation rule.
VectorXd content_distances(const WorkingMemory& mem, const VectorXd& q);

AttentionWeights attention_hard_state(const WorkingMemory& mem,
                                      const Eigen::Vector2d& q);
AttentionWeights attention_hard_rep(const WorkingMemory& mem,
                                    const VectorXd& q);
// softmax(-beta * d) over precomputed distances.
AttentionWeights attention_soft(const VectorXd& distances, double beta);

// Dispatches on the configured attention kind and key design.
AttentionWeights select_attention(const WorkingMemory& mem,
                                  const AttentionConfig& cfg,
                                  const VectorXd& sigma,
                                  const Eigen::Vector2d& x_under);

// Columns of dh/dt (hidden x n_max); inactive and unattended columns are
// exactly zero.
MatrixXd memory_write_derivative(const WorkingMemory& mem,
                                 const AttentionWeights& w,
                                 const VectorXd& h_w,
                                 const VectorXd& correction);

// dk/dt = -c_k w_r(i) (k_i - x) (2 x n_max).
MatrixXd key_derivative_state(const WorkingMemory& mem,
                              const AttentionWeights& w,
                              const Eigen::Vector2d& x_under);

VectorXd memory_read(const WorkingMemory& mem, const AttentionWeights& w);

// a_r: true when no active location lies strictly within theta of sigma.
bool reallocation_check(const WorkingMemory& mem, const VectorXd& sigma_now);

bool reallocation_enabled(const WorkingMemory& mem, Reallocation mode);

// Grows into a fresh location while capacity remains, else overwrites the
// least relevant one. The target is set to c_w * sigma_now (and, for state
// keys, its key to x_under). Returns the target index.
int reallocate(WorkingMemory& mem, const VectorXd& sigma_now,
               const Eigen::Vector2d& x_under);

}  // namespace mann
