#pragma once

namespace mann {

// Classical fixed-step fourth-order Runge-Kutta.
//
// `field(y, t)` returns dy/dt; `advance(y, k, h)` returns y + h * k. The final
// combination is applied as four successive advances, so a component whose
// derivative is zero at every stage is returned bit-identical.
template <class State, class Field, class Advance>
State rk4_step(const State& y, double t, double dt, Field&& field,
               Advance&& advance) {
  const double half = 0.5 * dt;
  const auto k1 = field(y, t);
  const auto k2 = field(advance(y, k1, half), t + half);
  const auto k3 = field(advance(y, k2, half), t + half);
  const auto k4 = field(advance(y, k3, dt), t + dt);
  State out = advance(y, k1, dt / 6.0);
  out = advance(out, k2, dt / 3.0);
  out = advance(out, k3, dt / 3.0);
  return advance(out, k4, dt / 6.0);
}

}  // namespace mann
