#pragma once

// Test-only reference computations. Deliberately share no code paths with
// the library implementations they check.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Mat2 = std::array<std::array<cplx, 2>, 2>;
using Mat4 = std::array<std::array<cplx, 4>, 4>;
using Vec4 = std::array<cplx, 4>;

inline Mat2 identity() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }
inline Mat2 pauli_x() { return {{{0.0, 1.0}, {1.0, 0.0}}}; }

inline Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
  return out;
}

inline Vec4 matvec(const Mat4& m, const Vec4& v) {
  Vec4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i] += m[i][j] * v[j];
  return out;
}

// <psi| diag(d) |psi> via an explicit matrix sandwich.
inline double expectation(const Vec4& psi, const std::array<double, 4>& d) {
  cplx total = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const cplx op = i == j ? cplx(d[i]) : cplx(0.0);
      total += std::conj(psi[i]) * op * psi[j];
    }
  return total.real();
}

// Player-A expected payoff of the MW game for (row, col) classical payoffs
// laid out as R|00> + S|01> + T|10> + P|11>.
inline double mw_payoff(double R, double S, double T, double P, double b2, bool a_defects, bool b_defects) {
  const Vec4 psi{std::sqrt(1.0 - b2), 0.0, 0.0, std::sqrt(b2)};
  const Mat4 u = kron(a_defects ? pauli_x() : identity(), b_defects ? pauli_x() : identity());
  return expectation(matvec(u, psi), {R, S, T, P});
}

// Replicator dynamics x' = x (1 - x) (f_C - f_D) for a symmetric 2x2 game,
// integrated with classical RK4. Returns the state after `horizon`.
inline double replicator_limit(double rq, double sq, double tq, double pq, double x0, double horizon = 800.0,
                               double dt = 0.01) {
  auto f = [&](double x) {
    const double fc = x * rq + (1.0 - x) * sq;
    const double fd = x * tq + (1.0 - x) * pq;
    return x * (1.0 - x) * (fc - fd);
  };
  double x = x0;
  const long steps = static_cast<long>(horizon / dt);
  for (long i = 0; i < steps; ++i) {
    const double k1 = f(x);
    const double k2 = f(x + 0.5 * dt * k1);
    const double k3 = f(x + 0.5 * dt * k2);
    const double k4 = f(x + dt * k3);
    x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

}  // namespace oracle
