#pragma once

#include "aninorm/statespace.hpp"

namespace aninorm {

/// Time scale T of the bilinear correspondence. Omega = 1/T is derived on
/// demand and never stored separately.
class TimeScale {
 public:
  explicit TimeScale(double T);

  double T() const { return T_; }
  double omega() const { return 1.0 / T_; }

 private:
  double T_;
};

/// K(z) = (1 - z) / (1 + z). Throws Error(PoleAtMinusOne) at z = -1.
Complex cayley(Complex z);

/// Continuous -> discrete realization:
///   A_T = (I + TA)(I - TA)^{-1}, B_T = T (I - TA)^{-1} B,
///   C_T = 2 C (I - TA)^{-1},     D_T = T C (I - TA)^{-1} B + D,
/// so that F_T(z) = F(Omega K(z)).
DtStateSpace to_discrete(const CtStateSpace& sys, const TimeScale& ts);

/// Inverse of to_discrete.
CtStateSpace to_continuous(const DtStateSpace& sys, const TimeScale& ts);

}  // namespace aninorm
