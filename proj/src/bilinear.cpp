#include "aninorm/bilinear.hpp"

#include <cmath>
#include <string>

#include "aninorm/error.hpp"

namespace aninorm {
namespace {

constexpr double kShiftRcond = 1e-14;

}  // namespace

TimeScale::TimeScale(double T) : T_(T) {
  if (!std::isfinite(T) || !(T >= 1e-9 && T <= 1e9)) {
    throw Error(ErrorCode::InvalidTimeScale,
                "time scale T must lie in [1e-9, 1e9], got " + std::to_string(T));
  }
}

Complex cayley(Complex z) {
  if (z == Complex(-1.0, 0.0)) {
    throw Error(ErrorCode::PoleAtMinusOne, "cayley: pole at z = -1");
  }
  return (1.0 - z) / (1.0 + z);
}

DtStateSpace to_discrete(const CtStateSpace& sys, const TimeScale& ts) {
  const Index n = sys.states();
  const double T = ts.T();
  if (n == 0) return DtStateSpace(sys.A(), sys.B(), sys.C(), sys.D());

  const MatrixXd I = MatrixXd::Identity(n, n);
  const Eigen::PartialPivLU<MatrixXd> lu(I - T * sys.A());
  if (!(lu.rcond() > kShiftRcond)) {
    throw Error(ErrorCode::SingularShift, "to_discrete: I - TA is numerically singular");
  }
  // (I+TA) and (I-TA)^{-1} commute, so A_T = (I-TA)^{-1}(I+TA).
  MatrixXd A_T = lu.solve(I + T * sys.A());
  MatrixXd B_T = T * lu.solve(sys.B());
  // C (I-TA)^{-1} = ((I-TA)^{-T} C^T)^T, reusing the same factorization.
  const MatrixXd CXt = lu.transpose().solve(sys.C().transpose());
  const MatrixXd CX = CXt.transpose();
  MatrixXd D_T = CX * (T * sys.B()) + sys.D();
  return DtStateSpace(std::move(A_T), std::move(B_T), 2.0 * CX, std::move(D_T));
}

CtStateSpace to_continuous(const DtStateSpace& sys, const TimeScale& ts) {
  const Index n = sys.states();
  const double omega = ts.omega();
  if (n == 0) return CtStateSpace(sys.A(), sys.B(), sys.C(), sys.D());

  const MatrixXd I = MatrixXd::Identity(n, n);
  const Eigen::PartialPivLU<MatrixXd> lu(I + sys.A());
  if (!(lu.rcond() > kShiftRcond)) {
    throw Error(ErrorCode::SingularShift, "to_continuous: I + A_T is numerically singular");
  }
  MatrixXd A = omega * lu.solve(sys.A() - I);
  MatrixXd B = 2.0 * omega * lu.solve(sys.B());
  const MatrixXd Ct = lu.transpose().solve(sys.C().transpose());
  MatrixXd C = Ct.transpose();
  MatrixXd D = sys.D() - C * sys.B();
  return CtStateSpace(std::move(A), std::move(B), std::move(C), std::move(D));
}

}  // namespace aninorm
