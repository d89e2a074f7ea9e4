#include <gtest/gtest.h>

#include <random>

#include "aninorm/bilinear.hpp"
#include "aninorm/error.hpp"
#include "oracles.hpp"

using namespace aninorm;

namespace {

double max_diff(const MatrixXd& X, const MatrixXd& Y) {
  return X.size() == 0 ? 0.0 : (X - Y).cwiseAbs().maxCoeff();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no aninorm::Error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Bilinear, ScalarExample) {
  const DtStateSpace d = to_discrete(oracle::scalar_system(), TimeScale(1.0));
  EXPECT_DOUBLE_EQ(d.A()(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(d.B()(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(d.C()(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(d.D()(0, 0), 0.5);
}

TEST(Bilinear, RoundTripOnRandomSystems) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 8;
    const CtStateSpace c = oracle::random_stable_ct(rng, n, 1 + trial % 3, 1 + trial % 4);
    const TimeScale ts = TimeScale(std::array{0.01, 0.189, 1.0, 10.0}[trial % 4]);
    const CtStateSpace back = to_continuous(to_discrete(c, ts), ts);
    EXPECT_LE(max_diff(back.A(), c.A()), 1e-10) << trial;
    EXPECT_LE(max_diff(back.B(), c.B()), 1e-10) << trial;
    EXPECT_LE(max_diff(back.C(), c.C()), 1e-10) << trial;
    EXPECT_LE(max_diff(back.D(), c.D()), 1e-10) << trial;
  }
}

TEST(Bilinear, TransferFunctionConsistency) {
  std::mt19937_64 rng(77);
  const double pi = std::acos(-1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const CtStateSpace c = oracle::random_stable_ct(rng, 1 + trial % 8, 2, 2);
    const TimeScale ts = TimeScale(std::array{0.05, 0.189, 1.0, 4.0}[trial % 4]);
    const DtStateSpace d = to_discrete(c, ts);
    for (int j = 0; j < 256; ++j) {
      const Complex z = std::polar(1.0, -pi + (j + 0.5) * 2.0 * pi / 256);
      const MatrixXcd Fc = oracle::tf_ct(c, ts.omega() * cayley(z));
      const MatrixXcd Fd = oracle::tf_dt(d, z);
      EXPECT_LE((Fc - Fd).cwiseAbs().maxCoeff(), 1e-9 * (1.0 + Fc.norm())) << trial << " " << j;
    }
  }
}

TEST(Bilinear, StabilityIsPreserved) {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 20; ++trial) {
    const CtStateSpace c = oracle::random_stable_ct(rng, 5, 1, 1);
    EXPECT_LT(spectral_radius(to_discrete(c, TimeScale(0.3)).A()), 1.0);
  }
}

TEST(Bilinear, StaticGainPassesThrough) {
  const CtStateSpace g(MatrixXd(0, 0), MatrixXd(0, 2), MatrixXd(3, 0), MatrixXd::Ones(3, 2));
  const DtStateSpace d = to_discrete(g, TimeScale(2.0));
  EXPECT_EQ(d.states(), 0);
  EXPECT_EQ(d.D(), g.D());
}

TEST(Bilinear, Errors) {
  EXPECT_EQ(code_of([] { TimeScale(0.0); }), ErrorCode::InvalidTimeScale);
  EXPECT_EQ(code_of([] { TimeScale(-1.0); }), ErrorCode::InvalidTimeScale);
  EXPECT_EQ(code_of([] { TimeScale(1e10); }), ErrorCode::InvalidTimeScale);
  EXPECT_EQ(code_of([] { cayley(Complex(-1.0, 0.0)); }), ErrorCode::PoleAtMinusOne);
  // 1/T is an eigenvalue of A.
  const CtStateSpace bad(MatrixXd::Constant(1, 1, 2.0), MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1),
                         MatrixXd::Zero(1, 1));
  EXPECT_EQ(code_of([&] { to_discrete(bad, TimeScale(0.5)); }), ErrorCode::SingularShift);
  // -1 is an eigenvalue of A_T.
  const DtStateSpace flip(MatrixXd::Constant(1, 1, -1.0), MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1),
                          MatrixXd::Zero(1, 1));
  EXPECT_EQ(code_of([&] { to_continuous(flip, TimeScale(1.0)); }), ErrorCode::SingularShift);
}

TEST(Bilinear, CayleyMapsCircleToImaginaryAxis) {
  for (const double phi : {-3.0, -1.0, 0.0, 0.5, 2.9}) {
    const Complex k = cayley(std::polar(1.0, phi));
    EXPECT_NEAR(k.real(), 0.0, 1e-14);
    EXPECT_NEAR(k.imag(), -std::tan(0.5 * phi), 1e-12);
  }
}
