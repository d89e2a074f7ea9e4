#include "aninorm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "aninorm/error.hpp"

namespace aninorm {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

MatrixXcd hermitian_part(const MatrixXcd& X) { return 0.5 * (X + X.adjoint()); }

const TimeScale& need_scale(const std::optional<TimeScale>& ts, const char* what) {
  if (!ts) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + ": a continuous-time density needs a time scale");
  }
  return *ts;
}

MatrixXcd concentrated_value(const Concentrated& c, double omega) {
  const double g = c.gamma;
  const double plus = g / (kPi * (g * g + (omega - c.omega0) * (omega - c.omega0)));
  const double minus = g / (kPi * (g * g + (omega + c.omega0) * (omega + c.omega0)));
  const VectorXcd ubar = c.u.conjugate();
  return plus * (c.u * c.u.adjoint()) + minus * (ubar * ubar.adjoint());
}

// Nodes and weights of a quadrature rule on (-pi, pi).
struct CircleRule {
  std::vector<double> phi;
  std::vector<double> weight;
  Execution exec = Execution::Parallel;
};

CircleRule uniform_rule(const PhiGrid& grid) {
  CircleRule rule;
  rule.exec = grid.execution();
  rule.phi.resize(grid.size());
  rule.weight.assign(grid.size(), grid.weight());
  for (std::size_t j = 0; j < grid.size(); ++j) rule.phi[j] = grid.node(j);
  return rule;
}

// A sharp feature of an integrand on the circle: a peak or log singularity
// at phi with half-width `width`.
struct Feature {
  double phi;
  double width;
};

// Features from rational factors: poles (and zeros) lambda near the unit
// circle show up at arg(lambda) with width | 1 - |lambda| |.
void add_near_circle(const std::vector<Complex>& points, const PhiGrid& grid,
                     std::vector<Feature>& out) {
  const double threshold = 64.0 * grid.weight();
  for (const Complex& l : points) {
    const double r = std::abs(l);
    if (r == 0.0) continue;
    const double d = std::abs(1.0 - r);
    if (d < threshold) out.push_back({std::arg(l), std::max(d, 1e-15)});
  }
}

void add_rational_features(const DtStateSpace& f, const PhiGrid& grid,
                           std::vector<Feature>& out) {
  add_near_circle(eigenvalues(f.A()), grid, out);
  // Transmission zeros of a square filter with invertible feedthrough.
  if (f.inputs() == f.outputs() && f.states() > 0) {
    const Eigen::PartialPivLU<MatrixXd> lu(f.D());
    if (lu.rcond() > 1e-12) {
      add_near_circle(eigenvalues(f.A() - f.B() * lu.solve(f.C())), grid, out);
    }
  }
}

std::vector<Feature> density_features(const SpectralDensity& S,
                                      const std::optional<TimeScale>& ts,
                                      const PhiGrid& grid) {
  std::vector<Feature> out;
  std::visit(
      [&](const auto& s) {
        using D = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<D, Concentrated>) {
          const double T = need_scale(ts, "quadrature").T();
          const double w0 = s.omega0 * T;
          // Peak half-width on the circle: dphi = Sigma(omega) domega.
          const double width = 2.0 * T * s.gamma / (1.0 + w0 * w0);
          out.push_back({-2.0 * std::atan(w0), width});
          out.push_back({2.0 * std::atan(w0), width});
        } else if constexpr (std::is_same_v<D, RationalDt>) {
          add_rational_features(s.filter, grid, out);
        } else if constexpr (std::is_same_v<D, RationalCt>) {
          add_rational_features(to_discrete(s.filter, need_scale(ts, "quadrature")), grid, out);
        }
      },
      S.form());
  return out;
}

// Without sharp features: the uniform midpoint grid. Otherwise composite
// Gauss-Legendre on a uniform mesh of N/16 panels, with extra panels graded
// geometrically (ratio 2) towards every feature, wrapping around +-pi.
CircleRule circle_rule(const PhiGrid& grid, const std::vector<Feature>& features) {
  if (features.empty()) return uniform_rule(grid);
  constexpr int kOrder = 16;
  const int base = static_cast<int>(std::max<std::size_t>(grid.size() / kOrder, 64));

  std::vector<double> breaks;
  for (int k = 0; k <= base; ++k) breaks.push_back(-kPi + kTwoPi * k / base);
  for (const Feature& f : features) {
    for (const double shift : {-kTwoPi, 0.0, kTwoPi}) {
      const double peak = f.phi + shift;
      breaks.push_back(peak);
      for (double h = 0.25 * f.width; h < kPi; h *= 2.0) {
        breaks.push_back(peak - h);
        breaks.push_back(peak + h);
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> panels;
  for (const double b : breaks) {
    if (b < -kPi || b > kPi) continue;
    if (panels.empty() || b - panels.back() > 1e-15) panels.push_back(b);
  }
  if (panels.back() < kPi) panels.back() = kPi;

  const GaussLegendre gl = gauss_legendre(kOrder);
  CircleRule rule;
  rule.exec = grid.execution();
  for (std::size_t k = 0; k + 1 < panels.size(); ++k) {
    const double mid = 0.5 * (panels[k] + panels[k + 1]);
    const double half = 0.5 * (panels[k + 1] - panels[k]);
    for (int i = 0; i < kOrder; ++i) {
      rule.phi.push_back(mid + half * gl.nodes[i]);
      rule.weight.push_back(half * gl.weights[i]);
    }
  }
  return rule;
}

CircleRule rule_for(const SpectralDensity& S, const std::optional<TimeScale>& ts,
                    const PhiGrid& grid, std::vector<Feature> extra = {}) {
  std::vector<Feature> features = density_features(S, ts, grid);
  features.insert(features.end(), extra.begin(), extra.end());
  return circle_rule(grid, features);
}

// Weighted sums  sum_j w_j f(phi_j)  for a vector-valued f, reduced in node
// order so that serial and parallel runs agree bit for bit.
template <class Eval>
std::vector<double> integrate(const CircleRule& rule, std::size_t width, Eval&& eval) {
  const auto buffer = evaluate_nodes(
      rule.phi.size(), width,
      [&](std::size_t j, double* out) {
        eval(rule.phi[j], out);
        for (std::size_t k = 0; k < width; ++k) out[k] *= rule.weight[j];
      },
      rule.exec);
  return column_sums(buffer, width);
}

struct LogDet {
  double value = 0.0;
  bool singular = false;
};

// ln det of a Hermitian PSD matrix from its eigenvalues. Numerically rank
// deficient matrices are flagged and their small eigenvalues clamped.
LogDet hermitian_logdet(const MatrixXcd& S) {
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<MatrixXcd>(hermitian_part(S), Eigen::EigenvaluesOnly)
          .eigenvalues();
  const double top = ev.maxCoeff();
  const double floor = std::max(1e-300, 1e-13 * std::max(top, 0.0));
  LogDet out;
  for (Index i = 0; i < ev.size(); ++i) {
    if (!(ev(i) > floor)) out.singular = true;
    out.value += std::log(std::max(ev(i), floor));
  }
  return out;
}

// Columns: sum ln det S_T, sum Tr S_T, count of singular nodes (unweighted).
struct LogDetSums {
  double logdet = 0.0;
  double trace = 0.0;
  std::size_t singular = 0;
};

LogDetSums logdet_sums(const SpectralDensity& S, const std::optional<TimeScale>& ts,
                       const PhiGrid& grid) {
  const CircleRule rule = rule_for(S, ts, grid);
  const auto buffer = evaluate_nodes(
      rule.phi.size(), 3,
      [&](std::size_t j, double* out) {
        const MatrixXcd St = S.on_circle(rule.phi[j], ts);
        const LogDet ld = hermitian_logdet(St);
        out[0] = rule.weight[j] * ld.value;
        out[1] = rule.weight[j] * St.trace().real();
        out[2] = ld.singular ? 1.0 : 0.0;
      },
      rule.exec);
  const auto sums = column_sums(buffer, 3);
  return {sums[0], sums[1], static_cast<std::size_t>(sums[2])};
}

}  // namespace

SpectralDensity::SpectralDensity(ConstantScalar s) : form_(s) {
  if (!(s.kappa > 0.0) || !std::isfinite(s.kappa) || s.m <= 0) {
    throw Error(ErrorCode::InvalidArgument,
                "ConstantScalar density needs kappa > 0 and m > 0");
  }
}

SpectralDensity::SpectralDensity(RationalCt s) : form_(std::move(s)) {
  require_hurwitz(std::get<RationalCt>(form_).filter);
}

SpectralDensity::SpectralDensity(RationalDt s) : form_(std::move(s)) {
  require_schur(std::get<RationalDt>(form_).filter);
}

SpectralDensity::SpectralDensity(Concentrated s) : form_(std::move(s)) {
  const auto& c = std::get<Concentrated>(form_);
  if (!(c.gamma > 0.0) || !std::isfinite(c.gamma) || !std::isfinite(c.omega0)) {
    throw Error(ErrorCode::InvalidArgument,
                "Concentrated density needs gamma > 0 and finite omega0");
  }
  if (c.u.size() == 0 || std::abs(c.u.norm() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "Concentrated density needs a unit vector u");
  }
}

Index SpectralDensity::dimension() const {
  return std::visit(
      [](const auto& s) -> Index {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ConstantScalar>) {
          return s.m;
        } else if constexpr (std::is_same_v<S, Concentrated>) {
          return s.u.size();
        } else {
          return s.filter.outputs();
        }
      },
      form_);
}

MatrixXcd SpectralDensity::at_frequency(double omega,
                                        const std::optional<TimeScale>& ts) const {
  return std::visit(
      [&](const auto& s) -> MatrixXcd {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ConstantScalar>) {
          return s.kappa * MatrixXcd::Identity(s.m, s.m);
        } else if constexpr (std::is_same_v<S, RationalCt>) {
          return gram_ct(s.filter, omega, Side::RightGGstar);
        } else if constexpr (std::is_same_v<S, RationalDt>) {
          const double T = need_scale(ts, "at_frequency").T();
          return gram_dt(s.filter, -2.0 * std::atan(omega * T), Side::RightGGstar);
        } else {
          return concentrated_value(s, omega);
        }
      },
      form_);
}

MatrixXcd SpectralDensity::on_circle(double phi, const std::optional<TimeScale>& ts) const {
  return std::visit(
      [&](const auto& s) -> MatrixXcd {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ConstantScalar>) {
          return s.kappa * MatrixXcd::Identity(s.m, s.m);
        } else if constexpr (std::is_same_v<S, RationalDt>) {
          return gram_dt(s.filter, phi, Side::RightGGstar);
        } else {
          const double omega = -need_scale(ts, "on_circle").omega() * std::tan(0.5 * phi);
          return at_frequency(omega, ts);
        }
      },
      form_);
}

PhiGrid::PhiGrid(std::size_t N, Execution exec) : N_(N), exec_(exec) {
  if (N < 2 || (N & (N - 1)) != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "PhiGrid size must be a power of two, got " + std::to_string(N));
  }
}

double PhiGrid::node(std::size_t j) const {
  return -kPi + (static_cast<double>(j) + 0.5) * kTwoPi / static_cast<double>(N_);
}

double PhiGrid::weight() const { return kTwoPi / static_cast<double>(N_); }

double sigma(double omega, const TimeScale& ts) {
  const double wT = omega * ts.T();
  return 2.0 * ts.T() / (1.0 + wT * wT);
}

MatrixXcd gram_ct(const CtStateSpace& sys, double omega, Side side) {
  const MatrixXcd F = eval_tf_ct(sys, Complex(0.0, omega));
  return hermitian_part(side == Side::LeftFstarF ? MatrixXcd(F.adjoint() * F)
                                                 : MatrixXcd(F * F.adjoint()));
}

MatrixXcd gram_dt(const DtStateSpace& sys, double phi, Side side) {
  const MatrixXcd F = eval_tf_dt(sys, std::polar(1.0, phi));
  return hermitian_part(side == Side::LeftFstarF ? MatrixXcd(F.adjoint() * F)
                                                 : MatrixXcd(F * F.adjoint()));
}

Variances variances_dt(const DtStateSpace& sys, const SpectralDensity& S,
                       const PhiGrid& grid, const std::optional<TimeScale>& ts) {
  if (S.dimension() != sys.inputs()) {
    throw Error(ErrorCode::DimensionMismatch,
                "density dimension differs from the number of inputs");
  }
  std::vector<Feature> poles;
  add_near_circle(eigenvalues(sys.A()), grid, poles);
  const CircleRule rule = rule_for(S, ts, grid, poles);
  const auto sums = integrate(rule, 2, [&](double phi, double* out) {
    const MatrixXcd Lambda = gram_dt(sys, phi, Side::LeftFstarF);
    const MatrixXcd St = S.on_circle(phi, ts);
    out[0] = St.trace().real();
    out[1] = (Lambda * St).trace().real();
  });
  return {sums[0] / kTwoPi, sums[1] / kTwoPi};
}

double rms_gain(const CtStateSpace& sys, const SpectralDensity& S, const TimeScale& ts,
                const PhiGrid& grid) {
  require_hurwitz(sys);
  const Variances v = variances_dt(to_discrete(sys, ts), S, grid, ts);
  if (!(v.input > 1e-14)) {
    throw Error(ErrorCode::ZeroDenominator, "rms_gain: density has no mass on the circle");
  }
  return std::sqrt(std::max(v.output, 0.0) / v.input);
}

double rms_gain_omega(const CtStateSpace& sys, const SpectralDensity& S,
                      const TimeScale& ts, int panels) {
  require_hurwitz(sys);
  if (S.dimension() != sys.inputs()) {
    throw Error(ErrorCode::DimensionMismatch,
                "rms_gain_omega: density dimension differs from the number of inputs");
  }
  // omega = tan(theta) on (-pi/2, pi/2); the Sigma-weighted integrands stay
  // bounded at the ends because Sigma sec^2 -> 2/T.
  const GaussLegendre gl = gauss_legendre(16);
  const double h = kPi / panels;
  CircleRule rule;
  for (int k = 0; k < panels; ++k) {
    const double mid = -0.5 * kPi + (k + 0.5) * h;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      rule.phi.push_back(mid + 0.5 * h * gl.nodes[i]);
      rule.weight.push_back(0.5 * h * gl.weights[i]);
    }
  }
  const auto sums = integrate(rule, 2, [&](double theta, double* out) {
    const double omega = std::tan(theta);
    const double c = std::cos(theta);
    const double jac = sigma(omega, ts) / (c * c);
    const MatrixXcd Lambda = gram_ct(sys, omega, Side::LeftFstarF);
    const MatrixXcd Sw = S.at_frequency(omega, ts);
    out[0] = jac * (Lambda * Sw).trace().real();
    out[1] = jac * Sw.trace().real();
  });
  if (!(sums[1] > 1e-14)) {
    throw Error(ErrorCode::ZeroDenominator, "rms_gain_omega: density has no mass");
  }
  return std::sqrt(std::max(sums[0], 0.0) / sums[1]);
}

double white_gain(const CtStateSpace& sys, const TimeScale& ts) {
  require_hurwitz(sys);
  return h2_dt(to_discrete(sys, ts)) / std::sqrt(static_cast<double>(sys.inputs()));
}

GainLimits gain_limits(const CtStateSpace& sys) {
  require_hurwitz(sys);
  const double root_m = std::sqrt(static_cast<double>(sys.inputs()));
  GainLimits out;
  MatrixXd F0 = sys.D();
  if (sys.states() > 0) F0 -= sys.C() * sys.A().partialPivLu().solve(sys.B());
  out.limit_T_inf = F0.norm() / root_m;
  out.limit_T_zero = sys.D().norm() / root_m;
  if ((sys.D().array() == 0.0).all()) {
    out.small_T_coeff = h2_ct(sys) * std::sqrt(2.0) / root_m;
  }
  return out;
}

double mean_anisotropy(const SpectralDensity& S, const TimeScale& ts, const PhiGrid& grid) {
  if (std::holds_alternative<ConstantScalar>(S.form())) return 0.0;
  const LogDetSums sums = logdet_sums(S, ts, grid);
  if (!(sums.trace > 1e-14)) {
    throw Error(ErrorCode::ZeroDenominator, "mean_anisotropy: density has no mass");
  }
  if (sums.singular > 1) return std::numeric_limits<double>::infinity();
  const double m = static_cast<double>(S.dimension());
  const double variance = sums.trace / kTwoPi;  // E|w_0|^2
  // -(1/4pi) int ln det(m S_T / E) = -(1/4pi) (int ln det S_T + 2 pi m ln(m/E)).
  const double value = -(sums.logdet + kTwoPi * m * std::log(m / variance)) / (2.0 * kTwoPi);
  return std::max(value, 0.0);
}

double innovations_logdet(const SpectralDensity& S, const PhiGrid& grid,
                          const std::optional<TimeScale>& ts) {
  const LogDetSums sums = logdet_sums(S, ts, grid);
  if (sums.singular > 1) return -std::numeric_limits<double>::infinity();
  return sums.logdet / kTwoPi;
}

MatrixXd autocovariance(const SpectralDensity& S, int lag, const PhiGrid& grid,
                        const std::optional<TimeScale>& ts) {
  const Index m = S.dimension();
  const std::size_t width = static_cast<std::size_t>(2 * m * m);
  const CircleRule rule = rule_for(S, ts, grid);
  const auto sums = integrate(rule, width, [&](double phi, double* out) {
    const MatrixXcd v = std::polar(1.0, lag * phi) * S.on_circle(phi, ts);
    for (Index k = 0; k < m * m; ++k) {
      out[2 * k] = v.data()[k].real();
      out[2 * k + 1] = v.data()[k].imag();
    }
  });
  MatrixXd out(m, m);
  for (Index k = 0; k < m * m; ++k) out.data()[k] = sums[2 * k] / kTwoPi;
  return out;
}

std::vector<double> concentrated_gain(const CtStateSpace& sys, const TimeScale& ts,
                                      double omega0, const VectorXcd& u,
                                      const std::vector<double>& gammas) {
  std::vector<double> out;
  out.reserve(gammas.size());
  for (const double g : gammas) {
    out.push_back(rms_gain(sys, SpectralDensity(Concentrated{omega0, u, g}), ts));
  }
  return out;
}

double concentrated_limit(const CtStateSpace& sys, double omega0, const VectorXcd& u) {
  const MatrixXcd Lambda = gram_ct(sys, omega0, Side::LeftFstarF);
  return std::sqrt(std::max((u.adjoint() * Lambda * u)(0, 0).real(), 0.0));
}

GaussLegendre gauss_legendre(int order) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "gauss_legendre: order < 1");
  // Golub-Welsch: eigenvalues of the Jacobi matrix of the Legendre recurrence.
  MatrixXd J = MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(J);
  GaussLegendre gl;
  for (int k = 0; k < order; ++k) {
    gl.nodes.push_back(eig.eigenvalues()(k));
    const double v = eig.eigenvectors()(0, k);
    gl.weights.push_back(2.0 * v * v);
  }
  return gl;
}

}  // namespace aninorm
