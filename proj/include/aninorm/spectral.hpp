#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "aninorm/bilinear.hpp"
#include "aninorm/kernels.hpp"
#include "aninorm/statespace.hpp"

namespace aninorm {

/// kappa * I_m.
struct ConstantScalar {
  double kappa = 1.0;
  Index m = 1;
};

/// S(omega) = G(i omega) G(i omega)^* for a stable continuous shaping filter.
struct RationalCt {
  CtStateSpace filter;
};

/// S_T(phi) = G_T(e^{i phi}) G_T(e^{i phi})^* for a stable discrete filter.
struct RationalDt {
  DtStateSpace filter;
};

/// Pair of Cauchy peaks at +-omega0 in the directions u and conj(u):
///   S(omega) = (gamma/pi) (uu^* / (gamma^2 + (omega - omega0)^2)
///                          + conj(u)u^T / (gamma^2 + (omega + omega0)^2)).
struct Concentrated {
  double omega0 = 0.0;
  VectorXcd u;
  double gamma = 1.0;
};

class SpectralDensity {
 public:
  using Form = std::variant<ConstantScalar, RationalCt, RationalDt, Concentrated>;

  SpectralDensity(ConstantScalar s);
  SpectralDensity(RationalCt s);
  SpectralDensity(RationalDt s);
  SpectralDensity(Concentrated s);

  const Form& form() const { return form_; }
  Index dimension() const;
  bool is_concentrated() const { return std::holds_alternative<Concentrated>(form_); }
  // True when S_T does not depend on the time scale.
  bool is_discrete() const {
    return std::holds_alternative<ConstantScalar>(form_) ||
           std::holds_alternative<RationalDt>(form_);
  }

  /// S(omega) on the imaginary axis. RationalDt needs the time scale to pull
  /// the density back through phi = -2 arctan(omega T).
  MatrixXcd at_frequency(double omega, const std::optional<TimeScale>& ts) const;

  /// S_T(phi) = S(-Omega tan(phi/2)). Continuous forms need the time scale.
  MatrixXcd on_circle(double phi, const std::optional<TimeScale>& ts) const;

 private:
  Form form_;
};

/// Midpoint nodes phi_j = -pi + (j + 1/2) 2 pi / N on the punctured circle,
/// symmetric about 0 and never touching +-pi. N must be a power of two.
class PhiGrid {
 public:
  explicit PhiGrid(std::size_t N = 4096, Execution exec = Execution::Parallel);

  std::size_t size() const { return N_; }
  double node(std::size_t j) const;
  double weight() const;
  Execution execution() const { return exec_; }

 private:
  std::size_t N_;
  Execution exec_;
};

enum class Side { LeftFstarF, RightGGstar };

/// OU weighting 2T / (1 + (omega T)^2).
double sigma(double omega, const TimeScale& ts);

MatrixXcd gram_ct(const CtStateSpace& sys, double omega, Side side);
MatrixXcd gram_dt(const DtStateSpace& sys, double phi, Side side);

/// RMS gain of sys under input density S, on the circle:
///   sqrt( int <Lambda_T, S_T> dphi / int Tr S_T dphi ).
/// The uniform grid is replaced by composite Gauss-Legendre panels clustered
/// around sharp features: Concentrated peaks, and poles or zeros within 64
/// grid steps of the unit circle.
double rms_gain(const CtStateSpace& sys, const SpectralDensity& S,
                const TimeScale& ts, const PhiGrid& grid = PhiGrid());

/// Input and output variances (1/2pi) int Tr S_T dphi and
/// (1/2pi) int <Lambda_T, S_T> dphi of a discrete system under S.
struct Variances {
  double input = 0.0;
  double output = 0.0;
};
Variances variances_dt(const DtStateSpace& sys, const SpectralDensity& S,
                       const PhiGrid& grid = PhiGrid(),
                       const std::optional<TimeScale>& ts = std::nullopt);

/// The same ratio evaluated on the real line with Sigma-weighted integrals,
/// without going through the discrete realization.
double rms_gain_omega(const CtStateSpace& sys, const SpectralDensity& S,
                      const TimeScale& ts, int panels = 512);

/// (1/sqrt(m)) ||F_T||_2 through the discrete Gramian.
double white_gain(const CtStateSpace& sys, const TimeScale& ts);

struct GainLimits {
  double limit_T_inf = 0.0;   // ||F(0)||_F / sqrt(m)
  double limit_T_zero = 0.0;  // ||D||_F / sqrt(m)
  std::optional<double> small_T_coeff;  // ||F||_2 sqrt(2/m), only when D = 0
};

GainLimits gain_limits(const CtStateSpace& sys);

/// Mean anisotropy of the discrete image of S,
///   -(1/4pi) int ln det(m S_T(phi) / E) dphi,  E = (1/2pi) int Tr S_T dphi.
/// Returns +infinity when S_T is singular on more than one node.
double mean_anisotropy(const SpectralDensity& S, const TimeScale& ts,
                       const PhiGrid& grid = PhiGrid());

/// (1/2pi) int ln det S_T dphi = ln det Gamma; -infinity when singular.
double innovations_logdet(const SpectralDensity& S, const PhiGrid& grid = PhiGrid(),
                          const std::optional<TimeScale>& ts = std::nullopt);

/// (1/2pi) int e^{i lag phi} S_T(phi) dphi = E(w_k w_{k+lag}^T).
MatrixXd autocovariance(const SpectralDensity& S, int lag,
                        const PhiGrid& grid = PhiGrid(),
                        const std::optional<TimeScale>& ts = std::nullopt);

/// rms_gain under Concentrated(omega0, u, gamma) for each gamma.
std::vector<double> concentrated_gain(const CtStateSpace& sys, const TimeScale& ts,
                                      double omega0, const VectorXcd& u,
                                      const std::vector<double>& gammas);

/// ||u||_{Lambda(omega0)} = sqrt(u^* Lambda(omega0) u), the gamma -> 0 limit.
double concentrated_limit(const CtStateSpace& sys, double omega0, const VectorXcd& u);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int order);

}  // namespace aninorm
