#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "cdpanel/panel.hpp"
#include "cdpanel/rng.hpp"

namespace cdpanel {

enum class LoadingCase { I_symmetric, II_skewed };
enum class ErrorCase { i_normal, ii_chi2 };
enum class VarianceCase { a_independent, b_loading_function };
// Divisor of the chi^2(2) deviation in variance case (a):
//   sqrt24  -> Var[sigma^2] = c^2 / 6
//   four    -> Var[sigma^2] = c^2 / 4
enum class VarADivisor { sqrt24, four };

struct DgpConfig {
  int n_units = 0;
  int n_periods = 0;
  int n_regressors = 1;  // the simulation design has a single regressor
  int n_factors = 2;
  LoadingCase loading_case = LoadingCase::I_symmetric;
  ErrorCase error_case = ErrorCase::i_normal;
  VarianceCase variance_case = VarianceCase::a_independent;
  double c_sigma = 1.0;  // case (a) only; 0 gives homogeneous unit variances
  double beta = 1.0;
  bool two_way_restricted = false;  // f_t = [f, 1], lambda_i = [1, .], Lambda_i = [1, .]

  // The published design is ambiguous in a few places; each reading is a knob.
  VarADivisor variance_a_divisor = VarADivisor::sqrt24;
  bool variance_b_intercept = true;          // include the 0.5 shift in case (b)
  bool lambda_x_first_wide = true;           // Lambda_i element 1 ~ U(0.5,1.5), rest U(-.5,.5)
  double sym_loading_halfwidth = 0.75;       // case (I): lambda deviations ~ U(-h, h)
  double skew_loading_variance = 1.0 / 6.0;  // case (II): variance of the chi^2 deviations

  void validate() const;
};

// Everything the generator drew, kept so tests can check the exact identity
// y = beta x + lambda'f + sigma eps.
struct DgpTruth {
  Matrix lambda_y;  // N x r
  Matrix lambda_x;  // N x r (single regressor)
  Matrix f;         // T x r
  Vector sigma2;    // N
  PanelMat eps;     // N x T
  int variance_redraws = 0;
};

struct SimulatedPanel {
  PanelDataset panel;
  DgpTruth truth;
};

// Substream channels carved out of one replication stream.
inline constexpr std::uint64_t kStreamChannels = 16;
enum : std::uint64_t {
  kChFactors = 0,
  kChLoadingsY = 1,
  kChLoadingsX = 2,
  kChEps = 3,
  kChE = 4,
  kChVariance = 5,
  kChWeights = 6,
};

inline RngStream substream(RngStream base, std::uint64_t channel) {
  return RngStream{base.seed, base.stream_id * kStreamChannels + channel};
}

// Draws (lambda_y, lambda_x); entries are drawn unit-major so the sequence is
// identical across apparatus that consumes them.
std::pair<Matrix, Matrix> draw_loadings(const DgpConfig& config, RngStream stream);

// Unit-specific error variances. Case (a) redraws nonpositive values and
// counts the redraws; case (b) needs the loadings and factors.
Vector draw_variances(const DgpConfig& config, const Matrix& lambda_y, const Matrix& f,
                      RngStream stream, int* redraws = nullptr);

SimulatedPanel simulate(const DgpConfig& config, RngStream stream);

// key=value serialization (one pair per line, '#' comments).
std::string dgp_config_to_kv(const DgpConfig& config);
DgpConfig dgp_config_from_kv(std::istream& in);
DgpConfig load_dgp_config(const std::string& path);

}  // namespace cdpanel
