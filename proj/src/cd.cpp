#include "cdpanel/cd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "cdpanel/linalg.hpp"
#include "cdpanel/rng.hpp"

namespace cdpanel {

namespace {

// Row-demeaned residuals and the squared norms of the demeaned rows.
// DegenerateSeries when a unit has (numerically) no time variation.
std::pair<PanelMat, Vector> demeaned_rows(const ResidualMatrix& res) {
  PanelMat dem = row_demean(res.e);
  Vector ssq(dem.rows());
  for (Eigen::Index i = 0; i < dem.rows(); ++i) {
    const double s = dem.row(i).squaredNorm();
    const double raw = res.e.row(i).squaredNorm();
    if (s <= 1e-26 * (raw + 1e-300) || s == 0.0)
      fail(Errc::DegenerateSeries, "unit " + std::to_string(i) + " has zero time variance");
    ssq[i] = s;
  }
  return {std::move(dem), std::move(ssq)};
}

CdResult finish(double statistic, CdVariant variant, const ResidualMatrix& res) {
  CdResult r;
  r.statistic = statistic;
  r.variant = variant;
  r.p_value = p_value(statistic);
  r.n_units = res.n_units();
  r.n_periods = res.effective_T;
  return r;
}

// sum_{i>j} w_i e_it w_j e_jt summed over t, in O(NT) via column sums.
double weighted_pair_sum(const PanelMat& e, const Vector& w, double* sum_sq_out) {
  const Eigen::Index t_len = e.cols();
  double pair_sum = 0.0;
  double sum_sq = 0.0;
  Eigen::RowVectorXd col = Eigen::RowVectorXd::Zero(t_len);
  Eigen::RowVectorXd sq = Eigen::RowVectorXd::Zero(t_len);
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    col += w[i] * e.row(i);
    sq += (w[i] * e.row(i)).array().square().matrix();
  }
  pair_sum = 0.5 * (col.squaredNorm() - sq.sum());
  sum_sq = sq.sum();
  if (sum_sq_out) *sum_sq_out = sum_sq;
  return pair_sum;
}

struct ScreeningSummary {
  double sum_abs = 0.0;
  int exceed_count = 0;
  double threshold = 0.0;
};

ScreeningSummary screening_sum(const ResidualMatrix& res) {
  const CorrelationMatrix corr = pairwise_correlations(res);
  ScreeningSummary s;
  s.threshold = screening_threshold(res.n_units(), res.effective_T);
  const Eigen::Index n = corr.rho.rows();
  for (Eigen::Index i = 1; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) {
      const double a = std::abs(corr.rho(i, j));
      if (a > s.threshold) {
        s.sum_abs += a;
        ++s.exceed_count;
      }
    }
  return s;
}

void check_weights(const ResidualMatrix& res, const WeightVector& w) {
  if (w.size() != res.e.rows())
    fail(Errc::LengthMismatch, "weight vector length " + std::to_string(w.size()) +
                                   " does not match N = " + std::to_string(res.e.rows()));
}

std::string draw_key(int g) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "draw_%04d", g);
  return buf;
}

CdResult averaged_impl(const ResidualMatrix& res, int n_draws, std::uint64_t seed, bool enhanced,
                       bool robust) {
  if (n_draws < 1) fail(Errc::EmptyInput, "averaging needs G >= 1 draws");
  const Eigen::Index n = res.e.rows();
  std::vector<double> draws(n_draws);
  for (int g = 0; g < n_draws; ++g) {
    const WeightVector w = rademacher(RngStream{seed, static_cast<std::uint64_t>(g)}, n);
    draws[g] = robust ? serial_robust_cd_weighted(res, w).statistic
                      : cd_weighted(res, w).statistic;
  }
  double sum = 0.0;
  for (double d : draws) sum += d;
  double statistic = sum / std::sqrt(static_cast<double>(n_draws));

  CdResult r = finish(statistic, enhanced ? CdVariant::CD_Wplus_avg : CdVariant::CD_W_avg, res);
  if (enhanced) {
    // The screening term is weight-free, so it enters the average once.
    const ScreeningSummary s = screening_sum(res);
    r.statistic += s.sum_abs;
    r.p_value = p_value(r.statistic);
    r.aux["screen_sum"] = s.sum_abs;
    r.aux["exceed_count"] = static_cast<double>(s.exceed_count);
    r.aux["threshold"] = s.threshold;
  }
  for (int g = 0; g < n_draws; ++g) r.aux[draw_key(g)] = draws[g];
  r.aux["q10"] = sample_quantile(draws, 0.1);
  r.aux["q50"] = sample_quantile(draws, 0.5);
  r.aux["q90"] = sample_quantile(draws, 0.9);
  return r;
}

}  // namespace

double screening_threshold(int n_units, int effective_T) {
  return 2.0 * std::sqrt(std::log(static_cast<double>(n_units)) / effective_T);
}

double sample_quantile(std::vector<double> values, double p) {
  if (values.empty()) fail(Errc::EmptyInput, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

CorrelationMatrix pairwise_correlations(const ResidualMatrix& res) {
  auto [dem, ssq] = demeaned_rows(res);
  const Vector inv_norm = ssq.cwiseSqrt().cwiseInverse();
  PanelMat scaled = inv_norm.asDiagonal() * dem;
  Matrix rho = scaled * scaled.transpose();
  rho.diagonal().setOnes();
  return CorrelationMatrix{std::move(rho)};
}

CdResult cd(const ResidualMatrix& res) {
  auto [dem, ssq] = demeaned_rows(res);
  const Eigen::Index n = dem.rows();
  const double t_eff = res.effective_T;
  Eigen::RowVectorXd col_sum = Eigen::RowVectorXd::Zero(dem.cols());
  for (Eigen::Index i = 0; i < n; ++i) col_sum += dem.row(i) / std::sqrt(ssq[i]);
  const double pair_sum = 0.5 * (col_sum.squaredNorm() - static_cast<double>(n));
  const double statistic =
      std::sqrt(2.0 * t_eff / (static_cast<double>(n) * (static_cast<double>(n) - 1.0))) * pair_sum;
  return finish(statistic, CdVariant::CD, res);
}

CdResult cd_weighted(const ResidualMatrix& res, const WeightVector& w) {
  check_weights(res, w);
  const Eigen::Index n = res.e.rows();
  const double t_eff = res.effective_T;
  double sum_sq = 0.0;
  const double pair_sum = weighted_pair_sum(res.e, w.w, &sum_sq);
  const double denom = sum_sq / (static_cast<double>(n) * t_eff);
  if (!(denom > 0.0)) fail(Errc::ZeroDenominator, "weighted residual second moment is zero");
  const double scale =
      std::sqrt(2.0 / (t_eff * static_cast<double>(n) * (static_cast<double>(n) - 1.0)));
  CdResult r = finish(scale * pair_sum / denom, CdVariant::CD_W, res);
  r.aux["denominator"] = denom;
  return r;
}

CdResult cd_power_enhanced(const ResidualMatrix& res, const WeightVector& w) {
  CdResult base = cd_weighted(res, w);
  const ScreeningSummary s = screening_sum(res);
  CdResult r = finish(base.statistic + s.sum_abs, CdVariant::CD_Wplus, res);
  r.aux["screen_sum"] = s.sum_abs;
  r.aux["exceed_count"] = static_cast<double>(s.exceed_count);
  r.aux["threshold"] = s.threshold;
  return r;
}

CdResult cd_weighted_averaged(const ResidualMatrix& res, int n_draws, std::uint64_t seed,
                              bool enhanced) {
  return averaged_impl(res, n_draws, seed, enhanced, /*robust=*/false);
}

CdResult serial_robust_cd_weighted_averaged(const ResidualMatrix& res, int n_draws,
                                            std::uint64_t seed, bool enhanced) {
  return averaged_impl(res, n_draws, seed, enhanced, /*robust=*/true);
}

CdResult cd_bias_corrected_2wfe(const ResidualMatrix& res) {
  if (res.source == ResidualSource::CCEPooled)
    fail(Errc::WrongResidualSource, "use the CCE bias correction for pooled-CCE residuals");
  const Eigen::Index n = res.e.rows();
  const double t_eff = res.effective_T;
  const double n_d = static_cast<double>(n);

  Vector sigma2 = res.e.rowwise().squaredNorm() / t_eff;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(sigma2[i] > 0.0))
      fail(Errc::ZeroVariance, "unit " + std::to_string(i) + " has zero residual variance");
  const Vector sigma = sigma2.cwiseSqrt();
  const double mean_inv = sigma.cwiseInverse().mean();

  const double xi_hat = std::sqrt(1.0 / (2.0 * n_d * (n_d - 1.0))) *
                        ((1.0 - sigma.array() * mean_inv).square().sum() - n_d);
  // sqrt(2(N-1)/N) * xi_hat + 1 is the sample analogue of
  // 1 - 2 E[s]E[1/s] + E[s^2]E[1/s]^2, whose square is the limit variance.
  const double omega_root = 1.0 + std::sqrt(2.0 * (n_d - 1.0) / n_d) * xi_hat;
  const double omega_hat = omega_root * omega_root;
  if (!(omega_hat > 1e-300)) fail(Errc::ZeroDenominator, "estimated variance is zero");

  const double cd_raw = cd(res).statistic;
  CdResult r = finish((cd_raw - std::sqrt(t_eff) * xi_hat) / std::sqrt(omega_hat),
                      CdVariant::CD_BC, res);
  r.aux["xi_hat"] = xi_hat;
  r.aux["omega_hat"] = omega_hat;
  r.aux["cd_raw"] = cd_raw;
  return r;
}

CdResult cd_bias_corrected_cce(const EstimatorOutput& out) {
  const ResidualMatrix& res = out.residuals;
  if (res.source != ResidualSource::CCEPooled)
    fail(Errc::WrongResidualSource, "CCE bias correction needs pooled-CCE residuals");
  if (!out.loadings_hat || !out.mx_crossprod_sum)
    fail(Errc::MissingLoadings, "estimator output lacks loading estimates");

  const Eigen::Index n = res.e.rows();
  const double n_d = static_cast<double>(n);
  const double t_eff = res.effective_T;
  const int m = static_cast<int>(out.beta_hat.size());

  Vector sigma2 = res.e.rowwise().squaredNorm() / t_eff;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(sigma2[i] > 0.0))
      fail(Errc::ZeroVariance, "unit " + std::to_string(i) + " has zero residual variance");
  const Vector sigma = sigma2.cwiseSqrt();
  const double mean_inv = sigma.cwiseInverse().mean();
  const double sigma2_sum = sigma2.sum();
  const double sigma_sum = sigma.sum();

  Matrix b_hat = Matrix::Zero(m + 1, m + 1);
  b_hat(0, 0) = 1.0;
  b_hat.block(1, 0, m, 1) = out.beta_hat;
  b_hat.block(1, 1, m, m) = Matrix::Identity(m, m);

  const Vector lambda_bar = out.loadings_hat->colwise().mean().transpose();
  Matrix mid = Matrix::Zero(m + 1, m + 1);
  mid(0, 0) = sigma2_sum;
  mid.block(1, 1, m, m) = *out.mx_crossprod_sum / t_eff;  // sum_i Sigma_i

  const double k = std::sqrt(1.0 / (2.0 * n_d * (n_d - 1.0)));
  const Vector bl = b_hat * lambda_bar;
  const double phi1 = k * mean_inv * mean_inv * (bl.transpose() * mid * bl).value();
  // the inner expectation of the cross term is E[sigma_i], hence first moments
  const double phi2 = k * mean_inv * lambda_bar[0] * sigma_sum;
  const double bias = phi1 - 2.0 * phi2;

  const double omega_root = 1.0 + std::sqrt(2.0 * (n_d - 1.0) / n_d) * bias;
  const double omega_hat = omega_root * omega_root;
  if (!(omega_hat > 1e-300)) fail(Errc::ZeroDenominator, "estimated variance is zero");

  const double cd_raw = cd(res).statistic;
  CdResult r = finish((cd_raw - std::sqrt(t_eff) * bias) / std::sqrt(omega_hat),
                      CdVariant::CD_BC, res);
  r.aux["phi1_hat"] = phi1;
  r.aux["phi2_hat"] = phi2;
  r.aux["omega_hat"] = omega_hat;
  r.aux["cd_raw"] = cd_raw;
  return r;
}

CdResult serial_robust_cd_weighted(const ResidualMatrix& res, const WeightVector& w) {
  check_weights(res, w);
  const Eigen::Index n = res.e.rows();
  const double n_d = static_cast<double>(n);
  const double t_eff = res.effective_T;

  double sum_sq = 0.0;
  const double pair_sum = weighted_pair_sum(res.e, w.w, &sum_sq);
  const double scale = std::sqrt(2.0 / (t_eff * n_d * (n_d - 1.0)));

  const double w_bar = w.w.mean();
  PanelMat l = (w.w.array() - w_bar).matrix().asDiagonal() * res.e;
  Matrix gram = l * l.transpose();
  const double off_diag_sq = 0.5 * (gram.squaredNorm() - gram.diagonal().squaredNorm());
  const double omega_n = 2.0 / (t_eff * n_d * (n_d - 1.0)) * off_diag_sq;
  if (!(omega_n > 1e-300)) fail(Errc::ZeroDenominator, "plug-in variance Omega_N is zero");

  CdResult r = finish(scale * pair_sum / std::sqrt(omega_n), CdVariant::CD_W_SC, res);
  r.aux["omega_hat"] = omega_n;
  return r;
}

}  // namespace cdpanel
