#pragma once

#include <cstdint>

#include "cdpanel/estimators.hpp"
#include "cdpanel/panel.hpp"
#include "cdpanel/weights.hpp"

namespace cdpanel {

struct CorrelationMatrix {
  Matrix rho;  // N x N, symmetric, unit diagonal
};

// Pairwise correlation of unit series: residuals are demeaned over t for every
// source (the estimators already enforce zero means, demeaning keeps the
// statistic identical to its published form for raw inputs too).
CorrelationMatrix pairwise_correlations(const ResidualMatrix& res);

// CD = sqrt(2 T / (N (N-1))) * sum_{i>j} rho_ij, with T = effective_T.
CdResult cd(const ResidualMatrix& res);

// CD_W: weighted cross-section covariances, normalized by the pooled second
// moment of the weighted residuals. Residuals enter raw (no studentization).
CdResult cd_weighted(const ResidualMatrix& res, const WeightVector& w);

// CD_W+ = CD_W + sum of |rho_ij| strictly above the screening threshold
// 2 sqrt(ln N / T). aux records the exceedance count and the threshold.
CdResult cd_power_enhanced(const ResidualMatrix& res, const WeightVector& w);

// Average of G weighted statistics over independent Rademacher draws,
// scaled by 1/sqrt(G). The screening term does not depend on the weights, so
// the enhanced average adds it once on top of the averaged weighted part.
// aux records the per-draw weighted statistics and their 0.1/0.5/0.9 quantiles.
CdResult cd_weighted_averaged(const ResidualMatrix& res, int n_draws, std::uint64_t seed,
                              bool enhanced);

// Serial-correlation-robust analogue of cd_weighted_averaged.
CdResult serial_robust_cd_weighted_averaged(const ResidualMatrix& res, int n_draws,
                                            std::uint64_t seed, bool enhanced);

// Analytic bias correction for residuals from models with estimated period
// effects (two-way FE, FD with year dummies, or raw time-demeaned data).
CdResult cd_bias_corrected_2wfe(const ResidualMatrix& res);

// Analytic bias correction for pooled-CCE residuals; needs the loading
// estimates carried in the estimator output.
CdResult cd_bias_corrected_cce(const EstimatorOutput& out);

// CD_W with the plug-in long-run variance Omega_N built from l_i = (w_i - wbar) e_i.
CdResult serial_robust_cd_weighted(const ResidualMatrix& res, const WeightVector& w);

// 2 sqrt(ln N / T); the screening threshold for the power-enhanced statistic.
double screening_threshold(int n_units, int effective_T);

// Interpolating sample quantile (linear between order statistics).
double sample_quantile(std::vector<double> values, double p);

}  // namespace cdpanel
