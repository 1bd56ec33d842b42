#pragma once

#include <optional>

#include "cdpanel/panel.hpp"

namespace cdpanel {

struct EstimatorOutput {
  Vector beta_hat;  // length m (empty when m == 0)
  ResidualMatrix residuals;
  // CCE only: T x (m+1) proxy matrix [ybar, Xbar] and the per-unit loading
  // estimates on it (N x (m+1)), needed by the bias-corrected statistic.
  std::optional<Matrix> factor_proxies;
  std::optional<Matrix> loadings_hat;
  // CCE only: sum_i Xi' M Xi, reused by the bias correction as T * sum_i Sigma_i.
  std::optional<Matrix> mx_crossprod_sum;
};

// Two-way within transform (unit and period demeaning) followed by pooled
// least squares. Residual row sums and column sums vanish by construction.
EstimatorOutput two_way_within_residuals(const PanelDataset& panel);

// Period-wise cross-section averages [ybar, X1bar, ..., Xmbar], T x (m+1).
Matrix factor_proxies(const PanelDataset& panel);

// Pooled CCE: project the proxies out of every unit via an orthonormal basis
// of their column space, then pooled least squares on the annihilated data.
EstimatorOutput cce_pooled(const PanelDataset& panel);

// First differences over t followed by per-period cross-section demeaning
// (year dummies) and pooled least squares; effective_T = T - 1.
EstimatorOutput fd_time_dummies_residuals(const PanelDataset& panel);

}  // namespace cdpanel
