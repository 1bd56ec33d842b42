#include "cdpanel/estimators.hpp"

#include "cdpanel/linalg.hpp"

namespace cdpanel {

namespace {

// Pooled least squares over a set of transformed N x T panels: returns beta
// from sum_{i,t} xk(i,t) xl(i,t) and sum_{i,t} xk(i,t) y(i,t).
Vector pooled_ls(const std::vector<PanelMat>& xs, const PanelMat& y) {
  const int m = static_cast<int>(xs.size());
  Matrix s(m, m);
  Vector b(m);
  for (int k = 0; k < m; ++k) {
    for (int l = k; l < m; ++l) {
      const double v = xs[k].cwiseProduct(xs[l]).sum();
      s(k, l) = v;
      s(l, k) = v;
    }
    b[k] = xs[k].cwiseProduct(y).sum();
  }
  require_well_conditioned(s, "pooled regressor cross-product");
  return s.ldlt().solve(b);
}

}  // namespace

EstimatorOutput two_way_within_residuals(const PanelDataset& panel) {
  const int m = panel.n_regressors;
  PanelMat yt = two_way_demean(panel.y);
  EstimatorOutput out;
  if (m == 0) {
    out.beta_hat = Vector(0);
    out.residuals = make_residual_matrix(std::move(yt), ResidualSource::TwoWayFE);
    return out;
  }
  std::vector<PanelMat> xt;
  xt.reserve(m);
  for (const auto& xk : panel.x) xt.push_back(two_way_demean(xk));
  out.beta_hat = pooled_ls(xt, yt);
  PanelMat resid = yt;
  for (int k = 0; k < m; ++k) resid -= out.beta_hat[k] * xt[k];
  out.residuals = make_residual_matrix(std::move(resid), ResidualSource::TwoWayFE);
  return out;
}

Matrix factor_proxies(const PanelDataset& panel) {
  const int t = panel.n_periods;
  const int m = panel.n_regressors;
  Matrix f(t, m + 1);
  f.col(0) = panel.y.colwise().mean().transpose();
  for (int k = 0; k < m; ++k) f.col(k + 1) = panel.x[k].colwise().mean().transpose();
  return f;
}

EstimatorOutput cce_pooled(const PanelDataset& panel) {
  const int n = panel.n_units;
  const int t = panel.n_periods;
  const int m = panel.n_regressors;
  if (m < 1) fail(Errc::DimensionMismatch, "pooled CCE needs at least one regressor");
  if (t <= m + 1) fail(Errc::TooSmall, "pooled CCE needs T > m + 1");

  Matrix proxies = factor_proxies(panel);
  Eigen::ColPivHouseholderQR<Matrix> qr(proxies);
  if (qr.rank() < m + 1)
    fail(Errc::RankDeficientProxies, "proxy matrix [ybar, Xbar] has rank " +
                                         std::to_string(qr.rank()) + " < " + std::to_string(m + 1));
  const Matrix q = qr.householderQ() * Matrix::Identity(t, m + 1);

  // Annihilated data, unit by unit: M z = z - Q (Q'z).
  Matrix s = Matrix::Zero(m, m);
  Vector b = Vector::Zero(m);
  Matrix my(t, n);   // columns are M y_i
  Matrix mx(t, n * m);
  Matrix xi(t, m);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) xi.col(k) = panel.x[k].row(i).transpose();
    const Vector yi = panel.y.row(i).transpose();
    Matrix mxi = xi - q * (q.transpose() * xi);
    Vector myi = yi - q * (q.transpose() * yi);
    s.noalias() += mxi.transpose() * mxi;
    b.noalias() += mxi.transpose() * myi;
    my.col(i) = myi;
    mx.middleCols(i * m, m) = mxi;
  }
  require_well_conditioned(s, "annihilated regressor cross-product");
  const Vector beta = s.ldlt().solve(b);

  PanelMat resid(n, t);
  Matrix loadings(n, m + 1);
  for (int i = 0; i < n; ++i) {
    const Vector ei = my.col(i) - mx.middleCols(i * m, m) * beta;
    resid.row(i) = ei.transpose();
    // lambda_i solves proxies * lambda = y_i - X_i beta in least squares.
    Vector di = panel.y.row(i).transpose();
    for (int k = 0; k < m; ++k) di -= beta[k] * panel.x[k].row(i).transpose();
    loadings.row(i) = qr.solve(di).transpose();
  }

  EstimatorOutput out;
  out.beta_hat = beta;
  out.residuals = make_residual_matrix(std::move(resid), ResidualSource::CCEPooled);
  out.factor_proxies = std::move(proxies);
  out.loadings_hat = std::move(loadings);
  out.mx_crossprod_sum = std::move(s);
  return out;
}

EstimatorOutput fd_time_dummies_residuals(const PanelDataset& panel) {
  const int t = panel.n_periods;
  const int m = panel.n_regressors;
  if (t < 4) fail(Errc::TooSmall, "first differencing needs T >= 4");

  const auto diff = [t](const PanelMat& z) -> PanelMat {
    return z.rightCols(t - 1) - z.leftCols(t - 1);
  };
  PanelMat dy = column_demean(diff(panel.y));
  EstimatorOutput out;
  if (m == 0) {
    out.beta_hat = Vector(0);
    out.residuals = make_residual_matrix(std::move(dy), ResidualSource::FirstDiffTimeDummies);
    return out;
  }
  std::vector<PanelMat> dx;
  dx.reserve(m);
  for (const auto& xk : panel.x) dx.push_back(column_demean(diff(xk)));
  out.beta_hat = pooled_ls(dx, dy);
  PanelMat resid = dy;
  for (int k = 0; k < m; ++k) resid -= out.beta_hat[k] * dx[k];
  out.residuals = make_residual_matrix(std::move(resid), ResidualSource::FirstDiffTimeDummies);
  return out;
}

}  // namespace cdpanel
