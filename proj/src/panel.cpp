#include "cdpanel/panel.hpp"

#include <cmath>

namespace cdpanel {

PanelDataset validate_panel(PanelMat y, std::vector<PanelMat> x) {
  const Eigen::Index n = y.rows();
  const Eigen::Index t = y.cols();
  if (n < 3 || t < 3)
    fail(Errc::TooSmall, "panel needs N >= 3 and T >= 3, got N=" + std::to_string(n) +
                             " T=" + std::to_string(t));
  if (!y.allFinite()) fail(Errc::NonFiniteValue, "regressand contains a non-finite value");
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k].rows() != n || x[k].cols() != t)
      fail(Errc::DimensionMismatch, "regressor " + std::to_string(k + 1) + " is " +
                                        std::to_string(x[k].rows()) + "x" +
                                        std::to_string(x[k].cols()) + ", expected " +
                                        std::to_string(n) + "x" + std::to_string(t));
    if (!x[k].allFinite())
      fail(Errc::NonFiniteValue, "regressor " + std::to_string(k + 1) + " contains a non-finite value");
  }
  PanelDataset panel;
  panel.y = std::move(y);
  panel.x = std::move(x);
  panel.n_units = static_cast<int>(n);
  panel.n_periods = static_cast<int>(t);
  panel.n_regressors = static_cast<int>(panel.x.size());
  return panel;
}

const char* residual_source_name(ResidualSource s) {
  switch (s) {
    case ResidualSource::TwoWayFE: return "TwoWayFE";
    case ResidualSource::CCEPooled: return "CCEPooled";
    case ResidualSource::FirstDiffTimeDummies: return "FirstDiffTimeDummies";
    case ResidualSource::Raw: return "Raw";
  }
  return "?";
}

ResidualMatrix make_residual_matrix(PanelMat e, ResidualSource source) {
  if (e.rows() < 2 || e.cols() < 2)
    fail(Errc::TooSmall, "residual matrix needs at least 2 units and 2 periods");
  if (!e.allFinite()) fail(Errc::NonFiniteValue, "residual matrix contains a non-finite value");

  const double norm = e.norm();
  if (norm > 0.0) {
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
      if (e.row(i).maxCoeff() == e.row(i).minCoeff())
        fail(Errc::DegenerateSeries,
             "unit " + std::to_string(i) + " has a constant residual series");
    }
  }
  // Relative tolerance, with an absolute floor so numerically-exact fits
  // (residuals at rounding level) pass their own structure check.
  const double floor_abs =
      1e-12 * std::sqrt(static_cast<double>(e.rows() * e.cols())) * (1.0 + e.cwiseAbs().maxCoeff());
  const double tol = 1e-8 * norm + floor_abs;
  const auto check_col_sums = [&] {
    const double worst = e.colwise().sum().cwiseAbs().maxCoeff();
    if (worst > tol)
      fail(Errc::ResidualStructure, "column sums of residuals do not vanish (max " +
                                        std::to_string(worst) + ")");
  };
  switch (source) {
    case ResidualSource::TwoWayFE: {
      const double worst_row = e.rowwise().sum().cwiseAbs().maxCoeff();
      if (worst_row > tol)
        fail(Errc::ResidualStructure,
             "row sums of two-way FE residuals do not vanish (max " + std::to_string(worst_row) + ")");
      check_col_sums();
      break;
    }
    case ResidualSource::CCEPooled:
    case ResidualSource::FirstDiffTimeDummies:
      check_col_sums();
      break;
    case ResidualSource::Raw:
      break;
  }

  ResidualMatrix res;
  res.effective_T = static_cast<int>(e.cols());
  res.e = std::move(e);
  res.source = source;
  return res;
}

const char* variant_name(CdVariant v) {
  switch (v) {
    case CdVariant::CD: return "CD";
    case CdVariant::CD_W: return "CD_W";
    case CdVariant::CD_Wplus: return "CD_W+";
    case CdVariant::CD_W_avg: return "CDbar_W";
    case CdVariant::CD_Wplus_avg: return "CDbar_W+";
    case CdVariant::CD_BC: return "CD_BC";
    case CdVariant::CD_W_SC: return "CD_W_SC";
  }
  return "?";
}

double p_value(double statistic) {
  if (!std::isfinite(statistic)) fail(Errc::NonFiniteValue, "p_value needs a finite statistic");
  return std::erfc(std::abs(statistic) / std::sqrt(2.0));
}

}  // namespace cdpanel
