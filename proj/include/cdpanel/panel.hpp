#pragma once

#include <map>
#include <string>
#include <vector>

#include "cdpanel/errors.hpp"
#include "cdpanel/types.hpp"

namespace cdpanel {

// Balanced panel: y is N x T, x holds one N x T matrix per regressor.
// Immutable after validation; safe to share across workers.
struct PanelDataset {
  PanelMat y;
  std::vector<PanelMat> x;
  int n_units = 0;
  int n_periods = 0;
  int n_regressors = 0;
};

// Checks shapes, finiteness and minimum sizes (N >= 3, T >= 3) and records the
// dimension fields. Idempotent: validating a valid panel reproduces it.
PanelDataset validate_panel(PanelMat y, std::vector<PanelMat> x);

enum class ResidualSource { TwoWayFE, CCEPooled, FirstDiffTimeDummies, Raw };

const char* residual_source_name(ResidualSource s);

struct ResidualMatrix {
  PanelMat e;  // N x effective_T
  ResidualSource source = ResidualSource::Raw;
  int effective_T = 0;

  int n_units() const { return static_cast<int>(e.rows()); }
};

// Validates the per-source structure:
//   TwoWayFE              row sums and column sums vanish (1e-8 * ||e||_F),
//   CCEPooled, FD+dummies column sums vanish,
//   any source            no unit may be a constant series unless e == 0
//                         (an exact fit is a legitimate all-zero residual).
ResidualMatrix make_residual_matrix(PanelMat e, ResidualSource source);

enum class CdVariant { CD, CD_W, CD_Wplus, CD_W_avg, CD_Wplus_avg, CD_BC, CD_W_SC };

const char* variant_name(CdVariant v);

struct CdResult {
  double statistic = 0.0;
  CdVariant variant = CdVariant::CD;
  double p_value = 1.0;
  int n_units = 0;
  int n_periods = 0;
  std::map<std::string, double> aux;
};

// Two-sided standard normal p-value, 2(1 - Phi(|z|)).
double p_value(double statistic);

}  // namespace cdpanel
