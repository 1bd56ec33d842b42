#pragma once

#include <Eigen/Dense>

namespace cdpanel {

// Panels are stored unit-by-row, period-by-column. Row-major storage keeps a
// unit's time series contiguous, which is what the pairwise loops stream over.
using PanelMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace cdpanel
