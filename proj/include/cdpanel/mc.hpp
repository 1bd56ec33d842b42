#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cdpanel/cd.hpp"
#include "cdpanel/dgp.hpp"

namespace cdpanel {

enum class EstimatorKind { TwoWayFE, CCEPooled };

const char* estimator_name(EstimatorKind k);

struct ExperimentDesign {
  DgpConfig dgp;
  EstimatorKind estimator = EstimatorKind::TwoWayFE;
  std::vector<CdVariant> statistics = {CdVariant::CD};
  int replications = 2000;
  double significance_level = 0.05;
  std::uint64_t master_seed = 42;
  int n_draws = 30;  // G, for the averaged variants

  void validate() const;
};

struct StatSummary {
  CdVariant variant = CdVariant::CD;
  double mean = 0.0;
  double variance = 0.0;  // sample variance over successful replications
  double rejection_rate = 0.0;
  double mc_se = 0.0;  // standard error of the reported mean
  int n = 0;
};

struct CellSummary {
  std::vector<StatSummary> stats;
  int replications = 0;
  int failures = 0;
  std::uint64_t master_seed = 0;
  double wall_seconds = 0.0;
};

// Runs one design cell. Replication r uses the streams derived from
// (master_seed, r); aggregation walks the replications in index order, so the
// summary is bitwise identical for any worker count. Replications whose
// estimation fails are excluded and counted; the cell fails if more than 1%
// fail.
CellSummary run_cell(const ExperimentDesign& design, int n_workers = 0);

// Everything except the wall clock, which is the only nondeterministic field.
bool summaries_identical(const CellSummary& a, const CellSummary& b);

double rejection_rate(const std::vector<CdResult>& stats, double level);

}  // namespace cdpanel
