#include "cdpanel/mc.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace cdpanel {

const char* estimator_name(EstimatorKind k) {
  return k == EstimatorKind::TwoWayFE ? "2wfe" : "cce";
}

void ExperimentDesign::validate() const {
  dgp.validate();
  if (replications < 1) fail(Errc::BadInterval, "R must be at least 1");
  if (!(significance_level > 0.0 && significance_level < 1.0))
    fail(Errc::BadInterval, "significance level must lie in (0,1)");
  if (n_draws < 1) fail(Errc::BadInterval, "G must be at least 1");
  if (statistics.empty()) fail(Errc::EmptyInput, "no statistics requested");
}

namespace {

struct RepValues {
  bool failed = false;
  // statistic value and p-value per requested variant, in request order
  std::vector<std::pair<double, double>> values;
};

// Neumaier compensated sum; the aggregation order is fixed (replication index),
// so totals are bitwise reproducible for any worker count.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

RepValues run_replication(const ExperimentDesign& d, int rep) {
  RepValues out;
  const RngStream base{d.master_seed, static_cast<std::uint64_t>(rep)};

  SimulatedPanel sp;
  EstimatorOutput est;
  try {
    sp = simulate(d.dgp, base);
    est = d.estimator == EstimatorKind::TwoWayFE ? two_way_within_residuals(sp.panel)
                                                 : cce_pooled(sp.panel);
  } catch (const Error&) {
    out.failed = true;
    return out;
  }
  const ResidualMatrix& res = est.residuals;

  // One Rademacher draw per replication, shared by the weighted variants.
  WeightVector w;
  const auto need_weights = [&] {
    for (CdVariant v : d.statistics)
      if (v == CdVariant::CD_W || v == CdVariant::CD_Wplus || v == CdVariant::CD_W_SC) return true;
    return false;
  };
  if (need_weights()) w = rademacher(substream(base, kChWeights), res.e.rows());

  out.values.reserve(d.statistics.size());
  for (CdVariant v : d.statistics) {
    try {
      CdResult r;
      switch (v) {
        case CdVariant::CD: r = cd(res); break;
        case CdVariant::CD_W: r = cd_weighted(res, w); break;
        case CdVariant::CD_Wplus: r = cd_power_enhanced(res, w); break;
        case CdVariant::CD_W_SC: r = serial_robust_cd_weighted(res, w); break;
        case CdVariant::CD_W_avg:
        case CdVariant::CD_Wplus_avg: {
          const std::uint64_t avg_seed =
              derive_seed(d.master_seed, 0xA5A5A5A5u ^ static_cast<std::uint64_t>(rep));
          r = cd_weighted_averaged(res, d.n_draws, avg_seed, v == CdVariant::CD_Wplus_avg);
          break;
        }
        case CdVariant::CD_BC:
          r = d.estimator == EstimatorKind::CCEPooled ? cd_bias_corrected_cce(est)
                                                      : cd_bias_corrected_2wfe(res);
          break;
      }
      out.values.emplace_back(r.statistic, r.p_value);
    } catch (const Error&) {
      out.failed = true;
      out.values.clear();
      return out;
    }
  }
  return out;
}

}  // namespace

CellSummary run_cell(const ExperimentDesign& design, int n_workers) {
  design.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int reps = design.replications;
  if (n_workers <= 0) {
    n_workers = static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers <= 0) n_workers = 1;
  }
  n_workers = std::min(n_workers, reps);

  std::vector<RepValues> slots(reps);
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1, std::memory_order_relaxed);
      if (r >= reps) return;
      slots[r] = run_replication(design, r);
    }
  };
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  CellSummary summary;
  summary.replications = reps;
  summary.master_seed = design.master_seed;
  const int n_stats = static_cast<int>(design.statistics.size());
  std::vector<CompensatedSum> sums(n_stats);
  std::vector<int> reject(n_stats, 0);
  int ok = 0;
  for (const RepValues& rv : slots) {
    if (rv.failed) {
      ++summary.failures;
      continue;
    }
    ++ok;
    for (int s = 0; s < n_stats; ++s) {
      sums[s].add(rv.values[s].first);
      if (rv.values[s].second < design.significance_level) ++reject[s];
    }
  }
  if (summary.failures > 0.01 * reps)
    fail(Errc::CellFailure, std::to_string(summary.failures) + " of " + std::to_string(reps) +
                                " replications failed");
  summary.stats.resize(n_stats);
  for (int s = 0; s < n_stats; ++s) {
    StatSummary& st = summary.stats[s];
    st.variant = design.statistics[s];
    st.n = ok;
    st.mean = ok > 0 ? sums[s].value() / ok : 0.0;
    CompensatedSum ssq;
    for (const RepValues& rv : slots) {
      if (rv.failed) continue;
      const double d = rv.values[s].first - st.mean;
      ssq.add(d * d);
    }
    st.variance = ok > 1 ? ssq.value() / (ok - 1) : 0.0;
    st.rejection_rate = ok > 0 ? static_cast<double>(reject[s]) / ok : 0.0;
    st.mc_se = ok > 0 ? std::sqrt(st.variance / ok) : 0.0;
  }
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return summary;
}

bool summaries_identical(const CellSummary& a, const CellSummary& b) {
  if (a.replications != b.replications || a.failures != b.failures ||
      a.master_seed != b.master_seed || a.stats.size() != b.stats.size())
    return false;
  for (std::size_t s = 0; s < a.stats.size(); ++s) {
    const StatSummary& x = a.stats[s];
    const StatSummary& y = b.stats[s];
    if (x.variant != y.variant || x.n != y.n || x.mean != y.mean || x.variance != y.variance ||
        x.rejection_rate != y.rejection_rate || x.mc_se != y.mc_se)
      return false;
  }
  return true;
}

double rejection_rate(const std::vector<CdResult>& stats, double level) {
  if (stats.empty()) fail(Errc::EmptyInput, "rejection rate of an empty sample");
  int count = 0;
  for (const CdResult& r : stats)
    if (r.p_value < level) ++count;
  return static_cast<double>(count) / static_cast<double>(stats.size());
}

}  // namespace cdpanel
