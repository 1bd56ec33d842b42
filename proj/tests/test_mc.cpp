#include <doctest.h>

#include <cmath>

#include "cdpanel/mc.hpp"
#include "cdpanel/tables.hpp"

using namespace cdpanel;

namespace {

ExperimentDesign small_design(int reps) {
  ExperimentDesign d;
  d.dgp.n_units = 25;
  d.dgp.n_periods = 25;
  d.dgp.n_factors = 2;
  d.dgp.two_way_restricted = true;
  d.dgp.c_sigma = 1.0;
  d.estimator = EstimatorKind::TwoWayFE;
  d.statistics = {CdVariant::CD, CdVariant::CD_W, CdVariant::CD_Wplus};
  d.replications = reps;
  d.master_seed = 321;
  return d;
}

}  // namespace

TEST_CASE("rejection_rate counts p-values below the level") {
  std::vector<CdResult> v(10);
  for (auto& r : v) r.p_value = 0.5;
  CHECK(rejection_rate(v, 0.05) == 0.0);
  for (auto& r : v) r.p_value = 0.001;
  CHECK(rejection_rate(v, 0.05) == 1.0);
  for (int i = 0; i < 3; ++i) v[i].p_value = 0.01;
  for (int i = 3; i < 10; ++i) v[i].p_value = 0.9;
  CHECK(rejection_rate(v, 0.05) == doctest::Approx(0.3));
  CHECK_THROWS_AS(rejection_rate({}, 0.05), Error);
}

TEST_CASE("run_cell with R=1 reports the single statistic with zero variance") {
  ExperimentDesign d = small_design(1);
  const CellSummary s = run_cell(d, 1);
  CHECK(s.stats[0].n == 1);
  CHECK(s.stats[0].variance == 0.0);
  CHECK(s.stats[0].mc_se == 0.0);
  CHECK(std::isfinite(s.stats[0].mean));
}

TEST_CASE("run_cell is bitwise identical across worker counts") {
  ExperimentDesign d = small_design(60);
  const CellSummary s1 = run_cell(d, 1);
  const CellSummary s4 = run_cell(d, 4);
  const CellSummary s8 = run_cell(d, 8);
  CHECK(summaries_identical(s1, s4));
  CHECK(summaries_identical(s1, s8));
}

TEST_CASE("doubling R shrinks the Monte Carlo s.e. by about sqrt(2)") {
  ExperimentDesign a = small_design(400);
  ExperimentDesign b = small_design(800);
  const CellSummary sa = run_cell(a);
  const CellSummary sb = run_cell(b);
  const double ratio = sa.stats[0].mc_se / sb.stats[0].mc_se;
  CHECK(ratio > 1.3);
  CHECK(ratio < 1.6);
}

TEST_CASE("table grids have the published shape") {
  const auto t1a = table_cells(TableId::T1A, 10, 7);
  CHECK(t1a.size() == 2 * 4 * 4);
  CHECK(t1a.front().design.dgp.two_way_restricted);
  CHECK(t1a.front().design.estimator == EstimatorKind::TwoWayFE);
  CHECK(t1a.front().design.statistics.size() == 1);

  const auto t4a = table_cells(TableId::T4A, 10, 7);
  CHECK(t4a.size() == 4 * 4 * 4);
  CHECK(t4a.front().design.statistics.size() == 3);

  const auto t5b = table_cells(TableId::T5B, 10, 7);
  CHECK(t5b.size() == 4 * 4 * 4);
  CHECK(t5b.front().design.dgp.n_factors == 3);
  CHECK(t5b.front().design.estimator == EstimatorKind::CCEPooled);

  // distinct cells draw from distinct seeds
  CHECK(t4a[0].design.master_seed != t4a[1].design.master_seed);
}

TEST_CASE("embedded references cover the graded tables") {
  const auto refs =
      reference_values(TableId::T1A, 25, 25, "c_sigma=0.1", CdVariant::CD);
  REQUIRE(refs.size() == 2);
  CHECK(refs[0].value == doctest::Approx(-3.53));
  CHECK(refs[1].value == doctest::Approx(0.09));

  const auto t5 = reference_values(TableId::T5A, 25, 200, "loadings=skewed;sigma2=floadings",
                                   CdVariant::CD_BC);
  REQUIRE(t5.size() == 1);
  CHECK(t5[0].value == doctest::Approx(22.0));

  CHECK(reference_values(TableId::T2, 25, 25, "loadings=symmetric;sigma2=indep", CdVariant::CD)
            .empty());
}

TEST_CASE("failed replications are excluded and counted") {
  // An N=3 CCE design with m=1 leaves T x 2 proxies against 3 units; rank
  // problems occasionally arise, but a clean design should have none.
  ExperimentDesign d = small_design(50);
  const CellSummary s = run_cell(d);
  CHECK(s.failures == 0);
  CHECK(s.stats[0].n == 50);
}
