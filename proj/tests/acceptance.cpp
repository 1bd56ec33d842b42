// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exits nonzero if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "cdpanel/cd.hpp"
#include "cdpanel/mc.hpp"
#include "cdpanel/tables.hpp"
#include "oracles.hpp"

using namespace cdpanel;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

PanelMat random_mat(int n, int t, std::uint64_t id, std::uint64_t seed) {
  PhiloxEngine eng(RngStream{seed, id});
  PanelMat m(n, t);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < t; ++s) m(i, s) = eng.normal();
  return m;
}

const ExperimentDesign* find_cell(const std::vector<TableCell>& cells, int n, int t,
                                  const std::string& labels) {
  for (const TableCell& c : cells)
    if (c.design.dgp.n_units == n && c.design.dgp.n_periods == t && c.case_labels == labels)
      return &c.design;
  return nullptr;
}

const StatSummary& stat_of(const CellSummary& s, CdVariant v) {
  for (const StatSummary& st : s.stats)
    if (st.variant == v) return st;
  throw std::runtime_error("statistic not found in summary");
}

// ---------------------------------------------------------------------------

void criterion_1_table1_moments(std::uint64_t seed) {
  struct Cell {
    int n, t;
    double c;
    double mean_a, var_a, mean_b, var_b;  // published, var x100
  };
  const std::vector<Cell> cells = {
      {25, 25, 0.1, -3.53, 0.09, -3.53, 0.11},
      {200, 100, 0.1, -7.05, 0.00, -7.05, 0.00},
      {200, 200, 1.5, -9.06, 2.25, -9.08, 2.27},
  };
  bool pass = true;
  std::string detail;
  for (const bool cce : {false, true}) {
    const auto grid = table_cells(cce ? TableId::T1B : TableId::T1A, 2000, seed);
    for (const Cell& c : cells) {
      char label[32];
      std::snprintf(label, sizeof label, "c_sigma=%g", c.c);
      const ExperimentDesign* d = find_cell(grid, c.n, c.t, label);
      const CellSummary s = run_cell(*d);
      const StatSummary& st = stat_of(s, CdVariant::CD);
      const double ref_mean = cce ? c.mean_b : c.mean_a;
      const double ref_var = cce ? c.var_b : c.var_a;
      const double var100 = 100.0 * st.variance;
      const bool mean_ok = std::abs(st.mean - ref_mean) <= 0.05;
      const bool var_ok =
          std::abs(var100 - ref_var) <= 0.05 || std::abs(var100 - ref_var) <= 0.5 * ref_var;
      char buf[160];
      std::snprintf(buf, sizeof buf, " [%s N=%d T=%d c=%g: mean %.3f/%.2f var100 %.3f/%.2f]",
                    cce ? "cce" : "2wfe", c.n, c.t, c.c, st.mean, ref_mean, var100, ref_var);
      detail += buf;
      pass = pass && mean_ok && var_ok;
    }
  }
  report(1, "published moments of CD under the null", pass, detail);
}

void criterion_2_homogeneous_benchmark(std::uint64_t seed) {
  const double benchmark = -std::sqrt((100.0 - 1.0) / 2.0);
  bool pass = true;
  std::string detail;
  for (const bool cce : {false, true}) {
    ExperimentDesign d;
    d.dgp.n_units = 100;
    d.dgp.n_periods = 100;
    d.dgp.n_factors = 2;
    d.dgp.two_way_restricted = !cce;
    d.dgp.c_sigma = 0.0;
    d.dgp = table_mode_conventions(d.dgp);
    d.estimator = cce ? EstimatorKind::CCEPooled : EstimatorKind::TwoWayFE;
    d.statistics = {CdVariant::CD};
    d.replications = 1000;
    d.master_seed = derive_seed(seed, cce ? 21 : 20);
    const CellSummary s = run_cell(d);
    const double mean = stat_of(s, CdVariant::CD).mean;
    char buf[120];
    std::snprintf(buf, sizeof buf, " [%s mean %.4f vs %.4f]", cce ? "cce" : "2wfe", mean,
                  benchmark);
    detail += buf;
    pass = pass && std::abs(mean - benchmark) <= 0.10;
  }
  report(2, "homogeneous-variance benchmark -sqrt((T - T/N)/2)", pass, detail);
}

void criterion_3_size(std::uint64_t seed) {
  bool pass = true;
  std::string detail;
  for (const bool cce : {false, true}) {
    const TableId id = cce ? TableId::T5A : TableId::T4A;
    const auto grid = table_cells(id, 2000, seed);
    for (const int t_big : {100, 200}) {
      for (const char* label :
           {"loadings=symmetric;sigma2=indep", "loadings=symmetric;sigma2=floadings",
            "loadings=skewed;sigma2=indep", "loadings=skewed;sigma2=floadings"}) {
        const ExperimentDesign* d = find_cell(grid, 200, t_big, label);
        const CellSummary s = run_cell(*d);
        for (CdVariant v : {CdVariant::CD_W, CdVariant::CD_Wplus}) {
          const double got = 100.0 * stat_of(s, v).rejection_rate;
          const double ref = reference_values(id, 200, t_big, label, v).at(0).value;
          const bool ok = std::abs(got - ref) <= 1.5;
          if (!ok) {
            char buf[160];
            std::snprintf(buf, sizeof buf, " [MISS %s N=200 T=%d %s %s: %.1f vs %.1f +/-1.5]",
                          cce ? "cce" : "2wfe", t_big, label, variant_name(v), got, ref);
            detail += buf;
          }
          pass = pass && ok;
        }
      }
    }
    // the documented over-rejection regime: each entry must land within
    // +/-3pp of the published 9.3-14.0% band
    for (const char* label :
         {"loadings=symmetric;sigma2=indep", "loadings=symmetric;sigma2=floadings",
          "loadings=skewed;sigma2=indep", "loadings=skewed;sigma2=floadings"}) {
      const ExperimentDesign* d = find_cell(grid, 25, 200, label);
      const CellSummary s = run_cell(*d);
      for (CdVariant v : {CdVariant::CD_W, CdVariant::CD_Wplus}) {
        const double got = 100.0 * stat_of(s, v).rejection_rate;
        const double ref = reference_values(id, 25, 200, label, v).at(0).value;
        const bool ok = got >= 9.3 - 3.0 && got <= 14.0 + 3.0;
        char buf[160];
        if (!ok) {
          std::snprintf(buf, sizeof buf, " [MISS %s N=25 T=200 %s %s: %.1f not in [6.3,17.0]]",
                        cce ? "cce" : "2wfe", label, variant_name(v), got);
          detail += buf;
        } else if (std::abs(got - ref) > 3.0) {
          std::snprintf(buf, sizeof buf, " [note %s N=25 T=200 %s %s: %.1f vs entry %.1f]",
                        cce ? "cce" : "2wfe", label, variant_name(v), got, ref);
          detail += buf;
        }
        pass = pass && ok;
      }
    }
  }
  if (detail.empty()) detail = "all 48 size entries within tolerance";
  report(3, "size of CD_W / CD_W+ against the published tables", pass, detail);
}

void criterion_4_power(std::uint64_t seed) {
  bool pass = true;
  std::string detail;
  for (const bool cce : {false, true}) {
    const TableId id = cce ? TableId::T5B : TableId::T4B;
    const auto grid = table_cells(id, 2000, seed);

    const ExperimentDesign* d100 =
        find_cell(grid, 100, 100, "loadings=symmetric;sigma2=indep");
    const CellSummary s100 = run_cell(*d100);
    const double plus = stat_of(s100, CdVariant::CD_Wplus).rejection_rate;
    char buf[160];
    std::snprintf(buf, sizeof buf, " [%s CD_W+ power at (100,100): %.3f]", cce ? "cce" : "2wfe",
                  plus);
    detail += buf;
    pass = pass && plus >= 0.99;

    // CD_W power at (25,25): within +/-4pp of the published 10-12.6% band
    for (const char* label :
         {"loadings=symmetric;sigma2=indep", "loadings=symmetric;sigma2=floadings",
          "loadings=skewed;sigma2=indep", "loadings=skewed;sigma2=floadings"}) {
      const ExperimentDesign* d25 = find_cell(grid, 25, 25, label);
      const CellSummary s25 = run_cell(*d25);
      const double got = 100.0 * stat_of(s25, CdVariant::CD_W).rejection_rate;
      const double ref = reference_values(id, 25, 25, label, CdVariant::CD_W).at(0).value;
      const bool ok = got >= 10.0 - 4.0 && got <= 12.6 + 4.0;
      if (!ok) {
        std::snprintf(buf, sizeof buf, " [MISS %s CD_W (25,25) %s: %.1f not in [6.0,16.6] (entry %.1f)]",
                      cce ? "cce" : "2wfe", label, got, ref);
        detail += buf;
      } else if (std::abs(got - ref) > 4.0) {
        std::snprintf(buf, sizeof buf, " [note %s CD_W (25,25) %s: %.1f vs entry %.1f]",
                      cce ? "cce" : "2wfe", label, got, ref);
        detail += buf;
      }
      pass = pass && ok;
    }
  }
  report(4, "power of CD_W+ and CD_W against the published tables", pass, detail);
}

void criterion_5_bc_pathology(std::uint64_t seed) {
  const auto grid = table_cells(TableId::T5A, 2000, seed);
  const ExperimentDesign* d = find_cell(grid, 25, 200, "loadings=skewed;sigma2=floadings");
  const CellSummary s = run_cell(*d);
  const double got = stat_of(s, CdVariant::CD_BC).rejection_rate;
  char buf[120];
  std::snprintf(buf, sizeof buf, "CD_BC size %.3f (published 0.220, demand >= 0.15)", got);
  report(5, "CD_BC over-rejection under loading-dependent variances", got >= 0.15, buf);
}

void criterion_6_oracles(std::uint64_t seed) {
  PhiloxEngine pick(RngStream{seed, 0xACCE97});
  bool pass = true;
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 3 + static_cast<int>(pick.next_u64() % 4);  // 3..6
    const int t = 4 + static_cast<int>(pick.next_u64() % 5);  // 4..8
    const PanelMat e = random_mat(n, t, 4000 + rep, seed);
    const ResidualMatrix r = make_residual_matrix(e, ResidualSource::Raw);
    WeightVector w = rademacher(RngStream{seed, static_cast<std::uint64_t>(6000 + rep)}, n);
    if (w.w.cwiseAbs().sum() == std::abs(w.w.sum())) {
      w.w[0] = -w.w[0];  // an all-equal draw degenerates the robust variance
      w.kind = WeightKind::Custom;
    }

    const auto check = [&](double got, double expect) {
      worst = std::max(worst, std::abs(got - expect));
      pass = pass && std::abs(got - expect) <= 1e-10;
    };
    check(cd(r).statistic, oracle::cd(e, t));
    check(cd_weighted(r, w).statistic, oracle::cd_weighted(e, w.w, t));
    const CdResult plus = cd_power_enhanced(r, w);
    check(plus.statistic - cd_weighted(r, w).statistic, oracle::screen_sum(e, t));
    check(cd_bias_corrected_2wfe(r).aux.at("xi_hat"), oracle::xi_hat(e, t));
    check(serial_robust_cd_weighted(r, w).aux.at("omega_hat"), oracle::omega_n(e, w.w, t));
  }
  // Phi terms need a CCE estimation pass; small well-conditioned instances.
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 5 + static_cast<int>(pick.next_u64() % 2);  // 5..6
    const int t = 8;
    PanelMat y = random_mat(n, t, 5000 + rep, seed);
    PanelMat x = random_mat(n, t, 5500 + rep, seed);
    y.array() += 1.0;
    x.array() += 1.0;
    const PanelDataset p = validate_panel(y, {x});
    EstimatorOutput est;
    try {
      est = cce_pooled(p);
    } catch (const Error&) {
      continue;  // rank-deficient random draw; not the object under test
    }
    const CdResult bc = cd_bias_corrected_cce(est);
    const auto [phi1, phi2] = oracle::phi_cce(p.y, p.x, est.beta_hat, est.residuals.e);
    pass = pass && std::abs(bc.aux.at("phi1_hat") - phi1) <= 1e-10;
    pass = pass && std::abs(bc.aux.at("phi2_hat") - phi2) <= 1e-10;
    worst = std::max({worst, std::abs(bc.aux.at("phi1_hat") - phi1),
                      std::abs(bc.aux.at("phi2_hat") - phi2)});
  }
  char buf[100];
  std::snprintf(buf, sizeof buf, "largest oracle gap %.2e (limit 1e-10)", worst);
  report(6, "naive-loop oracle equivalence on 200 random instances", pass, buf);
}

void criterion_7_invariants(std::uint64_t seed) {
  bool pass = true;
  std::string detail;

  // residual structure on 1000 random simulated panels
  int bad_cce = 0, bad_fe = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    DgpConfig c;
    c.n_units = 4 + rep % 9;
    c.n_periods = 5 + rep % 11;
    c.n_factors = 2;
    const SimulatedPanel sp = simulate(c, RngStream{derive_seed(seed, 900),
                                                    static_cast<std::uint64_t>(rep)});
    try {
      const EstimatorOutput cce = cce_pooled(sp.panel);
      const double norm = cce.residuals.e.norm();
      if (cce.residuals.e.colwise().sum().cwiseAbs().maxCoeff() > 1e-8 * norm) ++bad_cce;
    } catch (const Error&) {
      ++bad_cce;
    }
    const EstimatorOutput fe = two_way_within_residuals(sp.panel);
    const double norm = fe.residuals.e.norm();
    if (fe.residuals.e.colwise().sum().cwiseAbs().maxCoeff() > 1e-8 * norm ||
        fe.residuals.e.rowwise().sum().cwiseAbs().maxCoeff() > 1e-8 * norm)
      ++bad_fe;
  }
  pass = pass && bad_cce == 0 && bad_fe == 0;
  detail += " [zero-sum violations: cce " + std::to_string(bad_cce) + ", 2wfe " +
            std::to_string(bad_fe) + "]";

  // statistic properties on 300 random instances
  PhiloxEngine pick(RngStream{seed, 0xF00D});
  bool scale_ok = true, sign_ok = true, order_ok = true, psym_ok = true;
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 4 + static_cast<int>(pick.next_u64() % 5);
    const int t = 5 + static_cast<int>(pick.next_u64() % 6);
    PanelMat e = random_mat(n, t, 7000 + rep, seed);
    const ResidualMatrix r = make_residual_matrix(e, ResidualSource::Raw);
    PanelMat scaled = e;
    for (int i = 0; i < n; ++i) scaled.row(i) *= 0.5 + (i + 1) * 0.75;
    const ResidualMatrix rs = make_residual_matrix(scaled, ResidualSource::Raw);
    scale_ok = scale_ok && std::abs(cd(r).statistic - cd(rs).statistic) <= 1e-12;

    const WeightVector w = rademacher(RngStream{seed, static_cast<std::uint64_t>(8000 + rep)}, n);
    const WeightVector neg{-w.w, WeightKind::Custom};
    sign_ok = sign_ok && cd_weighted(r, w).statistic == cd_weighted(r, neg).statistic;
    order_ok = order_ok && cd_power_enhanced(r, w).statistic >= cd_weighted(r, w).statistic;

    const double z = cd(r).statistic;
    psym_ok = psym_ok && p_value(z) == p_value(-z);
  }
  pass = pass && scale_ok && sign_ok && order_ok && psym_ok;
  detail += std::string(" [scale ") + (scale_ok ? "ok" : "BAD") + ", sign " +
            (sign_ok ? "ok" : "BAD") + ", screening-order " + (order_ok ? "ok" : "BAD") +
            ", p-symmetry " + (psym_ok ? "ok" : "BAD") + "]";
  report(7, "structural invariants, property-tested", pass, detail);
}

void criterion_8_determinism(std::uint64_t seed) {
  ExperimentDesign d;
  d.dgp.n_units = 30;
  d.dgp.n_periods = 25;
  d.dgp.n_factors = 2;
  d.dgp.two_way_restricted = true;
  d.dgp = table_mode_conventions(d.dgp);
  d.estimator = EstimatorKind::TwoWayFE;
  d.statistics = {CdVariant::CD, CdVariant::CD_W, CdVariant::CD_Wplus, CdVariant::CD_BC};
  d.replications = 300;
  d.master_seed = derive_seed(seed, 80);
  const CellSummary s1 = run_cell(d, 1);
  const CellSummary s4 = run_cell(d, 4);
  const CellSummary s8 = run_cell(d, 8);
  const bool pass = summaries_identical(s1, s4) && summaries_identical(s1, s8);
  report(8, "run_cell bitwise identical across 1/4/8 workers", pass,
         pass ? "all summaries identical" : "summaries differ");
}

void criterion_9_threshold() {
  const double thr = screening_threshold(82, 25);
  const double exact = 2.0 * std::sqrt(std::log(82.0) / 25.0);
  char printed[16];
  std::snprintf(printed, sizeof printed, "%.2f", thr);
  const bool pass = std::abs(thr - exact) <= 1e-12 && std::abs(thr - 0.8397) <= 1e-4 &&
                    std::string(printed) == "0.84";
  char buf[160];
  std::snprintf(buf, sizeof buf, "threshold %.6f, prints as %s (4-dp value 0.8397)", thr,
                printed);
  report(9, "screening threshold spot value at N=82, T=25", pass, buf);
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 20250809;
  if (argc > 1) seed = std::stoull(argv[1]);
  std::printf("acceptance suite (seed %llu)\n", static_cast<unsigned long long>(seed));

  criterion_9_threshold();
  criterion_6_oracles(seed);
  criterion_7_invariants(seed);
  criterion_8_determinism(seed);
  criterion_2_homogeneous_benchmark(seed);
  criterion_1_table1_moments(seed);
  criterion_5_bc_pathology(seed);
  criterion_4_power(seed);
  criterion_3_size(seed);

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
