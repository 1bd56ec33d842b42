#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdpanel/cd.hpp"
#include "cdpanel/long_csv.hpp"
#include "cdpanel/tables.hpp"

namespace {

using nlohmann::json;
using namespace cdpanel;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MASTER_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring unparsable MASTER_SEED='" << env << "'\n";
    }
  }
  return 42;
}

std::optional<CdVariant> parse_stat_token(const std::string& tok) {
  if (tok == "cd") return CdVariant::CD;
  if (tok == "cd_w") return CdVariant::CD_W;
  if (tok == "cd_wplus") return CdVariant::CD_Wplus;
  if (tok == "cd_w_avg") return CdVariant::CD_W_avg;
  if (tok == "cd_wplus_avg") return CdVariant::CD_Wplus_avg;
  if (tok == "cd_bc") return CdVariant::CD_BC;
  if (tok == "cd_w_sc") return CdVariant::CD_W_SC;
  return std::nullopt;
}

std::vector<CdVariant> parse_stats_list(const std::string& csv) {
  std::vector<CdVariant> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto v = parse_stat_token(tok);
    if (!v) throw CLI::ValidationError("--stats", "unknown statistic '" + tok + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw CLI::ValidationError("--stats", "empty statistic list");
  return out;
}

json result_to_json(const CdResult& r) {
  json aux = json::object();
  for (const auto& [k, v] : r.aux) aux[k] = v;
  return json{{"variant", variant_name(r.variant)},
              {"statistic", r.statistic},
              {"p_value", r.p_value},
              {"n_units", r.n_units},
              {"n_periods", r.n_periods},
              {"aux", aux}};
}

json summary_to_json(const CellSummary& s) {
  json stats = json::array();
  for (const StatSummary& st : s.stats)
    stats.push_back(json{{"stat", variant_name(st.variant)},
                         {"mean", st.mean},
                         {"variance", st.variance},
                         {"rejection_rate", st.rejection_rate},
                         {"mc_se", st.mc_se},
                         {"n", st.n}});
  return json{{"stats", stats},
              {"replications", s.replications},
              {"failures", s.failures},
              {"master_seed", s.master_seed},
              {"wall_seconds", s.wall_seconds}};
}

void print_summary(const CellSummary& s, std::ostream& out) {
  out << "replications: " << s.replications << "  failures: " << s.failures
      << "  seed: " << s.master_seed << "\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %12s %12s %12s %10s", "stat", "mean", "variance",
                "rejection", "mc_se");
  out << buf << "\n";
  for (const StatSummary& st : s.stats) {
    std::snprintf(buf, sizeof buf, "%-10s %12.4f %12.6f %12.4f %10.4f", variant_name(st.variant),
                  st.mean, st.variance, st.rejection_rate, st.mc_se);
    out << buf << "\n";
  }
}

int cmd_replicate(const std::string& table, int reps, std::uint64_t seed, std::string out_path,
                  int threads, bool emit_json) {
  const auto id = parse_table_id(table);
  if (!id) {
    std::cerr << "unknown table id '" << table << "' (valid: T1A T1B T2 T3 T4A T4B T5A T5B)\n";
    return kExitUsage;
  }
  if (out_path.empty()) out_path = table + ".csv";
  std::ostringstream report;
  try {
    replicate_table(*id, reps, seed, out_path, threads, report);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  std::cout << report.str();
  std::cout << "wrote " << out_path << "\n";
  if (emit_json) {
    json rows = json::array();
    for (const TableCsvRow& r : read_table_csv(out_path))
      rows.push_back(json{{"table_id", r.table_id},
                          {"N", r.n_units},
                          {"T", r.n_periods},
                          {"case_labels", r.case_labels},
                          {"stat", r.stat},
                          {"mean", r.mean},
                          {"variance_x100", r.variance_x100},
                          {"rejection_rate", r.rejection_rate},
                          {"mc_se", r.mc_se},
                          {"failures", r.failures},
                          {"R", r.replications},
                          {"seed", r.seed}});
    std::cout << rows.dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_test(const std::string& data_path, const std::string& estimator,
             const std::string& stats_csv, int n_draws, std::uint64_t seed, double level,
             bool serial_robust, const std::string& balance, bool emit_json) {
  const std::vector<CdVariant> stats = parse_stats_list(stats_csv);
  if (balance != "none" && balance != "drop")
    throw CLI::ValidationError("--balance", "must be 'none' or 'drop'");
  const BalancePolicy policy = balance == "drop" ? BalancePolicy::Drop : BalancePolicy::None;

  LongPanel lp = parse_long_csv(data_path, policy);
  const PanelDataset& panel = lp.panel;

  EstimatorOutput est;
  if (estimator == "2wfe")
    est = two_way_within_residuals(panel);
  else if (estimator == "cce")
    est = cce_pooled(panel);
  else if (estimator == "fd")
    est = fd_time_dummies_residuals(panel);
  else
    throw CLI::ValidationError("--estimator", "must be one of 2wfe, cce, fd");
  const ResidualMatrix& res = est.residuals;
  const int n = res.n_units();

  const double threshold = screening_threshold(n, res.effective_T);
  int exceed = 0;
  {
    const CorrelationMatrix corr = pairwise_correlations(res);
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (std::abs(corr.rho(i, j)) > threshold) ++exceed;
  }

  const WeightVector w = rademacher(RngStream{seed, 0}, n);
  std::vector<CdResult> results;
  std::vector<std::string> na_lines;
  for (CdVariant v : stats) {
    switch (v) {
      case CdVariant::CD:
        if (serial_robust)
          na_lines.push_back("CD: NA under the serial-correlation adjustment");
        else
          results.push_back(cd(res));
        break;
      case CdVariant::CD_W:
        results.push_back(serial_robust ? serial_robust_cd_weighted(res, w)
                                        : cd_weighted(res, w));
        break;
      case CdVariant::CD_Wplus:
        results.push_back(cd_power_enhanced(res, w));
        break;
      case CdVariant::CD_W_SC:
        results.push_back(serial_robust_cd_weighted(res, w));
        break;
      case CdVariant::CD_W_avg:
        results.push_back(serial_robust
                              ? serial_robust_cd_weighted_averaged(res, n_draws, seed, false)
                              : cd_weighted_averaged(res, n_draws, seed, false));
        break;
      case CdVariant::CD_Wplus_avg:
        results.push_back(serial_robust
                              ? serial_robust_cd_weighted_averaged(res, n_draws, seed, true)
                              : cd_weighted_averaged(res, n_draws, seed, true));
        break;
      case CdVariant::CD_BC:
        results.push_back(estimator == "cce" ? cd_bias_corrected_cce(est)
                                             : cd_bias_corrected_2wfe(res));
        break;
    }
  }

  if (emit_json) {
    json j;
    j["n_units"] = n;
    j["n_periods"] = panel.n_periods;
    j["effective_T"] = res.effective_T;
    j["estimator"] = estimator;
    j["serial_robust"] = serial_robust;
    j["threshold"] = threshold;
    j["exceedances"] = exceed;
    j["dropped_units"] = lp.dropped_units;
    j["results"] = json::array();
    for (const CdResult& r : results) j["results"].push_back(result_to_json(r));
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }

  std::cout << "panel: N=" << n << " T=" << panel.n_periods << " m=" << panel.n_regressors;
  if (!lp.dropped_units.empty()) {
    std::cout << " (dropped " << lp.dropped_units.size() << " unbalanced units:";
    for (const auto& u : lp.dropped_units) std::cout << ' ' << u;
    std::cout << ")";
  }
  std::cout << "\nestimator: " << estimator << " (effective T = " << res.effective_T << ")\n";
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "screening threshold 2*sqrt(ln(N)/T) = %.2f (|rho| exceedances: %d)\n", threshold,
                exceed);
  std::cout << buf;
  std::snprintf(buf, sizeof buf, "%-10s %10s %10s   %9s %9s %9s", "statistic", "value", "p-value",
                "q0.1", "q0.5", "q0.9");
  std::cout << buf << "\n";
  for (const CdResult& r : results) {
    std::snprintf(buf, sizeof buf, "%-10s %10.3f %10.4f%s", variant_name(r.variant), r.statistic,
                  r.p_value, r.p_value < level ? " *" : "  ");
    std::cout << buf;
    if (r.aux.count("q10")) {
      std::snprintf(buf, sizeof buf, " %9.3f %9.3f %9.3f", r.aux.at("q10"), r.aux.at("q50"),
                    r.aux.at("q90"));
      std::cout << buf;
    }
    std::cout << "\n";
  }
  for (const std::string& s : na_lines) std::cout << s << "\n";
  return kExitOk;
}

int cmd_cell(const std::string& config_path, const std::string& estimator,
             const std::string& stats_csv, int reps, std::uint64_t seed, double level, int threads,
             int n_draws, bool emit_json) {
  ExperimentDesign design;
  design.dgp = load_dgp_config(config_path);
  design.estimator = estimator == "cce" ? EstimatorKind::CCEPooled : EstimatorKind::TwoWayFE;
  if (estimator != "cce" && estimator != "2wfe")
    throw CLI::ValidationError("--estimator", "cell designs support 2wfe or cce");
  design.statistics = parse_stats_list(stats_csv);
  design.replications = reps;
  design.master_seed = seed;
  design.significance_level = level;
  design.n_draws = n_draws;

  const CellSummary summary = run_cell(design, threads);
  if (emit_json)
    std::cout << summary_to_json(summary).dump(2) << "\n";
  else
    print_summary(summary, std::cout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CD tests for remaining cross-section dependence in panel residuals"};
  app.require_subcommand(1);

  // replicate
  std::string rep_table;
  int rep_reps = 2000;
  std::uint64_t rep_seed = default_seed();
  std::string rep_out;
  int rep_threads = 0;
  bool rep_json = false;
  auto* rep = app.add_subcommand("replicate", "rerun a published simulation table");
  rep->add_option("table", rep_table, "table id (T1A T1B T2 T3 T4A T4B T5A T5B)")->required();
  rep->add_option("--reps", rep_reps, "Monte Carlo replications per cell");
  rep->add_option("--seed", rep_seed, "master seed");
  rep->add_option("--out", rep_out, "output CSV path (default <table>.csv)");
  rep->add_option("--threads", rep_threads, "worker threads (0 = all cores)");
  rep->add_flag("--json", rep_json, "also print the rows as JSON");

  // test
  std::string test_data, test_estimator = "2wfe", test_stats = "cd,cd_w_avg,cd_wplus_avg";
  std::string test_balance = "none";
  int test_g = 30;
  std::uint64_t test_seed = default_seed();
  double test_level = 0.05;
  bool test_robust = false, test_json = false;
  auto* tst = app.add_subcommand("test", "apply the test battery to a long-format panel CSV");
  tst->add_option("--data", test_data, "long CSV with header unit,period,y,x1..xm")->required();
  tst->add_option("--estimator", test_estimator, "2wfe | cce | fd");
  tst->add_option("--stats", test_stats, "comma list: cd,cd_w,cd_wplus,cd_w_avg,cd_wplus_avg,cd_bc,cd_w_sc");
  tst->add_option("--G", test_g, "Rademacher draws for averaged statistics");
  tst->add_option("--seed", test_seed, "master seed");
  tst->add_option("--level", test_level, "significance level");
  tst->add_flag("--serial-robust", test_robust, "serial-correlation-robust weighted statistics");
  tst->add_option("--balance", test_balance, "none | drop (drop units missing periods)");
  tst->add_flag("--json", test_json, "emit JSON records");

  // cell
  std::string cell_config, cell_estimator = "2wfe", cell_stats = "cd,cd_w,cd_wplus,cd_bc";
  int cell_reps = 2000, cell_threads = 0, cell_g = 30;
  std::uint64_t cell_seed = default_seed();
  double cell_level = 0.05;
  bool cell_json = false;
  auto* cel = app.add_subcommand("cell", "run one custom Monte Carlo design cell");
  cel->add_option("--config", cell_config, "key=value design file")->required();
  cel->add_option("--estimator", cell_estimator, "2wfe | cce");
  cel->add_option("--stats", cell_stats, "comma list of statistics");
  cel->add_option("--reps", cell_reps, "replications");
  cel->add_option("--seed", cell_seed, "master seed");
  cel->add_option("--level", cell_level, "significance level");
  cel->add_option("--threads", cell_threads, "worker threads (0 = all cores)");
  cel->add_option("--G", cell_g, "Rademacher draws for averaged statistics");
  cel->add_flag("--json", cell_json, "emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (rep->parsed())
      return cmd_replicate(rep_table, rep_reps, rep_seed, rep_out, rep_threads, rep_json);
    if (tst->parsed())
      return cmd_test(test_data, test_estimator, test_stats, test_g, test_seed, test_level,
                      test_robust, test_balance, test_json);
    if (cel->parsed())
      return cmd_cell(cell_config, cell_estimator, cell_stats, cell_reps, cell_seed, cell_level,
                      cell_threads, cell_g, cell_json);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::ParseError ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
