#include "cdpanel/long_csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cdpanel {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

[[noreturn]] void parse_fail(int lineno, const std::string& what) {
  fail(Errc::ParseError, "line " + std::to_string(lineno) + ": " + what);
}

double to_double(const std::string& s, int lineno, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    if (!std::isfinite(v)) parse_fail(lineno, what + " is not finite");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    parse_fail(lineno, "cannot parse " + what + " '" + s + "'");
  }
}

}  // namespace

LongPanel parse_long_csv_stream(std::istream& in, BalancePolicy policy) {
  std::string line;
  if (!std::getline(in, line)) fail(Errc::ParseError, "line 1: missing header");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "unit" || header[1] != "period" || header[2] != "y")
    fail(Errc::ParseError, "line 1: header must start with unit,period,y");
  const int m = static_cast<int>(header.size()) - 3;
  for (int k = 0; k < m; ++k)
    if (header[3 + k] != "x" + std::to_string(k + 1))
      fail(Errc::ParseError, "line 1: regressor columns must be named x1..x" + std::to_string(m));

  struct Obs {
    double y;
    std::vector<double> x;
  };
  std::map<std::string, std::map<long long, Obs>> data;
  std::vector<std::string> unit_order;
  std::set<long long> period_set;

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (static_cast<int>(f.size()) != 3 + m)
      parse_fail(lineno, "expected " + std::to_string(3 + m) + " fields, got " +
                             std::to_string(f.size()));
    const std::string& unit = f[0];
    if (unit.empty()) parse_fail(lineno, "empty unit identifier");
    long long period = 0;
    try {
      std::size_t pos = 0;
      period = std::stoll(f[1], &pos);
      if (pos != f[1].size()) throw std::invalid_argument(f[1]);
    } catch (const std::exception&) {
      parse_fail(lineno, "cannot parse period '" + f[1] + "'");
    }
    Obs obs;
    obs.y = to_double(f[2], lineno, "y");
    obs.x.resize(m);
    for (int k = 0; k < m; ++k) obs.x[k] = to_double(f[3 + k], lineno, "x" + std::to_string(k + 1));

    auto [it, inserted_unit] = data.try_emplace(unit);
    if (inserted_unit) unit_order.push_back(unit);
    if (!it->second.emplace(period, std::move(obs)).second)
      parse_fail(lineno, "duplicate (unit,period) pair (" + unit + "," + f[1] + ")");
    period_set.insert(period);
  }

  const std::vector<long long> periods(period_set.begin(), period_set.end());
  LongPanel out;
  std::vector<std::string> kept;
  for (const std::string& u : unit_order) {
    const auto& series = data.at(u);
    const bool complete =
        std::all_of(periods.begin(), periods.end(),
                    [&](long long p) { return series.count(p) != 0; });
    if (complete) {
      kept.push_back(u);
    } else if (policy == BalancePolicy::Drop) {
      out.dropped_units.push_back(u);
    } else {
      fail(Errc::UnbalancedPanel,
           "unit '" + u + "' is missing periods; rerun with the drop-to-balance option");
    }
  }
  if (kept.empty()) fail(Errc::EmptyAfterBalancing, "no unit covers every period");

  const int n = static_cast<int>(kept.size());
  const int t = static_cast<int>(periods.size());
  PanelMat y(n, t);
  std::vector<PanelMat> x(m, PanelMat(n, t));
  for (int i = 0; i < n; ++i) {
    const auto& series = data.at(kept[i]);
    for (int s = 0; s < t; ++s) {
      const Obs& obs = series.at(periods[s]);
      y(i, s) = obs.y;
      for (int k = 0; k < m; ++k) x[k](i, s) = obs.x[k];
    }
  }
  out.panel = validate_panel(std::move(y), std::move(x));
  out.units = std::move(kept);
  out.periods = periods;
  return out;
}

LongPanel parse_long_csv(const std::string& path, BalancePolicy policy) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open " + path);
  return parse_long_csv_stream(in, policy);
}

void write_long_csv(std::ostream& out, const PanelDataset& panel,
                    const std::vector<std::string>& units, const std::vector<long long>& periods) {
  out << "unit,period,y";
  for (int k = 0; k < panel.n_regressors; ++k) out << ",x" << (k + 1);
  out << "\n";
  char buf[40];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (int i = 0; i < panel.n_units; ++i)
    for (int s = 0; s < panel.n_periods; ++s) {
      out << units[i] << ',' << periods[s] << ',' << num(panel.y(i, s));
      for (int k = 0; k < panel.n_regressors; ++k) out << ',' << num(panel.x[k](i, s));
      out << "\n";
    }
}

void write_long_csv(const std::string& path, const PanelDataset& panel) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot write " + path);
  std::vector<std::string> units(panel.n_units);
  for (int i = 0; i < panel.n_units; ++i) units[i] = "u" + std::to_string(i + 1);
  std::vector<long long> periods(panel.n_periods);
  for (int s = 0; s < panel.n_periods; ++s) periods[s] = s + 1;
  write_long_csv(out, panel, units, periods);
  if (!out) fail(Errc::IoError, "write failure on " + path);
}

}  // namespace cdpanel
