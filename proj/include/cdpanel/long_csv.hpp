#pragma once

// Long-format panel CSV ingestion: header `unit,period,y,x1,...,xm`, comma
// separated, '.' decimal. Pivots to the wide in-memory layout, optionally
// dropping units that do not cover every period.

#include <string>
#include <vector>

#include "cdpanel/panel.hpp"

namespace cdpanel {

enum class BalancePolicy { None, Drop };

struct LongPanel {
  PanelDataset panel;
  std::vector<std::string> units;      // row order of the panel
  std::vector<long long> periods;      // column order (ascending)
  std::vector<std::string> dropped_units;
};

LongPanel parse_long_csv(const std::string& path, BalancePolicy policy);
LongPanel parse_long_csv_stream(std::istream& in, BalancePolicy policy);

// Inverse pivot, used by tests and to export simulated panels.
void write_long_csv(std::ostream& out, const PanelDataset& panel,
                    const std::vector<std::string>& units, const std::vector<long long>& periods);
void write_long_csv(const std::string& path, const PanelDataset& panel);

}  // namespace cdpanel
