#pragma once

#include <stdexcept>
#include <string>

namespace cdpanel {

enum class Errc {
  DimensionMismatch,
  NonFiniteValue,
  TooSmall,
  SingularDesign,
  RankDeficientProxies,
  DegenerateSeries,
  LengthMismatch,
  ZeroDenominator,
  ZeroVariance,
  MissingLoadings,
  NonPositiveVariance,
  BadInterval,
  EmptyInput,
  ParseError,
  UnbalancedPanel,
  EmptyAfterBalancing,
  WrongResidualSource,
  ResidualStructure,
  UnknownTable,
  CellFailure,
  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::TooSmall: return "TooSmall";
    case Errc::SingularDesign: return "SingularDesign";
    case Errc::RankDeficientProxies: return "RankDeficientProxies";
    case Errc::DegenerateSeries: return "DegenerateSeries";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::MissingLoadings: return "MissingLoadings";
    case Errc::NonPositiveVariance: return "NonPositiveVariance";
    case Errc::BadInterval: return "BadInterval";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::ParseError: return "ParseError";
    case Errc::UnbalancedPanel: return "UnbalancedPanel";
    case Errc::EmptyAfterBalancing: return "EmptyAfterBalancing";
    case Errc::WrongResidualSource: return "WrongResidualSource";
    case Errc::ResidualStructure: return "ResidualStructure";
    case Errc::UnknownTable: return "UnknownTable";
    case Errc::CellFailure: return "CellFailure";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace cdpanel
