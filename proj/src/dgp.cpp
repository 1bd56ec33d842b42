#include "cdpanel/dgp.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace cdpanel {

void DgpConfig::validate() const {
  if (n_units < 3 || n_periods < 3)
    fail(Errc::TooSmall, "simulation design needs N >= 3 and T >= 3");
  if (n_regressors != 1) fail(Errc::DimensionMismatch, "the simulation design has one regressor");
  if (n_factors != 2 && n_factors != 3)
    fail(Errc::BadInterval, "n_factors must be 2 or 3");
  if (two_way_restricted && n_factors != 2)
    fail(Errc::BadInterval, "the restricted design has exactly two factors");
  if (c_sigma < 0.0) fail(Errc::BadInterval, "c_sigma must be nonnegative");
  if (sym_loading_halfwidth <= 0.0 || skew_loading_variance <= 0.0)
    fail(Errc::BadInterval, "loading spread parameters must be positive");
  if (beta != beta || !std::isfinite(beta)) fail(Errc::NonFiniteValue, "beta must be finite");
}

namespace {

double draw_loading_dev(PhiloxEngine& eng, const DgpConfig& c) {
  if (c.loading_case == LoadingCase::I_symmetric)
    return eng.uniform(-c.sym_loading_halfwidth, c.sym_loading_halfwidth);
  return (eng.chi2_2() - 2.0) * 0.5 * std::sqrt(c.skew_loading_variance);
}

double draw_error(PhiloxEngine& eng, ErrorCase ec) {
  if (ec == ErrorCase::i_normal) return eng.normal();
  return (eng.chi2_2() - 2.0) * 0.5;
}

}  // namespace

std::pair<Matrix, Matrix> draw_loadings(const DgpConfig& config, RngStream stream) {
  config.validate();
  const int n = config.n_units;
  const int r = config.n_factors;

  PhiloxEngine eng_y(substream(stream, kChLoadingsY));
  Matrix lambda_y(n, r);
  if (config.two_way_restricted) {
    for (int i = 0; i < n; ++i) {
      lambda_y(i, 0) = 1.0;
      lambda_y(i, 1) = 1.0 + draw_loading_dev(eng_y, config);
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < r; ++k) lambda_y(i, k) = 1.0 + draw_loading_dev(eng_y, config);
  }

  PhiloxEngine eng_x(substream(stream, kChLoadingsX));
  Matrix lambda_x(n, r);
  const auto draw_x_elem = [&](int k) {
    const bool wide = config.lambda_x_first_wide ? (k == 0) : (k != 0);
    return wide ? eng_x.uniform(0.5, 1.5) : eng_x.uniform(-0.5, 0.5);
  };
  if (config.two_way_restricted) {
    for (int i = 0; i < n; ++i) {
      lambda_x(i, 0) = 1.0;
      lambda_x(i, 1) = draw_x_elem(1);
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < r; ++k) lambda_x(i, k) = draw_x_elem(k);
  }
  return {std::move(lambda_y), std::move(lambda_x)};
}

Vector draw_variances(const DgpConfig& config, const Matrix& lambda_y, const Matrix& f,
                      RngStream stream, int* redraws) {
  config.validate();
  const int n = config.n_units;
  int redrawn = 0;
  Vector sigma2(n);

  if (config.variance_case == VarianceCase::a_independent) {
    const double divisor =
        config.variance_a_divisor == VarADivisor::sqrt24 ? std::sqrt(24.0) : 4.0;
    PhiloxEngine eng(substream(stream, kChVariance));
    for (int i = 0; i < n; ++i) {
      if (config.c_sigma == 0.0) {
        sigma2[i] = 1.0;
        continue;
      }
      double v = config.c_sigma * (eng.chi2_2() - 2.0) / divisor + 1.0;
      int attempts = 0;
      while (!(v > 0.0)) {
        if (++attempts > 1000)
          fail(Errc::NonPositiveVariance, "could not draw a positive variance for unit " +
                                              std::to_string(i));
        ++redrawn;
        v = config.c_sigma * (eng.chi2_2() - 2.0) / divisor + 1.0;
      }
      sigma2[i] = v;
    }
  } else {
    if (lambda_y.rows() != n || f.cols() != lambda_y.cols())
      fail(Errc::DimensionMismatch, "variance case (b) needs loadings and factors");
    const double d_sigma =
        config.error_case == ErrorCase::i_normal ? std::sqrt(2.0) : std::sqrt(3.0);
    const double intercept = config.variance_b_intercept ? 0.5 : 0.0;
    const double t_len = static_cast<double>(f.rows());
    for (int i = 0; i < n; ++i) {
      // loading deviations from their common mean of one; this is the scaling
      // under which Var[sigma^2] matches case (a) at c_sigma = 1
      const Vector dev = lambda_y.row(i).transpose().array() - 1.0;
      const double mean_sq = (f * dev).squaredNorm() / t_len;
      sigma2[i] = intercept + d_sigma * mean_sq;
      if (!(sigma2[i] > 0.0))
        fail(Errc::NonPositiveVariance, "unit " + std::to_string(i) + " drew variance " +
                                            std::to_string(sigma2[i]));
    }
  }
  if (redraws) *redraws = redrawn;
  return sigma2;
}

SimulatedPanel simulate(const DgpConfig& config, RngStream stream) {
  config.validate();
  const int n = config.n_units;
  const int t = config.n_periods;
  const int r = config.n_factors;

  PhiloxEngine eng_f(substream(stream, kChFactors));
  Matrix f(t, r);
  if (config.two_way_restricted) {
    for (int s = 0; s < t; ++s) {
      f(s, 0) = eng_f.normal();
      f(s, 1) = 1.0;
    }
  } else {
    for (int s = 0; s < t; ++s)
      for (int k = 0; k < r; ++k) f(s, k) = eng_f.normal();
  }

  auto [lambda_y, lambda_x] = draw_loadings(config, stream);

  PhiloxEngine eng_eps(substream(stream, kChEps));
  PhiloxEngine eng_e(substream(stream, kChE));
  PanelMat eps(n, t), e_x(n, t);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < t; ++s) eps(i, s) = draw_error(eng_eps, config.error_case);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < t; ++s) e_x(i, s) = draw_error(eng_e, config.error_case);

  int redraws = 0;
  Vector sigma2 = draw_variances(config, lambda_y, f, stream, &redraws);
  const Vector sigma = sigma2.cwiseSqrt();

  PanelMat x(n, t), y(n, t);
  x = (lambda_x * f.transpose()) + e_x;
  y = config.beta * x + PanelMat(lambda_y * f.transpose()) +
      PanelMat(sigma.asDiagonal() * eps);

  SimulatedPanel sp;
  sp.panel = validate_panel(std::move(y), {std::move(x)});
  sp.truth.lambda_y = std::move(lambda_y);
  sp.truth.lambda_x = std::move(lambda_x);
  sp.truth.f = std::move(f);
  sp.truth.sigma2 = std::move(sigma2);
  sp.truth.eps = std::move(eps);
  sp.truth.variance_redraws = redraws;
  return sp;
}

namespace {

const std::map<std::string, LoadingCase> kLoadingNames = {
    {"symmetric", LoadingCase::I_symmetric}, {"skewed", LoadingCase::II_skewed}};
const std::map<std::string, ErrorCase> kErrorNames = {{"normal", ErrorCase::i_normal},
                                                      {"chi2", ErrorCase::ii_chi2}};
const std::map<std::string, VarianceCase> kVarianceNames = {
    {"independent", VarianceCase::a_independent},
    {"loading_function", VarianceCase::b_loading_function}};

template <typename T>
std::string name_of(const std::map<std::string, T>& names, T v) {
  for (const auto& [k, x] : names)
    if (x == v) return k;
  return "?";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(Errc::ParseError, "line " + std::to_string(line) + ": expected true/false, got '" + v + "'");
}

}  // namespace

std::string dgp_config_to_kv(const DgpConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "n_units=" << c.n_units << "\n"
      << "n_periods=" << c.n_periods << "\n"
      << "n_regressors=" << c.n_regressors << "\n"
      << "n_factors=" << c.n_factors << "\n"
      << "loading_case=" << name_of(kLoadingNames, c.loading_case) << "\n"
      << "error_case=" << name_of(kErrorNames, c.error_case) << "\n"
      << "variance_case=" << name_of(kVarianceNames, c.variance_case) << "\n"
      << "c_sigma=" << c.c_sigma << "\n"
      << "beta=" << c.beta << "\n"
      << "two_way_restricted=" << (c.two_way_restricted ? "true" : "false") << "\n"
      << "variance_a_divisor=" << (c.variance_a_divisor == VarADivisor::sqrt24 ? "sqrt24" : "4")
      << "\n"
      << "variance_b_intercept=" << (c.variance_b_intercept ? "true" : "false") << "\n"
      << "lambda_x_first_wide=" << (c.lambda_x_first_wide ? "true" : "false") << "\n"
      << "sym_loading_halfwidth=" << c.sym_loading_halfwidth << "\n"
      << "skew_loading_variance=" << c.skew_loading_variance << "\n";
  return out.str();
}

DgpConfig dgp_config_from_kv(std::istream& in) {
  DgpConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      fail(Errc::ParseError, "line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    try {
      if (key == "n_units") c.n_units = std::stoi(val);
      else if (key == "n_periods") c.n_periods = std::stoi(val);
      else if (key == "n_regressors") c.n_regressors = std::stoi(val);
      else if (key == "n_factors") c.n_factors = std::stoi(val);
      else if (key == "loading_case") c.loading_case = kLoadingNames.at(val);
      else if (key == "error_case") c.error_case = kErrorNames.at(val);
      else if (key == "variance_case") c.variance_case = kVarianceNames.at(val);
      else if (key == "c_sigma") c.c_sigma = std::stod(val);
      else if (key == "beta") c.beta = std::stod(val);
      else if (key == "two_way_restricted") c.two_way_restricted = parse_bool(val, lineno);
      else if (key == "variance_a_divisor")
        c.variance_a_divisor = (val == "sqrt24") ? VarADivisor::sqrt24
                               : (val == "4")    ? VarADivisor::four
                                                 : throw std::out_of_range(val);
      else if (key == "variance_b_intercept") c.variance_b_intercept = parse_bool(val, lineno);
      else if (key == "lambda_x_first_wide") c.lambda_x_first_wide = parse_bool(val, lineno);
      else if (key == "sym_loading_halfwidth") c.sym_loading_halfwidth = std::stod(val);
      else if (key == "skew_loading_variance") c.skew_loading_variance = std::stod(val);
      else
        fail(Errc::ParseError, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(Errc::ParseError,
           "line " + std::to_string(lineno) + ": bad value '" + val + "' for key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

DgpConfig load_dgp_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open config file " + path);
  return dgp_config_from_kv(in);
}

}  // namespace cdpanel
