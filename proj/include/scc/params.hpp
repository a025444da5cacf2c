#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scc {

/// Model constants. Field names follow the parameter-file keys; units are
/// documented in data/dice2016.params. Vectors are indexed by period - 1.
struct Params {
  int t_max = 0;

  std::vector<double> pi1;   // utility weight
  double pi2 = 0.0;          // utility exponent
  double pi3 = 0.0;          // per-period discount base, R(t) = pi3^-t
  std::vector<double> pi4;   // total factor productivity (output)
  double pi5 = 0.0;          // capital elasticity
  std::vector<double> pi6;   // labor
  double pi7 = 0.0;          // labor elasticity
  double pi8 = 0.0;          // linear damage coefficient, 1/degC
  double pi9 = 0.0;          // quadratic damage coefficient, 1/degC^2
  std::vector<double> pi10;  // abatement cost scale
  double pi11 = 0.0;         // abatement cost exponent
  std::vector<double> pi12;  // population, millions
  double pi13 = 0.0;         // capital carry; stored negative, see K recursion
  std::vector<double> pi14;  // carbon intensity
  std::vector<double> pi15;  // productivity (emissions)
  double pi16 = 0.0;
  std::vector<double> pi17;  // labor (emissions)
  double pi18 = 0.0;
  double pi19 = 0.0;         // cumulative industrial emissions cap, GtCO2
  std::vector<double> pi20;  // land emissions, GtCO2 per period
  double pi21 = 0.0, pi22 = 0.0, pi23 = 0.0, pi24 = 0.0, pi25 = 0.0, pi26 = 0.0, pi27 = 0.0;
  double pi28 = 0.0;         // forcing per CO2 doubling, W/m^2
  double pi29 = 0.0;         // preindustrial atmospheric carbon
  std::vector<double> pi30;  // exogenous forcing, W/m^2
  double pi31 = 0.0, pi32 = 0.0, pi33 = 0.0, pi34 = 0.0;
  std::vector<double> pi35;  // upper bound on the abatement rate

  double k0 = 0.0;
  double m_at0 = 0.0, m_up0 = 0.0, m_lo0 = 0.0;
  double t_at0 = 0.0, t_lo0 = 0.0;

  std::vector<double> c1;    // marginal abatement cost scale, USD/tCO2
  double c2 = 0.0;           // marginal abatement cost exponent

  double unit_scale = 1000.0;  // native consumption per native emission -> USD/tCO2
  bool carbon_conservation = false;

  bool operator==(const Params&) const = default;

  /// First `periods` periods of every vector.
  Params truncated(int periods) const;

  /// Same model with pi1 replaced by a vector of ones (utility not weighted
  /// by population size).
  Params with_unit_utility_weights() const;
};

class ParamsError : public std::runtime_error {
 public:
  enum class Kind { MissingKey, LengthMismatch, ParseError, UnknownKey, DuplicateKey };

  ParamsError(Kind kind, std::string key, int line, const std::string& what);

  Kind kind() const { return kind_; }
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  std::string key_;
  int line_;
};

Params parse_params(std::string_view text, std::string_view source = "<params>");
Params load_params(const std::filesystem::path& path);

/// Renders `p` in the parameter-file grammar; parse_params(to_text(p)) == p.
std::string to_text(const Params& p);

struct ValidationIssue {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> errors;
  std::vector<ValidationIssue> warnings;

  bool ok() const { return errors.empty(); }
};

ValidationReport validate(const Params& p);

/// Marginal abatement cost scale implied by the abatement and emissions
/// blocks: unit_scale * pi10 * pi11 * pi4 / (pi14 * pi15).
double implied_mac_scale(const Params& p, int period);

}  // namespace scc
