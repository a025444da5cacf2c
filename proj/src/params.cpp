#include "scc/params.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "scc/kvfile.hpp"

namespace scc {

namespace {

struct ScalarField {
  const char* key;
  double Params::*member;
};

struct VectorField {
  const char* key;
  std::vector<double> Params::*member;
  bool growable;
};

constexpr std::array kScalars{
    ScalarField{"pi2", &Params::pi2},     ScalarField{"pi3", &Params::pi3},
    ScalarField{"pi5", &Params::pi5},     ScalarField{"pi7", &Params::pi7},
    ScalarField{"pi8", &Params::pi8},     ScalarField{"pi9", &Params::pi9},
    ScalarField{"pi11", &Params::pi11},   ScalarField{"pi13", &Params::pi13},
    ScalarField{"pi16", &Params::pi16},   ScalarField{"pi18", &Params::pi18},
    ScalarField{"pi19", &Params::pi19},   ScalarField{"pi21", &Params::pi21},
    ScalarField{"pi22", &Params::pi22},   ScalarField{"pi23", &Params::pi23},
    ScalarField{"pi24", &Params::pi24},   ScalarField{"pi25", &Params::pi25},
    ScalarField{"pi26", &Params::pi26},   ScalarField{"pi27", &Params::pi27},
    ScalarField{"pi28", &Params::pi28},   ScalarField{"pi29", &Params::pi29},
    ScalarField{"pi31", &Params::pi31},   ScalarField{"pi32", &Params::pi32},
    ScalarField{"pi33", &Params::pi33},   ScalarField{"pi34", &Params::pi34},
    ScalarField{"K0", &Params::k0},       ScalarField{"M_AT0", &Params::m_at0},
    ScalarField{"M_UP0", &Params::m_up0}, ScalarField{"M_LO0", &Params::m_lo0},
    ScalarField{"T_AT0", &Params::t_at0}, ScalarField{"T_LO0", &Params::t_lo0},
    ScalarField{"c2", &Params::c2},       ScalarField{"unit_scale", &Params::unit_scale},
};

constexpr std::array kVectors{
    VectorField{"pi1", &Params::pi1, true},    VectorField{"pi4", &Params::pi4, true},
    VectorField{"pi6", &Params::pi6, true},    VectorField{"pi10", &Params::pi10, false},
    VectorField{"pi12", &Params::pi12, true},  VectorField{"pi14", &Params::pi14, true},
    VectorField{"pi15", &Params::pi15, false}, VectorField{"pi17", &Params::pi17, false},
    VectorField{"pi20", &Params::pi20, true},  VectorField{"pi30", &Params::pi30, false},
    VectorField{"pi35", &Params::pi35, false}, VectorField{"c1", &Params::c1, false},
};

const ScalarField* find_scalar(std::string_view key) {
  for (const auto& f : kScalars) {
    if (key == f.key) return &f;
  }
  return nullptr;
}

const VectorField* find_vector(std::string_view key) {
  for (const auto& f : kVectors) {
    if (key == f.key) return &f;
  }
  return nullptr;
}

[[noreturn]] void fail(ParamsError::Kind kind, const std::string& source, const std::string& key,
                       int line, const std::string& msg) {
  throw ParamsError(kind, key, line, source + ":" + std::to_string(line) + ": " + msg);
}

double as_scalar(const KvEntry& e, const std::string& source) {
  if (const auto* v = std::get_if<double>(&e.value)) return *v;
  fail(ParamsError::Kind::ParseError, source, e.key, e.line, "'" + e.key + "' expects a number");
}

}  // namespace

ParamsError::ParamsError(Kind kind, std::string key, int line, const std::string& what)
    : std::runtime_error(what), kind_(kind), key_(std::move(key)), line_(line) {}

Params parse_params(std::string_view text, std::string_view source_view) {
  const std::string source(source_view);
  std::vector<KvEntry> entries;
  try {
    entries = parse_kv(text, source_view);
  } catch (const KvParseError& e) {
    throw ParamsError(ParamsError::Kind::ParseError, "", e.line(), e.what());
  }

  Params p;
  std::optional<int> t_max;
  std::optional<double> conservation;
  std::map<std::string, const KvEntry*> scalars;
  std::map<std::string, const KvEntry*> explicit_vectors;
  std::map<std::string, const KvEntry*> growth_vectors;

  for (const auto& e : entries) {
    if (e.key == "t_max" || e.key == "carbon_conservation") {
      if ((e.key == "t_max" && t_max) || (e.key == "carbon_conservation" && conservation)) {
        fail(ParamsError::Kind::DuplicateKey, source, e.key, e.line, "duplicate key '" + e.key + "'");
      }
      double v = as_scalar(e, source);
      if (e.key == "t_max") {
        if (v != std::floor(v) || v < 1 || v > 100000) {
          fail(ParamsError::Kind::ParseError, source, e.key, e.line, "t_max must be a positive integer");
        }
        t_max = static_cast<int>(v);
      } else {
        conservation = v;
      }
    } else if (find_scalar(e.key)) {
      if (scalars.count(e.key)) {
        fail(ParamsError::Kind::DuplicateKey, source, e.key, e.line, "duplicate key '" + e.key + "'");
      }
      (void)as_scalar(e, source);
      scalars[e.key] = &e;
    } else if (const auto* vf = find_vector(e.key)) {
      if (std::holds_alternative<std::vector<double>>(e.value)) {
        if (explicit_vectors.count(e.key)) {
          fail(ParamsError::Kind::DuplicateKey, source, e.key, e.line, "duplicate key '" + e.key + "'");
        }
        explicit_vectors[e.key] = &e;
      } else if (std::holds_alternative<Growth>(e.value)) {
        if (!vf->growable) {
          fail(ParamsError::Kind::ParseError, source, e.key, e.line,
               "'" + e.key + "' does not accept a grow() stanza");
        }
        if (growth_vectors.count(e.key)) {
          fail(ParamsError::Kind::DuplicateKey, source, e.key, e.line, "duplicate key '" + e.key + "'");
        }
        growth_vectors[e.key] = &e;
      } else {
        fail(ParamsError::Kind::ParseError, source, e.key, e.line,
             "'" + e.key + "' expects a list or grow() stanza");
      }
    } else {
      fail(ParamsError::Kind::UnknownKey, source, e.key, e.line, "unknown key '" + e.key + "'");
    }
  }

  const int last_line = entries.empty() ? 1 : entries.back().line;
  if (!t_max) fail(ParamsError::Kind::MissingKey, source, "t_max", last_line, "missing key 't_max'");
  p.t_max = *t_max;
  p.carbon_conservation = conservation.value_or(0.0) != 0.0;

  for (const auto& f : kScalars) {
    auto it = scalars.find(f.key);
    if (it == scalars.end()) {
      fail(ParamsError::Kind::MissingKey, source, f.key, last_line,
           std::string("missing key '") + f.key + "'");
    }
    p.*f.member = std::get<double>(it->second->value);
  }

  for (const auto& f : kVectors) {
    if (auto it = explicit_vectors.find(f.key); it != explicit_vectors.end()) {
      const auto& v = std::get<std::vector<double>>(it->second->value);
      if (static_cast<int>(v.size()) != p.t_max) {
        fail(ParamsError::Kind::LengthMismatch, source, f.key, it->second->line,
             std::string("'") + f.key + "' has " + std::to_string(v.size()) + " entries, t_max is " +
                 std::to_string(p.t_max));
      }
      p.*f.member = v;
    } else if (auto git = growth_vectors.find(f.key); git != growth_vectors.end()) {
      p.*f.member = expand_growth(std::get<Growth>(git->second->value), p.t_max);
    } else {
      fail(ParamsError::Kind::MissingKey, source, f.key, last_line,
           std::string("missing key '") + f.key + "'");
    }
  }
  return p;
}

Params load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParamsError(ParamsError::Kind::ParseError, "", 0, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_params(buf.str(), path.string());
}

std::string to_text(const Params& p) {
  std::ostringstream out;
  out << "t_max = " << p.t_max << "\n";
  out << "carbon_conservation = " << (p.carbon_conservation ? 1 : 0) << "\n";
  for (const auto& f : kScalars) out << f.key << " = " << format_double(p.*f.member) << "\n";
  for (const auto& f : kVectors) {
    out << f.key << " = [";
    const auto& v = p.*f.member;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out << (i ? ", " : "") << format_double(v[i]);
    }
    out << "]\n";
  }
  return out.str();
}

Params Params::truncated(int periods) const {
  if (periods < 1 || periods > t_max) {
    throw std::invalid_argument("horizon " + std::to_string(periods) + " outside [1, " +
                                std::to_string(t_max) + "]");
  }
  Params out = *this;
  out.t_max = periods;
  for (const auto& f : kVectors) (out.*f.member).resize(static_cast<std::size_t>(periods));
  return out;
}

Params Params::with_unit_utility_weights() const {
  Params out = *this;
  std::fill(out.pi1.begin(), out.pi1.end(), 1.0);
  return out;
}

double implied_mac_scale(const Params& p, int period) {
  const auto i = static_cast<std::size_t>(period - 1);
  return p.unit_scale * p.pi10[i] * p.pi11 * p.pi4[i] / (p.pi14[i] * p.pi15[i]);
}

ValidationReport validate(const Params& p) {
  ValidationReport r;
  auto error = [&](std::string field, std::string msg) {
    r.errors.push_back({std::move(field), std::move(msg)});
  };
  auto warn = [&](std::string field, std::string msg) {
    r.warnings.push_back({std::move(field), std::move(msg)});
  };

  if (p.t_max < 2) error("t_max", "must be at least 2");
  bool lengths_ok = true;
  for (const auto& f : kVectors) {
    if (static_cast<int>((p.*f.member).size()) != p.t_max) {
      error(f.key, "length " + std::to_string((p.*f.member).size()) + " differs from t_max");
      lengths_ok = false;
    }
  }
  for (const auto& f : kScalars) {
    if (!std::isfinite(p.*f.member)) error(f.key, "not finite");
  }
  for (const auto& f : kVectors) {
    for (double v : p.*f.member) {
      if (!std::isfinite(v)) {
        error(f.key, "contains a non-finite entry");
        break;
      }
    }
  }

  if (!(p.pi3 > 1.0)) error("pi3", "discount base must exceed 1");
  if (!(p.pi5 > 0.0 && p.pi5 < 1.0)) error("pi5", "capital elasticity must lie in (0, 1)");
  if (!(p.pi11 > 1.0)) error("pi11", "abatement cost exponent must exceed 1");
  if (!(p.pi13 <= 0.0 && p.pi13 >= -1.0)) {
    error("pi13", "carried capital fraction -pi13 must lie in [0, 1]");
  }
  if (!(p.pi29 > 0.0)) error("pi29", "preindustrial carbon must be positive");
  for (std::size_t i = 0; i < p.pi35.size(); ++i) {
    if (!(p.pi35[i] > 0.0)) {
      error("pi35", "upper abatement bound must be positive (period " + std::to_string(i + 1) + ")");
      break;
    }
  }
  for (std::size_t i = 0; i < p.pi12.size(); ++i) {
    if (!(p.pi12[i] > 0.0)) {
      error("pi12", "population must be positive (period " + std::to_string(i + 1) + ")");
      break;
    }
  }
  if (!(p.k0 > 0.0)) error("K0", "initial capital must be positive");
  if (!(p.m_at0 > 0.0)) error("M_AT0", "initial atmospheric carbon must be positive");

  if (p.carbon_conservation) {
    const double col_at = p.pi21 + p.pi23;
    const double col_up = p.pi22 + p.pi24 + p.pi26;
    const double col_lo = p.pi25 + p.pi27;
    for (double col : {col_at, col_up, col_lo}) {
      if (std::abs(col - 1.0) > 1e-9) {
        error("carbon_cycle", "transfer matrix column sums to " + format_double(col) + ", expected 1");
        break;
      }
    }
  }

  if (lengths_ok && p.t_max >= 1) {
    for (int t = 1; t <= p.t_max; ++t) {
      const double implied = implied_mac_scale(p, t);
      const double c1 = p.c1[static_cast<std::size_t>(t - 1)];
      if (std::abs(c1 - implied) > 1e-6 * std::max(std::abs(implied), 1e-300)) {
        warn("c1", "differs from the abatement-implied value " + format_double(implied) +
                       " at period " + std::to_string(t));
        break;
      }
    }
    if (std::abs(p.c2 - (p.pi11 - 1.0)) > 1e-12) warn("c2", "differs from pi11 - 1");
  }

  auto by_field = [](const ValidationIssue& a, const ValidationIssue& b) { return a.field < b.field; };
  std::stable_sort(r.errors.begin(), r.errors.end(), by_field);
  std::stable_sort(r.warnings.begin(), r.warnings.end(), by_field);
  return r;
}

}  // namespace scc
