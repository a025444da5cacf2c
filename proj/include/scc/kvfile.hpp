#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace scc {

/// Growth stanza `grow(init, rate, decay)`: v(1) = init, g(1) = rate,
/// v(t+1) = v(t) * exp(g(t)), g(t+1) = g(t) * (1 - decay).
struct Growth {
  double init = 0.0;
  double rate = 0.0;
  double decay = 0.0;

  bool operator==(const Growth&) const = default;
};

std::vector<double> expand_growth(const Growth& g, int periods);

using KvValue = std::variant<double, std::vector<double>, Growth, std::string>;

struct KvEntry {
  std::string key;
  KvValue value;
  int line = 0;
};

class KvParseError : public std::runtime_error {
 public:
  KvParseError(std::string source, int line, const std::string& what);

  const std::string& source() const { return source_; }
  int line() const { return line_; }

 private:
  std::string source_;
  int line_;
};

/// Parses the line-oriented `key = value` grammar shared by parameter and
/// scenario files. Values are numbers, `[a, b, ...]` lists (which may span
/// lines until the closing bracket), `grow(init, rate, decay)` stanzas, or
/// strings (bare words or double-quoted). `#` starts a comment.
std::vector<KvEntry> parse_kv(std::string_view text, std::string_view source);

/// Round-trip-exact decimal rendering (17 significant digits).
std::string format_double(double v);

}  // namespace scc
