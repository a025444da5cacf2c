#include "scc/kvfile.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace scc {

std::vector<double> expand_growth(const Growth& g, int periods) {
  std::vector<double> out;
  if (periods <= 0) return out;
  out.reserve(static_cast<std::size_t>(periods));
  double value = g.init;
  double rate = g.rate;
  out.push_back(value);
  for (int t = 1; t < periods; ++t) {
    value *= std::exp(rate);
    rate *= 1.0 - g.decay;
    out.push_back(value);
  }
  return out;
}

KvParseError::KvParseError(std::string source, int line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
      source_(std::move(source)),
      line_(line) {}

namespace {

class Cursor {
 public:
  Cursor(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  bool done() const { return pos_ >= text_.size(); }
  int line() const { return line_; }
  char peek() const { return done() ? '\0' : text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  // Skips blanks and comments; newlines only when `cross_lines` is set.
  void skip_space(bool cross_lines) {
    while (!done()) {
      char ch = peek();
      if (ch == '#') {
        while (!done() && peek() != '\n') advance();
      } else if (ch == '\n') {
        if (!cross_lines) return;
        advance();
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        advance();
      } else {
        return;
      }
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw KvParseError(std::string(source_), line_, what);
  }

  void expect(char ch, bool cross_lines) {
    skip_space(cross_lines);
    if (peek() != ch) fail(std::string("expected '") + ch + "'");
    advance();
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (!done()) {
      char ch = peek();
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') {
        advance();
      } else {
        break;
      }
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  double number(bool cross_lines) {
    skip_space(cross_lines);
    std::size_t start = pos_;
    while (!done()) {
      char ch = peek();
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '+') {
        advance();
      } else {
        break;
      }
    }
    std::string_view token = text_.substr(start, pos_ - start);
    if (token.empty()) fail("expected a number");
    double v = 0.0;
    const char* first = token.data();
    if (token.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      fail("malformed number '" + std::string(token) + "'");
    }
    return v;
  }

  std::string quoted() {
    advance();  // opening quote
    std::string out;
    while (!done() && peek() != '"') {
      if (peek() == '\n') fail("unterminated string");
      out.push_back(peek());
      advance();
    }
    if (done()) fail("unterminated string");
    advance();
    return out;
  }

  std::string bare_word() {
    std::size_t start = pos_;
    while (!done()) {
      char ch = peek();
      if (ch == '\n' || ch == '#') break;
      advance();
    }
    std::string word(text_.substr(start, pos_ - start));
    while (!word.empty() && std::isspace(static_cast<unsigned char>(word.back()))) word.pop_back();
    return word;
  }

  std::string_view rest() const { return text_.substr(pos_); }

  void end_of_line() {
    skip_space(false);
    if (!done() && peek() != '\n') fail("trailing characters after value");
  }

 private:
  std::string_view text_;
  std::string_view source_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

// Digits, or a sign/point leading into one. "../x" and "-x" stay strings.
bool starts_number(std::string_view rest) {
  auto digit = [&](std::size_t i) { return i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i])); };
  if (rest.empty()) return false;
  if (digit(0)) return true;
  std::size_t i = 0;
  if (rest[i] == '-' || rest[i] == '+') ++i;
  if (i < rest.size() && rest[i] == '.') ++i;
  if (digit(i)) return true;
  for (std::string_view word : {"inf", "nan"}) {
    if (!rest.substr(i).starts_with(word)) continue;
    const std::size_t end = i + word.size();
    if (end == rest.size() || std::isspace(static_cast<unsigned char>(rest[end])) || rest[end] == '#') return true;
  }
  return false;
}

}  // namespace

std::vector<KvEntry> parse_kv(std::string_view text, std::string_view source) {
  std::vector<KvEntry> entries;
  Cursor cur(text, source);
  while (true) {
    cur.skip_space(true);
    if (cur.done()) break;
    KvEntry entry;
    entry.line = cur.line();
    entry.key = cur.identifier();
    if (entry.key.empty()) cur.fail("expected a key");
    cur.expect('=', false);
    cur.skip_space(false);
    char ch = cur.peek();
    if (ch == '[') {
      cur.advance();
      std::vector<double> values;
      cur.skip_space(true);
      if (cur.peek() == ']') {
        cur.advance();
      } else {
        while (true) {
          cur.skip_space(true);
          if (cur.done()) {
            throw KvParseError(std::string(source), entry.line, "unterminated list for '" + entry.key + "'");
          }
          values.push_back(cur.number(true));
          cur.skip_space(true);
          if (cur.done()) {
            throw KvParseError(std::string(source), entry.line, "unterminated list for '" + entry.key + "'");
          }
          if (cur.peek() == ',') {
            cur.advance();
          } else if (cur.peek() == ']') {
            cur.advance();
            break;
          } else {
            cur.fail("expected ',' or ']' in list");
          }
        }
      }
      entry.value = std::move(values);
    } else if (ch == '"') {
      entry.value = cur.quoted();
    } else if (starts_number(cur.rest())) {
      entry.value = cur.number(false);
    } else if (ch == '\0' || ch == '\n') {
      cur.fail("missing value for '" + entry.key + "'");
    } else {
      std::string word = cur.bare_word();
      if (word.rfind("grow", 0) == 0 && word.size() > 4 &&
          (word[4] == '(' || std::isspace(static_cast<unsigned char>(word[4])))) {
        Cursor inner(word, source);
        (void)inner.identifier();
        Growth g;
        try {
          inner.expect('(', false);
          g.init = inner.number(false);
          inner.expect(',', false);
          g.rate = inner.number(false);
          inner.expect(',', false);
          g.decay = inner.number(false);
          inner.expect(')', false);
          inner.end_of_line();
        } catch (const KvParseError& e) {
          cur.fail(std::string("malformed grow() stanza: ") + e.what());
        }
        entry.value = g;
      } else {
        entry.value = word;
      }
    }
    cur.end_of_line();
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace scc
