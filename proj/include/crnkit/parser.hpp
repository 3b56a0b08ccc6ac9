#pragma once

// Reader/writer for the `.crn` text format.
//
//   # comment
//   species: A B C          (optional; must precede all reactions)
//   0 -> A @ 3.0
//   A + C <-> AC @ 1.5, 0.2
//   AC -> 2 B + C @ 1e-3
//
// `<->` takes a forward and a backward rate and yields two transitions.

#include <charconv>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "crnkit/error.hpp"
#include "crnkit/network.hpp"

namespace crn {

enum class Severity { Error, Warning };

struct ParseDiagnostic {
  int line = 1;
  int column = 1;
  std::string code;  // E_SYNTAX, E_RATE, E_UNKNOWN_SPECIES, E_EMPTY, W_SELF_LOOP
  std::string message;
  Severity severity = Severity::Error;

  std::string to_string() const {
    return std::to_string(line) + ":" + std::to_string(column) + ": " +
           (severity == Severity::Error ? "error" : "warning") + " " + code + ": " + message;
  }
};

struct ParseResult {
  std::optional<Network> network;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return network.has_value(); }
  const ParseDiagnostic* first_error() const {
    for (const auto& d : diagnostics)
      if (d.severity == Severity::Error) return &d;
    return nullptr;
  }
};

namespace detail {

inline bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

struct ParseFailure {
  int column;
  std::string code;
  std::string message;
};

struct Term {
  std::string name;
  std::int64_t coefficient;
  int column;
};

struct RawReaction {
  std::vector<Term> lhs;
  std::vector<Term> rhs;
  bool reversible = false;
  std::vector<double> rates;
  int line;
};

// Cursor over one line (comment already stripped). Columns are 1-based.
class LineScanner {
 public:
  explicit LineScanner(std::string_view text) : text_(text) {}

  int column() const { return static_cast<int>(pos_) + 1; }
  bool at_end() { skip_space(); return pos_ >= text_.size(); }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  bool consume(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  std::vector<Term> complex() {
    skip_space();
    std::vector<Term> terms;
    const int start = column();
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      auto [value, col] = integer();
      skip_space();
      if (!is_name_start(peek())) {
        if (value != 0) throw ParseFailure{col, "E_SYNTAX", "expected species name after coefficient"};
        return terms;  // the empty complex
      }
      terms.push_back(term_with(value, col));
    } else if (is_name_start(peek())) {
      terms.push_back(term_with(1, column()));
    } else {
      throw ParseFailure{start, "E_SYNTAX", "expected complex ('0' or species terms)"};
    }
    while (consume("+")) {
      skip_space();
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        auto [value, col] = integer();
        skip_space();
        if (!is_name_start(peek())) throw ParseFailure{column(), "E_SYNTAX", "expected species name"};
        terms.push_back(term_with(value, col));
      } else if (is_name_start(peek())) {
        terms.push_back(term_with(1, column()));
      } else {
        throw ParseFailure{column(), "E_SYNTAX", "expected term after '+'"};
      }
    }
    return terms;
  }

  double rate() {
    skip_space();
    const int col = column();
    std::size_t end = pos_;
    while (end < text_.size() && !is_space(text_[end]) && text_[end] != ',') ++end;
    std::string_view token = text_.substr(pos_, end - pos_);
    if (token.empty()) throw ParseFailure{col, "E_RATE", "missing rate"};
    double value = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
      throw ParseFailure{col, "E_RATE", "unparsable rate '" + std::string(token) + "'"};
    if (!(value > 0.0) || !std::isfinite(value))
      throw ParseFailure{col, "E_RATE", "rate must be positive and finite, got '" + std::string(token) + "'"};
    pos_ = end;
    return value;
  }

 private:
  std::pair<std::int64_t, int> integer() {
    const int col = column();
    std::int64_t value = 0;
    auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (res.ec != std::errc{}) throw ParseFailure{col, "E_SYNTAX", "bad integer coefficient"};
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return {value, col};
  }

  Term term_with(std::int64_t coefficient, int coefficient_column) {
    if (coefficient <= 0) throw ParseFailure{coefficient_column, "E_SYNTAX", "coefficient must be positive"};
    const int col = column();
    std::size_t end = pos_;
    while (end < text_.size() && is_name_char(text_[end])) ++end;
    Term t{std::string(text_.substr(pos_, end - pos_)), coefficient, col};
    pos_ = end;
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline RawReaction parse_reaction_line(std::string_view body, int line) {
  LineScanner sc(body);
  RawReaction r;
  r.line = line;
  r.lhs = sc.complex();
  if (sc.consume("<->")) {
    r.reversible = true;
  } else if (!sc.consume("->")) {
    throw ParseFailure{sc.column(), "E_SYNTAX", "expected '->' or '<->'"};
  }
  r.rhs = sc.complex();
  if (!sc.consume("@")) throw ParseFailure{sc.column(), "E_SYNTAX", "expected '@' before rate"};
  r.rates.push_back(sc.rate());
  if (sc.consume(",")) r.rates.push_back(sc.rate());
  if (!sc.at_end()) throw ParseFailure{sc.column(), "E_SYNTAX", "unexpected trailing text"};
  if (r.reversible && r.rates.size() != 2)
    throw ParseFailure{sc.column(), "E_SYNTAX", "'<->' requires forward and backward rates"};
  if (!r.reversible && r.rates.size() != 1)
    throw ParseFailure{sc.column(), "E_SYNTAX", "'->' takes exactly one rate"};
  return r;
}

}  // namespace detail

inline ParseResult parse_network(std::string_view text) {
  using namespace detail;
  ParseResult result;
  std::vector<std::string> species;
  std::map<std::string, std::size_t, std::less<>> index;
  bool have_header = false;
  bool seen_reaction = false;
  bool failed = false;
  std::vector<RawReaction> reactions;

  auto error = [&](int line, int col, std::string code, std::string msg) {
    result.diagnostics.push_back({line, col, std::move(code), std::move(msg), Severity::Error});
    failed = true;
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::size_t first = 0;
    while (first < line.size() && is_space(line[first])) ++first;
    if (first == line.size()) continue;

    if (line.substr(first).starts_with("species:")) {
      if (have_header || seen_reaction) {
        error(line_no, static_cast<int>(first) + 1, "E_SYNTAX", "species header must appear once, before reactions");
        continue;
      }
      have_header = true;
      std::size_t p = first + 8;
      while (p < line.size()) {
        while (p < line.size() && is_space(line[p])) ++p;
        if (p >= line.size()) break;
        const std::size_t start = p;
        if (!is_name_start(line[p])) {
          error(line_no, static_cast<int>(p) + 1, "E_SYNTAX", "invalid species name");
          break;
        }
        while (p < line.size() && is_name_char(line[p])) ++p;
        if (p < line.size() && !is_space(line[p])) {
          error(line_no, static_cast<int>(p) + 1, "E_SYNTAX", "invalid character in species name");
          break;
        }
        std::string name(line.substr(start, p - start));
        if (index.count(name)) {
          error(line_no, static_cast<int>(start) + 1, "E_SYNTAX", "duplicate species '" + name + "'");
          continue;
        }
        index.emplace(name, species.size());
        species.push_back(std::move(name));
      }
      continue;
    }

    seen_reaction = true;
    try {
      RawReaction r = parse_reaction_line(line, line_no);
      bool unknown = false;
      for (const auto* side : {&r.lhs, &r.rhs})
        for (const auto& term : *side) {
          if (index.count(term.name)) continue;
          if (have_header) {
            error(line_no, term.column, "E_UNKNOWN_SPECIES", "species '" + term.name + "' is not declared");
            unknown = true;
          } else {
            index.emplace(term.name, species.size());
            species.push_back(term.name);
          }
        }
      if (!unknown) reactions.push_back(std::move(r));
    } catch (const ParseFailure& f) {
      error(line_no, f.column, f.code, f.message);
    }
  }

  if (failed) return result;

  auto build = [&](const std::vector<Term>& terms) {
    CountVector v(species.size());
    for (const auto& t : terms) v.add(index.at(t.name), t.coefficient);
    return v;
  };
  std::vector<Transition> transitions;
  for (const auto& r : reactions) {
    CountVector lhs = build(r.lhs), rhs = build(r.rhs);
    transitions.push_back({lhs, rhs, r.rates[0], {}});
    if (r.reversible) transitions.push_back({rhs, lhs, r.rates[1], {}});
    if (lhs == rhs)
      result.diagnostics.push_back({r.line, 1, "W_SELF_LOOP", "reaction input equals output", Severity::Warning});
  }
  if (transitions.empty())
    result.diagnostics.push_back({1, 1, "E_EMPTY", "network has no reactions", Severity::Warning});
  result.network.emplace(std::move(species), std::move(transitions));
  return result;
}

/// Throws crn::Error carrying the first error diagnostic.
inline Network parse_network_or_throw(std::string_view text) {
  auto result = parse_network(text);
  if (result.ok()) return std::move(*result.network);
  const auto* d = result.first_error();
  ErrorCode code = ErrorCode::Syntax;
  if (d->code == "E_RATE") code = ErrorCode::Rate;
  if (d->code == "E_UNKNOWN_SPECIES") code = ErrorCode::UnknownSpecies;
  throw Error(code, d->to_string());
}

/// Shortest decimal string that reads back to the same double.
inline std::string format_rate(double rate) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, rate);
  return std::string(buf, res.ptr);
}

inline std::string format_complex(const Network& net, const CountVector& c) {
  if (c.is_zero()) return "0";
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    if (!out.empty()) out += " + ";
    if (c[i] != 1) out += std::to_string(c[i]) + " ";
    out += net.species()[i];
  }
  return out;
}

/// Canonical text: header line, then one `->` line per transition. No trailing newline.
inline std::string format_network(const Network& net) {
  std::string out = "species:";
  for (const auto& s : net.species()) out += " " + s;
  for (const auto& t : net.transitions()) {
    out += "\n";
    out += format_complex(net, t.input) + " -> " + format_complex(net, t.output) + " @ " + format_rate(t.rate);
  }
  return out;
}

}  // namespace crn
