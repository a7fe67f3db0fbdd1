#pragma once
// Text formats: KB files, query files, fact dumps.

#include <string>

#include "elq/kb.h"

namespace elq {

class FactStore;

struct ParseError : std::runtime_error {
  int line = 0;
  int column = 0;
  std::string message;
  std::string snippet;
  ParseError(int ln, int col, std::string msg, std::string snip)
      : std::runtime_error("parse error at " + std::to_string(ln) + ":" +
                           std::to_string(col) + ": " + msg),
        line(ln),
        column(col),
        message(std::move(msg)),
        snippet(std::move(snip)) {}
};

KB parse_kb(const std::string& text);
std::string serialize_kb(const KB& kb);

// Query symbols are interned into `sym` (auto-declared like KB symbols).
CQ parse_query(const std::string& text, Symbols& sym);
std::string print_query(const CQ& q, const Symbols& sym);

// One fact per line, lexicographically sorted; equality classes as
// `eq member representative` lines; aux individuals are named `aux:R:A`.
std::string serialize_facts(const FactStore& store);

}  // namespace elq
