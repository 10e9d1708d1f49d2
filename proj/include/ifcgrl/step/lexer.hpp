#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ifcgrl::step {

enum class TokenKind {
  keyword,    // IFCWALL, DATA, ENDSEC, ...
  integer,    // 42, -7
  real,       // 1., 1.0E-2
  string,     // 'text' with ISO escapes decoded
  enum_token, // .TRUE. -> payload TRUE
  reference,  // #12 -> payload 12
  lparen,
  rparen,
  comma,
  semicolon,
  equals,
  dollar,
  star,
};

struct Token {
  TokenKind kind;
  std::string text;        // decoded payload for keyword/string/enum
  std::int64_t int_value = 0;
  double real_value = 0.0;
  int line = 0;            // 1-based
  int column = 0;          // 1-based
  std::size_t offset = 0;  // byte offset into the source
};

enum class LexErrorKind {
  unterminated_string,
  unterminated_comment,
  invalid_character,
};

class LexError : public std::runtime_error {
 public:
  LexError(LexErrorKind kind, int line, int column, const std::string& what)
      : std::runtime_error(what), kind(kind), line(line), column(column) {}
  LexErrorKind kind;
  int line;
  int column;
};

// Tokenizes a full ISO 10303-21 file. Comments are skipped; string escapes
// ('' doubling, \\, \S\, \X\, \X2\..\X0\, \X4\..\X0\) are decoded to UTF-8.
std::vector<Token> tokenize(std::string_view text);

const char* token_kind_name(TokenKind kind);

}  // namespace ifcgrl::step
