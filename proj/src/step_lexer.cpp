#include "ifcgrl/step/lexer.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace ifcgrl::step {

namespace {

bool is_keyword_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '!';
}

bool is_keyword_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        skip_comment();
        continue;
      }
      tokens.push_back(next_token());
    }
    return tokens;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  [[noreturn]] void fail(LexErrorKind kind, int line, int col, const std::string& msg) {
    throw LexError(kind, line, col,
                   msg + " at line " + std::to_string(line) + ", column " + std::to_string(col));
  }

  Token make(TokenKind kind, int line, int col, std::size_t offset) {
    Token t;
    t.kind = kind;
    t.line = line;
    t.column = col;
    t.offset = offset;
    return t;
  }

  void skip_comment() {
    int line = line_, col = col_;
    advance();  // '/'
    advance();  // '*'
    while (!at_end()) {
      if (peek() == '*' && peek(1) == '/') {
        advance();
        advance();
        return;
      }
      advance();
    }
    fail(LexErrorKind::unterminated_comment, line, col, "unterminated comment");
  }

  Token next_token() {
    int line = line_, col = col_;
    std::size_t offset = pos_;
    char c = peek();

    switch (c) {
      case '(': advance(); return make(TokenKind::lparen, line, col, offset);
      case ')': advance(); return make(TokenKind::rparen, line, col, offset);
      case ',': advance(); return make(TokenKind::comma, line, col, offset);
      case ';': advance(); return make(TokenKind::semicolon, line, col, offset);
      case '=': advance(); return make(TokenKind::equals, line, col, offset);
      case '$': advance(); return make(TokenKind::dollar, line, col, offset);
      case '*': advance(); return make(TokenKind::star, line, col, offset);
      default: break;
    }

    if (c == '#') return lex_reference(line, col, offset);
    if (c == '\'') return lex_string(line, col, offset);
    if (c == '.') return lex_enum(line, col, offset);
    if (c == '+' || c == '-' || is_digit(c)) return lex_number(line, col, offset);
    if (is_keyword_start(c)) return lex_keyword(line, col, offset);

    fail(LexErrorKind::invalid_character, line, col,
         std::string("invalid character '") + c + "'");
  }

  Token lex_reference(int line, int col, std::size_t offset) {
    advance();  // '#'
    if (!is_digit(peek())) {
      fail(LexErrorKind::invalid_character, line, col, "'#' not followed by an instance id");
    }
    std::int64_t id = 0;
    while (is_digit(peek())) id = id * 10 + (advance() - '0');
    Token t = make(TokenKind::reference, line, col, offset);
    t.int_value = id;
    return t;
  }

  Token lex_keyword(int line, int col, std::size_t offset) {
    std::string text;
    if (peek() == '!') text.push_back(advance());
    while (is_keyword_char(peek()) || peek() == '-') {
      // '-' appears only in the ISO-10303-21 sentinel keywords
      char k = advance();
      text.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(k))));
    }
    Token t = make(TokenKind::keyword, line, col, offset);
    t.text = std::move(text);
    return t;
  }

  Token lex_number(int line, int col, std::size_t offset) {
    std::string digits;
    if (peek() == '+' || peek() == '-') digits.push_back(advance());
    if (!is_digit(peek())) {
      fail(LexErrorKind::invalid_character, line, col, "sign without digits");
    }
    while (is_digit(peek())) digits.push_back(advance());
    bool is_real = false;
    if (peek() == '.') {
      is_real = true;
      digits.push_back(advance());
      while (is_digit(peek())) digits.push_back(advance());
    }
    if (peek() == 'e' || peek() == 'E') {
      is_real = true;
      digits.push_back(advance());
      if (peek() == '+' || peek() == '-') digits.push_back(advance());
      while (is_digit(peek())) digits.push_back(advance());
    }
    if (is_real) {
      Token t = make(TokenKind::real, line, col, offset);
      // "1." parses fine with strtod; from_chars on gcc requires a digit
      // after the point only in scientific, both accept this form.
      t.real_value = std::strtod(digits.c_str(), nullptr);
      return t;
    }
    Token t = make(TokenKind::integer, line, col, offset);
    std::from_chars(digits.data(), digits.data() + digits.size(), t.int_value);
    return t;
  }

  Token lex_enum(int line, int col, std::size_t offset) {
    advance();  // '.'
    std::string name;
    while (is_keyword_char(peek())) name.push_back(advance());
    if (name.empty() || peek() != '.') {
      fail(LexErrorKind::invalid_character, line, col, "malformed enumeration token");
    }
    advance();  // closing '.'
    Token t = make(TokenKind::enum_token, line, col, offset);
    t.text = std::move(name);
    return t;
  }

  Token lex_string(int line, int col, std::size_t offset) {
    advance();  // opening quote
    std::string value;
    while (true) {
      if (at_end()) {
        fail(LexErrorKind::unterminated_string, line, col, "unterminated string");
      }
      char c = advance();
      if (c == '\'') {
        if (peek() == '\'') {  // '' -> literal quote
          advance();
          value.push_back('\'');
          continue;
        }
        break;
      }
      if (c == '\\') {
        decode_escape(value, line, col);
        continue;
      }
      value.push_back(c);
    }
    Token t = make(TokenKind::string, line, col, offset);
    t.text = std::move(value);
    return t;
  }

  // Called after the leading backslash has been consumed.
  void decode_escape(std::string& out, int line, int col) {
    if (at_end()) fail(LexErrorKind::unterminated_string, line, col, "unterminated string");
    char c = advance();
    switch (c) {
      case '\\':
        out.push_back('\\');
        return;
      case 'S': {  // \S\c -> c + 0x80 in the current code page
        expect_backslash(line, col);
        if (at_end()) fail(LexErrorKind::unterminated_string, line, col, "unterminated string");
        unsigned char ch = static_cast<unsigned char>(advance());
        append_utf8(out, static_cast<std::uint32_t>(ch) + 0x80);
        return;
      }
      case 'P': {  // \P?\ code page directive; affects \S\ pages we don't track
        while (!at_end() && peek() != '\\') advance();
        expect_backslash(line, col);
        return;
      }
      case 'X': {
        if (peek() == '\\') {  // \X\HH single byte
          advance();
          int hi = hex_value(at_end() ? '\0' : advance());
          int lo = hex_value(at_end() ? '\0' : advance());
          if (hi < 0 || lo < 0) {
            fail(LexErrorKind::invalid_character, line, col, "malformed \\X\\ escape");
          }
          append_utf8(out, static_cast<std::uint32_t>(hi * 16 + lo));
          return;
        }
        if (peek() == '2' || peek() == '4') {  // \X2\..\X0\ (or the X4 form)
          int width = peek() == '2' ? 4 : 8;
          advance();
          expect_backslash(line, col);
          while (true) {
            if (peek() == '\\') {  // \X0\ terminator
              advance();
              if (advance() != 'X' || advance() != '0') {
                fail(LexErrorKind::invalid_character, line, col, "malformed \\X2\\ escape");
              }
              expect_backslash(line, col);
              return;
            }
            std::uint32_t cp = 0;
            for (int i = 0; i < width; ++i) {
              int v = hex_value(at_end() ? '\0' : advance());
              if (v < 0) fail(LexErrorKind::invalid_character, line, col, "malformed hex escape");
              cp = cp * 16 + static_cast<std::uint32_t>(v);
            }
            append_utf8(out, cp);
          }
        }
        fail(LexErrorKind::invalid_character, line, col, "malformed \\X escape");
      }
      case 'N': {  // \N\ newline (rare)
        expect_backslash(line, col);
        out.push_back('\n');
        return;
      }
      default:
        // Lenient: unknown escape kept literally.
        out.push_back('\\');
        out.push_back(c);
        return;
    }
  }

  void expect_backslash(int line, int col) {
    if (at_end() || advance() != '\\') {
      fail(LexErrorKind::invalid_character, line, col, "malformed string escape");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

const char* token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::keyword: return "keyword";
    case TokenKind::integer: return "integer";
    case TokenKind::real: return "real";
    case TokenKind::string: return "string";
    case TokenKind::enum_token: return "enumeration";
    case TokenKind::reference: return "reference";
    case TokenKind::lparen: return "(";
    case TokenKind::rparen: return ")";
    case TokenKind::comma: return ",";
    case TokenKind::semicolon: return ";";
    case TokenKind::equals: return "=";
    case TokenKind::dollar: return "$";
    case TokenKind::star: return "*";
  }
  return "?";
}

}  // namespace ifcgrl::step
