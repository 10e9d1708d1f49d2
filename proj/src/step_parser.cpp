#include "ifcgrl/step/parser.hpp"

#include <cctype>
#include <charconv>

namespace ifcgrl::step {

namespace {

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

class RecordParser {
 public:
  explicit RecordParser(const std::vector<Token>& tokens) : tokens_(tokens) {}

  StepModel run() {
    StepModel model;
    bool saw_data = false;
    while (pos_ < tokens_.size()) {
      if (is_keyword("DATA") && kind_at(pos_ + 1) == TokenKind::semicolon) {
        saw_data = true;
        pos_ += 2;
        parse_records(model);
        continue;
      }
      ++pos_;
    }
    if (!saw_data) {
      throw ParseError(ParseErrorKind::missing_data_section, 0, 0, "no DATA section found");
    }
    return model;
  }

 private:
  const Token& at(std::size_t i) const { return tokens_[i]; }
  TokenKind kind_at(std::size_t i) const {
    return i < tokens_.size() ? tokens_[i].kind : TokenKind::semicolon;
  }
  bool is_keyword(std::string_view name) const {
    return pos_ < tokens_.size() && at(pos_).kind == TokenKind::keyword && at(pos_).text == name;
  }

  [[noreturn]] void malformed(const std::string& msg) {
    int line = pos_ < tokens_.size() ? at(pos_).line : last_line_;
    throw ParseError(ParseErrorKind::malformed_record, line, 0,
                     msg + " at line " + std::to_string(line));
  }

  const Token& expect(TokenKind kind, const char* what) {
    if (pos_ >= tokens_.size() || at(pos_).kind != kind) {
      malformed(std::string("expected ") + what);
    }
    last_line_ = at(pos_).line;
    return at(pos_++);
  }

  void parse_records(StepModel& model) {
    while (true) {
      if (pos_ >= tokens_.size()) malformed("unterminated DATA section");
      if (is_keyword("ENDSEC")) {
        ++pos_;
        expect(TokenKind::semicolon, "';' after ENDSEC");
        return;
      }
      parse_record(model);
    }
  }

  void parse_record(StepModel& model) {
    const Token& ref = expect(TokenKind::reference, "'#id' at start of record");
    EntityInstance inst;
    inst.id = ref.int_value;
    int record_line = ref.line;
    expect(TokenKind::equals, "'='");
    inst.type_name = expect(TokenKind::keyword, "entity type name").text;
    expect(TokenKind::lparen, "'('");
    if (kind_at(pos_) == TokenKind::rparen) {
      ++pos_;
    } else {
      while (true) {
        inst.attributes.push_back(parse_value(0));
        if (kind_at(pos_) == TokenKind::comma) {
          ++pos_;
          continue;
        }
        expect(TokenKind::rparen, "')' or ','");
        break;
      }
    }
    expect(TokenKind::semicolon, "';' at end of record");
    auto [it, inserted] = model.instances.emplace(inst.id, std::move(inst));
    if (!inserted) {
      throw ParseError(ParseErrorKind::duplicate_id, record_line, it->first,
                       "duplicate instance id #" + std::to_string(it->first));
    }
  }

  AttributeValue parse_value(int depth) {
    if (depth > kMaxListDepth) malformed("attribute nesting exceeds limit");
    if (pos_ >= tokens_.size()) malformed("unterminated record");
    const Token& t = at(pos_);
    last_line_ = t.line;
    switch (t.kind) {
      case TokenKind::dollar:
        ++pos_;
        return AttributeValue::null();
      case TokenKind::star:
        ++pos_;
        return AttributeValue::derived();
      case TokenKind::integer:
        ++pos_;
        return AttributeValue::of_int(t.int_value);
      case TokenKind::real:
        ++pos_;
        return AttributeValue::of_real(t.real_value);
      case TokenKind::string:
        ++pos_;
        return AttributeValue::of_text(t.text);
      case TokenKind::enum_token:
        ++pos_;
        return AttributeValue::of_enum(t.text);
      case TokenKind::reference:
        ++pos_;
        return AttributeValue::of_ref(t.int_value);
      case TokenKind::lparen: {
        ++pos_;
        AttributeValue::List items;
        if (kind_at(pos_) == TokenKind::rparen) {
          ++pos_;
          return AttributeValue::of_list(std::move(items));
        }
        while (true) {
          items.push_back(parse_value(depth + 1));
          if (kind_at(pos_) == TokenKind::comma) {
            ++pos_;
            continue;
          }
          expect(TokenKind::rparen, "')' or ',' in list");
          return AttributeValue::of_list(std::move(items));
        }
      }
      case TokenKind::keyword: {  // typed value: NAME(inner)
        std::string name = t.text;
        ++pos_;
        expect(TokenKind::lparen, "'(' after type name");
        AttributeValue inner = parse_value(depth + 1);
        expect(TokenKind::rparen, "')' after typed value");
        return AttributeValue::of_typed(std::move(name), std::move(inner));
      }
      default:
        malformed("unexpected token in attribute position");
    }
  }

  const std::vector<Token>& tokens_;
  std::size_t pos_ = 0;
  int last_line_ = 1;
};

void append_canonical(std::string& out, const AttributeValue& v) {
  switch (v.kind()) {
    case AttributeValue::Kind::null:
      out += '$';
      return;
    case AttributeValue::Kind::derived:
      out += '*';
      return;
    case AttributeValue::Kind::integer:
      out += std::to_string(v.as_int());
      return;
    case AttributeValue::Kind::real: {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v.as_real());
      std::string s(buf, end);
      // must lex back as a real, not an integer
      if (s.find_first_of(".eE") == std::string::npos) s += '.';
      out += s;
      return;
    }
    case AttributeValue::Kind::text: {
      out += '\'';
      for (char c : v.text()) {
        unsigned char u = static_cast<unsigned char>(c);
        if (c == '\'') {
          out += "''";
        } else if (c == '\\') {
          out += "\\\\";
        } else if (u < 0x20 || u == 0x7f) {
          static const char* hex = "0123456789ABCDEF";
          out += "\\X\\";
          out += hex[u >> 4];
          out += hex[u & 0xf];
        } else {
          out += c;  // UTF-8 payload passes through verbatim
        }
      }
      out += '\'';
      return;
    }
    case AttributeValue::Kind::enum_token:
      out += '.';
      out += v.enum_name();
      out += '.';
      return;
    case AttributeValue::Kind::reference:
      out += '#';
      out += std::to_string(v.ref_id());
      return;
    case AttributeValue::Kind::list: {
      out += '(';
      bool first = true;
      for (const auto& item : v.items()) {
        if (!first) out += ',';
        first = false;
        append_canonical(out, item);
      }
      out += ')';
      return;
    }
    case AttributeValue::Kind::typed: {
      out += v.typed().type_name;
      out += '(';
      append_canonical(out, v.typed().args.front());
      out += ')';
      return;
    }
  }
}

void collect_dangling(const StepModel& model, std::int64_t owner, const AttributeValue& v,
                      std::vector<DanglingReference>& out) {
  switch (v.kind()) {
    case AttributeValue::Kind::reference:
      if (!model.instances.contains(v.ref_id())) out.push_back({owner, v.ref_id()});
      return;
    case AttributeValue::Kind::list:
      for (const auto& item : v.items()) collect_dangling(model, owner, item, out);
      return;
    case AttributeValue::Kind::typed:
      for (const auto& item : v.typed().args) collect_dangling(model, owner, item, out);
      return;
    default:
      return;
  }
}

}  // namespace

StepModel parse_data_section(const std::vector<Token>& tokens) {
  return RecordParser(tokens).run();
}

StepModel parse_text(std::string_view text) {
  std::vector<Token> tokens = tokenize(text);
  StepModel model = parse_data_section(tokens);

  // Header is the raw source between "HEADER;" and the following "ENDSEC;".
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i].kind == TokenKind::keyword && tokens[i].text == "HEADER" &&
        tokens[i + 1].kind == TokenKind::semicolon) {
      std::size_t begin = tokens[i + 1].offset + 1;
      for (std::size_t j = i + 2; j + 1 < tokens.size(); ++j) {
        if (tokens[j].kind == TokenKind::keyword && tokens[j].text == "ENDSEC") {
          model.header = std::string(text.substr(begin, tokens[j].offset - begin));
          return model;
        }
      }
      break;
    }
  }
  return model;
}

std::vector<const EntityInstance*> instances_of_type(const StepModel& model,
                                                     std::string_view type_name) {
  std::string query = to_upper(type_name);
  std::vector<const EntityInstance*> out;
  for (const auto& [id, inst] : model.instances) {
    if (inst.type_name == query) out.push_back(&inst);
  }
  return out;
}

std::vector<DanglingReference> validate_references(const StepModel& model) {
  std::vector<DanglingReference> out;
  for (const auto& [id, inst] : model.instances) {
    for (const auto& attr : inst.attributes) collect_dangling(model, id, attr, out);
  }
  return out;
}

std::string to_step_record(const EntityInstance& instance) {
  std::string out = "#" + std::to_string(instance.id) + "=" + instance.type_name + "(";
  bool first = true;
  for (const auto& attr : instance.attributes) {
    if (!first) out += ',';
    first = false;
    append_canonical(out, attr);
  }
  out += ");";
  return out;
}

}  // namespace ifcgrl::step
