#include <doctest.h>

#include <fstream>
#include <sstream>

#include "ifcgrl/step/parser.hpp"

using namespace ifcgrl::step;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::vector<std::string> corpus_files() {
  return {
      std::string(IFCGRL_FIXTURE_DIR) + "/fixtures/toy_house.ifc",
      std::string(IFCGRL_FIXTURE_DIR) + "/fixtures/mep_riser.ifc",
      std::string(IFCGRL_FIXTURE_DIR) + "/fixtures/damaged.ifc",
  };
}

bool same_token(const Token& a, const Token& b) {
  return a.kind == b.kind && a.text == b.text && a.int_value == b.int_value &&
         a.real_value == b.real_value;
}

}  // namespace

TEST_CASE("tokenize a full record") {
  auto tokens = tokenize("#12=IFCWALL('gid',$,*,(1.0,2.));");
  REQUIRE(tokens.size() == 17);
  CHECK(tokens[0].kind == TokenKind::reference);
  CHECK(tokens[0].int_value == 12);
  CHECK(tokens[1].kind == TokenKind::equals);
  CHECK(tokens[2].kind == TokenKind::keyword);
  CHECK(tokens[2].text == "IFCWALL");
  CHECK(tokens[3].kind == TokenKind::lparen);
  CHECK(tokens[4].kind == TokenKind::string);
  CHECK(tokens[4].text == "gid");
  CHECK(tokens[6].kind == TokenKind::dollar);
  CHECK(tokens[8].kind == TokenKind::star);
  CHECK(tokens[10].kind == TokenKind::lparen);
  CHECK(tokens[11].kind == TokenKind::real);
  CHECK(tokens[11].real_value == doctest::Approx(1.0));
  CHECK(tokens[13].kind == TokenKind::real);
  CHECK(tokens[13].real_value == doctest::Approx(2.0));
  CHECK(tokens[16].kind == TokenKind::semicolon);
}

TEST_CASE("comments are skipped") {
  auto tokens = tokenize("/* note */ #1=A();");
  CHECK(tokens.size() == 6);
}

TEST_CASE("quote doubling") {
  auto tokens = tokenize("'It''s'");
  REQUIRE(tokens.size() == 1);
  CHECK(tokens[0].kind == TokenKind::string);
  CHECK(tokens[0].text == "It's");
}

TEST_CASE("ISO string escapes") {
  CHECK(tokenize("'\\X\\41'")[0].text == "A");
  CHECK(tokenize("'\\X2\\00C9\\X0\\'")[0].text == "\xc3\x89");  // U+00C9
  CHECK(tokenize("'a\\\\b'")[0].text == "a\\b");
  CHECK(tokenize("'\\S\\d'")[0].text == "\xc3\xa4");  // 'd'+0x80 = 0xE4
}

TEST_CASE("lex errors carry position") {
  SUBCASE("unterminated string") {
    try {
      tokenize("#1=A('abc);\n");
      FAIL("expected LexError");
    } catch (const LexError& e) {
      CHECK(e.kind == LexErrorKind::unterminated_string);
      CHECK(e.line == 1);
      CHECK(e.column == 6);
    }
  }
  SUBCASE("unterminated comment") {
    try {
      tokenize("/* never closed");
      FAIL("expected LexError");
    } catch (const LexError& e) {
      CHECK(e.kind == LexErrorKind::unterminated_comment);
    }
  }
  SUBCASE("invalid character") {
    try {
      tokenize("#1=A(\x01);");
      FAIL("expected LexError");
    } catch (const LexError& e) {
      CHECK(e.kind == LexErrorKind::invalid_character);
      CHECK(e.line == 1);
    }
  }
}

TEST_CASE("number forms") {
  auto tokens = tokenize("1. 1.0E-2 -3 +4.5e2 7");
  REQUIRE(tokens.size() == 5);
  CHECK(tokens[0].kind == TokenKind::real);
  CHECK(tokens[0].real_value == doctest::Approx(1.0));
  CHECK(tokens[1].kind == TokenKind::real);
  CHECK(tokens[1].real_value == doctest::Approx(0.01));
  CHECK(tokens[2].kind == TokenKind::integer);
  CHECK(tokens[2].int_value == -3);
  CHECK(tokens[3].kind == TokenKind::real);
  CHECK(tokens[3].real_value == doctest::Approx(450.0));
  CHECK(tokens[4].kind == TokenKind::integer);
  CHECK(tokens[4].int_value == 7);
}

TEST_CASE("parse a single aggregate record") {
  auto model = parse_text("DATA;#5=IFCRELAGGREGATES('g',$,$,$,#1,(#2,#3));ENDSEC;");
  REQUIRE(model.instances.size() == 1);
  const EntityInstance& inst = model.instances.at(5);
  CHECK(inst.type_name == "IFCRELAGGREGATES");
  REQUIRE(inst.attributes.size() == 6);
  CHECK(inst.attributes[4] == AttributeValue::of_ref(1));
  CHECK(inst.attributes[5] ==
        AttributeValue::of_list({AttributeValue::of_ref(2), AttributeValue::of_ref(3)}));
}

TEST_CASE("empty DATA section") {
  auto model = parse_text("DATA;ENDSEC;");
  CHECK(model.instances.empty());
}

TEST_CASE("duplicate ids are rejected") {
  try {
    parse_text("DATA;#7=A();#7=B();ENDSEC;");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind == ParseErrorKind::duplicate_id);
    CHECK(e.id == 7);
  }
}

TEST_CASE("records outside DATA are ignored") {
  auto model = parse_text("HEADER;FILE_SCHEMA(('IFC4'));ENDSEC;DATA;#1=A();ENDSEC;");
  CHECK(model.instances.size() == 1);
  CHECK(model.header == "FILE_SCHEMA(('IFC4'));");
}

TEST_CASE("missing DATA section") {
  try {
    parse_text("HEADER;ENDSEC;");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind == ParseErrorKind::missing_data_section);
  }
}

TEST_CASE("malformed record reports the line") {
  try {
    parse_text("DATA;\n#1=A();\n#2=B(,);\nENDSEC;");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind == ParseErrorKind::malformed_record);
    CHECK(e.line == 3);
  }
}

TEST_CASE("nesting depth is bounded") {
  std::string deep = "DATA;#1=A(";
  for (int i = 0; i < 40; ++i) deep += '(';
  deep += "1";
  for (int i = 0; i < 40; ++i) deep += ')';
  deep += ");ENDSEC;";
  try {
    parse_text(deep);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind == ParseErrorKind::malformed_record);
  }
}

TEST_CASE("typed values parse to name plus inner value") {
  auto model = parse_text("DATA;#1=P('n',$,IFCIDENTIFIER('W-01'),$);ENDSEC;");
  const AttributeValue& v = model.instances.at(1).attributes[2];
  REQUIRE(v.kind() == AttributeValue::Kind::typed);
  CHECK(v.typed().type_name == "IFCIDENTIFIER");
  CHECK(v.typed().args.front() == AttributeValue::of_text("W-01"));
}

TEST_CASE("instances_of_type") {
  auto model = parse_text("DATA;#3=IFCWALL();#1=IFCWALL();#2=IFCDOOR();ENDSEC;");
  SUBCASE("exact match, ids ascending") {
    auto walls = instances_of_type(model, "IFCWALL");
    REQUIRE(walls.size() == 2);
    CHECK(walls[0]->id == 1);
    CHECK(walls[1]->id == 3);
  }
  SUBCASE("absent type gives an empty list") {
    CHECK(instances_of_type(model, "IFCBEAM").empty());
  }
  SUBCASE("query is case-insensitive") {
    auto doors = instances_of_type(model, "ifcdoor");
    REQUIRE(doors.size() == 1);
    CHECK(doors[0]->id == 2);
  }
  SUBCASE("no subtype expansion") {
    CHECK(instances_of_type(model, "IFCBUILDINGELEMENT").empty());
  }
}

TEST_CASE("validate_references") {
  SUBCASE("dangling reference is reported") {
    auto model = parse_text("DATA;#1=A(#2);ENDSEC;");
    auto dangling = validate_references(model);
    REQUIRE(dangling.size() == 1);
    CHECK(dangling[0] == DanglingReference{1, 2});
  }
  SUBCASE("closed graph") {
    auto model = parse_text("DATA;#1=A(#2);#2=B(#1);ENDSEC;");
    CHECK(validate_references(model).empty());
  }
  SUBCASE("nested lists are searched") {
    auto model = parse_text("DATA;#1=A((#9,(#10)));ENDSEC;");
    auto dangling = validate_references(model);
    REQUIRE(dangling.size() == 2);
    CHECK(dangling[0] == DanglingReference{1, 9});
    CHECK(dangling[1] == DanglingReference{1, 10});
  }
}

TEST_CASE("round-trip over the bundled corpus") {
  for (const std::string& path : corpus_files()) {
    StepModel model = parse_text(slurp(path));
    CHECK(!model.instances.empty());
    for (const auto& [id, inst] : model.instances) {
      std::string canonical = "DATA;" + to_step_record(inst) + "ENDSEC;";
      StepModel reparsed = parse_text(canonical);
      REQUIRE(reparsed.instances.size() == 1);
      CHECK(reparsed.instances.at(id) == inst);
    }
  }
}

TEST_CASE("round-trip of synthetic awkward values") {
  auto model = parse_text(
      "DATA;#1=A('It''s \\X2\\00C9\\X0\\',-1.5E-7,*,$,.TRUE.,(1,(2.,')'),#4),T(0.125));ENDSEC;");
  const EntityInstance& inst = model.instances.at(1);
  StepModel reparsed = parse_text("DATA;" + to_step_record(inst) + "ENDSEC;");
  CHECK(reparsed.instances.at(1) == inst);
}

TEST_CASE("tokenize commutes with record-aligned concatenation") {
  std::string text = slurp(corpus_files()[0]);
  std::size_t cut = text.find("\n#20");
  REQUIRE(cut != std::string::npos);
  cut += 1;  // split at a record boundary
  auto whole = tokenize(text);
  auto first = tokenize(text.substr(0, cut));
  auto second = tokenize(text.substr(cut));
  REQUIRE(first.size() + second.size() == whole.size());
  for (std::size_t i = 0; i < first.size(); ++i) CHECK(same_token(whole[i], first[i]));
  for (std::size_t i = 0; i < second.size(); ++i) {
    CHECK(same_token(whole[first.size() + i], second[i]));
  }
}

TEST_CASE("the bundled corpus parses completely") {
  for (const std::string& path : corpus_files()) {
    StepModel model = parse_text(slurp(path));
    CHECK(model.instances.size() >= 4);
    CHECK(!model.header.empty());
  }
}
