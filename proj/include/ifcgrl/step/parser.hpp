#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ifcgrl/step/lexer.hpp"

namespace ifcgrl::step {

// One attribute of an entity record: $, *, a literal, a #ref, a nested
// list, or a typed value such as IFCLABEL('x').
class AttributeValue {
 public:
  enum class Kind { null, derived, integer, real, text, enum_token, reference, list, typed };

  struct NullTag {
    bool operator==(const NullTag&) const = default;
  };
  struct DerivedTag {
    bool operator==(const DerivedTag&) const = default;
  };
  struct Ref {
    std::int64_t id;
    bool operator==(const Ref&) const = default;
  };
  struct EnumTok {
    std::string name;
    bool operator==(const EnumTok&) const = default;
  };
  struct Typed;
  using List = std::vector<AttributeValue>;

  struct Typed {
    std::string type_name;
    List args;  // exactly one element
    bool operator==(const Typed&) const = default;
  };

  AttributeValue() : v_(NullTag{}) {}

  static AttributeValue null() { return AttributeValue(NullTag{}); }
  static AttributeValue derived() { return AttributeValue(DerivedTag{}); }
  static AttributeValue of_int(std::int64_t i) { return AttributeValue(i); }
  static AttributeValue of_real(double d) { return AttributeValue(d); }
  static AttributeValue of_text(std::string s) { return AttributeValue(std::move(s)); }
  static AttributeValue of_enum(std::string name) { return AttributeValue(EnumTok{std::move(name)}); }
  static AttributeValue of_ref(std::int64_t id) { return AttributeValue(Ref{id}); }
  static AttributeValue of_list(List items) { return AttributeValue(std::move(items)); }
  static AttributeValue of_typed(std::string type_name, AttributeValue inner) {
    return AttributeValue(Typed{std::move(type_name), List{std::move(inner)}});
  }

  Kind kind() const { return static_cast<Kind>(v_.index()); }
  bool is_null() const { return kind() == Kind::null; }
  bool is_reference() const { return kind() == Kind::reference; }
  bool is_list() const { return kind() == Kind::list; }

  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  // Integer literals in real-typed slots widen to real.
  double as_real() const {
    if (kind() == Kind::integer) return static_cast<double>(std::get<std::int64_t>(v_));
    return std::get<double>(v_);
  }
  const std::string& text() const { return std::get<std::string>(v_); }
  const std::string& enum_name() const { return std::get<EnumTok>(v_).name; }
  std::int64_t ref_id() const { return std::get<Ref>(v_).id; }
  const List& items() const { return std::get<List>(v_); }
  const Typed& typed() const { return std::get<Typed>(v_); }

  bool operator==(const AttributeValue&) const = default;

 private:
  using Storage =
      std::variant<NullTag, DerivedTag, std::int64_t, double, std::string, EnumTok, Ref, List, Typed>;
  explicit AttributeValue(Storage v) : v_(std::move(v)) {}

  Storage v_;
};

struct EntityInstance {
  std::int64_t id = 0;
  std::string type_name;  // uppercase
  std::vector<AttributeValue> attributes;

  bool operator==(const EntityInstance&) const = default;
};

struct StepModel {
  std::map<std::int64_t, EntityInstance> instances;
  std::string header;  // raw HEADER section text, uninterpreted
};

enum class ParseErrorKind {
  duplicate_id,
  malformed_record,
  missing_data_section,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, std::int64_t id, const std::string& what)
      : std::runtime_error(what), kind(kind), line(line), id(id) {}
  ParseErrorKind kind;
  int line;           // source line for malformed_record
  std::int64_t id;    // offending id for duplicate_id
};

// Attribute lists deeper than this are rejected as malformed.
inline constexpr int kMaxListDepth = 32;

// Builds a StepModel from the records of every DATA section. Tokens outside
// DATA are ignored; the header is not recoverable from tokens alone (use
// parse_text for that).
StepModel parse_data_section(const std::vector<Token>& tokens);

// tokenize + parse, capturing the raw HEADER section text.
StepModel parse_text(std::string_view text);

// Exact type-name lookup, case-insensitive, no subtype expansion. Results
// are ordered by ascending id.
std::vector<const EntityInstance*> instances_of_type(const StepModel& model,
                                                     std::string_view type_name);

struct DanglingReference {
  std::int64_t referencing_id;
  std::int64_t missing_id;
  bool operator==(const DanglingReference&) const = default;
};

// Lists every reference that does not resolve within the model. Empty
// result certifies a closed instance graph.
std::vector<DanglingReference> validate_references(const StepModel& model);

// Canonical single-record serialization "#id=TYPE(...);". Re-parsing the
// output yields an identical EntityInstance.
std::string to_step_record(const EntityInstance& instance);

}  // namespace ifcgrl::step
