#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ifcgrl/step/parser.hpp"

namespace ifcgrl::rel {

// The six monitored relationship attributes, in fixed order. An object's
// count vector is indexed by this enum.
enum class RelationshipKind : int {
  connects_relating = 0,   // IfcRelConnectsElements.RelatingElement
  connects_related = 1,    // IfcRelConnectsElements.RelatedElement
  aggregates_relating = 2, // IfcRelAggregates.RelatingObject
  aggregates_related = 3,  // IfcRelAggregates.RelatedObjects
  voids_relating = 4,      // IfcRelVoidsElement.RelatingBuildingElement
  fills_related = 5,       // IfcRelFillsElement.RelatedBuildingElement
};

inline constexpr int kRelationKinds = 6;

const char* relationship_kind_name(RelationshipKind kind);

struct RelationCountVector {
  std::array<std::int64_t, kRelationKinds> counts{};

  std::int64_t& operator[](RelationshipKind k) { return counts[static_cast<int>(k)]; }
  std::int64_t operator[](RelationshipKind k) const { return counts[static_cast<int>(k)]; }
  bool operator==(const RelationCountVector&) const = default;
};

struct RelationshipRecord {
  RelationshipKind kind;
  std::int64_t source_id = 0;            // the relationship instance
  std::vector<std::int64_t> subject_ids; // referenced object(s); empty for $
};

enum class ExtractErrorKind {
  attribute_arity,    // monitored slot index beyond record's attribute count
  non_reference_slot, // monitored slot holds something other than ref/list/$
  unknown_object_id,
};

class ExtractError : public std::runtime_error {
 public:
  ExtractError(ExtractErrorKind kind, std::int64_t id, const std::string& what)
      : std::runtime_error(what), kind(kind), id(id) {}
  ExtractErrorKind kind;
  std::int64_t id;
};

struct ExtractorConfig {
  // Additional entity names counted as IfcRelConnectsElements (e.g. its
  // subtypes such as IFCRELCONNECTSPATHELEMENTS). Default: exact names only.
  std::vector<std::string> connects_subtypes;
};

// Scans the four monitored relationship types and emits one record per
// monitored attribute slot. List-valued slots contribute all member ids.
std::vector<RelationshipRecord> extract_relationship_records(
    const step::StepModel& model, const ExtractorConfig& config = {});

// counts[k] = how many times object_id is quoted in slot k across records.
RelationCountVector count_vector_for(std::int64_t object_id,
                                     const std::vector<RelationshipRecord>& records);

// One pass over the records, aggregated per requested object. Every
// requested id gets an entry (all-zero when never quoted).
std::map<std::int64_t, RelationCountVector> build_vectors(
    const step::StepModel& model, const std::vector<std::int64_t>& object_ids,
    const ExtractorConfig& config = {});

}  // namespace ifcgrl::rel
