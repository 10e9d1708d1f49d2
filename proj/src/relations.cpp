#include "ifcgrl/relations.hpp"

#include <algorithm>

namespace ifcgrl::rel {

namespace {

struct MonitoredSlot {
  RelationshipKind kind;
  std::size_t attribute_index;  // 0-based, per the IFC2x3/IFC4 EXPRESS order
};

// IfcRelConnectsElements: GlobalId, OwnerHistory, Name, Description,
//   ConnectionGeometry, RelatingElement(5), RelatedElement(6)
// IfcRelAggregates: GlobalId, OwnerHistory, Name, Description,
//   RelatingObject(4), RelatedObjects(5)
// IfcRelVoidsElement: ..., RelatingBuildingElement(4), RelatedOpeningElement
// IfcRelFillsElement: ..., RelatingOpeningElement, RelatedBuildingElement(5)
const std::vector<MonitoredSlot> kConnectsSlots = {
    {RelationshipKind::connects_relating, 5},
    {RelationshipKind::connects_related, 6},
};
const std::vector<MonitoredSlot> kAggregatesSlots = {
    {RelationshipKind::aggregates_relating, 4},
    {RelationshipKind::aggregates_related, 5},
};
const std::vector<MonitoredSlot> kVoidsSlots = {
    {RelationshipKind::voids_relating, 4},
};
const std::vector<MonitoredSlot> kFillsSlots = {
    {RelationshipKind::fills_related, 5},
};

void emit_records(const step::EntityInstance& inst, const std::vector<MonitoredSlot>& slots,
                  std::vector<RelationshipRecord>& out) {
  for (const MonitoredSlot& slot : slots) {
    if (slot.attribute_index >= inst.attributes.size()) {
      throw ExtractError(ExtractErrorKind::attribute_arity, inst.id,
                         "instance #" + std::to_string(inst.id) + " (" + inst.type_name +
                             ") has too few attributes for slot " +
                             relationship_kind_name(slot.kind));
    }
    const step::AttributeValue& value = inst.attributes[slot.attribute_index];
    RelationshipRecord record;
    record.kind = slot.kind;
    record.source_id = inst.id;
    switch (value.kind()) {
      case step::AttributeValue::Kind::null:
        break;  // damaged exports leave $ here; contributes no counts
      case step::AttributeValue::Kind::reference:
        record.subject_ids.push_back(value.ref_id());
        break;
      case step::AttributeValue::Kind::list:
        for (const auto& item : value.items()) {
          if (!item.is_reference()) {
            throw ExtractError(ExtractErrorKind::non_reference_slot, inst.id,
                               "instance #" + std::to_string(inst.id) +
                                   ": list member in a monitored slot is not a reference");
          }
          record.subject_ids.push_back(item.ref_id());
        }
        break;
      default:
        throw ExtractError(ExtractErrorKind::non_reference_slot, inst.id,
                           "instance #" + std::to_string(inst.id) + ": monitored slot " +
                               relationship_kind_name(slot.kind) +
                               " holds neither reference, list, nor $");
    }
    out.push_back(std::move(record));
  }
}

}  // namespace

const char* relationship_kind_name(RelationshipKind kind) {
  switch (kind) {
    case RelationshipKind::connects_relating: return "ConnectsRelating";
    case RelationshipKind::connects_related: return "ConnectsRelated";
    case RelationshipKind::aggregates_relating: return "AggregatesRelating";
    case RelationshipKind::aggregates_related: return "AggregatesRelated";
    case RelationshipKind::voids_relating: return "VoidsRelating";
    case RelationshipKind::fills_related: return "FillsRelated";
  }
  return "?";
}

std::vector<RelationshipRecord> extract_relationship_records(const step::StepModel& model,
                                                             const ExtractorConfig& config) {
  std::vector<RelationshipRecord> out;
  for (const auto& [id, inst] : model.instances) {
    const std::string& type = inst.type_name;
    if (type == "IFCRELCONNECTSELEMENTS" || type == "IFCRELCONNECTSELEMENT") {
      // the paper writes the singular form; both spellings are accepted
      emit_records(inst, kConnectsSlots, out);
    } else if (type == "IFCRELAGGREGATES") {
      emit_records(inst, kAggregatesSlots, out);
    } else if (type == "IFCRELVOIDSELEMENT") {
      emit_records(inst, kVoidsSlots, out);
    } else if (type == "IFCRELFILLSELEMENT") {
      emit_records(inst, kFillsSlots, out);
    } else if (!config.connects_subtypes.empty() &&
               std::find(config.connects_subtypes.begin(), config.connects_subtypes.end(), type) !=
                   config.connects_subtypes.end()) {
      emit_records(inst, kConnectsSlots, out);
    }
  }
  return out;
}

RelationCountVector count_vector_for(std::int64_t object_id,
                                     const std::vector<RelationshipRecord>& records) {
  RelationCountVector vec;
  for (const RelationshipRecord& record : records) {
    for (std::int64_t subject : record.subject_ids) {
      if (subject == object_id) ++vec[record.kind];
    }
  }
  return vec;
}

std::map<std::int64_t, RelationCountVector> build_vectors(const step::StepModel& model,
                                                          const std::vector<std::int64_t>& object_ids,
                                                          const ExtractorConfig& config) {
  std::map<std::int64_t, RelationCountVector> out;
  for (std::int64_t id : object_ids) {
    if (!model.instances.contains(id)) {
      throw ExtractError(ExtractErrorKind::unknown_object_id, id,
                         "object id #" + std::to_string(id) + " not present in model");
    }
    out.emplace(id, RelationCountVector{});
  }
  for (const RelationshipRecord& record : extract_relationship_records(model, config)) {
    for (std::int64_t subject : record.subject_ids) {
      auto it = out.find(subject);
      if (it != out.end()) ++it->second[record.kind];
    }
  }
  return out;
}

}  // namespace ifcgrl::rel
