#include <doctest.h>

#include <fstream>
#include <sstream>

#include "ifcgrl/relations.hpp"

using namespace ifcgrl;
using rel::RelationshipKind;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

step::StepModel fixture(const char* name) {
  return step::parse_text(slurp(std::string(IFCGRL_FIXTURE_DIR) + "/fixtures/" + name));
}

rel::RelationCountVector vec(std::initializer_list<std::int64_t> counts) {
  rel::RelationCountVector v;
  int i = 0;
  for (std::int64_t c : counts) v.counts[i++] = c;
  return v;
}

}  // namespace

TEST_CASE("voids record emits one relating tuple") {
  auto model = step::parse_text("DATA;#8=IFCRELVOIDSELEMENT('g',$,$,$,#3,#4);ENDSEC;");
  auto records = rel::extract_relationship_records(model);
  REQUIRE(records.size() == 1);
  CHECK(records[0].kind == RelationshipKind::voids_relating);
  CHECK(records[0].subject_ids == std::vector<std::int64_t>{3});
}

TEST_CASE("aggregate record emits both slots") {
  auto model = step::parse_text("DATA;#9=IFCRELAGGREGATES('g',$,$,$,#1,(#2,#3));ENDSEC;");
  auto records = rel::extract_relationship_records(model);
  REQUIRE(records.size() == 2);
  CHECK(records[0].kind == RelationshipKind::aggregates_relating);
  CHECK(records[0].subject_ids == std::vector<std::int64_t>{1});
  CHECK(records[1].kind == RelationshipKind::aggregates_related);
  CHECK(records[1].subject_ids == std::vector<std::int64_t>{2, 3});
}

TEST_CASE("model without relationships") {
  auto model = step::parse_text("DATA;#1=IFCWALL();ENDSEC;");
  CHECK(rel::extract_relationship_records(model).empty());
}

TEST_CASE("null in a monitored slot contributes nothing") {
  auto model = step::parse_text("DATA;#1=IFCRELFILLSELEMENT('g',$,$,$,#2,$);ENDSEC;");
  auto records = rel::extract_relationship_records(model);
  REQUIRE(records.size() == 1);
  CHECK(records[0].subject_ids.empty());
}

TEST_CASE("singular spelling is accepted") {
  auto model = step::parse_text("DATA;#1=IFCRELCONNECTSELEMENT('g',$,$,$,$,#2,#3);ENDSEC;");
  auto records = rel::extract_relationship_records(model);
  REQUIRE(records.size() == 2);
  CHECK(records[0].kind == RelationshipKind::connects_relating);
  CHECK(records[1].kind == RelationshipKind::connects_related);
}

TEST_CASE("configured connects subtypes are counted") {
  auto model =
      step::parse_text("DATA;#1=IFCRELCONNECTSPATHELEMENTS('g',$,$,$,$,#2,#3,(),(),.ATPATH.,.ATSTART.);ENDSEC;");
  CHECK(rel::extract_relationship_records(model).empty());  // default: exact names only
  rel::ExtractorConfig config;
  config.connects_subtypes = {"IFCRELCONNECTSPATHELEMENTS"};
  auto records = rel::extract_relationship_records(model, config);
  REQUIRE(records.size() == 2);
  CHECK(records[0].subject_ids == std::vector<std::int64_t>{2});
}

TEST_CASE("arity and slot-type errors") {
  SUBCASE("too few attributes") {
    auto model = step::parse_text("DATA;#3=IFCRELAGGREGATES('g',$);ENDSEC;");
    try {
      rel::extract_relationship_records(model);
      FAIL("expected ExtractError");
    } catch (const rel::ExtractError& e) {
      CHECK(e.kind == rel::ExtractErrorKind::attribute_arity);
      CHECK(e.id == 3);
    }
  }
  SUBCASE("non-reference payload") {
    auto model = step::parse_text("DATA;#4=IFCRELVOIDSELEMENT('g',$,$,$,'oops',#2);ENDSEC;");
    try {
      rel::extract_relationship_records(model);
      FAIL("expected ExtractError");
    } catch (const rel::ExtractError& e) {
      CHECK(e.kind == rel::ExtractErrorKind::non_reference_slot);
      CHECK(e.id == 4);
    }
  }
}

TEST_CASE("count_vector_for") {
  auto model = step::parse_text(
      "DATA;"
      "#8=IFCRELVOIDSELEMENT('g',$,$,$,#3,#5);"
      "#9=IFCRELFILLSELEMENT('g',$,$,$,#5,#4);"
      "ENDSEC;");
  auto records = rel::extract_relationship_records(model);
  CHECK(rel::count_vector_for(3, records) == vec({0, 0, 0, 0, 1, 0}));
  CHECK(rel::count_vector_for(4, records) == vec({0, 0, 0, 0, 0, 1}));
  CHECK(rel::count_vector_for(77, records) == vec({0, 0, 0, 0, 0, 0}));
}

TEST_CASE("multiplicity is preserved across records") {
  auto model = step::parse_text(
      "DATA;"
      "#10=IFCRELAGGREGATES('a',$,$,$,#1,(#2));"
      "#11=IFCRELAGGREGATES('b',$,$,$,#3,(#2,#2));"
      "ENDSEC;");
  auto records = rel::extract_relationship_records(model);
  CHECK(rel::count_vector_for(2, records)[RelationshipKind::aggregates_related] == 3);
}

TEST_CASE("build_vectors") {
  auto model = step::parse_text("DATA;#1=IFCWALL();#2=IFCSLAB();#3=IFCSLAB();"
                                "#9=IFCRELAGGREGATES('g',$,$,$,#1,(#2,#3));ENDSEC;");
  SUBCASE("one aggregate record") {
    auto vectors = rel::build_vectors(model, {1, 2, 3});
    CHECK(vectors.at(1) == vec({0, 0, 1, 0, 0, 0}));
    CHECK(vectors.at(2) == vec({0, 0, 0, 1, 0, 0}));
    CHECK(vectors.at(3) == vec({0, 0, 0, 1, 0, 0}));
  }
  SUBCASE("unknown object id") {
    try {
      rel::build_vectors(model, {1, 42});
      FAIL("expected ExtractError");
    } catch (const rel::ExtractError& e) {
      CHECK(e.kind == rel::ExtractErrorKind::unknown_object_id);
      CHECK(e.id == 42);
    }
  }
  SUBCASE("deterministic") {
    CHECK(rel::build_vectors(model, {1, 2, 3}) == rel::build_vectors(model, {1, 2, 3}));
  }
}

TEST_CASE("vectors ignore non-relationship instances") {
  auto base = step::parse_text("DATA;#1=IFCWALL();#9=IFCRELVOIDSELEMENT('g',$,$,$,#1,#4);ENDSEC;");
  auto extended = step::parse_text(
      "DATA;#1=IFCWALL();#9=IFCRELVOIDSELEMENT('g',$,$,$,#1,#4);"
      "#30=IFCCARTESIANPOINT((0.,0.));#31=IFCPROPERTYSINGLEVALUE('x',$,$,$);ENDSEC;");
  CHECK(rel::build_vectors(base, {1}).at(1) == rel::build_vectors(extended, {1}).at(1));
}

TEST_CASE("hand-traced vectors of the toy fixture") {
  auto model = fixture("toy_house.ifc");
  auto vectors = rel::build_vectors(
      model, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  // order: [connects_relating, connects_related, aggregates_relating,
  //         aggregates_related, voids_relating, fills_related]
  CHECK(vectors.at(1) == vec({0, 0, 1, 0, 0, 0}));   // storey aggregates the rest
  CHECK(vectors.at(2) == vec({0, 0, 0, 1, 1, 0}));   // wall: aggregated + voided
  CHECK(vectors.at(3) == vec({1, 0, 0, 1, 1, 0}));   // wall: + connects relating
  CHECK(vectors.at(4) == vec({0, 0, 0, 1, 0, 1}));   // door: aggregated + fills
  CHECK(vectors.at(5) == vec({0, 0, 0, 1, 0, 1}));   // window: aggregated + fills
  CHECK(vectors.at(6) == vec({0, 0, 0, 1, 0, 0}));   // slab
  CHECK(vectors.at(7) == vec({0, 1, 0, 1, 0, 0}));   // beam: connects related
  CHECK(vectors.at(8) == vec({1, 0, 0, 1, 0, 0}));   // column (singular-spelled record)
  CHECK(vectors.at(9) == vec({1, 1, 0, 1, 0, 0}));   // flow segment: both sides
  CHECK(vectors.at(10) == vec({0, 0, 0, 0, 0, 0}));  // openings fill no monitored slot
  CHECK(vectors.at(11) == vec({0, 0, 0, 0, 0, 0}));
  CHECK(vectors.at(12) == vec({0, 1, 0, 1, 0, 0}));  // flow terminal
}

TEST_CASE("sum invariant over every corpus file") {
  for (const char* name : {"toy_house.ifc", "mep_riser.ifc", "damaged.ifc"}) {
    auto model = fixture(name);
    auto records = rel::extract_relationship_records(model);

    std::array<std::int64_t, rel::kRelationKinds> slot_totals{};
    for (const auto& record : records) {
      slot_totals[static_cast<int>(record.kind)] +=
          static_cast<std::int64_t>(record.subject_ids.size());
    }

    std::vector<std::int64_t> all_ids;
    for (const auto& [id, inst] : model.instances) all_ids.push_back(id);
    // quoted ids may dangle; include them so the sum balances
    for (const auto& record : records) {
      for (std::int64_t id : record.subject_ids) {
        if (!model.instances.contains(id)) all_ids.push_back(id);
      }
    }
    std::sort(all_ids.begin(), all_ids.end());
    all_ids.erase(std::unique(all_ids.begin(), all_ids.end()), all_ids.end());

    std::array<std::int64_t, rel::kRelationKinds> vector_totals{};
    for (std::int64_t id : all_ids) {
      auto v = rel::count_vector_for(id, records);
      for (int k = 0; k < rel::kRelationKinds; ++k) vector_totals[k] += v.counts[k];
    }
    for (int k = 0; k < rel::kRelationKinds; ++k) {
      CAPTURE(name);
      CAPTURE(k);
      CHECK(vector_totals[k] == slot_totals[k]);
    }
  }
}

TEST_CASE("vectors are independent of instance id order") {
  // same records, permuted ids
  auto a = step::parse_text(
      "DATA;#1=IFCWALL();#2=IFCDOOR();"
      "#10=IFCRELVOIDSELEMENT('g',$,$,$,#1,#5);"
      "#11=IFCRELFILLSELEMENT('g',$,$,$,#5,#2);ENDSEC;");
  auto b = step::parse_text(
      "DATA;#11=IFCRELFILLSELEMENT('g',$,$,$,#5,#2);#2=IFCDOOR();"
      "#10=IFCRELVOIDSELEMENT('g',$,$,$,#1,#5);#1=IFCWALL();ENDSEC;");
  CHECK(rel::build_vectors(a, {1, 2}) == rel::build_vectors(b, {1, 2}));
}
