#include "ifcgrl/synthetic.hpp"

#include "ifcgrl/rng.hpp"

namespace ifcgrl::data {

namespace {

// Relation pattern shared by IfcDoor and IfcColumn: quoted once by an
// aggregate plus once as a filling element, with count jitter.
rel::RelationCountVector pattern_fills(Rng& rng) {
  rel::RelationCountVector v;
  v[rel::RelationshipKind::aggregates_related] = 1 + static_cast<std::int64_t>(rng.below(2));
  v[rel::RelationshipKind::fills_related] = 1 + static_cast<std::int64_t>(rng.below(2));
  return v;
}

// Relation pattern shared by IfcWindow and IfcFlowSegment: connector-style
// quotes instead of filling ones.
rel::RelationCountVector pattern_connects(Rng& rng) {
  rel::RelationCountVector v;
  v[rel::RelationshipKind::connects_relating] = 1 + static_cast<std::int64_t>(rng.below(2));
  v[rel::RelationshipKind::voids_relating] = 1 + static_cast<std::int64_t>(rng.below(2));
  return v;
}

geo::TriangleMesh panel_mesh(Rng& rng) {
  double w = rng.uniform(0.9, 1.1);
  double h = rng.uniform(1.9, 2.1);
  double t = rng.uniform(0.05, 0.07);
  return geo::make_box(w, h, t);
}

geo::TriangleMesh tube_mesh(Rng& rng) {
  double r = rng.uniform(0.13, 0.17);
  double h = rng.uniform(2.7, 3.3);
  return geo::make_cylinder(r, h, 24);
}

}  // namespace

std::vector<BimObject> make_synthetic_objects(const SyntheticConfig& config) {
  struct ClassSpec {
    ClassLabel label;
    bool panel;  // panel vs tube shape family
    bool fills;  // fills vs connects relation pattern
  };
  const ClassSpec specs[4] = {
      {ClassLabel::IfcDoor, true, true},
      {ClassLabel::IfcWindow, true, false},
      {ClassLabel::IfcColumn, false, true},
      {ClassLabel::IfcFlowSegment, false, false},
  };

  std::vector<BimObject> objects;
  objects.reserve(config.per_class * 4);
  for (const ClassSpec& spec : specs) {
    for (std::size_t i = 0; i < config.per_class; ++i) {
      std::uint64_t object_seed =
          mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(spec.label)), i);
      Rng rng(object_seed);
      BimObject obj;
      obj.uid = std::string("syn-") + label_name(spec.label) + "-" + std::to_string(i);
      obj.label = spec.label;
      geo::TriangleMesh mesh = spec.panel ? panel_mesh(rng) : tube_mesh(rng);
      obj.relation = spec.fills ? pattern_fills(rng) : pattern_connects(rng);
      obj.cloud = geo::sample_point_cloud(mesh, config.points, mix_seed(object_seed, 0x636c64ULL));
      objects.push_back(std::move(obj));
    }
  }
  return objects;
}

DatasetSplit make_synthetic_split(const SyntheticConfig& config) {
  return split(make_synthetic_objects(config), config.train_fraction, config.seed);
}

}  // namespace ifcgrl::data
