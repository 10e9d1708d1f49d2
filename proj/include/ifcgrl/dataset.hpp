#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ifcgrl/geometry.hpp"
#include "ifcgrl/relations.hpp"
#include "ifcgrl/step/parser.hpp"

namespace ifcgrl::data {

// The 11 object types, integer codes fixed by this order.
enum class ClassLabel : int {
  IfcBeam = 0,
  IfcColumn,
  IfcDoor,
  IfcFlowFitting,
  IfcFlowSegment,
  IfcFlowTerminal,
  IfcPlate,
  IfcRailing,
  IfcSlab,
  IfcWall,
  IfcWindow,
};

inline constexpr int kNumClasses = 11;

const char* label_name(ClassLabel label);
std::optional<ClassLabel> label_from_type_name(std::string_view type_name);

struct BimObject {
  std::string uid;
  ClassLabel label = ClassLabel::IfcBeam;
  geo::PointCloud cloud;
  rel::RelationCountVector relation;

  bool operator==(const BimObject&) const = default;
};

struct DatasetSplit {
  std::vector<BimObject> train;
  std::vector<BimObject> test;
  std::uint64_t seed = 0;
};

enum class DatasetErrorKind {
  format_version_mismatch,
  checksum_mismatch,
  missing_file,
  malformed_manifest,
};

class DatasetError : public std::runtime_error {
 public:
  DatasetError(DatasetErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind(kind) {}
  DatasetErrorKind kind;
};

// One parsed IFC model plus the per-object meshes extracted from it.
struct SourceModel {
  std::string name;  // used in uids; no whitespace
  const step::StepModel* model = nullptr;
  std::map<std::int64_t, geo::TriangleMesh> meshes;  // instance id -> mesh
};

struct AssembleConfig {
  std::size_t points = 1024;
  std::uint64_t seed = 0;
  geo::DedupParams dedup;
  rel::ExtractorConfig extractor;
};

struct AssembleStats {
  std::size_t skipped_unlabeled = 0;   // mesh present, type outside the 11 classes
  std::size_t skipped_no_mesh = 0;     // labeled instance without a mesh
  std::size_t skipped_unknown = 0;     // mesh keyed by an id absent from the model
  std::size_t duplicates_removed = 0;
  std::size_t failed_sources = 0;      // sources isolated by an error
};

// Dedup + relation vectors + sampled clouds, in deterministic order.
// An error while processing one source skips that source only.
std::vector<BimObject> assemble(const std::vector<SourceModel>& sources,
                                const AssembleConfig& config, AssembleStats* stats = nullptr);

// Classes above cap are down-sampled uniformly without replacement.
std::vector<BimObject> cap_per_class(std::vector<BimObject> objects, std::size_t cap,
                                     std::uint64_t seed);

// Stratified per-class split; floor(train_fraction * n) objects in train.
DatasetSplit split(std::vector<BimObject> objects, double train_fraction, std::uint64_t seed,
                   std::vector<ClassLabel>* empty_classes = nullptr);

inline constexpr const char* kDatasetFormatTag = "ifcnetpp-ds/1";

// Directory layout: manifest.txt + clouds/NNNNNN.f32 (little-endian float32,
// count x 3 row-major). load(save(x)) is exact, including float bits.
void save(const DatasetSplit& split, const std::filesystem::path& directory);
DatasetSplit load(const std::filesystem::path& directory);

std::map<ClassLabel, std::size_t> label_histogram(const std::vector<BimObject>& objects);

}  // namespace ifcgrl::data
