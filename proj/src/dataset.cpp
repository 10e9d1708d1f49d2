#include "ifcgrl/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ifcgrl/rng.hpp"

namespace ifcgrl::data {

namespace {

const char* kLabelNames[kNumClasses] = {
    "IfcBeam",       "IfcColumn",      "IfcDoor",  "IfcFlowFitting",
    "IfcFlowSegment", "IfcFlowTerminal", "IfcPlate", "IfcRailing",
    "IfcSlab",       "IfcWall",        "IfcWindow",
};

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DatasetError(DatasetErrorKind::missing_file, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string cloud_to_bytes(const geo::PointCloud& cloud) {
  // float32 little-endian; memcpy of the native representation (the build
  // targets little-endian hosts, asserted here)
  static_assert(std::endian::native == std::endian::little);
  std::string bytes(cloud.points.size() * sizeof(float), '\0');
  std::memcpy(bytes.data(), cloud.points.data(), bytes.size());
  return bytes;
}

geo::PointCloud cloud_from_bytes(const std::string& bytes, const std::string& context) {
  if (bytes.size() % (3 * sizeof(float)) != 0) {
    throw DatasetError(DatasetErrorKind::malformed_manifest,
                       context + ": cloud file size is not a multiple of 12 bytes");
  }
  geo::PointCloud cloud;
  cloud.count = bytes.size() / (3 * sizeof(float));
  cloud.points.resize(cloud.count * 3);
  std::memcpy(cloud.points.data(), bytes.data(), bytes.size());
  return cloud;
}

void write_objects(std::ofstream& manifest, const std::filesystem::path& dir,
                   const std::vector<BimObject>& objects, const char* section,
                   std::size_t& ordinal) {
  manifest << section << " " << objects.size() << "\n";
  for (const BimObject& obj : objects) {
    if (obj.uid.find_first_of(" \t\n") != std::string::npos) {
      throw std::invalid_argument("uid contains whitespace: " + obj.uid);
    }
    char name[32];
    std::snprintf(name, sizeof(name), "clouds/%06zu.f32", ordinal++);
    std::string bytes = cloud_to_bytes(obj.cloud);
    {
      std::ofstream out(dir / name, std::ios::binary);
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw std::runtime_error("failed to write " + (dir / name).string());
    }
    manifest << "object " << obj.uid << " " << static_cast<int>(obj.label);
    for (std::int64_t c : obj.relation.counts) manifest << " " << c;
    manifest << " " << name << " " << hex64(fnv1a(bytes)) << "\n";
  }
}

std::vector<BimObject> read_objects(std::istream& manifest, const std::filesystem::path& dir,
                                    const char* section) {
  std::string line;
  if (!std::getline(manifest, line)) {
    throw DatasetError(DatasetErrorKind::malformed_manifest,
                       std::string("missing ") + section + " section");
  }
  std::istringstream head(line);
  std::string tag;
  std::size_t count = 0;
  head >> tag >> count;
  if (tag != section) {
    throw DatasetError(DatasetErrorKind::malformed_manifest,
                       "expected section '" + std::string(section) + "', got '" + tag + "'");
  }
  std::vector<BimObject> objects;
  objects.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(manifest, line)) {
      throw DatasetError(DatasetErrorKind::malformed_manifest, "truncated manifest");
    }
    std::istringstream rec(line);
    std::string kind, uid, relpath, checksum;
    int label_code = -1;
    BimObject obj;
    rec >> kind >> uid >> label_code;
    for (std::int64_t& c : obj.relation.counts) rec >> c;
    rec >> relpath >> checksum;
    if (!rec || kind != "object" || label_code < 0 || label_code >= kNumClasses) {
      throw DatasetError(DatasetErrorKind::malformed_manifest, "malformed record: " + line);
    }
    obj.uid = uid;
    obj.label = static_cast<ClassLabel>(label_code);
    std::string bytes = read_file_bytes(dir / relpath);
    if (hex64(fnv1a(bytes)) != checksum) {
      throw DatasetError(DatasetErrorKind::checksum_mismatch,
                         "checksum mismatch for " + relpath + " (object " + uid + ")");
    }
    obj.cloud = cloud_from_bytes(bytes, uid);
    objects.push_back(std::move(obj));
  }
  return objects;
}

}  // namespace

const char* label_name(ClassLabel label) { return kLabelNames[static_cast<int>(label)]; }

std::optional<ClassLabel> label_from_type_name(std::string_view type_name) {
  std::string upper = to_upper(type_name);
  for (int i = 0; i < kNumClasses; ++i) {
    if (upper == to_upper(kLabelNames[i])) return static_cast<ClassLabel>(i);
  }
  return std::nullopt;
}

std::vector<BimObject> assemble(const std::vector<SourceModel>& sources,
                                const AssembleConfig& config, AssembleStats* stats) {
  AssembleStats local;
  AssembleStats& s = stats ? *stats : local;
  s = AssembleStats{};

  struct Candidate {
    std::size_t source;
    std::int64_t id;
    ClassLabel label;
    const geo::TriangleMesh* mesh;
  };
  std::vector<Candidate> candidates;
  std::vector<bool> source_ok(sources.size(), true);

  for (std::size_t si = 0; si < sources.size(); ++si) {
    const SourceModel& src = sources[si];
    try {
      for (const auto& [id, mesh] : src.meshes) {
        auto it = src.model->instances.find(id);
        if (it == src.model->instances.end()) {
          ++s.skipped_unknown;
          continue;
        }
        auto label = label_from_type_name(it->second.type_name);
        if (!label) {
          ++s.skipped_unlabeled;
          continue;
        }
        candidates.push_back({si, id, *label, &mesh});
      }
      for (const auto& [id, inst] : src.model->instances) {
        if (label_from_type_name(inst.type_name) && !src.meshes.contains(id)) {
          ++s.skipped_no_mesh;
        }
      }
    } catch (const std::exception&) {
      ++s.failed_sources;
      source_ok[si] = false;
      std::erase_if(candidates, [si](const Candidate& c) { return c.source == si; });
    }
  }

  // Global dedup over all sources, in deterministic candidate order.
  std::vector<std::pair<std::int64_t, const geo::TriangleMesh*>> pool;
  pool.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    pool.emplace_back(static_cast<std::int64_t>(i), candidates[i].mesh);
  }
  std::vector<std::int64_t> survivors = geo::deduplicate(pool, config.dedup);
  s.duplicates_removed = candidates.size() - survivors.size();

  std::vector<bool> keep(candidates.size(), false);
  for (std::int64_t i : survivors) keep[static_cast<std::size_t>(i)] = true;

  // Relation vectors per source, over that source's surviving objects.
  std::vector<std::vector<std::int64_t>> ids_by_source(sources.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (keep[i]) ids_by_source[candidates[i].source].push_back(candidates[i].id);
  }
  std::vector<std::map<std::int64_t, rel::RelationCountVector>> vectors(sources.size());
  for (std::size_t si = 0; si < sources.size(); ++si) {
    if (!source_ok[si] || ids_by_source[si].empty()) continue;
    try {
      vectors[si] = rel::build_vectors(*sources[si].model, ids_by_source[si], config.extractor);
    } catch (const std::exception&) {
      ++s.failed_sources;
      source_ok[si] = false;
    }
  }

  std::vector<BimObject> objects;
  std::vector<std::size_t> object_source;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Candidate& c = candidates[i];
    if (!keep[i] || !source_ok[c.source]) continue;
    const SourceModel& src = sources[c.source];
    try {
      BimObject obj;
      obj.uid = src.name + ":" + std::to_string(c.id);
      obj.label = c.label;
      obj.relation = vectors[c.source].at(c.id);
      std::uint64_t cloud_seed =
          mix_seed(mix_seed(config.seed, hash_string(src.name)), static_cast<std::uint64_t>(c.id));
      obj.cloud = geo::sample_point_cloud(*c.mesh, config.points, cloud_seed);
      objects.push_back(std::move(obj));
      object_source.push_back(c.source);
    } catch (const std::exception&) {
      ++s.failed_sources;
      source_ok[c.source] = false;
    }
  }
  std::vector<BimObject> out;
  out.reserve(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (source_ok[object_source[i]]) out.push_back(std::move(objects[i]));
  }
  return out;
}

std::vector<BimObject> cap_per_class(std::vector<BimObject> objects, std::size_t cap,
                                     std::uint64_t seed) {
  if (cap == 0) throw std::invalid_argument("cap must be positive");
  std::map<ClassLabel, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < objects.size(); ++i) by_class[objects[i].label].push_back(i);

  std::vector<bool> keep(objects.size(), true);
  for (auto& [label, indices] : by_class) {
    if (indices.size() <= cap) continue;
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
    rng.shuffle(indices);
    for (std::size_t i = cap; i < indices.size(); ++i) keep[indices[i]] = false;
  }

  std::vector<BimObject> out;
  out.reserve(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (keep[i]) out.push_back(std::move(objects[i]));
  }
  return out;
}

DatasetSplit split(std::vector<BimObject> objects, double train_fraction, std::uint64_t seed,
                   std::vector<ClassLabel>* empty_classes) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0, 1)");
  }
  std::map<ClassLabel, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < objects.size(); ++i) by_class[objects[i].label].push_back(i);

  if (empty_classes) {
    empty_classes->clear();
    for (int i = 0; i < kNumClasses; ++i) {
      if (!by_class.contains(static_cast<ClassLabel>(i))) {
        empty_classes->push_back(static_cast<ClassLabel>(i));
      }
    }
  }

  DatasetSplit result;
  result.seed = seed;
  for (auto& [label, indices] : by_class) {
    Rng rng(mix_seed(mix_seed(seed, 0x73706c6974ULL), static_cast<std::uint64_t>(label)));
    rng.shuffle(indices);
    std::size_t train_n =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(indices.size())));
    for (std::size_t i = 0; i < indices.size(); ++i) {
      (i < train_n ? result.train : result.test).push_back(std::move(objects[indices[i]]));
    }
  }
  return result;
}

void save(const DatasetSplit& split, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory / "clouds");
  std::ofstream manifest(directory / "manifest.txt", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot write manifest in " + directory.string());
  manifest << kDatasetFormatTag << "\n";
  manifest << "seed " << split.seed << "\n";
  std::size_t ordinal = 0;
  write_objects(manifest, directory, split.train, "train", ordinal);
  write_objects(manifest, directory, split.test, "test", ordinal);
  if (!manifest) throw std::runtime_error("failed writing manifest in " + directory.string());
}

DatasetSplit load(const std::filesystem::path& directory) {
  std::filesystem::path manifest_path = directory / "manifest.txt";
  if (!std::filesystem::exists(manifest_path)) {
    throw DatasetError(DatasetErrorKind::missing_file, "no manifest at " + manifest_path.string());
  }
  std::ifstream manifest(manifest_path, std::ios::binary);
  std::string line;
  if (!std::getline(manifest, line) || line != kDatasetFormatTag) {
    throw DatasetError(DatasetErrorKind::format_version_mismatch,
                       "unsupported dataset format: '" + line + "'");
  }
  DatasetSplit result;
  if (!std::getline(manifest, line)) {
    throw DatasetError(DatasetErrorKind::malformed_manifest, "missing seed line");
  }
  {
    std::istringstream seed_line(line);
    std::string tag;
    seed_line >> tag >> result.seed;
    if (!seed_line || tag != "seed") {
      throw DatasetError(DatasetErrorKind::malformed_manifest, "malformed seed line: " + line);
    }
  }
  result.train = read_objects(manifest, directory, "train");
  result.test = read_objects(manifest, directory, "test");

  // N is fixed per dataset
  std::size_t n = 0;
  bool first = true;
  for (const auto* part : {&result.train, &result.test}) {
    for (const BimObject& obj : *part) {
      if (first) {
        n = obj.cloud.count;
        first = false;
      } else if (obj.cloud.count != n) {
        throw DatasetError(DatasetErrorKind::malformed_manifest,
                           "inconsistent cloud sizes in dataset (" + obj.uid + ")");
      }
    }
  }
  return result;
}

std::map<ClassLabel, std::size_t> label_histogram(const std::vector<BimObject>& objects) {
  std::map<ClassLabel, std::size_t> hist;
  for (const BimObject& obj : objects) ++hist[obj.label];
  return hist;
}

}  // namespace ifcgrl::data
