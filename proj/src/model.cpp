#include "ifcgrl/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ifcgrl::model {

namespace {

void require_shape(bool ok, const char* msg) {
  if (!ok) throw nn::NnError(nn::NnErrorKind::shape_mismatch, msg);
}

std::vector<std::size_t> parse_width_list(const std::string& csv) {
  std::vector<std::size_t> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stoull(item));
  return out;
}

std::string width_list_to_csv(const std::vector<std::size_t>& widths) {
  std::string out;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(widths[i]);
  }
  return out;
}

}  // namespace

const char* variant_name(Variant variant) {
  switch (variant) {
    case Variant::full: return "full";
    case Variant::geometric_only: return "geometric_only";
    case Variant::relational_only: return "relational_only";
    case Variant::no_fusion: return "no_fusion";
  }
  return "?";
}

std::optional<Variant> variant_from_name(std::string_view name) {
  if (name == "full") return Variant::full;
  if (name == "geometric_only" || name == "geo") return Variant::geometric_only;
  if (name == "relational_only" || name == "rel") return Variant::relational_only;
  if (name == "no_fusion" || name == "nofusion") return Variant::no_fusion;
  return std::nullopt;
}

std::size_t ArchConfig::fusion_input_size() const {
  switch (variant) {
    case Variant::full:
    case Variant::no_fusion:
      return geometric_descriptor_size() + relational_descriptor_size();
    case Variant::geometric_only:
      return geometric_descriptor_size();
    case Variant::relational_only:
      return relational_descriptor_size();
  }
  return 0;
}

MlpStage::MlpStage(std::size_t in, std::size_t out) : linear(in, out), bn(out) {}

nn::Tensor MlpStage::forward(const nn::Tensor& x, bool training) {
  return relu.forward(bn.forward(linear.forward(x), training));
}

nn::Tensor MlpStage::backward(const nn::Tensor& grad_out) {
  return linear.backward(bn.backward(relu.backward(grad_out)));
}

void MlpStage::collect(const std::string& prefix, std::vector<nn::ParamRef>& out) {
  linear.collect(prefix + ".linear", out);
  bn.collect(prefix + ".bn", out);
}

RelationalExtractor::RelationalExtractor(const std::vector<std::size_t>& widths) {
  if (widths.size() != 6) {
    throw std::invalid_argument("relational extractor takes exactly six stage widths");
  }
  std::size_t in = static_cast<std::size_t>(rel::kRelationKinds);
  for (std::size_t w : widths) {
    stages_.emplace_back(in, w);
    in = w;
  }
  descriptor_size_ = widths[1] + widths[3] + widths[5];
}

nn::Tensor RelationalExtractor::forward(const nn::Tensor& relations, bool training) {
  require_shape(relations.rank() == 2 && relations.dim(1) == rel::kRelationKinds,
                "relational extractor expects a B x 6 input");
  stage_outputs_.clear();
  nn::Tensor x = relations;
  for (MlpStage& stage : stages_) {
    x = stage.forward(x, training);
    stage_outputs_.push_back(x);
  }
  // descriptor = [stage2 | stage4 | stage6]
  return nn::hcat(nn::hcat(stage_outputs_[1], stage_outputs_[3]), stage_outputs_[5]);
}

nn::Tensor RelationalExtractor::backward(const nn::Tensor& grad_descriptor) {
  require_shape(grad_descriptor.rank() == 2 && grad_descriptor.dim(1) == descriptor_size_,
                "relational backward: descriptor width mismatch");
  std::size_t w2 = stage_outputs_[1].dim(1);
  std::size_t w4 = stage_outputs_[3].dim(1);
  auto [g2_tap, rest] = nn::hsplit(grad_descriptor, w2);
  auto [g4_tap, g6] = nn::hsplit(rest, w4);

  nn::Tensor g = stages_[5].backward(g6);
  g = stages_[4].backward(g);
  for (std::size_t i = 0; i < g.size(); ++i) g.raw()[i] += g4_tap.raw()[i];
  g = stages_[3].backward(g);
  g = stages_[2].backward(g);
  for (std::size_t i = 0; i < g.size(); ++i) g.raw()[i] += g2_tap.raw()[i];
  g = stages_[1].backward(g);
  return stages_[0].backward(g);
}

void RelationalExtractor::init(Rng& rng) {
  for (MlpStage& stage : stages_) stage.init(rng);
}

void RelationalExtractor::collect(const std::string& prefix, std::vector<nn::ParamRef>& out) {
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    stages_[i].collect(prefix + ".stage" + std::to_string(i + 1), out);
  }
}

std::size_t RelationalExtractor::parameter_count() const {
  std::size_t total = 0;
  for (const MlpStage& stage : stages_) total += stage.parameter_count();
  return total;
}

std::size_t RelationalExtractor::macs_per_sample() const {
  std::size_t total = 0;
  for (const MlpStage& stage : stages_) {
    total += stage.linear.in_features() * stage.linear.out_features();
  }
  return total;
}

MiniPointEncoder::MiniPointEncoder(const std::vector<std::size_t>& widths) : widths_(widths) {
  if (widths.empty()) throw std::invalid_argument("encoder needs at least one width");
  std::size_t in = 3;
  for (std::size_t w : widths) {
    stages_.emplace_back(in, w);
    in = w;
  }
}

nn::Tensor MiniPointEncoder::forward(const nn::Tensor& clouds, bool training) {
  require_shape(clouds.rank() == 3 && clouds.dim(2) == 3,
                "point encoder expects a B x N x 3 input");
  std::size_t batch = clouds.dim(0), points = clouds.dim(1);
  nn::Tensor x = clouds.reshaped({batch * points, 3});
  for (MlpStage& stage : stages_) x = stage.forward(x, training);
  nn::Tensor tokens = x.reshaped({batch, points, widths_.back()});
  pooled_shape_ = tokens.shape();
  return nn::maxpool_set_forward(tokens, argmax_);
}

nn::Tensor MiniPointEncoder::backward(const nn::Tensor& grad_descriptor) {
  nn::Tensor g3 = nn::maxpool_set_backward(grad_descriptor, argmax_, pooled_shape_);
  nn::Tensor g = g3.reshaped({pooled_shape_[0] * pooled_shape_[1], widths_.back()});
  for (std::size_t i = stages_.size(); i-- > 0;) g = stages_[i].backward(g);
  return g.reshaped({pooled_shape_[0], pooled_shape_[1], 3});
}

void MiniPointEncoder::init(Rng& rng) {
  for (MlpStage& stage : stages_) stage.init(rng);
}

void MiniPointEncoder::collect(const std::string& prefix, std::vector<nn::ParamRef>& out) {
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    stages_[i].collect(prefix + ".stage" + std::to_string(i + 1), out);
  }
}

std::size_t MiniPointEncoder::parameter_count() const {
  std::size_t total = 0;
  for (const MlpStage& stage : stages_) total += stage.parameter_count();
  return total;
}

std::size_t MiniPointEncoder::macs_per_sample(std::size_t points) const {
  std::size_t per_point = 0;
  for (const MlpStage& stage : stages_) {
    per_point += stage.linear.in_features() * stage.linear.out_features();
  }
  return per_point * points;
}

FusionModule::FusionModule(std::size_t input_size, const std::vector<std::size_t>& widths)
    : input_size_(input_size) {
  if (widths.size() != 3) {
    throw std::invalid_argument("fusion takes the widths of stages 2..4");
  }
  stages_.emplace_back(input_size, input_size);  // stage 1 preserves the input width
  std::size_t in = input_size;
  for (std::size_t w : widths) {
    stages_.emplace_back(in, w);
    in = w;
  }
}

std::size_t FusionModule::output_size() const {
  return stages_.back().linear.out_features();
}

nn::Tensor FusionModule::forward(const nn::Tensor& x, bool training) {
  require_shape(x.rank() == 2 && x.dim(1) == input_size_, "fusion input width mismatch");
  nn::Tensor y = x;
  for (MlpStage& stage : stages_) y = stage.forward(y, training);
  return y;
}

nn::Tensor FusionModule::backward(const nn::Tensor& grad_out) {
  nn::Tensor g = grad_out;
  for (std::size_t i = stages_.size(); i-- > 0;) g = stages_[i].backward(g);
  return g;
}

void FusionModule::init(Rng& rng) {
  for (MlpStage& stage : stages_) stage.init(rng);
}

void FusionModule::collect(const std::string& prefix, std::vector<nn::ParamRef>& out) {
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    stages_[i].collect(prefix + ".stage" + std::to_string(i + 1), out);
  }
}

std::size_t FusionModule::parameter_count() const {
  std::size_t total = 0;
  for (const MlpStage& stage : stages_) total += stage.parameter_count();
  return total;
}

std::size_t FusionModule::macs_per_sample() const {
  std::size_t total = 0;
  for (const MlpStage& stage : stages_) {
    total += stage.linear.in_features() * stage.linear.out_features();
  }
  return total;
}

Batch make_batch(const std::vector<const data::BimObject*>& objects) {
  Batch batch;
  if (objects.empty()) return batch;
  std::size_t n = objects.front()->cloud.count;
  batch.clouds = nn::Tensor({objects.size(), n, 3});
  batch.relations = nn::Tensor({objects.size(), static_cast<std::size_t>(rel::kRelationKinds)});
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const data::BimObject& obj = *objects[i];
    require_shape(obj.cloud.count == n, "batch mixes cloud sizes");
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t c = 0; c < 3; ++c) {
        batch.clouds(i, p, c) = static_cast<double>(obj.cloud.points[p * 3 + c]);
      }
    }
    for (int k = 0; k < rel::kRelationKinds; ++k) {
      batch.relations(i, static_cast<std::size_t>(k)) =
          static_cast<double>(obj.relation.counts[static_cast<std::size_t>(k)]);
    }
    batch.labels.push_back(static_cast<int>(obj.label));
  }
  return batch;
}

Batch make_batch(const std::vector<data::BimObject>& objects, std::size_t begin, std::size_t end) {
  std::vector<const data::BimObject*> ptrs;
  ptrs.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) ptrs.push_back(&objects[i]);
  return make_batch(ptrs);
}

GRModel::GRModel(const ArchConfig& config, std::uint64_t init_seed)
    : config_(config),
      classifier_(config.variant == Variant::no_fusion ? config.fusion_input_size()
                                                       : config.fusion_widths.back(),
                  config.num_classes) {
  bool uses_geometry = config.variant != Variant::relational_only;
  bool uses_relations = config.variant != Variant::geometric_only;
  if (uses_geometry) encoder_ = std::make_unique<MiniPointEncoder>(config.encoder_widths);
  if (uses_relations) relational_ = std::make_unique<RelationalExtractor>(config.relational_widths);
  if (config.variant != Variant::no_fusion) {
    fusion_ = std::make_unique<FusionModule>(config.fusion_input_size(), config.fusion_widths);
  }

  Rng rng(mix_seed(init_seed, 0x6d6f64656cULL));
  if (encoder_) encoder_->init(rng);
  if (relational_) relational_->init(rng);
  if (fusion_) fusion_->init(rng);
  classifier_.init(rng);
}

nn::Tensor GRModel::forward(const Batch& batch, bool training) {
  nn::Tensor geo, relational;
  if (encoder_) {
    if (batch.clouds.empty()) {
      throw VariantMismatch(std::string(variant_name(config_.variant)) +
                            " variant needs point clouds, but the batch has none");
    }
    geo = encoder_->forward(batch.clouds, training);
  }
  if (relational_) {
    if (batch.relations.empty()) {
      throw VariantMismatch(std::string(variant_name(config_.variant)) +
                            " variant needs relation vectors, but the batch has none");
    }
    nn::Tensor rel_in = batch.relations;
    if (config_.log1p_relations) {
      for (double& v : rel_in.raw()) v = std::log1p(v);
    }
    relational = relational_->forward(rel_in, training);
  }

  nn::Tensor features;
  if (encoder_ && relational_) {
    features = nn::hcat(geo, relational);
    cached_geo_width_ = geo.dim(1);
  } else if (encoder_) {
    features = std::move(geo);
  } else {
    features = std::move(relational);
  }

  if (fusion_) features = fusion_->forward(features, training);
  return classifier_.forward(features);
}

void GRModel::backward(const nn::Tensor& grad_logits) {
  nn::Tensor g = classifier_.backward(grad_logits);
  if (fusion_) g = fusion_->backward(g);
  if (encoder_ && relational_) {
    auto [g_geo, g_rel] = nn::hsplit(g, cached_geo_width_);
    encoder_->backward(g_geo);
    relational_->backward(g_rel);
  } else if (encoder_) {
    encoder_->backward(g);
  } else {
    relational_->backward(g);
  }
}

std::vector<nn::ParamRef> GRModel::parameters() {
  std::vector<nn::ParamRef> out;
  if (encoder_) encoder_->collect("encoder", out);
  if (relational_) relational_->collect("relational", out);
  if (fusion_) fusion_->collect("fusion", out);
  classifier_.collect("classifier", out);
  return out;
}

ParameterCounts GRModel::count_parameters() const {
  ParameterCounts counts;
  if (encoder_) {
    counts.per_module.emplace_back("geometric_backbone", encoder_->parameter_count());
    counts.macs_per_module.emplace_back("geometric_backbone",
                                        encoder_->macs_per_sample(config_.points));
  }
  if (relational_) {
    counts.per_module.emplace_back("relational_extractor", relational_->parameter_count());
    counts.macs_per_module.emplace_back("relational_extractor", relational_->macs_per_sample());
  }
  if (fusion_) {
    counts.per_module.emplace_back("fusion", fusion_->parameter_count());
    counts.macs_per_module.emplace_back("fusion", fusion_->macs_per_sample());
  }
  counts.per_module.emplace_back("classifier", classifier_.parameter_count());
  counts.macs_per_module.emplace_back(
      "classifier", classifier_.in_features() * classifier_.out_features());
  for (const auto& [name, n] : counts.per_module) counts.total += n;
  for (const auto& [name, n] : counts.macs_per_module) counts.total_macs += n;
  return counts;
}

std::size_t parameter_delta_full_vs_geometric(const ArchConfig& config) {
  ArchConfig full = config;
  full.variant = Variant::full;
  ArchConfig geo = config;
  geo.variant = Variant::geometric_only;
  GRModel full_model(full, 0);
  GRModel geo_model(geo, 0);
  return full_model.count_parameters().total - geo_model.count_parameters().total;
}

void save_arch(const std::filesystem::path& path, const ArchConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write arch config " + path.string());
  out << kArchFormatTag << "\n";
  out << "variant " << variant_name(config.variant) << "\n";
  out << "points " << config.points << "\n";
  out << "relational_widths " << width_list_to_csv(config.relational_widths) << "\n";
  out << "encoder_widths " << width_list_to_csv(config.encoder_widths) << "\n";
  out << "fusion_widths " << width_list_to_csv(config.fusion_widths) << "\n";
  out << "log1p_relations " << (config.log1p_relations ? 1 : 0) << "\n";
  out << "num_classes " << config.num_classes << "\n";
}

ArchConfig load_arch(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open arch config " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kArchFormatTag) {
    throw std::runtime_error("unsupported arch config format in " + path.string());
  }
  ArchConfig config;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key, value;
    ls >> key >> value;
    if (key == "variant") {
      auto v = variant_from_name(value);
      if (!v) throw std::runtime_error("unknown variant '" + value + "'");
      config.variant = *v;
    } else if (key == "points") {
      config.points = std::stoull(value);
    } else if (key == "relational_widths") {
      config.relational_widths = parse_width_list(value);
    } else if (key == "encoder_widths") {
      config.encoder_widths = parse_width_list(value);
    } else if (key == "fusion_widths") {
      config.fusion_widths = parse_width_list(value);
    } else if (key == "log1p_relations") {
      config.log1p_relations = value != "0";
    } else if (key == "num_classes") {
      config.num_classes = std::stoull(value);
    } else {
      throw std::runtime_error("unknown arch config key '" + key + "'");
    }
  }
  return config;
}

}  // namespace ifcgrl::model
