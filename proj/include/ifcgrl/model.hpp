#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ifcgrl/dataset.hpp"
#include "ifcgrl/nn/layers.hpp"

namespace ifcgrl::model {

enum class Variant { full, geometric_only, relational_only, no_fusion };

const char* variant_name(Variant variant);
std::optional<Variant> variant_from_name(std::string_view name);

struct ArchConfig {
  Variant variant = Variant::full;
  std::size_t points = 1024;  // expected cloud size
  // six relational stages 6 -> w0..w5; descriptor taps after stages 2/4/6
  std::vector<std::size_t> relational_widths = {16, 32, 64, 64, 96, 128};
  // per-point MLP widths 3 -> ... -> G
  std::vector<std::size_t> encoder_widths = {64, 128, 256};
  // fusion stages 2..4 (stage 1 width always equals the fusion input)
  std::vector<std::size_t> fusion_widths = {512, 256, 128};
  bool log1p_relations = true;  // x -> ln(1+x) before the relational branch
  std::size_t num_classes = static_cast<std::size_t>(data::kNumClasses);

  std::size_t relational_descriptor_size() const {
    return relational_widths[1] + relational_widths[3] + relational_widths[5];
  }
  std::size_t geometric_descriptor_size() const { return encoder_widths.back(); }
  std::size_t fusion_input_size() const;  // depends on variant
};

class VariantMismatch : public std::runtime_error {
 public:
  explicit VariantMismatch(const std::string& what) : std::runtime_error(what) {}
};

// linear + batchnorm + ReLU
struct MlpStage {
  MlpStage(std::size_t in, std::size_t out);
  nn::Tensor forward(const nn::Tensor& x, bool training);
  nn::Tensor backward(const nn::Tensor& grad_out);
  void init(Rng& rng) { linear.init(rng); }
  void collect(const std::string& prefix, std::vector<nn::ParamRef>& out);
  std::size_t parameter_count() const {
    return linear.parameter_count() + bn.parameter_count();
  }

  nn::Linear linear;
  nn::BatchNorm1d bn;
  nn::ReLU relu;
};

// Six stages over the 6-dim relation vector; the outputs of stages 2, 4
// and 6 concatenate into the relational descriptor (default 32+64+128=224).
class RelationalExtractor {
 public:
  explicit RelationalExtractor(const std::vector<std::size_t>& widths);

  std::size_t descriptor_size() const { return descriptor_size_; }
  std::size_t stage_count() const { return stages_.size(); }

  nn::Tensor forward(const nn::Tensor& relations, bool training);
  nn::Tensor backward(const nn::Tensor& grad_descriptor);
  void init(Rng& rng);
  void collect(const std::string& prefix, std::vector<nn::ParamRef>& out);
  std::size_t parameter_count() const;
  std::size_t macs_per_sample() const;

 private:
  std::vector<MlpStage> stages_;
  std::vector<nn::Tensor> stage_outputs_;
  std::size_t descriptor_size_;
};

// Built-in geometric backbone: shared per-point MLP followed by max-pool
// over the point set. Output is exactly invariant to point order in eval
// mode (pointwise ops + max).
class MiniPointEncoder {
 public:
  explicit MiniPointEncoder(const std::vector<std::size_t>& widths);

  std::size_t descriptor_size() const { return widths_.back(); }

  nn::Tensor forward(const nn::Tensor& clouds, bool training);  // B x N x 3 -> B x G
  nn::Tensor backward(const nn::Tensor& grad_descriptor);
  void init(Rng& rng);
  void collect(const std::string& prefix, std::vector<nn::ParamRef>& out);
  std::size_t parameter_count() const;
  std::size_t macs_per_sample(std::size_t points) const;

 private:
  std::vector<std::size_t> widths_;
  std::vector<MlpStage> stages_;
  std::vector<std::size_t> argmax_;
  std::vector<std::size_t> pooled_shape_;
};

// Four stages; the first preserves the input width, the rest taper to the
// final object descriptor (default 128).
class FusionModule {
 public:
  FusionModule(std::size_t input_size, const std::vector<std::size_t>& widths);

  std::size_t input_size() const { return input_size_; }
  std::size_t output_size() const;
  std::size_t stage_count() const { return stages_.size(); }

  nn::Tensor forward(const nn::Tensor& x, bool training);
  nn::Tensor backward(const nn::Tensor& grad_out);
  void init(Rng& rng);
  void collect(const std::string& prefix, std::vector<nn::ParamRef>& out);
  std::size_t parameter_count() const;
  std::size_t macs_per_sample() const;

 private:
  std::size_t input_size_;
  std::vector<MlpStage> stages_;
};

struct Batch {
  nn::Tensor clouds;     // B x N x 3 (empty when geometry is absent)
  nn::Tensor relations;  // B x 6 (empty when relations are absent)
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
};

Batch make_batch(const std::vector<const data::BimObject*>& objects);
Batch make_batch(const std::vector<data::BimObject>& objects, std::size_t begin, std::size_t end);

struct ParameterCounts {
  std::vector<std::pair<std::string, std::size_t>> per_module;
  std::size_t total = 0;
  std::vector<std::pair<std::string, std::size_t>> macs_per_module;  // linear MACs per sample
  std::size_t total_macs = 0;
};

class GRModel {
 public:
  GRModel(const ArchConfig& config, std::uint64_t init_seed);

  const ArchConfig& config() const { return config_; }

  nn::Tensor forward(const Batch& batch, bool training);
  void backward(const nn::Tensor& grad_logits);

  // Stable names and ordering; the checkpoint format relies on it.
  std::vector<nn::ParamRef> parameters();

  ParameterCounts count_parameters() const;

 private:
  ArchConfig config_;
  std::unique_ptr<MiniPointEncoder> encoder_;
  std::unique_ptr<RelationalExtractor> relational_;
  std::unique_ptr<FusionModule> fusion_;
  nn::Linear classifier_;
  std::size_t cached_geo_width_ = 0;
};

// Closed-form difference in trainable parameters between the full and
// geometric_only wirings of the same configuration.
std::size_t parameter_delta_full_vs_geometric(const ArchConfig& config);

inline constexpr const char* kArchFormatTag = "ifc-grl-arch/1";

void save_arch(const std::filesystem::path& path, const ArchConfig& config);
ArchConfig load_arch(const std::filesystem::path& path);

}  // namespace ifcgrl::model
