#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ifcgrl/ablation.hpp"
#include "ifcgrl/dataset.hpp"
#include "ifcgrl/metrics.hpp"
#include "ifcgrl/nn/checkpoint.hpp"
#include "ifcgrl/relations.hpp"
#include "ifcgrl/step/parser.hpp"
#include "ifcgrl/synthetic.hpp"
#include "ifcgrl/train.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ifcgrl;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::vector<std::string> class_name_list() {
  std::vector<std::string> names;
  for (int i = 0; i < data::kNumClasses; ++i) {
    names.push_back(data::label_name(static_cast<data::ClassLabel>(i)));
  }
  return names;
}

int run_extract(const std::vector<std::string>& files, const std::string& out_dir) {
  fs::create_directories(out_dir);
  for (const std::string& file : files) {
    step::StepModel model = step::parse_text(read_text_file(file));
    auto dangling = step::validate_references(model);

    std::vector<std::int64_t> object_ids;
    for (const auto& [id, inst] : model.instances) {
      if (data::label_from_type_name(inst.type_name)) object_ids.push_back(id);
    }
    auto vectors = rel::build_vectors(model, object_ids);

    fs::path out_path = fs::path(out_dir) / (fs::path(file).stem().string() + ".relations.txt");
    std::ofstream out(out_path, std::ios::binary);
    out << "# source " << fs::path(file).filename().string() << "\n";
    out << "# dangling_references " << dangling.size() << "\n";
    for (const auto& [from, missing] : dangling) {
      out << "# dangling #" << from << " -> #" << missing << "\n";
    }
    out << "# columns: id type connects_relating connects_related aggregates_relating"
           " aggregates_related voids_relating fills_related\n";
    for (std::int64_t id : object_ids) {
      out << id << " " << model.instances.at(id).type_name;
      for (std::int64_t c : vectors.at(id).counts) out << " " << c;
      out << "\n";
    }
    std::cout << file << ": " << object_ids.size() << " labeled objects, " << dangling.size()
              << " dangling references -> " << out_path.string() << "\n";
  }
  return 0;
}

int run_build_dataset(const std::string& ifc_dir, const std::string& obj_dir,
                      const std::string& out_dir, std::size_t cap, double train_fraction,
                      std::uint64_t seed, std::size_t points) {
  std::vector<fs::path> ifc_files;
  for (const auto& entry : fs::directory_iterator(ifc_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ifc") {
      ifc_files.push_back(entry.path());
    }
  }
  std::sort(ifc_files.begin(), ifc_files.end());
  if (ifc_files.empty()) throw std::invalid_argument("no .ifc files in " + ifc_dir);

  std::vector<step::StepModel> models(ifc_files.size());
  std::vector<data::SourceModel> sources;
  for (std::size_t i = 0; i < ifc_files.size(); ++i) {
    models[i] = step::parse_text(read_text_file(ifc_files[i]));
    data::SourceModel src;
    src.name = ifc_files[i].stem().string();
    src.model = &models[i];
    fs::path mesh_dir = fs::path(obj_dir) / src.name;
    if (fs::is_directory(mesh_dir)) {
      for (const auto& entry : fs::directory_iterator(mesh_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".obj") continue;
        std::int64_t id = 0;
        try {
          id = std::stoll(entry.path().stem().string());
        } catch (const std::exception&) {
          continue;  // mesh files are named <instance-id>.obj
        }
        src.meshes.emplace(id, geo::load_obj(read_text_file(entry.path())));
      }
    }
    sources.push_back(std::move(src));
  }

  data::AssembleConfig config;
  config.points = points;
  config.seed = seed;
  data::AssembleStats stats;
  std::vector<data::BimObject> objects = data::assemble(sources, config, &stats);
  objects = data::cap_per_class(std::move(objects), cap, seed);
  std::vector<data::ClassLabel> empty;
  data::DatasetSplit split = data::split(std::move(objects), train_fraction, seed, &empty);
  data::save(split, out_dir);

  std::cout << "dataset written to " << out_dir << "\n"
            << "  train " << split.train.size() << ", test " << split.test.size() << "\n"
            << "  skipped: " << stats.skipped_unlabeled << " unlabeled, " << stats.skipped_no_mesh
            << " without mesh, " << stats.skipped_unknown << " unknown ids\n"
            << "  duplicates removed: " << stats.duplicates_removed << "\n"
            << "  failed sources: " << stats.failed_sources << "\n";
  for (data::ClassLabel label : empty) {
    std::cout << "  warning: class " << data::label_name(label) << " is empty\n";
  }
  return 0;
}

model::ArchConfig arch_for_dataset(const data::DatasetSplit& split, model::Variant variant) {
  model::ArchConfig arch;
  arch.variant = variant;
  if (!split.train.empty()) {
    arch.points = split.train.front().cloud.count;
  } else if (!split.test.empty()) {
    arch.points = split.test.front().cloud.count;
  }
  return arch;
}

int run_train(const std::string& dataset_dir, const std::string& variant_name, double lr,
              int epochs, std::uint64_t seed, double weight_decay, int batch_size,
              const std::string& out_dir, bool quiet) {
  auto variant = model::variant_from_name(variant_name);
  if (!variant) throw std::invalid_argument("unknown variant '" + variant_name + "'");
  data::DatasetSplit split = data::load(dataset_dir);
  model::ArchConfig arch = arch_for_dataset(split, *variant);
  model::GRModel m(arch, seed);

  model::TrainConfig config;
  config.lr = lr;
  config.epochs = epochs;
  config.seed = seed;
  config.weight_decay = weight_decay;
  config.batch_size = batch_size;
  config.log = quiet ? nullptr : &std::cout;
  model::TrainResult result = model::train(m, split, config);

  fs::create_directories(out_dir);
  nn::save_checkpoint(fs::path(out_dir) / "model.ckpt", m.parameters());
  model::save_arch(fs::path(out_dir) / "model.arch", arch);
  {
    std::ofstream history(fs::path(out_dir) / "history.txt", std::ios::binary);
    char line[128];
    for (const model::EpochStats& stats : result.history) {
      std::snprintf(line, sizeof(line), "epoch=%d train_loss=%.17g test_accuracy=%.17g\n",
                    stats.epoch, stats.train_loss, stats.test_accuracy);
      history << line;
    }
  }
  std::cout << "trained " << model::variant_name(*variant) << " for " << epochs << " epochs";
  if (result.best_epoch >= 0) {
    std::cout << "; best test accuracy " << result.best_test_accuracy << " at epoch "
              << result.best_epoch;
  }
  std::cout << "\ncheckpoint: " << (fs::path(out_dir) / "model.ckpt").string() << "\n";
  return 0;
}

int run_evaluate(const std::string& dataset_dir, const std::string& ckpt_path,
                 const std::string& report_path, int batch_size) {
  data::DatasetSplit split = data::load(dataset_dir);
  fs::path arch_path = fs::path(ckpt_path);
  arch_path.replace_extension(".arch");
  model::ArchConfig arch = model::load_arch(arch_path);
  model::GRModel m(arch, 0);
  nn::load_checkpoint(ckpt_path, m.parameters());

  std::vector<int> predictions = model::predict(m, split.test, batch_size);
  std::vector<int> labels;
  labels.reserve(split.test.size());
  for (const data::BimObject& obj : split.test) labels.push_back(static_cast<int>(obj.label));
  eval::ConfusionMatrix cm =
      eval::ConfusionMatrix::from(labels, predictions, static_cast<int>(arch.num_classes));
  eval::MetricsReport report = eval::metrics(cm);
  std::vector<eval::PairRate> rates = eval::confusion_rate_table(cm);

  std::string table = eval::format_report(report, cm, rates, class_name_list());
  {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write report " + report_path);
    out << table;
  }
  {
    fs::path kv_path = report_path;
    kv_path += ".kv";
    std::ofstream out(kv_path, std::ios::binary);
    out << eval::format_key_values(report);
  }
  std::cout << table;
  return 0;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line is not key=value: " + line);
    }
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

int run_ablate(const std::string& dataset_dir, const std::string& config_path) {
  auto kv = read_config_file(config_path);
  model::TrainConfig config;
  if (kv.contains("lr")) config.lr = std::stod(kv["lr"]);
  if (kv.contains("epochs")) config.epochs = std::stoi(kv["epochs"]);
  if (kv.contains("seed")) config.seed = std::stoull(kv["seed"]);
  if (kv.contains("weight_decay")) config.weight_decay = std::stod(kv["weight_decay"]);
  if (kv.contains("batch_size")) config.batch_size = std::stoi(kv["batch_size"]);

  data::DatasetSplit split = data::load(dataset_dir);
  model::ArchConfig arch = arch_for_dataset(split, model::Variant::full);
  std::optional<fs::path> out_dir;
  if (kv.contains("out_dir")) out_dir = fs::path(kv["out_dir"]);

  eval::AblationResult result = eval::ablation_suite(split, arch, config, out_dir);
  std::string table = eval::format_ablation_table(result);
  std::cout << table;
  if (out_dir) {
    std::ofstream out(*out_dir / "ablation.txt", std::ios::binary);
    out << table;
    for (const eval::VariantOutcome& outcome : result.outcomes) {
      std::ofstream kv_out(*out_dir / (std::string(model::variant_name(outcome.variant)) + ".kv"),
                           std::ios::binary);
      kv_out << eval::format_key_values(outcome.report);
    }
  }
  return 0;
}

int run_report(const std::string& ckpt_path) {
  fs::path arch_path = fs::path(ckpt_path);
  arch_path.replace_extension(".arch");
  model::ArchConfig arch = model::load_arch(arch_path);
  model::GRModel m(arch, 0);
  nn::load_checkpoint(ckpt_path, m.parameters());  // validates names and shapes

  model::ParameterCounts counts = m.count_parameters();
  std::cout << "variant " << model::variant_name(arch.variant) << "\n";
  std::cout << "module                parameters  macs/sample\n";
  for (std::size_t i = 0; i < counts.per_module.size(); ++i) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-20s %10zu  %10zu\n", counts.per_module[i].first.c_str(),
                  counts.per_module[i].second, counts.macs_per_module[i].second);
    std::cout << line;
  }
  char line[128];
  std::snprintf(line, sizeof(line), "%-20s %10zu  %10zu\n", "total", counts.total,
                counts.total_macs);
  std::cout << line;
  std::cout << "cost introduced vs geometric_only: " << model::parameter_delta_full_vs_geometric(arch)
            << " parameters\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IFC object classification toolkit: STEP parsing, relation vectors,"
               " dataset assembly and the two-branch geometric-relational model"};
  app.require_subcommand(1);

  // extract
  auto* extract = app.add_subcommand("extract", "Parse IFC files and write relation vectors");
  std::vector<std::string> extract_files;
  std::string extract_out;
  extract->add_option("files", extract_files, "IFC input files")->required()->expected(-1);
  extract->add_option("--out", extract_out, "output directory")->required();

  // build-dataset
  auto* build = app.add_subcommand("build-dataset", "Assemble a labeled dataset");
  std::string ifc_dir, obj_dir, build_out;
  std::size_t cap = 2000, points = 1024;
  double train_fraction = 0.7;
  std::uint64_t build_seed = 0;
  build->add_option("--ifc-dir", ifc_dir, "directory with .ifc files")->required();
  build->add_option("--obj-dir", obj_dir, "directory with per-model mesh folders")->required();
  build->add_option("--out", build_out, "output dataset directory")->required();
  build->add_option("--cap", cap, "max objects per class");
  build->add_option("--split", train_fraction, "train fraction");
  build->add_option("--seed", build_seed, "seed for sampling/capping/splitting");
  build->add_option("--points", points, "points per cloud");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model variant");
  std::string train_dataset, train_variant = "full", train_out;
  double lr = 1e-3, weight_decay = 0.0;
  int epochs = 60, batch_size = 64;
  std::uint64_t train_seed = 0;
  bool quiet = false;
  train_cmd->add_option("--dataset", train_dataset, "dataset directory")->required();
  train_cmd->add_option("--variant", train_variant, "full|geo|rel|nofusion");
  train_cmd->add_option("--lr", lr, "learning rate");
  train_cmd->add_option("--epochs", epochs, "training epochs");
  train_cmd->add_option("--seed", train_seed, "seed");
  train_cmd->add_option("--weight-decay", weight_decay, "L2 weight decay");
  train_cmd->add_option("--batch", batch_size, "batch size");
  train_cmd->add_option("--out", train_out, "output directory")->required();
  train_cmd->add_flag("--quiet", quiet, "suppress per-epoch progress");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on a dataset");
  std::string eval_dataset, eval_ckpt, eval_report;
  int eval_batch = 64;
  evaluate->add_option("--dataset", eval_dataset, "dataset directory")->required();
  evaluate->add_option("--ckpt", eval_ckpt, "checkpoint file")->required();
  evaluate->add_option("--report", eval_report, "report output path")->required();
  evaluate->add_option("--batch", eval_batch, "batch size");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Train and compare all four variants");
  std::string ablate_dataset, ablate_config;
  ablate->add_option("--dataset", ablate_dataset, "dataset directory")->required();
  ablate->add_option("--config", ablate_config, "key=value training config file")->required();

  // report
  auto* report = app.add_subcommand("report", "Parameter and MAC counts of a checkpoint");
  std::string report_ckpt;
  report->add_option("--ckpt", report_ckpt, "checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*extract) return run_extract(extract_files, extract_out);
    if (*build) {
      return run_build_dataset(ifc_dir, obj_dir, build_out, cap, train_fraction, build_seed,
                               points);
    }
    if (*train_cmd) {
      return run_train(train_dataset, train_variant, lr, epochs, train_seed, weight_decay,
                       batch_size, train_out, quiet);
    }
    if (*evaluate) return run_evaluate(eval_dataset, eval_ckpt, eval_report, eval_batch);
    if (*ablate) return run_ablate(ablate_dataset, ablate_config);
    if (*report) return run_report(report_ckpt);
  } catch (const nn::NnError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const model::VariantMismatch& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
