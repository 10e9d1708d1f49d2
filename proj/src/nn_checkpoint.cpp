#include "ifcgrl/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ifcgrl::nn {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class ByteReader {
 public:
  explicit ByteReader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) {
      throw std::runtime_error("checkpoint truncated");
    }
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string get_string(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw std::runtime_error("checkpoint truncated");
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void skip(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw std::runtime_error("checkpoint truncated");
    pos_ += n;
  }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

std::string check_header(ByteReader& reader) {
  std::string tag = reader.get_string(std::strlen(kCheckpointTag) + 1);
  if (tag != std::string(kCheckpointTag) + "\n") {
    throw std::runtime_error("not an ifc-grl checkpoint");
  }
  return tag;
}

}  // namespace

std::string serialize_parameters(const std::vector<ParamRef>& params) {
  std::string out;
  out += kCheckpointTag;
  out += '\n';
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const ParamRef& ref : params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(ref.name.size()));
    out += ref.name;
    const Tensor& t = ref.param->value;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) put<std::uint64_t>(out, static_cast<std::uint64_t>(d));
    std::size_t bytes = t.size() * sizeof(double);
    std::size_t offset = out.size();
    out.resize(offset + bytes);
    std::memcpy(out.data() + offset, t.data(), bytes);
  }
  return out;
}

void deserialize_parameters(const std::string& bytes, const std::vector<ParamRef>& params) {
  ByteReader reader(bytes);
  check_header(reader);
  std::uint32_t count = reader.get<std::uint32_t>();
  if (count != params.size()) {
    throw std::runtime_error("checkpoint parameter count mismatch: stored " +
                             std::to_string(count) + ", expected " +
                             std::to_string(params.size()));
  }
  for (const ParamRef& ref : params) {
    std::uint32_t name_len = reader.get<std::uint32_t>();
    std::string name = reader.get_string(name_len);
    if (name != ref.name) {
      throw std::runtime_error("checkpoint parameter '" + name + "' does not match expected '" +
                               ref.name + "'");
    }
    std::uint32_t rank = reader.get<std::uint32_t>();
    std::vector<std::size_t> shape(rank);
    for (std::uint32_t i = 0; i < rank; ++i) {
      shape[i] = static_cast<std::size_t>(reader.get<std::uint64_t>());
    }
    Tensor& t = ref.param->value;
    if (shape != t.shape()) {
      throw std::runtime_error("checkpoint shape mismatch for '" + name + "'");
    }
    for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = reader.get<double>();
  }
}

void save_checkpoint(const std::filesystem::path& path, const std::vector<ParamRef>& params) {
  std::string bytes = serialize_parameters(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

void load_checkpoint(const std::filesystem::path& path, const std::vector<ParamRef>& params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  deserialize_parameters(std::move(buf).str(), params);
}

std::vector<CheckpointEntry> read_checkpoint_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string bytes = std::move(buf).str();

  ByteReader reader(bytes);
  check_header(reader);
  std::uint32_t count = reader.get<std::uint32_t>();
  std::vector<CheckpointEntry> entries;
  entries.reserve(count);
  for (std::uint32_t p = 0; p < count; ++p) {
    CheckpointEntry entry;
    std::uint32_t name_len = reader.get<std::uint32_t>();
    entry.name = reader.get_string(name_len);
    std::uint32_t rank = reader.get<std::uint32_t>();
    std::size_t total = 1;
    entry.shape.resize(rank);
    for (std::uint32_t i = 0; i < rank; ++i) {
      entry.shape[i] = static_cast<std::size_t>(reader.get<std::uint64_t>());
      total *= entry.shape[i];
    }
    reader.skip(total * sizeof(double) * (rank == 0 ? 0 : 1));
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace ifcgrl::nn
